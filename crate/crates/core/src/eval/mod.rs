//! Synthetic benchmark generation and the paired filtered/unfiltered
//! evaluation with coverage-bucketed accuracy, storage and timing.

mod experiment;
mod report;
mod synth;

use thiserror::Error;

pub use experiment::{
    run_experiment, BucketStats, Dataset, EvalFrame, EvalReport, ExperimentConfig, RunRow, BUCKETS,
};
pub use report::{
    accuracy_table, bar_chart, emit_report, percent_change, runs_table, settings_text, storage_table, summary_lines,
    timing_table,
};
pub use synth::{
    generate_sequence, place_objects, place_texture, read_ground_truth, render, training_images, write_ground_truth,
    GeneratorConfig, ObjectPool, Placement, SyntheticFrame, SyntheticSequence, OBJECT_CLASSES,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Image(#[from] crate::image::ImageError),
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
    #[error(transparent)]
    Filter(#[from] crate::dynfilter::FilterError),
    #[error(transparent)]
    Vocab(#[from] crate::vocabulary::VocabError),
    #[error(transparent)]
    Db(#[from] crate::placedb::DbError),
}
