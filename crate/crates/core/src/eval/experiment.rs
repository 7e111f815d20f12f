//! Paired filtered/unfiltered place recognition runs.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::synth::{Placement, SyntheticSequence};
use super::EvalError;
use crate::dynfilter::{dynamic_coverage, partition, ClassifiedRepresentation, DetectionSet, Detections, FilterConfig, ValidityConfig};
use crate::features::{extract_with, Feature, SamplingPattern, DEFAULT_FAST_THRESHOLD};
use crate::geometry::{GeomMode, VerifyParams};
use crate::image::{load_any, GrayImage};
use crate::placedb::{AddOutcome, DbConfig, PlaceDatabase, QueryOptions, QueryOutcome};
use crate::vocabulary::VocabularyTree;

/// Query buckets by dynamic coverage: label and strict lower bound.
pub const BUCKETS: [(&str, f64); 4] = [("all", f64::NEG_INFINITY), (">10%", 0.10), (">20%", 0.20), (">30%", 0.30)];

#[derive(Debug, Clone)]
pub struct EvalFrame {
    pub frame_id: String,
    pub place_id: u32,
    pub image: GrayImage,
    pub detections: DetectionSet,
    /// Rendered objects when the frame is synthetic.
    pub objects: Option<Vec<Placement>>,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub frames: Vec<EvalFrame>,
}

impl Dataset {
    pub fn from_sequence(seq: &SyntheticSequence) -> Self {
        let frames = seq
            .frames
            .iter()
            .map(|f| EvalFrame {
                frame_id: f.frame_id.clone(),
                place_id: f.place_id,
                image: f.image.clone(),
                detections: DetectionSet::new(f.frame_id.clone(), f.boxes()),
                objects: Some(f.objects.clone()),
            })
            .collect();
        Self { frames }
    }

    /// Frames `<frames_dir>/<frame_id>.pgm` (or `.ppm`) for every ground-truth
    /// record, in frame id order.
    pub fn from_files(
        frames_dir: &Path,
        detections: &Detections,
        ground_truth: &BTreeMap<String, u32>,
    ) -> Result<Self, EvalError> {
        let mut frames = Vec::with_capacity(ground_truth.len());
        for (id, &place) in ground_truth {
            let pgm = frames_dir.join(format!("{id}.pgm"));
            let path = if pgm.exists() { pgm } else { frames_dir.join(format!("{id}.ppm")) };
            frames.push(EvalFrame {
                frame_id: id.clone(),
                place_id: place,
                image: load_any(&path)?,
                detections: detections.frame(id),
                objects: None,
            });
        }
        Ok(Self { frames })
    }

    /// Indexes of the first frame of each place, then of the rest.
    pub fn split(&self) -> (Vec<usize>, Vec<usize>) {
        let mut seen = HashSet::new();
        let (mut reference, mut queries) = (Vec::new(), Vec::new());
        for (i, f) in self.frames.iter().enumerate() {
            if seen.insert(f.place_id) {
                reference.push(i);
            } else {
                queries.push(i);
            }
        }
        (reference, queries)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub keypoints: Vec<usize>,
    pub geom_modes: Vec<GeomMode>,
    pub filter: FilterConfig,
    pub validity: ValidityConfig,
    pub gate_store: bool,
    pub gate_query: bool,
    pub verify: VerifyParams,
    /// Direct-index level for non-`Level` geometric modes.
    pub direct_level: usize,
    pub fast_threshold: u8,
    pub max_results: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            keypoints: vec![500],
            geom_modes: vec![GeomMode::Disabled],
            filter: FilterConfig::default(),
            validity: ValidityConfig::default(),
            gate_store: true,
            gate_query: true,
            verify: VerifyParams::default(),
            direct_level: 0,
            fast_threshold: DEFAULT_FAST_THRESHOLD,
            max_results: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BucketStats {
    pub queries: usize,
    pub skipped: usize,
    pub correct: usize,
}

impl BucketStats {
    /// Percent correct over answered (non-skipped) queries.
    pub fn accuracy(&self) -> Option<f64> {
        let answered = self.queries - self.skipped;
        (answered > 0).then(|| 100.0 * self.correct as f64 / answered as f64)
    }

    /// Percent correct counting skipped queries as failures.
    pub fn accuracy_with_skips(&self) -> Option<f64> {
        (self.queries > 0).then(|| 100.0 * self.correct as f64 / self.queries as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub keypoints: usize,
    pub geom: GeomMode,
    pub filtered: bool,
    pub buckets: [BucketStats; 4],
    pub entries: usize,
    pub rejected: u64,
    pub stored_features: usize,
    pub stored_feature_bytes: u64,
    pub db_bytes: u64,
    /// Features extracted from the reference frames (before filtering).
    pub reference_features: usize,
    /// Of those, features whose keypoint lies on a rendered object.
    pub reference_features_on_objects: Option<usize>,
    pub mean_query_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<RunRow>,
    /// `key = value` lines describing the run.
    pub settings: Vec<(String, String)>,
}

impl EvalReport {
    pub fn row(&self, keypoints: usize, geom: GeomMode, filtered: bool) -> Option<&RunRow> {
        self.rows
            .iter()
            .find(|r| r.keypoints == keypoints && r.geom == geom && r.filtered == filtered)
    }
}

struct Prepared {
    features: Vec<Feature>,
    filtered: ClassifiedRepresentation,
    coverage: f64,
    on_objects: Option<usize>,
}

fn prepare(frame: &EvalFrame, keypoints: usize, config: &ExperimentConfig, pattern: &SamplingPattern) -> Result<Prepared, EvalError> {
    let features = extract_with(&frame.image, keypoints, config.fast_threshold, pattern)?;
    let filtered = partition(&features, &frame.detections, &config.filter, pattern)?;
    let relevant = frame.detections.relevant(&config.filter);
    let coverage = dynamic_coverage(&relevant, frame.image.width(), frame.image.height());
    let on_objects = frame.objects.as_ref().map(|objs| {
        features
            .iter()
            .filter(|f| {
                let (x, y) = (f.keypoint.x as usize, f.keypoint.y as usize);
                objs.iter().any(|o| o.covers(x, y))
            })
            .count()
    });
    Ok(Prepared {
        features,
        filtered,
        coverage,
        on_objects,
    })
}

fn run_arm(
    dataset: &Dataset,
    prepared: &[Prepared],
    vocab: &Arc<VocabularyTree>,
    keypoints: usize,
    geom: GeomMode,
    filtered: bool,
    config: &ExperimentConfig,
) -> Result<RunRow, EvalError> {
    let (reference, queries) = dataset.split();
    let direct_level = match geom {
        GeomMode::Level(l) => l,
        _ => config.direct_level,
    };
    let mut db = PlaceDatabase::new(
        vocab.clone(),
        DbConfig {
            direct_level,
            gate_store: config.gate_store,
            validity: config.validity,
        },
    )?;
    let representation = |i: usize| -> ClassifiedRepresentation {
        if filtered {
            prepared[i].filtered.clone()
        } else {
            ClassifiedRepresentation::unfiltered(prepared[i].features.clone())
        }
    };
    let mut place_of_entry = Vec::new();
    for &i in &reference {
        let f = &dataset.frames[i];
        if let AddOutcome::Stored(_) = db.add_place(&representation(i), &f.frame_id, prepared[i].coverage)? {
            place_of_entry.push(f.place_id);
        }
    }
    let options = QueryOptions {
        max_results: config.max_results,
        gate: config.gate_query,
        validity: config.validity,
        geom,
        verify: config.verify,
        shortlist: 10,
    };
    let mut buckets = [BucketStats::default(); 4];
    let mut total_secs = 0.0;
    for &i in &queries {
        let rep = representation(i);
        let start = Instant::now();
        let outcome = db.query(&rep, &options)?;
        total_secs += start.elapsed().as_secs_f64();
        let (skipped, correct) = match outcome {
            QueryOutcome::Skipped { .. } => (true, false),
            QueryOutcome::Ranked(r) => (
                false,
                r.best_match()
                    .is_some_and(|c| place_of_entry[c.place_id as usize] == dataset.frames[i].place_id),
            ),
        };
        for (b, &(_, lower)) in buckets.iter_mut().zip(BUCKETS.iter()) {
            if prepared[i].coverage > lower {
                b.queries += 1;
                b.skipped += skipped as usize;
                b.correct += correct as usize;
            }
        }
    }
    let stats = db.stats();
    let on_objects: Option<usize> = reference.iter().map(|&i| prepared[i].on_objects).sum();
    Ok(RunRow {
        keypoints,
        geom,
        filtered,
        buckets,
        entries: stats.entries,
        rejected: db.rejected(),
        stored_features: stats.stored_features,
        stored_feature_bytes: stats.stored_feature_bytes,
        db_bytes: stats.file_bytes,
        reference_features: reference.iter().map(|&i| prepared[i].features.len()).sum(),
        reference_features_on_objects: on_objects,
        mean_query_ms: if queries.is_empty() {
            0.0
        } else {
            1e3 * total_secs / queries.len() as f64
        },
    })
}

/// Runs every (keypoints, geometric mode) configuration on both arms. Both
/// arms share the extracted features, detections, vocabulary and seeds.
pub fn run_experiment(
    dataset: &Dataset,
    vocab: Arc<VocabularyTree>,
    config: &ExperimentConfig,
) -> Result<EvalReport, EvalError> {
    config.filter.validate()?;
    let (reference, queries) = dataset.split();
    if reference.is_empty() || queries.is_empty() {
        return Err(EvalError::Config("dataset needs at least two visits of some place".into()));
    }
    for g in &config.geom_modes {
        if let GeomMode::Level(l) = g {
            if *l > vocab.levels() {
                return Err(EvalError::Config(format!("geometric level {l} exceeds vocabulary depth {}", vocab.levels())));
            }
        }
    }
    let pattern = SamplingPattern::orb();
    let mut rows = Vec::new();
    for &kp in &config.keypoints {
        let prepared = dataset
            .frames
            .par_iter()
            .map(|f| prepare(f, kp, config, &pattern))
            .collect::<Result<Vec<_>, _>>()?;
        for &geom in &config.geom_modes {
            for filtered in [false, true] {
                rows.push(run_arm(dataset, &prepared, &vocab, kp, geom, filtered, config)?);
            }
        }
    }
    let settings = experiment_settings(config, &vocab);
    Ok(EvalReport { rows, settings })
}

fn experiment_settings(config: &ExperimentConfig, vocab: &VocabularyTree) -> Vec<(String, String)> {
    let join = |v: Vec<String>| v.join(",");
    vec![
        ("keypoints".into(), join(config.keypoints.iter().map(|k| k.to_string()).collect())),
        ("geom".into(), join(config.geom_modes.iter().map(|g| g.to_string()).collect())),
        ("sensitivity".into(), config.filter.sensitivity.to_string()),
        ("filter_mode".into(), config.filter.mode.to_string()),
        ("det_conf".into(), config.filter.detector_confidence_min.to_string()),
        (
            "dynamic_classes".into(),
            join(config.filter.dynamic_classes.iter().cloned().collect()),
        ),
        ("place_threshold".into(), config.validity.place_threshold.to_string()),
        ("gate_store".into(), config.gate_store.to_string()),
        ("gate_query".into(), config.gate_query.to_string()),
        ("ransac_iters".into(), config.verify.ransac.max_iterations.to_string()),
        ("ransac_thresh".into(), config.verify.ransac.inlier_threshold.to_string()),
        ("min_inliers".into(), config.verify.ransac.min_inliers.to_string()),
        ("ransac_seed".into(), config.verify.ransac.seed.to_string()),
        ("match_max_distance".into(), config.verify.matching.max_distance.to_string()),
        ("match_ratio".into(), config.verify.matching.ratio.to_string()),
        ("direct_level".into(), config.direct_level.to_string()),
        ("fast_threshold".into(), config.fast_threshold.to_string()),
        ("max_results".into(), config.max_results.to_string()),
        ("vocab_branching".into(), vocab.branching().to_string()),
        ("vocab_levels".into(), vocab.levels().to_string()),
        ("vocab_words".into(), vocab.word_count().to_string()),
        ("vocab_fingerprint".into(), format!("{:016x}", vocab.fingerprint())),
    ]
}
