//! Place recognition with bags of binary words, filtered by dynamic object
//! detections.
//!
//! Pipeline: [`features`] extracts oriented binary descriptors from a
//! [`image::GrayImage`]; [`dynfilter`] splits them into static and
//! dynamic-affected sets using detector bounding boxes; [`vocabulary`]
//! quantizes the static set to a bag of words; [`placedb`] stores and
//! queries bags through an inverted index, optionally confirming candidates
//! with [`geometry`]. [`eval`] generates synthetic sequences and runs the
//! paired filtered/unfiltered experiment.

pub mod cli;
pub mod config;
pub mod dynfilter;
pub mod eval;
pub mod features;
pub mod geometry;
pub mod image;
pub mod placedb;
pub mod seed;
pub mod vocabulary;
