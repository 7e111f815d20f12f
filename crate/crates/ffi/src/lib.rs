//! C ABI over the `dynplace` engine.
//!
//! Vocabularies and databases are opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`DpStatus`]; on failure [`dp_last_error`] describes the problem for the
//! calling thread. Images are 8-bit grayscale, row-major, tightly packed.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::sync::Arc;

use dynplace::config::RunConfig;
use dynplace::dynfilter::{self, BoundingBox, ClassifiedRepresentation, DetectionSet, FilterMode};
use dynplace::features::{self, BinaryDescriptor, Feature, SamplingPattern, DEFAULT_FAST_THRESHOLD};
use dynplace::geometry::GeomMode;
use dynplace::image::GrayImage;
use dynplace::placedb::{self, AddOutcome, DbConfig, PlaceDatabase, QueryOptions, QueryOutcome};
use dynplace::vocabulary::{self, VocabularyTree};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    /// Vocabulary and database do not belong together.
    Mismatch = 5,
    /// Duplicate frame id or empty representation.
    Rejected = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpFilterMode {
    Heuristic = 0,
    Exact = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpGeomMode {
    Disabled = 0,
    /// Correspondences restricted to shared direct-index nodes at `geom_level`.
    Level = 1,
    Exhaustive = 2,
}

/// Pipeline settings. Start from [`dp_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpConfig {
    pub keypoints: u32,
    pub sensitivity: f64,
    pub filter_mode: DpFilterMode,
    /// Keep every descriptor.
    pub no_filter: bool,
    pub detector_confidence_min: f64,
    /// Valid when more than this many static features remain.
    pub place_threshold: u32,
    pub gate_store: bool,
    pub gate_query: bool,
    pub geom_mode: DpGeomMode,
    pub geom_level: u32,
    pub ransac_iterations: u32,
    pub ransac_threshold: f64,
    pub min_inliers: u32,
    pub seed: u64,
}

/// Borrowed grayscale image.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DpImage {
    pub data: *const u8,
    pub width: u32,
    pub height: u32,
}

/// Detection box given by its centre and size in pixels.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DpBox {
    pub cx: f64,
    pub cy: f64,
    pub width: f64,
    pub height: f64,
    pub confidence: f64,
    /// NUL-terminated class name, e.g. "car".
    pub class_name: *const c_char,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DpCandidate {
    pub place_id: u32,
    pub score: f64,
    pub geom_checked: bool,
    pub geom_passed: bool,
    pub inliers: u32,
}

/// Opaque vocabulary tree.
pub struct DpVocabulary {
    tree: Arc<VocabularyTree>,
}

/// Opaque place database with its pipeline settings.
pub struct DpDatabase {
    db: PlaceDatabase,
    config: RunConfig,
}

struct Failure(DpStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Self(DpStatus::NullArgument, format!("{what} is null"))
    }
    fn invalid(msg: impl Into<String>) -> Self {
        Self(DpStatus::InvalidArgument, msg.into())
    }
}

impl From<vocabulary::VocabError> for Failure {
    fn from(e: vocabulary::VocabError) -> Self {
        use vocabulary::VocabError as E;
        let status = match &e {
            E::Io(_) => DpStatus::Io,
            E::Corrupt(_) | E::Version(_) => DpStatus::Format,
            _ => DpStatus::InvalidArgument,
        };
        Self(status, e.to_string())
    }
}

impl From<placedb::DbError> for Failure {
    fn from(e: placedb::DbError) -> Self {
        use placedb::DbError as E;
        let status = match &e {
            E::Io(_) => DpStatus::Io,
            E::Corrupt(_) | E::Version(_) => DpStatus::Format,
            E::VocabMismatch { .. } => DpStatus::Mismatch,
            E::EmptyBag | E::DuplicateFrame(_) => DpStatus::Rejected,
            E::Vocab(_) => DpStatus::InvalidArgument,
        };
        Self(status, e.to_string())
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Self::invalid(e.to_string())
            }
        }
    )*};
}
invalid_from!(
    dynplace::config::ConfigError,
    dynfilter::FilterError,
    features::FeatureError,
    dynplace::image::ImageError
);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, records any failure or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DpStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::invalid(format!("{what} is not UTF-8")))
}

unsafe fn image_arg(image: *const DpImage) -> Result<GrayImage, Failure> {
    let image = image.as_ref().ok_or_else(|| Failure::null("image"))?;
    if image.data.is_null() {
        return Err(Failure::null("image data"));
    }
    let (w, h) = (image.width as usize, image.height as usize);
    let pixels = std::slice::from_raw_parts(image.data, w * h).to_vec();
    Ok(GrayImage::new(w, h, pixels)?)
}

unsafe fn boxes_arg(boxes: *const DpBox, count: usize) -> Result<Vec<BoundingBox>, Failure> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if boxes.is_null() {
        return Err(Failure::null("boxes"));
    }
    std::slice::from_raw_parts(boxes, count)
        .iter()
        .map(|b| {
            let class = str_arg(b.class_name, "box class name")?;
            Ok(BoundingBox::new(b.cx, b.cy, b.width, b.height, class, b.confidence))
        })
        .collect()
}

fn run_config(c: &DpConfig) -> Result<RunConfig, Failure> {
    let r = RunConfig {
        keypoints: c.keypoints as usize,
        sensitivity: c.sensitivity,
        filter_mode: match c.filter_mode {
            DpFilterMode::Heuristic => FilterMode::Heuristic,
            DpFilterMode::Exact => FilterMode::Exact,
        },
        no_filter: c.no_filter,
        det_conf: c.detector_confidence_min,
        place_threshold: c.place_threshold as usize,
        gate_store: c.gate_store,
        gate_query: c.gate_query,
        geom: match c.geom_mode {
            DpGeomMode::Disabled => GeomMode::Disabled,
            DpGeomMode::Level => GeomMode::Level(c.geom_level as usize),
            DpGeomMode::Exhaustive => GeomMode::Exhaustive,
        },
        ransac_iters: c.ransac_iterations as usize,
        ransac_thresh: c.ransac_threshold,
        min_inliers: c.min_inliers as usize,
        seed: c.seed,
        ..RunConfig::default()
    };
    r.validate()?;
    Ok(r)
}

fn classify(image: &GrayImage, boxes: Vec<BoundingBox>, config: &RunConfig) -> Result<ClassifiedRepresentation, Failure> {
    let pattern = SamplingPattern::orb();
    let feats: Vec<Feature> = features::extract_with(image, config.keypoints, DEFAULT_FAST_THRESHOLD, &pattern)?;
    if config.no_filter {
        return Ok(ClassifiedRepresentation::unfiltered(feats));
    }
    let set = DetectionSet::new("", boxes);
    Ok(dynfilter::partition(&feats, &set, &config.filter_config(), &pattern)?)
}

fn db_config(config: &RunConfig) -> DbConfig {
    DbConfig {
        direct_level: match config.geom {
            GeomMode::Level(l) => l,
            _ => 0,
        },
        gate_store: config.gate_store,
        validity: config.validity(),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn dp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn dp_config_default() -> DpConfig {
    let r = RunConfig::default();
    DpConfig {
        keypoints: r.keypoints as u32,
        sensitivity: r.sensitivity,
        filter_mode: DpFilterMode::Heuristic,
        no_filter: r.no_filter,
        detector_confidence_min: r.det_conf,
        place_threshold: r.place_threshold as u32,
        gate_store: r.gate_store,
        gate_query: r.gate_query,
        geom_mode: DpGeomMode::Disabled,
        geom_level: 0,
        ransac_iterations: r.ransac_iters as u32,
        ransac_threshold: r.ransac_thresh,
        min_inliers: r.min_inliers as u32,
        seed: r.seed,
    }
}

/// Hamming distance between two 32-byte descriptors; `u32::MAX` if either is null.
#[no_mangle]
pub unsafe extern "C" fn dp_hamming(a: *const u8, b: *const u8) -> u32 {
    if a.is_null() || b.is_null() {
        return u32::MAX;
    }
    let a = BinaryDescriptor::from_bytes(&*(a as *const [u8; 32]));
    let b = BinaryDescriptor::from_bytes(&*(b as *const [u8; 32]));
    features::hamming(&a, &b)
}

/// Trains a vocabulary with branching `k` and depth `levels` from `count` images.
#[no_mangle]
pub unsafe extern "C" fn dp_vocab_train(
    images: *const DpImage,
    count: usize,
    k: u32,
    levels: u32,
    config: *const DpConfig,
    out: *mut *mut DpVocabulary,
) -> DpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| Failure::null("out"))?;
        *out = ptr::null_mut();
        let config = run_config(config.as_ref().ok_or_else(|| Failure::null("config"))?)?;
        if images.is_null() || count == 0 {
            return Err(Failure::invalid("no training images"));
        }
        let pattern = SamplingPattern::orb();
        let per_image = (0..count)
            .map(|i| {
                let img = image_arg(images.add(i))?;
                Ok(features::extract_with(&img, config.keypoints, DEFAULT_FAST_THRESHOLD, &pattern)?)
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        let seed = dynplace::seed::derive_seed(config.seed, "vocab");
        let tree = vocabulary::train_from_features(&per_image, k as usize, levels as usize, seed)?;
        *out = Box::into_raw(Box::new(DpVocabulary { tree: Arc::new(tree) }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dp_vocab_load(path: *const c_char, out: *mut *mut DpVocabulary) -> DpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| Failure::null("out"))?;
        *out = ptr::null_mut();
        let tree = vocabulary::load(PathBuf::from(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(DpVocabulary { tree: Arc::new(tree) }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dp_vocab_save(vocab: *const DpVocabulary, path: *const c_char) -> DpStatus {
    guard(|| {
        let vocab = vocab.as_ref().ok_or_else(|| Failure::null("vocabulary"))?;
        vocabulary::save(&vocab.tree, PathBuf::from(str_arg(path, "path")?))?;
        Ok(())
    })
}

/// Number of leaf words; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dp_vocab_word_count(vocab: *const DpVocabulary) -> u32 {
    vocab.as_ref().map_or(0, |v| v.tree.word_count() as u32)
}

#[no_mangle]
pub unsafe extern "C" fn dp_vocab_free(vocab: *mut DpVocabulary) {
    if !vocab.is_null() {
        drop(Box::from_raw(vocab));
    }
}

/// Empty database over `vocab`. The database keeps its own reference to
/// the vocabulary, so `vocab` may be freed afterwards.
#[no_mangle]
pub unsafe extern "C" fn dp_db_new(
    vocab: *const DpVocabulary,
    config: *const DpConfig,
    out: *mut *mut DpDatabase,
) -> DpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| Failure::null("out"))?;
        *out = ptr::null_mut();
        let vocab = vocab.as_ref().ok_or_else(|| Failure::null("vocabulary"))?;
        let config = run_config(config.as_ref().ok_or_else(|| Failure::null("config"))?)?;
        let db = PlaceDatabase::new(vocab.tree.clone(), db_config(&config))?;
        *out = Box::into_raw(Box::new(DpDatabase { db, config }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dp_db_load(
    path: *const c_char,
    vocab: *const DpVocabulary,
    config: *const DpConfig,
    out: *mut *mut DpDatabase,
) -> DpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| Failure::null("out"))?;
        *out = ptr::null_mut();
        let vocab = vocab.as_ref().ok_or_else(|| Failure::null("vocabulary"))?;
        let config = run_config(config.as_ref().ok_or_else(|| Failure::null("config"))?)?;
        let db = placedb::load(PathBuf::from(str_arg(path, "path")?), vocab.tree.clone())?;
        *out = Box::into_raw(Box::new(DpDatabase { db, config }));
        Ok(())
    })
}

/// Writes the database; `out_bytes` (optional) receives the file size.
#[no_mangle]
pub unsafe extern "C" fn dp_db_save(db: *const DpDatabase, path: *const c_char, out_bytes: *mut u64) -> DpStatus {
    guard(|| {
        let db = db.as_ref().ok_or_else(|| Failure::null("database"))?;
        let bytes = placedb::save(&db.db, PathBuf::from(str_arg(path, "path")?))?;
        if let Some(o) = out_bytes.as_mut() {
            *o = bytes;
        }
        Ok(())
    })
}

/// Extracts, filters and stores one frame. `out_place_id` receives the new
/// place id, or -1 when validity gating rejected the frame.
#[no_mangle]
pub unsafe extern "C" fn dp_db_add_frame(
    db: *mut DpDatabase,
    frame_id: *const c_char,
    image: *const DpImage,
    boxes: *const DpBox,
    box_count: usize,
    out_place_id: *mut i64,
) -> DpStatus {
    guard(|| {
        let db = db.as_mut().ok_or_else(|| Failure::null("database"))?;
        let frame_id = str_arg(frame_id, "frame id")?;
        let image = image_arg(image)?;
        let boxes = boxes_arg(boxes, box_count)?;
        let relevant = DetectionSet::new(frame_id, boxes.clone()).relevant(&db.config.filter_config());
        let coverage = dynfilter::dynamic_coverage(&relevant, image.width(), image.height());
        let classified = classify(&image, boxes, &db.config)?;
        let id = match db.db.add_place(&classified, frame_id, coverage)? {
            AddOutcome::Stored(id) => id as i64,
            AddOutcome::Rejected { .. } => -1,
        };
        if let Some(o) = out_place_id.as_mut() {
            *o = id;
        }
        Ok(())
    })
}

/// Queries with one frame. Up to `capacity` candidates are written to
/// `results` in rank order and their number to `out_count`. `out_skipped`
/// is set when gating skipped an invalid query (then `out_count` is 0).
#[no_mangle]
pub unsafe extern "C" fn dp_db_query_frame(
    db: *const DpDatabase,
    image: *const DpImage,
    boxes: *const DpBox,
    box_count: usize,
    results: *mut DpCandidate,
    capacity: usize,
    out_count: *mut usize,
    out_skipped: *mut bool,
) -> DpStatus {
    guard(|| {
        let db = db.as_ref().ok_or_else(|| Failure::null("database"))?;
        let out_count = out_count.as_mut().ok_or_else(|| Failure::null("out_count"))?;
        *out_count = 0;
        if capacity > 0 && results.is_null() {
            return Err(Failure::null("results"));
        }
        let image = image_arg(image)?;
        let classified = classify(&image, boxes_arg(boxes, box_count)?, &db.config)?;
        let options = QueryOptions {
            max_results: capacity,
            gate: db.config.gate_query,
            validity: db.config.validity(),
            geom: db.config.geom,
            verify: db.config.verify_params(),
            ..QueryOptions::default()
        };
        let outcome = db.db.query(&classified, &options)?;
        if let Some(s) = out_skipped.as_mut() {
            *s = matches!(outcome, QueryOutcome::Skipped { .. });
        }
        if let QueryOutcome::Ranked(result) = outcome {
            for (i, c) in result.candidates.iter().take(capacity).enumerate() {
                *results.add(i) = DpCandidate {
                    place_id: c.place_id,
                    score: c.score,
                    geom_checked: c.geometry.is_some(),
                    geom_passed: c.geometry.is_some_and(|g| g.passed),
                    inliers: c.geometry.map_or(0, |g| g.inliers as u32),
                };
                *out_count = i + 1;
            }
        }
        Ok(())
    })
}

/// Stored entries; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dp_db_len(db: *const DpDatabase) -> u32 {
    db.as_ref().map_or(0, |d| d.db.len() as u32)
}

/// Frames refused by validity gating; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dp_db_rejected(db: *const DpDatabase) -> u64 {
    db.as_ref().map_or(0, |d| d.db.rejected())
}

#[no_mangle]
pub unsafe extern "C" fn dp_db_free(db: *mut DpDatabase) {
    if !db.is_null() {
        drop(Box::from_raw(db));
    }
}
