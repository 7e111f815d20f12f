//! Run configuration shared by every subcommand: defaults, then a
//! `key = value` file, then explicit flags.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::dynfilter::{FilterConfig, FilterMode, ValidityConfig, DEFAULT_DYNAMIC_CLASSES};
use crate::geometry::{GeomMode, MatchParams, RansacParams, VerifyParams};
use crate::seed::derive_seed;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("invalid value '{value}' for '{key}': {msg}")]
    BadValue { key: String, value: String, msg: String },
    #[error("i/o error reading config: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Filter(#[from] crate::dynfilter::FilterError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub keypoints: usize,
    pub sensitivity: f64,
    pub filter_mode: FilterMode,
    pub no_filter: bool,
    pub det_conf: f64,
    pub dynamic_classes: Vec<String>,
    pub place_threshold: usize,
    pub gate_store: bool,
    pub gate_query: bool,
    pub geom: GeomMode,
    pub ransac_iters: usize,
    pub ransac_thresh: f64,
    pub min_inliers: usize,
    pub vocab: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ransac = RansacParams::default();
        Self {
            keypoints: 500,
            sensitivity: FilterConfig::default().sensitivity,
            filter_mode: FilterMode::Heuristic,
            no_filter: false,
            det_conf: FilterConfig::default().detector_confidence_min,
            dynamic_classes: DEFAULT_DYNAMIC_CLASSES.iter().map(|s| s.to_string()).collect(),
            place_threshold: ValidityConfig::default().place_threshold,
            gate_store: false,
            gate_query: false,
            geom: GeomMode::Disabled,
            ransac_iters: ransac.max_iterations,
            ransac_thresh: ransac.inlier_threshold,
            min_inliers: ransac.min_inliers,
            vocab: None,
            seed: 1,
        }
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

impl RunConfig {
    /// Sets one field from its flag name (with `-` or `_`).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |msg: &str| ConfigError::BadValue {
            key: key.to_owned(),
            value: value.to_owned(),
            msg: msg.to_owned(),
        };
        let num = |msg: &str| bad(msg);
        match key.replace('-', "_").as_str() {
            "keypoints" => self.keypoints = value.parse().map_err(|_| num("expected an integer"))?,
            "sensitivity" => self.sensitivity = value.parse().map_err(|_| num("expected a number"))?,
            "filter_mode" => self.filter_mode = value.parse().map_err(|e: String| bad(&e))?,
            "no_filter" => self.no_filter = parse_bool(value).ok_or_else(|| bad("expected true or false"))?,
            "det_conf" => self.det_conf = value.parse().map_err(|_| num("expected a number"))?,
            "dynamic_classes" => {
                self.dynamic_classes = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }
            "place_threshold" => self.place_threshold = value.parse().map_err(|_| num("expected an integer"))?,
            "gate_store" => self.gate_store = parse_bool(value).ok_or_else(|| bad("expected true or false"))?,
            "gate_query" => self.gate_query = parse_bool(value).ok_or_else(|| bad("expected true or false"))?,
            "geom" => self.geom = value.parse().map_err(|e: String| bad(&e))?,
            "ransac_iters" => self.ransac_iters = value.parse().map_err(|_| num("expected an integer"))?,
            "ransac_thresh" => self.ransac_thresh = value.parse().map_err(|_| num("expected a number"))?,
            "min_inliers" => self.min_inliers = value.parse().map_err(|_| num("expected an integer"))?,
            "vocab" => self.vocab = Some(PathBuf::from(value)),
            "seed" => self.seed = value.parse().map_err(|_| num("expected an integer"))?,
            _ => return Err(ConfigError::UnknownKey(key.to_owned())),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: "expected `key = value`".into(),
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        self.apply_text(&fs::read_to_string(path)?)
    }

    pub fn filter_config(&self) -> FilterConfig {
        FilterConfig {
            sensitivity: self.sensitivity,
            mode: self.filter_mode,
            dynamic_classes: self.dynamic_classes.iter().cloned().collect(),
            detector_confidence_min: self.det_conf,
        }
    }

    pub fn validity(&self) -> ValidityConfig {
        ValidityConfig {
            place_threshold: self.place_threshold,
        }
    }

    pub fn verify_params(&self) -> VerifyParams {
        VerifyParams {
            matching: MatchParams::default(),
            ransac: RansacParams {
                max_iterations: self.ransac_iters,
                inlier_threshold: self.ransac_thresh,
                min_inliers: self.min_inliers,
                seed: derive_seed(self.seed, "ransac"),
            },
        }
    }

    /// Checks every value against the owning module's preconditions.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, value: String, msg: &str| ConfigError::BadValue {
            key: key.into(),
            value,
            msg: msg.into(),
        };
        if self.keypoints == 0 {
            return Err(bad("keypoints", "0".into(), "must be positive"));
        }
        self.filter_config().validate()?;
        if self.ransac_iters == 0 {
            return Err(bad("ransac-iters", "0".into(), "must be at least 1"));
        }
        if !(self.ransac_thresh > 0.0 && self.ransac_thresh.is_finite()) {
            return Err(bad("ransac-thresh", self.ransac_thresh.to_string(), "must be positive"));
        }
        Ok(())
    }

    /// `key = value` rendering, readable back by [`RunConfig::apply_text`].
    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("keypoints = {}", self.keypoints),
            format!("sensitivity = {}", self.sensitivity),
            format!("filter_mode = {}", self.filter_mode),
            format!("no_filter = {}", self.no_filter),
            format!("det_conf = {}", self.det_conf),
            format!("dynamic_classes = {}", self.dynamic_classes.join(",")),
            format!("place_threshold = {}", self.place_threshold),
            format!("gate_store = {}", self.gate_store),
            format!("gate_query = {}", self.gate_query),
            format!("geom = {}", self.geom),
            format!("ransac_iters = {}", self.ransac_iters),
            format!("ransac_thresh = {}", self.ransac_thresh),
            format!("min_inliers = {}", self.min_inliers),
        ];
        if let Some(v) = &self.vocab {
            lines.push(format!("vocab = {}", v.display()));
        }
        lines.push(format!("seed = {}", self.seed));
        lines.join("\n") + "\n"
    }
}
