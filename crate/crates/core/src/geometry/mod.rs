//! Geometric verification: descriptor matching, optionally restricted by
//! the direct index, followed by RANSAC fundamental-matrix estimation.

mod fundamental;
mod matching;

use std::fmt;
use std::str::FromStr;

pub use fundamental::{
    eight_point, estimate_fundamental_ransac, symmetric_epipolar_distance, FundamentalModel, RansacParams,
};
pub use matching::{match_by_node, match_exhaustive, Correspondence, MatchParams};

use crate::features::Feature;
use crate::vocabulary::{DirectEntries, VocabularyTree};

/// How candidate places are verified after scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeomMode {
    #[default]
    Disabled,
    /// Correspondences only between features sharing a direct-index node
    /// at this level.
    Level(usize),
    Exhaustive,
}

impl GeomMode {
    pub fn is_enabled(&self) -> bool {
        !matches!(self, GeomMode::Disabled)
    }
}

impl fmt::Display for GeomMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomMode::Disabled => f.write_str("disabled"),
            GeomMode::Level(l) => write!(f, "level:{l}"),
            GeomMode::Exhaustive => f.write_str("exhaustive"),
        }
    }
}

impl FromStr for GeomMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "disabled" => Ok(GeomMode::Disabled),
            "exhaustive" => Ok(GeomMode::Exhaustive),
            other => other
                .strip_prefix("level:")
                .and_then(|l| l.parse().ok())
                .map(GeomMode::Level)
                .ok_or_else(|| format!("invalid geometric mode '{other}' (disabled, level:N, exhaustive)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyParams {
    pub matching: MatchParams,
    pub ransac: RansacParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verification {
    pub passed: bool,
    pub inliers: usize,
}

/// Direct index at `level` for an arbitrary feature list.
pub fn direct_index(tree: &VocabularyTree, features: &[Feature], level: usize) -> DirectEntries {
    let mut direct = DirectEntries {
        level,
        ..Default::default()
    };
    for (i, f) in features.iter().enumerate() {
        let node = tree.quantize(&f.descriptor, level).1;
        direct.nodes.entry(node).or_default().push(i as u32);
    }
    direct
}

/// Correspondence search for `mode`. `Level` needs both direct indexes built
/// at that level; `Disabled` yields no correspondences.
pub fn match_features(
    query: &[Feature],
    query_direct: Option<&DirectEntries>,
    candidate: &[Feature],
    candidate_direct: Option<&DirectEntries>,
    mode: GeomMode,
    params: &MatchParams,
) -> Vec<Correspondence> {
    match mode {
        GeomMode::Disabled => Vec::new(),
        GeomMode::Exhaustive => match_exhaustive(query, candidate, params),
        GeomMode::Level(l) => match (query_direct, candidate_direct) {
            (Some(q), Some(c)) if q.level == l && c.level == l => {
                match_by_node(query, &q.nodes, candidate, &c.nodes, params)
            }
            _ => Vec::new(),
        },
    }
}

/// Passes iff RANSAC finds a model with at least `min_inliers` inliers.
pub fn verify(matches: &[Correspondence], params: &RansacParams) -> Verification {
    match estimate_fundamental_ransac(matches, params) {
        Some(model) => Verification {
            passed: model.inliers.len() >= params.min_inliers,
            inliers: model.inliers.len(),
        },
        None => Verification {
            passed: false,
            inliers: 0,
        },
    }
}
