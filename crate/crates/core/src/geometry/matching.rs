use std::collections::BTreeMap;

use crate::features::{hamming, Feature};

/// A putative match between a query feature and a candidate feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub query_index: u32,
    pub candidate_index: u32,
    pub query: (f64, f64),
    pub candidate: (f64, f64),
    pub distance: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchParams {
    /// Largest accepted Hamming distance.
    pub max_distance: u32,
    /// Nearest must be strictly below `ratio` times the second nearest.
    pub ratio: f64,
    pub ratio_test: bool,
    pub mutual_best: bool,
}

impl Default for MatchParams {
    fn default() -> Self {
        Self {
            max_distance: 64,
            ratio: 0.8,
            ratio_test: true,
            mutual_best: true,
        }
    }
}

/// Best and second-best distance from `d` into `pool`; ties keep the lower index.
fn two_nearest(features: &[Feature], d: &Feature, pool: &[u32]) -> Option<(u32, u32, u32)> {
    let mut best = (u32::MAX, u32::MAX);
    let mut second = u32::MAX;
    for &j in pool {
        let dist = hamming(&d.descriptor, &features[j as usize].descriptor);
        if dist < best.0 {
            second = best.0;
            best = (dist, j);
        } else if dist < second {
            second = dist;
        }
    }
    (best.1 != u32::MAX).then_some((best.1, best.0, second))
}

/// Matches inside groups of features. `groups` pairs the query and
/// candidate feature indexes that may be compared with each other.
fn match_groups<'a>(
    query: &[Feature],
    candidate: &[Feature],
    groups: impl Iterator<Item = (&'a [u32], &'a [u32])>,
    params: &MatchParams,
) -> Vec<Correspondence> {
    let mut out = Vec::new();
    for (qs, cs) in groups {
        for &qi in qs {
            let q = &query[qi as usize];
            let Some((cj, d1, d2)) = two_nearest(candidate, q, cs) else {
                continue;
            };
            if d1 > params.max_distance {
                continue;
            }
            if params.ratio_test && d2 != u32::MAX && (d1 as f64) >= params.ratio * d2 as f64 {
                continue;
            }
            if params.mutual_best {
                let back = two_nearest(query, &candidate[cj as usize], qs).map(|r| r.0);
                if back != Some(qi) {
                    continue;
                }
            }
            let c = &candidate[cj as usize];
            out.push(Correspondence {
                query_index: qi,
                candidate_index: cj,
                query: (q.keypoint.x as f64, q.keypoint.y as f64),
                candidate: (c.keypoint.x as f64, c.keypoint.y as f64),
                distance: d1,
            });
        }
    }
    out.sort_by_key(|c| c.query_index);
    out
}

/// Nearest-neighbour matching over all candidate features.
pub fn match_exhaustive(query: &[Feature], candidate: &[Feature], params: &MatchParams) -> Vec<Correspondence> {
    let qs: Vec<u32> = (0..query.len() as u32).collect();
    let cs: Vec<u32> = (0..candidate.len() as u32).collect();
    match_groups(query, candidate, std::iter::once((&qs[..], &cs[..])), params)
}

/// Matching restricted to features sharing a direct-index node.
pub fn match_by_node(
    query: &[Feature],
    query_nodes: &BTreeMap<u32, Vec<u32>>,
    candidate: &[Feature],
    candidate_nodes: &BTreeMap<u32, Vec<u32>>,
    params: &MatchParams,
) -> Vec<Correspondence> {
    let shared = query_nodes
        .iter()
        .filter_map(|(node, qs)| candidate_nodes.get(node).map(|cs| (qs.as_slice(), cs.as_slice())));
    match_groups(query, candidate, shared, params)
}
