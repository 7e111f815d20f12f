//! Place database: bag-of-words entries, inverted index, L1 scoring and
//! optional geometric verification of the best candidates.

mod io;
mod score;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

pub use io::{decode, encode, load, save, FEATURE_BYTES};
pub use score::l1_score;

use crate::dynfilter::{is_valid, ClassifiedRepresentation, ValidityConfig};
use crate::features::Feature;
use crate::geometry::{self, direct_index, GeomMode, Verification, VerifyParams};
use crate::vocabulary::{transform, BagOfWords, DirectEntries, VocabError, VocabularyTree};

#[derive(Debug, Error)]
pub enum DbError {
    #[error("unscorable empty representation")]
    EmptyBag,
    #[error("duplicate frame id '{0}'")]
    DuplicateFrame(String),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt database file: {0}")]
    Corrupt(&'static str),
    #[error("unsupported database version {0}")]
    Version(u32),
    #[error("database built with vocabulary {database:016x}, given vocabulary {vocabulary:016x}")]
    VocabMismatch { database: u64, vocabulary: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaceEntry {
    pub place_id: u32,
    pub frame_id: String,
    pub dynamic_coverage: f64,
    pub bag: BagOfWords,
    pub direct: DirectEntries,
    /// Static features kept for geometric verification.
    pub features: Vec<Feature>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DbConfig {
    /// Level of the stored direct index.
    pub direct_level: usize,
    /// Refuse to store invalid representations.
    pub gate_store: bool,
    pub validity: ValidityConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    Stored(u32),
    Rejected { static_count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryOptions {
    pub max_results: usize,
    /// Skip invalid query representations without touching the index.
    pub gate: bool,
    pub validity: ValidityConfig,
    pub geom: GeomMode,
    pub verify: VerifyParams,
    /// Number of top-scored candidates that are geometrically verified.
    pub shortlist: usize,
}

impl Default for QueryOptions {
    fn default() -> Self {
        Self {
            max_results: 10,
            gate: false,
            validity: ValidityConfig::default(),
            geom: GeomMode::Disabled,
            verify: VerifyParams::default(),
            shortlist: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub place_id: u32,
    pub score: f64,
    /// Present only when verification ran on this candidate.
    pub geometry: Option<Verification>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryResult {
    /// Descending score, ties by ascending place id.
    pub candidates: Vec<Candidate>,
}

impl QueryResult {
    /// Highest-scored candidate that is not rejected by verification.
    pub fn best_match(&self) -> Option<&Candidate> {
        self.candidates
            .iter()
            .find(|c| c.geometry.is_none_or(|g| g.passed))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryOutcome {
    Ranked(QueryResult),
    Skipped { static_count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbStats {
    pub entries: usize,
    /// Distinct words present in the inverted index.
    pub words: usize,
    pub stored_features: usize,
    pub stored_feature_bytes: u64,
    pub file_bytes: u64,
    pub mean_features_per_entry: f64,
}

/// Single writer (`add_place`), many readers (`query`).
#[derive(Debug)]
pub struct PlaceDatabase {
    vocab: Arc<VocabularyTree>,
    config: DbConfig,
    entries: Vec<PlaceEntry>,
    frame_ids: HashMap<String, u32>,
    /// word -> (place id, weight), sorted by place id.
    inverted: Vec<Vec<(u32, f64)>>,
    rejected: u64,
    index_lookups: AtomicU64,
}

impl PlaceDatabase {
    pub fn new(vocab: Arc<VocabularyTree>, config: DbConfig) -> Result<Self, DbError> {
        if config.direct_level > vocab.levels() {
            return Err(VocabError::BadLevel {
                level: config.direct_level,
                levels: vocab.levels(),
            }
            .into());
        }
        let words = vocab.word_count();
        Ok(Self {
            vocab,
            config,
            entries: Vec::new(),
            frame_ids: HashMap::new(),
            inverted: vec![Vec::new(); words],
            rejected: 0,
            index_lookups: AtomicU64::new(0),
        })
    }

    pub fn vocabulary(&self) -> &Arc<VocabularyTree> {
        &self.vocab
    }

    pub fn config(&self) -> &DbConfig {
        &self.config
    }

    pub fn entries(&self) -> &[PlaceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    /// Queries that reached the inverted index.
    pub fn index_lookups(&self) -> u64 {
        self.index_lookups.load(Ordering::Relaxed)
    }

    pub fn inverted_list(&self, word: u32) -> &[(u32, f64)] {
        self.inverted.get(word as usize).map_or(&[], Vec::as_slice)
    }

    fn insert_entry(&mut self, entry: PlaceEntry) -> Result<(), DbError> {
        if self.frame_ids.contains_key(&entry.frame_id) {
            return Err(DbError::DuplicateFrame(entry.frame_id));
        }
        for &(word, weight) in entry.bag.entries() {
            self.inverted[word as usize].push((entry.place_id, weight));
        }
        self.frame_ids.insert(entry.frame_id.clone(), entry.place_id);
        self.entries.push(entry);
        Ok(())
    }

    /// Stores the static features of `classified`. With store gating on,
    /// invalid representations are rejected and nothing is stored.
    pub fn add_place(
        &mut self,
        classified: &ClassifiedRepresentation,
        frame_id: &str,
        dynamic_coverage: f64,
    ) -> Result<AddOutcome, DbError> {
        if self.frame_ids.contains_key(frame_id) {
            return Err(DbError::DuplicateFrame(frame_id.to_owned()));
        }
        if self.config.gate_store && !is_valid(classified, &self.config.validity) {
            self.rejected += 1;
            return Ok(AddOutcome::Rejected {
                static_count: classified.static_features.len(),
            });
        }
        let features = classified.static_features.clone();
        let (bag, direct) = transform(&self.vocab, &features, self.config.direct_level)?;
        let place_id = self.entries.len() as u32;
        self.insert_entry(PlaceEntry {
            place_id,
            frame_id: frame_id.to_owned(),
            dynamic_coverage,
            bag,
            direct,
            features,
        })?;
        Ok(AddOutcome::Stored(place_id))
    }

    /// Places sharing at least one word with `bag`, ascending.
    pub fn candidate_places(&self, bag: &BagOfWords) -> Vec<u32> {
        let mut seen = vec![false; self.entries.len()];
        for &(word, _) in bag.entries() {
            for &(id, _) in self.inverted_list(word) {
                seen[id as usize] = true;
            }
        }
        (0..self.entries.len() as u32).filter(|&i| seen[i as usize]).collect()
    }

    pub fn query(&self, classified: &ClassifiedRepresentation, options: &QueryOptions) -> Result<QueryOutcome, DbError> {
        if options.gate && !is_valid(classified, &options.validity) {
            return Ok(QueryOutcome::Skipped {
                static_count: classified.static_features.len(),
            });
        }
        let level = match options.geom {
            GeomMode::Level(l) => l,
            _ => self.config.direct_level,
        };
        let features = &classified.static_features;
        let (bag, direct) = transform(&self.vocab, features, level)?;
        self.index_lookups.fetch_add(1, Ordering::Relaxed);
        if bag.is_empty() {
            return Ok(QueryOutcome::Ranked(QueryResult::default()));
        }
        let mut candidates = Vec::new();
        for id in self.candidate_places(&bag) {
            candidates.push(Candidate {
                place_id: id,
                score: l1_score(&bag, &self.entries[id as usize].bag)?,
                geometry: None,
            });
        }
        candidates.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.place_id.cmp(&b.place_id)));
        candidates.truncate(options.max_results);

        if options.geom.is_enabled() {
            for c in candidates.iter_mut().take(options.shortlist) {
                let entry = &self.entries[c.place_id as usize];
                let recomputed;
                let cand_direct = if entry.direct.level == level {
                    &entry.direct
                } else {
                    recomputed = direct_index(&self.vocab, &entry.features, level);
                    &recomputed
                };
                let matches = geometry::match_features(
                    features,
                    Some(&direct),
                    &entry.features,
                    Some(cand_direct),
                    options.geom,
                    &options.verify.matching,
                );
                let mut ransac = options.verify.ransac;
                ransac.seed = ransac.seed.wrapping_add(c.place_id as u64);
                c.geometry = Some(geometry::verify(&matches, &ransac));
            }
        }
        Ok(QueryOutcome::Ranked(QueryResult { candidates }))
    }

    pub fn stats(&self) -> DbStats {
        let stored_features: usize = self.entries.iter().map(|e| e.features.len()).sum();
        DbStats {
            entries: self.entries.len(),
            words: self.inverted.iter().filter(|l| !l.is_empty()).count(),
            stored_features,
            stored_feature_bytes: (stored_features * FEATURE_BYTES) as u64,
            file_bytes: encode(self, false).len() as u64,
            mean_features_per_entry: if self.entries.is_empty() {
                0.0
            } else {
                stored_features as f64 / self.entries.len() as f64
            },
        }
    }
}

#[cfg(test)]
mod tests;
