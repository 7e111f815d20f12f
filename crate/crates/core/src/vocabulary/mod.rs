//! Hierarchical vocabulary tree over binary descriptors.
//!
//! Nodes are stored breadth-first; node 0 is the centerless root and the
//! children of every node are contiguous. Leaves are words, numbered in
//! breadth-first order.

mod bow;
mod io;
mod train;

use thiserror::Error;

use crate::features::{hamming, BinaryDescriptor};

pub use bow::{term_frequencies, transform, BagOfWords, DirectEntries};
pub use io::{decode, encode, load, save};
pub use train::{train, train_from_features};

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("no training descriptors")]
    Empty,
    #[error("invalid tree parameters: branching {k} (>= 2), levels {levels} (>= 1)")]
    BadParams { k: usize, levels: usize },
    #[error("direct-index level {level} exceeds tree depth {levels}")]
    BadLevel { level: usize, levels: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt vocabulary file: {0}")]
    Corrupt(&'static str),
    #[error("unsupported vocabulary version {0}")]
    Version(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Node {
    pub center: BinaryDescriptor,
    pub parent: u32,
    pub first_child: u32,
    pub child_count: u32,
    pub depth: u32,
    pub word: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Word {
    pub node: u32,
    pub idf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VocabularyTree {
    k: usize,
    levels: usize,
    nodes: Vec<Node>,
    words: Vec<Word>,
}

impl VocabularyTree {
    /// Assembles a tree from breadth-first `(center, child_count)` records
    /// and per-word idf weights.
    pub(crate) fn from_bfs(
        k: usize,
        levels: usize,
        records: Vec<(BinaryDescriptor, u32)>,
        idf: Vec<f64>,
    ) -> Result<Self, VocabError> {
        if records.is_empty() {
            return Err(VocabError::Corrupt("no nodes"));
        }
        let mut nodes: Vec<Node> = records
            .iter()
            .map(|&(center, child_count)| Node {
                center,
                parent: 0,
                first_child: 0,
                child_count,
                depth: 0,
                word: None,
            })
            .collect();
        let mut next = 1u64;
        let mut words = Vec::new();
        for id in 0..nodes.len() {
            let count = nodes[id].child_count as u64;
            if next + count > nodes.len() as u64 {
                return Err(VocabError::Corrupt("child counts exceed node count"));
            }
            nodes[id].first_child = next as u32;
            for c in next..next + count {
                nodes[c as usize].parent = id as u32;
                nodes[c as usize].depth = nodes[id].depth + 1;
            }
            next += count;
            if count == 0 {
                if id == 0 && nodes.len() > 1 {
                    return Err(VocabError::Corrupt("childless root"));
                }
                nodes[id].word = Some(words.len() as u32);
                words.push(Word { node: id as u32, idf: 0.0 });
            }
        }
        if next != nodes.len() as u64 {
            return Err(VocabError::Corrupt("unreachable nodes"));
        }
        if nodes.iter().any(|n| n.depth as usize > levels || n.child_count as usize > k) {
            return Err(VocabError::Corrupt("node exceeds tree shape"));
        }
        if idf.len() != words.len() {
            return Err(VocabError::Corrupt("idf table length"));
        }
        for (w, v) in words.iter_mut().zip(idf) {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(VocabError::Corrupt("negative idf"));
            }
            w.idf = v;
        }
        Ok(Self {
            k,
            levels,
            nodes,
            words,
        })
    }

    pub fn branching(&self) -> usize {
        self.k
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word_center(&self, word: u32) -> BinaryDescriptor {
        self.nodes[self.words[word as usize].node as usize].center
    }

    pub fn idf(&self, word: u32) -> f64 {
        self.words[word as usize].idf
    }

    pub(crate) fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub(crate) fn set_idf(&mut self, idf: &[f64]) {
        for (w, &v) in self.words.iter_mut().zip(idf) {
            w.idf = v;
        }
    }

    /// Greedy descent: at each level the child with the smallest Hamming
    /// distance wins, ties to the lower child index. Returns the word and
    /// the node `level` levels above the tree bottom on the descent path
    /// (the node at depth `levels - level`, or the leaf when it is shallower).
    pub fn quantize(&self, descriptor: &BinaryDescriptor, level: usize) -> (u32, u32) {
        let target_depth = self.levels.saturating_sub(level) as u32;
        let mut id = 0usize;
        let mut direct = 0u32;
        loop {
            let node = &self.nodes[id];
            if node.depth <= target_depth {
                direct = id as u32;
            }
            if node.child_count == 0 {
                return (node.word.expect("leaf has a word"), direct);
            }
            let first = node.first_child as usize;
            let mut best = first;
            let mut best_d = u32::MAX;
            for c in first..first + node.child_count as usize {
                let d = hamming(descriptor, &self.nodes[c].center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            id = best;
        }
    }

    pub fn word_of(&self, descriptor: &BinaryDescriptor) -> u32 {
        self.quantize(descriptor, 0).0
    }

    /// Stable 64-bit fingerprint of the serialized tree.
    pub fn fingerprint(&self) -> u64 {
        crate::seed::hash64(&encode(self))
    }

    /// Word-count histogram of idf weights over `bins` equal-width bins
    /// spanning `[0, max idf]`.
    pub fn idf_histogram(&self, bins: usize) -> Vec<(f64, f64, usize)> {
        let bins = bins.max(1);
        let max = self.words.iter().map(|w| w.idf).fold(0.0, f64::max);
        let width = if max > 0.0 { max / bins as f64 } else { 1.0 };
        let mut counts = vec![0usize; bins];
        for w in &self.words {
            let b = ((w.idf / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i as f64 * width, (i + 1) as f64 * width, c))
            .collect()
    }
}
