use std::collections::BTreeMap;

use super::{VocabError, VocabularyTree};
use crate::features::Feature;

/// Sparse weighted word vector, sorted by word id, with its L1 norm.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BagOfWords {
    entries: Vec<(u32, f64)>,
    norm: f64,
}

impl BagOfWords {
    /// Builds a bag from `(word, weight)` pairs; non-positive weights are
    /// dropped and repeated words accumulate.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut map: BTreeMap<u32, f64> = BTreeMap::new();
        for (w, v) in pairs {
            *map.entry(w).or_default() += v;
        }
        let entries: Vec<(u32, f64)> = map.into_iter().filter(|&(_, v)| v > 0.0).collect();
        let norm = entries.iter().map(|e| e.1).sum();
        Self { entries, norm }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn l1_norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight(&self, word: u32) -> Option<f64> {
        self.entries
            .binary_search_by_key(&word, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }
}

/// Feature indexes of one place grouped by their direct-index node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectEntries {
    pub level: usize,
    pub nodes: BTreeMap<u32, Vec<u32>>,
}

impl DirectEntries {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn features_in(&self, node: u32) -> &[u32] {
        self.nodes.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Occurrence share of each word; sums to 1 for non-empty input.
pub fn term_frequencies(tree: &VocabularyTree, features: &[Feature]) -> BTreeMap<u32, f64> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for f in features {
        *counts.entry(tree.word_of(&f.descriptor)).or_default() += 1;
    }
    let total = features.len() as f64;
    counts.into_iter().map(|(w, c)| (w, c as f64 / total)).collect()
}

/// Bag of `tf x idf` weights plus the direct index at `level` (counted up
/// from the tree bottom; `level == levels` groups everything at the root).
/// Zero-weight words are left out of the bag but kept in the direct index.
pub fn transform(
    tree: &VocabularyTree,
    features: &[Feature],
    level: usize,
) -> Result<(BagOfWords, DirectEntries), VocabError> {
    if level > tree.levels() {
        return Err(VocabError::BadLevel {
            level,
            levels: tree.levels(),
        });
    }
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    let mut direct = DirectEntries {
        level,
        nodes: BTreeMap::new(),
    };
    for (i, f) in features.iter().enumerate() {
        let (word, node) = tree.quantize(&f.descriptor, level);
        *counts.entry(word).or_default() += 1;
        direct.nodes.entry(node).or_default().push(i as u32);
    }
    let total = features.len() as f64;
    let bag = BagOfWords::from_pairs(
        counts
            .into_iter()
            .map(|(w, c)| (w, c as f64 / total * tree.idf(w))),
    );
    Ok((bag, direct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{BinaryDescriptor, Keypoint};
    use proptest::prelude::*;

    fn feat(d: BinaryDescriptor) -> Feature {
        Feature {
            keypoint: Keypoint {
                x: 0.0,
                y: 0.0,
                score: 0.0,
                angle: 0.0,
            },
            descriptor: d,
        }
    }

    fn corners() -> [BinaryDescriptor; 4] {
        [
            BinaryDescriptor::from_words([0, 0, 0, 0]),
            BinaryDescriptor::from_words([u64::MAX, 0, 0, 0]),
            BinaryDescriptor::from_words([0, u64::MAX, 0, u64::MAX]),
            BinaryDescriptor::from_words([u64::MAX; 4]),
        ]
    }

    /// Four-word depth-1 toy tree with hand-set idf.
    fn toy() -> VocabularyTree {
        let mut records = vec![(BinaryDescriptor::ZERO, 4)];
        records.extend(corners().iter().map(|&c| (c, 0)));
        VocabularyTree::from_bfs(4, 1, records, vec![0.5, 1.0, 2.0, 0.0]).unwrap()
    }

    #[test]
    fn empty_features_give_empty_outputs() {
        let (bag, direct) = transform(&toy(), &[], 0).unwrap();
        assert!(bag.is_empty());
        assert!(direct.is_empty());
    }

    #[test]
    fn single_word_bag() {
        let f = vec![feat(corners()[1]); 7];
        let (bag, _) = transform(&toy(), &f, 0).unwrap();
        assert_eq!(bag.entries(), &[(1, 1.0)]);
        assert_eq!(bag.l1_norm(), 1.0);
    }

    #[test]
    fn toy_tf_idf_matches_hand_computation() {
        let c = corners();
        // counts: w0 x3, w1 x1, w2 x2, w3 x2 over 8 features
        let f: Vec<Feature> = [0, 0, 0, 1, 2, 2, 3, 3].iter().map(|&i| feat(c[i])).collect();
        let (bag, direct) = transform(&toy(), &f, 0).unwrap();
        let expected = [(0u32, 3.0 / 8.0 * 0.5), (1, 1.0 / 8.0 * 1.0), (2, 2.0 / 8.0 * 2.0)];
        assert_eq!(bag.len(), 3, "zero-idf word 3 omitted");
        for (w, v) in expected {
            assert!((bag.weight(w).unwrap() - v).abs() < 1e-15);
        }
        assert!((bag.l1_norm() - expected.iter().map(|e| e.1).sum::<f64>()).abs() < 1e-15);
        // word 3 still present in the direct index
        assert_eq!(direct.nodes.values().map(Vec::len).sum::<usize>(), 8);
        assert_eq!(direct.features_in(4), &[6, 7]);
        let tf = term_frequencies(&toy(), &f);
        assert!((tf.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn level_out_of_range() {
        assert!(matches!(transform(&toy(), &[], 2), Err(VocabError::BadLevel { .. })));
    }

    proptest! {
        #[test]
        fn transform_is_permutation_invariant(
            idx in prop::collection::vec(0usize..4, 1..30),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let c = corners();
            let f: Vec<Feature> = idx.iter().map(|&i| feat(c[i])).collect();
            let mut g = f.clone();
            g.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let (a, _) = transform(&toy(), &f, 0).unwrap();
            let (b, _) = transform(&toy(), &g, 0).unwrap();
            prop_assert_eq!(a.entries().len(), b.entries().len());
            for (x, y) in a.entries().iter().zip(b.entries()) {
                prop_assert_eq!(x.0, y.0);
                prop_assert!((x.1 - y.1).abs() < 1e-15);
            }
            let tf = term_frequencies(&toy(), &f);
            prop_assert!((tf.values().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
