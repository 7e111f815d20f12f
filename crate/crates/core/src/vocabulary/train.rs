//! Hierarchical k-medians in Hamming space.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{VocabError, VocabularyTree};
use crate::features::{hamming, BinaryDescriptor, Feature};

const MAX_ITERATIONS: usize = 20;

/// Bitwise majority of `members`; ties resolve to 0.
fn majority(data: &[BinaryDescriptor], members: &[u32]) -> BinaryDescriptor {
    let mut counts = [0u32; 256];
    for &m in members {
        let words = data[m as usize].words();
        for (w, &word) in words.iter().enumerate() {
            let slot = &mut counts[w * 64..w * 64 + 64];
            for (b, c) in slot.iter_mut().enumerate() {
                *c += ((word >> b) & 1) as u32;
            }
        }
    }
    let half = members.len() as u32;
    let mut out = [0u64; 4];
    for (b, &c) in counts.iter().enumerate() {
        if 2 * c > half {
            out[b / 64] |= 1 << (b % 64);
        }
    }
    BinaryDescriptor::from_words(out)
}

fn nearest(centers: &[BinaryDescriptor], d: &BinaryDescriptor) -> usize {
    let mut best = 0;
    let mut best_d = u32::MAX;
    for (i, c) in centers.iter().enumerate() {
        let dist = hamming(c, d);
        if dist < best_d {
            best_d = dist;
            best = i;
        }
    }
    best
}

/// k-means++ seeding with squared Hamming distances. Stops early when every
/// remaining member coincides with a chosen center.
fn seed_centers(data: &[BinaryDescriptor], members: &[u32], k: usize, rng: &mut ChaCha8Rng) -> Vec<BinaryDescriptor> {
    let first = data[members[rng.random_range(0..members.len())] as usize];
    let mut centers = vec![first];
    let mut dist: Vec<u64> = members
        .iter()
        .map(|&m| (hamming(&data[m as usize], &first) as u64).pow(2))
        .collect();
    while centers.len() < k {
        let total: u64 = dist.iter().sum();
        if total == 0 {
            break;
        }
        let mut target = rng.random_range(0..total);
        let mut pick = 0;
        for (i, &d) in dist.iter().enumerate() {
            if target < d {
                pick = i;
                break;
            }
            target -= d;
        }
        let c = data[members[pick] as usize];
        centers.push(c);
        for (dv, &m) in dist.iter_mut().zip(members) {
            *dv = (*dv).min((hamming(&data[m as usize], &c) as u64).pow(2));
        }
    }
    centers
}

/// Splits `members` into at most `k` clusters. Returns `(center, members)`.
fn cluster(
    data: &[BinaryDescriptor],
    members: &[u32],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(BinaryDescriptor, Vec<u32>)> {
    let mut distinct: Vec<BinaryDescriptor> = members.iter().map(|&m| data[m as usize]).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() <= k {
        let mut groups = vec![Vec::new(); distinct.len()];
        for &m in members {
            let g = distinct.binary_search(&data[m as usize]).unwrap();
            groups[g].push(m);
        }
        return distinct.into_iter().zip(groups).collect();
    }

    let mut centers = seed_centers(data, members, k, rng);
    let mut assignment: Vec<usize> = vec![usize::MAX; members.len()];
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (a, &m) in assignment.iter_mut().zip(members) {
            let c = nearest(&centers, &data[m as usize]);
            if *a != c {
                *a = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut groups = vec![Vec::new(); centers.len()];
        for (&a, &m) in assignment.iter().zip(members) {
            groups[a].push(m);
        }
        // drop empty clusters, keeping the index order of the rest
        let mut kept = Vec::with_capacity(centers.len());
        let mut remap = vec![usize::MAX; centers.len()];
        for (i, g) in groups.iter().enumerate() {
            if !g.is_empty() {
                remap[i] = kept.len();
                kept.push(majority(data, g));
            }
        }
        for a in assignment.iter_mut() {
            *a = remap[*a];
        }
        centers = kept;
    }
    let mut groups = vec![Vec::new(); centers.len()];
    for (&a, &m) in assignment.iter().zip(members) {
        groups[a].push(m);
    }
    centers
        .into_iter()
        .zip(groups)
        .filter(|(_, g)| !g.is_empty())
        .collect()
}

/// Trains a tree with branching `k` and depth `levels` from descriptors
/// grouped by training image. Leaf idf is `ln(N / n_i)` with `N` images and
/// `n_i` images containing word `i` (words never hit use `n_i = 1`).
pub fn train(
    groups: &[Vec<BinaryDescriptor>],
    k: usize,
    levels: usize,
    seed: u64,
) -> Result<VocabularyTree, VocabError> {
    if k < 2 || levels < 1 {
        return Err(VocabError::BadParams { k, levels });
    }
    let data: Vec<BinaryDescriptor> = groups.iter().flatten().copied().collect();
    if data.is_empty() {
        return Err(VocabError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // breadth-first construction keeps children contiguous
    let mut records: Vec<(BinaryDescriptor, u32)> = vec![(BinaryDescriptor::ZERO, 0)];
    let mut queue: VecDeque<(usize, Vec<u32>, usize)> = VecDeque::new();
    queue.push_back((0, (0..data.len() as u32).collect(), 0));
    while let Some((node, members, depth)) = queue.pop_front() {
        let clusters = cluster(&data, &members, k, &mut rng);
        records[node].1 = clusters.len() as u32;
        for (center, group) in clusters {
            let id = records.len();
            records.push((center, 0));
            let degenerate = group.iter().all(|&m| data[m as usize] == data[group[0] as usize]);
            if depth + 1 < levels && group.len() > k && !degenerate {
                queue.push_back((id, group, depth + 1));
            }
        }
    }

    let word_count = records.iter().skip(1).filter(|r| r.1 == 0).count();
    let mut tree = VocabularyTree::from_bfs(k, levels, records, vec![0.0; word_count])?;

    let n_images = groups.iter().filter(|g| !g.is_empty()).count().max(1) as f64;
    let mut doc_freq = vec![0usize; word_count];
    let mut seen = vec![usize::MAX; word_count];
    for (img, group) in groups.iter().enumerate() {
        for d in group {
            let w = tree.word_of(d) as usize;
            if seen[w] != img {
                seen[w] = img;
                doc_freq[w] += 1;
            }
        }
    }
    let idf: Vec<f64> = doc_freq
        .iter()
        .map(|&n| (n_images / n.max(1) as f64).ln().max(0.0))
        .collect();
    tree.set_idf(&idf);
    Ok(tree)
}

/// Convenience wrapper taking one feature list per training image.
pub fn train_from_features(
    images: &[Vec<Feature>],
    k: usize,
    levels: usize,
    seed: u64,
) -> Result<VocabularyTree, VocabError> {
    let groups: Vec<Vec<BinaryDescriptor>> = images
        .iter()
        .map(|fs| fs.iter().map(|f| f.descriptor).collect())
        .collect();
    train(&groups, k, levels, seed)
}
