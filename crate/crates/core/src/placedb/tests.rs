use super::*;
use crate::features::{BinaryDescriptor, Keypoint};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const WORDS: usize = 8;

fn center(w: usize) -> BinaryDescriptor {
    // 32-bit blocks: pairwise distance 64, so every center quantizes to itself
    let mut d = BinaryDescriptor::ZERO;
    for b in w * 32..(w + 1) * 32 {
        d.set_bit(b, true);
    }
    d
}

/// Depth-1 tree with one word per center and idf 1 for every word.
fn toy_vocab() -> Arc<VocabularyTree> {
    let mut records = vec![(BinaryDescriptor::ZERO, WORDS as u32)];
    records.extend((0..WORDS).map(|w| (center(w), 0)));
    Arc::new(VocabularyTree::from_bfs(WORDS, 1, records, vec![1.0; WORDS]).unwrap())
}

fn feature(i: usize, d: BinaryDescriptor) -> Feature {
    Feature {
        keypoint: Keypoint {
            x: i as f32,
            y: (i * 7 % 13) as f32,
            score: 1.0,
            angle: 0.0,
        },
        descriptor: d,
    }
}

/// Representation with `counts[w]` copies of word `w`.
fn rep(counts: &[usize]) -> ClassifiedRepresentation {
    let mut fs = Vec::new();
    for (w, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            fs.push(feature(fs.len(), center(w)));
        }
    }
    ClassifiedRepresentation::unfiltered(fs)
}

fn toy_db() -> PlaceDatabase {
    let mut db = PlaceDatabase::new(toy_vocab(), DbConfig::default()).unwrap();
    db.add_place(&rep(&[2, 1, 0, 0, 0, 0, 0, 0]), "a", 0.0).unwrap();
    db.add_place(&rep(&[0, 1, 3, 0, 0, 0, 0, 0]), "b", 0.1).unwrap();
    db.add_place(&rep(&[0, 0, 0, 4, 1, 0, 0, 0]), "c", 0.2).unwrap();
    db
}

fn ranked(o: QueryOutcome) -> QueryResult {
    match o {
        QueryOutcome::Ranked(r) => r,
        QueryOutcome::Skipped { .. } => panic!("unexpected skip"),
    }
}

/// Brute-force ranking over every entry sharing a word with the query.
fn exhaustive_ranking(db: &PlaceDatabase, query: &ClassifiedRepresentation) -> Vec<(u32, f64)> {
    let (bag, _) = transform(db.vocabulary(), &query.static_features, 0).unwrap();
    let mut all: Vec<(u32, f64)> = db
        .entries()
        .iter()
        .filter(|e| e.bag.entries().iter().any(|&(w, _)| bag.weight(w).is_some()))
        .map(|e| (e.place_id, l1_score(&bag, &e.bag).unwrap()))
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    all
}

#[test]
fn toy_ranking_matches_exhaustive_scoring() {
    let db = toy_db();
    for counts in [[1, 1, 1, 0, 0, 0, 0, 0], [0, 0, 1, 1, 0, 0, 0, 0], [3, 0, 0, 0, 1, 0, 0, 0]] {
        let q = rep(&counts);
        let got = ranked(db.query(&q, &QueryOptions::default()).unwrap());
        let want = exhaustive_ranking(&db, &q);
        let got: Vec<(u32, f64)> = got.candidates.iter().map(|c| (c.place_id, c.score)).collect();
        assert_eq!(got, want);
    }
    // [1,1,1] vs a = {w0: 2/3, w1: 1/3}: 1 - (|1/3-2/3| + 0 + 1/3)/2 = 2/3
    let r = ranked(db.query(&rep(&[1, 1, 1, 0, 0, 0, 0, 0]), &QueryOptions::default()).unwrap());
    let a = r.candidates.iter().find(|c| c.place_id == 0).unwrap();
    assert!((a.score - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn identical_query_ranks_first_with_score_one() {
    let db = toy_db();
    let r = ranked(db.query(&rep(&[0, 1, 3, 0, 0, 0, 0, 0]), &QueryOptions::default()).unwrap());
    assert_eq!(r.candidates[0].place_id, 1);
    assert_eq!(r.candidates[0].score, 1.0);
    assert_eq!(r.best_match().unwrap().place_id, 1);
}

#[test]
fn no_shared_words_gives_empty_result() {
    let db = toy_db();
    let r = ranked(db.query(&rep(&[0, 0, 0, 0, 0, 2, 2, 2]), &QueryOptions::default()).unwrap());
    assert!(r.candidates.is_empty());
    let empty = PlaceDatabase::new(toy_vocab(), DbConfig::default()).unwrap();
    assert!(ranked(empty.query(&rep(&[1]), &QueryOptions::default()).unwrap()).candidates.is_empty());
}

#[test]
fn max_results_truncates() {
    let db = toy_db();
    let opts = QueryOptions {
        max_results: 1,
        ..Default::default()
    };
    let r = ranked(db.query(&rep(&[1, 1, 1, 1, 0, 0, 0, 0]), &opts).unwrap());
    assert_eq!(r.candidates.len(), 1);
}

#[test]
fn inverted_lists_are_sorted_and_sound() {
    let db = toy_db();
    for w in 0..WORDS as u32 {
        let list = db.inverted_list(w);
        assert!(list.windows(2).all(|p| p[0].0 < p[1].0));
        for e in db.entries() {
            let present = list.iter().any(|p| p.0 == e.place_id);
            assert_eq!(present, e.bag.weight(w).is_some());
        }
    }
}

#[test]
fn store_gating() {
    let gated = DbConfig {
        gate_store: true,
        ..Default::default()
    };
    let mut db = PlaceDatabase::new(toy_vocab(), gated).unwrap();
    let mut all_dynamic = rep(&[5, 5, 5, 5, 5, 0, 0, 0]);
    all_dynamic.dynamic_features = std::mem::take(&mut all_dynamic.static_features);
    assert_eq!(
        db.add_place(&all_dynamic, "x", 1.0).unwrap(),
        AddOutcome::Rejected { static_count: 0 }
    );
    assert!(db.is_empty());
    assert_eq!(db.rejected(), 1);

    let mut mixed = rep(&[100, 100, 100, 100, 100, 0, 0, 0]);
    mixed.dynamic_features = rep(&[0, 0, 0, 0, 0, 50, 50, 0]).static_features;
    assert_eq!(db.add_place(&mixed, "y", 0.3).unwrap(), AddOutcome::Stored(0));
    assert_eq!(db.entries()[0].features.len(), 500);
    assert!(db.entries()[0].bag.entries().iter().all(|&(w, _)| w < 5));

    let mut open = PlaceDatabase::new(toy_vocab(), DbConfig::default()).unwrap();
    assert_eq!(open.add_place(&all_dynamic, "x", 1.0).unwrap(), AddOutcome::Stored(0));
}

#[test]
fn duplicate_frame_rejected() {
    let mut db = toy_db();
    assert!(matches!(
        db.add_place(&rep(&[1]), "a", 0.0),
        Err(DbError::DuplicateFrame(f)) if f == "a"
    ));
}

#[test]
fn skipped_queries_do_not_touch_the_index() {
    let db = toy_db();
    let opts = QueryOptions {
        gate: true,
        ..Default::default()
    };
    let small = rep(&[3, 3, 0, 0, 0, 0, 0, 0]);
    assert_eq!(db.query(&small, &opts).unwrap(), QueryOutcome::Skipped { static_count: 6 });
    assert_eq!(db.index_lookups(), 0);
    db.query(&rep(&[10, 11, 0, 0, 0, 0, 0, 0]), &opts).unwrap();
    assert_eq!(db.index_lookups(), 1);
}

#[test]
fn round_trip_preserves_query_results() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    let mut db = PlaceDatabase::new(toy_vocab(), DbConfig::default()).unwrap();
    for i in 0..30 {
        let counts: Vec<usize> = (0..WORDS).map(|_| rng.random_range(0..4)).collect();
        db.add_place(&rep(&counts), &format!("f{i}"), i as f64 / 30.0).unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("db.bin");
    let bytes = save(&db, &path).unwrap();
    assert_eq!(bytes, db.stats().file_bytes);
    let back = load(&path, toy_vocab()).unwrap();
    assert_eq!(back.entries(), db.entries());
    for _ in 0..100 {
        let counts: Vec<usize> = (0..WORDS).map(|_| rng.random_range(0..4)).collect();
        let q = rep(&counts);
        let opts = QueryOptions::default();
        assert_eq!(back.query(&q, &opts).unwrap(), db.query(&q, &opts).unwrap());
    }
    // stored inverted index variant decodes to the same database
    let with_index = decode(&encode(&db, true), toy_vocab()).unwrap();
    assert_eq!(with_index.entries(), db.entries());
}

#[test]
fn empty_round_trip_and_errors() {
    let db = PlaceDatabase::new(toy_vocab(), DbConfig::default()).unwrap();
    let bytes = encode(&db, false);
    assert!(decode(&bytes, toy_vocab()).unwrap().is_empty());
    assert!(matches!(decode(&bytes[..bytes.len() - 1], toy_vocab()), Err(DbError::Corrupt(_))));
    let mut v = bytes.clone();
    v[8] = 7;
    assert!(matches!(decode(&v, toy_vocab()), Err(DbError::Version(7))));

    let mut records = vec![(BinaryDescriptor::ZERO, 2)];
    records.extend([(center(0), 0), (center(1), 0)]);
    let other = Arc::new(VocabularyTree::from_bfs(2, 1, records, vec![1.0, 1.0]).unwrap());
    assert!(matches!(decode(&bytes, other), Err(DbError::VocabMismatch { .. })));
}

#[test]
fn stats_report_stored_features() {
    let db = toy_db();
    let s = db.stats();
    assert_eq!(s.entries, 3);
    assert_eq!(s.stored_features, 3 + 4 + 5);
    assert_eq!(s.stored_feature_bytes, 12 * 48);
    assert_eq!(s.words, 5);
    assert!((s.mean_features_per_entry - 4.0).abs() < 1e-12);
}

#[test]
fn same_frame_passes_geometric_verification() {
    let img = crate::features::tests::textured(240, 200, 8);
    let features = crate::features::extract(&img, 400).unwrap();
    let others: Vec<Vec<Feature>> = (0..3)
        .map(|s| crate::features::extract(&crate::features::tests::textured(240, 200, 100 + s), 400).unwrap())
        .collect();
    let mut training = vec![features.clone()];
    training.extend(others);
    let vocab = Arc::new(crate::vocabulary::train_from_features(&training, 4, 3, 2).unwrap());
    let mut db = PlaceDatabase::new(vocab, DbConfig::default()).unwrap();
    let rep = ClassifiedRepresentation::unfiltered(features);
    db.add_place(&rep, "self", 0.0).unwrap();
    for geom in [GeomMode::Exhaustive, GeomMode::Level(0), GeomMode::Level(1)] {
        let opts = QueryOptions {
            geom,
            ..Default::default()
        };
        let r = ranked(db.query(&rep, &opts).unwrap());
        let g = r.candidates[0].geometry.unwrap();
        assert!(g.passed, "{geom}: {g:?}");
    }
    let r = ranked(db.query(&rep, &QueryOptions::default()).unwrap());
    assert!(r.candidates[0].geometry.is_none());
}

proptest! {
    #[test]
    fn store_gating_never_stores_more(stream in prop::collection::vec(prop::collection::vec(0usize..6, WORDS), 1..25)) {
        let mut on = PlaceDatabase::new(toy_vocab(), DbConfig { gate_store: true, ..Default::default() }).unwrap();
        let mut off = PlaceDatabase::new(toy_vocab(), DbConfig::default()).unwrap();
        for (i, counts) in stream.iter().enumerate() {
            let r = rep(counts);
            on.add_place(&r, &i.to_string(), 0.0).unwrap();
            off.add_place(&r, &i.to_string(), 0.0).unwrap();
        }
        prop_assert_eq!(on.len() as u64 + on.rejected(), stream.len() as u64);
        prop_assert!(on.len() <= off.len());
        prop_assert_eq!(off.len(), stream.len());
    }
}
