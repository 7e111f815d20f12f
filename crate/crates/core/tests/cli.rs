use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dynplace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynplace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = dynplace(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small generated sequence plus a vocabulary trained on its training images.
struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
    vocab: PathBuf,
}

impl Fixture {
    fn new(coverage: (&str, &str)) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        let seq = root.join("seq");
        ok(&[
            "generate", "--out", s(&seq), "--places", "6", "--visits", "2", "--coverage", coverage.0, coverage.1,
            "--training-images", "6", "--seed", "3",
        ]);
        let vocab = root.join("vocab.bin");
        ok(&[
            "vocab", "train", "--images", s(&seq.join("training")), "-k", "6", "-L", "3", "--keypoints", "300",
            "--out", s(&vocab),
        ]);
        Self { _dir: dir, root, vocab }
    }

    fn seq(&self, name: &str) -> PathBuf {
        self.root.join("seq").join(name)
    }
}

#[test]
fn vocab_train_is_bounded_and_deterministic() {
    let f = Fixture::new(("0.1", "0.3"));
    let small = |name: &str| {
        let out = f.root.join(name);
        ok(&[
            "vocab", "train", "--images", s(&f.seq("training")), "-k", "3", "-L", "3", "--keypoints", "200",
            "--out", s(&out),
        ]);
        out
    };
    let (a, b) = (small("a.bin"), small("b.bin"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let info = ok(&["vocab", "info", "--vocab", s(&a)]);
    let words: usize = info
        .lines()
        .find_map(|l| l.strip_prefix("words\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((1..=27).contains(&words), "{words}");
}

#[test]
fn vocab_train_on_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = dynplace(&["vocab", "train", "--images", s(&empty), "--out", s(&dir.path().join("v.bin"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no PGM/PPM images"));
}

fn build(f: &Fixture, extra: &[&str]) -> (PathBuf, String) {
    let db = f.root.join(format!("db{}.bin", extra.len()));
    let (frames, detections) = (f.seq("frames"), f.seq("detections.txt"));
    let mut args = vec![
        "db", "build", "--frames", s(&frames), "--detections", s(&detections), "--vocab", s(&f.vocab),
        "--keypoints", "300", "--out", s(&db),
    ];
    args.extend_from_slice(extra);
    ok(&args);
    let mut log = db.clone().into_os_string();
    log.push(".log");
    (db, fs::read_to_string(log).unwrap())
}

fn summary_field(log: &str, key: &str) -> usize {
    let last = log.lines().last().unwrap();
    last.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn db_build_logs_rejections_and_conserves_frames() {
    let f = Fixture::new(("0.3", "0.6"));
    let (_, log) = build(&f, &["--gate-store", "--place-threshold", "200"]);
    let frames = summary_field(&log, "frames");
    let stored = summary_field(&log, "stored");
    let rejected = summary_field(&log, "rejected");
    assert_eq!(frames, 12);
    assert_eq!(stored + rejected, frames);
    assert_eq!(log.lines().filter(|l| l.starts_with("rejected\t")).count(), rejected);
    assert_eq!(log.lines().filter(|l| l.starts_with("stored\t")).count(), stored);

    let (_, ungated) = build(&f, &["--place-threshold", "200"]);
    assert_eq!(summary_field(&ungated, "stored"), frames);
    assert!(stored <= frames);
}

#[test]
fn querying_a_stored_frame_ranks_itself_first() {
    let f = Fixture::new(("0.1", "0.3"));
    let (db, _) = build(&f, &[]);
    let frame = f.seq("frames/p0002_v00.pgm");
    let out = ok(&[
        "query", "--image", s(&frame), "--detections", s(&f.seq("detections.txt")), "--db", s(&db), "--vocab",
        s(&f.vocab), "--keypoints", "300",
    ]);
    let first: Vec<&str> = out.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(first[2], "p0002_v00");
    assert_eq!(first[3], "1.000000");

    let one = ok(&[
        "query", "--image", s(&frame), "--detections", s(&f.seq("detections.txt")), "--db", s(&db), "--vocab",
        s(&f.vocab), "--keypoints", "300", "--max-results", "1",
    ]);
    assert_eq!(one.lines().count(), 2);
}

#[test]
fn invalid_query_exits_with_skipped_code() {
    let f = Fixture::new(("0.1", "0.3"));
    let (db, _) = build(&f, &[]);
    let out = dynplace(&[
        "query", "--image", s(&f.seq("frames/p0001_v01.pgm")), "--detections", s(&f.seq("detections.txt")),
        "--db", s(&db), "--vocab", s(&f.vocab), "--keypoints", "300", "--gate-query", "--place-threshold",
        "100000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("skipped"));
}

#[test]
fn evaluate_grid_writes_one_row_per_arm_and_setting() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report");
    ok(&[
        "evaluate", "--out", s(&out), "--places", "5", "--visits", "2", "--training-images", "5", "--vocab-k",
        "6", "--vocab-levels", "2", "--grid-keypoints", "150,250", "--grid-geom", "disabled,exhaustive",
    ]);
    let runs = fs::read_to_string(out.join("runs.tsv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 8);
    for name in ["accuracy.tsv", "accuracy_skips_as_failures.tsv", "storage.tsv", "timing.tsv", "run_config.txt"] {
        assert!(out.join(name).is_file(), "{name}");
    }
}

#[test]
fn evaluate_without_dynamics_reports_no_change() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report");
    ok(&[
        "evaluate", "--out", s(&out), "--places", "6", "--visits", "2", "--coverage", "0", "0",
        "--training-images", "6", "--vocab-k", "6", "--vocab-levels", "2", "--keypoints", "200",
    ]);
    let table = fs::read_to_string(out.join("accuracy.tsv")).unwrap();
    let header: Vec<&str> = table.lines().next().unwrap().split('\t').collect();
    let row: Vec<&str> = table.lines().nth(1).unwrap().split('\t').collect();
    let col = header.iter().position(|h| *h == "all +/-").unwrap();
    assert_eq!(row[col], "0.00");
}
