//! Tab-separated tables and SVG figures for an [`EvalReport`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::experiment::{BucketStats, EvalReport, RunRow, BUCKETS};
use super::EvalError;

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_owned(), |v| format!("{v:.2}"))
}

/// `100 * (filtered - baseline) / baseline`; undefined for a zero baseline.
pub fn percent_change(baseline: Option<f64>, filtered: Option<f64>) -> Option<f64> {
    match (baseline, filtered) {
        (Some(b), Some(f)) if b != 0.0 => Some(100.0 * (f - b) / b),
        _ => None,
    }
}

fn arm(filtered: bool) -> &'static str {
    if filtered {
        "BoBW+DO"
    } else {
        "BoBW"
    }
}

/// Pairs of (unfiltered, filtered) rows in report order.
fn pairs(report: &EvalReport) -> Vec<(&RunRow, &RunRow)> {
    report
        .rows
        .iter()
        .filter(|r| !r.filtered)
        .filter_map(|base| report.row(base.keypoints, base.geom, true).map(|f| (base, f)))
        .collect()
}

/// Per bucket, baseline, filtered and percent change.
pub fn accuracy_table(report: &EvalReport, with_skips: bool) -> String {
    let acc = |b: &BucketStats| if with_skips { b.accuracy_with_skips() } else { b.accuracy() };
    let mut out = String::from("keypoints\tgeom");
    for (label, _) in BUCKETS {
        write!(out, "\t{label} BoBW\t{label} BoBW+DO\t{label} +/-").unwrap();
    }
    out.push('\n');
    for (base, filt) in pairs(report) {
        write!(out, "{}\t{}", base.keypoints, base.geom).unwrap();
        for k in 0..BUCKETS.len() {
            let (a, b) = (acc(&base.buckets[k]), acc(&filt.buckets[k]));
            write!(out, "\t{}\t{}\t{}", fmt_opt(a), fmt_opt(b), fmt_opt(percent_change(a, b))).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn runs_table(report: &EvalReport) -> String {
    let mut out = String::from("keypoints\tgeom\tarm");
    for (label, _) in BUCKETS {
        write!(out, "\t{label} queries\t{label} skipped\t{label} correct").unwrap();
    }
    out.push('\n');
    for r in &report.rows {
        write!(out, "{}\t{}\t{}", r.keypoints, r.geom, arm(r.filtered)).unwrap();
        for b in &r.buckets {
            write!(out, "\t{}\t{}\t{}", b.queries, b.skipped, b.correct).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn storage_table(report: &EvalReport) -> String {
    let mut out = String::from(
        "keypoints\tgeom\tarm\tentries\trejected\tstored_features\tstored_feature_bytes\tdb_bytes\treference_features\treference_features_on_objects\n",
    );
    for r in &report.rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.keypoints,
            r.geom,
            arm(r.filtered),
            r.entries,
            r.rejected,
            r.stored_features,
            r.stored_feature_bytes,
            r.db_bytes,
            r.reference_features,
            r.reference_features_on_objects.map_or("NA".into(), |v| v.to_string()),
        )
        .unwrap();
    }
    out
}

pub fn timing_table(report: &EvalReport) -> String {
    let mut out = String::from("keypoints\tgeom\tarm\tmean_query_ms\n");
    for r in &report.rows {
        writeln!(out, "{}\t{}\t{}\t{:.4}", r.keypoints, r.geom, arm(r.filtered), r.mean_query_ms).unwrap();
    }
    out
}

pub fn settings_text(report: &EvalReport) -> String {
    report.settings.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// One line per configuration for terminal output.
pub fn summary_lines(report: &EvalReport) -> Vec<String> {
    pairs(report)
        .into_iter()
        .map(|(b, f)| {
            let (a0, a1) = (b.buckets[0].accuracy(), f.buckets[0].accuracy());
            format!(
                "keypoints={} geom={} accuracy BoBW={} BoBW+DO={} ({}%) db_bytes {} -> {} query_ms {:.3} -> {:.3}",
                b.keypoints,
                b.geom,
                fmt_opt(a0),
                fmt_opt(a1),
                fmt_opt(percent_change(a0, a1)),
                b.db_bytes,
                f.db_bytes,
                b.mean_query_ms,
                f.mean_query_ms
            )
        })
        .collect()
}

/// Grouped bar chart; `None` values are drawn as missing bars.
pub fn bar_chart(title: &str, y_label: &str, groups: &[String], series: &[(&str, Vec<Option<f64>>)]) -> String {
    const COLORS: [&str; 4] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52"];
    let (w, h) = (720.0, 360.0);
    let (left, right, top, bottom) = (70.0, 20.0, 40.0, 80.0);
    let plot_w = w - left - right;
    let plot_h = h - top - bottom;
    let max = series
        .iter()
        .flat_map(|s| s.1.iter().flatten())
        .fold(0.0f64, |a, &b| a.max(b));
    let max = if max > 0.0 { max * 1.1 } else { 1.0 };
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#).unwrap();
    writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, w / 2.0).unwrap();
    writeln!(
        s,
        r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{y_label}</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    )
    .unwrap();
    for t in 0..=4 {
        let v = max * t as f64 / 4.0;
        let y = top + plot_h - plot_h * t as f64 / 4.0;
        writeln!(s, r##"<line x1="{left}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, left + plot_w).unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.1}</text>"#, left - 5.0, y + 4.0).unwrap();
    }
    let n = groups.len().max(1) as f64;
    let group_w = plot_w / n;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    for (g, label) in groups.iter().enumerate() {
        let gx = left + g as f64 * group_w + group_w * 0.1;
        for (k, (_, values)) in series.iter().enumerate() {
            if let Some(Some(v)) = values.get(g) {
                let bh = plot_h * v / max;
                writeln!(
                    s,
                    r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                    gx + k as f64 * bar_w,
                    top + plot_h - bh,
                    bar_w,
                    bh,
                    COLORS[k % COLORS.len()]
                )
                .unwrap();
            }
        }
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
            gx + group_w * 0.4,
            top + plot_h + 16.0
        )
        .unwrap();
    }
    for (k, (name, _)) in series.iter().enumerate() {
        let x = left + k as f64 * 120.0;
        let y = h - 25.0;
        writeln!(s, r#"<rect x="{x:.1}" y="{:.1}" width="12" height="12" fill="{}"/>"#, y - 10.0, COLORS[k % COLORS.len()]).unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{y:.1}">{name}</text>"#, x + 16.0).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn config_labels(report: &EvalReport) -> Vec<String> {
    pairs(report).iter().map(|(b, _)| format!("{} kp {}", b.keypoints, b.geom)).collect()
}

fn arm_series(report: &EvalReport, value: impl Fn(&RunRow) -> Option<f64>) -> Vec<(&'static str, Vec<Option<f64>>)> {
    let p = pairs(report);
    vec![
        ("BoBW", p.iter().map(|(b, _)| value(b)).collect()),
        ("BoBW+DO", p.iter().map(|(_, f)| value(f)).collect()),
    ]
}

/// Writes the tables and figures into `dir`; returns the written paths.
/// Everything except `timing.*` is a pure function of the report contents.
pub fn emit_report(report: &EvalReport, dir: &Path) -> Result<Vec<PathBuf>, EvalError> {
    fs::create_dir_all(dir)?;
    let mut files: Vec<(String, String)> = vec![
        ("accuracy.tsv".into(), accuracy_table(report, false)),
        ("accuracy_skips_as_failures.tsv".into(), accuracy_table(report, true)),
        ("runs.tsv".into(), runs_table(report)),
        ("storage.tsv".into(), storage_table(report)),
        ("timing.tsv".into(), timing_table(report)),
        ("run_config.txt".into(), settings_text(report)),
    ];
    let labels = config_labels(report);
    for (k, (bucket, _)) in BUCKETS.iter().enumerate() {
        let name = ["all", "gt10", "gt20", "gt30"][k];
        files.push((
            format!("accuracy_{name}.svg"),
            bar_chart(
                &format!("Accuracy, {bucket} dynamic coverage"),
                "accuracy (%)",
                &labels,
                &arm_series(report, |r| r.buckets[k].accuracy()),
            ),
        ));
    }
    files.push((
        "storage.svg".into(),
        bar_chart(
            "Database size",
            "bytes",
            &labels,
            &arm_series(report, |r| Some(r.db_bytes as f64)),
        ),
    ));
    files.push((
        "timing.svg".into(),
        bar_chart(
            "Mean query time",
            "ms",
            &labels,
            &arm_series(report, |r| Some(r.mean_query_ms)),
        ),
    ));
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeomMode;

    fn row(filtered: bool, correct: [usize; 4]) -> RunRow {
        let mut buckets = [BucketStats::default(); 4];
        for (b, c) in buckets.iter_mut().zip(correct) {
            *b = BucketStats {
                queries: 40,
                skipped: 0,
                correct: c,
            };
        }
        RunRow {
            keypoints: 500,
            geom: GeomMode::Disabled,
            filtered,
            buckets,
            entries: 50,
            rejected: 0,
            stored_features: 100,
            stored_feature_bytes: 4800,
            db_bytes: 9000,
            reference_features: 100,
            reference_features_on_objects: Some(20),
            mean_query_ms: 0.5,
        }
    }

    fn report() -> EvalReport {
        EvalReport {
            rows: vec![row(false, [30, 20, 10, 0]), row(true, [36, 30, 10, 4])],
            settings: vec![("seed".into(), "1".into())],
        }
    }

    #[test]
    fn percent_change_column_matches_hand_computation() {
        let t = accuracy_table(&report(), false);
        let line: Vec<&str> = t.lines().nth(1).unwrap().split('\t').collect();
        // all: 75 -> 90 is +20%; >10%: 50 -> 75 is +50%; >30%: 0 baseline is NA
        assert_eq!(&line[2..5], ["75.00", "90.00", "20.00"]);
        assert_eq!(&line[5..8], ["50.00", "75.00", "50.00"]);
        assert_eq!(&line[8..11], ["25.00", "25.00", "0.00"]);
        assert_eq!(&line[11..14], ["0.00", "10.00", "NA"]);
        assert_eq!(percent_change(Some(75.0), Some(90.0)), Some(20.0));
        assert_eq!(percent_change(None, Some(1.0)), None);
    }

    #[test]
    fn skipped_queries_are_reported_both_ways() {
        let b = BucketStats {
            queries: 10,
            skipped: 2,
            correct: 4,
        };
        assert_eq!(b.accuracy(), Some(50.0));
        assert_eq!(b.accuracy_with_skips(), Some(40.0));
        let all_skipped = BucketStats {
            queries: 3,
            skipped: 3,
            correct: 0,
        };
        assert_eq!(all_skipped.accuracy(), None);
        assert_eq!(BucketStats::default().accuracy_with_skips(), None);
    }

    #[test]
    fn one_row_report_writes_deterministic_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&report(), dir.path()).unwrap();
        assert!(files.iter().any(|p| p.ends_with("accuracy.tsv")));
        assert_eq!(accuracy_table(&report(), false).lines().count(), 2);
        let first: Vec<Vec<u8>> = files.iter().map(|p| fs::read(p).unwrap()).collect();
        emit_report(&report(), dir.path()).unwrap();
        for (p, bytes) in files.iter().zip(first) {
            assert_eq!(fs::read(p).unwrap(), bytes);
        }
        let svg = fs::read_to_string(dir.path().join("accuracy_all.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
