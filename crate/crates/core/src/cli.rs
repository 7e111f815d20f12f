//! Command-line interface. `main` only parses arguments and maps the
//! returned status to the process exit code.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::dynfilter::{self, ClassifiedRepresentation, DetectionSet, Detections};
use crate::eval::{self, Dataset, ExperimentConfig, GeneratorConfig};
use crate::features::{self, dump, Feature, SamplingPattern, DEFAULT_FAST_THRESHOLD};
use crate::geometry::GeomMode;
use crate::image::{self, GrayImage};
use crate::placedb::{self, AddOutcome, DbConfig, PlaceDatabase, QueryOptions, QueryOutcome};
use crate::seed::derive_seed;
use crate::vocabulary::{self, VocabularyTree};

pub const EXIT_MATCH: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_MATCH: i32 = 2;
pub const EXIT_SKIPPED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dynplace", version, about = "Bag-of-binary-words place recognition with dynamic object filtering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vocabulary training and inspection.
    #[command(subcommand)]
    Vocab(VocabCommand),
    /// Place database construction and inspection.
    #[command(subcommand)]
    Db(DbCommand),
    /// Query a database with one image. Exit code 0 match, 2 no match, 3 skipped (invalid).
    Query(QueryArgs),
    /// Generate a synthetic benchmark sequence.
    Generate(GenerateArgs),
    /// Run the paired filtered/unfiltered evaluation and write the report.
    Evaluate(EvaluateArgs),
    /// Convert a PPM to an 8-bit grayscale PGM.
    Convert(ConvertArgs),
    /// Extract features from an image and write a text dump.
    Features(FeaturesArgs),
}

#[derive(Debug, Subcommand)]
pub enum VocabCommand {
    /// Train a vocabulary tree from images or feature dumps.
    Train(VocabTrainArgs),
    /// Print vocabulary shape, fingerprint and idf histogram.
    Info(VocabInfoArgs),
}

#[derive(Debug, Subcommand)]
pub enum DbCommand {
    /// Build a database from frames and detections.
    Build(DbBuildArgs),
    /// Print entry count, word count, file size and mean features per entry.
    Stats(DbStatsArgs),
}

/// Pipeline options shared by every subcommand. Flags override `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// `key = value` file with any of the options below (flag names, `-` or `_`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Target keypoints per image [default: 500]
    #[arg(long)]
    pub keypoints: Option<usize>,
    /// Fraction of a descriptor's extent that must lie in boxes for it to be dynamic [default: 0.25]
    #[arg(long)]
    pub sensitivity: Option<f64>,
    /// heuristic (keypoint/corner rules, sensitivity <= 0.5) or exact (pattern sampling) [default: heuristic]
    #[arg(long)]
    pub filter_mode: Option<String>,
    /// Keep every descriptor (unfiltered baseline) [default: off]
    #[arg(long)]
    pub no_filter: bool,
    /// Minimum detector confidence for a box to count [default: 0.2]
    #[arg(long)]
    pub det_conf: Option<f64>,
    /// Comma-separated dynamic classes [default: bicycle,bus,car,motorcycle,person,truck]
    #[arg(long)]
    pub dynamic_classes: Option<String>,
    /// A representation is valid when it keeps more than this many static features [default: 20]
    #[arg(long)]
    pub place_threshold: Option<usize>,
    /// Do not store invalid representations [default: off]
    #[arg(long)]
    pub gate_store: bool,
    /// Skip matching for invalid query representations [default: off]
    #[arg(long)]
    pub gate_query: bool,
    /// Geometric verification: disabled, level:N or exhaustive [default: disabled]
    #[arg(long)]
    pub geom: Option<String>,
    /// RANSAC iterations [default: 500]
    #[arg(long)]
    pub ransac_iters: Option<usize>,
    /// RANSAC symmetric epipolar distance threshold in pixels [default: 3]
    #[arg(long)]
    pub ransac_thresh: Option<f64>,
    /// Minimum RANSAC inliers for a verified match [default: 12]
    #[arg(long)]
    pub min_inliers: Option<usize>,
    /// Vocabulary file
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Master seed for every random choice [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
}

impl RunArgs {
    /// Defaults, then the config file, then flags; validated.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(path)
                .with_context(|| format!("reading config {}", path.display()))?;
        }
        let mut set = |k: &str, v: Option<String>| -> Result<()> {
            if let Some(v) = v {
                c.set(k, &v)?;
            }
            Ok(())
        };
        set("keypoints", self.keypoints.map(|v| v.to_string()))?;
        set("sensitivity", self.sensitivity.map(|v| v.to_string()))?;
        set("filter_mode", self.filter_mode.clone())?;
        set("det_conf", self.det_conf.map(|v| v.to_string()))?;
        set("dynamic_classes", self.dynamic_classes.clone())?;
        set("place_threshold", self.place_threshold.map(|v| v.to_string()))?;
        set("geom", self.geom.clone())?;
        set("ransac_iters", self.ransac_iters.map(|v| v.to_string()))?;
        set("ransac_thresh", self.ransac_thresh.map(|v| v.to_string()))?;
        set("min_inliers", self.min_inliers.map(|v| v.to_string()))?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        if let Some(v) = &self.vocab {
            c.vocab = Some(v.clone());
        }
        c.no_filter |= self.no_filter;
        c.gate_store |= self.gate_store;
        c.gate_query |= self.gate_query;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct VocabTrainArgs {
    /// Directory of PGM/PPM training images
    #[arg(long, conflicts_with = "features", required_unless_present = "features")]
    pub images: Option<PathBuf>,
    /// Directory of feature dumps (`*.txt`, one per image)
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Branching factor
    #[arg(short = 'k', long, default_value_t = 10)]
    pub branching: usize,
    /// Tree depth
    #[arg(short = 'L', long, default_value_t = 4)]
    pub levels: usize,
    /// Output vocabulary file
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct VocabInfoArgs {
    /// Number of idf histogram bins
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct DbBuildArgs {
    /// Directory of frames; the frame id is the file stem
    #[arg(long)]
    pub frames: PathBuf,
    /// Detections file (`frame_id class confidence cx cy w h` lines)
    #[arg(long)]
    pub detections: Option<PathBuf>,
    /// Proceed without a detections file (no boxes)
    #[arg(long)]
    pub allow_missing_detections: bool,
    /// Output database file
    #[arg(long)]
    pub out: PathBuf,
    /// Build log path [default: <out>.log]
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Direct-index level stored in the database [default: level of --geom, else 0]
    #[arg(long)]
    pub direct_level: Option<usize>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct DbStatsArgs {
    #[arg(long)]
    pub db: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Query image (PGM or PPM)
    #[arg(long)]
    pub image: PathBuf,
    /// Detections file
    #[arg(long)]
    pub detections: Option<PathBuf>,
    /// Proceed without a detections file (no boxes)
    #[arg(long)]
    pub allow_missing_detections: bool,
    /// Frame id of the query in the detections file [default: image file stem]
    #[arg(long)]
    pub frame_id: Option<String>,
    #[arg(long)]
    pub db: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub max_results: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    #[arg(long, default_value_t = 50)]
    pub places: usize,
    #[arg(long, default_value_t = 3)]
    pub visits: usize,
    /// Per-frame dynamic coverage range
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.1, 0.4])]
    pub coverage: Vec<f64>,
    /// Reuse each place's objects on every visit
    #[arg(long)]
    pub static_dynamics: bool,
    #[arg(long, default_value_t = 320)]
    pub width: usize,
    #[arg(long, default_value_t = 240)]
    pub height: usize,
}

impl SequenceArgs {
    fn generator(&self, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            num_places: self.places,
            visits_per_place: self.visits,
            coverage: (self.coverage[0], self.coverage[1]),
            width: self.width,
            height: self.height,
            static_dynamics: self.static_dynamics,
            seed,
            ..GeneratorConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub sequence: SequenceArgs,
    /// Also write this many independent vocabulary training images to <out>/training
    #[arg(long, default_value_t = 0)]
    pub training_images: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Report directory
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub sequence: SequenceArgs,
    /// Evaluate existing frames instead of generating (needs --detections and --ground-truth)
    #[arg(long, requires_all = ["detections", "ground_truth"])]
    pub frames: Option<PathBuf>,
    #[arg(long)]
    pub detections: Option<PathBuf>,
    /// `frame_id place_id` lines
    #[arg(long)]
    pub ground_truth: Option<PathBuf>,
    /// Comma-separated keypoint targets [default: --keypoints]
    #[arg(long)]
    pub grid_keypoints: Option<String>,
    /// Comma-separated geometric modes [default: --geom]
    #[arg(long)]
    pub grid_geom: Option<String>,
    /// Training images generated when no --vocab is given
    #[arg(long, default_value_t = 60)]
    pub training_images: usize,
    #[arg(long, default_value_t = 10)]
    pub vocab_k: usize,
    #[arg(long, default_value_t = 4)]
    pub vocab_levels: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Runs a parsed command, writing human output to `out`. Returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Vocab(VocabCommand::Train(a)) => cmd_train_vocab(&a, out),
        Command::Vocab(VocabCommand::Info(a)) => cmd_vocab_info(&a, out),
        Command::Db(DbCommand::Build(a)) => cmd_build_db(&a, out),
        Command::Db(DbCommand::Stats(a)) => cmd_db_stats(&a, out),
        Command::Query(a) => cmd_query(&a, out),
        Command::Generate(a) => cmd_generate(&a, out),
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::Convert(a) => cmd_convert(&a, out),
        Command::Features(a) => cmd_features(&a, out),
    }
}

fn is_image(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("pgm" | "ppm"))
}

/// Files in `dir` accepted by `keep`, sorted by name.
fn list_files(dir: &Path, keep: impl Fn(&Path) -> bool) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.is_file() && keep(p));
    files.sort();
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn load_image(path: &Path) -> Result<GrayImage> {
    image::load_any(path).with_context(|| format!("loading {}", path.display()))
}

fn extract(image: &GrayImage, config: &RunConfig) -> Result<Vec<Feature>> {
    Ok(features::extract_with(
        image,
        config.keypoints,
        DEFAULT_FAST_THRESHOLD,
        &SamplingPattern::orb(),
    )?)
}

fn load_vocab(config: &RunConfig) -> Result<Arc<VocabularyTree>> {
    let path = config.vocab.as_ref().context("a vocabulary is required (--vocab)")?;
    let tree = vocabulary::load(path).with_context(|| format!("loading vocabulary {}", path.display()))?;
    Ok(Arc::new(tree))
}

fn load_detections(path: Option<&Path>, allow_missing: bool) -> Result<Detections> {
    match path {
        Some(p) => {
            let file = fs::File::open(p).with_context(|| format!("opening detections {}", p.display()))?;
            Ok(Detections::read(BufReader::new(file))?)
        }
        None if allow_missing => Ok(Detections::new()),
        None => bail!("no detections file given; pass --detections or --allow-missing-detections"),
    }
}

fn classify(features: Vec<Feature>, detections: &DetectionSet, config: &RunConfig) -> Result<ClassifiedRepresentation> {
    if config.no_filter {
        return Ok(ClassifiedRepresentation::unfiltered(features));
    }
    Ok(dynfilter::partition(
        &features,
        detections,
        &config.filter_config(),
        &SamplingPattern::orb(),
    )?)
}

pub fn cmd_train_vocab(a: &VocabTrainArgs, out: &mut dyn Write) -> Result<i32> {
    let config = a.run.resolve()?;
    let per_image: Vec<Vec<Feature>> = if let Some(dir) = &a.images {
        let files = list_files(dir, is_image)?;
        if files.is_empty() {
            bail!("no PGM/PPM images in {}", dir.display());
        }
        files
            .iter()
            .map(|p| extract(&load_image(p)?, &config))
            .collect::<Result<_>>()?
    } else {
        let dir = a.features.as_ref().expect("clap enforces one input");
        let files = list_files(dir, |p| p.extension().is_some_and(|e| e == "txt"))?;
        if files.is_empty() {
            bail!("no feature dumps in {}", dir.display());
        }
        files
            .iter()
            .map(|p| {
                let f = fs::File::open(p)?;
                dump::read_features(BufReader::new(f)).with_context(|| format!("reading {}", p.display()))
            })
            .collect::<Result<_>>()?
    };
    let tree = vocabulary::train_from_features(&per_image, a.branching, a.levels, derive_seed(config.seed, "vocab"))?;
    vocabulary::save(&tree, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    writeln!(
        out,
        "trained vocabulary: {} images, {} words, {} nodes, fingerprint {:016x}",
        per_image.len(),
        tree.word_count(),
        tree.node_count(),
        tree.fingerprint()
    )?;
    Ok(EXIT_MATCH)
}

pub fn cmd_vocab_info(a: &VocabInfoArgs, out: &mut dyn Write) -> Result<i32> {
    let config = a.run.resolve()?;
    let tree = load_vocab(&config)?;
    writeln!(out, "branching\t{}", tree.branching())?;
    writeln!(out, "levels\t{}", tree.levels())?;
    writeln!(out, "words\t{}", tree.word_count())?;
    writeln!(out, "nodes\t{}", tree.node_count())?;
    writeln!(out, "fingerprint\t{:016x}", tree.fingerprint())?;
    writeln!(out, "idf_from\tidf_to\twords")?;
    for (lo, hi, n) in tree.idf_histogram(a.bins) {
        writeln!(out, "{lo:.3}\t{hi:.3}\t{n}")?;
    }
    Ok(EXIT_MATCH)
}

pub fn cmd_build_db(a: &DbBuildArgs, out: &mut dyn Write) -> Result<i32> {
    let config = a.run.resolve()?;
    let vocab = load_vocab(&config)?;
    let detections = load_detections(a.detections.as_deref(), a.allow_missing_detections)?;
    let direct_level = a.direct_level.unwrap_or(match config.geom {
        GeomMode::Level(l) => l,
        _ => 0,
    });
    let mut db = PlaceDatabase::new(
        vocab.clone(),
        DbConfig {
            direct_level,
            gate_store: config.gate_store,
            validity: config.validity(),
        },
    )?;
    let frames = list_files(&a.frames, is_image)?;
    let mut log = String::new();
    for path in &frames {
        let id = stem(path);
        let image = load_image(path)?;
        let set = detections.frame(&id);
        let classified = classify(extract(&image, &config)?, &set, &config)?;
        let boxes = set.relevant(&config.filter_config());
        let coverage = dynfilter::dynamic_coverage(&boxes, image.width(), image.height());
        let (sc, dc) = (classified.static_features.len(), classified.dynamic_features.len());
        match db.add_place(&classified, &id, coverage)? {
            AddOutcome::Stored(pid) => log.push_str(&format!("stored\t{id}\tplace={pid}\tsc={sc}\tdc={dc}\n")),
            AddOutcome::Rejected { .. } => log.push_str(&format!("rejected\t{id}\tsc={sc}\tdc={dc}\n")),
        }
    }
    let bytes = placedb::save(&db, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    let summary = format!(
        "frames={} stored={} rejected={} file_bytes={}",
        frames.len(),
        db.len(),
        db.rejected(),
        bytes
    );
    log.push_str(&summary);
    log.push('\n');
    let log_path = a.log.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".log");
        PathBuf::from(p)
    });
    fs::write(&log_path, &log).with_context(|| format!("writing {}", log_path.display()))?;
    writeln!(out, "{summary}")?;
    Ok(EXIT_MATCH)
}

pub fn cmd_db_stats(a: &DbStatsArgs, out: &mut dyn Write) -> Result<i32> {
    let config = a.run.resolve()?;
    let vocab = load_vocab(&config)?;
    let db = placedb::load(&a.db, vocab).with_context(|| format!("loading database {}", a.db.display()))?;
    let s = db.stats();
    writeln!(out, "entries\t{}", s.entries)?;
    writeln!(out, "words\t{}", s.words)?;
    writeln!(out, "file_bytes\t{}", fs::metadata(&a.db)?.len())?;
    writeln!(out, "stored_feature_bytes\t{}", s.stored_feature_bytes)?;
    writeln!(out, "mean_features_per_entry\t{:.2}", s.mean_features_per_entry)?;
    Ok(EXIT_MATCH)
}

pub fn cmd_query(a: &QueryArgs, out: &mut dyn Write) -> Result<i32> {
    let config = a.run.resolve()?;
    let vocab = load_vocab(&config)?;
    let db = placedb::load(&a.db, vocab).with_context(|| format!("loading database {}", a.db.display()))?;
    let detections = load_detections(a.detections.as_deref(), a.allow_missing_detections)?;
    let id = a.frame_id.clone().unwrap_or_else(|| stem(&a.image));
    let image = load_image(&a.image)?;
    let classified = classify(extract(&image, &config)?, &detections.frame(&id), &config)?;
    let options = QueryOptions {
        max_results: a.max_results,
        gate: config.gate_query,
        validity: config.validity(),
        geom: config.geom,
        verify: config.verify_params(),
        shortlist: 10,
    };
    match db.query(&classified, &options)? {
        QueryOutcome::Skipped { static_count } => {
            writeln!(
                out,
                "skipped (invalid): {static_count} static features, need more than {}",
                config.place_threshold
            )?;
            Ok(EXIT_SKIPPED)
        }
        QueryOutcome::Ranked(result) => {
            writeln!(out, "rank\tplace_id\tframe_id\tscore\tgeom\tinliers")?;
            for (rank, c) in result.candidates.iter().enumerate() {
                let (geom, inliers) = match c.geometry {
                    Some(g) => (if g.passed { "pass" } else { "fail" }, g.inliers.to_string()),
                    None => ("-", "-".to_owned()),
                };
                let frame = &db.entries()[c.place_id as usize].frame_id;
                writeln!(out, "{}\t{}\t{frame}\t{:.6}\t{geom}\t{inliers}", rank + 1, c.place_id, c.score)?;
            }
            Ok(if result.best_match().is_some() {
                EXIT_MATCH
            } else {
                EXIT_NO_MATCH
            })
        }
    }
}

pub fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<i32> {
    let config = a.run.resolve()?;
    let gen = a.sequence.generator(config.seed);
    let seq = eval::generate_sequence(&gen)?;
    seq.write(&a.out)?;
    if a.training_images > 0 {
        let dir = a.out.join("training");
        fs::create_dir_all(&dir)?;
        for (i, img) in eval::training_images(&gen, a.training_images).iter().enumerate() {
            image::save_pgm(img, dir.join(format!("train_{i:04}.pgm")))?;
        }
    }
    writeln!(
        out,
        "generated {} frames ({} places x {} visits) in {}",
        seq.frames.len(),
        gen.num_places,
        gen.visits_per_place,
        a.out.display()
    )?;
    Ok(EXIT_MATCH)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|e| anyhow::anyhow!("bad {what} '{x}': {e}")))
        .collect()
}

pub fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> Result<i32> {
    let config = a.run.resolve()?;
    let gen = a.sequence.generator(config.seed);
    let dataset = match &a.frames {
        Some(frames) => {
            let detections = load_detections(a.detections.as_deref(), false)?;
            let gt = eval::read_ground_truth(a.ground_truth.as_deref().expect("clap requires it"))?;
            Dataset::from_files(frames, &detections, &gt)?
        }
        None => Dataset::from_sequence(&eval::generate_sequence(&gen)?),
    };
    let vocab = match &config.vocab {
        Some(_) => load_vocab(&config)?,
        None => {
            let training: Vec<Vec<Feature>> = eval::training_images(&gen, a.training_images)
                .iter()
                .map(|img| extract(img, &config))
                .collect::<Result<_>>()?;
            Arc::new(vocabulary::train_from_features(
                &training,
                a.vocab_k,
                a.vocab_levels,
                derive_seed(config.seed, "vocab"),
            )?)
        }
    };
    let keypoints = match &a.grid_keypoints {
        Some(s) => parse_list(s, "keypoint count")?,
        None => vec![config.keypoints],
    };
    let geom_modes = match &a.grid_geom {
        Some(s) => parse_list(s, "geometric mode")?,
        None => vec![config.geom],
    };
    let experiment = ExperimentConfig {
        keypoints,
        geom_modes,
        filter: config.filter_config(),
        validity: config.validity(),
        gate_store: config.gate_store,
        gate_query: config.gate_query,
        verify: config.verify_params(),
        ..ExperimentConfig::default()
    };
    let mut report = eval::run_experiment(&dataset, vocab, &experiment)?;
    let mut settings: BTreeMap<String, String> = BTreeMap::new();
    settings.insert("seed".into(), config.seed.to_string());
    match &a.frames {
        Some(f) => {
            settings.insert("frames".into(), f.display().to_string());
        }
        None => {
            settings.insert("places".into(), gen.num_places.to_string());
            settings.insert("visits".into(), gen.visits_per_place.to_string());
            settings.insert("coverage".into(), format!("{},{}", gen.coverage.0, gen.coverage.1));
            settings.insert("static_dynamics".into(), gen.static_dynamics.to_string());
            settings.insert("frame_size".into(), format!("{}x{}", gen.width, gen.height));
        }
    }
    if config.vocab.is_none() {
        settings.insert("training_images".into(), a.training_images.to_string());
    }
    report.settings.extend(settings);
    eval::emit_report(&report, &a.out)?;
    for line in eval::summary_lines(&report) {
        writeln!(out, "{line}")?;
    }
    writeln!(out, "report written to {}", a.out.display())?;
    Ok(EXIT_MATCH)
}

pub fn cmd_convert(a: &ConvertArgs, out: &mut dyn Write) -> Result<i32> {
    let img = load_image(&a.input)?;
    image::save_pgm(&img, &a.output).with_context(|| format!("writing {}", a.output.display()))?;
    writeln!(out, "wrote {}x{} PGM to {}", img.width(), img.height(), a.output.display())?;
    Ok(EXIT_MATCH)
}

pub fn cmd_features(a: &FeaturesArgs, out: &mut dyn Write) -> Result<i32> {
    let config = a.run.resolve()?;
    let feats = extract(&load_image(&a.image)?, &config)?;
    let file = fs::File::create(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
    dump::write_features(std::io::BufWriter::new(file), &feats)?;
    writeln!(out, "{} features written to {}", feats.len(), a.out.display())?;
    Ok(EXIT_MATCH)
}
