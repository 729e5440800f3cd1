//! Batch front end: extract features, run leave-one-out experiments, train
//! and apply saved models, sweep the spread, generate synthetic corpora.
//!
//! Exit codes: 0 ok, 2 unreadable or malformed input, 3 missing data or
//! configuration, 4 model mismatch, 64 usage.

use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eeg_pnn::eval::{
    build_experiment, dataset_from_feature_rows, loo_cv, spread_sweep, sweep_csv_string,
    sweep_plot_data, Dataset, ExperimentDef, LooOptions,
};
use eeg_pnn::features::{feature_csv_string, read_feature_csv, FeatureRow};
use eeg_pnn::pnn::{PnnModel, SegmentShape, DEFAULT_SPREAD};
use eeg_pnn::signal_io::{
    default_manifest, load_bonn_corpus, load_bonn_dir, load_bonn_file, write_bonn_file, Corpus,
    Segment, SynthManifest, BONN_SAMPLE_RATE_HZ, BONN_SEGMENT_LEN,
};
use eeg_pnn::{Error, NormMethod, PipelineConfig, SetTag};

const EXIT_PARSE: u8 = 2;
const EXIT_MISSING: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "eeg-pnn", version, about = "EEG features + probabilistic neural network")]
struct Cli {
    /// Worker threads; 1 runs folds sequentially and records fold timings.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the 38 features of every segment of one set into a CSV.
    Extract(ExtractArgs),
    /// Leave-one-out cross-validation of one experiment; writes a JSON report.
    Cv(CvArgs),
    /// Train on every segment of an experiment and save the model.
    Train(TrainArgs),
    /// Classify one segment file with a saved model.
    Classify(ClassifyArgs),
    /// Leave-one-out accuracy over a list of spreads.
    Sweep(SweepArgs),
    /// Write the default synthetic manifest, or realize a manifest as
    /// Bonn-format files.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct PipelineArgs {
    /// Apply the 40 Hz low-pass before extraction.
    #[arg(long, value_enum, default_value = "on")]
    lowpass: Switch,
    /// Largest Higuchi interval.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(2..=64))]
    k_max: u32,
}

impl PipelineArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            lowpass: matches!(self.lowpass, Switch::On),
            k_max: self.k_max as usize,
        }
    }
}

#[derive(Args)]
struct ExtractArgs {
    /// Set tag (A-E or Z/O/N/F/S); written to the `label` column.
    #[arg(long)]
    set: SetTag,
    /// Directory of Bonn-format segment files for this set.
    #[arg(long = "in", conflicts_with = "manifest", required_unless_present = "manifest")]
    input: Option<PathBuf>,
    /// Synthetic manifest; only entries of `--set` are extracted.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DataArgs {
    /// Experiment id: 1 {A,B} vs {C,D}, 2 {A,B} vs {E}, 3 {C,D} vs {E},
    /// 4 {C} vs {D}.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    experiment: u8,
    /// Corpus root holding one directory per set. Ignored when
    /// `--manifest` or `--features` is given.
    #[arg(long, env = "EEG_PNN_DATA")]
    data_dir: Option<PathBuf>,
    /// Synthetic manifest to realize in memory.
    #[arg(long, conflicts_with = "features")]
    manifest: Option<PathBuf>,
    /// Feature CSVs from `extract`; the label column must hold set tags.
    #[arg(long, num_args = 1..)]
    features: Vec<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, value_enum, default_value = "zscore")]
    norm: NormArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Zscore,
    Minmax,
}

impl From<NormArg> for NormMethod {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Zscore => NormMethod::Zscore,
            NormArg::Minmax => NormMethod::Minmax,
        }
    }
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_SPREAD)]
    spread: f64,
    /// JSON report path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_SPREAD)]
    spread: f64,
    /// Model JSON path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    /// One Bonn-format segment file.
    #[arg(long)]
    segment: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1,0.5,1.0")]
    spreads: Vec<f64>,
    /// CSV path; a whitespace-separated `.dat` file is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Manifest to realize; the built-in default when absent.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Write the manifest JSON here.
    #[arg(long, required_unless_present = "realize")]
    write_manifest: Option<PathBuf>,
    /// Write one directory per set of Bonn-format files under this root.
    #[arg(long)]
    realize: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_MISSING,
        Error::Io { source, .. } if source.kind() == ErrorKind::NotFound => EXIT_MISSING,
        Error::ModelMismatch(_) => EXIT_MISMATCH,
        Error::Feature { source, .. } => exit_code(source),
        _ => EXIT_PARSE,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let timing = cli.threads == Some(1);
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Extract(args) => extract(args),
        Command::Cv(args) => cv(args, timing),
        Command::Train(args) => train(args),
        Command::Classify(args) => classify(args),
        Command::Sweep(args) => sweep(args, timing),
        Command::Synth(args) => synth(args),
    }
}

/// Fails early when an output file could not be created.
fn check_output(path: &Path) -> Result<(), Error> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(Error::Config(format!(
            "output directory {} does not exist",
            parent.display()
        )));
    }
    Ok(())
}

/// Writes through a temporary sibling and renames, so a failed run never
/// leaves a partial file at `path`.
fn write_output(path: &Path, contents: &str) -> Result<(), Error> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|source| Error::Io { path: tmp.clone(), source })?;
    fs::rename(&tmp, path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn extract(args: ExtractArgs) -> Result<(), Error> {
    check_output(&args.out)?;
    let cfg = args.pipeline.config();
    let segments = match (&args.input, &args.manifest) {
        (Some(dir), _) => load_bonn_dir(dir)?,
        (None, Some(m)) => SynthManifest::load(m)?
            .realize()?
            .remove(&args.set)
            .unwrap_or_default(),
        (None, None) => unreachable!("clap requires one source"),
    };
    let rows = segments
        .iter()
        .map(|seg| {
            let features = cfg.extract(seg).map_err(|e| with_segment(seg, e))?;
            Ok(FeatureRow {
                features,
                label: args.set.to_string(),
                source_id: seg.source_id().to_string(),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    write_output(&args.out, &feature_csv_string(&rows))
}

fn with_segment(seg: &Segment, e: Error) -> Error {
    match e {
        Error::Feature { feature, source } => Error::Feature {
            feature,
            source: Box::new(Error::Domain(format!("segment `{}`: {source}", seg.source_id()))),
        },
        other => other,
    }
}

fn load_corpus(data: &DataArgs, def: &ExperimentDef) -> Result<Option<Corpus>, Error> {
    let sets: Vec<SetTag> = def.sets().collect();
    if let Some(m) = &data.manifest {
        return SynthManifest::load(m)?.realize().map(Some);
    }
    if !data.features.is_empty() {
        return Ok(None);
    }
    if let Some(root) = &data.data_dir {
        return load_bonn_corpus(root, &sets).map(Some);
    }
    Ok(None)
}

fn load_dataset(data: &DataArgs) -> Result<Dataset, Error> {
    let def = ExperimentDef::by_id(data.experiment)?;
    if let Some(corpus) = load_corpus(data, &def)? {
        return build_experiment(&def, &corpus, &data.pipeline.config());
    }
    if data.features.is_empty() {
        return Err(Error::Config(
            "no input: pass --data-dir (or set EEG_PNN_DATA), --manifest or --features".into(),
        ));
    }
    let mut rows = Vec::new();
    for path in &data.features {
        rows.extend(read_feature_csv(path)?);
    }
    dataset_from_feature_rows(&def, &rows)
}

fn check_spread(spread: f64) -> Result<(), Error> {
    if spread.is_finite() && spread > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("spread must be a positive number, got {spread}")))
    }
}

fn cv(args: CvArgs, timing: bool) -> Result<(), Error> {
    check_spread(args.spread)?;
    check_output(&args.out)?;
    let def = ExperimentDef::by_id(args.data.experiment)?;
    let dataset = load_dataset(&args.data)?;
    let opts = LooOptions {
        method: args.data.norm.into(),
        timing,
    };
    let report = loo_cv(&dataset, args.spread, opts)?.with_experiment(&def);
    write_output(&args.out, &report.to_json())?;
    let time = report
        .timing
        .as_ref()
        .map(|t| format!("{:.6}s", t.median_fold_classify_seconds))
        .unwrap_or_else(|| "n/a (use --threads 1)".into());
    println!(
        "experiment {} ({}): accuracy {:.4} ({} samples, spread {}), median fold classify time {time}",
        def.id, def.name, report.accuracy, report.n_samples, report.spread
    );
    Ok(())
}

fn train(args: TrainArgs) -> Result<(), Error> {
    check_spread(args.spread)?;
    check_output(&args.out)?;
    let dataset = load_dataset(&args.data)?;
    let segment = dataset.segment.unwrap_or(SegmentShape {
        n_samples: BONN_SEGMENT_LEN,
        sample_rate_hz: BONN_SAMPLE_RATE_HZ,
    });
    let model = PnnModel::fit(
        &dataset.rows,
        &dataset.labels,
        dataset.class_names.clone(),
        args.spread,
        args.data.norm.into(),
        args.data.pipeline.config(),
        segment,
    )?;
    write_output(&args.out, &model.to_json())?;
    println!(
        "trained on {} segments ({}), spread {}",
        dataset.len(),
        dataset
            .class_names
            .iter()
            .zip(dataset.class_counts())
            .map(|(n, c)| format!("{n}: {c}"))
            .collect::<Vec<_>>()
            .join(", "),
        args.spread
    );
    Ok(())
}

fn classify(args: ClassifyArgs) -> Result<(), Error> {
    let model = PnnModel::load(&args.model)?;
    let seg = load_bonn_file(&args.segment)?;
    let id = seg.source_id().to_string();
    let seg = Segment::new(seg.into_samples(), model.segment.sample_rate_hz, id)?;
    let trace = model.classify_segment(&seg).map_err(|e| with_segment(&seg, e))?;
    println!("{} {}", trace.winner, model.class_names[trace.winner]);
    for (k, name) in model.class_names.iter().enumerate() {
        println!(
            "  class {k} {name}: score {:.6e} (log {:.6})",
            trace.class_scores[k], trace.log_scores[k]
        );
    }
    Ok(())
}

fn sweep(args: SweepArgs, timing: bool) -> Result<(), Error> {
    if args.spreads.is_empty() {
        return Err(Error::Config("no spreads given".into()));
    }
    for &s in &args.spreads {
        check_spread(s)?;
    }
    check_output(&args.out)?;
    let dat = args.out.with_extension("dat");
    let dataset = load_dataset(&args.data)?;
    let opts = LooOptions {
        method: args.data.norm.into(),
        timing,
    };
    let points = spread_sweep(&dataset, &args.spreads, opts)?;
    write_output(&args.out, &sweep_csv_string(&points))?;
    write_output(&dat, &sweep_plot_data(&points))?;
    for p in &points {
        println!("spread {}: accuracy {:.4}", p.spread, p.accuracy);
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), Error> {
    if let Some(path) = &args.write_manifest {
        check_output(path)?;
    }
    if let Some(root) = &args.realize {
        if !root.is_dir() {
            return Err(Error::Config(format!("{} is not a directory", root.display())));
        }
    }
    let manifest = match &args.manifest {
        Some(path) => SynthManifest::load(path)?,
        None => default_manifest(),
    };
    if let Some(root) = &args.realize {
        let corpus = manifest.realize()?;
        for (tag, segments) in &corpus {
            let dir = root.join(tag.letter().to_string());
            fs::create_dir_all(&dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
            for seg in segments {
                write_bonn_file(&dir.join(format!("{}.txt", seg.source_id())), seg)?;
            }
        }
    }
    if let Some(path) = &args.write_manifest {
        write_output(path, &manifest.to_json())?;
    }
    Ok(())
}
