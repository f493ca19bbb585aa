use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use natcurate::curation::curate_by_lower_bound;
use natcurate::label_matrix::{load_corpus, load_truth, write_csv, write_json, write_truth_csv};
use natcurate::pipeline::{label_stage, run_comparatives, run_pipeline};
use natcurate::pruning::prune;
use natcurate::synth::generate;
use natcurate::validation::{validate_sequence, write_plot_csv};
use natcurate::{Corpus, Format, GroundTruth, LabelerKind, PipelineConfig, SynthConfig};
use serde::Serialize;

mod records;

use records::{curation_manifest, interval_records, label_records, prune_report, used_lf_names, RunManifest};

#[derive(Parser)]
#[command(name = "natcurate", version, about = "Curate adversarially ordered natural datasets from weak labels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select independent labeling functions.
    Prune(StageArgs),
    /// Emit per-sample probabilistic labels.
    Label(StageArgs),
    /// Emit per-sample labels with Clopper-Pearson intervals.
    Intervals(StageArgs),
    /// Emit the nested-dataset manifest.
    Curate(StageArgs),
    /// Validate the curated ordering against ground truth.
    Validate(StageArgs),
    /// Run the whole pipeline and write every artifact to --out.
    Run(RunArgs),
    /// Write a seeded synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Labeler {
    #[value(alias = "majority_vote")]
    Majority,
    Generative,
}

impl From<Labeler> for LabelerKind {
    fn from(l: Labeler) -> Self {
        match l {
            Labeler::Majority => LabelerKind::MajorityVote,
            Labeler::Generative => LabelerKind::Generative,
        }
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// Label matrix (.csv or .json).
    #[arg(long)]
    input: PathBuf,
    /// Ground-truth labels (.csv, one per line, or .json with "true_labels").
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Correlation threshold for the dependency graph.
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Significance level of the confidence intervals.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Significance threshold of the validity verdict.
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    /// Number of nested datasets.
    #[arg(long = "num-datasets", default_value_t = 10)]
    num_datasets: usize,
    #[arg(long, value_enum, default_value_t = Labeler::Generative)]
    labeler: Labeler,
    /// Use every labeling function.
    #[arg(long = "skip-pruning")]
    skip_pruning: bool,
}

impl PipelineArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let cfg = PipelineConfig {
            delta: self.delta,
            alpha: self.alpha,
            gamma: self.gamma,
            num_datasets: self.num_datasets,
            labeler: self.labeler.into(),
            skip_pruning: self.skip_pruning,
        };
        cfg.validate().context("invalid configuration")?;
        Ok(cfg)
    }

    /// Loads the matrix and, when available, the truth: `--truth` wins over
    /// labels embedded in a JSON input.
    fn load(&self) -> Result<(Corpus, Option<GroundTruth>)> {
        let file = File::open(&self.input).with_context(|| format!("cannot open input {}", self.input.display()))?;
        let corpus = load_corpus(BufReader::new(file), Format::from_path(&self.input))
            .with_context(|| format!("malformed label matrix {}", self.input.display()))?;
        let truth = match &self.truth {
            Some(path) => {
                let file = File::open(path).with_context(|| format!("cannot open truth {}", path.display()))?;
                Some(
                    load_truth(BufReader::new(file), Format::from_path(path), &corpus.matrix)
                        .with_context(|| format!("malformed truth file {}", path.display()))?,
                )
            }
            None => corpus.truth.clone(),
        };
        Ok((corpus, truth))
    }
}

#[derive(Args)]
struct StageArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Write to this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Also tabulate the four comparative orderings (needs truth).
    #[arg(long)]
    comparatives: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Generator configuration (JSON). Defaults to the duplicated-triples corpus.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "num-samples")]
    num_samples: Option<usize>,
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes `value` as `<dir>/<name>` or, without a directory, to stdout.
fn emit<T: Serialize>(out: Option<&Path>, name: &str, value: &T) -> Result<()> {
    match out {
        Some(dir) => {
            create_dir(dir)?;
            write_json_file(&dir.join(name), value)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            serde_json::to_writer_pretty(&mut lock, value)?;
            writeln!(lock)?;
            Ok(())
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_plot(dir: &Path, report: &natcurate::ValidationReport) -> Result<()> {
    let path = dir.join("plotdata.csv");
    let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_plot_csv(report, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_prune(args: &StageArgs) -> Result<()> {
    let cfg = args.pipeline.config()?;
    let (corpus, _) = args.pipeline.load()?;
    let p = prune::<f64>(&corpus.matrix, cfg.delta)?;
    emit(
        args.out.as_deref(),
        "prune.json",
        &prune_report(corpus.matrix.lf_names(), &p, cfg.delta),
    )
}

fn cmd_label(args: &StageArgs, with_intervals: bool) -> Result<()> {
    let cfg = args.pipeline.config()?;
    let (corpus, _) = args.pipeline.load()?;
    let labeled = label_stage::<f64>(&corpus.matrix, &cfg)?;
    if with_intervals {
        emit(args.out.as_deref(), "intervals.json", &interval_records(&labeled.samples))
    } else {
        emit(args.out.as_deref(), "labels.json", &label_records(&labeled.samples))
    }
}

fn cmd_curate(args: &StageArgs) -> Result<()> {
    let cfg = args.pipeline.config()?;
    let (corpus, _) = args.pipeline.load()?;
    let labeled = label_stage::<f64>(&corpus.matrix, &cfg)?;
    let seq = curate_by_lower_bound(&labeled.samples, cfg.num_datasets)?;
    emit(args.out.as_deref(), "curation.json", &curation_manifest(&seq))
}

fn cmd_validate(args: &StageArgs) -> Result<()> {
    let cfg = args.pipeline.config()?;
    let (corpus, truth) = args.pipeline.load()?;
    let Some(truth) = truth else {
        bail!("validate needs ground truth: pass --truth or embed true_labels in a JSON input");
    };
    let labeled = label_stage::<f64>(&corpus.matrix, &cfg)?;
    let seq = curate_by_lower_bound(&labeled.samples, cfg.num_datasets)?;
    let report = validate_sequence(&seq, &truth, cfg.gamma)?;
    emit(args.out.as_deref(), "report.json", &report)?;
    if let Some(dir) = &args.out {
        write_plot(dir, &report)?;
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = args.pipeline.config()?;
    let (corpus, truth) = args.pipeline.load()?;
    if args.comparatives && truth.is_none() {
        bail!("--comparatives needs ground truth: pass --truth or embed true_labels in a JSON input");
    }
    let m = &corpus.matrix;
    let out = run_pipeline::<f64>(m, truth.as_ref(), &cfg)?;
    let dir = args.out.as_path();
    create_dir(dir)?;

    let mut artifacts = vec!["manifest.json", "labels.json", "intervals.json", "curation.json"];
    write_json_file(&dir.join("labels.json"), &label_records(&out.labeled.samples))?;
    write_json_file(&dir.join("intervals.json"), &interval_records(&out.labeled.samples))?;
    write_json_file(&dir.join("curation.json"), &curation_manifest(&out.curated))?;
    if let Some(p) = &out.labeled.pruning {
        write_json_file(&dir.join("prune.json"), &prune_report(m.lf_names(), p, cfg.delta))?;
        artifacts.push("prune.json");
    }
    if let Some(report) = &out.report {
        write_json_file(&dir.join("report.json"), report)?;
        write_plot(dir, report)?;
        artifacts.extend(["report.json", "plotdata.csv"]);
    }
    if let (true, Some(truth)) = (args.comparatives, truth.as_ref()) {
        let table = run_comparatives::<f64>(m, truth, &cfg)?;
        write_json_file(&dir.join("comparatives.json"), &table)?;
        artifacts.push("comparatives.json");
    }

    let manifest = RunManifest {
        input: args.pipeline.input.display().to_string(),
        truth: args.pipeline.truth.as_ref().map(|p| p.display().to_string()),
        config: &cfg,
        num_samples: m.num_samples(),
        num_classes: m.num_classes(),
        lf_names: m.lf_names(),
        used_lfs: used_lf_names(m.lf_names(), &out.labeled),
        mean_confidence: out.labeled.mean_confidence(),
        verdict: out.report.as_ref().map(|r| r.verdict),
        artifacts,
    };
    write_json_file(&dir.join("manifest.json"), &manifest)?;
    if let Some(r) = &out.report {
        eprintln!("rho = {:.4}, p = {:.4}, verdict = {:?}", r.rho, r.p_value, r.verdict);
    }
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
            serde_json::from_str::<SynthConfig>(&text).with_context(|| format!("malformed config {}", path.display()))?
        }
        None => SynthConfig::duplicated_triples(0),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(n) = args.num_samples {
        cfg.num_samples = n;
    }
    let corpus = generate(&cfg).context("invalid synthetic configuration")?;
    create_dir(&args.out)?;

    let mut csv = BufWriter::new(File::create(args.out.join("matrix.csv"))?);
    write_csv(&corpus.matrix, &mut csv)?;
    csv.flush()?;
    let mut json = BufWriter::new(File::create(args.out.join("matrix.json"))?);
    write_json(&corpus.matrix, Some(&corpus.truth), &mut json)?;
    json.flush()?;
    let mut truth = BufWriter::new(File::create(args.out.join("truth.csv"))?);
    write_truth_csv(&corpus.truth, &mut truth)?;
    truth.flush()?;
    write_json_file(&args.out.join("synth_config.json"), &cfg)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Prune(a) => cmd_prune(a),
        Command::Label(a) => cmd_label(a, false),
        Command::Intervals(a) => cmd_label(a, true),
        Command::Curate(a) => cmd_curate(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Run(a) => cmd_run(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
