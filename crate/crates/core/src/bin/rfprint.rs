use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rfprint::manifest::{Manifest, SampleKind};
use rfprint::pipeline::{
    band_explore, eval, movement_report, predict, stft_sweep, train, workflow_eval, ExperimentKind, ManifestSource, ModelFile,
    PipelineConfig, PipelineError, Report, StftSweepOptions, BAND_EXPLORE_FFT_LEN,
};
use rfprint::simulate::{generate_dataset, DatasetConfig, MANIFEST_FILE};

#[derive(Parser)]
#[command(name = "rfprint", version, about = "Fingerprint robot movements from unintentional RF emissions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (cf32 files plus manifest.csv).
    Simulate(SimulateArgs),
    /// Fit the feature pipeline and classifier on a manifest.
    Train {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "movement")]
        kind: KindFilter,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Classify IQ files with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Score a saved model, or run a movement experiment that fits per column.
    Eval {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, conflicts_with = "experiment", required_unless_present = "experiment")]
        model: Option<PathBuf>,
        #[arg(long, value_enum)]
        experiment: Option<Experiment>,
        #[arg(long, value_enum, default_value = "movement")]
        kind: KindFilter,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Accuracy and timing for every window and FFT length.
    StftSweep {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Per-set workflow recovery rates.
    WorkflowEval {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Averaged power spectral density to check the band-pass range.
    BandExplore {
        #[arg(long)]
        manifest: PathBuf,
        /// Welch segment length for the PSD (separate from --fft-len).
        #[arg(long, default_value_t = BAND_EXPLORE_FFT_LEN)]
        psd_fft_len: usize,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindFilter {
    Movement,
    Workflow,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Baseline,
    DistanceSweep,
    SpeedSweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Desk,
    PaperScale,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "desk")]
    preset: Preset,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Recordings per (class, distance, speed) cell.
    #[arg(long)]
    movement_reps: Option<usize>,
    /// Recordings per (workflow, set).
    #[arg(long)]
    workflow_reps: Option<usize>,
    #[arg(long)]
    no_movements: bool,
    #[arg(long)]
    no_workflows: bool,
    /// Length of each movement recording in seconds.
    #[arg(long)]
    duration_s: Option<f64>,
    /// Movement-recording SNR in dB (white noise relative to a unit tone).
    #[arg(long)]
    snr_db: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Also write the report as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Pipeline settings. `--config` is read first; individual flags override it.
#[derive(Args)]
struct ConfigArgs {
    /// key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sample_rate_hz: Option<String>,
    #[arg(long)]
    band_low_hz: Option<String>,
    #[arg(long)]
    band_high_hz: Option<String>,
    #[arg(long)]
    filter_order: Option<String>,
    #[arg(long)]
    fft_len: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    hop: Option<String>,
    #[arg(long)]
    pca_tau: Option<String>,
    #[arg(long)]
    pca_cap: Option<String>,
    #[arg(long)]
    pca_components: Option<String>,
    /// per-column (default) or global.
    #[arg(long)]
    pca_scope: Option<String>,
    #[arg(long)]
    svm_c: Option<String>,
    #[arg(long)]
    svm_kernel: Option<String>,
    #[arg(long)]
    svm_gamma: Option<String>,
    #[arg(long)]
    svm_tol: Option<String>,
    #[arg(long)]
    svm_max_iter: Option<String>,
    #[arg(long)]
    grid_search: Option<String>,
    #[arg(long)]
    test_fraction: Option<String>,
    #[arg(long)]
    folds: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

impl ConfigArgs {
    fn build(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        let flags = [
            ("sample_rate_hz", &self.sample_rate_hz),
            ("band_low_hz", &self.band_low_hz),
            ("band_high_hz", &self.band_high_hz),
            ("filter_order", &self.filter_order),
            ("fft_len", &self.fft_len),
            ("window", &self.window),
            ("hop", &self.hop),
            ("pca_tau", &self.pca_tau),
            ("pca_cap", &self.pca_cap),
            ("pca_components", &self.pca_components),
            ("pca_scope", &self.pca_scope),
            ("svm_c", &self.svm_c),
            ("svm_kernel", &self.svm_kernel),
            ("svm_gamma", &self.svm_gamma),
            ("svm_tol", &self.svm_tol),
            ("svm_max_iter", &self.svm_max_iter),
            ("grid_search", &self.grid_search),
            ("test_fraction", &self.test_fraction),
            ("folds", &self.folds),
            ("seed", &self.seed),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_source(path: &Path, kind: KindFilter, cfg: &PipelineConfig) -> Result<ManifestSource> {
    let manifest = Manifest::load(path).map_err(PipelineError::Manifest)?;
    let manifest = match kind {
        KindFilter::All => manifest,
        KindFilter::Movement => manifest.filter(|r| r.kind == SampleKind::Movement),
        KindFilter::Workflow => manifest.filter(|r| r.kind == SampleKind::Workflow),
    };
    if manifest.is_empty() {
        bail!("data: manifest {} has no rows of the requested kind", path.display());
    }
    Ok(ManifestSource::new(manifest, cfg.sample_rate_hz))
}

fn emit(report: &Report, output: &OutputArgs) -> Result<()> {
    print!("{}", report.to_text());
    if let Some(p) = &output.csv {
        fs::write(p, report.to_csv()).with_context(|| format!("report: cannot write {}", p.display()))?;
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let mut cfg = match args.preset {
        Preset::Desk => DatasetConfig::desk(args.seed),
        Preset::PaperScale => DatasetConfig::paper_scale(args.seed),
    };
    if let (Some(r), Some(g)) = (args.movement_reps, cfg.movements.as_mut()) {
        g.reps = r;
    }
    if let (Some(r), Some(g)) = (args.workflow_reps, cfg.workflows.as_mut()) {
        g.reps = r;
    }
    if args.no_movements {
        cfg.movements = None;
    }
    if args.no_workflows {
        cfg.workflows = None;
    }
    if let Some(d) = args.duration_s {
        cfg.movement_duration_s = d;
    }
    if let Some(s) = args.snr_db {
        cfg.model = cfg.model.with_snr_db(s);
    }
    fs::create_dir_all(&args.out).with_context(|| format!("simulate: cannot create {}", args.out.display()))?;
    let manifest = generate_dataset(&cfg, &args.out).map_err(PipelineError::Simulate)?;
    println!("wrote {} recordings and {}", manifest.len(), args.out.join(MANIFEST_FILE).display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(&args)?,
        Command::Train { manifest, out, kind, config } => {
            let cfg = config.build()?;
            let source = load_source(&manifest, kind, &cfg)?;
            let model = train(&source, &cfg)?;
            model.save(&out)?;
            println!(
                "trained on {} rows, {} classes, {} components; training accuracy {:.4}; model written to {}",
                model.training_rows,
                model.classifier.svm.classes.len(),
                model.classifier.transform.pca.n_components(),
                model.training_accuracy,
                out.display()
            );
        }
        Command::Predict { model, files } => {
            let model = ModelFile::load(&model)?;
            for f in files {
                println!("{}\t{}", f.display(), predict(&model, &f)?);
            }
        }
        Command::Eval { manifest, model, experiment, kind, output, config } => {
            let report = match (model, experiment) {
                (Some(m), _) => {
                    let model = ModelFile::load(&m)?;
                    eval(&load_source(&manifest, kind, &model.config)?, &model)?
                }
                (None, Some(e)) => {
                    let cfg = config.build()?;
                    let kind = match e {
                        Experiment::Baseline => ExperimentKind::Baseline,
                        Experiment::DistanceSweep => ExperimentKind::DistanceSweep,
                        Experiment::SpeedSweep => ExperimentKind::SpeedSweep,
                    };
                    movement_report(&load_source(&manifest, KindFilter::Movement, &cfg)?, &cfg, kind)?
                }
                (None, None) => bail!("config: eval needs --model or --experiment"),
            };
            emit(&report, &output)?;
        }
        Command::StftSweep { manifest, runs, output, config } => {
            let cfg = config.build()?;
            let opts = StftSweepOptions {
                timing_runs: runs,
                ..Default::default()
            };
            emit(&stft_sweep(&load_source(&manifest, KindFilter::All, &cfg)?, &cfg, &opts)?, &output)?;
        }
        Command::WorkflowEval { manifest, output, config } => {
            let cfg = config.build()?;
            let report = workflow_eval(&load_source(&manifest, KindFilter::Workflow, &cfg)?, &cfg)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            emit(&report, &output)?;
        }
        Command::BandExplore { manifest, psd_fft_len, output, config } => {
            let cfg = config.build()?;
            let summary = band_explore(&load_source(&manifest, KindFilter::All, &cfg)?, &cfg, psd_fft_len)?;
            print!("{}", summary.to_text());
            if let Some(p) = &output.csv {
                fs::write(p, summary.to_csv()).with_context(|| format!("report: cannot write {}", p.display()))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Most messages already embed their cause; append only new ones.
            let mut msg = e.to_string();
            for cause in e.chain().skip(1) {
                let c = cause.to_string();
                if !msg.contains(&c) {
                    msg = format!("{msg}: {c}");
                }
            }
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
