//! Command-line front end: `simulate`, `extract`, `train`, `predict`,
//! `evaluate` and `ablate`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datamodel::{load_dataset, BracThreshold, Device};
use crate::error::{Error, Result};
use crate::eval::{
    ablate_devices_matrix, ablate_feature_sets, device_ablation_csv, feature_ablation_csv, loso, EvalConfig,
};
use crate::features::{build_matrix, catalog_fingerprint, FeatureMatrix};
use crate::models::{fit, load_model, save_model, HyperParams, ModelKind, Task};
use crate::signal::SignalConfig;
use crate::synth::{generate_dataset_with, write_dataset, EffectModel, NoiseModel, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "gaitbrac", version, about = "Intoxication detection from wearable gait recordings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset of recordings and labels.
    Simulate(SimulateArgs),
    /// Build the f-difference feature matrix from recordings.
    Extract(ExtractArgs),
    /// Train one model on a feature matrix.
    Train(TrainArgs),
    /// Score a feature matrix with a saved model.
    Predict(PredictArgs),
    /// Leave-one-subject-out evaluation.
    Evaluate(EvaluateArgs),
    /// Feature-family or device-combination ablation.
    Ablate(AblateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of subjects.
    #[arg(short = 'n', long, value_parser = clap::value_parser!(u32).range(3..))]
    pub n_subjects: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Subjects generated without a phone.
    #[arg(long, default_value_t = 0)]
    pub phone_missing: usize,
    #[arg(long, value_enum, default_value_t = EffectArg::Full)]
    pub effect: EffectArg,
    /// Multiplies every measurement noise level.
    #[arg(long, default_value_t = 1.0)]
    pub noise_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EffectArg {
    Full,
    CadenceOnly,
    None,
}

#[derive(Debug, Clone, Args)]
pub struct SignalArgs {
    #[arg(long, default_value_t = 50.0)]
    pub target_hz: f64,
    #[arg(long, default_value_t = 5)]
    pub sma_window: usize,
    #[arg(long, default_value_t = 6.0)]
    pub window_start: f64,
    #[arg(long, default_value_t = 14.0)]
    pub window_end: f64,
}

impl SignalArgs {
    fn config(&self) -> SignalConfig {
        SignalConfig {
            target_hz: self.target_hz,
            sma_window: self.sma_window,
            window_start_s: self.window_start,
            window_end_s: self.window_end,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Directory of recording CSV files.
    #[arg(long)]
    pub recordings: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Output feature matrix CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated devices, or `all`.
    #[arg(long, default_value = "all", value_parser = parse_devices)]
    pub devices: DeviceMask,
    #[command(flatten)]
    pub signal: SignalArgs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceMask(pub BTreeSet<Device>);

fn parse_devices(s: &str) -> std::result::Result<DeviceMask, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(DeviceMask(Device::ALL.into_iter().collect()));
    }
    let set = s
        .split([',', '+'])
        .map(|d| d.trim().parse::<Device>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<BTreeSet<_>, _>>()?;
    if set.is_empty() {
        return Err("empty device list".into());
    }
    Ok(DeviceMask(set))
}

fn parse_threshold(s: &str) -> std::result::Result<BracThreshold, String> {
    s.parse::<BracThreshold>().map_err(|e| e.to_string())
}

fn parse_depth(s: &str) -> std::result::Result<Option<usize>, String> {
    if s == "none" {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|_| format!("'{s}' is not a depth"))
    }
}

/// Model choice and hyperparameters; unset values take the model's
/// defaults.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value = "gbc")]
    pub model: ModelKind,
    /// Overrides the task implied by `--model`.
    #[arg(long)]
    pub task: Option<Task>,
    /// BrAC threshold for the drunk class.
    #[arg(long, default_value = "240", value_parser = parse_threshold)]
    pub threshold: BracThreshold,
    #[arg(long)]
    pub n_estimators: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Integer depth or `none`.
    #[arg(long, value_parser = parse_depth)]
    pub max_depth: Option<Option<usize>>,
    #[arg(long)]
    pub min_samples_split: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_sweeps: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

impl ModelArgs {
    pub fn kind(&self) -> Result<ModelKind> {
        match self.task {
            None => Ok(self.model),
            Some(t) => self
                .model
                .for_task(t)
                .ok_or_else(|| Error::InvalidModel(format!("{} does not support the {} task", self.model, t.name()))),
        }
    }

    pub fn params(&self, kind: ModelKind) -> HyperParams {
        let mut p = HyperParams::defaults_for(kind);
        if let Some(v) = self.n_estimators {
            p.n_estimators = v;
        }
        if let Some(v) = self.learning_rate {
            p.learning_rate = v;
        }
        if let Some(v) = self.max_depth {
            p.max_depth = v;
        }
        if let Some(v) = self.min_samples_split {
            p.min_samples_split = v;
        }
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.tol {
            p.tol = v;
        }
        if let Some(v) = self.max_sweeps {
            p.max_sweeps = v;
        }
        p.random_seed = self.seed;
        p
    }

    pub fn eval_config(&self) -> Result<EvalConfig> {
        let kind = self.kind()?;
        Ok(EvalConfig {
            kind,
            params: self.params(kind),
            threshold: (kind.task() == Task::Classify).then_some(self.threshold),
            cutoff: 0.5,
        })
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Output model file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "all", value_parser = parse_devices)]
    pub devices: DeviceMask,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub model_file: PathBuf,
    /// Output predictions CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "all", value_parser = parse_devices)]
    pub devices: DeviceMask,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Output directory for report.csv, roc.csv, predictions.csv, config.csv.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "all", value_parser = parse_devices)]
    pub devices: DeviceMask,
    /// Score cutoff for the confusion matrix.
    #[arg(long, default_value_t = 0.5)]
    pub cutoff: f64,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AblationKind {
    Features,
    Devices,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(value_enum)]
    pub kind: AblationKind,
    #[arg(long)]
    pub matrix: PathBuf,
    /// Output ablation CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
}

fn restrict(m: FeatureMatrix, mask: &DeviceMask) -> FeatureMatrix {
    if mask.0.len() == Device::ALL.len() {
        return m;
    }
    let cols = m.columns_of_devices(&mask.0);
    m.select_columns(&cols)
}

fn write(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Runs one parsed command, writing progress lines to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Result<()> {
    let mut say = |s: String| {
        let _ = writeln!(out, "{s}");
    };
    match cli.command {
        Command::Simulate(a) => {
            let effect = match a.effect {
                EffectArg::Full => EffectModel::default(),
                EffectArg::CadenceOnly => EffectModel::cadence_only(),
                EffectArg::None => EffectModel::none(),
            };
            let base = NoiseModel::default();
            let cfg = SynthConfig {
                effect,
                noise: NoiseModel {
                    accel: base.accel * a.noise_scale,
                    gyro: base.gyro * a.noise_scale,
                    compass: base.compass * a.noise_scale,
                },
                phone_missing: a.phone_missing,
                ..SynthConfig::default()
            };
            let pairs = generate_dataset_with(a.n_subjects as usize, &cfg, a.seed)?;
            write_dataset(&a.out, &pairs)?;
            say(format!("wrote {} subjects to {}", pairs.len(), a.out.display()));
        }
        Command::Extract(a) => {
            let pairs = load_dataset(&a.recordings, &a.labels)?;
            let m = build_matrix(&pairs, &a.devices.0, &a.signal.config())?;
            m.write(&a.out)?;
            say(format!("catalog length {}", m.n_features()));
            say(format!("subjects {}", m.n_rows()));
        }
        Command::Train(a) => {
            let cfg = a.model.eval_config()?;
            let m = restrict(FeatureMatrix::read(&a.matrix)?, &a.devices).complete_rows();
            let y: Vec<f64> = match cfg.threshold {
                Some(t) => m.brac.iter().map(|&b| f64::from(b >= t.value())).collect(),
                None => m.brac.clone(),
            };
            let model = fit(cfg.kind, &m.rows, &y, &cfg.params, &catalog_fingerprint(&m.catalog))?;
            save_model(&model, &a.out)?;
            say(format!("trained {} on {} subjects", cfg.kind, m.n_rows()));
        }
        Command::Predict(a) => {
            let m = restrict(FeatureMatrix::read(&a.matrix)?, &a.devices).complete_rows();
            let model = load_model(&a.model_file, Some(&catalog_fingerprint(&m.catalog)))?;
            let mut body = String::from("subject,score,brac\n");
            for ((s, row), b) in m.subject_ids.iter().zip(&m.rows).zip(&m.brac) {
                writeln!(body, "{s},{},{b}", model.predict(row)?).unwrap();
            }
            write(&a.out, &body)?;
            say(format!("scored {} subjects", m.n_rows()));
        }
        Command::Evaluate(a) => {
            let mut cfg = a.model.eval_config()?;
            cfg.cutoff = a.cutoff;
            let m = restrict(FeatureMatrix::read(&a.matrix)?, &a.devices);
            let report = loso(&m, &cfg)?;
            report.write_files(&a.out)?;
            say(report.report_csv().trim_end().to_string());
        }
        Command::Ablate(a) => {
            let cfg = a.model.eval_config()?;
            let m = FeatureMatrix::read(&a.matrix)?;
            let body = match a.kind {
                AblationKind::Features => feature_ablation_csv(&ablate_feature_sets(&m, &cfg)?),
                AblationKind::Devices => device_ablation_csv(&ablate_devices_matrix(&m, &cfg)?),
            };
            write(&a.out, &body)?;
            say(body.trim_end().to_string());
        }
    }
    Ok(())
}

/// Process entry point: parses `args`, runs, and maps failures to an
/// `ERROR <code>: <message>` line and exit code 1. Usage errors exit 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(std::io::stderr(), "ERROR {}: {msg}", e.code());
            1
        }
    }
}
