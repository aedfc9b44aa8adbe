use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quadlogic::datasets::{gen_taiji, gen_xor, LabeledDataset, TaiJiSpec};
use quadlogic::experiments::{
    analyzed_layers, default_mnist_dir, entropy_dynamics, histogram_csv, load_mnist, points_csv, raster_network,
    raster_neuron, run_mnist, run_survey, sharp_vs_flat, ConvNetSpec, MnistConfig, NeuronPreset, SurveyConfig,
    SurveyReport,
};
use quadlogic::quadcore::{Activation, Network};
use quadlogic::spectral::{network_spectrum, TypeMode, DEFAULT_EPSILON_REL};
use quadlogic::trainer::{evaluate, train, InitScheme, LrSchedule, TrainConfig};
use quadlogic::{Error, Result};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "quadlogic", version, about = "Quadratic networks and their gate-type spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Tai Ji lattice dataset as CSV.
    GenTaiji(GenTaijiArgs),
    /// Train one Tai Ji or XOR network and write a JSON report.
    Train(TrainArgs),
    /// Collect good minima over sequential seeds and write a JSON report.
    Survey(SurveyArgs),
    /// Compare the most frequent spectra of a survey against the rest.
    SharpVsFlat(SharpVsFlatArgs),
    /// Record per-layer gate-type entropy during training as CSV.
    EntropyDynamics(DynamicsArgs),
    /// Rasterize a decision region to a binary PGM.
    Raster(RasterArgs),
    /// Train the MNIST conv net and write positive-index histograms as CSV.
    MnistSpectrum(MnistArgs),
}

#[derive(Args)]
struct GenTaijiArgs {
    /// Lattice reciprocal: points are (i/R, j/R).
    #[arg(long, short = 'R', default_value_t = 20)]
    reciprocal: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum TrainData {
    Taiji,
    Xor,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Simplified,
}

impl From<ModeArg> for TypeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => TypeMode::Full,
            ModeArg::Simplified => TypeMode::Simplified,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_enum, default_value_t = TrainData::Taiji)]
    dataset: TrainData,
    /// Dash-separated layer widths, input first.
    #[arg(long, default_value = "2-6-6-1")]
    arch: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    iters: u64,
    /// A single rate, or comma-separated `steps:rate` segments.
    #[arg(long, default_value = "0.004")]
    lr_schedule: String,
    /// Standard deviation of the truncated-Gaussian init.
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Simplified)]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_EPSILON_REL)]
    epsilon_rel: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SurveyArgs {
    #[arg(long, default_value = "2-6-6-1")]
    arch: String,
    #[arg(long)]
    target: usize,
    /// Training accuracy a run must exceed, as a fraction (`1200/1245`) or decimal.
    #[arg(long, default_value = "1200/1245")]
    threshold: String,
    /// First seed; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    iters: u64,
    #[arg(long, default_value = "0.004")]
    lr_schedule: String,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Give up after this many runs (default: ten per target, at least 100).
    #[arg(long)]
    max_attempts: Option<u64>,
    /// Concurrent trainings; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value_t = 7)]
    top_k: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON_REL)]
    epsilon_rel: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SharpVsFlatArgs {
    /// Survey report written by `survey`.
    #[arg(long)]
    report: PathBuf,
    #[arg(long, short = 'k', default_value_t = 7)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DynamicsData {
    Mnist,
    Taiji,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    LinearCollapse,
    Gaussian,
}

#[derive(Args)]
struct DynamicsArgs {
    #[arg(long, value_enum, default_value_t = DynamicsData::Mnist)]
    dataset: DynamicsData,
    /// Layer widths for the Tai Ji MLP; ignored for MNIST.
    #[arg(long, default_value = "2-6-6-1")]
    arch: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    iters: u64,
    /// Defaults to the MNIST desk schedule, or 0.004 for Tai Ji.
    #[arg(long)]
    lr_schedule: Option<String>,
    #[arg(long, default_value_t = 400)]
    cadence: u64,
    #[arg(long, value_enum, default_value_t = InitArg::LinearCollapse)]
    init: InitArg,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON_REL)]
    epsilon_rel: f64,
    #[command(flatten)]
    mnist: MnistDataArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RasterArgs {
    /// Hand-built neuron: xor, constant, witness-a or witness-b.
    #[arg(long, conflicts_with = "network")]
    preset: Option<String>,
    /// JSON report from `train`; its network is rasterized.
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    resolution: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MnistDataArgs {
    /// Directory with the IDX files (default: $QUADLOGIC_MNIST_DIR, then data/mnist).
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    train_limit: usize,
    #[arg(long, default_value_t = 10_000)]
    test_limit: usize,
    /// Kernels in the conv layer.
    #[arg(long, default_value_t = 8)]
    kernels: usize,
}

#[derive(Args)]
struct MnistArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    iters: u64,
    #[arg(long)]
    lr_schedule: Option<String>,
    /// Also histogram the dense layer (slow: one large eigenproblem per neuron).
    #[arg(long)]
    include_dense: bool,
    #[arg(long, default_value_t = DEFAULT_EPSILON_REL)]
    epsilon_rel: f64,
    #[command(flatten)]
    mnist: MnistDataArgs,
    /// Histogram CSV.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON report with test accuracy.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_arch(text: &str) -> Result<Vec<usize>> {
    text.split('-')
        .map(|w| w.trim().parse::<usize>().ok().filter(|&w| w > 0))
        .collect::<Option<Vec<_>>>()
        .filter(|v| v.len() >= 2)
        .ok_or_else(|| Error::InvalidArchitecture(format!("cannot parse architecture {text:?}")))
}

fn parse_threshold(text: &str) -> Result<f64> {
    let bad = || Error::InvalidParameter(format!("cannot parse threshold {text:?}"));
    let value = match text.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            n / d
        }
        None => text.trim().parse().map_err(|_| bad())?,
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(Error::from)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn taiji_config(seed: u64, iters: u64, schedule: &str, sigma: f64) -> Result<TrainConfig> {
    let mut cfg = SurveyConfig::taiji(vec![2, 1], 1).train;
    cfg.seed = seed;
    cfg.iterations = iters;
    cfg.schedule = LrSchedule::parse(schedule, Some(iters))?;
    cfg.init = InitScheme::TruncatedGaussian { sigma };
    Ok(cfg)
}

#[derive(Serialize)]
struct TrainOutput {
    config: TrainConfig,
    architecture: Vec<usize>,
    train_accuracy: f64,
    spectrum: quadlogic::spectral::NetworkSpectrum,
    network: Network,
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let architecture = parse_arch(&a.arch)?;
    let data = match a.dataset {
        TrainData::Taiji => gen_taiji(TaiJiSpec::TRAIN)?,
        TrainData::Xor => gen_xor(),
    };
    let config = taiji_config(a.seed, a.iters, &a.lr_schedule, a.sigma)?;
    let net = Network::mlp(&architecture, Activation::Sigmoid, Activation::Sigmoid)?;
    let network = train(net, &data, &config)?.network;
    let output = TrainOutput {
        train_accuracy: evaluate(&network, &data)?.accuracy,
        spectrum: network_spectrum(&network, a.mode.into(), a.epsilon_rel, |_, _| true)?,
        config,
        architecture,
        network,
    };
    write_json(&a.out, &output)
}

fn cmd_survey(a: SurveyArgs) -> Result<()> {
    let mut config = SurveyConfig::taiji(parse_arch(&a.arch)?, a.target);
    config.threshold = parse_threshold(&a.threshold)?;
    config.base_seed = a.seed;
    config.train = taiji_config(0, a.iters, &a.lr_schedule, a.sigma)?;
    if let Some(cap) = a.max_attempts {
        config.max_attempts = cap;
    }
    config.top_k = a.top_k;
    config.epsilon_rel = a.epsilon_rel;
    let report = run_survey(&config, a.workers)?;
    write_json(&a.out, &report)
}

fn cmd_sharp_vs_flat(a: SharpVsFlatArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.report)?;
    let report: SurveyReport = serde_json::from_str(&text)?;
    write_json(&a.out, &sharp_vs_flat(&report.records, a.k)?)
}

fn mnist_data(a: &MnistDataArgs) -> Result<(LabeledDataset, LabeledDataset)> {
    let dir = a.data_dir.clone().unwrap_or_else(default_mnist_dir);
    load_mnist(&dir, a.train_limit, a.test_limit)
}

fn cmd_entropy_dynamics(a: DynamicsArgs) -> Result<()> {
    let init = match a.init {
        InitArg::LinearCollapse => InitScheme::LinearCollapse,
        InitArg::Gaussian => InitScheme::TruncatedGaussian { sigma: a.sigma },
    };
    let (net, data, mut config) = match a.dataset {
        DynamicsData::Mnist => {
            let mut spec = ConvNetSpec::mnist_desk();
            spec.kernels = a.mnist.kernels;
            let (train_set, _) = mnist_data(&a.mnist)?;
            (spec.build()?, train_set, MnistConfig::desk(a.seed).train)
        }
        DynamicsData::Taiji => {
            let net = Network::mlp(&parse_arch(&a.arch)?, Activation::Sigmoid, Activation::Sigmoid)?;
            (net, gen_taiji(TaiJiSpec::TRAIN)?, taiji_config(a.seed, a.iters, "0.004", a.sigma)?)
        }
    };
    config.seed = a.seed;
    config.init = init;
    config.iterations = a.iters;
    config.schedule = match &a.lr_schedule {
        Some(s) => LrSchedule::parse(s, Some(a.iters))?,
        None => config.schedule.rescaled(a.iters)?,
    };
    let layers = analyzed_layers(&net);
    let (series, _) = entropy_dynamics(net, &data, &config, a.cadence, &layers, a.epsilon_rel)?;
    write_file(&a.out, series.to_csv().as_bytes())
}

fn cmd_raster(a: RasterArgs) -> Result<()> {
    let raster = match (&a.preset, &a.network) {
        (Some(name), None) => raster_neuron(&name.parse::<NeuronPreset>()?.neuron(), a.resolution)?,
        (None, Some(path)) => {
            let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let net = value.get("network").cloned().unwrap_or(value);
            raster_network(&serde_json::from_value::<Network>(net)?, a.resolution)?
        }
        _ => return Err(Error::InvalidParameter("give exactly one of --preset or --network".into())),
    };
    write_file(&a.out, &raster.to_pgm())
}

fn cmd_mnist_spectrum(a: MnistArgs) -> Result<()> {
    let mut config = MnistConfig::desk(a.seed);
    config.net.kernels = a.mnist.kernels;
    config.train_limit = a.mnist.train_limit;
    config.test_limit = a.mnist.test_limit;
    config.include_dense = a.include_dense;
    config.epsilon_rel = a.epsilon_rel;
    config.train.iterations = a.iters;
    config.train.schedule = match &a.lr_schedule {
        Some(s) => LrSchedule::parse(s, Some(a.iters))?,
        None => config.train.schedule.rescaled(a.iters)?,
    };
    let (train_set, test_set) = mnist_data(&a.mnist)?;
    let (_, report) = run_mnist(&config, &train_set, &test_set)?;
    write_file(&a.out, histogram_csv(&report.histograms).as_bytes())?;
    if let Some(path) = &a.report {
        write_json(path, &report)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenTaiji(a) => write_file(&a.out, points_csv(&gen_taiji(TaiJiSpec { reciprocal: a.reciprocal })?).as_bytes()),
        Command::Train(a) => cmd_train(a),
        Command::Survey(a) => cmd_survey(a),
        Command::SharpVsFlat(a) => cmd_sharp_vs_flat(a),
        Command::EntropyDynamics(a) => cmd_entropy_dynamics(a),
        Command::Raster(a) => cmd_raster(a),
        Command::MnistSpectrum(a) => cmd_mnist_spectrum(a),
    }
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let msg = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            eprintln!("error kind=usage msg={:?}", one_line(msg.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error kind={} msg={:?}", e.code(), one_line(&e.to_string()));
            ExitCode::FAILURE
        }
    }
}
