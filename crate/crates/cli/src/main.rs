use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wavechaos::graph_sim::NetworkSpec;
use wavechaos::rmt_mc::{AbsorptionMode, ChannelModel, EnsembleConfig};
use wavechaos::scattering_stats::{
    Bootstrap, ChannelHint, EstimatorConfig, EstimatorKind, FitConfig, KMode, Objective,
};
use wavechaos::Error;
use wavechaos_cli::{
    replay, run, AnalyzeRun, CliError, CommandConfig, CompareRun, Component, FitRun, GraphRun,
    InputKind, InputRef, RmtRun, TheoryRun,
};

#[derive(Parser)]
#[command(name = "wavechaos", version, about = "Chaotic two-port scattering laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frequency sweeps over phase-shifter realizations of a network.
    SimulateGraph(GraphArgs),
    /// Heidelberg-model S-matrix ensemble.
    SimulateRmt(RmtArgs),
    /// Exact K_ab marginal (and joint) density curves.
    Theory(TheoryArgs),
    /// K matrices, transmission, W and distributions of sample files.
    Analyze(AnalyzeArgs),
    /// Fit γ to the K_ab marginals.
    Fit(FitArgs),
    /// Overlay empirical K_ab against theory and its Gaussian approximation.
    Compare(CompareArgs),
    /// Rerun a manifest and check its outputs are byte-identical.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct Out {
    /// Output directory.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct GraphArgs {
    /// Built-in network: nine-vertex or hexagon.
    #[arg(long, conflicts_with = "network")]
    preset: Option<String>,
    /// Network config file (TOML).
    #[arg(long)]
    network: Option<PathBuf>,
    /// Defaults to 1500 (nine-vertex) or 983 (hexagon).
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 3.0)]
    f_min: f64,
    #[arg(long, default_value_t = 7.0)]
    f_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Replace circulators by 3-valent joints.
    #[arg(long)]
    no_circulators: bool,
    /// Uniform per-length loss in Np/m on every edge.
    #[arg(long)]
    loss: Option<f64>,
    #[command(flatten)]
    out: Out,
}

#[derive(Clone, Copy, ValueEnum)]
enum Absorption {
    Channels,
    UniformShift,
}

#[derive(Args)]
struct RmtArgs {
    /// gamma5.39 or gamma27.18; otherwise give --t-a, --t-b, --m, --t-c.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, requires_all = ["t_b", "m", "t_c"], conflicts_with = "preset")]
    t_a: Option<f64>,
    #[arg(long)]
    t_b: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    t_c: Option<f64>,
    #[arg(long, default_value_t = 2)]
    beta: u8,
    #[arg(long, default_value_t = 200)]
    n_dim: usize,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Energy window half-width as a fraction of the band half-width.
    #[arg(long, default_value_t = 0.05)]
    window: f64,
    #[arg(long, value_enum, default_value_t = Absorption::Channels)]
    absorption: Absorption,
    #[arg(long, default_value_t = 10_000)]
    pilot: usize,
    #[arg(long, default_value_t = 0.01)]
    calibration_tolerance: f64,
    #[arg(long)]
    no_calibration: bool,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long = "gamma", required = true, allow_negative_numbers = true)]
    gammas: Vec<f64>,
    #[arg(long, default_value_t = 801)]
    points: usize,
    #[arg(long)]
    joint_points: Option<usize>,
    #[command(flatten)]
    out: Out,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Raw,
    SubtractMean,
    CouplingNormalized,
}

impl From<Mode> for KMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Raw => KMode::Raw,
            Mode::SubtractMean => KMode::SubtractMean,
            Mode::CouplingNormalized => KMode::CouplingNormalized,
        }
    }
}

#[derive(Args)]
struct EstimatorArgs {
    /// Use a Gaussian kernel estimate instead of a histogram.
    #[arg(long)]
    kernel: bool,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    bandwidth: Option<f64>,
}

impl EstimatorArgs {
    fn config(&self) -> EstimatorConfig {
        EstimatorConfig {
            kind: if self.kernel { EstimatorKind::Kernel } else { EstimatorKind::Histogram },
            bins: self.bins,
            bandwidth: self.bandwidth,
            ..EstimatorConfig::default()
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Sample CSVs or Touchstone .s2p files (one realization each).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Raw)]
    k_mode: Mode,
    #[arg(long, default_value_t = 200)]
    resamples: usize,
    #[arg(long, default_value_t = Bootstrap::default().seed)]
    seed: u64,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[command(flatten)]
    out: Out,
}

#[derive(Clone, Copy, ValueEnum)]
enum Obj {
    Ks,
    Ise,
}

#[derive(Args)]
struct FitArgs {
    /// K samples from analyze, or S samples.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Raw)]
    k_mode: Mode,
    #[arg(long, value_enum, default_value_t = Obj::Ks)]
    objective: Obj,
    #[arg(long, requires_all = ["t_b", "m"])]
    t_a: Option<f64>,
    #[arg(long)]
    t_b: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, default_value_t = FitConfig::default().bounds.0)]
    min_gamma: f64,
    #[arg(long, default_value_t = FitConfig::default().bounds.1)]
    max_gamma: f64,
    #[arg(long, default_value_t = FitConfig::default().bootstrap.resamples)]
    resamples: usize,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[command(flatten)]
    out: Out,
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Re,
    Im,
    Pooled,
}

#[derive(Args)]
struct CompareArgs {
    /// K samples from analyze, or S samples.
    input: PathBuf,
    #[arg(long, required_unless_present = "theory_curve", conflicts_with = "theory_curve")]
    gamma: Option<f64>,
    /// A marginal curve CSV written by `theory`.
    #[arg(long)]
    theory_curve: Option<PathBuf>,
    /// Also compare against the variance-matched Gaussian.
    #[arg(long)]
    gaussian: bool,
    #[arg(long, value_enum, default_value_t = Part::Pooled)]
    component: Part,
    #[arg(long, value_enum, default_value_t = Mode::Raw)]
    k_mode: Mode,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct ReplayArgs {
    manifest: PathBuf,
    #[command(flatten)]
    out: Out,
}

fn graph_config(a: &GraphArgs) -> Result<CommandConfig, Error> {
    let mut cfg = match (&a.preset, &a.network) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let network = NetworkSpec::from_toml_str(&text).map_err(|e| match e {
                Error::Config { location, reason } => Error::Config {
                    location: format!("{}: {location}", path.display()),
                    reason,
                },
                other => other,
            })?;
            GraphRun {
                preset: None,
                network,
                realizations: 1500,
                seed: a.seed,
                f_min_ghz: 3.0,
                f_max_ghz: 7.0,
                points: 200,
            }
        }
        (Some(name), None) => GraphRun::from_preset(name, a.seed)?,
        (None, None) => GraphRun::from_preset("nine-vertex", a.seed)?,
    };
    if a.no_circulators {
        cfg.network = cfg.network.without_circulators();
    }
    if let Some(eta) = a.loss {
        cfg.network = cfg.network.with_uniform_loss(eta);
    }
    if let Some(n) = a.realizations {
        cfg.realizations = n;
    }
    cfg.f_min_ghz = a.f_min;
    cfg.f_max_ghz = a.f_max;
    cfg.points = a.points;
    Ok(CommandConfig::SimulateGraph(cfg))
}

fn rmt_config(a: &RmtArgs) -> Result<CommandConfig, Error> {
    let mut cfg = match (&a.preset, a.t_a) {
        (Some(name), _) => RmtRun::from_preset(name, a.beta, a.samples, a.seed)?,
        (None, Some(t_a)) => {
            let channels = ChannelModel::new(t_a, a.t_b.unwrap_or(t_a), a.m.unwrap_or(0), a.t_c.unwrap_or(0.0))?;
            RmtRun {
                preset: None,
                ensemble: EnsembleConfig::new(a.beta, channels, a.samples, a.seed),
            }
        }
        (None, None) => return Err(Error::invalid("channels", "give --preset or --t-a/--t-b/--m/--t-c")),
    };
    let e = &mut cfg.ensemble;
    e.n_dim = a.n_dim;
    e.energy_window = a.window;
    e.absorption = match a.absorption {
        Absorption::Channels => AbsorptionMode::Channels,
        Absorption::UniformShift => AbsorptionMode::UniformShift,
    };
    e.calibration.enabled = !a.no_calibration;
    e.calibration.pilot_samples = a.pilot;
    e.calibration.tolerance = a.calibration_tolerance;
    Ok(CommandConfig::SimulateRmt(cfg))
}

fn build(cmd: &Command) -> Result<CommandConfig, Error> {
    Ok(match cmd {
        Command::SimulateGraph(a) => graph_config(a)?,
        Command::SimulateRmt(a) => rmt_config(a)?,
        Command::Theory(a) => CommandConfig::Theory(TheoryRun {
            gammas: a.gammas.clone(),
            points: a.points,
            joint_points: a.joint_points,
        }),
        Command::Analyze(a) => CommandConfig::Analyze(AnalyzeRun {
            inputs: a
                .inputs
                .iter()
                .map(|p| InputRef::new(p, None))
                .collect::<Result<_, _>>()?,
            k_mode: a.k_mode.into(),
            estimator: a.estimator.config(),
            bootstrap: Bootstrap { resamples: a.resamples, seed: a.seed },
        }),
        Command::Fit(a) => CommandConfig::Fit(FitRun {
            input: InputRef::new(&a.input, Some(InputKind::Samples))?,
            k_mode: a.k_mode.into(),
            fit: FitConfig {
                objective: match a.objective {
                    Obj::Ks => Objective::Ks,
                    Obj::Ise => Objective::Ise,
                },
                bounds: (a.min_gamma, a.max_gamma),
                bootstrap: Bootstrap { resamples: a.resamples, ..FitConfig::default().bootstrap },
                channels: a.t_a.map(|t_a| ChannelHint {
                    t_a,
                    t_b: a.t_b.unwrap_or(t_a),
                    m: a.m.unwrap_or(100),
                }),
                ..FitConfig::default()
            },
            estimator: a.estimator.config(),
        }),
        Command::Compare(a) => CommandConfig::Compare(CompareRun {
            input: InputRef::new(&a.input, Some(InputKind::Samples))?,
            k_mode: a.k_mode.into(),
            component: match a.component {
                Part::Re => Component::Re,
                Part::Im => Component::Im,
                Part::Pooled => Component::Pooled,
            },
            gamma: a.gamma,
            theory_curve: a
                .theory_curve
                .as_ref()
                .map(|p| InputRef::new(p, Some(InputKind::Curve)))
                .transpose()?,
            gaussian: a.gaussian,
            estimator: a.estimator.config(),
        }),
        Command::Replay(_) => unreachable!("replay has no config"),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Replay(a) => replay(&a.manifest, &a.out.out).map(|r| {
            println!("replayed {}: {} outputs identical", r.original.command, r.original.outputs.len());
        }),
        other => build(other).map_err(CliError::from).and_then(|cfg| {
            let out = match other {
                Command::SimulateGraph(a) => &a.out.out,
                Command::SimulateRmt(a) => &a.out.out,
                Command::Theory(a) => &a.out.out,
                Command::Analyze(a) => &a.out.out,
                Command::Fit(a) => &a.out.out,
                Command::Compare(a) => &a.out.out,
                Command::Replay(a) => &a.out.out,
            };
            run(&cfg, out).map(|r| {
                for w in &r.manifest.warnings {
                    eprintln!("warning: {w}");
                }
                println!("{}", serde_json::to_string_pretty(&r.manifest.results).unwrap_or_default());
                for p in &r.written {
                    eprintln!("wrote {}", p.display());
                }
            })
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
