//! `polesim`: seeded command-line runner for the pole-placement experiments.
//!
//! Every subcommand is deterministic in `(flags, seed)`: serial reruns are
//! byte-identical, and `--jobs N` only changes the order of a commutative
//! reduction (means agree to ~1e-12 relative). Experiment subcommands accept
//! a JSON `--config` file whose keys match the flag names; explicit flags
//! override file values, and unknown or inapplicable keys are rejected
//! before any work starts.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use polesim_core::{
    aic_optimal_order, build_gram, higher_order, interconnected, project, projection_scaling,
    results_to_csv, results_to_json, sample_poles, sequence_scaling, train_test, ExperimentResult,
    MonteCarloConfig, OptimalPoleDistribution, Pole, PoleSet, ReservoirKind, SamplerKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(
    name = "polesim",
    version,
    about = "Linear echo state networks approximating IIR systems: pole \
             densities, projection errors, and Monte-Carlo loss experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the optimal pole density over the design interval.
    Pdf(PdfArgs),
    /// Draw reservoir poles from one of the samplers.
    Sample(SampleArgs),
    /// Project a first-order target onto an explicit pole set.
    Project(ProjectArgs),
    /// Projection-error scaling over reservoir sizes (Monte-Carlo).
    Scaling(ScalingArgs),
    /// Sequence-approximation error scaling (Monte-Carlo).
    Sequence(SequenceArgs),
    /// Finite-sample train/test losses with diagonal reservoirs.
    TrainTest(TrainTestArgs),
    /// Finite-sample losses with randomly interconnected reservoirs.
    Interconnected(InterconnectedArgs),
    /// Train/test losses for order-K all-pole targets.
    HigherOrder(HigherOrderArgs),
    /// Reservoir size minimizing the AIC surrogate for a training budget.
    Aic(AicArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SamplerArg {
    /// Edge-concentrating density (1/C)/(1 - beta^2).
    Optimal,
    /// Uniform on the design interval.
    Uniform,
    /// Deterministic evenly spaced poles.
    Grid,
}

impl From<SamplerArg> for SamplerKind {
    fn from(arg: SamplerArg) -> Self {
        match arg {
            SamplerArg::Optimal => SamplerKind::Optimal,
            SamplerArg::Uniform => SamplerKind::Uniform,
            SamplerArg::Grid => SamplerKind::Grid,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FormatArg {
    Csv,
    Json,
}

/// Flags shared by every experiment subcommand.
#[derive(Args)]
struct CommonArgs {
    /// Reservoir sizes M to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
    sizes: Vec<usize>,
    /// Design range: targets and poles live in (-alpha0, alpha0).
    #[arg(long, default_value_t = 0.95)]
    alpha0: f64,
    /// Base seed; every trial derives its own substreams from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for Monte-Carlo trials (1 = serial).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output file (standard output when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// JSON config file; keys match flag names, flags override the file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    /// Monte-Carlo trials per reservoir size.
    #[arg(long, default_value_t = 2000)]
    n_sim: usize,
    /// Pole sampler.
    #[arg(long, value_enum, default_value_t = SamplerArg::Optimal)]
    sampler: SamplerArg,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SequenceArgs {
    /// Monte-Carlo trials per reservoir size.
    #[arg(long, default_value_t = 2000)]
    n_sim: usize,
    /// Samples per sequence (L).
    #[arg(long, default_value_t = 1000)]
    length: usize,
    /// Pole sampler.
    #[arg(long, value_enum, default_value_t = SamplerArg::Optimal)]
    sampler: SamplerArg,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct TrainTestArgs {
    /// Monte-Carlo trials per reservoir size.
    #[arg(long, default_value_t = 500)]
    n_sim: usize,
    /// Samples per sequence (L).
    #[arg(long, default_value_t = 500)]
    length: usize,
    /// Training sequences per trial (N_p).
    #[arg(long, default_value_t = 1)]
    np: usize,
    /// Test sequences per trial (N_d).
    #[arg(long, default_value_t = 10)]
    nd: usize,
    /// Pole sampler.
    #[arg(long, value_enum, default_value_t = SamplerArg::Optimal)]
    sampler: SamplerArg,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct InterconnectedArgs {
    /// Monte-Carlo trials per reservoir size.
    #[arg(long, default_value_t = 500)]
    n_sim: usize,
    /// Samples per sequence (L).
    #[arg(long, default_value_t = 500)]
    length: usize,
    /// Training sequences per trial (N_p).
    #[arg(long, default_value_t = 1)]
    np: usize,
    /// Test sequences per trial (N_d).
    #[arg(long, default_value_t = 10)]
    nd: usize,
    /// Probability of zeroing each reservoir connection.
    #[arg(long, default_value_t = 0.2)]
    kappa: f64,
    /// Spectral radius the dense reservoir is rescaled to.
    #[arg(long, default_value_t = 0.95)]
    radius: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct HigherOrderArgs {
    /// Monte-Carlo trials per reservoir size.
    #[arg(long, default_value_t = 2000)]
    n_sim: usize,
    /// Samples per sequence (L).
    #[arg(long, default_value_t = 10)]
    length: usize,
    /// Training sequences per trial (N_p).
    #[arg(long, default_value_t = 1)]
    np: usize,
    /// Test sequences per trial (N_d).
    #[arg(long, default_value_t = 10)]
    nd: usize,
    /// Denominator order K of the target system.
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Pole sampler.
    #[arg(long, value_enum, default_value_t = SamplerArg::Optimal)]
    sampler: SamplerArg,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct PdfArgs {
    /// Design range: the density lives on (-alpha0, alpha0).
    #[arg(long, default_value_t = 0.95)]
    alpha0: f64,
    /// Number of evenly spaced interior evaluation points.
    #[arg(long, default_value_t = 1001)]
    points: usize,
    /// Output file (standard output when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct SampleArgs {
    /// Pole sampler.
    #[arg(long, value_enum, default_value_t = SamplerArg::Optimal)]
    sampler: SamplerArg,
    /// Number of poles to draw.
    #[arg(long, default_value_t = 64)]
    count: usize,
    /// Design range: poles live in (-alpha0, alpha0).
    #[arg(long, default_value_t = 0.95)]
    alpha0: f64,
    /// Seed for the draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (standard output when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct ProjectArgs {
    /// Reservoir poles, comma separated, each inside (-1, 1).
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    poles: Vec<f64>,
    /// Target pole inside (-1, 1).
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Output file (standard output when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct AicArgs {
    /// Training sequence budget (N_p).
    #[arg(long, default_value_t = 1)]
    np: usize,
    /// Output file (standard output when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Config-file document. One struct covers every experiment subcommand;
/// keys that do not correspond to a flag of the invoked subcommand are
/// rejected by `reject_inapplicable`.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    n_sim: Option<usize>,
    sizes: Option<Vec<usize>>,
    alpha0: Option<f64>,
    length: Option<usize>,
    np: Option<usize>,
    nd: Option<usize>,
    sampler: Option<SamplerArg>,
    order: Option<usize>,
    kappa: Option<f64>,
    radius: Option<f64>,
    seed: Option<u64>,
    jobs: Option<usize>,
    output: Option<PathBuf>,
    format: Option<FormatArg>,
}

impl FileConfig {
    fn load(path: Option<&PathBuf>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    /// Errors on any set key outside the invoked subcommand's flag set.
    fn reject_inapplicable(&self, applicable: &[&str]) -> Result<(), String> {
        let present: Vec<(&str, bool)> = vec![
            ("n-sim", self.n_sim.is_some()),
            ("sizes", self.sizes.is_some()),
            ("alpha0", self.alpha0.is_some()),
            ("length", self.length.is_some()),
            ("np", self.np.is_some()),
            ("nd", self.nd.is_some()),
            ("sampler", self.sampler.is_some()),
            ("order", self.order.is_some()),
            ("kappa", self.kappa.is_some()),
            ("radius", self.radius.is_some()),
            ("seed", self.seed.is_some()),
            ("jobs", self.jobs.is_some()),
            ("output", self.output.is_some()),
            ("format", self.format.is_some()),
        ];
        for (key, set) in present {
            if set && !applicable.contains(&key) {
                return Err(format!(
                    "config key \"{key}\" does not apply to this subcommand"
                ));
            }
        }
        Ok(())
    }
}

/// True when the flag was typed on the command line (as opposed to filled
/// in from its default), so it must override the config file.
fn set_on_cli(matches: &ArgMatches, id: &str) -> bool {
    matches.value_source(id) == Some(ValueSource::CommandLine)
}

/// File value wins only where the flag was left at its default.
fn merge<T>(slot: &mut T, file: Option<T>, matches: &ArgMatches, id: &str) {
    if !set_on_cli(matches, id) {
        if let Some(value) = file {
            *slot = value;
        }
    }
}

fn merge_common(common: &mut CommonArgs, file: &mut FileConfig, matches: &ArgMatches) {
    merge(&mut common.sizes, file.sizes.take(), matches, "sizes");
    merge(&mut common.alpha0, file.alpha0.take(), matches, "alpha0");
    merge(&mut common.seed, file.seed.take(), matches, "seed");
    merge(&mut common.jobs, file.jobs.take(), matches, "jobs");
    merge(&mut common.format, file.format.take(), matches, "format");
    if !set_on_cli(matches, "output") && common.output.is_none() {
        common.output = file.output.take();
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = Cli::from_arg_matches(&matches).expect("clap validated the matches");
    let (_, sub) = matches.subcommand().expect("subcommand is required");
    match run(cli.command, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, matches: &ArgMatches) -> Result<(), String> {
    match command {
        Command::Pdf(args) => run_pdf(args),
        Command::Sample(args) => run_sample(args),
        Command::Project(args) => run_project(args),
        Command::Scaling(args) => run_scaling(args, matches),
        Command::Sequence(args) => run_sequence(args, matches),
        Command::TrainTest(args) => run_train_test(args, matches),
        Command::Interconnected(args) => run_interconnected(args, matches),
        Command::HigherOrder(args) => run_higher_order(args, matches),
        Command::Aic(args) => run_aic(args),
    }
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<(), String> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// 17 significant digits: enough to round-trip any f64 exactly.
fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_results(results: &[&ExperimentResult], format: FormatArg) -> String {
    match format {
        FormatArg::Csv => results_to_csv(results.iter().copied()),
        FormatArg::Json => results_to_json(results.iter().copied()),
    }
}

/// Runs the experiment inside a dedicated thread pool of `jobs` workers
/// (1 = serial) so the flag controls parallelism regardless of machine.
fn with_pool<T>(
    jobs: usize,
    work: impl FnOnce() -> polesim_core::Result<T> + Send,
) -> Result<T, String>
where
    T: Send,
{
    if jobs == 0 {
        return Err("--jobs must be positive".to_string());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| format!("cannot build a {jobs}-thread pool: {e}"))?;
    pool.install(work).map_err(|e| e.to_string())
}

fn run_one(
    cfg: MonteCarloConfig,
    common: &CommonArgs,
    experiment: impl FnOnce(&MonteCarloConfig) -> polesim_core::Result<ExperimentResult> + Send,
) -> Result<(), String> {
    cfg.validate().map_err(|e| e.to_string())?;
    let result = with_pool(common.jobs, || experiment(&cfg))?;
    write_output(
        common.output.as_ref(),
        &render_results(&[&result], common.format),
    )
}

fn run_pair(
    cfg: MonteCarloConfig,
    common: &CommonArgs,
    experiment: impl FnOnce(&MonteCarloConfig) -> polesim_core::Result<(ExperimentResult, ExperimentResult)>
        + Send,
) -> Result<(), String> {
    cfg.validate().map_err(|e| e.to_string())?;
    let (train, test) = with_pool(common.jobs, || experiment(&cfg))?;
    write_output(
        common.output.as_ref(),
        &render_results(&[&train, &test], common.format),
    )
}

fn run_scaling(mut args: ScalingArgs, matches: &ArgMatches) -> Result<(), String> {
    let mut file = FileConfig::load(args.common.config.as_ref())?;
    file.reject_inapplicable(&[
        "n-sim", "sizes", "alpha0", "sampler", "seed", "jobs", "output", "format",
    ])?;
    merge(&mut args.n_sim, file.n_sim.take(), matches, "n_sim");
    merge(&mut args.sampler, file.sampler.take(), matches, "sampler");
    merge_common(&mut args.common, &mut file, matches);
    let cfg = MonteCarloConfig {
        n_sim: args.n_sim,
        reservoir_sizes: args.common.sizes.clone(),
        alpha0: args.common.alpha0,
        sampler: args.sampler.into(),
        base_seed: args.common.seed,
        ..MonteCarloConfig::default()
    };
    run_one(cfg, &args.common, projection_scaling)
}

fn run_sequence(mut args: SequenceArgs, matches: &ArgMatches) -> Result<(), String> {
    let mut file = FileConfig::load(args.common.config.as_ref())?;
    file.reject_inapplicable(&[
        "n-sim", "length", "sizes", "alpha0", "sampler", "seed", "jobs", "output", "format",
    ])?;
    merge(&mut args.n_sim, file.n_sim.take(), matches, "n_sim");
    merge(&mut args.length, file.length.take(), matches, "length");
    merge(&mut args.sampler, file.sampler.take(), matches, "sampler");
    merge_common(&mut args.common, &mut file, matches);
    let cfg = MonteCarloConfig {
        n_sim: args.n_sim,
        reservoir_sizes: args.common.sizes.clone(),
        alpha0: args.common.alpha0,
        sequence_length: args.length,
        sampler: args.sampler.into(),
        base_seed: args.common.seed,
        ..MonteCarloConfig::default()
    };
    run_one(cfg, &args.common, sequence_scaling)
}

fn run_train_test(mut args: TrainTestArgs, matches: &ArgMatches) -> Result<(), String> {
    let mut file = FileConfig::load(args.common.config.as_ref())?;
    file.reject_inapplicable(&[
        "n-sim", "length", "np", "nd", "sizes", "alpha0", "sampler", "seed", "jobs", "output",
        "format",
    ])?;
    merge(&mut args.n_sim, file.n_sim.take(), matches, "n_sim");
    merge(&mut args.length, file.length.take(), matches, "length");
    merge(&mut args.np, file.np.take(), matches, "np");
    merge(&mut args.nd, file.nd.take(), matches, "nd");
    merge(&mut args.sampler, file.sampler.take(), matches, "sampler");
    merge_common(&mut args.common, &mut file, matches);
    let cfg = MonteCarloConfig {
        n_sim: args.n_sim,
        reservoir_sizes: args.common.sizes.clone(),
        alpha0: args.common.alpha0,
        sequence_length: args.length,
        n_train_sequences: args.np,
        n_test_sequences: args.nd,
        sampler: args.sampler.into(),
        base_seed: args.common.seed,
        ..MonteCarloConfig::default()
    };
    run_pair(cfg, &args.common, train_test)
}

fn run_interconnected(mut args: InterconnectedArgs, matches: &ArgMatches) -> Result<(), String> {
    let mut file = FileConfig::load(args.common.config.as_ref())?;
    file.reject_inapplicable(&[
        "n-sim", "length", "np", "nd", "kappa", "radius", "sizes", "alpha0", "seed", "jobs",
        "output", "format",
    ])?;
    merge(&mut args.n_sim, file.n_sim.take(), matches, "n_sim");
    merge(&mut args.length, file.length.take(), matches, "length");
    merge(&mut args.np, file.np.take(), matches, "np");
    merge(&mut args.nd, file.nd.take(), matches, "nd");
    merge(&mut args.kappa, file.kappa.take(), matches, "kappa");
    merge(&mut args.radius, file.radius.take(), matches, "radius");
    merge_common(&mut args.common, &mut file, matches);
    let cfg = MonteCarloConfig {
        n_sim: args.n_sim,
        reservoir_sizes: args.common.sizes.clone(),
        alpha0: args.common.alpha0,
        sequence_length: args.length,
        n_train_sequences: args.np,
        n_test_sequences: args.nd,
        reservoir: ReservoirKind::Dense {
            kappa: args.kappa,
            spectral_radius: args.radius,
        },
        base_seed: args.common.seed,
        ..MonteCarloConfig::default()
    };
    run_pair(cfg, &args.common, interconnected)
}

fn run_higher_order(mut args: HigherOrderArgs, matches: &ArgMatches) -> Result<(), String> {
    let mut file = FileConfig::load(args.common.config.as_ref())?;
    file.reject_inapplicable(&[
        "n-sim", "length", "np", "nd", "order", "sizes", "alpha0", "sampler", "seed", "jobs",
        "output", "format",
    ])?;
    merge(&mut args.n_sim, file.n_sim.take(), matches, "n_sim");
    merge(&mut args.length, file.length.take(), matches, "length");
    merge(&mut args.np, file.np.take(), matches, "np");
    merge(&mut args.nd, file.nd.take(), matches, "nd");
    merge(&mut args.order, file.order.take(), matches, "order");
    merge(&mut args.sampler, file.sampler.take(), matches, "sampler");
    merge_common(&mut args.common, &mut file, matches);
    let cfg = MonteCarloConfig {
        n_sim: args.n_sim,
        reservoir_sizes: args.common.sizes.clone(),
        alpha0: args.common.alpha0,
        sequence_length: args.length,
        n_train_sequences: args.np,
        n_test_sequences: args.nd,
        sampler: args.sampler.into(),
        target_order: args.order,
        base_seed: args.common.seed,
        ..MonteCarloConfig::default()
    };
    run_pair(cfg, &args.common, higher_order)
}

#[derive(Serialize)]
struct DensityPoint {
    beta: f64,
    density: f64,
}

fn run_pdf(args: PdfArgs) -> Result<(), String> {
    if args.points == 0 {
        return Err("--points must be positive".to_string());
    }
    let dist = OptimalPoleDistribution::new(args.alpha0).map_err(|e| e.to_string())?;
    let n = args.points;
    let rows: Vec<DensityPoint> = (1..=n)
        .map(|i| {
            let beta = -args.alpha0 + 2.0 * args.alpha0 * i as f64 / (n as f64 + 1.0);
            DensityPoint {
                beta,
                density: dist.pdf(beta),
            }
        })
        .collect();
    let content = match args.format {
        FormatArg::Csv => {
            let mut out = String::from("beta,density");
            for row in &rows {
                out.push('\n');
                out.push_str(&format!(
                    "{},{}",
                    csv_float(row.beta),
                    csv_float(row.density)
                ));
            }
            out.push('\n');
            out
        }
        FormatArg::Json => {
            let mut out = serde_json::to_string_pretty(&rows).expect("rows serialize");
            out.push('\n');
            out
        }
    };
    write_output(args.output.as_ref(), &content)
}

fn run_sample(args: SampleArgs) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let poles = sample_poles(args.sampler.into(), args.alpha0, args.count, &mut rng)
        .map_err(|e| e.to_string())?;
    let values: Vec<f64> = poles.iter().map(|p| p.value()).collect();
    let content = match args.format {
        FormatArg::Csv => {
            let mut out = String::from("beta");
            for v in &values {
                out.push('\n');
                out.push_str(&csv_float(*v));
            }
            out.push('\n');
            out
        }
        FormatArg::Json => {
            let mut out = serde_json::to_string_pretty(&values).expect("floats serialize");
            out.push('\n');
            out
        }
    };
    write_output(args.output.as_ref(), &content)
}

#[derive(Serialize)]
struct ProjectionReport {
    alpha: f64,
    error: f64,
    effective_rank: usize,
    rank_deficient: bool,
    poles: Vec<f64>,
    weights: Vec<f64>,
}

fn run_project(args: ProjectArgs) -> Result<(), String> {
    let alpha = Pole::new(args.alpha).map_err(|e| e.to_string())?;
    let poles: Vec<Pole> = args
        .poles
        .iter()
        .map(|&v| Pole::new(v))
        .collect::<polesim_core::Result<_>>()
        .map_err(|e| e.to_string())?;
    let set = PoleSet::new(poles).map_err(|e| e.to_string())?;
    let projection = project(&build_gram(&set, alpha));
    let report = ProjectionReport {
        alpha: alpha.value(),
        error: projection.error(),
        effective_rank: projection.effective_rank(),
        rank_deficient: projection.is_rank_deficient(),
        poles: set.poles().iter().map(|p| p.value()).collect(),
        weights: projection.weights().to_vec(),
    };
    let content = match args.format {
        FormatArg::Csv => {
            let mut out = String::from("alpha,pole,weight,error,effective_rank");
            for (pole, weight) in report.poles.iter().zip(&report.weights) {
                out.push('\n');
                out.push_str(&format!(
                    "{},{},{},{},{}",
                    csv_float(report.alpha),
                    csv_float(*pole),
                    csv_float(*weight),
                    csv_float(report.error),
                    report.effective_rank
                ));
            }
            out.push('\n');
            out
        }
        FormatArg::Json => {
            let mut out = serde_json::to_string_pretty(&report).expect("report serializes");
            out.push('\n');
            out
        }
    };
    write_output(args.output.as_ref(), &content)
}

fn run_aic(args: AicArgs) -> Result<(), String> {
    if args.np == 0 {
        return Err("--np must be positive".to_string());
    }
    let order = aic_optimal_order(args.np);
    write_output(args.output.as_ref(), &format!("{order}\n"))
}
