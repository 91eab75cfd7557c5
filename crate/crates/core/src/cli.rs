//! The `slicedw` command line: estimate, diagnostics, convergence, timing and
//! generate subcommands.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{
    format_summary, run_convergence, run_timing, summarize, write_records, write_summary,
    ExperimentConfig, MethodSpec, Reference, ResultRecord, Scenario, REFERENCE_PROJECTIONS,
};
use crate::datagen::{gen_ar1, gen_factors, Ar1Config, Ar1Noise, FactorConfig, FactorFamily, Role};
use crate::error::{Error, Result};
use crate::estimators::{
    autocov_decay, gaussian_gap_bound, indep_bound, max_coordinate_variances, moment_stats,
    monte_carlo_sw_pp, sw_closed_form_fitted, sw_hat, weakdep_bound, xi_d, EmpiricalDistribution,
    PairBudget, ProjectionLaw, SwEstimate,
};
use crate::io::{read_dataset, write_dataset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SW_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "slicedw",
    version,
    about = "Sliced-Wasserstein distances: Monte Carlo, closed forms and a deterministic approximation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate SW between two CSV datasets and print one CSV row:
    /// method,value_sq,value,num_projections,wall_time_ns
    Estimate(EstimateArgs),
    /// Print moment statistics, projection non-Gaussianity and error bounds as key=value lines
    Diagnostics(DiagnosticsArgs),
    /// Error of the moment approximation against a reference as the dimension grows
    Convergence(ConvergenceArgs),
    /// Accuracy and wall time of the deterministic estimator against Monte Carlo
    Timing(TimingArgs),
    /// Write a synthetic dataset as CSV
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Moment-based approximation (order 2 only)
    Deterministic,
    /// Monte Carlo with directions uniform on the sphere
    McSphere,
    /// Monte Carlo with N(0, I/d) directions
    McGaussian,
    /// Exact SW between isotropic Gaussians fitted to each dataset (order 2 only)
    ClosedFormGauss,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// First dataset (CSV, one sample per row)
    pub first: PathBuf,
    /// Second dataset (CSV, same number of columns)
    pub second: PathBuf,
    #[arg(long, value_enum, default_value = "deterministic")]
    pub method: MethodArg,
    /// Number of random projections for Monte Carlo methods
    #[arg(long = "L", visible_alias = "projections", default_value_t = 1000,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub projections: u64,
    /// Order of the distance; values other than 2 need a Monte Carlo method
    #[arg(long = "p", visible_alias = "order", default_value_t = 2.0)]
    pub p: f64,
    /// Seed of the projection directions
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Input files start with a header row
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairBudgetArg {
    All,
    Pairs(u64),
}

fn parse_pair_budget(s: &str) -> std::result::Result<PairBudgetArg, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(PairBudgetArg::All);
    }
    match s.parse::<u64>() {
        Ok(0) => Err("pair budget must be at least 1".into()),
        Ok(k) => Ok(PairBudgetArg::Pairs(k)),
        Err(_) => Err(format!("expected a positive integer or `all`, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct DiagnosticsArgs {
    /// Dataset (CSV, one sample per row)
    pub input: PathBuf,
    /// Optional second dataset; adds the combined approximation-error bound
    pub second: Option<PathBuf>,
    /// Ordered pairs used for the inner-product moments: an integer or `all`.
    /// Default: all pairs up to 4000 samples, 10^7 sampled pairs above
    #[arg(long, value_parser = parse_pair_budget)]
    pub pair_budget: Option<PairBudgetArg>,
    /// Largest lag of the coordinate autocovariance profile (capped at d - 1)
    #[arg(long, default_value_t = 10)]
    pub max_lag: usize,
    /// Seed of the pair sampler
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Input files start with a header row
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    GaussianNoncentered,
    GaussianCentered,
    GammaNoncentered,
    GammaCentered,
    Ar1Gaussian,
    Ar1StudentT,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::GaussianNoncentered => Scenario::GaussianNonCentered,
            ScenarioArg::GaussianCentered => Scenario::GaussianCentered,
            ScenarioArg::GammaNoncentered => Scenario::GammaNonCentered,
            ScenarioArg::GammaCentered => Scenario::GammaCentered,
            ScenarioArg::Ar1Gaussian => Scenario::Ar1Gaussian,
            ScenarioArg::Ar1StudentT => Scenario::Ar1StudentT,
        }
    }
}

/// Flags shared by the two experiment subcommands.
#[derive(Debug, Args)]
pub struct GridArgs {
    /// Comma-separated, strictly increasing dimensions [default: 10,32,100,316,1000]
    #[arg(long = "d", value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..))]
    pub d: Option<Vec<u64>>,
    /// Samples per dataset [default: 2000, or 10000 with --paper-scale]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    /// Independent runs per dimension [default: 20, or 100 with --paper-scale]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: Option<u64>,
    /// Master seed; every record is a function of it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Full-size runs: n = 10000, 100 runs, AR(1) burn-in 10000
    #[arg(long = "paper-scale")]
    pub full_scale: bool,
    /// AR(1) burn-in steps [default: 1000, or 10000 with --paper-scale]
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Records CSV; the summary goes next to it with a `.summary.csv` suffix
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    /// Comma-separated AR(1) coefficients in [0, 1) [default: 0.2,0.5,0.8]
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Projections of the Monte Carlo reference where no closed form exists
    #[arg(long, default_value_t = REFERENCE_PROJECTIONS as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub reference_l: u64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    /// Comma-separated Monte Carlo projection counts
    #[arg(long = "L", visible_alias = "projections", value_delimiter = ',',
          default_value = "100,1000,5000", value_parser = clap::value_parser!(u64).range(1..))]
    pub projections: Vec<u64>,
    /// Projections of the Monte Carlo reference
    #[arg(long, default_value_t = REFERENCE_PROJECTIONS as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub reference_l: u64,
    /// Timed repetitions per estimator call; the median is recorded
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub repetitions: u64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Independent N(m_j, sigma²) coordinates
    Gaussian,
    /// Independent Gamma(k_j, scale) coordinates
    Gamma,
    /// AR(1) trajectories with N(0, 1) innovations
    Ar1Gaussian,
    /// AR(1) trajectories with Student-t(10) innovations
    Ar1StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    First,
    Second,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Hyperparameter set of factor families
    #[arg(long, value_enum, default_value = "first")]
    pub role: RoleArg,
    /// Dimension
    #[arg(long = "d", value_parser = clap::value_parser!(u64).range(1..))]
    pub d: u64,
    /// Number of samples
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Subtract the empirical mean (factor families)
    #[arg(long)]
    pub centered: bool,
    /// AR(1) coefficient in [0, 1)
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// AR(1) burn-in steps
    #[arg(long, default_value_t = crate::datagen::DEFAULT_BURN_IN)]
    pub burn_in: usize,
    /// Output CSV
    #[arg(long)]
    pub out: PathBuf,
    /// Write a header row x1,...,xd
    #[arg(long)]
    pub header: bool,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(msg) = check_usage(&cli) {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

/// Flag combinations clap cannot express.
fn check_usage(cli: &Cli) -> std::result::Result<(), String> {
    if let Command::Estimate(a) = &cli.command {
        if !(a.p.is_finite() && a.p >= 1.0) {
            return Err(format!("--p must be a finite number >= 1, got {}", a.p));
        }
        let monte_carlo = matches!(a.method, MethodArg::McSphere | MethodArg::McGaussian);
        if !monte_carlo && a.p != 2.0 {
            return Err("--p other than 2 needs --method mc-sphere or mc-gaussian".into());
        }
    }
    Ok(())
}

fn threads_from_env() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            )),
        },
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    if let Some(k) = threads_from_env()? {
        // Fails only if a global pool already exists, which then stays in use.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::Diagnostics(a) => cmd_diagnostics(a, out),
        Command::Convergence(a) => cmd_convergence(a, out),
        Command::Timing(a) => cmd_timing(a, out),
        Command::Generate(a) => cmd_generate(a),
    }
}

fn stdout_error(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn cmd_estimate(a: &EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let x = read_dataset(&a.first, a.header)?;
    let y = read_dataset(&a.second, a.header)?;
    let law = match a.method {
        MethodArg::McSphere => Some(ProjectionLaw::SphereUniform),
        MethodArg::McGaussian => Some(ProjectionLaw::GaussianGammaD),
        _ => None,
    };
    let est: SwEstimate = match (a.method, law) {
        (_, Some(law)) => {
            monte_carlo_sw_pp(&x, &y, a.projections as usize, a.p, law, a.seed)?.estimate
        }
        (MethodArg::ClosedFormGauss, _) => sw_closed_form_fitted(&x, &y)?,
        _ => sw_hat(&x, &y)?,
    };
    writeln!(
        out,
        "{},{},{},{},{}",
        est.method,
        est.value_sq,
        est.value_sq.max(0.0).powf(1.0 / a.p),
        est.num_projections,
        est.wall_time_ns
    )
    .map_err(stdout_error)
}

fn pair_budget(arg: Option<PairBudgetArg>, n: usize, seed: u64) -> PairBudget {
    match arg {
        None => PairBudget::auto(n, seed),
        Some(PairBudgetArg::All) => PairBudget::All,
        Some(PairBudgetArg::Pairs(pairs)) => PairBudget::Sampled { pairs, seed },
    }
}

fn diagnostics_lines(
    mu: &EmpiricalDistribution,
    budget: PairBudget,
    max_lag: usize,
) -> Result<(Vec<(String, String)>, crate::estimators::MomentStats)> {
    let stats = moment_stats(mu, budget)?;
    let d = mu.dim();
    let mut lines = vec![
        ("n".to_string(), mu.n().to_string()),
        ("d".to_string(), d.to_string()),
        ("m2_raw".to_string(), stats.m2_raw.to_string()),
        ("m2_raw/d".to_string(), stats.m2_normalized().to_string()),
        ("mean_norm".to_string(), stats.mean_norm().to_string()),
        ("alpha".to_string(), stats.alpha.to_string()),
        ("beta1".to_string(), stats.beta1.to_string()),
        ("beta2".to_string(), stats.beta2.to_string()),
        ("pairs_used".to_string(), stats.pair_count_used.to_string()),
        ("xi_d".to_string(), xi_d(&stats).to_string()),
    ];
    let profile = autocov_decay(mu, max_lag.min(d - 1))?;
    for ((k, c), c2) in profile.lags.iter().zip(&profile.cov).zip(&profile.cov_sq) {
        lines.push((format!("autocov_lag{k}"), c.to_string()));
        lines.push((format!("autocov_sq_lag{k}"), c2.to_string()));
    }
    let (max_var, max_var_sq) = max_coordinate_variances(mu);
    lines.push((
        "indep_bound".into(),
        indep_bound(d, max_var, max_var_sq).to_string(),
    ));
    lines.push((
        "weakdep_bound".into(),
        weakdep_bound(d, &profile.weakdep_params()).to_string(),
    ));
    Ok((lines, stats))
}

fn cmd_diagnostics(a: &DiagnosticsArgs, out: &mut dyn Write) -> Result<()> {
    let mu = read_dataset(&a.input, a.header)?;
    let (lines, stats) =
        diagnostics_lines(&mu, pair_budget(a.pair_budget, mu.n(), a.seed), a.max_lag)?;
    let mut write = |k: &str, v: &str| writeln!(out, "{k}={v}").map_err(stdout_error);
    if let Some(second) = &a.second {
        let nu = read_dataset(second, a.header)?;
        mu.check_same_dim(&nu)?;
        let (lines_nu, stats_nu) =
            diagnostics_lines(&nu, pair_budget(a.pair_budget, nu.n(), a.seed), a.max_lag)?;
        for (k, v) in &lines {
            write(&format!("first.{k}"), v)?;
        }
        for (k, v) in &lines_nu {
            write(&format!("second.{k}"), v)?;
        }
        write(
            "gap_bound",
            &gaussian_gap_bound(&stats, &stats_nu)?.to_string(),
        )?;
    } else {
        for (k, v) in &lines {
            write(k, v)?;
        }
    }
    Ok(())
}

fn apply_grid(cfg: &mut ExperimentConfig, g: &GridArgs) -> Result<()> {
    if let Some(d) = &g.d {
        cfg.d_grid = d.iter().map(|&v| v as usize).collect();
    }
    if let Some(n) = g.n {
        cfg.n = n as usize;
    }
    if let Some(runs) = g.runs {
        cfg.runs = runs as usize;
    }
    if let Some(b) = g.burn_in {
        cfg.burn_in = b;
    }
    cfg.master_seed = g.seed;
    cfg.workers = threads_from_env()
        .map_err(Error::InvalidConfig)?
        .unwrap_or(0);
    cfg.validate()
}

/// `results.csv` → `results.summary.csv`.
pub fn summary_path(records: &Path) -> PathBuf {
    let stem = records
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "records".into());
    records.with_file_name(format!("{stem}.summary.csv"))
}

fn metadata(cfg: &ExperimentConfig, kind: &str) -> Vec<String> {
    let reference = match cfg.reference {
        Reference::ClosedForm => "closed-form".to_string(),
        Reference::MonteCarlo { projections } => format!("mc-sphere-L{projections}"),
    };
    vec![format!(
        "{kind} scenario={} n={} runs={} master_seed={} reference={reference} burn_in={}; \
         factor hyperparameters are regenerated for every run",
        cfg.scenario, cfg.n, cfg.runs, cfg.master_seed, cfg.burn_in
    )]
}

fn finish(
    cfg: &ExperimentConfig,
    kind: &str,
    records: &[ResultRecord],
    path: &Path,
    out: &mut dyn Write,
) -> Result<()> {
    let rows = summarize(records)?;
    write_records(path, records, &metadata(cfg, kind))?;
    write_summary(&summary_path(path), &rows)?;
    format_summary(out, &rows).map_err(stdout_error)
}

fn cmd_convergence(a: &ConvergenceArgs, out: &mut dyn Write) -> Result<()> {
    let scenario = Scenario::from(a.scenario);
    let mut cfg = if a.grid.full_scale {
        ExperimentConfig::full_scale(scenario)
    } else {
        ExperimentConfig::desk(scenario)
    };
    if let Some(alpha) = &a.alpha {
        cfg.alpha_list = alpha.clone();
    }
    if let Reference::MonteCarlo { .. } = cfg.reference {
        cfg.reference = Reference::MonteCarlo {
            projections: a.reference_l as usize,
        };
    }
    apply_grid(&mut cfg, &a.grid)?;
    let records = run_convergence(&cfg)?;
    finish(&cfg, "convergence", &records, &a.grid.out, out)
}

fn cmd_timing(a: &TimingArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = if a.grid.full_scale {
        ExperimentConfig::timing_full_scale()
    } else {
        ExperimentConfig::timing_desk()
    };
    cfg.methods = std::iter::once(MethodSpec::Deterministic)
        .chain(a.projections.iter().map(|&l| MethodSpec::MonteCarlo {
            law: ProjectionLaw::SphereUniform,
            projections: l as usize,
        }))
        .collect();
    cfg.reference = Reference::MonteCarlo {
        projections: a.reference_l as usize,
    };
    cfg.timing_repetitions = a.repetitions as usize;
    apply_grid(&mut cfg, &a.grid)?;
    let records = run_timing(&cfg)?;
    finish(&cfg, "timing", &records, &a.grid.out, out)
}

fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let (dim, n) = (a.d as usize, a.n as usize);
    let role = match a.role {
        RoleArg::First => Role::First,
        RoleArg::Second => Role::Second,
    };
    let factor = |family| FactorConfig {
        dim,
        n,
        family,
        centered: a.centered,
        role,
        seed: a.seed,
    };
    let ar1 = |noise| Ar1Config {
        dim,
        n,
        alpha: a.alpha,
        noise,
        burn_in: a.burn_in,
        seed: a.seed,
    };
    let mu = match a.family {
        FamilyArg::Gaussian => gen_factors(&factor(FactorFamily::GaussianFactors))?,
        FamilyArg::Gamma => gen_factors(&factor(FactorFamily::GammaFactors))?,
        FamilyArg::Ar1Gaussian => gen_ar1(&ar1(Ar1Noise::Gaussian01))?,
        FamilyArg::Ar1StudentT => gen_ar1(&ar1(Ar1Noise::StudentT10))?,
    };
    write_dataset(&a.out, &mu, a.header)
}
