use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use refent::entropy::{mutual_information, petz_divergence, renyi_entropy, RenyiOrder};
use refent::prmi::{doubly_minimized_prmi, singly_minimized_prmi, AltMinOptions};
use refent::reflected::{cc_reflected, deflected, min_reflected, minimized_reflected, renyi_reflected, MinimizeOptions};
use refent::reproduce::{self, Target};
use refent::verify::{run_suite, ExtraState, SuiteConfig};
use refent::{BipartiteState, Pmf, Subsystem, ToleranceConfig};
use refent_cli::{format_significant, normalize_tol_flags, parse_dims, tolerance_config, CliError, CliResult, StateFile};

#[derive(Parser)]
#[command(name = "refent", version, about = "Reflected entropies and Petz Rényi mutual informations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure on a state file.
    Compute(ComputeArgs),
    /// Run the verification suite and emit a JSON-lines report.
    Verify(VerifyArgs),
    /// Write curve or scatter data as CSV.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Measure {
    RenyiEntropy,
    MutualInformation,
    PetzDivergence,
    PrmiSingle,
    PrmiDouble,
    Reflected,
    MinReflected,
    Deflected,
    MinimizedReflected,
    CcReflected,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    A,
    B,
    Ab,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(value_enum)]
    measure: Measure,
    /// State file (JSON).
    #[arg(long)]
    state: PathBuf,
    /// Second state for petz_divergence.
    #[arg(long)]
    sigma: Option<PathBuf>,
    /// Order α; accepts `inf`.
    #[arg(long, default_value = "1")]
    alpha: f64,
    /// Power applied to the state before purifying.
    #[arg(long, default_value = "1")]
    m: f64,
    /// Order n of the reflected entropies; accepts `inf`.
    #[arg(long, default_value = "1")]
    n: f64,
    /// Deflection parameter.
    #[arg(long, default_value = "0")]
    s: f64,
    /// Seed for optimizer restarts.
    #[arg(long)]
    seed: Option<u64>,
    /// Marginal for renyi_entropy.
    #[arg(long, value_enum, default_value = "ab")]
    system: System,
    /// Display in bits instead of nats.
    #[arg(long)]
    bits: bool,
    /// Tolerance override, also written `--tol.NAME VALUE`.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = SuiteConfig::default().master_seed)]
    seed: u64,
    /// Random states per dimension pair.
    #[arg(long, default_value_t = SuiteConfig::default().trials)]
    trials: usize,
    /// Dimension pairs such as `2x2,2x3`.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<String>,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra state files to validate.
    #[arg(long)]
    state: Vec<PathBuf>,
    /// Skip the commutant optimization checks on random states.
    #[arg(long)]
    fast: bool,
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// b9-curve, b3-crossing or theorem-scatter.
    target: String,
    /// CSV file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = SuiteConfig::default().master_seed)]
    seed: u64,
    #[arg(long, default_value_t = SuiteConfig::default().trials)]
    trials: usize,
    #[arg(long, value_delimiter = ',')]
    dims: Vec<String>,
}

fn order(x: f64) -> CliResult<RenyiOrder> {
    Ok(RenyiOrder::new(x)?)
}

/// Value plus provenance for one measure.
struct Computed {
    value: f64,
    route: &'static str,
    extra: Value,
}

fn computed(value: f64, route: &'static str) -> Computed {
    Computed {
        value,
        route,
        extra: json!({}),
    }
}

fn pmf_of(rho: &BipartiteState) -> CliResult<Pmf> {
    let m = rho.rho();
    let n = m.dim();
    let off = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .fold(0.0f64, |acc, (i, j)| acc.max(m[(i, j)].norm()));
    if off > 1e-12 {
        return Err(CliError::Usage(format!(
            "cc_reflected needs a diagonal state (largest off-diagonal entry {off:e})"
        )));
    }
    let values: Vec<f64> = (0..n).map(|i| m[(i, i)].re.max(0.0)).collect();
    let total: f64 = values.iter().sum();
    Ok(Pmf::new(rho.d_a(), rho.d_b(), values.iter().map(|v| v / total).collect())?)
}

fn compute(args: &ComputeArgs, cfg: &ToleranceConfig) -> CliResult<Computed> {
    let rho = StateFile::load(&args.state, cfg)?;
    Ok(match args.measure {
        Measure::RenyiEntropy => {
            let m = match args.system {
                System::A => rho.marginal(Subsystem::A),
                System::B => rho.marginal(Subsystem::B),
                System::Ab => rho.rho().clone(),
            };
            computed(renyi_entropy(&m, order(args.alpha)?, cfg)?, "spectrum")
        }
        Measure::MutualInformation => computed(mutual_information(&rho)?, "von Neumann entropies of the marginals"),
        Measure::PetzDivergence => {
            let path = args
                .sigma
                .as_ref()
                .ok_or_else(|| CliError::Usage("petz_divergence needs --sigma".into()))?;
            let sigma = StateFile::load(path, cfg)?;
            let d = petz_divergence(rho.rho(), sigma.rho(), order(args.alpha)?, cfg)?;
            computed(d.value(), "eigendecompositions with support branches")
        }
        Measure::PrmiSingle => computed(singly_minimized_prmi(&rho, args.alpha)?.value(), "closed-form optimal tau"),
        Measure::PrmiDouble => {
            let mut opts = AltMinOptions::default();
            if let Some(s) = args.seed {
                opts.restart_seed = s;
            }
            let r = doubly_minimized_prmi(&rho, args.alpha, &opts)?;
            Computed {
                value: r.value.value(),
                route: "alternating minimization",
                extra: json!({
                    "iterations": r.iterations,
                    "converged": r.converged,
                    "best_restart": r.best_restart,
                    "restarts": opts.restarts,
                }),
            }
        }
        Measure::Reflected => computed(
            renyi_reflected(&rho, args.m, order(args.n)?)?,
            "spectrum of the AA* marginal of the m-power state",
        ),
        Measure::MinReflected => computed(min_reflected(&rho)?, "largest eigenvalue of the AA* marginal"),
        Measure::Deflected => computed(
            deflected(&rho, args.s, order(args.alpha)?)?,
            "spectrum of the AA* marginal of rho^(1/2+is)",
        ),
        Measure::MinimizedReflected => {
            let mut opts = MinimizeOptions::default();
            if let Some(s) = args.seed {
                opts.seed = s;
            }
            let r = minimized_reflected(&rho, order(args.n)?, &opts)?;
            Computed {
                value: r.value,
                route: "commutant search: sign patterns, coordinate descent, simplex",
                extra: json!({
                    "evaluations": r.evaluations,
                    "converged": r.converged,
                    "unminimized": r.unminimized,
                    "param_mode": r.argmin.mode(),
                    "params": r.argmin.params(),
                }),
            }
        }
        Measure::CcReflected => computed(
            cc_reflected(&pmf_of(&rho)?, order(args.alpha)?)?,
            "singular values of sqrt(P)",
        ),
    })
}

fn cmd_compute(args: ComputeArgs) -> CliResult<ExitCode> {
    let cfg = tolerance_config(&args.tol)?;
    let c = compute(&args, &cfg)?;
    let (shown, unit) = if args.bits {
        (c.value / 2f64.ln(), "bits")
    } else {
        (c.value, "nats")
    };
    let measure = args.measure.to_possible_value().expect("named").get_name().to_string();
    let report = json!({
        "measure": measure,
        "value_nats": c.value,
        "value": shown,
        "unit": unit,
        "finite": c.value.is_finite(),
        "state": args.state.display().to_string(),
        "params": {"alpha": args.alpha, "m": args.m, "n": args.n, "s": args.s, "seed": args.seed},
        "provenance": {"route": c.route, "details": c.extra},
    });
    let out = None;
    let mut w = open_out(&out)?;
    writeln!(w, "{}", format_significant(shown, 12)).map_err(io_err(&out))?;
    writeln!(w, "{report}").map_err(io_err(&out))?;
    Ok(ExitCode::SUCCESS)
}

fn dims_or_default(dims: &[String]) -> CliResult<Vec<(usize, usize)>> {
    if dims.is_empty() {
        return Ok(SuiteConfig::default().dims);
    }
    dims.iter().map(|d| parse_dims(d)).collect()
}

fn open_out(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        })?),
        None => Box::new(std::io::stdout()),
    })
}

fn io_err(path: &Option<PathBuf>) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.as_ref().map_or("<stdout>".into(), |p| p.display().to_string()),
        source,
    }
}

fn cmd_verify(args: VerifyArgs) -> CliResult<ExitCode> {
    let tol = tolerance_config(&args.tol)?;
    let mut extra_states = Vec::new();
    for path in &args.state {
        let file = StateFile::read(path)?;
        let matrix = file.to_matrix().map_err(|message| CliError::Format {
            path: path.display().to_string(),
            message,
        })?;
        extra_states.push(ExtraState {
            name: path.display().to_string(),
            matrix,
            d_a: file.d_a,
            d_b: file.d_b,
        });
    }
    let cfg = SuiteConfig {
        master_seed: args.seed,
        trials: args.trials,
        dims: dims_or_default(&args.dims)?,
        tol,
        extra_states,
        minimized: !args.fast,
    };
    let report = run_suite(&cfg)?;
    let mut w = open_out(&args.out)?;
    w.write_all(report.to_jsonl().as_bytes()).map_err(io_err(&args.out))?;
    w.flush().map_err(io_err(&args.out))?;
    eprint!("{}", report.summary());
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn write_csv<T: Serialize>(rows: &[T], out: &Option<PathBuf>) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(open_out(out)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(out))?;
    Ok(())
}

fn cmd_reproduce(args: ReproduceArgs) -> CliResult<ExitCode> {
    let target: Target = args.target.parse()?;
    match target {
        Target::B9Curve => write_csv(&reproduce::b9_curve()?, &args.out)?,
        Target::B3Crossing => write_csv(&reproduce::b3_crossing()?, &args.out)?,
        Target::TheoremScatter => {
            if args.trials == 0 {
                return Err(CliError::Usage("trials must be at least 1".into()));
            }
            let rows = reproduce::theorem_scatter(args.seed, args.trials, &dims_or_default(&args.dims)?)?;
            write_csv(&rows, &args.out)?
        }
    }
    if let Some(p) = &args.out {
        eprintln!("wrote {target} to {}", Path::new(p).display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(normalize_tol_flags(std::env::args()));
    let result = match cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    };
    match result {
        Ok(code) => code,
        // A closed pipe (`| head`) is not an error worth reporting.
        Err(CliError::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Csv(e)) if matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
