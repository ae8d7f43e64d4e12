use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use halpern_lp_core::baselines::{solve_baseline_observed, BaselineMode};
use halpern_lp_core::bench::{BenchRow, BenchSummary, SizeBucket, DEFAULT_SGM_SHIFT};
use halpern_lp_core::model::DEFAULT_POWER_SEED;
use halpern_lp_core::infeasibility::{
    validate_dual_infeasibility, validate_primal_infeasibility, DEFAULT_CERTIFICATE_TOL,
};
use halpern_lp_core::report::{
    parse_solution_json, write_solution_json, write_trace_csv, ConfigEcho, JsonOptions,
    SolutionReport,
};
use halpern_lp_core::solver::{solve_observed, TraceCollector, DEFAULT_CHECK_PERIOD, DEFAULT_TOLERANCE};
use halpern_lp_core::{
    parse_mps_with, to_standard_form, GeneralFormLp, MpsFormat, RestartScheme, SolveResult,
    SolverConfig, StandardFormLp, Status, VariableMap,
};

#[derive(Parser)]
#[command(name = "halpern-lp", version, about = "Restarted Halpern PDHG linear programming solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one MPS file.
    Solve(SolveArgs),
    /// Solve every MPS file in a directory and summarize.
    Bench(BenchArgs),
    /// Validate an infeasibility certificate against an MPS file.
    CheckCertificate(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scheme {
    Halpern,
    Vanilla,
    Averaged,
    RestartedAverage,
}

impl Scheme {
    fn name(self) -> &'static str {
        match self {
            Scheme::Halpern => "halpern",
            Scheme::Vanilla => "vanilla",
            Scheme::Averaged => "averaged",
            Scheme::RestartedAverage => "restarted-average",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Free,
    Fixed,
}

impl From<Format> for MpsFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Free => MpsFormat::Free,
            Format::Fixed => MpsFormat::Fixed,
        }
    }
}

fn parse_restart(s: &str) -> Result<RestartScheme, String> {
    match s {
        "adaptive" => Ok(RestartScheme::adaptive()),
        "none" => Ok(RestartScheme::None),
        _ => match s.strip_prefix("fixed:") {
            Some(k) => k
                .parse::<u64>()
                .map(|k_star| RestartScheme::FixedFrequency { k_star })
                .map_err(|e| format!("invalid restart length `{k}`: {e}")),
            None => Err(format!("expected adaptive, fixed:K or none, got `{s}`")),
        },
    }
}

fn restart_name(r: &RestartScheme) -> String {
    match r {
        RestartScheme::FixedFrequency { k_star } => format!("fixed:{k_star}"),
        RestartScheme::AdaptiveResidualDecay { .. } => "adaptive".into(),
        RestartScheme::None => "none".into(),
    }
}

/// Options shared by `solve` and `bench`.
#[derive(Args, Clone)]
struct SolverArgs {
    /// Relative KKT tolerance (1e-4 for moderate accuracy).
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Iteration budget.
    #[arg(long = "iter-limit", default_value_t = 1_000_000)]
    iter_limit: u64,
    /// adaptive, fixed:K or none.
    #[arg(long, default_value = "adaptive", value_parser = parse_restart)]
    restart: RestartScheme,
    #[arg(long, value_enum, default_value_t = Scheme::Halpern)]
    scheme: Scheme,
    /// Step size; defaults to 1/(2‖A‖).
    #[arg(long)]
    eta: Option<f64>,
    /// Infeasibility check period in iterations; 0 disables detection.
    #[arg(long = "check-period", default_value_t = DEFAULT_CHECK_PERIOD)]
    check_period: u64,
    /// Seed for the spectral norm estimate.
    #[arg(long, default_value_t = DEFAULT_POWER_SEED)]
    seed: u64,
    /// MPS dialect of the input.
    #[arg(long, value_enum, default_value_t = Format::Free)]
    format: Format,
}

#[derive(Args)]
struct SolveArgs {
    path: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Wall-clock limit in seconds.
    #[arg(long = "time-limit", default_value_t = 3600.0)]
    time_limit: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long = "json-out")]
    json_out: Option<PathBuf>,
    /// Write a CSV trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Iterations between trace records.
    #[arg(long = "trace-period", default_value_t = 10)]
    trace_period: u64,
    /// Replace vectors longer than this by null.
    #[arg(long = "max-vector-len")]
    max_vector_len: Option<usize>,
    /// Leave wall-clock timing out of the report.
    #[arg(long = "no-timing")]
    no_timing: bool,
}

#[derive(Args)]
struct BenchArgs {
    dir: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Per-instance wall-clock limit in seconds.
    #[arg(long = "time-limit", default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long = "sgm-shift", default_value_t = DEFAULT_SGM_SHIFT)]
    sgm_shift: f64,
    /// Instances solved concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the JSON summary here instead of stdout.
    #[arg(long = "json-out")]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    lp: PathBuf,
    /// `{"kind": "primal"|"dual", "vector": [...]}` or a solution report.
    certificate: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CERTIFICATE_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Free)]
    format: Format,
}

/// Which infeasibility a certificate claims. A `primal` vector lives in the
/// row space, a `dual` vector in the column space of the standard form.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum CertKind {
    Primal,
    Dual,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CertFile {
    kind: CertKind,
    vector: Vec<f64>,
}

struct Problem {
    name: String,
    general: GeneralFormLp,
    lp: StandardFormLp,
    map: VariableMap,
}

fn load(path: &Path, format: Format) -> anyhow::Result<Problem> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let general = parse_mps_with(&text, format.into()).with_context(|| format!("parsing {}", path.display()))?;
    let (lp, map) = to_standard_form(&general).with_context(|| format!("converting {}", path.display()))?;
    let name = if general.name.is_empty() {
        path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
    } else {
        general.name.clone()
    };
    Ok(Problem { name, general, lp, map })
}

fn config_for(args: &SolverArgs, time_limit: f64) -> anyhow::Result<SolverConfig> {
    if !(time_limit.is_finite() && time_limit > 0.0) {
        bail!("time limit must be a positive number of seconds, got {time_limit}");
    }
    let config = SolverConfig {
        restart: args.restart,
        tolerance: args.tol,
        iteration_limit: args.iter_limit,
        time_limit: Duration::from_secs_f64(time_limit),
        eta: args.eta,
        infeasibility_check_period: args.check_period,
        seed: args.seed,
        ..SolverConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn run_solver(
    lp: &StandardFormLp,
    config: &SolverConfig,
    scheme: Scheme,
    trace: &mut TraceCollector,
) -> anyhow::Result<SolveResult> {
    let result = match scheme {
        Scheme::Halpern => solve_observed(lp, config, trace)?,
        Scheme::Vanilla => solve_baseline_observed(lp, config, BaselineMode::Vanilla, trace)?,
        Scheme::Averaged => solve_baseline_observed(lp, config, BaselineMode::Averaged, trace)?,
        Scheme::RestartedAverage => {
            solve_baseline_observed(lp, config, BaselineMode::RestartedAverage, trace)?
        }
    };
    Ok(result)
}

fn exit_code(status: Status) -> u8 {
    match status {
        Status::Optimal => 0,
        s if s.is_infeasible() => 2,
        _ => 3,
    }
}

fn cmd_solve(args: SolveArgs) -> anyhow::Result<u8> {
    let mut config = config_for(&args.solver, args.time_limit)?;
    if args.trace.is_some() {
        config.trace_period = args.trace_period.max(1);
    }
    let problem = load(&args.path, args.solver.format)?;
    let mut trace = TraceCollector::default();
    let result = run_solver(&problem.lp, &config, args.solver.scheme, &mut trace)?;
    log::info!(
        "{}: {} after {} iterations",
        problem.name,
        result.status.as_str(),
        result.iterations
    );

    let echo = ConfigEcho {
        scheme: args.solver.scheme.name().into(),
        restart: restart_name(&config.restart),
        tolerance: config.tolerance,
        iteration_limit: config.iteration_limit,
        time_limit_seconds: config.time_limit.as_secs_f64(),
        eta: result.eta,
        infeasibility_check_period: config.infeasibility_check_period,
        certificate_tolerance: config.certificate_tolerance,
        seed: config.seed,
    };
    let report = SolutionReport::from_result(
        &problem.name,
        &result,
        &problem.lp,
        Some((&problem.general, &problem.map)),
        echo,
    );
    let json = write_solution_json(
        &report,
        JsonOptions {
            max_vector_len: args.max_vector_len,
            include_timing: !args.no_timing,
        },
    );
    match &args.json_out {
        Some(path) => {
            std::fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
            println!(
                "{}: {} (objective {}, {} iterations)",
                report.problem,
                report.status.as_str(),
                report.primal_objective,
                report.iterations
            );
        }
        None => print!("{json}"),
    }
    if let Some(path) = &args.trace {
        std::fs::write(path, write_trace_csv(&trace.records))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(exit_code(result.status))
}

fn mps_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        let is_mps = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("mps"));
        if path.is_file() && is_mps {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn bench_one(path: &Path, args: &BenchArgs, config: &SolverConfig) -> BenchRow {
    let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let start = Instant::now();
    let outcome = load(path, args.solver.format).and_then(|p| {
        let nnz = p.lp.a().nnz();
        run_solver(&p.lp, config, args.solver.scheme, &mut TraceCollector::default()).map(|r| (r, nnz))
    });
    match outcome {
        Ok((result, nnz)) => BenchRow {
            name,
            status: Some(result.status),
            iterations: result.iterations,
            seconds: result.wall_time.as_secs_f64(),
            nnz,
            bucket: SizeBucket::of(nnz),
            error: None,
        },
        Err(e) => BenchRow {
            name,
            status: None,
            iterations: 0,
            seconds: start.elapsed().as_secs_f64(),
            nnz: 0,
            bucket: SizeBucket::Small,
            error: Some(format!("{e:#}")),
        },
    }
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<u8> {
    let config = config_for(&args.solver, args.time_limit)?;
    if !(args.sgm_shift.is_finite() && args.sgm_shift >= 0.0) {
        bail!("SGM shift must be nonnegative, got {}", args.sgm_shift);
    }
    let files = mps_files(&args.dir)?;
    if files.is_empty() {
        bail!("no .mps files in {}", args.dir.display());
    }
    let slots: Vec<Mutex<Option<BenchRow>>> = files.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let jobs = args.jobs.clamp(1, files.len());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                let row = bench_one(path, &args, &config);
                log::info!("{}: {}", row.name, row.status.map_or("error", Status::as_str));
                *slots[i].lock().expect("bench slot") = Some(row);
            });
        }
    });
    let rows = slots
        .into_iter()
        .map(|m| m.into_inner().expect("bench slot").expect("every instance ran"))
        .collect();
    let summary = BenchSummary::new(rows, args.time_limit, args.sgm_shift);
    print!("{}", summary.table());
    let json = serde_json::to_string_pretty(&summary)? + "\n";
    match &args.json_out {
        Some(path) => std::fs::write(path, json).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{json}"),
    }
    Ok(0)
}

fn read_certificate(path: &Path) -> anyhow::Result<(CertKind, Vec<f64>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(c) = serde_json::from_str::<CertFile>(&text) {
        return Ok((c.kind, c.vector));
    }
    let report = parse_solution_json(&text)
        .with_context(|| format!("{} is neither a certificate nor a solution report", path.display()))?;
    let cert = report
        .certificate
        .with_context(|| format!("report in {} carries no certificate", path.display()))?;
    match (cert.dual_ray, cert.primal_ray) {
        (Some(y), _) => Ok((CertKind::Primal, y)),
        (None, Some(x)) => Ok((CertKind::Dual, x)),
        (None, None) => bail!("certificate vectors in {} were elided", path.display()),
    }
}

fn cmd_check_certificate(args: CheckArgs) -> anyhow::Result<u8> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        bail!("certificate tolerance must be positive, got {}", args.tol);
    }
    let problem = load(&args.lp, args.format)?;
    let (kind, vector) = read_certificate(&args.certificate)?;
    let expected = match kind {
        CertKind::Primal => problem.lp.n_rows(),
        CertKind::Dual => problem.lp.n_cols(),
    };
    if vector.len() != expected {
        bail!(
            "certificate has {} entries, the standard form of {} needs {expected}",
            vector.len(),
            problem.name
        );
    }
    let report = match kind {
        CertKind::Primal => validate_primal_infeasibility(&vector, &problem.lp, args.tol)?,
        CertKind::Dual => validate_dual_infeasibility(&vector, &problem.lp, args.tol)?,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    let valid = match kind {
        CertKind::Primal => report.primal_valid(),
        CertKind::Dual => report.dual_valid(),
    };
    println!("{}", if valid { "valid" } else { "invalid" });
    Ok(if valid { 0 } else { 1 })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::CheckCertificate(a) => cmd_check_certificate(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
