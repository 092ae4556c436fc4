use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adapg::{SolverParams, TraceFormat};
use adapg_cli::bench::{run_bench, BenchConfig, BENCH_SUMMARY_FILE};
use adapg_cli::error::{CliError, EXIT_OK, EXIT_SAFEGUARD};
use adapg_cli::experiment::{run_experiment, Summary};
use adapg_cli::tools::{compute_bounds, rates_from_file, BoundsInput, SeriesMode};
use adapg_cli::{Config, Overrides};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adapg", version, about = "Run AdaAPG / rAdaAPG experiments and compare them with their bounds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Trace format.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<TraceFormat>,
    /// Problem seed, replaces problem.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Single tolerance, replaces the run.eps grid.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Solve,
    /// Run a matrix of experiments in parallel.
    Bench,
    /// Classify the convergence rate recorded in a CSV trace.
    Rates {
        trace: PathBuf,
        /// auto, restart or row.
        #[arg(long, default_value = "auto")]
        series: SeriesMode,
    },
    /// Print the theoretical thresholds and iteration bounds.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    kappa: f64,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    lf: f64,
    #[arg(long)]
    lmin: f64,
    /// ‖g_M(x₀)‖.
    #[arg(long)]
    g0: f64,
    #[arg(long)]
    sigma0: f64,
    /// dist(x₀, X*), enables σ(x₀, ε) and the AdaAPG bound.
    #[arg(long)]
    dist: Option<f64>,
    /// φ(x₀) − φ*, required for rho < 2.
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma_inc: Option<f64>,
    #[arg(long)]
    gamma_reg: Option<f64>,
}

fn parse_format(s: &str) -> Result<TraceFormat, String> {
    s.parse().map_err(|e: adapg::Error| e.to_string())
}

fn overrides(g: &Global) -> Overrides {
    Overrides { out: g.out.clone(), format: g.format, seed: g.seed, eps: g.eps }
}

fn need_config(g: &Global) -> Result<&Path, CliError> {
    g.config.as_deref().ok_or_else(|| CliError::Config("--config <path> is required".into()))
}

fn print_summary(s: &Summary) {
    println!("{} on {} (n = {})", s.solver, s.problem.name, s.problem.n);
    for r in &s.runs {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4e}"));
        let bound = r.predicted.n_bound.or(r.predicted.adaapg_bound);
        let n = if s.solver == "pg" { r.pg_steps } else { r.apg_iters };
        println!(
            "  eps {:.1e}  {:?}  N {}  bound {}  ratio {}  |g| {:.3e}  -> {}",
            r.eps,
            r.status,
            n,
            fmt(bound),
            fmt(r.ratio),
            r.g_norm,
            r.trace_file
        );
    }
}

fn solve(g: &Global) -> Result<i32, CliError> {
    let mut cfg = Config::load(need_config(g)?)?;
    cfg.apply(&overrides(g));
    cfg.validate()?;
    let out = cfg.out_dir();
    let summary = run_experiment(&cfg, &out)?;
    if !g.quiet {
        print_summary(&summary);
    }
    if summary.any_safeguard() {
        for r in summary.runs.iter().filter_map(|r| r.safeguard.as_ref()) {
            eprintln!("safeguard: {r}");
        }
        return Ok(EXIT_SAFEGUARD);
    }
    Ok(EXIT_OK)
}

fn bench(g: &Global) -> Result<i32, CliError> {
    let mut cfg = BenchConfig::load(need_config(g)?)?;
    cfg.prepare(&overrides(g))?;
    let root = g.out.clone().unwrap_or_else(|| PathBuf::from(adapg_cli::config::DEFAULT_OUT));
    std::fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
    let outcomes = run_bench(&cfg, &root);
    let path = root.join(BENCH_SUMMARY_FILE);
    let text = serde_json::to_string_pretty(&outcomes).expect("bench summary serializes");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    let mut code = EXIT_OK;
    for o in &outcomes {
        match (&o.summary, &o.error) {
            (Some(s), _) if !g.quiet => {
                println!("[{}]", o.name);
                print_summary(s);
            }
            (_, Some(e)) => eprintln!("[{}] {e}", o.name),
            _ => {}
        }
        code = code.max(o.exit_code);
    }
    Ok(code)
}

fn bounds(g: &Global, a: &BoundsArgs) -> Result<i32, CliError> {
    let d = SolverParams::default();
    let params = SolverParams {
        theta: a.theta.unwrap_or(d.theta),
        beta: a.beta.unwrap_or(d.beta),
        gamma_inc: a.gamma_inc.unwrap_or(d.gamma_inc),
        gamma_reg: a.gamma_reg.unwrap_or(d.gamma_reg),
        l_min: a.lmin,
        ..d
    };
    let eps = g.eps.ok_or_else(|| CliError::Config("bounds needs --eps".into()))?;
    let input = BoundsInput {
        kappa: a.kappa,
        rho: a.rho,
        lf: a.lf,
        lmin: a.lmin,
        eps,
        g0: a.g0,
        sigma0: a.sigma0,
        dist: a.dist,
        delta0: a.delta0,
        params,
    };
    let report = compute_bounds(&input)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(EXIT_OK)
}

fn rates(trace: &Path, mode: SeriesMode) -> Result<i32, CliError> {
    let report = rates_from_file(trace, mode)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Solve => solve(&cli.global),
        Command::Bench => bench(&cli.global),
        Command::Rates { trace, series } => rates(trace, *series),
        Command::Bounds(a) => bounds(&cli.global, a),
    };
    let code = res.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
