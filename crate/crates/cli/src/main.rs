//! `dbar`: batch front end for the ∂̄ boundary-value solvers.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 membership
//! rejection (report still written), 3 compatibility failure. On failure a
//! single `category: detail` line is written to stderr.

mod config;
mod expr;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dbar_core::solvers::membership_refined;
use dbar_core::verify::{self, ManufacturedCase};
use dbar_core::{
    make_curve, membership, solve_dirichlet, solve_neumann, solve_regularity, solve_robin, BoundaryFunction,
    Error, HolomorphicEvaluator, ProblemData, SolveReport,
};

use config::{DataSource, RunConfig, Settings};

#[derive(Parser)]
#[command(name = "dbar", version, about = "Boundary-value problems for the d-bar operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a boundary problem and write the report, data and trace.
    Solve(RunArgs),
    /// Decide whether data lie in the problem's data space.
    Membership(RunArgs),
    /// Tabulate interior errors of a catalog case over grid sizes.
    Converge(ConvergeArgs),
    /// Robin non-uniqueness on the unit disk with b = -1.
    DemoNonuniqueness(DemoArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Flat key = value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// disk | disk:cx,cy,r | square | ellipse:a,b | polygon:x,y;x,y;...
    #[arg(long)]
    domain: Option<String>,
    /// Number of boundary nodes.
    #[arg(long)]
    n: Option<usize>,
    /// dirichlet | regularity | neumann | robin
    #[arg(long)]
    problem: Option<String>,
    /// Catalog case: poly3, exp, rational_pole_out, conj_reject, constant, robin_linear.
    #[arg(long)]
    case: Option<String>,
    /// Boundary data as an expression in z and T.
    #[arg(long, allow_hyphen_values = true)]
    data: Option<String>,
    /// Boundary data from a CSV file with columns s,re,im.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Robin coefficient expression (default 0.5).
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Robin right-hand side expression.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Neumann normalization point, a constant expression.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Lebesgue exponent for residual norms, in (1, ∞).
    #[arg(long)]
    p: Option<f64>,
    /// Relative membership tolerance.
    #[arg(long)]
    tau: Option<f64>,
    /// Compatibility threshold.
    #[arg(long = "delta-c")]
    delta_c: Option<f64>,
    /// pv | offset | offset1
    #[arg(long)]
    trace: Option<String>,
    /// Disable the grid-refinement check before rejecting analytic data.
    #[arg(long)]
    no_refine: bool,
    /// Output directory.
    #[arg(long, env = "DBAR_OUTPUT_DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ConvergeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated, strictly increasing grid sizes.
    #[arg(long)]
    sizes: Option<String>,
}

#[derive(Args, Clone)]
struct DemoArgs {
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, env = "DBAR_OUTPUT_DIR")]
    out: Option<PathBuf>,
}

/// A failed run: exit code and one-line reason.
struct Failure {
    code: u8,
    reason: String,
}

impl Failure {
    fn usage(reason: impl Into<String>) -> Self {
        Self { code: 1, reason: format!("usage: {}", reason.into()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Compatibility { .. } => Self { code: 3, reason: e.to_string() },
            Error::Rejected(ref r) => {
                Self { code: 2, reason: format!("rejected: residual {:.3e} exceeds tolerance {:.1e}", r.residual, r.tolerance) }
            }
            Error::Io(_) | Error::Csv(_) => Self { code: 1, reason: format!("io: {e}") },
            other => Self { code: 1, reason: format!("config: {other}") },
        }
    }
}

type Run = Result<(), Failure>;

fn settings(args: &RunArgs) -> Result<Settings, Failure> {
    let mut s = match &args.config {
        Some(path) => Settings::from_file(path).map_err(Failure::usage)?,
        None => Settings::default(),
    };
    let text = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    s.set("domain", args.domain.clone());
    s.set("n", args.n.map(|v| v.to_string()));
    s.set("problem", args.problem.clone());
    s.set("case", args.case.clone());
    s.set("data", args.data.clone());
    s.set("csv", text(&args.csv));
    s.set("b", args.b.clone());
    s.set("r", args.r.clone());
    s.set("alpha", args.alpha.clone());
    s.set("p", args.p.map(|v| v.to_string()));
    s.set("tau", args.tau.map(|v| v.to_string()));
    s.set("delta_c", args.delta_c.map(|v| v.to_string()));
    s.set("trace", args.trace.clone());
    s.set("out", text(&args.out));
    if args.no_refine {
        s.set("refine", Some("false".into()));
    }
    Ok(s)
}

fn prepare_out(dir: &Path) -> Run {
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("output directory {}: {e}", dir.display())))
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Run {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Failure { code: 1, reason: format!("io: {}: {e}", path.display()) })
}

fn write_function(dir: &Path, name: &str, f: &BoundaryFunction) -> Run {
    let mut buf = Vec::new();
    f.write_csv(&mut buf)?;
    write(dir, name, &buf)
}

fn write_report(dir: &Path, report: &SolveReport) -> Run {
    write(dir, "report.json", (report.to_json() + "\n").as_bytes())
}

fn primary_data(data: &ProblemData) -> &BoundaryFunction {
    match data {
        ProblemData::Dirichlet(f) | ProblemData::Regularity(f) => f,
        ProblemData::Neumann { g, .. } => g,
        ProblemData::Robin { r, .. } => r,
    }
}

fn finish(report: &SolveReport, dir: &Path) -> Run {
    println!(
        "{} {}: residual {:.3e} (tolerance {:.1e}), report {}",
        report.problem.name(),
        if report.accepted() { "accepted" } else { "rejected" },
        report.residual,
        report.tolerance,
        dir.join("report.json").display()
    );
    if report.accepted() {
        Ok(())
    } else {
        Err(Failure {
            code: 2,
            reason: format!("rejected: residual {:.3e} exceeds tolerance {:.1e}", report.residual, report.tolerance),
        })
    }
}

fn solve(args: &RunArgs) -> Run {
    let cfg = RunConfig::resolve(&settings(args)?).map_err(Failure::usage)?;
    let curve = make_curve(&cfg.domain)?;
    let data = cfg.problem_data(&curve)?;
    prepare_out(&cfg.out)?;
    write_function(&cfg.out, "data.csv", primary_data(&data))?;
    let result: dbar_core::Result<(HolomorphicEvaluator, SolveReport)> = match &data {
        ProblemData::Dirichlet(f) => solve_dirichlet(f, &cfg.solve),
        ProblemData::Regularity(f) => solve_regularity(f, &cfg.solve),
        ProblemData::Neumann { g, alpha } => solve_neumann(g, *alpha, &cfg.solve),
        ProblemData::Robin { coef, r } => solve_robin(coef, r, &cfg.solve),
    };
    let (evaluator, report) = match result {
        Ok(pair) => pair,
        Err(Error::Rejected(report)) => {
            write_report(&cfg.out, &report)?;
            return finish(&report, &cfg.out);
        }
        Err(e) => return Err(e.into()),
    };
    write_report(&cfg.out, &report)?;
    write_function(&cfg.out, "trace.csv", &evaluator.trace(&cfg.solve.trace)?)?;
    finish(&report, &cfg.out)
}

fn membership_cmd(args: &RunArgs) -> Run {
    let cfg = RunConfig::resolve(&settings(args)?).map_err(Failure::usage)?;
    prepare_out(&cfg.out)?;
    let curve = make_curve(&cfg.domain)?;
    let data = cfg.problem_data(&curve)?;
    write_function(&cfg.out, "data.csv", primary_data(&data))?;
    let report = if cfg.refine && cfg.source.is_analytic() {
        membership_refined(&cfg.domain, &cfg.solve, |c| cfg.problem_data(c))?
    } else {
        membership(&data, &cfg.solve)?
    };
    write_report(&cfg.out, &report)?;
    finish(&report, &cfg.out)
}

fn converge(args: &ConvergeArgs) -> Run {
    let mut s = settings(&args.run)?;
    s.set("sizes", args.sizes.clone());
    let sizes: Vec<usize> = s
        .get("sizes")
        .unwrap_or("64,128,256")
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| Failure::usage(format!("sizes: bad size `{v}`"))))
        .collect::<Result<_, _>>()?;
    let first = *sizes.first().ok_or_else(|| Failure::usage("sizes: empty"))?;
    s.set("n", Some(first.to_string()));
    let cfg = RunConfig::resolve(&s).map_err(Failure::usage)?;
    let DataSource::Case(name) = &cfg.source else {
        return Err(Failure::usage("converge needs --case"));
    };
    let curve = make_curve(&cfg.domain)?;
    let b = cfg.b.constant_value().unwrap_or(dbar_core::Complex64::new(0.5, 0.0));
    let case = ManufacturedCase::with_robin(name, &curve, b)?;
    let table = verify::run_convergence(&case, cfg.problem, &sizes, &cfg.solve)?;
    prepare_out(&cfg.out)?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    write(&cfg.out, "convergence.csv", &csv)?;
    let mut dat = Vec::new();
    table.write_dat(&mut dat)?;
    write(&cfg.out, "convergence.dat", &dat)?;
    let json = serde_json::to_string_pretty(&table).expect("table serializes");
    write(&cfg.out, "convergence.json", (json + "\n").as_bytes())?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}

fn demo(args: &DemoArgs) -> Run {
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUT));
    prepare_out(&out)?;
    let report = verify::nonuniqueness_demo_on(args.n);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write(&out, "nonuniqueness.json", (json + "\n").as_bytes())?;
    println!("b = -1 on the unit disk: margin {:.1e}, solve_robin refused: {}", report.margin, report.refused);
    for (re, im, residual) in &report.residuals {
        println!("  G(z) = ({re}{im:+}i) z: Robin residual {residual:.2e}");
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure { code: 1, reason: "demo: non-uniqueness checks failed".into() })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("usage: {first}");
            return ExitCode::from(1);
        }
    };
    let outcome = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Membership(args) => membership_cmd(args),
        Command::Converge(args) => converge(args),
        Command::DemoNonuniqueness(args) => demo(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.reason);
            ExitCode::from(f.code)
        }
    }
}
