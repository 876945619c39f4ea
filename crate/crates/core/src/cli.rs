//! Batch command-line front end. [`run_command`] returns the process exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::config::{BackendKind, SolverConfig};
use crate::cost::cost_report;
use crate::driver::{read_trace_jsonl, solve, write_trace_jsonl, SolveStatus};
use crate::error::{Error, Result};
use crate::generate::InstanceSpec;
use crate::problem::{validate_and_preprocess, PrimalDualPoint, ProblemFile, StartFile};
use crate::svm::{self, ParseOptions, SvmModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ITER_LIMIT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "lcqo", version, about = "Inexact feasible IPM for linearly constrained QPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random feasible instance with a central start.
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.25)]
        q_weight: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve a problem file, centering first if the start needs it.
    Solve {
        problem: PathBuf,
        /// Start point JSON `{x, y, s}`; defaults to the one in the problem file.
        #[arg(long)]
        start: Option<PathBuf>,
        /// Solution JSON (default: `<problem>.solution.json`).
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Train a linear soft-margin SVM.
    SvmTrain {
        dataset: PathBuf,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = svm::DEFAULT_EPS_REG)]
        eps_reg: f64,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Apply a trained model to a dataset and report accuracy.
    SvmPredict {
        model: PathBuf,
        dataset: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        json: bool,
    },
    /// Replay a trace through the quantum cost model.
    Estimate {
        problem: PathBuf,
        trace: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Libsvm,
    Csv,
}

#[derive(Debug, Args)]
struct DataArgs {
    #[arg(long, value_enum, default_value_t = Format::Libsvm)]
    format: Format,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Read labels 0/1 as -1/+1.
    #[arg(long)]
    map_binary: bool,
}

impl DataArgs {
    fn options(&self) -> ParseOptions {
        let base = match self.format {
            Format::Libsvm => ParseOptions::libsvm(),
            Format::Csv => ParseOptions::csv(self.delimiter),
        };
        base.map_binary(self.map_binary)
    }
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = BackendKind::Exact)]
    backend: BackendKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Write the iteration trace as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Record kappa(M) in the trace (dense SVD per iteration).
    #[arg(long)]
    kappa: bool,
    /// Relative inner tolerance for the iterative backend.
    #[arg(long)]
    inner_rtol: Option<f64>,
    #[arg(long)]
    json: bool,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            theta: self.theta,
            beta: self.beta,
            delta: self.delta,
            eps: self.eps,
            backend: self.backend,
            seed: self.seed,
            max_iters: self.max_iters,
            trace_kappa: self.kappa,
            inner_rtol: self.inner_rtol,
            ..SolverConfig::default()
        }
    }
}

fn status_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Optimal => EXIT_OK,
        SolveStatus::IterLimit => EXIT_ITER_LIMIT,
        SolveStatus::NumericalBreakdown => EXIT_ERROR,
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::AtIteration { source, .. } => error_code(source),
        _ => EXIT_ERROR,
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).unwrap_or_default());
}

fn gen(
    m: usize,
    n: usize,
    density: f64,
    seed: u64,
    q_weight: f64,
    output: &Path,
) -> Result<i32> {
    let (problem, start) = InstanceSpec::new(m, n, density, seed)
        .with_q_weight(q_weight)
        .build()?;
    ProblemFile::from_problem(&problem, Some(&start)).write(output)?;
    println!("wrote {} ({m} x {n}, seed {seed})", output.display());
    Ok(EXIT_OK)
}

fn run_solve(
    problem_path: &Path,
    start: Option<&Path>,
    output: Option<&Path>,
    args: &SolverArgs,
) -> Result<i32> {
    let (problem, bundled) = ProblemFile::read(problem_path)?.into_parts()?;
    let start: PrimalDualPoint = match start {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str::<StartFile>(&text)?.into()
        }
        None => bundled.ok_or_else(|| {
            Error::InvalidConfig("no start point: pass --start or add one to the problem file".into())
        })?,
    };
    let pre = validate_and_preprocess(&problem)?;
    let lifted = pre.lift_point(&start)?;
    let config = args.config();
    let (centering, result) = solve(&pre.problem, &lifted, &config)?;
    let point = pre.restrict_point(&result.point);

    if let Some(path) = &args.trace {
        write_trace_jsonl(path, &result.trace)?;
    }
    let output = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| problem_path.with_extension("solution.json"));
    let (primal, dual) = problem.feasibility_errors(&point)?;
    let summary = json!({
        "status": result.status,
        "iterations": result.iterations(),
        "centering_steps": centering.steps(),
        "theta": result.theta,
        "theta_max": result.theta_max,
        "gap": point.gap(),
        "objective": problem.objective(&point.x),
        "primal_residual": primal,
        "dual_residual": dual,
        "backend": config.backend,
    });
    let mut solution = summary.clone();
    solution["x"] = json!(point.x.as_slice());
    solution["y"] = json!(point.y.as_slice());
    solution["s"] = json!(point.s.as_slice());
    write_json(&output, &solution)?;

    if args.json {
        print_json(&summary);
    } else {
        println!("status      {:?}", result.status);
        println!("iterations  {} (+{} centering)", result.iterations(), centering.steps());
        println!("objective   {:.10e}", problem.objective(&point.x));
        println!("gap         {:.3e}", point.gap());
        println!("feasibility {primal:.3e} / {dual:.3e}");
        println!("theta       {:.4e} (max {:.4e})", result.theta, result.theta_max);
        println!("solution    {}", output.display());
    }
    Ok(status_code(result.status))
}

fn svm_train(
    dataset: &Path,
    c: f64,
    eps_reg: f64,
    output: &Path,
    data: &DataArgs,
    args: &SolverArgs,
) -> Result<i32> {
    let data = svm::parse_dataset(dataset, data.options())?;
    let trained = svm::train(&data, c, eps_reg, &args.config())?;
    if let Some(path) = &args.trace {
        write_trace_jsonl(path, &trained.result.trace)?;
    }
    write_json(output, &trained.model)?;
    let status = trained.result.status;
    if args.json {
        print_json(&json!({
            "status": status,
            "iterations": trained.result.iterations(),
            "accuracy": trained.accuracy,
            "objective": trained.model.objective,
            "eps_reg": eps_reg,
        }));
    } else {
        println!("status      {status:?}");
        println!("iterations  {} (+{} centering)", trained.result.iterations(), trained.centering.steps());
        println!("points      {}  features {}", data.n(), data.m());
        println!("objective   {:.8e}", trained.model.objective);
        println!("accuracy    {:.4}", trained.accuracy);
        println!("note        eps_reg = {eps_reg:e} added to the (w+, w-, t+, t-) diagonal of Q");
        println!("model       {}", output.display());
    }
    Ok(status_code(status))
}

fn svm_predict(model: &Path, dataset: &Path, data: &DataArgs, json_out: bool) -> Result<i32> {
    let text = fs::read_to_string(model).map_err(|e| Error::io(model, e))?;
    let model: SvmModel = serde_json::from_str(&text)?;
    let data = svm::parse_dataset(dataset, data.options())?;
    let accuracy = model.accuracy(&data)?;
    if json_out {
        print_json(&json!({ "points": data.n(), "accuracy": accuracy }));
    } else {
        println!("points    {}", data.n());
        println!("accuracy  {accuracy:.4}");
    }
    Ok(EXIT_OK)
}

fn estimate(
    problem: &Path,
    trace: &Path,
    eps: f64,
    output: Option<&Path>,
    json_out: bool,
) -> Result<i32> {
    let (problem, _) = ProblemFile::read(problem)?.into_parts()?;
    let trace = read_trace_jsonl(trace)?;
    let report = cost_report(&problem, &trace, eps)?;
    if let Some(path) = output {
        write_json(path, &report)?;
    }
    if json_out {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.render_table());
    }
    let violations = report.violations();
    for v in &violations {
        eprintln!("invariant violated: {v}");
    }
    Ok(if violations.is_empty() { EXIT_OK } else { EXIT_ERROR })
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen {
            m,
            n,
            density,
            seed,
            q_weight,
            output,
        } => gen(m, n, density, seed, q_weight, &output),
        Command::Solve {
            problem,
            start,
            output,
            solver,
        } => run_solve(&problem, start.as_deref(), output.as_deref(), &solver),
        Command::SvmTrain {
            dataset,
            c,
            eps_reg,
            output,
            data,
            solver,
        } => svm_train(&dataset, c, eps_reg, &output, &data, &solver),
        Command::SvmPredict {
            model,
            dataset,
            data,
            json,
        } => svm_predict(&model, &dataset, &data, json),
        Command::Estimate {
            problem,
            trace,
            eps,
            output,
            json,
        } => estimate(&problem, &trace, eps, output.as_deref(), json),
    }
}

/// Parses `argv` (including the program name) and runs the command.
///
/// Exit codes: 0 optimal, 2 iteration limit, 1 other failure, 64 usage, 74 IO.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => {
            let _ = std::io::stdout().flush();
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}
