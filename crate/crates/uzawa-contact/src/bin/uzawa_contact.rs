//! Command-line front end for the contact-QP solvers: build or load an
//! instance, run any of the three dual methods, compare them on a shared
//! instance, round-trip instance files, and run the randomized
//! verification suites.
//!
//! Exit codes: 0 converged / verification passed, 1 usage, I/O, or parse
//! error, 2 iteration cap reached, 3 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uzawa_contact::diagnostics::{dual_objective, history_to_csv, kkt_residual};
use uzawa_contact::fem::{build_benchmark, paper_spec, BenchmarkSpec};
use uzawa_contact::instance;
use uzawa_contact::linalg::{cholesky_factorize, norm2, norm_inf};
use uzawa_contact::oracle::{active_set_solve, random_instance};
use uzawa_contact::solver::dual_gradient;
use uzawa_contact::{ContactQp, Method, SolveResult, SolveStatus, SolverConfig, StepSize};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_MAX_ITER: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "uzawa-contact",
    about = "Dual-ascent solvers for frictionless contact QPs",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on an instance and write the solution as JSON.
    Solve(SolveArgs),
    /// Run all three methods on the same instance and step size.
    Compare(CompareArgs),
    /// Build a benchmark instance and write it as an instance JSON file.
    Export(ExportArgs),
    /// Parse an instance file and report its dimensions.
    ImportCheck(ImportCheckArgs),
    /// Run the randomized oracle-equivalence and gradient-check suites.
    Verify(VerifyArgs),
}

/// Where the instance comes from: exactly one of a file or a mesh.
#[derive(Args)]
struct InstanceSource {
    /// Instance JSON file.
    #[arg(long, conflicts_with_all = ["nx", "ny", "paper_spec"])]
    instance: Option<PathBuf>,
    /// Elements along the beam; with --ny (or --paper-spec) builds the
    /// cantilever benchmark.
    #[arg(long)]
    nx: Option<usize>,
    /// Elements through the thickness.
    #[arg(long, conflicts_with = "paper_spec")]
    ny: Option<usize>,
    /// Use the published mesh ratio ny = nx / 3.
    #[arg(long)]
    paper_spec: bool,
}

#[derive(Args)]
struct SolverFlags {
    /// Step size: a positive real, or "auto" for lambda_1(K) / sigma_max(N)^2.
    #[arg(long, default_value = "auto", value_parser = parse_alpha)]
    alpha: StepSize,
    /// Stopping threshold on the dual step norm.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: InstanceSource,
    #[command(flatten)]
    flags: SolverFlags,
    /// Which method to run.
    #[arg(long, value_enum, default_value_t = MethodFlag::AccelRestart)]
    method: MethodFlag,
    /// Write the per-iteration convergence history to this CSV file.
    #[arg(long)]
    history: Option<PathBuf>,
    /// Solution JSON path.
    #[arg(long, default_value = "solution.json")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    source: InstanceSource,
    #[command(flatten)]
    flags: SolverFlags,
    /// Output directory for the three history CSVs and compare.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    source: InstanceSource,
    /// Instance JSON path.
    #[arg(long, default_value = "instance.json")]
    out: PathBuf,
}

#[derive(Args)]
struct ImportCheckArgs {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// RNG seed for instance generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random instances per suite.
    #[arg(long, default_value_t = 200)]
    cases: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodFlag {
    Uzawa,
    Accel,
    AccelRestart,
}

impl MethodFlag {
    fn method(self) -> Method {
        match self {
            MethodFlag::Uzawa => Method::Uzawa,
            MethodFlag::Accel => Method::Accelerated,
            MethodFlag::AccelRestart => Method::AcceleratedRestart,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MethodFlag::Uzawa => "uzawa",
            MethodFlag::Accel => "accel",
            MethodFlag::AccelRestart => "accel-restart",
        }
    }
}

fn parse_alpha(text: &str) -> Result<StepSize, String> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(StepSize::Auto);
    }
    let value: f64 = text
        .parse()
        .map_err(|_| format!("expected a real number or \"auto\", got {text:?}"))?;
    if value <= 0.0 || !value.is_finite() {
        return Err(format!("step size must be positive and finite, got {value}"));
    }
    Ok(StepSize::Fixed(value))
}

fn main() -> ExitCode {
    // clap's own usage errors exit with 2; the contract here reserves 2
    // for the iteration cap, so remap usage errors to 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Export(args) => cmd_export(&args),
        Command::ImportCheck(args) => cmd_import_check(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// Builds the benchmark spec implied by the mesh flags.
fn mesh_spec(source: &InstanceSource) -> Result<BenchmarkSpec, String> {
    let nx = source
        .nx
        .ok_or("no instance source: pass --instance, or --nx with --ny/--paper-spec")?;
    if source.paper_spec {
        return paper_spec(nx).map_err(|e| e.to_string());
    }
    let ny = source
        .ny
        .ok_or("--nx needs --ny (or --paper-spec to infer ny = nx / 3)")?;
    // custom mesh of the same physical benchmark
    let mut spec = paper_spec(3).map_err(|e| e.to_string())?;
    spec.nx = nx;
    spec.ny = ny;
    Ok(spec)
}

fn load_instance(source: &InstanceSource) -> Result<ContactQp, String> {
    if let Some(path) = &source.instance {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        let (qp, _meta) = instance::from_json(&text).map_err(|e| e.to_string())?;
        return Ok(qp);
    }
    let spec = mesh_spec(source)?;
    build_benchmark(&spec).map_err(|e| e.to_string())
}

fn run_method(
    qp: &ContactQp,
    flags: &SolverFlags,
    method: Method,
    record_history: bool,
) -> Result<(SolveResult, f64), String> {
    let cfg = SolverConfig {
        method,
        alpha: flags.alpha,
        epsilon: flags.eps,
        max_iter: flags.max_iter,
        record_history,
    };
    let start = Instant::now();
    let result = uzawa_contact::solver::solve(qp, &cfg, None).map_err(|e| e.to_string())?;
    Ok((result, start.elapsed().as_secs_f64()))
}

fn solution_json(qp: &ContactQp, method: MethodFlag, result: &SolveResult) -> Result<String, String> {
    let kkt = kkt_residual(qp, &result.u, &result.r).map_err(|e| e.to_string())?;
    let doc = serde_json::json!({
        "method": method.name(),
        "status": status_name(result.status),
        "iterations": result.iterations,
        "alpha": result.alpha,
        "kkt": {
            "e1_norm": norm2(&kkt.e1),
            "e2_norm": norm2(&kkt.e2),
            "e3_norm": norm2(&kkt.e3),
            "e4_norm": norm2(&kkt.e4),
            "total": kkt.total,
        },
        "u": result.u,
        "r": result.r,
    });
    serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())
}

fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIterReached => "max-iter-reached",
    }
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::MaxIterReached => EXIT_MAX_ITER,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_solve(args: &SolveArgs) -> Result<u8, String> {
    let qp = load_instance(&args.source)?;
    let (result, wall) = run_method(&qp, &args.flags, args.method.method(), args.history.is_some())?;
    if matches!(args.flags.alpha, StepSize::Auto) {
        println!("alpha = {} (auto)", result.alpha);
    }

    write_file(&args.out, &solution_json(&qp, args.method, &result)?)?;
    if let Some(path) = &args.history {
        write_file(path, &history_to_csv(&result.history))?;
    }

    let kkt = kkt_residual(&qp, &result.u, &result.r).map_err(|e| e.to_string())?;
    println!(
        "method={} status={} iterations={} residual_total={:e} wall_time={:.3}s",
        args.method.name(),
        status_name(result.status),
        result.iterations,
        kkt.total,
        wall,
    );
    Ok(status_code(result.status))
}

fn cmd_compare(args: &CompareArgs) -> Result<u8, String> {
    let qp = load_instance(&args.source)?;
    // resolve the step size once so all three methods share it exactly
    let alpha = match args.flags.alpha {
        StepSize::Auto => {
            let a = uzawa_contact::solver::default_step_size(&qp).map_err(|e| e.to_string())?;
            println!("alpha = {a} (auto)");
            a
        }
        StepSize::Fixed(a) => a,
    };
    let flags = SolverFlags {
        alpha: StepSize::Fixed(alpha),
        eps: args.flags.eps,
        max_iter: args.flags.max_iter,
    };

    let methods = [MethodFlag::Uzawa, MethodFlag::Accel, MethodFlag::AccelRestart];
    // solves are pure over the shared instance; run them concurrently
    let results: Vec<Result<(SolveResult, f64), String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|m| scope.spawn(|| run_method(&qp, &flags, m.method(), true)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });

    std::fs::create_dir_all(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    let mut summaries = Vec::new();
    let mut worst = EXIT_OK;
    for (method, result) in methods.iter().zip(results) {
        let (result, wall) = result?;
        let csv_path = args.out.join(format!("{}.csv", method.name()));
        write_file(&csv_path, &history_to_csv(&result.history))?;
        let kkt = kkt_residual(&qp, &result.u, &result.r).map_err(|e| e.to_string())?;
        println!(
            "method={} status={} iterations={} residual_total={:e} wall_time={:.3}s",
            method.name(),
            status_name(result.status),
            result.iterations,
            kkt.total,
            wall,
        );
        worst = worst.max(status_code(result.status));
        summaries.push(serde_json::json!({
            "method": method.name(),
            "status": status_name(result.status),
            "iterations": result.iterations,
            "residual_total": kkt.total,
            "history_csv": format!("{}.csv", method.name()),
        }));
    }

    let doc = serde_json::json!({ "alpha": alpha, "eps": flags.eps, "runs": summaries });
    let json = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
    write_file(&args.out.join("compare.json"), &json)?;
    Ok(worst)
}

fn cmd_export(args: &ExportArgs) -> Result<u8, String> {
    let spec = mesh_spec(&args.source)?;
    let qp = build_benchmark(&spec).map_err(|e| e.to_string())?;
    let meta = serde_json::to_value(&spec).map_err(|e| e.to_string())?;
    write_file(&args.out, &instance::to_json(&qp, Some(meta)))?;
    println!(
        "exported d={} m={} instance to {}",
        qp.dim(),
        qp.ncon(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_import_check(args: &ImportCheckArgs) -> Result<u8, String> {
    let text = std::fs::read_to_string(&args.instance)
        .map_err(|e| format!("{}: {e}", args.instance.display()))?;
    let (qp, meta) = instance::from_json(&text).map_err(|e| e.to_string())?;
    println!(
        "ok: d={} m={} meta={}",
        qp.dim(),
        qp.ncon(),
        if meta.is_some() { "present" } else { "absent" }
    );
    Ok(EXIT_OK)
}

/// Dumps the instance that broke a verification suite next to the
/// working directory and reports where it went.
fn dump_failure(suite: &str, case: usize, qp: &ContactQp, detail: &str) -> Result<u8, String> {
    let path = PathBuf::from(format!("verify-failure-{suite}-{case}.json"));
    write_file(&path, &instance::to_json(qp, None))?;
    eprintln!("{suite} case {case} failed: {detail} (instance dumped to {})", path.display());
    Ok(EXIT_VERIFY_FAILED)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, String> {
    // Suite 1: both iterative methods against the active-set oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for case in 0..args.cases {
        let qp = random_instance(&mut rng, 6, 6);
        let oracle = active_set_solve(&qp).map_err(|e| e.to_string())?;
        for method in [Method::Uzawa, Method::Accelerated] {
            let mut cfg = SolverConfig::new(method);
            cfg.epsilon = 1e-10;
            let result = uzawa_contact::solver::solve(&qp, &cfg, None).map_err(|e| e.to_string())?;
            let du = max_abs_diff(&result.u, &oracle.u);
            let dr = max_abs_diff(&result.r, &oracle.r);
            if result.status != SolveStatus::Converged || du > 1e-6 || dr > 1e-6 {
                let detail = format!(
                    "{method:?} status={:?} |u - u*|_inf = {du:e}, |r - r*|_inf = {dr:e}",
                    result.status
                );
                return dump_failure("oracle", case, &qp, &detail);
            }
        }
    }
    println!("oracle-equivalence: {} / {} cases passed", args.cases, args.cases);

    // Suite 2: dual gradient against central finite differences of psi.
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(1));
    for case in 0..args.cases {
        let qp = random_instance(&mut rng, 6, 6);
        let r: Vec<f64> = (0..qp.ncon()).map(|_| -rng.gen_range(0.0..1.0)).collect();
        if let Some(detail) = gradient_check(&qp, &r).map_err(|e| e.to_string())? {
            return dump_failure("gradient", case, &qp, &detail);
        }
    }
    println!("gradient-check: {} / {} cases passed", args.cases, args.cases);
    Ok(EXIT_OK)
}

/// Central finite differences of the dual objective (step 1e-6) against
/// the analytic gradient; `None` when every component agrees to 1e-5
/// relative error.
fn gradient_check(qp: &ContactQp, r: &[f64]) -> uzawa_contact::Result<Option<String>> {
    const STEP: f64 = 1e-6;
    const TOL: f64 = 1e-5;
    let factor = cholesky_factorize(qp.stiffness())?;
    let (_, gamma) = dual_gradient(&factor, qp, r)?;
    for i in 0..r.len() {
        let mut plus = r.to_vec();
        let mut minus = r.to_vec();
        plus[i] += STEP;
        minus[i] -= STEP;
        let fd = (dual_objective(&factor, qp, &plus)? - dual_objective(&factor, qp, &minus)?)
            / (2.0 * STEP);
        let err = (fd - gamma[i]).abs() / (1.0 + gamma[i].abs());
        if err > TOL {
            return Ok(Some(format!(
                "component {i}: finite difference {fd:e} vs gradient {:e} (relative error {err:e})",
                gamma[i]
            )));
        }
    }
    Ok(None)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm_inf(&diff)
}
