//! End-to-end acceptance suite. Each test checks one numbered criterion
//! against the cantilever benchmark, the analytic spring instance, the
//! randomized oracle suites, or the CLI, and prints a single
//! `[criterion N] PASS` line with the measured values.

use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uzawa_contact::diagnostics::{dual_objective, kkt_residual, primal_objective};
use uzawa_contact::fem::{build_benchmark, paper_spec};
use uzawa_contact::linalg::{cholesky_factorize, norm2, norm_inf};
use uzawa_contact::oracle::{active_set_solve, random_instance};
use uzawa_contact::solver::{dual_gradient, solve};
use uzawa_contact::{ContactQp, Method, SolveResult, SolveStatus, SolverConfig};

/// Shared (30, 10) benchmark runs, computed once for the whole suite.
struct Bench {
    qp: ContactQp,
    /// Uzawa at eps = 1e-6, auto step size.
    uzawa: SolveResult,
    /// Accelerated (no restart) at eps = 1e-6, with history.
    accel: SolveResult,
    /// Accelerated with restart at eps = 1e-6, with history.
    restart: SolveResult,
    /// Accelerated with restart at eps = 1e-8.
    restart_e8: SolveResult,
    /// Dual optimum estimate from a restart run at eps = 1e-10.
    psi_star: f64,
}

fn bench() -> &'static Bench {
    static BENCH: OnceLock<Bench> = OnceLock::new();
    BENCH.get_or_init(|| {
        let qp = build_benchmark(&paper_spec(30).unwrap()).unwrap();
        let run = |method: Method, eps: f64, history: bool| {
            let mut cfg = SolverConfig::new(method);
            cfg.epsilon = eps;
            cfg.record_history = history;
            let res = solve(&qp, &cfg, None).unwrap();
            assert_eq!(res.status, SolveStatus::Converged, "{method:?} at eps {eps}");
            res
        };
        let uzawa = run(Method::Uzawa, 1e-6, false);
        let accel = run(Method::Accelerated, 1e-6, true);
        let restart = run(Method::AcceleratedRestart, 1e-6, true);
        let restart_e8 = run(Method::AcceleratedRestart, 1e-8, false);
        let tight = run(Method::AcceleratedRestart, 1e-10, false);
        let factor = cholesky_factorize(qp.stiffness()).unwrap();
        let psi_star = dual_objective(&factor, &qp, &tight.r).unwrap();
        Bench {
            qp,
            uzawa,
            accel,
            restart,
            restart_e8,
            psi_star,
        }
    })
}

/// `psi(r^(k))`: history row `k - 1` records the k-th dual update.
fn psi_at(res: &SolveResult, k: usize) -> f64 {
    res.history[k - 1].dual_obj
}

#[test]
fn criterion_01_benchmark_sizes() {
    let start = Instant::now();
    let qp = build_benchmark(&paper_spec(30).unwrap()).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(qp.dim(), 660);
    assert_eq!(qp.ncon(), 30);
    assert!(elapsed.as_secs_f64() < 1.0, "build took {elapsed:?}");
    println!("[criterion 1] PASS — d = 660, m = 30, built in {elapsed:?}");
}

#[test]
fn criterion_02_contact_fraction() {
    let b = bench();
    let r = &b.restart_e8.r;
    let threshold = 1e-8 * norm_inf(r);
    let active = r.iter().filter(|&&ri| ri < -threshold).count();
    assert!(
        (21..=23).contains(&active),
        "expected 22 +/- 1 contact nodes, found {active}"
    );
    println!(
        "[criterion 2] PASS — {active} of 30 contact nodes carry reactions ({:.1}%)",
        100.0 * active as f64 / 30.0
    );
}

#[test]
fn criterion_03_acceleration_effect() {
    let b = bench();
    let (iu, ia, ir) = (b.uzawa.iterations, b.accel.iterations, b.restart.iterations);
    assert_eq!(b.uzawa.alpha, b.accel.alpha);
    assert_eq!(b.uzawa.alpha, b.restart.alpha);
    assert!(ir * 5 <= iu, "restart {ir} vs uzawa {iu}: less than 5x speedup");
    assert!(ia < iu, "accelerated {ia} not faster than uzawa {iu}");
    println!(
        "[criterion 3] PASS — iterations: uzawa {iu}, accel {ia}, accel-restart {ir} \
         ({:.1}x speedup with restart)",
        iu as f64 / ir as f64
    );
}

#[test]
fn criterion_04_monotone_under_restart() {
    let b = bench();
    let mut restarts = 0;
    for pair in b.restart.history.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        let slack = 1e-12 * (1.0 + prev.dual_obj.abs());
        assert!(
            next.dual_obj >= prev.dual_obj - slack,
            "dual objective dropped at k = {}: {} -> {}",
            next.k,
            prev.dual_obj,
            next.dual_obj
        );
        restarts += usize::from(next.restarted);
    }
    println!(
        "[criterion 4] PASS — dual objective nondecreasing over {} steps ({restarts} restarts)",
        b.restart.history.len()
    );
}

#[test]
fn criterion_05_quadratic_rate_without_restart() {
    let b = bench();
    // C calibrated at k = 10 with a 3x safety factor
    let gap10 = b.psi_star - psi_at(&b.accel, 10);
    assert!(gap10 > 0.0, "dual gap at k = 10 should be positive");
    let c = 3.0 * gap10 * 100.0;
    let mut worst = 0.0_f64;
    for k in 10..=100 {
        let gap = b.psi_star - psi_at(&b.accel, k);
        let bound = c / (k * k) as f64;
        assert!(gap <= bound, "O(1/k^2) violated at k = {k}: gap {gap:e} > {bound:e}");
        worst = worst.max(gap / bound);
    }
    println!("[criterion 5] PASS — dual gap <= C/k^2 for k in 10..=100 (worst ratio {worst:.3})");
}

#[test]
fn criterion_06_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut worst_u = 0.0_f64;
    let mut worst_r = 0.0_f64;
    for case in 0..200 {
        let qp = random_instance(&mut rng, 6, 6);
        let oracle = active_set_solve(&qp).unwrap();
        for method in [Method::Uzawa, Method::Accelerated] {
            let mut cfg = SolverConfig::new(method);
            cfg.epsilon = 1e-10;
            let res = solve(&qp, &cfg, None).unwrap();
            assert_eq!(res.status, SolveStatus::Converged, "case {case} {method:?}");
            let du = max_abs_diff(&res.u, &oracle.u);
            let dr = max_abs_diff(&res.r, &oracle.r);
            assert!(du <= 1e-6, "case {case} {method:?}: |u - u*|_inf = {du:e}");
            assert!(dr <= 1e-6, "case {case} {method:?}: |r - r*|_inf = {dr:e}");
            worst_u = worst_u.max(du);
            worst_r = worst_r.max(dr);
        }
    }
    println!(
        "[criterion 6] PASS — 200 random instances match the active-set oracle \
         (worst |u - u*|_inf = {worst_u:.1e}, |r - r*|_inf = {worst_r:.1e})"
    );
}

#[test]
fn criterion_07_dual_gradient_check() {
    const STEP: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0_f64;
    for case in 0..50 {
        let qp = random_instance(&mut rng, 6, 6);
        let r: Vec<f64> = (0..qp.ncon()).map(|_| -rng.gen_range(0.0..1.0)).collect();
        let factor = cholesky_factorize(qp.stiffness()).unwrap();
        let (_, gamma) = dual_gradient(&factor, &qp, &r).unwrap();
        for i in 0..r.len() {
            let mut plus = r.clone();
            let mut minus = r.clone();
            plus[i] += STEP;
            minus[i] -= STEP;
            let fd = (dual_objective(&factor, &qp, &plus).unwrap()
                - dual_objective(&factor, &qp, &minus).unwrap())
                / (2.0 * STEP);
            let err = (fd - gamma[i]).abs() / (1.0 + gamma[i].abs());
            assert!(err <= 1e-5, "case {case} component {i}: relative error {err:e}");
            worst = worst.max(err);
        }
    }
    println!(
        "[criterion 7] PASS — finite differences match the dual gradient on 50 instances \
         (worst relative error {worst:.1e})"
    );
}

#[test]
fn criterion_08_kkt_quality() {
    let b = bench();
    let kkt = kkt_residual(&b.qp, &b.restart.u, &b.restart.r).unwrap();
    let e1 = norm2(&kkt.e1);
    let bound = 1e-8 * norm_inf(b.qp.load());
    assert!(kkt.total <= 1e-4, "kkt total {:e}", kkt.total);
    assert!(e1 <= bound, "force balance residual {e1:e} > {bound:e}");
    println!(
        "[criterion 8] PASS — kkt total {:.1e} <= 1e-4, |e1| {e1:.1e} <= {bound:.1e}",
        kkt.total
    );
}

#[test]
fn criterion_09_spring_analytic() {
    use uzawa_contact::linalg::{DenseMatrix, SymMatrix};
    let qp = ContactQp::new(
        SymMatrix::from_row_major(1, vec![2.0]).unwrap(),
        vec![4.0],
        DenseMatrix::from_row_major(1, 1, vec![1.0]).unwrap(),
        vec![1.5],
    )
    .unwrap();
    let factor = cholesky_factorize(qp.stiffness()).unwrap();
    for method in [Method::Uzawa, Method::Accelerated, Method::AcceleratedRestart] {
        let mut cfg = SolverConfig::new(method);
        cfg.epsilon = 1e-10;
        let res = solve(&qp, &cfg, None).unwrap();
        assert_eq!(res.status, SolveStatus::Converged, "{method:?}");
        assert!((res.u[0] - 1.5).abs() <= 1e-6, "{method:?}: u = {}", res.u[0]);
        assert!((res.r[0] + 1.0).abs() <= 1e-6, "{method:?}: r = {}", res.r[0]);
        let gap = (primal_objective(&qp, &res.u).unwrap()
            - dual_objective(&factor, &qp, &res.r).unwrap())
        .abs();
        assert!(gap <= 1e-9, "{method:?}: duality gap {gap:e}");
    }
    println!("[criterion 9] PASS — all three methods reach u = 1.5, r = -1 with zero duality gap");
}

#[test]
fn criterion_10_cli_determinism() {
    let tmp = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("determinism");
    let _ = std::fs::remove_dir_all(&tmp);
    let files = ["uzawa.csv", "accel.csv", "accel-restart.csv", "compare.json"];
    let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
    for run in 0..2 {
        let out = tmp.join(format!("run{run}"));
        let status = Command::new(env!("CARGO_BIN_EXE_uzawa-contact"))
            .args(["compare", "--nx", "30", "--ny", "10", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "compare run {run} exited with {status}");
        outputs.push(
            files
                .iter()
                .map(|f| std::fs::read(out.join(f)).unwrap())
                .collect(),
        );
    }
    for (file, (a, b)) in files.iter().zip(outputs[0].iter().zip(&outputs[1])) {
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    println!("[criterion 10] PASS — two `compare --nx 30 --ny 10` runs are byte-identical");
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
