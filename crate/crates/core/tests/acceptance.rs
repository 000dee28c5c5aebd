//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runtime limits are part of each criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{bump_energy_midpoint, dalembert, linf, odd_bump};
use telegraph_core::demos::{nonuniqueness, NonuniquenessSetup};
use telegraph_core::energy::{
    blowup_certificate, sign_condition, BlowupConfig, BlowupVerdict, EnergyProblem,
};
use telegraph_core::exact::{beta_forms, power_params, PowerSolution};
use telegraph_core::exprlang::{bump, compile, parse};
use telegraph_core::matching::{check, MatchingOptions, SecondOrderForm, Verdict};
use telegraph_core::numerics::{FdConfig, QuadConfig};
use telegraph_core::solver::{run, FarBoundary, GridSpec, RunOptions, Status};
use telegraph_core::{BoundaryKind, MixedProblem, ScalarFn};

type Check = Result<String, String>;

/// Name, runtime limit in seconds, body.
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn final_only(grid: &GridSpec) -> RunOptions {
    RunOptions {
        snapshot_stride: grid.nt,
        ..RunOptions::default()
    }
}

fn power_parameters() -> Check {
    let mut worst: f64 = 0.0;
    for k in 1..=9 {
        let alpha = k as f64 / 10.0;
        let spread = beta_forms(alpha)
            .map_err(|e| e.to_string())?
            .max_rel_spread();
        ensure(spread <= 1e-12, || {
            format!("alpha = {alpha}: beta forms spread {spread:e}")
        })?;
        worst = worst.max(spread);
    }
    let half = power_params(0.5).map_err(|e| e.to_string())?;
    ensure(
        rel(half.beta, 1.0 / 144.0) <= 4.0 * f64::EPSILON && half.gamma == 4.0,
        || format!("alpha = 1/2 gives {half:?}"),
    )?;
    let third = power_params(1.0 / 3.0).map_err(|e| e.to_string())?;
    let target = 6f64.powf(-1.5);
    ensure(
        rel(third.beta, target) <= 4.0 * f64::EPSILON
            && rel(third.gamma, 3.0) <= 4.0 * f64::EPSILON,
        || format!("alpha = 1/3 gives {third:?}, want beta = {target}"),
    )?;
    Ok(format!(
        "max beta spread {worst:.2e}; (1/144, 4) and 6^-1.5 reproduced"
    ))
}

fn exact_residual() -> Check {
    let grid = linspace(0.0, 2.0, 200);
    let mut worst: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.7] {
        for s in [0.0, 1.0] {
            let ps = PowerSolution::new(alpha, s).map_err(|e| e.to_string())?;
            let r = ps.pde_residual(1.0, &grid);
            ensure(r <= 1e-9, || {
                format!("alpha = {alpha}, s = {s}: residual {r:e}")
            })?;
            worst = worst.max(r);
        }
    }
    Ok(format!("max |u_tt - u^alpha| = {worst:.2e}"))
}

fn seam_smoothness() -> Check {
    let ps = PowerSolution::new(0.5, 1.0).map_err(|e| e.to_string())?;
    let (_, _, coarse) = ps.seam_gap(1e-3).map_err(|e| e.to_string())?;
    let (_, _, fine) = ps.seam_gap(1e-4).map_err(|e| e.to_string())?;
    let ratio = coarse / fine;
    ensure((95.0..=105.0).contains(&ratio), || {
        format!("seam gap ratio {ratio}")
    })?;
    Ok(format!("g2(1e-3) / g2(1e-4) = {ratio:.4}"))
}

fn matching_examples() -> Check {
    let opts = MatchingOptions::default();
    let run_check =
        |p: &MixedProblem, opts: MatchingOptions| check(p, opts).map_err(|e| e.to_string());

    let zero = MixedProblem::homogeneous(1.0, BoundaryKind::Dirichlet);
    let r = run_check(&zero, opts)?;
    ensure(r.verdict == Verdict::Compatible, || {
        format!("all-zero Dirichlet: {r:?}")
    })?;

    let mut unit_mu = zero.clone();
    unit_mu.mu = ScalarFn::constant(1, 1.0);
    let r = run_check(&unit_mu, opts)?;
    ensure(
        r.verdict
            == Verdict::NonexistenceCertificate {
                first_violated_order: 0,
            },
        || format!("mu = 1 Dirichlet: {r:?}"),
    )?;

    let mut cosine = MixedProblem::homogeneous(2.0, BoundaryKind::Dirichlet);
    cosine.mu = compile("1", &["t"]).map_err(|e| e.to_string())?;
    cosine.phi = compile("cos(x)", &["x"]).map_err(|e| e.to_string())?;
    let opts_derived = MatchingOptions {
        form: SecondOrderForm::Derived,
        ..opts
    };
    let fd = run_check(&cosine, opts_derived)?;
    let fd_r2 = fd.residuals[2].value;
    ensure(!fd.analytic && (fd_r2 - 4.0).abs() <= 1e-5, || {
        format!("cos data, FD: {fd:?}")
    })?;
    cosine.mu = ScalarFn::constant(1, 1.0);
    cosine.phi = ScalarFn::unary(f64::cos).with_derivatives1(|x| -x.sin(), |x| -x.cos());
    let an = run_check(&cosine, opts_derived)?;
    let an_r2 = an.residuals[2].value;
    ensure(an.analytic && (an_r2 - 4.0).abs() <= 1e-12, || {
        format!("cos data, analytic: {an:?}")
    })?;

    let zero_n = MixedProblem::homogeneous(1.0, BoundaryKind::Neumann);
    let r = run_check(&zero_n, opts)?;
    ensure(
        r.verdict == Verdict::Compatible && r.residuals.iter().all(|r| r.value == 0.0),
        || format!("all-zero Neumann: {r:?}"),
    )?;
    let mut unit_flux = zero_n.clone();
    unit_flux.mu = ScalarFn::constant(1, 1.0);
    let r = run_check(&unit_flux, opts)?;
    ensure(r.residuals[0].value == 1.0, || {
        format!("mu = 1 Neumann: {r:?}")
    })?;
    let mut sine = zero_n;
    sine.phi = compile("sin(x)", &["x"]).map_err(|e| e.to_string())?;
    let r = run_check(
        &sine,
        MatchingOptions {
            fd: FdConfig::forward(),
            ..opts
        },
    )?;
    let r0 = r.residuals[0].value;
    ensure((r0 + 1.0).abs() <= 1e-7, || {
        format!("phi = sin Neumann: {r:?}")
    })?;

    Ok(format!(
        "r2(cos) = 4 {:+.1e} (FD), {:+.1e} (analytic); Neumann r0(sin) = {r0:.9}",
        fd_r2 - 4.0,
        an_r2 - 4.0
    ))
}

fn energy_criterion() -> Check {
    let cubic = || ScalarFn::unary(|z| -z * z * z);
    let quad = QuadConfig::default();
    let violations =
        sign_condition(&cubic(), 4.0, -7.5, 7.5, 201, quad).map_err(|e| e.to_string())?;
    ensure(violations.is_empty(), || {
        format!("{} sign violations for lambda = 4", violations.len())
    })?;

    let ep = EnergyProblem::new(
        1.0,
        cubic(),
        compile("5*bump(x,2,1)", &["x"]).map_err(|e| e.to_string())?,
        ScalarFn::zero(1),
        BoundaryKind::Dirichlet,
        4.0,
    )
    .map_err(|e| e.to_string())?;
    let report =
        blowup_certificate(&ep, 4.0, BlowupConfig::default()).map_err(|e| e.to_string())?;
    ensure(report.e0 < 0.0, || {
        format!("E0 = {} is not negative", report.e0)
    })?;
    ensure(
        report.verdict == BlowupVerdict::CertificateOfNonexistence,
        || format!("verdict {:?}", report.verdict),
    )?;
    let oracle = bump_energy_midpoint(5.0, 1.0, 4.0, 1_000_000, |z| -z.powi(4) / 4.0);
    let err = rel(report.e0, oracle);
    ensure(err <= 1e-6, || {
        format!("E0 = {} vs midpoint {oracle}: rel {err:e}", report.e0)
    })?;
    Ok(format!(
        "E0 = {:.10} (midpoint oracle rel err {err:.1e}), certificate issued",
        report.e0
    ))
}

fn solver_convergence() -> Check {
    let (c, w, t) = (3.0, 2.0, 2.0);
    let mut p = MixedProblem::homogeneous(1.0, BoundaryKind::Dirichlet);
    p.phi = ScalarFn::unary(move |x| bump(x, c, w));
    let mut errs = Vec::new();
    for nx in [200, 400, 800] {
        let grid =
            GridSpec::with_courant(t, 80.0 / 9.0, nx, 1.0, 0.9).map_err(|e| e.to_string())?;
        ensure((grid.nu(1.0) - 0.9).abs() < 1e-12, || {
            format!("nu = {} at nx = {nx}", grid.nu(1.0))
        })?;
        let traj = run(&p, &grid, FarBoundary::DirichletZero, &final_only(&grid))
            .map_err(|e| e.to_string())?;
        let exact: Vec<f64> = grid
            .xs()
            .iter()
            .map(|&x| dalembert(|y| odd_bump(y, c, w), 1.0, t, x))
            .collect();
        errs.push(linf(&traj.last().values, &exact));
    }
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(ratios.iter().all(|r| (3.5..=4.5).contains(r)), || {
        format!("errors {errs:?}, ratios {ratios:?}")
    })?;
    Ok(format!(
        "ratios {:.3}, {:.3} (errors {:.2e} -> {:.2e})",
        ratios[0], ratios[1], errs[0], errs[2]
    ))
}

fn energy_drift() -> Check {
    let mut p = MixedProblem::homogeneous(1.0, BoundaryKind::Neumann);
    p.f = ScalarFn::ternary(|_, _, z| -z);
    p.phi = ScalarFn::unary(|x| bump(x, 2.0, 1.0));
    let grid = GridSpec::new(5.0, 100.0 / 9.0, 200, 400).map_err(|e| e.to_string())?;
    let opts = RunOptions {
        g: Some(ScalarFn::unary(|z| z)),
        snapshot_stride: grid.nt,
        ..RunOptions::default()
    };
    let traj = run(&p, &grid, FarBoundary::NeumannZero, &opts).map_err(|e| e.to_string())?;
    ensure(traj.status == Status::Completed, || {
        format!("status {:?}", traj.status)
    })?;
    let e0 = traj.energy_series[0].1;
    let drift = traj
        .energy_series
        .iter()
        .map(|(_, e)| ((e - e0) / e0).abs())
        .fold(0.0, f64::max);
    ensure(drift <= 0.01, || format!("relative drift {drift:e}"))?;
    Ok(format!(
        "relative drift {drift:.2e} over t in [0, 5], nu = {:.3}",
        grid.nu(1.0)
    ))
}

fn nonuniqueness_demo() -> Check {
    let s = nonuniqueness(&NonuniquenessSetup::default()).map_err(|e| e.to_string())?;
    ensure(s.zero_bitwise && s.zero_status == Status::Completed, || {
        format!("zero run: {s:?}")
    })?;
    ensure(s.glued_status == Status::Completed, || {
        format!("glued run: {s:?}")
    })?;
    ensure((3.5..=4.5).contains(&s.convergence_ratio), || {
        format!("glued error ratio {}", s.convergence_ratio)
    })?;
    ensure(s.separation_at_t_end > 0.03, || {
        format!("separation {}", s.separation_at_t_end)
    })?;
    Ok(format!(
        "zero run bitwise zero; glued error {:.2e}, ratio {:.3}; separation {:.5}",
        s.glued_final_error_vs_exact, s.convergence_ratio, s.separation_at_t_end
    ))
}

fn blowup_demo() -> Check {
    let mut p = MixedProblem::homogeneous(1.0, BoundaryKind::Dirichlet);
    p.f = compile("z^3", &["t", "x", "z"]).map_err(|e| e.to_string())?;
    p.phi = compile("5*bump(x,2,1)", &["x"]).map_err(|e| e.to_string())?;
    let mut times = Vec::new();
    for nx in [400, 800] {
        let grid = GridSpec::with_courant(4.0, 10.0, nx, 1.0, 0.9).map_err(|e| e.to_string())?;
        let traj = run(&p, &grid, FarBoundary::DirichletZero, &final_only(&grid))
            .map_err(|e| e.to_string())?;
        match traj.status {
            Status::BlowUpDetected { t } if t.is_finite() => times.push(t),
            other => return Err(format!("nx = {nx}: status {other:?}")),
        }
    }
    let change = rel(times[1], times[0]);
    ensure(change < 0.1, || format!("detection times {times:?}"))?;
    Ok(format!(
        "t_detect = {:.4} (nx = 400), {:.4} (nx = 800), change {:.1}%",
        times[0],
        times[1],
        100.0 * change
    ))
}

/// Random source text drawn from the grammar, with optional spacing and
/// redundant parentheses.
fn gen_expr(rng: &mut ChaCha8Rng, depth: u32, vars: &[&str]) -> String {
    let sp = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.3) { " " } else { "" };
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => format!("{}", rng.gen_range(0..100)),
            1 => format!("{:.3}", rng.gen_range(0.0..10.0)),
            2 => format!("{}e-{}", rng.gen_range(1..10), rng.gen_range(1..4)),
            _ => {
                let names: Vec<&str> = vars.iter().copied().chain(["pi", "e"]).collect();
                names.choose(rng).unwrap().to_string()
            }
        };
    }
    match rng.gen_range(0..5) {
        0 => format!("-{}", gen_expr(rng, depth - 1, vars)),
        1 => format!("({})", gen_expr(rng, depth - 1, vars)),
        2 => {
            let b = telegraph_core::exprlang::Builtin::ALL
                .choose(rng)
                .copied()
                .unwrap();
            let args: Vec<String> = (0..b.arity())
                .map(|_| gen_expr(rng, depth - 1, vars))
                .collect();
            format!("{}({})", b.name(), args.join(&format!(",{}", sp(rng))))
        }
        _ => {
            let op = ["+", "-", "*", "/", "^"].choose(rng).unwrap();
            let (l, r) = (
                gen_expr(rng, depth - 1, vars),
                gen_expr(rng, depth - 1, vars),
            );
            format!("{l}{}{op}{}{r}", sp(rng), sp(rng))
        }
    }
}

fn expression_language() -> Check {
    let vars = ["t", "x", "z"];
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e1e_97a9);
    let corpus = 2000;
    for i in 0..corpus {
        let src = gen_expr(&mut rng, 5, &vars);
        let first = parse(&src, &vars).map_err(|e| format!("#{i} `{src}` failed to parse: {e}"))?;
        let printed = first.to_string();
        let second =
            parse(&printed, &vars).map_err(|e| format!("#{i} printed `{printed}` failed: {e}"))?;
        ensure(
            first.root() == second.root() && second.to_string() == printed,
            || format!("#{i} `{src}` -> `{printed}` -> `{second}`"),
        )?;
        let point = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        ];
        let (a, b) = (
            first.eval_positional(&point),
            second.eval_positional(&point),
        );
        let same = match (&a, &b) {
            (Ok(u), Ok(v)) => u.to_bits() == v.to_bits(),
            (Err(_), Err(_)) => true,
            _ => false,
        };
        ensure(same, || format!("#{i} `{src}` evaluates to {a:?} vs {b:?}"))?;
    }
    for (src, vars, pos) in [
        ("2+*3", &[][..], 2),
        ("sin(y)", &["x"][..], 4),
        ("1 + max(x)", &["x"][..], 4),
    ] {
        match parse(src, vars) {
            Err(e) if e.position == pos => {}
            other => return Err(format!("`{src}`: expected error at {pos}, got {other:?}")),
        }
    }
    Ok(format!(
        "{corpus} generated expressions round-trip; 3 error positions correct"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("power-solution parameters", 1, power_parameters),
        ("exact family PDE residual", 1, exact_residual),
        ("seam smoothness", 1, seam_smoothness),
        ("matching checker examples", 1, matching_examples),
        ("energy blow-up criterion", 10, energy_criterion),
        ("solver convergence vs d'Alembert", 30, solver_convergence),
        ("discrete energy drift", 30, energy_drift),
        ("nonuniqueness demonstration", 60, nonuniqueness_demo),
        ("blow-up demonstration", 60, blowup_demo),
        ("expression language round trip", 5, expression_language),
    ];
    let mut failed = 0;
    for (i, (name, limit, body)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = body();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed >= Duration::from_secs(*limit) => Err(format!(
                "{msg}; runtime {:.2} s exceeds {limit} s",
                elapsed.as_secs_f64()
            )),
            other => other,
        };
        let (tag, msg) = match outcome {
            Ok(msg) => ("PASS", msg),
            Err(msg) => {
                failed += 1;
                ("FAIL", msg)
            }
        };
        println!(
            "{tag} {:>2}. {name}: {msg} [{:.3} s / {limit} s]",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
