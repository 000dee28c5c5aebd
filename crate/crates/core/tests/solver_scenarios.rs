mod common;

use common::{dalembert, even_bump, linf, odd_bump};
use telegraph_core::demos::{nonuniqueness, NonuniquenessSetup};
use telegraph_core::exact::{holder_problem, PowerSolution};
use telegraph_core::exprlang::{bump, compile};
use telegraph_core::solver::{
    run, run_from_state, sample_levels, FarBoundary, GridSpec, RunOptions, Status,
};
use telegraph_core::{BoundaryKind, MixedProblem, ScalarFn};

fn final_only(grid: &GridSpec) -> RunOptions {
    RunOptions {
        snapshot_stride: grid.nt,
        ..RunOptions::default()
    }
}

fn linear_bump(boundary: BoundaryKind, c: f64, w: f64) -> MixedProblem {
    let mut p = MixedProblem::homogeneous(1.0, boundary);
    p.phi = ScalarFn::unary(move |x| bump(x, c, w));
    p
}

/// L-infinity error at `T` against d'Alembert for successive doublings of `nx`.
fn refinement_errors(
    boundary: BoundaryKind,
    c: f64,
    w: f64,
    t: f64,
    length: f64,
    nx0: usize,
    levels: usize,
) -> Vec<f64> {
    let p = linear_bump(boundary, c, w);
    (0..levels)
        .map(|k| {
            let grid = GridSpec::with_courant(t, length, nx0 << k, 1.0, 0.9).unwrap();
            let traj = run(&p, &grid, FarBoundary::DirichletZero, &final_only(&grid)).unwrap();
            assert_eq!(traj.status, Status::Completed);
            let exact: Vec<f64> = match boundary {
                BoundaryKind::Dirichlet => grid
                    .xs()
                    .iter()
                    .map(|&x| dalembert(|y| odd_bump(y, c, w), 1.0, t, x))
                    .collect(),
                BoundaryKind::Neumann => grid
                    .xs()
                    .iter()
                    .map(|&x| dalembert(|y| even_bump(y, c, w), 1.0, t, x))
                    .collect(),
            };
            linf(&traj.last().values, &exact)
        })
        .collect()
}

fn ratios(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|w| w[0] / w[1]).collect()
}

#[test]
fn dirichlet_reflection_converges_at_second_order() {
    let errs = refinement_errors(BoundaryKind::Dirichlet, 3.0, 2.0, 2.0, 80.0 / 9.0, 200, 3);
    for r in ratios(&errs) {
        assert!((3.5..=4.5).contains(&r), "{errs:?}");
    }
}

#[test]
fn neumann_reflection_converges_at_second_order() {
    // the pulse reaches x = 0 and reflects with even symmetry before T = 2
    let errs = refinement_errors(BoundaryKind::Neumann, 1.5, 1.0, 2.0, 5.0, 100, 4);
    let r = ratios(&errs);
    assert!((3.5..=4.5).contains(r.last().unwrap()), "{errs:?}");
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn narrow_bump_approaches_second_order() {
    let errs = refinement_errors(BoundaryKind::Dirichlet, 2.0, 0.5, 2.0, 80.0 / 9.0, 200, 6);
    let r = ratios(&errs);
    assert!(r.windows(2).all(|w| w[1] > w[0]), "{r:?}");
    assert!((3.5..=4.5).contains(r.last().unwrap()), "{r:?}");
}

#[test]
fn far_boundary_kind_is_invisible_inside_domain_of_dependence() {
    let (t, length, support) = (2.0, 5.0, 3.0);
    let mut p = MixedProblem::homogeneous(1.0, BoundaryKind::Dirichlet);
    p.phi = ScalarFn::unary(|x| bump(x, 2.0, 1.0));
    p.psi = ScalarFn::unary(|x| 0.5 * bump(x, 1.5, 1.0));
    let grid = GridSpec::with_courant(t, length, 250, 1.0, 0.9).unwrap();
    let opts = RunOptions {
        support_bound: Some(support),
        ..RunOptions::default()
    };
    let d = run(&p, &grid, FarBoundary::DirichletZero, &opts).unwrap();
    let n = run(&p, &grid, FarBoundary::NeumannZero, &opts).unwrap();
    assert!(d.warnings.is_empty());
    let inner = grid.xs().iter().filter(|&&x| x <= length - t).count();
    for (a, b) in d.snapshots.iter().zip(&n.snapshots) {
        assert_eq!(a.t, b.t);
        assert!(linf(&a.values[..inner], &b.values[..inner]) <= 1e-12);
    }
}

#[test]
fn short_domain_triggers_warning() {
    let p = linear_bump(BoundaryKind::Dirichlet, 2.0, 1.0);
    let grid = GridSpec::with_courant(2.0, 4.0, 40, 1.0, 0.9).unwrap();
    let opts = RunOptions {
        support_bound: Some(3.0),
        ..RunOptions::default()
    };
    let traj = run(&p, &grid, FarBoundary::DirichletZero, &opts).unwrap();
    assert_eq!(traj.warnings.len(), 1);
    assert_eq!(traj.status, Status::Completed);
}

#[test]
fn klein_gordon_energy_is_nearly_conserved() {
    let mut p = MixedProblem::homogeneous(1.0, BoundaryKind::Neumann);
    p.f = ScalarFn::ternary(|_, _, z| -z);
    p.phi = ScalarFn::unary(|x| bump(x, 2.0, 1.0));
    let grid = GridSpec::new(5.0, 100.0 / 9.0, 200, 400).unwrap();
    assert!((grid.nu(1.0) - 0.9).abs() < 1e-12);
    let opts = RunOptions {
        g: Some(ScalarFn::unary(|z| z)),
        snapshot_stride: 50,
        ..RunOptions::default()
    };
    let traj = run(&p, &grid, FarBoundary::NeumannZero, &opts).unwrap();
    assert_eq!(traj.status, Status::Completed);
    assert_eq!(traj.energy_series.len(), grid.nt);
    let e0 = traj.energy_series[0].1;
    let drift = traj
        .energy_series
        .iter()
        .map(|(_, e)| ((e - e0) / e0).abs())
        .fold(0.0, f64::max);
    assert!(drift <= 0.01, "drift {drift}");
}

#[test]
fn zero_data_stays_bitwise_zero_for_both_boundaries() {
    for boundary in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
        for far in [FarBoundary::DirichletZero, FarBoundary::NeumannZero] {
            let mut p = holder_problem(1.0, 0.5).unwrap();
            p.boundary = boundary;
            let grid = GridSpec::new(3.0, 2.0, 120, 40).unwrap();
            let traj = run(&p, &grid, far, &RunOptions::default()).unwrap();
            assert_eq!(traj.status, Status::Completed);
            assert!(traj.is_identically_zero());
            assert_eq!(traj.snapshots.len(), grid.nt + 1);
        }
    }
}

#[test]
fn glued_solution_is_tracked_at_second_order() {
    let exact = PowerSolution::new(0.5, 1.0).unwrap();
    let p = holder_problem(1.0, 0.5).unwrap();
    let errs: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|&k| {
            let grid = GridSpec::new(1.0, 1.0, 40 * k, 20 * k).unwrap();
            let levels = sample_levels(&grid, 1.5, |t, _| exact.eval(t, 0));
            let traj = run_from_state(
                &p,
                &grid,
                FarBoundary::NeumannZero,
                1.5,
                levels,
                &final_only(&grid),
            )
            .unwrap();
            let last = traj.last();
            assert!((last.t - 2.5).abs() < 1e-12);
            let target = exact.eval(2.5, 0);
            last.values
                .iter()
                .map(|u| (u - target).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    for r in ratios(&errs) {
        assert!((3.5..=4.5).contains(&r), "{errs:?}");
    }
}

#[test]
fn nonuniqueness_demo_separates_two_continuations() {
    let s = nonuniqueness(&NonuniquenessSetup::default()).unwrap();
    assert_eq!(s.zero_status, Status::Completed);
    assert_eq!(s.glued_status, Status::Completed);
    assert!(s.zero_bitwise);
    let exact_gap = 1.5f64.powi(4) / 144.0;
    assert!((s.separation_at_t_end - exact_gap).abs() < 1e-3, "{s:?}");
    assert!(s.separation_at_t_end > 0.03);
}

#[test]
fn glued_levels_under_dirichlet_leave_the_closed_form() {
    let exact = PowerSolution::new(0.5, 1.0).unwrap();
    let mut p = holder_problem(1.0, 0.5).unwrap();
    p.boundary = BoundaryKind::Dirichlet;
    let grid = GridSpec::new(1.0, 1.0, 40, 20).unwrap();
    let levels = sample_levels(&grid, 1.5, |t, _| exact.eval(t, 0));
    let traj = run_from_state(
        &p,
        &grid,
        FarBoundary::NeumannZero,
        1.5,
        levels,
        &final_only(&grid),
    )
    .unwrap();
    let target = exact.eval(2.5, 0);
    let dev = traj
        .last()
        .values
        .iter()
        .map(|u| (u - target).abs())
        .fold(0.0, f64::max);
    assert!(dev > 0.03, "deviation {dev}");
    assert!(PowerSolution::for_boundary(0.5, 1.0, BoundaryKind::Dirichlet).is_err());
}

#[test]
fn negative_energy_data_blow_up_consistently() {
    let mut p = MixedProblem::homogeneous(1.0, BoundaryKind::Dirichlet);
    p.f = compile("z^3", &["t", "x", "z"]).unwrap();
    p.phi = compile("5*bump(x,2,1)", &["x"]).unwrap();
    let times: Vec<f64> = [400, 800]
        .iter()
        .map(|&nx| {
            let grid = GridSpec::with_courant(4.0, 10.0, nx, 1.0, 0.9).unwrap();
            let traj = run(&p, &grid, FarBoundary::DirichletZero, &final_only(&grid)).unwrap();
            match traj.status {
                Status::BlowUpDetected { t } => {
                    assert!(traj.max_abs_u <= 1e6);
                    t
                }
                other => panic!("expected blow-up, got {other:?}"),
            }
        })
        .collect();
    assert!(((times[1] - times[0]) / times[0]).abs() < 0.1, "{times:?}");
}

#[test]
fn positive_energy_data_do_not_blow_up() {
    let mut p = MixedProblem::homogeneous(1.0, BoundaryKind::Dirichlet);
    p.f = compile("z^3", &["t", "x", "z"]).unwrap();
    p.phi = compile("0.1*bump(x,2,1)", &["x"]).unwrap();
    let grid = GridSpec::with_courant(4.0, 10.0, 200, 1.0, 0.9).unwrap();
    let traj = run(&p, &grid, FarBoundary::DirichletZero, &final_only(&grid)).unwrap();
    assert_eq!(traj.status, Status::Completed);
    assert!(traj.max_abs_u < 0.2);
}

#[test]
fn negative_argument_in_holder_term_is_located() {
    let mut p = holder_problem(1.0, 0.5).unwrap();
    p.phi = ScalarFn::unary(|x| x - 0.5);
    let grid = GridSpec::new(1.0, 1.0, 20, 10).unwrap();
    let err = run(&p, &grid, FarBoundary::NeumannZero, &RunOptions::default()).unwrap_err();
    match err {
        telegraph_core::Error::DomainAt { t, x, .. } => {
            assert_eq!(t, 0.0);
            assert!(x < 0.5);
        }
        other => panic!("unexpected {other:?}"),
    }
}
