//! Canned numerical demonstrations built from the other modules.

use crate::error::{Error, Result};
use crate::exact::{holder_problem, PowerSolution};
use crate::solver::{
    run, run_from_state, sample_levels, FarBoundary, GridSpec, RunOptions, Status,
};

/// Two continuations of the zero-data Hölder problem: the zero solution and
/// the glued power solution injected at `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonuniquenessSetup {
    pub alpha: f64,
    pub shift: f64,
    pub t0: f64,
    pub t_end: f64,
    pub a: f64,
    pub length: f64,
    /// Space cells.
    pub nx: usize,
    /// Time steps across `[t0, t_end]`.
    pub nt: usize,
}

impl Default for NonuniquenessSetup {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            shift: 1.0,
            t0: 1.5,
            t_end: 2.5,
            a: 1.0,
            length: 1.0,
            nx: 50,
            nt: 100,
        }
    }
}

impl NonuniquenessSetup {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::AlphaOutOfRange(self.alpha));
        }
        if !(self.shift > 0.0 && self.shift < self.t0 && self.t0 < self.t_end)
            || !self.t_end.is_finite()
        {
            return Err(Error::InvalidArgument(format!(
                "need 0 < s < t0 < t_end, got s = {}, t0 = {}, t_end = {}",
                self.shift, self.t0, self.t_end
            )));
        }
        Ok(())
    }

    fn grid(&self, refine: usize) -> Result<GridSpec> {
        GridSpec::new(
            self.t_end - self.t0,
            self.length,
            self.nt * refine,
            self.nx * refine,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonuniquenessSummary {
    pub zero_status: Status,
    pub glued_status: Status,
    pub zero_max_abs: f64,
    /// Every stored value of the zero run is exactly `0.0`.
    pub zero_bitwise: bool,
    /// `max_j |u_j - u_p(t_end)|` of the glued run.
    pub glued_final_error_vs_exact: f64,
    /// `max_j |u_glued - u_zero|` at `t_end`.
    pub separation_at_t_end: f64,
    /// Glued error at `(nt, nx)` over the error at `(2 nt, 2 nx)`.
    pub convergence_ratio: f64,
}

fn glued_error(
    setup: &NonuniquenessSetup,
    exact: &PowerSolution,
    refine: usize,
) -> Result<(Status, Vec<f64>, f64)> {
    let p = holder_problem(setup.a, setup.alpha)?;
    let grid = setup.grid(refine)?;
    let levels = sample_levels(&grid, setup.t0, |t, _| exact.eval(t, 0));
    let opts = RunOptions {
        snapshot_stride: grid.nt,
        ..RunOptions::default()
    };
    let traj = run_from_state(&p, &grid, FarBoundary::NeumannZero, setup.t0, levels, &opts)?;
    let last = traj.last().clone();
    let target = exact.eval(last.t, 0);
    let err = last
        .values
        .iter()
        .map(|u| (u - target).abs())
        .fold(0.0, f64::max);
    Ok((traj.status, last.values, err))
}

pub fn nonuniqueness(setup: &NonuniquenessSetup) -> Result<NonuniquenessSummary> {
    setup.validate()?;
    let exact =
        PowerSolution::for_boundary(setup.alpha, setup.shift, crate::BoundaryKind::Neumann)?;
    let p = holder_problem(setup.a, setup.alpha)?;

    let glued_grid = setup.grid(1)?;
    let dt = glued_grid.dt();
    let zero_steps = ((setup.t_end / dt) - 1e-9).ceil() as usize;
    let zero_grid = GridSpec::new(setup.t_end, setup.length, zero_steps, setup.nx)?;
    let zero = run(
        &p,
        &zero_grid,
        FarBoundary::NeumannZero,
        &RunOptions {
            snapshot_stride: zero_steps,
            ..RunOptions::default()
        },
    )?;

    let (glued_status, glued_final, err1) = glued_error(setup, &exact, 1)?;
    let (_, _, err2) = glued_error(setup, &exact, 2)?;

    let zero_final = &zero.last().values;
    let separation = glued_final
        .iter()
        .zip(zero_final)
        .map(|(g, z)| (g - z).abs())
        .fold(0.0, f64::max);

    Ok(NonuniquenessSummary {
        zero_bitwise: zero.is_identically_zero(),
        zero_status: zero.status,
        glued_status,
        zero_max_abs: zero.max_abs_u,
        glued_final_error_vs_exact: err1,
        separation_at_t_end: separation,
        convergence_ratio: err1 / err2,
    })
}
