//! Explicit three-point leapfrog scheme on `[0, T] x [0, L]`:
//!
//! ```text
//! u_j^{n+1} = 2 u_j^n - u_j^{n-1} + nu^2 (u_{j+1}^n - 2 u_j^n + u_{j-1}^n)
//!             + dt^2 (f(t_n, x_j, u_j^n) + F(t_n, x_j)),    nu = a dt / dx
//! ```
//!
//! started from a second-order Taylor step. The boundary condition at `x = 0`
//! is imposed directly (Dirichlet) or through a ghost point (Neumann); the far
//! end `x = L` gets a homogeneous condition of either kind. Blow-up is
//! operationalised as `max |u| > M` or a non-finite value; it is a numerical
//! proxy, not the analytic blow-up time.

use crate::error::{DomainError, Error, Result};
use crate::numerics::{potential, QuadConfig};
use crate::problem::{BoundaryKind, MixedProblem, ScalarFn};

/// Slack on `nu <= 1` for grids whose Courant number is 1 up to rounding.
const CFL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Integration time span.
    pub t_final: f64,
    pub length: f64,
    /// Number of time steps.
    pub nt: usize,
    /// Number of space cells; fields carry `nx + 1` values.
    pub nx: usize,
}

impl GridSpec {
    pub fn new(t_final: f64, length: f64, nt: usize, nx: usize) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) || !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid needs T > 0 and L > 0, got T = {t_final}, L = {length}"
            )));
        }
        if nt < 2 || nx < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs nt >= 2 and nx >= 2, got nt = {nt}, nx = {nx}"
            )));
        }
        Ok(Self {
            t_final,
            length,
            nt,
            nx,
        })
    }

    /// Smallest `nt` keeping the Courant number at or below `nu`.
    pub fn with_courant(t_final: f64, length: f64, nx: usize, a: f64, nu: f64) -> Result<Self> {
        let dx = length / nx as f64;
        let nt = (a * t_final / (nu * dx) - 1e-9).ceil().max(2.0) as usize;
        Self::new(t_final, length, nt, nx)
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.nt as f64
    }

    pub fn dx(&self) -> f64 {
        self.length / self.nx as f64
    }

    pub fn nu(&self, a: f64) -> f64 {
        a * self.dt() / self.dx()
    }

    pub fn check_cfl(&self, a: f64) -> Result<f64> {
        let nu = self.nu(a);
        if nu > 1.0 + CFL_SLACK {
            return Err(Error::CflViolation { nu });
        }
        Ok(nu)
    }

    pub fn x(&self, j: usize) -> f64 {
        if j == self.nx {
            self.length
        } else {
            j as f64 * self.dx()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..=self.nx).map(|j| self.x(j)).collect()
    }

    /// The same domain with `factor` times as many cells and steps.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            nt: self.nt * factor,
            nx: self.nx * factor,
            ..*self
        }
    }
}

/// Homogeneous condition at the truncation point `x = L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarBoundary {
    DirichletZero,
    NeumannZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Completed,
    BlowUpDetected { t: f64 },
    NumericalFailure { t: f64, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: GridSpec,
    pub t0: f64,
    pub snapshots: Vec<Snapshot>,
    /// `(t_{n+1/2}, E_h)`; empty unless a potential was supplied.
    pub energy_series: Vec<(f64, f64)>,
    pub status: Status,
    /// Largest `|u|` over every finite level computed.
    pub max_abs_u: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("a trajectory stores at least its first level")
    }

    /// Snapshot whose time is within half a step of `t`.
    pub fn at(&self, t: f64) -> Option<&Snapshot> {
        let half = 0.5 * self.grid.dt();
        self.snapshots.iter().find(|s| (s.t - t).abs() <= half)
    }

    /// True iff every stored value is exactly `+0.0` or `-0.0`.
    pub fn is_identically_zero(&self) -> bool {
        self.snapshots
            .iter()
            .all(|s| s.values.iter().all(|&v| v == 0.0))
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// `M` in the blow-up test `max |u| > M`.
    pub blowup_threshold: f64,
    /// Store every `snapshot_stride`-th level; the first and last are always kept.
    pub snapshot_stride: usize,
    /// Restoring force `g` (with `f = -g`); enables the energy series.
    pub g: Option<ScalarFn>,
    pub quad: QuadConfig,
    /// Support bound of the data, used only for the domain-of-dependence warning.
    pub support_bound: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            blowup_threshold: 1e6,
            snapshot_stride: 1,
            g: None,
            quad: QuadConfig::default(),
            support_bound: None,
        }
    }
}

fn at_point(t: f64, x: f64) -> impl Fn(DomainError) -> Error {
    move |source| Error::DomainAt { t, x, source }
}

/// Levels at `t = 0` and `t = dt`:
/// `u1 = phi + dt psi + dt^2/2 (a^2 phi'' + f(0, x, phi) + F(0, x))`.
pub fn init_levels(p: &MixedProblem, grid: &GridSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    p.validate()?;
    grid.check_cfl(p.a)?;
    let xs = grid.xs();
    let dt = grid.dt();
    let dx = grid.dx();
    let u0 = xs
        .iter()
        .map(|&x| p.phi.call1(x).map_err(at_point(0.0, x)))
        .collect::<Result<Vec<_>>>()?;

    let curvature: Vec<f64> = if p.phi.has_derivative(0, 2) {
        xs.iter()
            .map(|&x| {
                p.phi
                    .analytic_derivative(0, 2, &[x])
                    .expect("handle checked above")
                    .map_err(at_point(0.0, x))
            })
            .collect::<Result<_>>()?
    } else {
        sampled_curvature(&u0, dx)
    };

    let a2 = p.a * p.a;
    let mut u1 = Vec::with_capacity(u0.len());
    for (j, &x) in xs.iter().enumerate() {
        let psi = p.psi.call1(x).map_err(at_point(0.0, x))?;
        let src = p.source(0.0, x, u0[j]).map_err(at_point(0.0, x))?;
        u1.push(u0[j] + dt * psi + 0.5 * dt * dt * (a2 * curvature[j] + src));
    }
    Ok((u0, u1))
}

/// Second differences of samples, one-sided at both ends.
fn sampled_curvature(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    let h2 = dx * dx;
    let mut d2 = vec![0.0; n];
    for j in 1..n - 1 {
        d2[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / h2;
    }
    if n >= 4 {
        d2[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h2;
        d2[n - 1] = (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) / h2;
    } else {
        d2[0] = d2[1];
        d2[n - 1] = d2[n - 2];
    }
    d2
}

/// One leapfrog step from level `n` (time `t_n`) to `n + 1`.
pub fn step(
    p: &MixedProblem,
    grid: &GridSpec,
    far: FarBoundary,
    t_n: f64,
    u_prev: &[f64],
    u_cur: &[f64],
) -> Result<Vec<f64>> {
    let mut next = vec![0.0; grid.nx + 1];
    step_into(p, grid, far, t_n, u_prev, u_cur, &mut next)?;
    Ok(next)
}

fn step_into(
    p: &MixedProblem,
    grid: &GridSpec,
    far: FarBoundary,
    t_n: f64,
    u_prev: &[f64],
    u_cur: &[f64],
    next: &mut [f64],
) -> Result<()> {
    let nx = grid.nx;
    if u_prev.len() != nx + 1 || u_cur.len() != nx + 1 || next.len() != nx + 1 {
        return Err(Error::InvalidArgument(format!(
            "fields must have nx + 1 = {} values",
            nx + 1
        )));
    }
    let dt = grid.dt();
    let dx = grid.dx();
    let nu2 = grid.nu(p.a).powi(2);
    let dt2 = dt * dt;

    let update = |j: usize, left: f64, right: f64| -> Result<f64> {
        let x = grid.x(j);
        let src = p.source(t_n, x, u_cur[j]).map_err(at_point(t_n, x))?;
        Ok(2.0 * u_cur[j] - u_prev[j] + nu2 * (right - 2.0 * u_cur[j] + left) + dt2 * src)
    };

    for j in 1..nx {
        next[j] = update(j, u_cur[j - 1], u_cur[j + 1])?;
    }

    next[0] = match p.boundary {
        BoundaryKind::Dirichlet => {
            let t = t_n + dt;
            p.mu.call1(t).map_err(at_point(t, 0.0))?
        }
        BoundaryKind::Neumann => {
            let flux = p.mu.call1(t_n).map_err(at_point(t_n, 0.0))?;
            let ghost = u_cur[1] - 2.0 * dx * flux;
            update(0, ghost, u_cur[1])?
        }
    };

    next[nx] = match far {
        FarBoundary::DirichletZero => 0.0,
        FarBoundary::NeumannZero => update(nx, u_cur[nx - 1], u_cur[nx - 1])?,
    };
    Ok(())
}

/// Discrete energy between two consecutive levels, trapezoidal in `x`.
fn discrete_energy(
    g: &ScalarFn,
    a: f64,
    grid: &GridSpec,
    u_cur: &[f64],
    u_next: &[f64],
    quad: QuadConfig,
) -> Result<f64> {
    let dt = grid.dt();
    let dx = grid.dx();
    let nx = grid.nx;
    let mid = |j: usize| 0.5 * (u_next[j] + u_cur[j]);
    let mut pointwise = 0.0;
    for j in 0..=nx {
        let w = if j == 0 || j == nx { 0.5 } else { 1.0 };
        let v = (u_next[j] - u_cur[j]) / dt;
        pointwise += w * (0.5 * v * v + potential(g, mid(j), quad)?);
    }
    let mut gradient = 0.0;
    for j in 0..nx {
        let d = (mid(j + 1) - mid(j)) / dx;
        gradient += 0.5 * a * a * d * d;
    }
    Ok(dx * (pointwise + gradient))
}

fn max_abs(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn blown_up(u: &[f64], threshold: f64) -> bool {
    u.iter().any(|v| !v.is_finite() || v.abs() > threshold)
}

/// Solves from the initial data of `p` over `[0, grid.t_final]`.
pub fn run(
    p: &MixedProblem,
    grid: &GridSpec,
    far: FarBoundary,
    opts: &RunOptions,
) -> Result<Trajectory> {
    let (u0, u1) = init_levels(p, grid)?;
    evolve(p, grid, far, 0.0, u0, u1, 1, opts)
}

/// Continues from two injected consecutive levels at `t0 - dt` and `t0`,
/// integrating over `[t0, t0 + grid.t_final]`.
pub fn run_from_state(
    p: &MixedProblem,
    grid: &GridSpec,
    far: FarBoundary,
    t0: f64,
    levels: (Vec<f64>, Vec<f64>),
    opts: &RunOptions,
) -> Result<Trajectory> {
    p.validate()?;
    grid.check_cfl(p.a)?;
    let (u_prev, u_cur) = levels;
    if u_prev.len() != grid.nx + 1 || u_cur.len() != grid.nx + 1 {
        return Err(Error::InvalidArgument(format!(
            "injected levels must have nx + 1 = {} values",
            grid.nx + 1
        )));
    }
    evolve(p, grid, far, t0 - grid.dt(), u_prev, u_cur, 0, opts)
}

/// Samples `u(t, x)` on the grid at `t0 - dt` and `t0`, ready for
/// [`run_from_state`].
pub fn sample_levels<F>(grid: &GridSpec, t0: f64, u: F) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(f64, f64) -> f64,
{
    let xs = grid.xs();
    let prev = xs.iter().map(|&x| u(t0 - grid.dt(), x)).collect();
    let cur = xs.iter().map(|&x| u(t0, x)).collect();
    (prev, cur)
}

/// Shared stepping loop. `u_a` sits at `t_start`, `u_b` one step later;
/// `u_b` is level `first_level` of the grid, which ends at level `nt`.
#[allow(clippy::too_many_arguments)]
fn evolve(
    p: &MixedProblem,
    grid: &GridSpec,
    far: FarBoundary,
    t_start: f64,
    u_a: Vec<f64>,
    u_b: Vec<f64>,
    first_level: usize,
    opts: &RunOptions,
) -> Result<Trajectory> {
    if !(opts.blowup_threshold > 0.0) {
        return Err(Error::InvalidArgument(
            "blow-up threshold must be positive".into(),
        ));
    }
    let dt = grid.dt();
    let stride = opts.snapshot_stride.max(1);
    let level_time = |n: usize| t_start + (n + 1 - first_level) as f64 * dt;
    let t_origin = if first_level == 1 {
        t_start
    } else {
        t_start + dt
    };

    let mut warnings = Vec::new();
    if let Some(support) = opts.support_bound {
        let reach = support + p.a * grid.t_final;
        if grid.length < reach {
            warnings.push(format!(
                "L = {} < X + aT = {reach}: the far boundary may influence the solution",
                grid.length
            ));
        }
    }

    let mut traj = Trajectory {
        grid: *grid,
        t0: t_origin,
        snapshots: Vec::new(),
        energy_series: Vec::new(),
        status: Status::Completed,
        max_abs_u: 0.0,
        warnings,
    };

    // levels before `first_level` are only stored when run() produced them
    if first_level == 1 {
        if blown_up(&u_a, opts.blowup_threshold) {
            traj.status = Status::BlowUpDetected { t: t_start };
            return Ok(traj);
        }
        traj.max_abs_u = max_abs(&u_a);
        traj.snapshots.push(Snapshot {
            t: t_start,
            values: u_a.clone(),
        });
    }

    let record = |traj: &mut Trajectory, n: usize, prev: &[f64], cur: &[f64]| -> bool {
        let t = level_time(n);
        if blown_up(cur, opts.blowup_threshold) {
            traj.status = Status::BlowUpDetected { t };
            return false;
        }
        traj.max_abs_u = traj.max_abs_u.max(max_abs(cur));
        if let Some(g) = &opts.g {
            match discrete_energy(g, p.a, grid, prev, cur, opts.quad) {
                Ok(e) => traj.energy_series.push((t - 0.5 * dt, e)),
                Err(err) => {
                    traj.status = Status::NumericalFailure {
                        t,
                        reason: err.to_string(),
                    };
                    return false;
                }
            }
        }
        if n.is_multiple_of(stride) || n == grid.nt || n == first_level {
            traj.snapshots.push(Snapshot {
                t,
                values: cur.to_vec(),
            });
        }
        true
    };

    let (mut prev, mut cur) = (u_a, u_b);
    if !record(&mut traj, first_level, &prev, &cur) {
        return Ok(traj);
    }
    let mut next = vec![0.0; grid.nx + 1];
    for n in first_level..grid.nt {
        step_into(p, grid, far, level_time(n), &prev, &cur, &mut next)?;
        if !record(&mut traj, n + 1, &cur, &next) {
            break;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(traj)
}
