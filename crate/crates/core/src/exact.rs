//! Power-law solutions of the Hölder problem
//!
//! ```text
//! u_tt - a^2 u_xx - u^alpha = 0,  0 < alpha < 1,
//! u(0, x) = u_t(0, x) = 0,  u_x(t, 0) = 0.
//! ```
//!
//! Besides `u = 0`, every shifted power `u(t) = beta (t - s)_+^gamma` with
//! `gamma = 2/(1 - alpha)` and `beta gamma (gamma - 1) = beta^alpha` solves it.
//! Since `gamma > 2` the gluing at `t = s` is twice continuously
//! differentiable, so each shift `s >= 0` gives a distinct classical solution.

use crate::error::{DomainError, Error, Result};
use crate::problem::{BoundaryKind, MixedProblem, ScalarFn};

/// Relative agreement required between the three coefficient formulas.
pub const CLOSED_FORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerParams {
    pub beta: f64,
    pub gamma: f64,
}

/// The three algebraically equivalent expressions for `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaForms {
    /// `(gamma (gamma - 1))^(1/(alpha - 1))`.
    pub stable: f64,
    /// `2^(1/(alpha-1)) (alpha - 3 + 4/(alpha+1))^(1/(1-alpha))`.
    pub bracket: f64,
    /// `2^(1/(alpha-1)) ((alpha+1)/(alpha^2 - 2 alpha + 1))^(1/(alpha-1))`.
    pub ratio: f64,
}

impl BetaForms {
    pub fn max_rel_spread(&self) -> f64 {
        let rel = |x: f64| ((x - self.stable) / self.stable).abs();
        rel(self.bracket).max(rel(self.ratio))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

pub fn beta_forms(alpha: f64) -> Result<BetaForms> {
    let two = 2f64.powf(1.0 / (alpha - 1.0));
    Ok(BetaForms {
        stable: power_params(alpha)?.beta,
        bracket: two * (alpha - 3.0 + 4.0 / (alpha + 1.0)).powf(1.0 / (1.0 - alpha)),
        ratio: two
            * ((alpha + 1.0) / (alpha * alpha - 2.0 * alpha + 1.0)).powf(1.0 / (alpha - 1.0)),
    })
}

/// Exponent and coefficient of the power solution for `alpha`.
///
/// Uses the `stable` form of [`BetaForms`]. The `bracket` form cancels
/// catastrophically as `alpha -> 1` (its spread exceeds 1e-12 relative above
/// roughly `alpha = 0.93`), so it is only a cross-check.
pub fn power_params(alpha: f64) -> Result<PowerParams> {
    check_alpha(alpha)?;
    let gamma = 2.0 / (1.0 - alpha);
    Ok(PowerParams {
        beta: (gamma * (gamma - 1.0)).powf(1.0 / (alpha - 1.0)),
        gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSolution {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Time before which the solution is identically zero.
    pub shift: f64,
}

impl PowerSolution {
    pub fn new(alpha: f64, shift: f64) -> Result<Self> {
        if !(shift >= 0.0) || !shift.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "shift must be >= 0, got {shift}"
            )));
        }
        let PowerParams { beta, gamma } = power_params(alpha)?;
        Ok(Self {
            alpha,
            beta,
            gamma,
            shift,
        })
    }

    /// Same as [`PowerSolution::new`] but refuses the Dirichlet problem,
    /// which the family does not solve (`u(t, 0) != 0` for `t > s`).
    pub fn for_boundary(alpha: f64, shift: f64, boundary: BoundaryKind) -> Result<Self> {
        match boundary {
            BoundaryKind::Neumann => Self::new(alpha, shift),
            BoundaryKind::Dirichlet => Err(Error::DirichletUnsupported),
        }
    }

    /// The zero solution, `beta = 0`.
    pub fn trivial(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            beta: 0.0,
            gamma: 2.0 / (1.0 - alpha),
            shift: 0.0,
        })
    }

    /// `d^k u / dt^k` at `t` for `k = deriv` in `0..=2`. The solution does not
    /// depend on `x`.
    pub fn eval(&self, t: f64, deriv: u8) -> f64 {
        let tau = t - self.shift;
        if !(tau > 0.0) {
            return 0.0;
        }
        let g = self.gamma;
        match deriv {
            0 => self.beta * tau.powf(g),
            1 => self.beta * g * tau.powf(g - 1.0),
            2 => self.beta * g * (g - 1.0) * tau.powf(g - 2.0),
            _ => panic!("derivative order {deriv} not supported"),
        }
    }

    /// Any `x`-derivative: identically zero.
    pub fn eval_x(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }

    /// `max |u_tt - a^2 u_xx - u^alpha|` over `t_grid`.
    pub fn pde_residual(&self, a: f64, t_grid: &[f64]) -> f64 {
        t_grid
            .iter()
            .map(|&t| {
                let u = self.eval(t, 0);
                (self.eval(t, 2) - a * a * self.eval_x(t, 0.0) - u.powf(self.alpha)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Jumps `(g0, g1, g2)` across `t = s` of value, first and second time
    /// derivative, taken at distance `h` to the right of the seam.
    pub fn seam_gap(&self, h: f64) -> Result<(f64, f64, f64)> {
        if !(self.shift > 0.0) || !(h > 0.0) || !(h < self.shift) {
            return Err(Error::InvalidArgument(format!(
                "seam gap needs s > 0 and 0 < h < s, got s = {}, h = {h}",
                self.shift
            )));
        }
        let t = self.shift + h;
        Ok((
            self.eval(t, 0).abs(),
            self.eval(t, 1).abs(),
            self.eval(t, 2).abs(),
        ))
    }
}

/// `f(t, x, z) = z^alpha`, undefined for `z < 0`.
pub fn holder_nonlinearity(alpha: f64) -> ScalarFn {
    ScalarFn::new(3, move |args| {
        let z = args[2];
        if z < 0.0 {
            Err(DomainError::new(format!("z^{alpha} with negative z = {z}")))
        } else {
            Ok(z.powf(alpha))
        }
    })
}

/// The Hölder problem: `f = z^alpha`, zero forcing and data, Neumann boundary.
pub fn holder_problem(a: f64, alpha: f64) -> Result<MixedProblem> {
    check_alpha(alpha)?;
    let mut p = MixedProblem::homogeneous(a, BoundaryKind::Neumann);
    p.f = holder_nonlinearity(alpha);
    p.validate()?;
    Ok(p)
}
