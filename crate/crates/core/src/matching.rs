//! Corner matching conditions at `(t, x) = (0, 0)`.
//!
//! A classical solution of the first mixed problem (`B = I`) needs
//!
//! ```text
//! mu(0)   = phi(0)
//! mu'(0)  = psi(0)
//! mu''(0) = f(0, 0, phi(0)) + F(0, 0) + a^2 phi''(0)
//! ```
//!
//! and one of the second mixed problem (`B = d/dx`) needs
//!
//! ```text
//! mu(0)  = phi'(0)
//! mu'(0) = psi'(0)
//! ```
//!
//! The second-order Dirichlet condition also exists in a literal variant,
//! `mu''(0) = (f(0,0,phi(0)) + f(0,0,mu(0)))/2 + F(0,0) + a^2 phi(0)`, kept
//! behind [`SecondOrderForm::PaperLiteral`]. It differs from the corner
//! identity obtained by evaluating the equation at the origin along both
//! boundary pieces, which is the default.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{derivative, FdConfig, FdScheme};
use crate::problem::{BoundaryKind, MixedProblem, ScalarFn};

/// Tolerance used when every derivative comes from an analytic handle.
pub const ANALYTIC_TOL: f64 = 1e-8;
/// Tolerance used when some derivative is a finite-difference estimate.
pub const FD_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SecondOrderForm {
    /// `a^2 phi''(0)`, consistent with the equation at the corner.
    #[default]
    Derived,
    /// `a^2 phi(0)` with the nonlinearity averaged over `phi(0)` and `mu(0)`.
    PaperLiteral,
}

impl fmt::Display for SecondOrderForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SecondOrderForm::Derived => f.write_str("derived"),
            SecondOrderForm::PaperLiteral => f.write_str("paper-literal"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub order: u8,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Compatible,
    /// The matching condition of this order fails, so no classical solution
    /// exists on the closed quarter plane.
    NonexistenceCertificate {
        first_violated_order: u8,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingReport {
    pub boundary: BoundaryKind,
    pub residuals: Vec<Residual>,
    pub tol: f64,
    pub verdict: Verdict,
    /// `Some` for Dirichlet reports only.
    pub second_order_form: Option<SecondOrderForm>,
    /// Whether every derivative used came from an analytic handle.
    pub analytic: bool,
}

impl MatchingReport {
    /// Identifier of the nonexistence result backing the verdict.
    pub fn result_cited(&self) -> &'static str {
        match self.boundary {
            BoundaryKind::Dirichlet => "first-mixed-problem-matching-nonexistence",
            BoundaryKind::Neumann => "second-mixed-problem-matching-nonexistence",
        }
    }

    /// Human-readable verdict.
    pub fn certificate_text(&self) -> String {
        let order = match self.verdict {
            Verdict::Compatible => {
                return format!(
                    "compatible: all {} matching residuals are within tol = {:e}",
                    self.boundary, self.tol
                )
            }
            Verdict::NonexistenceCertificate {
                first_violated_order,
            } => first_violated_order,
        };
        let value = self
            .residuals
            .iter()
            .find(|r| r.order == order)
            .map_or(f64::NAN, |r| r.value);
        let (problem, condition) = match (self.boundary, order) {
            (BoundaryKind::Dirichlet, 0) => ("first", "mu(0) = phi(0)"),
            (BoundaryKind::Dirichlet, 1) => ("first", "mu'(0) = psi(0)"),
            (BoundaryKind::Dirichlet, _) => match self.second_order_form {
                Some(SecondOrderForm::PaperLiteral) => (
                    "first",
                    "mu''(0) = (f(0,0,phi(0)) + f(0,0,mu(0)))/2 + F(0,0) + a^2 phi(0)",
                ),
                _ => ("first", "mu''(0) = f(0,0,phi(0)) + F(0,0) + a^2 phi''(0)"),
            },
            (BoundaryKind::Neumann, 0) => ("second", "mu(0) = phi'(0)"),
            (BoundaryKind::Neumann, _) => ("second", "mu'(0) = psi'(0)"),
        };
        format!(
            "nonexistence: matching condition of order {order} ({condition}) fails with residual {value:e} \
             (tol {:e}); the {problem} mixed problem has no classical solution on the closed quarter plane [{}]",
            self.tol,
            self.result_cited()
        )
    }
}

fn corner(f: &ScalarFn, order: usize, fd: FdConfig) -> Result<f64> {
    derivative(
        f,
        0.0,
        order,
        FdConfig {
            h: fd.h,
            scheme: FdScheme::ForwardOneSided,
        },
    )
}

fn require(p: &MixedProblem, kind: BoundaryKind) -> Result<()> {
    p.validate()?;
    if p.boundary != kind {
        return Err(Error::InvalidArgument(format!(
            "expected a {kind} problem, got {}",
            p.boundary
        )));
    }
    Ok(())
}

/// Residuals of orders 0, 1, 2 for the first mixed problem.
pub fn residuals_dirichlet(
    p: &MixedProblem,
    form: SecondOrderForm,
    fd: FdConfig,
) -> Result<Vec<Residual>> {
    require(p, BoundaryKind::Dirichlet)?;
    let phi0 = p.phi.call1(0.0)?;
    let mu0 = p.mu.call1(0.0)?;
    let mu1 = corner(&p.mu, 1, fd)?;
    let mu2 = corner(&p.mu, 2, fd)?;
    let psi0 = p.psi.call1(0.0)?;
    let f_phi = p.f.call3(0.0, 0.0, phi0)?;
    let forcing = p.forcing.call2(0.0, 0.0)?;
    let a2 = p.a * p.a;
    let r2 = match form {
        SecondOrderForm::Derived => mu2 - (f_phi + forcing + a2 * corner(&p.phi, 2, fd)?),
        SecondOrderForm::PaperLiteral => {
            let f_mu = p.f.call3(0.0, 0.0, mu0)?;
            mu2 - (0.5 * (f_phi + f_mu) + forcing + a2 * phi0)
        }
    };
    Ok(vec![
        Residual {
            order: 0,
            value: mu0 - phi0,
        },
        Residual {
            order: 1,
            value: mu1 - psi0,
        },
        Residual {
            order: 2,
            value: r2,
        },
    ])
}

/// Residuals of orders 0, 1 for the second mixed problem.
pub fn residuals_neumann(p: &MixedProblem, fd: FdConfig) -> Result<Vec<Residual>> {
    require(p, BoundaryKind::Neumann)?;
    Ok(vec![
        Residual {
            order: 0,
            value: p.mu.call1(0.0)? - corner(&p.phi, 1, fd)?,
        },
        Residual {
            order: 1,
            value: corner(&p.mu, 1, fd)? - corner(&p.psi, 1, fd)?,
        },
    ])
}

/// Certificate for the smallest order whose residual exceeds `tol`.
pub fn classify(residuals: &[Residual], tol: f64) -> Verdict {
    residuals
        .iter()
        .filter(|r| !(r.value.abs() <= tol))
        .map(|r| r.order)
        .min()
        .map_or(Verdict::Compatible, |first_violated_order| {
            Verdict::NonexistenceCertificate {
                first_violated_order,
            }
        })
}

/// True when every derivative the checker needs has an analytic handle.
pub fn uses_analytic_derivatives(p: &MixedProblem, form: SecondOrderForm) -> bool {
    match p.boundary {
        BoundaryKind::Dirichlet => {
            p.mu.has_derivative(0, 1)
                && p.mu.has_derivative(0, 2)
                && (form == SecondOrderForm::PaperLiteral || p.phi.has_derivative(0, 2))
        }
        BoundaryKind::Neumann => {
            p.phi.has_derivative(0, 1) && p.mu.has_derivative(0, 1) && p.psi.has_derivative(0, 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MatchingOptions {
    pub form: SecondOrderForm,
    pub fd: FdConfig,
    /// `None` picks [`ANALYTIC_TOL`] or [`FD_TOL`].
    pub tol: Option<f64>,
}

/// Computes residuals for the problem's boundary kind and classifies them.
pub fn check(p: &MixedProblem, opts: MatchingOptions) -> Result<MatchingReport> {
    let analytic = uses_analytic_derivatives(p, opts.form);
    let tol = opts
        .tol
        .unwrap_or(if analytic { ANALYTIC_TOL } else { FD_TOL });
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let (residuals, second_order_form) = match p.boundary {
        BoundaryKind::Dirichlet => (residuals_dirichlet(p, opts.form, opts.fd)?, Some(opts.form)),
        BoundaryKind::Neumann => (residuals_neumann(p, opts.fd)?, None),
    };
    Ok(MatchingReport {
        boundary: p.boundary,
        verdict: classify(&residuals, tol),
        residuals,
        tol,
        second_order_form,
        analytic,
    })
}
