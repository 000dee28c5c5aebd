//! Problem instances for the semilinear telegraph equation on the quarter plane
//!
//! ```text
//! u_tt - a^2 u_xx - f(t, x, u) = F(t, x),   t > 0, x > 0
//! u(0, x) = phi(x),  u_t(0, x) = psi(x),    x >= 0
//! B[u](t, 0) = mu(t),                       t >= 0
//! ```
//!
//! with `B` either the identity (first mixed problem) or `d/dx` (second mixed
//! problem).

use std::fmt;
use std::sync::Arc;

use crate::error::{DomainError, Error, Result};

/// Boundary operator at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// `u(t, 0) = mu(t)`.
    Dirichlet,
    /// `u_x(t, 0) = mu(t)`.
    Neumann,
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryKind::Dirichlet => f.write_str("dirichlet"),
            BoundaryKind::Neumann => f.write_str("neumann"),
        }
    }
}

type EvalHandle = Arc<dyn Fn(&[f64]) -> std::result::Result<f64, DomainError> + Send + Sync>;

/// Evaluation handle for a real function of one to three real variables.
///
/// Non-finite results are turned into a [`DomainError`] at the call site, so a
/// successful evaluation is always finite. Analytic partial derivatives of
/// order 1 and 2 can be attached per variable; they take precedence over
/// finite differences wherever a derivative is needed.
#[derive(Clone)]
pub struct ScalarFn {
    arity: usize,
    eval: EvalHandle,
    // derivs[var][order - 1]
    derivs: Vec<[Option<EvalHandle>; 2]>,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let with_derivs: Vec<_> = self
            .derivs
            .iter()
            .map(|d| [d[0].is_some(), d[1].is_some()])
            .collect();
        f.debug_struct("ScalarFn")
            .field("arity", &self.arity)
            .field("analytic_derivatives", &with_derivs)
            .finish()
    }
}

impl ScalarFn {
    /// Wraps a fallible evaluator taking `arity` positional arguments.
    ///
    /// Panics if `arity` is not 1, 2 or 3.
    pub fn new<F>(arity: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> std::result::Result<f64, DomainError> + Send + Sync + 'static,
    {
        assert!((1..=3).contains(&arity), "ScalarFn arity must be 1, 2 or 3");
        Self {
            arity,
            eval: Arc::new(eval),
            derivs: vec![[None, None]; arity],
        }
    }

    pub fn unary<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(1, move |args| Ok(f(args[0])))
    }

    pub fn binary<F>(f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(2, move |args| Ok(f(args[0], args[1])))
    }

    pub fn ternary<F>(f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(3, move |args| Ok(f(args[0], args[1], args[2])))
    }

    /// The constant function. Its analytic derivatives (all zero) are attached.
    pub fn constant(arity: usize, value: f64) -> Self {
        let mut f = Self::new(arity, move |_| Ok(value));
        for var in 0..arity {
            for order in 1..=2 {
                f = f.with_derivative(var, order, move |_| Ok(0.0));
            }
        }
        f
    }

    pub fn zero(arity: usize) -> Self {
        Self::constant(arity, 0.0)
    }

    /// Attaches the analytic partial derivative of the given order (1 or 2)
    /// with respect to variable `var`.
    pub fn with_derivative<F>(mut self, var: usize, order: usize, d: F) -> Self
    where
        F: Fn(&[f64]) -> std::result::Result<f64, DomainError> + Send + Sync + 'static,
    {
        assert!(var < self.arity, "derivative variable out of range");
        assert!(order == 1 || order == 2, "derivative order must be 1 or 2");
        self.derivs[var][order - 1] = Some(Arc::new(d));
        self
    }

    /// Unary convenience for [`ScalarFn::with_derivative`].
    pub fn with_derivatives1<D1, D2>(self, d1: D1, d2: D2) -> Self
    where
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.with_derivative(0, 1, move |a| Ok(d1(a[0])))
            .with_derivative(0, 2, move |a| Ok(d2(a[0])))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn has_derivative(&self, var: usize, order: usize) -> bool {
        self.derivs
            .get(var)
            .and_then(|d| d.get(order.wrapping_sub(1)))
            .is_some_and(Option::is_some)
    }

    pub fn call(&self, args: &[f64]) -> std::result::Result<f64, DomainError> {
        if args.len() != self.arity {
            return Err(DomainError::new(format!(
                "called with {} arguments, arity is {}",
                args.len(),
                self.arity
            )));
        }
        finite((self.eval)(args)?, args)
    }

    pub fn call1(&self, x: f64) -> std::result::Result<f64, DomainError> {
        self.call(&[x])
    }

    pub fn call2(&self, t: f64, x: f64) -> std::result::Result<f64, DomainError> {
        self.call(&[t, x])
    }

    pub fn call3(&self, t: f64, x: f64, z: f64) -> std::result::Result<f64, DomainError> {
        self.call(&[t, x, z])
    }

    /// Evaluates the attached analytic derivative, if any.
    pub fn analytic_derivative(
        &self,
        var: usize,
        order: usize,
        args: &[f64],
    ) -> Option<std::result::Result<f64, DomainError>> {
        if args.len() != self.arity {
            return None;
        }
        let d = self.derivs.get(var)?.get(order.checked_sub(1)?)?.as_ref()?;
        Some(d(args).and_then(|v| finite(v, args)))
    }
}

fn finite(v: f64, args: &[f64]) -> std::result::Result<f64, DomainError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainError::new(format!(
            "non-finite value {v} at {args:?}"
        )))
    }
}

/// A full instance of the mixed problem.
#[derive(Debug, Clone)]
pub struct MixedProblem {
    /// Wave speed `a > 0`.
    pub a: f64,
    /// Nonlinearity `f(t, x, z)`.
    pub f: ScalarFn,
    /// Forcing `F(t, x)`.
    pub forcing: ScalarFn,
    pub phi: ScalarFn,
    pub psi: ScalarFn,
    pub mu: ScalarFn,
    pub boundary: BoundaryKind,
}

impl MixedProblem {
    /// The homogeneous linear problem: every function identically zero.
    pub fn homogeneous(a: f64, boundary: BoundaryKind) -> Self {
        Self {
            a,
            f: ScalarFn::zero(3),
            forcing: ScalarFn::zero(2),
            phi: ScalarFn::zero(1),
            psi: ScalarFn::zero(1),
            mu: ScalarFn::zero(1),
            boundary,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::NonPositiveSpeed(self.a));
        }
        let slots = [
            ("f", &self.f, 3),
            ("F", &self.forcing, 2),
            ("phi", &self.phi, 1),
            ("psi", &self.psi, 1),
            ("mu", &self.mu, 1),
        ];
        for (name, func, expected) in slots {
            if func.arity() != expected {
                return Err(Error::ArityMismatch {
                    name: name.to_string(),
                    expected,
                    found: func.arity(),
                });
            }
        }
        Ok(())
    }

    /// Right-hand side `f(t, x, z) + F(t, x)`.
    pub fn source(&self, t: f64, x: f64, z: f64) -> std::result::Result<f64, DomainError> {
        Ok(self.f.call3(t, x, z)? + self.forcing.call2(t, x)?)
    }
}
