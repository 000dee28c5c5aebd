//! Finite-difference derivatives and adaptive Simpson quadrature.

use crate::error::{DomainError, Error, Result};
use crate::problem::ScalarFn;

/// Default step for first derivatives.
pub const DEFAULT_H1: f64 = 1e-5;
/// Default step for second derivatives, larger to limit cancellation.
pub const DEFAULT_H2: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdScheme {
    Central,
    /// Stencil on `[x, x + 3h]`; use at the left end of a half-line domain.
    ForwardOneSided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Step size; `None` picks [`DEFAULT_H1`] or [`DEFAULT_H2`] by order.
    pub h: Option<f64>,
    pub scheme: FdScheme,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            h: None,
            scheme: FdScheme::Central,
        }
    }
}

impl FdConfig {
    pub fn central() -> Self {
        Self::default()
    }

    pub fn forward() -> Self {
        Self {
            h: None,
            scheme: FdScheme::ForwardOneSided,
        }
    }

    pub fn with_step(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }

    pub fn step(&self, order: usize) -> f64 {
        self.h
            .unwrap_or(if order == 2 { DEFAULT_H2 } else { DEFAULT_H1 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_depth: 50,
        }
    }
}

impl QuadConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidArgument(
                "max_depth must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Finite-difference estimate of the first or second derivative of a unary
/// function at `x`.
pub fn fd_derivative(f: &ScalarFn, x: f64, order: usize, cfg: FdConfig) -> Result<f64> {
    if f.arity() != 1 {
        return Err(Error::ArityMismatch {
            name: "fd_derivative argument".into(),
            expected: 1,
            found: f.arity(),
        });
    }
    let h = cfg.step(order);
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    let at = |k: f64| f.call1(x + k * h);
    let d = match (cfg.scheme, order) {
        (FdScheme::Central, 1) => (at(1.0)? - at(-1.0)?) / (2.0 * h),
        (FdScheme::Central, 2) => (at(1.0)? - 2.0 * at(0.0)? + at(-1.0)?) / (h * h),
        (FdScheme::ForwardOneSided, 1) => (-3.0 * at(0.0)? + 4.0 * at(1.0)? - at(2.0)?) / (2.0 * h),
        (FdScheme::ForwardOneSided, 2) => {
            (2.0 * at(0.0)? - 5.0 * at(1.0)? + 4.0 * at(2.0)? - at(3.0)?) / (h * h)
        }
        (_, other) => {
            return Err(Error::InvalidArgument(format!(
                "derivative order must be 1 or 2, got {other}"
            )))
        }
    };
    Ok(d)
}

/// Derivative of a unary function: the analytic handle when attached,
/// otherwise [`fd_derivative`].
pub fn derivative(f: &ScalarFn, x: f64, order: usize, cfg: FdConfig) -> Result<f64> {
    match f.analytic_derivative(0, order, &[x]) {
        Some(v) => Ok(v?),
        None => fd_derivative(f, x, order, cfg),
    }
}

/// Derivative at the left end of `[0, inf)`, never sampling below 0.
pub fn corner_derivative(f: &ScalarFn, order: usize, h: Option<f64>) -> Result<f64> {
    derivative(
        f,
        0.0,
        order,
        FdConfig {
            h,
            scheme: FdScheme::ForwardOneSided,
        },
    )
}

/// Adaptive Simpson quadrature of a unary [`ScalarFn`] over `[lo, hi]`.
pub fn integrate(f: &ScalarFn, lo: f64, hi: f64, cfg: QuadConfig) -> Result<f64> {
    if f.arity() != 1 {
        return Err(Error::ArityMismatch {
            name: "integrand".into(),
            expected: 1,
            found: f.arity(),
        });
    }
    integrate_by(|x| f.call1(x), lo, hi, cfg)
}

const INITIAL_PANELS: usize = 8;

/// Adaptive Simpson quadrature of an arbitrary fallible integrand.
///
/// The interval is first split into a few panels; each panel is refined until
/// the Simpson/half-Simpson difference is within its share of
/// `rel_tol * ∫|f|` (coarse estimate). Hitting `max_depth` anywhere yields
/// [`Error::MaxDepthExceeded`] carrying the best estimate.
pub fn integrate_by<F>(f: F, lo: f64, hi: f64, cfg: QuadConfig) -> Result<f64>
where
    F: Fn(f64) -> std::result::Result<f64, DomainError>,
{
    cfg.validate()?;
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must be finite with lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(0.0);
    }

    let n = 2 * INITIAL_PANELS;
    let width = (hi - lo) / n as f64;
    let xs: Vec<f64> = (0..=n)
        .map(|i| if i == n { hi } else { lo + i as f64 * width })
        .collect();
    let ys = xs
        .iter()
        .map(|&x| f(x))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut panels = Vec::with_capacity(INITIAL_PANELS);
    let mut scale = 0.0;
    for k in 0..INITIAL_PANELS {
        let (a, m, b) = (xs[2 * k], xs[2 * k + 1], xs[2 * k + 2]);
        let (fa, fm, fb) = (ys[2 * k], ys[2 * k + 1], ys[2 * k + 2]);
        let whole = simpson(a, b, fa, fm, fb);
        scale += simpson(a, b, fa.abs(), fm.abs(), fb.abs());
        panels.push((a, m, b, fa, fm, fb, whole));
    }

    let eps = cfg.rel_tol * scale / INITIAL_PANELS as f64;
    let mut exhausted = false;
    let mut total = 0.0;
    for (a, m, b, fa, fm, fb, whole) in panels {
        total += refine(
            &f,
            Segment {
                a,
                m,
                b,
                fa,
                fm,
                fb,
            },
            whole,
            eps,
            cfg.max_depth,
            &mut exhausted,
        )?;
    }
    if exhausted {
        return Err(Error::MaxDepthExceeded { estimate: total });
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

struct Segment {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
}

fn refine<F>(
    f: &F,
    s: Segment,
    whole: f64,
    eps: f64,
    depth: u32,
    exhausted: &mut bool,
) -> Result<f64>
where
    F: Fn(f64) -> std::result::Result<f64, DomainError>,
{
    let lm = 0.5 * (s.a + s.m);
    let rm = 0.5 * (s.m + s.b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(s.a, s.m, s.fa, flm, s.fm);
    let right = simpson(s.m, s.b, s.fm, frm, s.fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    if depth <= 1 || lm <= s.a || rm >= s.b {
        *exhausted = true;
        return Ok(left + right + delta / 15.0);
    }
    let l = refine(
        f,
        Segment {
            a: s.a,
            m: lm,
            b: s.m,
            fa: s.fa,
            fm: flm,
            fb: s.fm,
        },
        left,
        0.5 * eps,
        depth - 1,
        exhausted,
    )?;
    let r = refine(
        f,
        Segment {
            a: s.m,
            m: rm,
            b: s.b,
            fa: s.fm,
            fm: frm,
            fb: s.fb,
        },
        right,
        0.5 * eps,
        depth - 1,
        exhausted,
    )?;
    Ok(l + r)
}

/// `G(z) = ∫_0^z g`, oriented so that `G(z) = -∫_z^0 g` for negative `z`.
pub fn potential(g: &ScalarFn, z: f64, cfg: QuadConfig) -> Result<f64> {
    potential_by(|s| g.call1(s), z, cfg)
}

pub fn potential_by<F>(g: F, z: f64, cfg: QuadConfig) -> Result<f64>
where
    F: Fn(f64) -> std::result::Result<f64, DomainError>,
{
    if z == 0.0 {
        Ok(0.0)
    } else if z > 0.0 {
        integrate_by(g, 0.0, z, cfg)
    } else {
        Ok(-integrate_by(g, z, 0.0, cfg)?)
    }
}
