//! Negative-energy blow-up criterion.
//!
//! For `f(t, x, z) = -g(z)` with `g(0) = 0`, zero forcing and zero boundary
//! data, and compactly supported `phi`, `psi`, the energy
//!
//! ```text
//! E(t) = ∫_0^∞ [ (u_t^2 + a^2 u_x^2)/2 + G(u) ] dx,   G(z) = ∫_0^z g
//! ```
//!
//! is conserved by classical solutions. If in addition `z g(z) <= λ G(z)` for
//! all `z` and `E(0) < 0`, no classical solution exists on the closed quarter
//! plane. This module evaluates `E(0)`, checks the structural assumptions and
//! the sign condition on samples, and assembles a [`BlowupReport`].

use crate::error::{Error, Result};
use crate::numerics::{
    derivative, integrate_by, potential, potential_by, FdConfig, FdScheme, QuadConfig,
};
use crate::problem::{BoundaryKind, MixedProblem, ScalarFn};

/// Tolerance for `g(0) = 0`.
pub const G_ZERO_TOL: f64 = 1e-12;
/// Tolerance for data that must vanish (outside the support, `F`, `mu`).
pub const VANISH_TOL: f64 = 1e-12;
/// Relative slack in the sampled sign condition.
pub const SIGN_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct EnergyProblem {
    pub base: MixedProblem,
    /// Restoring force, `f(t, x, z) = -g(z)`.
    pub g: ScalarFn,
    /// `phi` and `psi` vanish for `x >= support_bound`.
    pub support_bound: f64,
}

impl EnergyProblem {
    /// Builds the problem with `f = -g`, `F = 0` and `mu = 0`.
    pub fn new(
        a: f64,
        g: ScalarFn,
        phi: ScalarFn,
        psi: ScalarFn,
        boundary: BoundaryKind,
        support_bound: f64,
    ) -> Result<Self> {
        let minus_g = g.clone();
        let base = MixedProblem {
            a,
            f: ScalarFn::new(3, move |args| Ok(-minus_g.call1(args[2])?)),
            forcing: ScalarFn::zero(2),
            phi,
            psi,
            mu: ScalarFn::zero(1),
            boundary,
        };
        Self::from_parts(base, g, support_bound)
    }

    /// Wraps an arbitrary problem; structural assumptions are checked by
    /// [`structural_checks`], not here.
    pub fn from_parts(base: MixedProblem, g: ScalarFn, support_bound: f64) -> Result<Self> {
        base.validate()?;
        if g.arity() != 1 {
            return Err(Error::ArityMismatch {
                name: "g".into(),
                expected: 1,
                found: g.arity(),
            });
        }
        if !(support_bound > 0.0) || !support_bound.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "support bound must be positive, got {support_bound}"
            )));
        }
        Ok(Self {
            base,
            g,
            support_bound,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuralChecks {
    pub g_vanishes_at_zero: bool,
    /// `f(t, x, z) = -g(z)` on the sample grid.
    pub nonlinearity_matches_g: bool,
    pub forcing_vanishes: bool,
    pub boundary_data_vanishes: bool,
    pub compact_support: bool,
}

impl StructuralChecks {
    pub fn all_pass(&self) -> bool {
        self.failed().is_empty()
    }

    pub fn failed(&self) -> Vec<&'static str> {
        [
            (self.g_vanishes_at_zero, "g(0) = 0"),
            (self.nonlinearity_matches_g, "f(t,x,z) = -g(z)"),
            (self.forcing_vanishes, "F = 0"),
            (self.boundary_data_vanishes, "mu = 0"),
            (
                self.compact_support,
                "phi, psi vanish beyond the support bound",
            ),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| name)
        .collect()
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + i as f64 * step })
}

/// Samples the assumptions the criterion rests on.
pub fn structural_checks(ep: &EnergyProblem) -> Result<StructuralChecks> {
    let p = &ep.base;
    let x_max = ep.support_bound;
    let g_vanishes_at_zero = ep.g.call1(0.0)?.abs() <= G_ZERO_TOL;

    let mut forcing_vanishes = true;
    let mut nonlinearity_matches_g = true;
    for t in linspace(0.0, 10.0, 21) {
        for x in linspace(0.0, 2.0 * x_max, 21) {
            forcing_vanishes &= p.forcing.call2(t, x)?.abs() <= VANISH_TOL;
            for z in linspace(-2.0, 2.0, 9) {
                let expected = -ep.g.call1(z)?;
                let got = p.f.call3(t, x, z)?;
                nonlinearity_matches_g &=
                    (got - expected).abs() <= VANISH_TOL * (1.0 + expected.abs());
            }
        }
    }

    let mut boundary_data_vanishes = true;
    for t in linspace(0.0, 10.0, 101) {
        boundary_data_vanishes &= p.mu.call1(t)?.abs() <= VANISH_TOL;
    }

    let mut compact_support = true;
    for x in linspace(x_max, 3.0 * x_max, 101) {
        compact_support &=
            p.phi.call1(x)?.abs() <= VANISH_TOL && p.psi.call1(x)?.abs() <= VANISH_TOL;
    }

    Ok(StructuralChecks {
        g_vanishes_at_zero,
        nonlinearity_matches_g,
        forcing_vanishes,
        boundary_data_vanishes,
        compact_support,
    })
}

fn half_line_derivative(f: &ScalarFn, x: f64) -> Result<f64> {
    let cfg = FdConfig::default();
    let scheme = if x < cfg.step(1) {
        FdScheme::ForwardOneSided
    } else {
        FdScheme::Central
    };
    derivative(f, x, 1, FdConfig { scheme, ..cfg })
}

/// `E(0) = ∫_0^X [ (psi^2 + a^2 phi'^2)/2 + G(phi) ] dx`.
pub fn initial_energy(ep: &EnergyProblem, quad: QuadConfig) -> Result<f64> {
    let p = &ep.base;
    let a2 = p.a * p.a;
    let integrand = |x: f64| {
        let eval = || -> Result<f64> {
            let phi = p.phi.call1(x)?;
            let psi = p.psi.call1(x)?;
            let dphi = half_line_derivative(&p.phi, x)?;
            let big_g = potential_by(|z| ep.g.call1(z), phi, quad)?;
            Ok(0.5 * (psi * psi + a2 * dphi * dphi) + big_g)
        };
        eval().map_err(|e| match e {
            Error::Domain(d) => d,
            other => crate::error::DomainError::new(other.to_string()),
        })
    };
    integrate_by(integrand, 0.0, ep.support_bound, quad)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignViolation {
    pub z: f64,
    /// `z g(z) - λ G(z)`, positive.
    pub gap: f64,
}

/// Samples `z g(z) <= λ G(z)` at `n` equispaced points of `[z_lo, z_hi]` and
/// returns every point where it fails. An empty result only means no
/// violation was found on the sample.
pub fn sign_condition(
    g: &ScalarFn,
    lambda: f64,
    z_lo: f64,
    z_hi: f64,
    n: usize,
    quad: QuadConfig,
) -> Result<Vec<SignViolation>> {
    if n < 2 || !(z_lo < z_hi) {
        return Err(Error::InvalidArgument(format!(
            "sign condition needs n >= 2 and z_lo < z_hi, got n = {n}, [{z_lo}, {z_hi}]"
        )));
    }
    let mut violations = Vec::new();
    for z in linspace(z_lo, z_hi, n) {
        let lg = lambda * potential(g, z, quad)?;
        let gap = z * g.call1(z)? - lg;
        if gap > SIGN_TOL * (1.0 + lg.abs()) {
            violations.push(SignViolation { z, gap });
        }
    }
    Ok(violations)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignCheck {
    pub z_lo: f64,
    pub z_hi: f64,
    pub samples: usize,
    pub violations: Vec<SignViolation>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CriteriaFailure {
    Structural(&'static str),
    SignViolations(usize),
    NonNegativeEnergy(f64),
}

impl std::fmt::Display for CriteriaFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CriteriaFailure::Structural(name) => write!(f, "structural assumption fails: {name}"),
            CriteriaFailure::SignViolations(n) => {
                write!(f, "sign condition violated at {n} sampled points")
            }
            CriteriaFailure::NonNegativeEnergy(e) => {
                write!(f, "initial energy {e:e} is not negative")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlowupVerdict {
    CertificateOfNonexistence,
    CriteriaNotMet(Vec<CriteriaFailure>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupReport {
    pub e0: f64,
    pub lambda: f64,
    pub sign: SignCheck,
    pub structural: StructuralChecks,
    pub boundary: BoundaryKind,
    pub verdict: BlowupVerdict,
    pub notes: Vec<String>,
}

impl BlowupReport {
    pub fn result_cited(&self) -> &'static str {
        "negative-energy-nonexistence"
    }

    pub fn certificate_text(&self) -> String {
        match &self.verdict {
            BlowupVerdict::CertificateOfNonexistence => format!(
                "nonexistence: E(0) = {:e} < 0, z g(z) <= {} G(z) on {} samples of [{}, {}], \
                 structural assumptions hold; no classical solution on the closed quarter plane [{}]",
                self.e0,
                self.lambda,
                self.sign.samples,
                self.sign.z_lo,
                self.sign.z_hi,
                self.result_cited()
            ),
            BlowupVerdict::CriteriaNotMet(reasons) => {
                let reasons: Vec<String> = reasons.iter().map(ToString::to_string).collect();
                format!("criteria not met: {}", reasons.join("; "))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupConfig {
    /// Points in the sign-condition sample.
    pub samples: usize,
    /// Points used to estimate `max |phi|` on `[0, X]`.
    pub phi_samples: usize,
    /// Explicit `z` range; `None` uses `±1.5 max |phi|`.
    pub z_range: Option<(f64, f64)>,
    pub quad: QuadConfig,
}

impl Default for BlowupConfig {
    fn default() -> Self {
        Self {
            samples: 201,
            phi_samples: 401,
            z_range: None,
            quad: QuadConfig::default(),
        }
    }
}

pub fn blowup_certificate(
    ep: &EnergyProblem,
    lambda: f64,
    cfg: BlowupConfig,
) -> Result<BlowupReport> {
    let structural = structural_checks(ep)?;

    let (z_lo, z_hi) = match cfg.z_range {
        Some(r) => r,
        None => {
            let mut peak: f64 = 0.0;
            for x in linspace(0.0, ep.support_bound, cfg.phi_samples.max(2)) {
                peak = peak.max(ep.base.phi.call1(x)?.abs());
            }
            // identically zero data: still probe a unit range
            let half = if peak > 0.0 { 1.5 * peak } else { 1.0 };
            (-half, half)
        }
    };
    let violations = sign_condition(&ep.g, lambda, z_lo, z_hi, cfg.samples, cfg.quad)?;
    let e0 = initial_energy(ep, cfg.quad)?;

    let mut reasons: Vec<CriteriaFailure> = structural
        .failed()
        .into_iter()
        .map(CriteriaFailure::Structural)
        .collect();
    if !violations.is_empty() {
        reasons.push(CriteriaFailure::SignViolations(violations.len()));
    }
    if !(e0 < 0.0) {
        reasons.push(CriteriaFailure::NonNegativeEnergy(e0));
    }
    let verdict = if reasons.is_empty() {
        BlowupVerdict::CertificateOfNonexistence
    } else {
        BlowupVerdict::CriteriaNotMet(reasons)
    };

    let notes = vec![
        "E(0) evaluates the energy functional at t = 0: (psi^2 + a^2 phi'^2)/2 + G(phi); \
         the variant with phi' and psi swapped is not used"
            .to_string(),
        format!(
            "criterion applied with mu = 0 under the {} boundary operator; it does not single out a kind",
            ep.base.boundary
        ),
        format!(
            "sign condition checked on {} samples only, not for all z; lambda is not range-restricted",
            cfg.samples
        ),
    ];

    Ok(BlowupReport {
        e0,
        lambda,
        sign: SignCheck {
            z_lo,
            z_hi,
            samples: cfg.samples,
            violations,
        },
        structural,
        boundary: ep.base.boundary,
        verdict,
        notes,
    })
}
