//! Independent reference values shared by the integration tests.
#![allow(dead_code)]

use telegraph_core::exprlang::bump;

/// Odd extension of `bump(., c, w)` about `x = 0`.
pub fn odd_bump(x: f64, c: f64, w: f64) -> f64 {
    if x >= 0.0 {
        bump(x, c, w)
    } else {
        -bump(-x, c, w)
    }
}

/// Even extension of `bump(., c, w)` about `x = 0`.
pub fn even_bump(x: f64, c: f64, w: f64) -> f64 {
    bump(x.abs(), c, w)
}

/// d'Alembert solution with zero initial velocity for an extended profile.
pub fn dalembert(ext: impl Fn(f64) -> f64, a: f64, t: f64, x: f64) -> f64 {
    0.5 * (ext(x + a * t) + ext(x - a * t))
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

/// `d/dx bump(x, c, w)` in closed form.
pub fn bump_slope(x: f64, c: f64, w: f64) -> f64 {
    let r = (x - c) / w;
    if r.abs() >= 1.0 {
        return 0.0;
    }
    bump(x, c, w) * (-2.0 * r / (w * (1.0 - r * r).powi(2)))
}

/// `E0 = int_0^X 1/2 (a phi')^2 + G(phi)` for `phi = amp * bump(x, 2, 1)`,
/// `psi = 0`, by the midpoint rule on `n` panels.
pub fn bump_energy_midpoint(
    amp: f64,
    a: f64,
    x_max: f64,
    n: usize,
    big_g: impl Fn(f64) -> f64,
) -> f64 {
    let w = x_max / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let x = (i as f64 + 0.5) * w;
        let d = amp * bump_slope(x, 2.0, 1.0);
        sum += 0.5 * a * a * d * d + big_g(amp * bump(x, 2.0, 1.0));
    }
    sum * w
}
