//! Exact solutions used to validate runs.

use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Solution of `∂ₜω = ω Hω` on the line or circle, from the initial data and
/// its Hilbert transform at the same point:
/// `ω = 4ω₀ / ((2 - tHω₀)² + t²ω₀²)`.
pub fn clm_exact(omega0: f64, h_omega0: f64, t: f64) -> f64 {
    let a = 2.0 - t * h_omega0;
    4.0 * omega0 / (a * a + t * t * omega0 * omega0)
}

/// The solution from `ω₀ = -sin x`, for which `Hω₀ = cos x`. It blows up at
/// `x = 0`, `t = 2`.
pub fn clm_sine(x: f64, t: f64) -> f64 {
    clm_exact(-x.sin(), x.cos(), t)
}

pub const CLM_SINE_BLOWUP: f64 = 2.0;

/// Solution of `∂ₜω = ω ∂ₓω` by characteristics: `ω` is constant along
/// `x = x₀ - tω₀(x₀)`. The foot `x₀` is found by safeguarded Newton
/// iteration inside `[x - t·bound, x + t·bound]`, where `bound ≥ sup|ω₀|`.
/// Valid for `t < 1/max ω₀'`, where the characteristic map is monotone.
pub fn burgers_exact(
    omega0: impl Fn(f64) -> f64,
    d_omega0: impl Fn(f64) -> f64,
    bound: f64,
    x: f64,
    t: f64,
) -> Result<f64> {
    let g = |y: f64| y - t * omega0(y) - x;
    let (mut lo, mut hi) = (x - t * bound - 1e-12, x + t * bound + 1e-12);
    if g(lo) > 0.0 || g(hi) < 0.0 {
        return Err(Error::InvalidParameter {
            name: "bound",
            reason: format!("characteristic foot of x = {x} not bracketed at t = {t}"),
        });
    }
    let mut y = x - t * omega0(x);
    y = y.clamp(lo, hi);
    for _ in 0..200 {
        let gy = g(y);
        if gy == 0.0 {
            break;
        }
        if gy < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let slope = 1.0 - t * d_omega0(y);
        let mut next = y - gy / slope;
        if !(slope > 0.0) || !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= 1e-15 * (1.0 + y.abs()) {
            y = next;
            break;
        }
        y = next;
    }
    Ok(omega0(y))
}
