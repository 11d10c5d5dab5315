//! Radial modes of the stream function, `Δψ = ω`.
//!
//! For the `cos(mθ)` mode, `m = 2k`, the mode equation is
//! `ψ'' + ψ'/r - m²ψ/r² = ω_m`. Its decaying solution is
//! `ψ₀(r) = ∫₀^r s⁻¹∫₀^s τω₀ dτ ds` and, for `m ≥ 2`,
//! `ψ_m(r) = -r^m ∫_r^∞ s^{-2m-1} ∫₀^s τ^{m+1} ω_m dτ ds`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{End, Error, Result};
use crate::polar::modes::PolarModes;
use crate::polar::radial::{power_fit, EndRule, Radial, RadialFn, RadialProfile};

/// `∫_r^∞ s^{outer} ∫₀^s τ^{inner} f(τ) dτ ds` at every grid node, by nested
/// panel quadrature; the part beyond `r_max` is reduced to single moments.
pub fn nested_tail_at_nodes(engine: &Radial, f: &RadialFn, inner: f64, outer: f64) -> Result<Vec<f64>> {
    if outer + 1.0 >= 0.0 {
        return Err(Error::NonConvergentTail {
            end: End::Infinity,
            detail: alloc::format!("outer kernel s^{outer} is not integrable at infinity"),
        });
    }
    let cells = nested_cells(engine, f, inner, outer)?;
    let grid = engine.grid();
    let big = grid.r_max();
    let a_big = engine.head(f, inner, big)?;
    let beyond = -(a_big * big.powf(outer + 1.0) + engine.tail(f, inner + outer + 1.0, big)?) / (outer + 1.0);
    let mut out = alloc::vec![0.0; grid.len()];
    let mut acc = beyond;
    out[grid.len() - 1] = acc;
    for i in (0..grid.len() - 1).rev() {
        acc += cells[i];
        out[i] = acc;
    }
    Ok(out)
}

/// `∫₀^r s^{outer} ∫₀^s τ^{inner} f(τ) dτ ds` at every grid node.
pub fn nested_head_at_nodes(engine: &Radial, f: &RadialFn, inner: f64, outer: f64) -> Result<Vec<f64>> {
    let cells = nested_cells(engine, f, inner, outer)?;
    let grid = engine.grid();
    let small = grid.r_min();
    let below = if outer == -1.0 {
        // ∫₀^R τ^inner f(τ) log(R/τ) dτ for f ≈ A τ^p.
        match &f.head {
            EndRule::Compact => 0.0,
            EndRule::Extrapolate => match power_fit(f, End::Origin, grid.nodes())? {
                None => 0.0,
                Some((a, p)) => {
                    let q = inner + p + 1.0;
                    if q <= 0.0 {
                        return Err(Error::NonConvergentTail {
                            end: End::Origin,
                            detail: alloc::format!("inner integrand behaves like s^{:.3}", q - 1.0),
                        });
                    }
                    a * small.powf(q) / (q * q)
                }
            },
            EndRule::Exact(_) => {
                return Err(Error::InvalidParameter {
                    name: "head",
                    reason: "logarithmic moments are not available for exact end rules".into(),
                })
            }
        }
    } else {
        (small.powf(outer + 1.0) * engine.head(f, inner, small)? - engine.head(f, inner + outer + 1.0, small)?)
            / (outer + 1.0)
    };
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = below;
    out.push(acc);
    for c in &cells {
        acc += c;
        out.push(acc);
    }
    Ok(out)
}

/// `∫_{r_i}^{r_{i+1}} s^{outer} A(s) ds` with `A(s) = ∫₀^s τ^{inner} f`.
fn nested_cells(engine: &Radial, f: &RadialFn, inner: f64, outer: f64) -> Result<Vec<f64>> {
    let moments = engine.head_moments(f, inner)?;
    let head = moments.head_at_nodes()?;
    let nodes = engine.grid().nodes();
    let rule = crate::quadrature::GaussRule::new(super::radial::PANEL_POINTS);
    let mut cells = Vec::with_capacity(nodes.len() - 1);
    for i in 0..nodes.len() - 1 {
        let base = head[i];
        let mut sum = 0.0;
        // Panels split at breakpoints, where the inner integral has a kink.
        engine.for_each_panel(f, nodes[i], nodes[i + 1], |ua, ub| {
            for (u, w) in rule.points(ua, ub) {
                let s = u.exp();
                let inner_part = engine.inside(f, inner, nodes[i], s);
                sum += w * s.powf(outer + 1.0) * (base + inner_part);
            }
        });
        cells.push(sum);
    }
    Ok(cells)
}

/// `ψ_{2k}` at the grid nodes for one vorticity mode.
pub fn stream_mode(engine: &Radial, omega: &RadialFn, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return nested_head_at_nodes(engine, omega, 1.0, -1.0);
    }
    let m = 2.0 * k as f64;
    let nested = nested_tail_at_nodes(engine, omega, m + 1.0, -2.0 * m - 1.0)?;
    Ok(engine
        .grid()
        .nodes()
        .iter()
        .zip(nested)
        .map(|(r, v)| -r.powf(m) * v)
        .collect())
}

/// The same mode from the Green's function form
/// `ψ_m = -(1/2m)[r^{-m}∫₀^r s^{m+1}ω + r^m∫_r^∞ s^{1-m}ω]`, for `m ≥ 2`.
pub fn stream_mode_green(engine: &Radial, omega: &RadialFn, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "the Green's function form needs k ≥ 1".into(),
        });
    }
    let m = 2.0 * k as f64;
    let head = engine.head_moments(omega, m + 1.0)?;
    let tail = engine.tail_moments(omega, 1.0 - m)?;
    let (head, tail) = (head.head_at_nodes()?, tail.tail_at_nodes()?);
    Ok(engine
        .grid()
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, r)| -(r.powf(-m) * head[i] + r.powf(m) * tail[i]) / (2.0 * m))
        .collect())
}

/// Stream-function modes for every vorticity mode. Modes are interpolated in
/// `log r` and extended by power laws beyond the grid.
pub fn solve_stream_modes(omega: &PolarModes) -> Result<PolarModes> {
    let engine = Radial::new(omega.grid.clone());
    let mut modes = Vec::with_capacity(omega.modes.len());
    for k in 0..omega.modes.len() {
        let profile = omega.profile(k);
        let f = profile.interpolant(EndRule::Extrapolate, EndRule::Extrapolate);
        modes.push(stream_mode(&engine, &f, k)?);
    }
    let mut out = PolarModes::new(omega.grid.clone(), modes)?;
    out.angular_samples = omega.angular_samples;
    Ok(out)
}

/// `ψ'' + ψ'/r - (2k)²ψ/r² - ω` by fourth-order differences in `u = log r`
/// (`ψ'' + ψ'/r = ψ_uu/r²`), one-sided at the two outermost nodes per end.
pub fn mode_ode_residual(psi: &RadialProfile, omega: &RadialProfile, k: usize) -> Result<RadialProfile> {
    let n = psi.values.len();
    if n < 5 {
        return Err(Error::TooFewNodes { needed: 5, found: n });
    }
    if psi.grid != omega.grid {
        return Err(Error::InvalidGrid("profiles live on different radial grids".into()));
    }
    let h2 = psi.grid.log_step().powi(2);
    let f = &psi.values;
    let m2 = (2 * k) as f64 * (2 * k) as f64;
    let d2 = |i: usize| -> f64 {
        let s = if i >= 2 && i + 2 < n {
            -f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]
        } else if i == 0 {
            35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4]
        } else if i == 1 {
            11.0 * f[0] - 20.0 * f[1] + 6.0 * f[2] + 4.0 * f[3] - f[4]
        } else if i == n - 2 {
            11.0 * f[n - 1] - 20.0 * f[n - 2] + 6.0 * f[n - 3] + 4.0 * f[n - 4] - f[n - 5]
        } else {
            35.0 * f[n - 1] - 104.0 * f[n - 2] + 114.0 * f[n - 3] - 56.0 * f[n - 4] + 11.0 * f[n - 5]
        };
        s / (12.0 * h2)
    };
    let values = psi
        .grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, r)| (d2(i) - m2 * f[i]) / (r * r) - omega.values[i])
        .collect();
    RadialProfile::new(psi.grid.clone(), values)
}

/// Both sides of `𝒮 = ∫_r^∞ s⁻⁵∫₀^s τ³ω₂ = ¼∫_r^∞ ω₂/s + ¼r⁻⁴∫₀^r s³ω₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SIntegral {
    pub r: f64,
    pub nested: f64,
    pub by_parts: f64,
}

impl SIntegral {
    /// `|nested - by_parts| / max(|nested|, |by_parts|)`, 0 when both vanish.
    pub fn defect(&self) -> f64 {
        let scale = self.nested.abs().max(self.by_parts.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.nested - self.by_parts).abs() / scale
        }
    }
}

pub fn s_integral(engine: &Radial, omega2: &RadialFn, r: f64) -> Result<SIntegral> {
    let grid = engine.grid();
    if !(r >= grid.r_min() && r <= grid.r_max()) {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: alloc::format!("{r} lies outside the radial grid"),
        });
    }
    // Nested value at r: nodes above r, plus the partial cell below the next node.
    let nested_nodes = nested_tail_at_nodes(engine, omega2, 3.0, -5.0)?;
    let i = grid.cell(r);
    let next = grid.nodes()[i + 1];
    let nested = if r == next {
        nested_nodes[i + 1]
    } else {
        let moments = engine.head_moments(omega2, 3.0)?;
        let rule = crate::quadrature::GaussRule::new(super::radial::PANEL_POINTS);
        let mut partial = 0.0;
        let mut panels = Vec::new();
        engine.for_each_panel(omega2, r, next, |ua, ub| panels.push((ua, ub)));
        for (ua, ub) in panels {
            for (u, w) in rule.points(ua, ub) {
                let s = u.exp();
                partial += w * s.powf(-4.0) * moments.head(s)?;
            }
        }
        nested_nodes[i + 1] + partial
    };
    let by_parts = 0.25 * engine.tail(omega2, -1.0, r)? + 0.25 * r.powi(-4) * engine.head(omega2, 3.0, r)?;
    Ok(SIntegral { r, nested, by_parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::radial::RadialGrid;

    #[test]
    fn harmonic_and_quadratic_residuals() {
        let g = RadialGrid::log_spaced(0.1, 10.0, 400).unwrap();
        let psi = RadialFn::new("r²", |r| r * r).sample(&g);
        let four = RadialFn::new("4", |_| 4.0).sample(&g);
        let zero = RadialProfile::zeros(g.clone());
        for (omega, k) in [(&four, 0), (&zero, 1)] {
            let res = mode_ode_residual(&psi, omega, k).unwrap().values;
            let n = res.len();
            assert!(res[2..n - 2].iter().all(|v| v.abs() < 1e-7));
            // One-sided stencils are third order.
            assert!(res.iter().all(|v| v.abs() < 1e-4));
        }
        assert!(mode_ode_residual(
            &RadialFn::zero().sample(&RadialGrid::log_spaced(1.0, 2.0, 4).unwrap()),
            &RadialFn::zero().sample(&RadialGrid::log_spaced(1.0, 2.0, 4).unwrap()),
            0
        )
        .is_err());
    }

    #[test]
    fn zero_modes_give_zero_stream() {
        let g = RadialGrid::log_spaced(0.01, 100.0, 50).unwrap();
        let omega = PolarModes::new(g.clone(), alloc::vec![alloc::vec![0.0; 50]; 3]).unwrap();
        let psi = solve_stream_modes(&omega).unwrap();
        assert!(psi.modes.iter().flatten().all(|&v| v == 0.0));
    }
}
