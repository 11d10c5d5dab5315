//! Integral diagnostics along a run.

use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::multiplier::MultiplierOp;

/// Energy quantities for `∂ₜω = ω R₁²(ω)` on a two-dimensional grid. For
/// smooth solutions `d/dt ∫|ω| = -‖R₁ω‖²` when `ω ≥ 0`, and
/// `d/dt ‖R₁ω‖² = -2∫ω(R₁²ω)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub l1: f64,
    /// `‖R₁ω‖²_{L²}`.
    pub r1_squared: f64,
    /// `∫ω(R₁²ω)²`.
    pub stretching: f64,
    /// `‖∇log ω‖²_{L²}`, present only when `ω > 0` everywhere.
    pub h1_log: Option<f64>,
}

pub fn energy_diagnostics(state: &SpectralField) -> Result<EnergyRecord> {
    require_2d(state)?;
    let r11 = MultiplierOp::riesz_product(0, 0).apply(state)?;
    let stretching = state
        .values()
        .iter()
        .zip(r11.values())
        .map(|(w, r)| w * r * r)
        .sum::<f64>()
        * state.grid().cell_volume();
    let h1_log = if state.min() > 0.0 { Some(h1_log(state)?) } else { None };
    Ok(EnergyRecord {
        l1: state.l1_norm(),
        r1_squared: riesz1_squared(state)?,
        stretching,
        h1_log,
    })
}

/// `‖R₁ω‖²` by Parseval: `|Ω| Σ (ξ₁²/|ξ|²)|c_ξ|²`. On Nyquist wavevectors
/// the weight uses the symmetrized symbol applied to the field, so the value
/// equals `-⟨ω, R₁²ω⟩` computed with the same discrete operator.
pub fn riesz1_squared(state: &SpectralField) -> Result<f64> {
    require_2d(state)?;
    let grid = state.grid();
    let mut sum = 0.0;
    for (index, c) in state.coefficients().iter().enumerate() {
        let k = grid.wavevector(index);
        if k == [0, 0] {
            continue;
        }
        let xi = grid.frequency_of(k);
        let mut weight = xi[0] * xi[0] / (xi[0] * xi[0] + xi[1] * xi[1]);
        if grid.is_nyquist(index) {
            let p = grid.frequency_of(grid.wavevector(grid.partner(index)));
            weight = 0.5 * (weight + p[0] * p[0] / (p[0] * p[0] + p[1] * p[1]));
        }
        sum += weight * c.norm_sqr();
    }
    Ok(sum * grid.volume())
}

/// `‖∇log ω‖²` by Parseval on the sampled `log ω`.
pub fn h1_log(state: &SpectralField) -> Result<f64> {
    let min = state.min();
    if !(min > 0.0) {
        return Err(Error::DiagnosticRefused {
            diagnostic: "H1_log",
            reason: format!("requires strictly positive data, minimum is {min:e}"),
        });
    }
    let log = state.map(|w| w.ln())?;
    let grid = log.grid();
    let mut sum = 0.0;
    for (index, c) in log.coefficients().iter().enumerate() {
        let xi = grid.frequency_of(grid.wavevector(index));
        let mut s = xi[0] * xi[0] + xi[1] * xi[1];
        if grid.is_nyquist(index) {
            // ∂ at a Nyquist index is symmetrized away along that axis.
            let [i, j] = grid.multi_index(index);
            let half = grid.points_per_axis() / 2;
            if i == half {
                s -= xi[0] * xi[0];
            }
            if grid.dim() == 2 && j == half {
                s -= xi[1] * xi[1];
            }
        }
        sum += s * c.norm_sqr();
    }
    Ok(sum * grid.volume())
}

/// `M = ∫ω W₁` for a sampled `W₁` on the state's grid.
pub fn m_functional(state: &SpectralField, w1: &SpectralField) -> Result<f64> {
    crate::field::inner_product(state, w1)
}

fn require_2d(state: &SpectralField) -> Result<()> {
    if state.grid().dim() == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: 2,
            found: state.grid().dim(),
        })
    }
}
