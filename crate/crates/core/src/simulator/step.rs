//! Single time steps for `∂ₜω = ω R(ω)`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::multiplier::{apply_multipliers, MultiplierOp};

/// Operator data reused across steps on one grid.
#[derive(Debug, Clone)]
pub struct Stepper {
    multipliers: Vec<Complex64>,
    /// 2/3-rule mask: true for retained wavevectors.
    retained: Vec<bool>,
}

impl Stepper {
    pub fn new(op: &MultiplierOp, grid: &Grid) -> Result<Self> {
        let cut = grid.points_per_axis() as i64 / 3;
        let retained = (0..grid.len())
            .map(|i| {
                let k = grid.wavevector(i);
                k[0].abs() <= cut && k[1].abs() <= cut
            })
            .collect();
        Ok(Stepper {
            multipliers: op.multipliers(grid)?,
            retained,
        })
    }

    pub fn apply(&self, state: &SpectralField) -> Result<SpectralField> {
        apply_multipliers(state, &self.multipliers)
    }

    /// `ω ← ω·exp(dt·R(ω))` node-wise. The sign and the zero set of `ω` are
    /// kept exactly. No de-aliasing: the node-wise exponential is not a
    /// polynomial, so resolution is watched by the tail monitor instead.
    pub fn exponential(&self, state: &SpectralField, dt: f64, t: f64) -> Result<SpectralField> {
        let r = self.apply(state)?;
        let mut out = Vec::with_capacity(state.values().len());
        for (index, (&w, &rw)) in state.values().iter().zip(r.values()).enumerate() {
            let growth = (dt * rw).exp();
            let v = w * growth;
            if !growth.is_finite() || !v.is_finite() {
                return Err(Error::StepFailure {
                    time: t,
                    index,
                    value: dt * rw,
                });
            }
            out.push(v);
        }
        SpectralField::new(*state.grid(), out)
    }

    /// De-aliased right-hand side `P(ω·R(ω))`.
    pub fn rhs(&self, state: &SpectralField, t: f64) -> Result<SpectralField> {
        let r = self.apply(state)?;
        let product: Vec<f64> = state.values().iter().zip(r.values()).map(|(a, b)| a * b).collect();
        let product = finite(*state.grid(), product, t)?;
        let coefficients = product
            .coefficients()
            .iter()
            .zip(&self.retained)
            .map(|(&c, &keep)| if keep { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        Ok(SpectralField::from_coefficients(*state.grid(), coefficients)?.0)
    }

    /// Classical fourth-order Runge–Kutta on the raw form.
    pub fn rk4(&self, state: &SpectralField, dt: f64, t: f64) -> Result<SpectralField> {
        let grid = *state.grid();
        let axpy = |a: f64, x: &SpectralField, y: &SpectralField| -> Result<SpectralField> {
            let v = y.values().iter().zip(x.values()).map(|(yi, xi)| yi + a * xi).collect();
            finite(grid, v, t)
        };
        let k1 = self.rhs(state, t)?;
        let k2 = self.rhs(&axpy(dt / 2.0, &k1, state)?, t)?;
        let k3 = self.rhs(&axpy(dt / 2.0, &k2, state)?, t)?;
        let k4 = self.rhs(&axpy(dt, &k3, state)?, t)?;
        let v = (0..grid.len())
            .map(|i| {
                state.values()[i]
                    + dt / 6.0 * (k1.values()[i] + 2.0 * k2.values()[i] + 2.0 * k3.values()[i] + k4.values()[i])
            })
            .collect();
        finite(grid, v, t)
    }
}

fn finite(grid: Grid, values: Vec<f64>, t: f64) -> Result<SpectralField> {
    SpectralField::new(grid, values).map_err(|e| match e {
        Error::NonFiniteValue { index, value, .. } => Error::StepFailure { time: t, index, value },
        other => other,
    })
}

/// One exponential-Euler step.
pub fn step_exponential(state: &SpectralField, op: &MultiplierOp, dt: f64) -> Result<SpectralField> {
    check_dt(dt)?;
    Stepper::new(op, state.grid())?.exponential(state, dt, 0.0)
}

/// One de-aliased RK4 step.
pub fn step_rk4(state: &SpectralField, op: &MultiplierOp, dt: f64) -> Result<SpectralField> {
    check_dt(dt)?;
    Stepper::new(op, state.grid())?.rk4(state, dt, 0.0)
}

pub(crate) fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "dt",
            reason: alloc::format!("time step must be positive and finite, got {dt}"),
        })
    }
}
