//! Real scalar fields sampled on a [`Grid`], with lazily cached Fourier
//! coefficients.
//!
//! Coefficients are normalized so that
//! `values(x) = Σ_k c_k e^{i ξ_k·(x - origin)}`, i.e. `c = DFT(values) / n^dim`.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::{transform_2d, FftPlan};
use crate::grid::Grid;

#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    values: Vec<f64>,
    coefficients: OnceCell<Vec<Complex64>>,
}

impl SpectralField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(alloc::format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                what: "field value",
                index,
                value,
            });
        }
        Ok(SpectralField {
            grid,
            values,
            coefficients: OnceCell::new(),
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            values: vec![0.0; grid.len()],
            coefficients: OnceCell::new(),
        }
    }

    /// Builds a field from normalized coefficients. The imaginary part of the
    /// synthesized values must be at rounding level; it is returned alongside.
    pub(crate) fn from_coefficients(grid: Grid, coefficients: Vec<Complex64>) -> Result<(Self, f64)> {
        let (values, residue) = synthesize(&grid, coefficients.clone());
        let field = Self::new(grid, values)?;
        let _ = field.coefficients.set(coefficients);
        Ok((field, residue))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn coefficients(&self) -> &[Complex64] {
        self.coefficients.get_or_init(|| analyze(&self.grid, &self.values))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫ f` by the uniform-node rule.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Trigonometric interpolation onto another lattice of the same domain
    /// (different resolution and/or shifted origin). Exact for band-limited
    /// fields that the target resolves.
    pub fn resample(&self, target: &Grid) -> Result<Self> {
        if !self.grid.same_domain(target) {
            return Err(Error::GridMismatch);
        }
        if self.grid.same_lattice(target) {
            return Ok(self.clone());
        }
        let src = &self.grid;
        let coefficients = self.coefficients();
        let shift = [
            target.origin()[0] - src.origin()[0],
            target.origin()[1] - src.origin()[1],
        ];
        let ns = src.points_per_axis() as i64;
        let nt = target.points_per_axis() as i64;
        let split = |k: i64| -> ([(i64, f64); 2], usize) {
            if k == ns / 2 {
                ([(k, 0.5), (-k, 0.5)], 2)
            } else {
                ([(k, 1.0), (0, 0.0)], 1)
            }
        };
        let fold = |k: i64| -> Option<usize> {
            if k.abs() > nt / 2 {
                None
            } else {
                Some(k.rem_euclid(nt) as usize)
            }
        };
        let mut out = vec![Complex64::new(0.0, 0.0); target.len()];
        for (index, &c) in coefficients.iter().enumerate() {
            let k = src.wavevector(index);
            let (xs, nx) = split(k[0]);
            let (ys, ny) = if src.dim() == 2 { split(k[1]) } else { ([(0, 1.0), (0, 0.0)], 1) };
            for &(kx, wx) in &xs[..nx] {
                for &(ky, wy) in &ys[..ny] {
                    let (Some(ix), Some(iy)) = (fold(kx), fold(ky)) else {
                        continue;
                    };
                    let xi = src.frequency_of([kx, ky]);
                    let phase = xi[0] * shift[0] + xi[1] * shift[1];
                    let value = c * wx * wy * Complex64::new(phase.cos(), phase.sin());
                    let flat = if src.dim() == 1 {
                        ix
                    } else {
                        ix * target.points_per_axis() + iy
                    };
                    out[flat] += value;
                }
            }
        }
        let (values, _) = synthesize(target, out);
        Self::new(*target, values)
    }
}

/// Discrete L² pairing `∫ f g` by the uniform-node rule.
pub fn inner_product(f: &SpectralField, g: &SpectralField) -> Result<f64> {
    if f.grid.dim() != g.grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.grid.dim(),
            found: g.grid.dim(),
        });
    }
    if !f.grid.same_lattice(&g.grid) {
        return Err(Error::GridMismatch);
    }
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum::<f64>() * f.grid.cell_volume())
}

/// Forward transform of real samples, normalized by the node count.
pub(crate) fn analyze(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let n = grid.points_per_axis();
    let plan = FftPlan::new(n);
    if grid.dim() == 1 {
        plan.forward(&mut data);
    } else {
        transform_2d(&mut data, n, n, &plan, &plan, false);
    }
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|z| *z *= scale);
    data
}

/// Inverse of [`analyze`]; returns the real part and the largest imaginary
/// magnitude.
pub(crate) fn synthesize(grid: &Grid, mut data: Vec<Complex64>) -> (Vec<f64>, f64) {
    let n = grid.points_per_axis();
    let plan = FftPlan::new(n);
    if grid.dim() == 1 {
        plan.inverse(&mut data);
    } else {
        transform_2d(&mut data, n, n, &plan, &plan, true);
    }
    let residue = data.iter().fold(0.0, |m: f64, z| m.max(z.im.abs()));
    (data.into_iter().map(|z| z.re).collect(), residue)
}
