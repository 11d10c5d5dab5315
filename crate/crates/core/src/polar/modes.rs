//! Even, π-periodic angular expansions `f(r,θ) = Σ_k f₂ₖ(r) cos(2kθ)`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::polar::radial::{RadialGrid, RadialProfile};

/// The family `{f₂ₖ}` for `k = 0..=K_max` on one radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarModes {
    pub grid: RadialGrid,
    /// `modes[k]` holds `f₂ₖ` at every node.
    pub modes: Vec<Vec<f64>>,
    /// Angular samples per circle the modes came from (0 if built directly).
    pub angular_samples: usize,
}

impl PolarModes {
    pub fn new(grid: RadialGrid, modes: Vec<Vec<f64>>) -> Result<Self> {
        for m in &modes {
            RadialProfile::new(grid.clone(), m.clone())?;
        }
        Ok(PolarModes {
            grid,
            modes,
            angular_samples: 0,
        })
    }

    pub fn k_max(&self) -> usize {
        self.modes.len().saturating_sub(1)
    }

    pub fn profile(&self, k: usize) -> RadialProfile {
        RadialProfile {
            grid: self.grid.clone(),
            values: self.modes[k].clone(),
        }
    }

    /// `Σ_k f₂ₖ(r_i) cos(2kθ)`.
    pub fn resynthesize(&self, node: usize, theta: f64) -> f64 {
        self.modes
            .iter()
            .enumerate()
            .map(|(k, m)| m[node] * (2.0 * k as f64 * theta).cos())
            .sum()
    }
}

/// Angular mode analysis of samples `f(r_i, θ_j)` with `θ_j = 2πj/n`,
/// `samples[i][j]`. `n` must be a multiple of 4. Content that is odd in `θ`
/// or not π-periodic beyond `tolerance·max|f|` is reported, not projected.
pub fn angular_modes(grid: &RadialGrid, samples: &[Vec<f64>], tolerance: f64) -> Result<PolarModes> {
    if samples.len() != grid.len() {
        return Err(Error::InvalidGrid(alloc::format!(
            "{} radial rows for {} nodes",
            samples.len(),
            grid.len()
        )));
    }
    let n = samples.first().map_or(0, Vec::len);
    if n < 4 || !n.is_multiple_of(4) || samples.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidParameter {
            name: "angular samples",
            reason: alloc::format!("need equal rows with a multiple of 4 samples, got {n}"),
        });
    }
    let plan = FftPlan::new(n);
    let k_max = n / 4;
    let scale = samples
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut modes = alloc::vec![Vec::with_capacity(grid.len()); k_max + 1];
    let mut defect = 0.0f64;
    for row in samples {
        let mut data: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        plan.forward(&mut data);
        for c in data.iter_mut() {
            *c /= n as f64;
        }
        for (j, c) in data.iter().enumerate() {
            if j % 2 == 1 {
                defect = defect.max(c.norm());
            } else {
                // Sine content: odd in θ.
                defect = defect.max(c.im.abs());
            }
        }
        modes[0].push(data[0].re);
        for k in 1..=k_max {
            // The Nyquist coefficient is not shared with a `-2k` partner.
            let c = data[2 * k].re;
            modes[k].push(if 2 * k == n / 2 { c } else { 2.0 * c });
        }
    }
    if defect > tolerance * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotEvenPiPeriodic {
            defect: defect / scale.max(f64::MIN_POSITIVE),
        });
    }
    Ok(PolarModes {
        grid: grid.clone(),
        modes,
        angular_samples: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn sample(grid: &RadialGrid, n: usize, f: impl Fn(f64, f64) -> f64) -> Vec<Vec<f64>> {
        grid.nodes()
            .iter()
            .map(|&r| (0..n).map(|j| f(r, 2.0 * PI * j as f64 / n as f64)).collect())
            .collect()
    }

    #[test]
    fn single_modes() {
        let g = RadialGrid::log_spaced(0.1, 10.0, 8).unwrap();
        let m = angular_modes(&g, &sample(&g, 64, |r, t| r.sqrt() * (2.0 * t).cos()), 1e-12).unwrap();
        for (i, r) in g.nodes().iter().enumerate() {
            assert!((m.modes[1][i] - r.sqrt()).abs() < 1e-14);
            for k in [0, 2, 3, 16] {
                assert!(m.modes[k][i].abs() < 1e-14);
            }
        }
        let one = angular_modes(&g, &sample(&g, 16, |_, _| 1.0), 1e-12).unwrap();
        assert!((one.modes[0][3] - 1.0).abs() < 1e-15);
        let sq = angular_modes(&g, &sample(&g, 32, |_, t| (2.0 * t).cos().powi(2)), 1e-12).unwrap();
        assert!((sq.modes[0][0] - 0.5).abs() < 1e-15 && (sq.modes[2][0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn odd_content_is_reported() {
        let g = RadialGrid::log_spaced(0.1, 10.0, 4).unwrap();
        assert!(matches!(
            angular_modes(&g, &sample(&g, 32, |_, t| t.cos()), 1e-10),
            Err(Error::NotEvenPiPeriodic { .. })
        ));
        assert!(angular_modes(&g, &sample(&g, 32, |_, t| (2.0 * t).sin()), 1e-10).is_err());
    }

    #[test]
    fn nyquist_mode_resynthesizes() {
        let g = RadialGrid::log_spaced(1.0, 2.0, 2).unwrap();
        let n = 16;
        let f = |_: f64, t: f64| 1.0 + (8.0 * t).cos() + 0.3 * (4.0 * t).cos();
        let m = angular_modes(&g, &sample(&g, n, f), 1e-12).unwrap();
        for j in 0..n {
            let t = 2.0 * PI * j as f64 / n as f64;
            assert!((m.resynthesize(0, t) - f(1.0, t)).abs() < 1e-14);
        }
    }
}
