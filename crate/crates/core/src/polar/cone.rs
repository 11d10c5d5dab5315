//! Angular profiles supported in a cone `|θ - θ_c| < h` (mod π), and the
//! inequality `|cos 2kθ| ≤ √2|cos 2θ|` on `3π/8 ≤ θ ≤ 5π/8`.

use alloc::format;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI, SQRT_2};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Shape of the angular factor `Γ`, both scaled to a maximum of 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeShape {
    /// `(1 - z²)⁵`, `z = (θ - θ_c)/h`.
    PolynomialBump,
    /// `exp(1 - 1/√(1 - z²))`; `log Γ` stays integrable over the cone.
    SmoothBump,
}

impl ConeShape {
    pub fn as_str(self) -> &'static str {
        match self {
            ConeShape::PolynomialBump => "polynomial_bump",
            ConeShape::SmoothBump => "smooth_bump",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "polynomial_bump" => Some(ConeShape::PolynomialBump),
            "smooth_bump" => Some(ConeShape::SmoothBump),
            _ => None,
        }
    }
}

/// `Γ` and the test weight `W` on one cone, extended evenly and π-periodically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeAngularProfile {
    pub center: f64,
    pub half_width: f64,
    pub shape: ConeShape,
}

impl Default for ConeAngularProfile {
    fn default() -> Self {
        ConeAngularProfile {
            center: FRAC_PI_2,
            half_width: FRAC_PI_8,
            shape: ConeShape::PolynomialBump,
        }
    }
}

/// `∫_{-1}^{1} (1 - t²)⁵ dt = 2¹¹(5!)²/11!`.
const BUMP5_INTEGRAL: f64 = 2048.0 * 14400.0 / 39_916_800.0;

impl ConeAngularProfile {
    pub fn new(center: f64, half_width: f64, shape: ConeShape) -> Result<Self> {
        if !(half_width > 0.0 && half_width <= FRAC_PI_2 / 2.0) {
            return Err(Error::InvalidParameter {
                name: "half_width",
                reason: format!("must lie in (0, π/4], got {half_width}"),
            });
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter {
                name: "center",
                reason: format!("must be finite, got {center}"),
            });
        }
        Ok(ConeAngularProfile {
            center,
            half_width,
            shape,
        })
    }

    /// The cone `3π/8 < |θ| < 5π/8` with the given shape.
    pub fn vertical(shape: ConeShape) -> Self {
        ConeAngularProfile {
            shape,
            ..Self::default()
        }
    }

    /// The same shape and width rotated to the horizontal axis.
    pub fn horizontal(shape: ConeShape) -> Self {
        ConeAngularProfile {
            center: 0.0,
            shape,
            ..Self::default()
        }
    }

    /// Signed offset `θ - θ_c` folded into `[-π/2, π/2)`.
    pub fn offset(&self, theta: f64) -> f64 {
        num_traits::Euclid::rem_euclid(&(theta - self.center + FRAC_PI_2), &PI) - FRAC_PI_2
    }

    /// True when `θ` lies in the open cone (mod π).
    pub fn contains(&self, theta: f64) -> bool {
        self.offset(theta).abs() < self.half_width
    }

    pub fn gamma(&self, theta: f64) -> f64 {
        let z = self.offset(theta) / self.half_width;
        if z.abs() >= 1.0 {
            return 0.0;
        }
        match self.shape {
            ConeShape::PolynomialBump => (1.0 - z * z).powi(5),
            ConeShape::SmoothBump => (1.0 - 1.0 / (1.0 - z * z).sqrt()).exp(),
        }
    }

    /// Test weight `W = K((θ - a)(b - θ))⁵` with unit integral over the cone.
    pub fn weight(&self, theta: f64) -> f64 {
        self.weight_derivatives(theta)[0]
    }

    /// `W` and its first four derivatives.
    pub fn weight_derivatives(&self, theta: f64) -> [f64; 5] {
        let t = self.offset(theta);
        let h = self.half_width;
        if t.abs() > h {
            return [0.0; 5];
        }
        // (h² - t²)⁵ = Σ_j C(5,j)(-1)^j h^{10-2j} t^{2j}, coefficients by power of t.
        let binom = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0];
        let mut coeffs = [0.0f64; 11];
        for (j, b) in binom.iter().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[2 * j] = sign * b * h.powi(10 - 2 * j as i32);
        }
        let scale = 1.0 / (BUMP5_INTEGRAL * h.powi(11));
        let mut out = [0.0; 5];
        for (order, slot) in out.iter_mut().enumerate() {
            let mut sum = 0.0;
            for p in (order..coeffs.len()).rev() {
                let falling: f64 = (0..order).map(|q| (p - q) as f64).product();
                sum += coeffs[p] * falling * t.powi((p - order) as i32);
            }
            *slot = scale * sum;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeInequality {
    pub k_max: usize,
    pub samples: usize,
    pub min_slack: f64,
    pub theta: f64,
    pub k: usize,
}

/// Minimum of `√2|cos 2θ| - |cos 2kθ|` over `k = 0..=k_max` and `samples`
/// equally spaced `θ` in the closed interval `[3π/8, 5π/8]`.
pub fn cone_inequality_check(k_max: usize, samples: usize) -> ConeInequality {
    let (a, b) = (3.0 * FRAC_PI_8, 5.0 * FRAC_PI_8);
    let mut best = ConeInequality {
        k_max,
        samples,
        min_slack: f64::INFINITY,
        theta: a,
        k: 0,
    };
    for j in 0..samples {
        let theta = if samples == 1 {
            FRAC_PI_2
        } else {
            a + (b - a) * j as f64 / (samples - 1) as f64
        };
        let lhs = SQRT_2 * (2.0 * theta).cos().abs();
        for k in 0..=k_max {
            let slack = lhs - (2.0 * k as f64 * theta).cos().abs();
            if slack < best.min_slack {
                best.min_slack = slack;
                best.theta = theta;
                best.k = k;
            }
        }
    }
    best
}
