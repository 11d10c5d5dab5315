//! The singular radial weight `W₂(r) = r^{α-1}/(1 + r^{2α})` and the
//! dominance of `L*(W₂)` over `c·arctan(r^α)/(2αr)`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{End, Error, Result};
use crate::polar::operator::RadialOperator;
use crate::polar::radial::{EndRule, Radial, RadialFn, RadialGrid, RadialProfile};

const SERIES_TERMS: usize = 200_000;

#[derive(Debug, Clone)]
pub struct SingularWeight {
    pub alpha: f64,
    /// `W₂` with exact moments on both sides of any grid with
    /// `r_min < 1 < r_max`.
    pub w2: RadialFn,
}

/// `W₂` for `0 < α < 1/2`.
pub fn singular_weight(alpha: f64) -> Result<SingularWeight> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("must lie in (0, 1/2), got {alpha}"),
        });
    }
    let moments = Arc::new(move |end: End, beta: f64, r: f64| exact_moment(alpha, end, beta, r));
    let w2 = RadialFn::new(format!("r^({alpha}-1)/(1+r^(2·{alpha}))"), move |r| w2_value(alpha, r))
        .with_ends(EndRule::Exact(moments.clone()), EndRule::Exact(moments));
    Ok(SingularWeight { alpha, w2 })
}

fn w2_value(alpha: f64, r: f64) -> f64 {
    // r^{α-1}/(1+r^{2α}) = r^{-1-α}/(1+r^{-2α}), the second form for large r.
    if r <= 1.0 {
        r.powf(alpha - 1.0) / (1.0 + r.powf(2.0 * alpha))
    } else {
        r.powf(-1.0 - alpha) / (1.0 + r.powf(-2.0 * alpha))
    }
}

/// `∫₀^r s^β W₂` for `r < 1` or `∫_r^∞ s^β W₂` for `r > 1`, from the
/// geometric expansion of `1/(1 + r^{±2α})`.
fn exact_moment(alpha: f64, end: End, beta: f64, r: f64) -> Result<f64> {
    let (first, x, offset) = match end {
        End::Origin => {
            if beta + alpha <= 0.0 {
                return Err(Error::NonConvergentTail {
                    end,
                    detail: format!("s^{beta}·W₂ is not integrable at 0"),
                });
            }
            if r == 0.0 {
                return Ok(0.0);
            }
            (r.powf(beta + alpha), r.powf(2.0 * alpha), beta + alpha)
        }
        End::Infinity => {
            if beta >= alpha {
                return Err(Error::NonConvergentTail {
                    end,
                    detail: format!("s^{beta}·W₂ is not integrable at infinity"),
                });
            }
            (r.powf(beta - alpha), r.powf(-2.0 * alpha), alpha - beta)
        }
    };
    if !(x < 1.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: format!("exact moments of W₂ need r < 1 toward 0 and r > 1 toward infinity, got {r}"),
        });
    }
    let mut sum = 0.0;
    let mut power = first;
    for n in 0..SERIES_TERMS {
        let term = power / (offset + 2.0 * alpha * n as f64);
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        if term <= 1e-17 * sum.abs() {
            return Ok(sum);
        }
        power *= x;
    }
    Err(Error::InvalidParameter {
        name: "r",
        reason: format!("moment series of W₂ converges too slowly at r = {r}"),
    })
}

impl SingularWeight {
    /// `∫₀^r W₂ = arctan(r^α)/α`.
    pub fn cumulative(&self, r: f64) -> f64 {
        r.powf(self.alpha).atan() / self.alpha
    }

    pub fn sample(&self, grid: &RadialGrid) -> RadialProfile {
        self.w2.sample(grid)
    }
}

/// Largest relative error of the quadrature cumulative `∫₀^{r_i} W₂` against
/// `arctan(r_i^α)/α` over the grid nodes.
pub fn arctan_identity_error(weight: &SingularWeight, grid: &RadialGrid) -> Result<f64> {
    let engine = Radial::new(grid.clone());
    let moments = engine.head_moments(&weight.w2, 0.0)?;
    let head = moments.head_at_nodes()?;
    Ok(grid
        .nodes()
        .iter()
        .zip(head)
        .map(|(&r, &q)| {
            let exact = weight.cumulative(r);
            (q - exact).abs() / exact
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone)]
pub struct DominanceReport {
    pub alpha: f64,
    pub c: f64,
    pub big_c: f64,
    pub grid: RadialGrid,
    /// `W₁ = L*(W₂)` at the nodes.
    pub w1: RadialProfile,
    /// `W₁(r) - c·arctan(r^α)/(2αr)` at the nodes.
    pub margin: RadialProfile,
    pub min_margin: f64,
    pub argmin: f64,
}

impl DominanceReport {
    pub fn passes(&self) -> bool {
        self.min_margin > 0.0
    }
}

/// Default probe grid for [`dominance_check`]: `r ∈ [10⁻⁶, 10⁶]`.
pub fn dominance_grid() -> RadialGrid {
    RadialGrid::log_spaced(1e-6, 1e6, 1201).expect("valid constants")
}

pub fn dominance_check(alpha: f64, c: f64, big_c: f64) -> Result<DominanceReport> {
    dominance_check_on(&dominance_grid(), alpha, c, big_c)
}

pub fn dominance_check_on(grid: &RadialGrid, alpha: f64, c: f64, big_c: f64) -> Result<DominanceReport> {
    for (name, v) in [("c", c), ("C", big_c)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: if name == "c" { "c" } else { "C" },
                reason: format!("must be non-negative and finite, got {v}"),
            });
        }
    }
    let weight = singular_weight(alpha)?;
    let engine = Radial::new(grid.clone());
    let w1 = RadialOperator::l(c, big_c)
        .adjoint()
        .apply(&engine, &weight.w2)?
        .at_nodes(&engine)?;
    let values: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&w1.values)
        .map(|(&r, &w)| w - c * weight.cumulative(r) / (2.0 * r))
        .collect();
    let (i, &min_margin) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid has nodes");
    Ok(DominanceReport {
        alpha,
        c,
        big_c,
        grid: grid.clone(),
        argmin: grid.nodes()[i],
        w1,
        margin: RadialProfile::new(grid.clone(), values)?,
        min_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn alpha_range() {
        assert!(singular_weight(0.0).is_err());
        assert!(singular_weight(0.5).is_err());
        assert!(singular_weight(0.3).is_ok());
    }

    #[test]
    fn series_moments_match_closed_forms() {
        let w = singular_weight(0.1).unwrap();
        let EndRule::Exact(m) = &w.w2.head else { panic!() };
        // β = 0 toward the origin is the arctan cumulative.
        let r = 1e-3;
        let v = m(End::Origin, 0.0, r).unwrap();
        assert!((v - w.cumulative(r)).abs() < 1e-14 * v);
        // ∫_R^∞ W₂ = π/(2α) - arctan(R^α)/α.
        let big = 1e4;
        let v = m(End::Infinity, 0.0, big).unwrap();
        let exact = PI / 0.2 - w.cumulative(big);
        assert!((v - exact).abs() < 1e-12 * exact);
        assert!(m(End::Infinity, 0.2, big).is_err());
        assert!(m(End::Origin, -0.1, r).is_err());
    }

    #[test]
    fn cumulative_at_one() {
        let w = singular_weight(0.25).unwrap();
        assert!((w.cumulative(1.0) - PI).abs() < 1e-15);
    }
}
