//! Weight pairs `(W₂, W₁ = R*(W₂))` for the blow-up criterion.

use alloc::string::{String, ToString};
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::function::FieldFn;
use crate::grid::{Domain, Grid};
use crate::multiplier::MultiplierOp;

pub type WeightFn = FieldFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Numeric,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Numeric => "numeric",
        }
    }
}

/// How the mass `∫W₂` was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassMethod {
    Exact,
    /// Uniform-node quadrature on the given grid.
    Quadrature { points_per_axis: usize, half_width: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    /// `∫W₂` as used for rescaling to unit mass.
    pub mass: f64,
    pub method: MassMethod,
    /// Mass over the whole line or plane, when known in closed form.
    pub exact_mass: Option<f64>,
}

impl Normalization {
    /// Relative mass missing from the truncation box, `1 - mass/exact`.
    pub fn deficit(&self) -> Option<f64> {
        self.exact_mass.map(|m| 1.0 - self.mass / m)
    }
}

#[derive(Debug, Clone)]
pub struct WeightPair {
    pub operator: MultiplierOp,
    pub w2: WeightFn,
    pub w1: WeightFn,
    pub provenance: Provenance,
    pub normalization: Normalization,
    /// Grid on which the pair is meant to be used (and was normalized).
    pub grid: Grid,
}

impl WeightPair {
    pub fn operator_name(&self) -> &str {
        self.operator.name()
    }

    /// Recomputes the normalization for another grid of the same kind (for
    /// line domains this changes the box).
    pub fn normalized_on(mut self, grid: Grid) -> Result<Self> {
        if grid.dim() != self.grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim(),
                found: grid.dim(),
            });
        }
        if self.normalization.method != MassMethod::Exact {
            let mass = self.w2.sample(&grid)?.integral();
            self.normalization.mass = mass;
            self.normalization.method = quadrature_method(&grid);
        }
        self.grid = grid;
        Ok(self)
    }
}

fn quadrature_method(grid: &Grid) -> MassMethod {
    MassMethod::Quadrature {
        points_per_axis: grid.points_per_axis(),
        half_width: match grid.domain() {
            Domain::Line { half_width } => Some(half_width),
            Domain::Torus => None,
        },
    }
}

pub const CATALOG: [&str; 5] = [
    "burgers_line",
    "clm_line",
    "clm_torus",
    "riesz12_torus",
    "riesz12_plane",
];

/// The closed-form examples, each on its reference grid. Line pairs are
/// normalized by quadrature over the box; torus pairs by their exact mass.
pub fn catalog_pair(name: &str) -> Result<WeightPair> {
    match name {
        "burgers_line" => {
            let grid = Grid::line(1, 4096, 32.0)?;
            let w2 = FieldFn::closed("1/(1+x^2)^2", |[x, _]| (1.0 + x * x).powi(-2));
            let w1 = FieldFn::closed("4x/(1+x^2)^3", |[x, _]| 4.0 * x / (1.0 + x * x).powi(3));
            line_pair(MultiplierOp::derivative(0), w2, w1, grid, PI / 2.0)
        }
        "clm_line" => {
            let grid = Grid::line(1, 1 << 17, 4096.0)?;
            let w2 = FieldFn::closed("1/(1+x^2)", |[x, _]| 1.0 / (1.0 + x * x));
            let w1 = FieldFn::closed("-x/(1+x^2)", |[x, _]| -x / (1.0 + x * x));
            line_pair(MultiplierOp::hilbert(), w2, w1, grid, PI)
        }
        "clm_torus" => Ok(WeightPair {
            operator: MultiplierOp::hilbert(),
            w2: FieldFn::closed("1+cos(x)", |[x, _]| 1.0 + x.cos()),
            w1: FieldFn::closed("-sin(x)", |[x, _]| -x.sin()),
            provenance: Provenance::ClosedForm,
            normalization: exact(2.0 * PI),
            grid: Grid::torus(1, 256)?,
        }),
        "riesz12_torus" => Ok(WeightPair {
            operator: MultiplierOp::riesz_product(0, 1),
            w2: FieldFn::closed("1+cos(x)cos(y)", |[x, y]| 1.0 + x.cos() * y.cos()),
            w1: FieldFn::closed("sin(x)sin(y)/2", |[x, y]| 0.5 * x.sin() * y.sin()),
            provenance: Provenance::ClosedForm,
            normalization: exact(4.0 * PI * PI),
            grid: Grid::torus(2, 256)?,
        }),
        "riesz12_plane" => {
            let grid = Grid::line(2, 512, 32.0)?;
            let w2 = FieldFn::closed("1/(1+|x|^2)^3", |[x, y]| (1.0 + x * x + y * y).powi(-3));
            let mut pair = numeric_weight(&MultiplierOp::riesz_product(0, 1), &w2, &grid)?;
            pair.normalization.exact_mass = Some(PI / 2.0);
            Ok(pair)
        }
        other => Err(Error::UnknownWeight(other.to_string())),
    }
}

fn exact(mass: f64) -> Normalization {
    Normalization {
        mass,
        method: MassMethod::Exact,
        exact_mass: Some(mass),
    }
}

fn line_pair(operator: MultiplierOp, w2: FieldFn, w1: FieldFn, grid: Grid, exact_mass: f64) -> Result<WeightPair> {
    let mass = w2.sample(&grid)?.integral();
    Ok(WeightPair {
        operator,
        w2,
        w1,
        provenance: Provenance::ClosedForm,
        normalization: Normalization {
            mass,
            method: quadrature_method(&grid),
            exact_mass: Some(exact_mass),
        },
        grid,
    })
}

/// `W₁ = R*(W₂)` computed spectrally from `W₂` sampled on `grid`.
pub fn numeric_weight(op: &MultiplierOp, w2: &WeightFn, grid: &Grid) -> Result<WeightPair> {
    let sampled = w2.sample(grid)?;
    if let Some((index, &value)) = sampled.values().iter().enumerate().find(|(_, &v)| v < 0.0) {
        return Err(Error::NegativeWeight { index, value });
    }
    let w1 = op.adjoint().apply(&sampled)?;
    let mass = sampled.integral();
    Ok(WeightPair {
        operator: op.clone(),
        w2: w2.clone(),
        w1: FieldFn::Sampled(w1),
        provenance: Provenance::Numeric,
        normalization: Normalization {
            mass,
            method: quadrature_method(grid),
            exact_mass: None,
        },
        grid: *grid,
    })
}

/// Largest deviation between two pair's `W₁` on the nodes of `grid` whose
/// coordinates all satisfy `|x| ≤ interior`, relative to the largest `|W₁|`
/// of `reference` there.
pub fn w1_relative_error(candidate: &WeightPair, reference: &WeightPair, grid: &Grid, interior: f64) -> Result<f64> {
    let a = candidate.w1.sample(grid)?;
    let b = reference.w1.sample(grid)?;
    let mut max_diff = 0.0f64;
    let mut max_ref = 0.0f64;
    for i in 0..grid.len() {
        let x = grid.coords(i);
        if x[..grid.dim()].iter().any(|c| c.abs() > interior) {
            continue;
        }
        max_diff = max_diff.max((a.values()[i] - b.values()[i]).abs());
        max_ref = max_ref.max(b.values()[i].abs());
    }
    if max_ref == 0.0 {
        return Ok(max_diff);
    }
    Ok(max_diff / max_ref)
}

/// Human-readable description of a pair for reports.
pub fn describe(pair: &WeightPair) -> String {
    alloc::format!(
        "R = {}, W2 = {}, W1 = {} ({})",
        pair.operator.name(),
        pair.w2.label(),
        pair.w1.label(),
        pair.provenance.as_str()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalog_name_resolves() {
        for name in CATALOG {
            if name == "clm_line" || name == "riesz12_plane" {
                continue;
            }
            catalog_pair(name).unwrap();
        }
        assert!(matches!(catalog_pair("nope"), Err(Error::UnknownWeight(_))));
    }

    #[test]
    fn clm_torus_numeric_is_minus_sine() {
        let pair = catalog_pair("clm_torus").unwrap();
        let numeric = numeric_weight(&pair.operator, &pair.w2, &pair.grid).unwrap();
        assert!(w1_relative_error(&numeric, &pair, &pair.grid, f64::INFINITY).unwrap() < 1e-12);
        assert_eq!(numeric.provenance, Provenance::Numeric);
    }

    #[test]
    fn neg_identity_weight_is_minus_w2() {
        let grid = Grid::torus(1, 32).unwrap();
        let w2 = FieldFn::closed("2+sin", |[x, _]| 2.0 + x.sin());
        let pair = numeric_weight(&MultiplierOp::neg_identity(), &w2, &grid).unwrap();
        let w1 = pair.w1.sample(&grid).unwrap();
        let w2s = w2.sample(&grid).unwrap();
        for (a, b) in w1.values().iter().zip(w2s.values()) {
            assert!((a + b).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_weights_are_rejected() {
        let grid = Grid::torus(1, 16).unwrap();
        let w2 = FieldFn::closed("sin", |[x, _]| x.sin());
        assert!(matches!(
            numeric_weight(&MultiplierOp::hilbert(), &w2, &grid),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn line_normalization_reports_the_deficit() {
        let pair = catalog_pair("burgers_line").unwrap();
        let deficit = pair.normalization.deficit().unwrap();
        // ∫_{|x|>32} x^-4 dx relative to π/2.
        assert!(deficit > 0.0 && deficit < 1e-4, "{deficit}");
    }
}
