//! Fourier multiplier operators `R`, acting diagonally on coefficients:
//! `(R f)^(ξ) = m(ξ) f^(ξ)`.
//!
//! Conventions: `∂ₓ ↔ iξ₁`, Hilbert `H ↔ -i sgn ξ`, Riesz `R_j ↔ -iξ_j/|ξ|`,
//! so `R_a R_b ↔ -ξ_a ξ_b/|ξ|²`. Frequencies are physical, `ξ = 2πk/period`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;

pub type SymbolFn = Arc<dyn Fn([f64; 2]) -> Complex64 + Send + Sync>;

/// Relative size of the imaginary residue tolerated before it is discarded.
pub const REALITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone)]
pub enum Symbol {
    Zero,
    /// `c · Id`.
    Scalar(f64),
    /// `∂` along `axis`.
    Derivative { axis: usize },
    Hilbert,
    Riesz { axis: usize },
    /// `R_a R_b`.
    RieszProduct { a: usize, b: usize },
    Custom {
        f: SymbolFn,
        dim: Option<usize>,
    },
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Zero => write!(f, "Zero"),
            Symbol::Scalar(c) => write!(f, "Scalar({c})"),
            Symbol::Derivative { axis } => write!(f, "Derivative({axis})"),
            Symbol::Hilbert => write!(f, "Hilbert"),
            Symbol::Riesz { axis } => write!(f, "Riesz({axis})"),
            Symbol::RieszProduct { a, b } => write!(f, "RieszProduct({a}, {b})"),
            Symbol::Custom { dim, .. } => write!(f, "Custom(dim = {dim:?})"),
        }
    }
}

impl Symbol {
    fn eval(&self, xi: [f64; 2]) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let norm = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        match self {
            Symbol::Zero => Complex64::new(0.0, 0.0),
            Symbol::Scalar(c) => Complex64::new(*c, 0.0),
            Symbol::Derivative { axis } => i * xi[*axis],
            Symbol::Hilbert => -i * signum(xi[0]),
            Symbol::Riesz { axis } => {
                if norm == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    -i * xi[*axis] / norm
                }
            }
            Symbol::RieszProduct { a, b } => {
                if norm == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(-xi[*a] * xi[*b] / (norm * norm), 0.0)
                }
            }
            Symbol::Custom { f, .. } => f(xi),
        }
    }

    fn required_dim(&self) -> Option<usize> {
        match self {
            Symbol::Zero | Symbol::Scalar(_) => None,
            Symbol::Derivative { axis } => (*axis == 1).then_some(2),
            Symbol::Hilbert => Some(1),
            Symbol::Riesz { .. } | Symbol::RieszProduct { .. } => Some(2),
            Symbol::Custom { dim, .. } => *dim,
        }
    }
}

fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Value assigned to the coefficient at `ξ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroModeRule {
    /// The zero mode is annihilated (operators defined modulo constants).
    Zero,
    /// Use the symbol's own value at `ξ = 0`.
    Symbol,
    Value(Complex64),
}

#[derive(Clone, Debug)]
pub struct MultiplierOp {
    name: String,
    symbol: Symbol,
    conjugated: bool,
    zero_mode: ZeroModeRule,
}

impl MultiplierOp {
    pub fn new(name: impl Into<String>, symbol: Symbol, zero_mode: ZeroModeRule) -> Self {
        MultiplierOp {
            name: name.into(),
            symbol,
            conjugated: false,
            zero_mode,
        }
    }

    pub fn derivative(axis: usize) -> Self {
        let name = if axis == 0 { "derivative_x" } else { "derivative_y" };
        Self::new(name, Symbol::Derivative { axis }, ZeroModeRule::Symbol)
    }

    pub fn hilbert() -> Self {
        Self::new("hilbert", Symbol::Hilbert, ZeroModeRule::Zero)
    }

    pub fn riesz(axis: usize) -> Self {
        Self::new(format!("riesz{}", axis + 1), Symbol::Riesz { axis }, ZeroModeRule::Zero)
    }

    pub fn riesz_product(a: usize, b: usize) -> Self {
        Self::new(
            format!("riesz{}{}", a + 1, b + 1),
            Symbol::RieszProduct { a, b },
            ZeroModeRule::Zero,
        )
    }

    pub fn neg_identity() -> Self {
        Self::new("neg_identity", Symbol::Scalar(-1.0), ZeroModeRule::Symbol)
    }

    pub fn zero() -> Self {
        Self::new("zero", Symbol::Zero, ZeroModeRule::Symbol)
    }

    pub fn custom(
        name: impl Into<String>,
        dim: Option<usize>,
        zero_mode: ZeroModeRule,
        f: impl Fn([f64; 2]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(
            name,
            Symbol::Custom {
                f: Arc::new(f),
                dim,
            },
            zero_mode,
        )
    }

    /// Catalog lookup by the names used in scenario files.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "derivative_x" | "dx" => Self::derivative(0),
            "derivative_y" | "dy" => Self::derivative(1),
            "hilbert" => Self::hilbert(),
            "riesz1" => Self::riesz(0),
            "riesz2" => Self::riesz(1),
            "riesz11" => Self::riesz_product(0, 0),
            "riesz12" => Self::riesz_product(0, 1),
            "riesz22" => Self::riesz_product(1, 1),
            "neg_identity" => Self::neg_identity(),
            "zero" => Self::zero(),
            other => return Err(Error::UnknownOperator(other.to_string())),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn zero_mode(&self) -> ZeroModeRule {
        self.zero_mode
    }

    pub fn required_dim(&self) -> Option<usize> {
        self.symbol.required_dim()
    }

    /// `m(ξ)` at a physical frequency.
    pub fn symbol_at(&self, xi: [f64; 2]) -> Complex64 {
        let m = self.symbol.eval(xi);
        if self.conjugated {
            m.conj()
        } else {
            m
        }
    }

    /// Formal L² adjoint: the symbol is conjugated, the zero-mode rule kept.
    pub fn adjoint(&self) -> Self {
        let name = match self.name.strip_suffix('*') {
            Some(base) => base.to_string(),
            None => format!("{}*", self.name),
        };
        MultiplierOp {
            name,
            symbol: self.symbol.clone(),
            conjugated: !self.conjugated,
            zero_mode: match self.zero_mode {
                ZeroModeRule::Value(v) => ZeroModeRule::Value(v.conj()),
                rule => rule,
            },
        }
    }

    pub fn check_dim(&self, grid: &Grid) -> Result<()> {
        match self.required_dim() {
            Some(d) if d != grid.dim() => Err(Error::DimensionMismatch {
                expected: d,
                found: grid.dim(),
            }),
            _ => Ok(()),
        }
    }

    /// The multiplier actually applied at each coefficient index of `grid`.
    ///
    /// On Nyquist indices, where the stored wavevector is its own alias of
    /// `-k`, the symbol is averaged with the conjugate of its partner's value
    /// so real fields stay real.
    pub fn multipliers(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        self.check_dim(grid)?;
        (0..grid.len())
            .map(|index| {
                if index == 0 {
                    return Ok(match self.zero_mode {
                        ZeroModeRule::Zero => Complex64::new(0.0, 0.0),
                        ZeroModeRule::Value(v) => v,
                        ZeroModeRule::Symbol => self.finite_symbol(grid.frequency_of([0, 0]))?,
                    });
                }
                let xi = grid.frequency_of(grid.wavevector(index));
                let m = self.finite_symbol(xi)?;
                if grid.is_nyquist(index) {
                    let partner = grid.frequency_of(grid.wavevector(grid.partner(index)));
                    let mp = self.finite_symbol(partner)?;
                    Ok((m + mp.conj()) * 0.5)
                } else {
                    Ok(m)
                }
            })
            .collect()
    }

    fn finite_symbol(&self, xi: [f64; 2]) -> Result<Complex64> {
        let m = self.symbol_at(xi);
        if m.re.is_finite() && m.im.is_finite() {
            Ok(m)
        } else {
            Err(Error::NonFiniteSymbol {
                operator: self.name.clone(),
                frequency: xi,
            })
        }
    }

    pub fn apply(&self, field: &SpectralField) -> Result<SpectralField> {
        let multipliers = self.multipliers(field.grid())?;
        apply_multipliers(field, &multipliers)
    }
}

/// `R(f)` for an operator; see [`MultiplierOp::apply`].
pub fn apply_multiplier(field: &SpectralField, op: &MultiplierOp) -> Result<SpectralField> {
    op.apply(field)
}

pub fn adjoint(op: &MultiplierOp) -> MultiplierOp {
    op.adjoint()
}

/// Applies precomputed per-index multipliers (from [`MultiplierOp::multipliers`]).
pub fn apply_multipliers(field: &SpectralField, multipliers: &[Complex64]) -> Result<SpectralField> {
    let grid = *field.grid();
    if multipliers.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let coefficients: Vec<Complex64> = field
        .coefficients()
        .iter()
        .zip(multipliers)
        .map(|(c, m)| c * m)
        .collect();
    let (out, residue) = SpectralField::from_coefficients(grid, coefficients)?;
    let scale = out.max_abs().max(field.max_abs());
    if residue > REALITY_TOLERANCE * scale {
        return Err(Error::NonRealResult {
            residue: residue / scale,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::inner_product;
    use core::f64::consts::PI;

    fn close(a: &SpectralField, f: impl Fn([f64; 2]) -> f64, tol: f64) {
        for i in 0..a.grid().len() {
            let expected = f(a.grid().coords(i));
            assert!(
                (a.values()[i] - expected).abs() <= tol,
                "node {i}: {} vs {expected}",
                a.values()[i]
            );
        }
    }

    #[test]
    fn derivative_of_sine_is_cosine() {
        let g = Grid::torus(1, 32).unwrap();
        let f = SpectralField::from_fn(g, |[x, _]| x.sin()).unwrap();
        close(&MultiplierOp::derivative(0).apply(&f).unwrap(), |[x, _]| x.cos(), 1e-13);
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let g = Grid::torus(1, 32).unwrap();
        let f = SpectralField::from_fn(g, |[x, _]| x.cos()).unwrap();
        close(&MultiplierOp::hilbert().apply(&f).unwrap(), |[x, _]| x.sin(), 1e-14);
    }

    #[test]
    fn riesz_product_on_the_torus_has_the_half() {
        let g = Grid::torus(2, 16).unwrap();
        let f = SpectralField::from_fn(g, |[x, y]| 1.0 + x.cos() * y.cos()).unwrap();
        let out = MultiplierOp::riesz_product(0, 1).apply(&f).unwrap();
        close(&out, |[x, y]| 0.5 * x.sin() * y.sin(), 1e-14);
    }

    #[test]
    fn riesz_square_kills_constants() {
        let g = Grid::torus(2, 8).unwrap();
        let f = SpectralField::from_fn(g, |_| 3.5).unwrap();
        let out = MultiplierOp::riesz_product(0, 0).apply(&f).unwrap();
        assert!(out.max_abs() == 0.0);
    }

    #[test]
    fn adjoint_conjugates_the_symbol() {
        let xi = [2.0, -3.0];
        let d = MultiplierOp::derivative(0);
        assert_eq!(d.adjoint().symbol_at(xi), -d.symbol_at(xi));
        let h = MultiplierOp::hilbert();
        assert_eq!(h.adjoint().symbol_at([2.0, 0.0]), -h.symbol_at([2.0, 0.0]));
        let r = MultiplierOp::riesz_product(0, 1);
        assert_eq!(r.adjoint().symbol_at(xi), r.symbol_at(xi));
        assert_eq!(r.adjoint().zero_mode(), r.zero_mode());
        assert_eq!(h.adjoint().adjoint().name(), "hilbert");
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g1 = Grid::torus(1, 8).unwrap();
        let f = SpectralField::zeros(g1);
        assert!(matches!(
            MultiplierOp::riesz(0).apply(&f),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        let g2 = Grid::torus(2, 8).unwrap();
        assert!(MultiplierOp::hilbert().apply(&SpectralField::zeros(g2)).is_err());
    }

    #[test]
    fn non_finite_symbols_are_reported() {
        let g = Grid::torus(1, 8).unwrap();
        let op = MultiplierOp::custom("blowup", Some(1), ZeroModeRule::Symbol, |xi| {
            Complex64::new(1.0 / xi[0], 0.0)
        });
        let f = SpectralField::from_fn(g, |[x, _]| x.sin()).unwrap();
        assert!(matches!(op.apply(&f), Err(Error::NonFiniteSymbol { .. })));
    }

    #[test]
    fn non_real_symbols_are_reported() {
        let g = Grid::torus(1, 16).unwrap();
        // i·|ξ| violates m(-ξ) = conj(m(ξ)).
        let op = MultiplierOp::custom("bad", Some(1), ZeroModeRule::Zero, |xi| Complex64::new(0.0, xi[0].abs()));
        let f = SpectralField::from_fn(g, |[x, _]| x.cos()).unwrap();
        assert!(matches!(op.apply(&f), Err(Error::NonRealResult { .. })));
    }

    #[test]
    fn frequencies_scale_with_the_period() {
        let g = Grid::line(1, 64, PI).unwrap();
        let f = SpectralField::from_fn(g, |[x, _]| (2.0 * x).sin()).unwrap();
        close(&MultiplierOp::derivative(0).apply(&f).unwrap(), |[x, _]| 2.0 * (2.0 * x).cos(), 1e-12);
    }

    #[test]
    fn neg_identity_keeps_the_mean() {
        let g = Grid::torus(1, 8).unwrap();
        let f = SpectralField::from_fn(g, |[x, _]| 2.0 + x.sin()).unwrap();
        close(&MultiplierOp::neg_identity().apply(&f).unwrap(), |[x, _]| -2.0 - x.sin(), 1e-14);
        let pair = inner_product(&f, &MultiplierOp::zero().apply(&f).unwrap()).unwrap();
        assert_eq!(pair, 0.0);
    }
}
