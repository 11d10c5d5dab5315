//! Functions on a grid's domain that can be evaluated anywhere: either a
//! closed form or a sampled field, interpolated trigonometrically.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::Grid;

pub type ScalarFn = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum FieldFn {
    Closed { label: String, f: ScalarFn },
    Sampled(SpectralField),
}

impl fmt::Debug for FieldFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldFn::Closed { label, .. } => write!(f, "Closed({label})"),
            FieldFn::Sampled(field) => write!(f, "Sampled({:?})", field.grid()),
        }
    }
}

impl FieldFn {
    pub fn closed(label: impl Into<String>, f: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        FieldFn::Closed {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> String {
        match self {
            FieldFn::Closed { label, .. } => label.clone(),
            FieldFn::Sampled(field) => alloc::format!("sampled on {} points", field.grid().len()),
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self, FieldFn::Closed { .. })
    }

    /// Values on the nodes of `grid`. Sampled functions are resampled
    /// spectrally, so `grid` must cover the same domain.
    pub fn sample(&self, grid: &Grid) -> Result<SpectralField> {
        match self {
            FieldFn::Closed { f, .. } => SpectralField::from_fn(*grid, |x| f(x)),
            FieldFn::Sampled(field) => field.resample(grid),
        }
    }

    /// Point evaluation. For sampled functions this is the full trigonometric
    /// sum, so it costs one pass over the coefficients.
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match self {
            FieldFn::Closed { f, .. } => f(x),
            FieldFn::Sampled(field) => {
                let grid = field.grid();
                let origin = grid.origin();
                let n = grid.points_per_axis() as i64;
                let mut sum = Complex64::new(0.0, 0.0);
                for (index, c) in field.coefficients().iter().enumerate() {
                    let k = grid.wavevector(index);
                    // Nyquist terms are split evenly between ±k to stay real.
                    let mut cosine_only = [false; 2];
                    for axis in 0..grid.dim() {
                        cosine_only[axis] = k[axis] == n / 2;
                    }
                    let xi = grid.frequency_of(k);
                    let mut term = *c;
                    for axis in 0..grid.dim() {
                        let phase = xi[axis] * (x[axis] - origin[axis]);
                        term *= if cosine_only[axis] {
                            Complex64::new(phase.cos(), 0.0)
                        } else {
                            Complex64::new(phase.cos(), phase.sin())
                        };
                    }
                    sum += term;
                }
                sum.re
            }
        }
    }
}

impl From<SpectralField> for FieldFn {
    fn from(field: SpectralField) -> Self {
        FieldFn::Sampled(field)
    }
}
