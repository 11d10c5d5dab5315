//! Numerical blow-up detection. Finite-precision runs cannot see a
//! singularity; they see unbounded growth, loss of spectral resolution, or a
//! time step that has to shrink without end. Any of these is reported.

use num_complex::Complex64;

use crate::field::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Sup-norm growth factor relative to the initial sup-norm.
    pub sup_growth: f64,
    /// Largest tolerated share of energy in the top third of frequencies.
    pub spectral_tail: f64,
    /// Largest number of consecutive dt halvings for one step.
    pub max_halvings: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            sup_growth: 1e6,
            spectral_tail: 1e-2,
            max_halvings: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trigger {
    SupNorm { value: f64, limit: f64 },
    SpectralTail { fraction: f64 },
    DtCascade { depth: usize },
}

impl Trigger {
    pub fn name(&self) -> &'static str {
        match self {
            Trigger::SupNorm { .. } => "sup_norm",
            Trigger::SpectralTail { .. } => "spectral_tail",
            Trigger::DtCascade { .. } => "dt_cascade",
        }
    }
}

/// The series a decision is based on. `tail_fractions` may be empty when the
/// tail is not monitored; the first sup-norm is the reference.
#[derive(Debug, Clone, Copy)]
pub struct DetectionWindow<'a> {
    pub sup_norms: &'a [f64],
    pub tail_fractions: &'a [f64],
    pub halving_depth: usize,
}

/// First sample at which a threshold is crossed, if any.
pub fn detect_blowup(window: &DetectionWindow<'_>, thresholds: &Thresholds) -> Option<(usize, Trigger)> {
    let reference = *window.sup_norms.first()?;
    for (i, &sup) in window.sup_norms.iter().enumerate() {
        let tail = window.tail_fractions.get(i).copied();
        if let Some(trigger) = check_sample(reference, sup, tail, 0, thresholds) {
            return Some((i, trigger));
        }
    }
    if window.halving_depth > thresholds.max_halvings {
        return Some((
            window.sup_norms.len() - 1,
            Trigger::DtCascade {
                depth: window.halving_depth,
            },
        ));
    }
    None
}

pub(crate) fn check_sample(
    initial_sup: f64,
    sup: f64,
    tail: Option<f64>,
    depth: usize,
    thresholds: &Thresholds,
) -> Option<Trigger> {
    let limit = thresholds.sup_growth * initial_sup;
    if sup > limit || !sup.is_finite() {
        return Some(Trigger::SupNorm { value: sup, limit });
    }
    if let Some(fraction) = tail {
        if fraction > thresholds.spectral_tail {
            return Some(Trigger::SpectralTail { fraction });
        }
    }
    if depth > thresholds.max_halvings {
        return Some(Trigger::DtCascade { depth });
    }
    None
}

/// Share of `Σ|c_k|²` (mean included) carried by the top third of the
/// frequencies, i.e. wavevectors with some `|k_i| > n/3`.
pub fn spectral_tail_fraction(field: &SpectralField) -> f64 {
    tail_fraction_in_band(field, field.grid().points_per_axis() as i64 / 2)
}

/// As [`spectral_tail_fraction`] for a field band-limited to `|k_i| ≤ band`:
/// the tail starts at `2·band/3`.
pub fn tail_fraction_in_band(field: &SpectralField, band: i64) -> f64 {
    let grid = field.grid();
    let cut = 2 * band / 3;
    let mut total = 0.0;
    let mut tail = 0.0;
    for (index, c) in field.coefficients().iter().enumerate() {
        let e = Complex64::norm_sqr(c);
        total += e;
        let k = grid.wavevector(index);
        if k[0].abs() > cut || k[1].abs() > cut {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}
