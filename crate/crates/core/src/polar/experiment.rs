//! Numerical experiments on the Cartesian grid: the sign of `R₁²W̃` for the
//! separable weight `W̃ = W₂(r)Γ(θ)`, and the growth monitor for
//! `G(t) = ∫ |ω₂(t,r)| W₁(r) dr` along a run with cone-supported data.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::function::FieldFn;
use crate::grid::{Domain, Grid};
use crate::multiplier::MultiplierOp;
use crate::polar::cone::ConeAngularProfile;
use crate::polar::modes::angular_modes;
use crate::polar::radial::{RadialFn, RadialGrid};
use crate::polar::weight::{dominance_check_on, singular_weight};
use crate::simulator::{self, Integrator, Scenario, Termination};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaOptions {
    /// `W̃` is truncated to `r_min ≤ r ≤ r_max`.
    pub r_min: f64,
    pub r_max: f64,
    /// The probed annulus; must lie inside `[10 r_min, r_max/10]`.
    pub annulus: (f64, f64),
    /// Nonnegativity is accepted down to `-tolerance · max W̃`.
    pub tolerance: f64,
}

impl Default for HaOptions {
    fn default() -> Self {
        HaOptions {
            r_min: 1e-3,
            r_max: 10.0,
            annulus: (1e-2, 1.0),
            tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignProbe {
    /// Minimum of `R₁²W̃` over the probed support; 0 when no node is probed.
    pub min_value: f64,
    pub min_location: [f64; 2],
    pub probed_nodes: usize,
    pub max_weight: f64,
    pub l1_mass: f64,
    pub l2_mass: f64,
}

impl SignProbe {
    pub fn relative_min(&self) -> f64 {
        if self.max_weight > 0.0 {
            self.min_value / self.max_weight
        } else {
            0.0
        }
    }

    /// `‖W̃‖₂ / ‖W̃‖₁`, 0 for the zero weight.
    pub fn mass_ratio(&self) -> f64 {
        if self.l1_mass > 0.0 {
            self.l2_mass / self.l1_mass
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct HaReport {
    pub alpha: f64,
    pub profile: ConeAngularProfile,
    pub grid: Grid,
    pub options: HaOptions,
    pub probe: SignProbe,
    pub nonnegative: bool,
    pub note: String,
}

/// Computes `R₁²w` and probes its sign at nodes where `w > 0` and
/// `annulus.0 ≤ |x| ≤ annulus.1`.
pub fn probe_sign(w: &SpectralField, annulus: (f64, f64)) -> Result<SignProbe> {
    let r11 = MultiplierOp::riesz_product(0, 0).apply(w)?;
    let grid = w.grid();
    let mut probe = SignProbe {
        min_value: 0.0,
        min_location: [0.0, 0.0],
        probed_nodes: 0,
        max_weight: w.max(),
        l1_mass: w.l1_norm(),
        l2_mass: w.l2_norm(),
    };
    let mut min = f64::INFINITY;
    for (i, (&wv, &rv)) in w.values().iter().zip(r11.values()).enumerate() {
        let [x, y] = grid.coords(i);
        let r = x.hypot(y);
        if wv > 0.0 && r >= annulus.0 && r <= annulus.1 {
            probe.probed_nodes += 1;
            if rv < min {
                min = rv;
                probe.min_location = [x, y];
            }
        }
    }
    if probe.probed_nodes > 0 {
        probe.min_value = min;
    }
    Ok(probe)
}

/// Samples `W₂(r)Γ(θ)` (truncated radially) on a planar line grid and probes
/// the sign of `R₁²W̃` on the annulus. The continuum statement is
/// nonnegativity; the report can only certify it up to the discretization.
pub fn ha_experiment(alpha: f64, profile: &ConeAngularProfile, grid: &Grid, options: &HaOptions) -> Result<HaReport> {
    let HaOptions {
        r_min,
        r_max,
        annulus,
        tolerance,
    } = *options;
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: grid.dim(),
        });
    }
    let Domain::Line { half_width } = grid.domain() else {
        return Err(Error::InvalidGrid("the experiment needs a planar line box".into()));
    };
    if !(0.0 < r_min && r_min < r_max && r_max <= half_width) {
        return Err(Error::InvalidParameter {
            name: "radial range",
            reason: format!("need 0 < r_min < r_max ≤ {half_width}, got [{r_min}, {r_max}]"),
        });
    }
    if !(annulus.0 >= 10.0 * r_min && annulus.1 <= r_max / 10.0 && annulus.0 < annulus.1) {
        return Err(Error::InvalidParameter {
            name: "annulus",
            reason: format!(
                "[{}, {}] must lie inside [{}, {}]",
                annulus.0,
                annulus.1,
                10.0 * r_min,
                r_max / 10.0
            ),
        });
    }
    let h = grid.spacing();
    if h > 10.0 * r_min {
        return Err(Error::GridTooCoarse {
            spacing: h,
            required: 10.0 * r_min,
        });
    }
    let weight = singular_weight(alpha)?;
    let w = SpectralField::from_fn(*grid, |[x, y]| {
        let r = x.hypot(y);
        if r < r_min || r > r_max {
            0.0
        } else {
            weight.w2.eval(r) * profile.gamma(y.atan2(x))
        }
    })?;
    let probe = probe_sign(&w, annulus)?;
    let nonnegative = probe.min_value >= -tolerance * probe.max_weight;
    Ok(HaReport {
        alpha,
        profile: *profile,
        grid: *grid,
        options: *options,
        nonnegative,
        note: format!(
            "nonnegativity is a continuum statement; checked at N = {} on a box of half-width {half_width} \
             over the annulus [{}, {}] with tolerance {tolerance:e}·max W",
            grid.points_per_axis(),
            annulus.0,
            annulus.1
        ),
        probe,
    })
}

/// Setup of the growth monitor run.
#[derive(Debug, Clone)]
pub struct KeyBoundSetup {
    pub grid: Grid,
    pub operator: MultiplierOp,
    pub profile: ConeAngularProfile,
    /// Radial profile `F₀` of the data `F₀(r)Γ(θ)`.
    pub radial: RadialFn,
    pub dt: f64,
    pub t_end: f64,
    /// Time between monitor samples.
    pub interval: f64,
    pub alpha: f64,
    pub c: f64,
    pub big_c: f64,
    pub radial_grid: RadialGrid,
    pub angular_samples: usize,
    /// `G·exp(-∫G)` counts as bounded below when it never drops under this
    /// fraction of its initial value.
    pub floor_fraction: f64,
}

impl KeyBoundSetup {
    /// `F₀ = exp(-1/r - r)`, smooth bump on the vertical cone, `R₁²`,
    /// box half-width 8 at `N = 256`.
    pub fn standard(operator: MultiplierOp) -> Result<Self> {
        let grid = Grid::line(2, 256, 8.0)?;
        Ok(KeyBoundSetup {
            grid,
            operator,
            profile: ConeAngularProfile::vertical(crate::polar::cone::ConeShape::SmoothBump),
            radial: RadialFn::new("exp(-1/r - r)", |r| if r > 0.0 { (-1.0 / r - r).exp() } else { 0.0 }),
            dt: 1e-2,
            t_end: 4.0,
            interval: 0.25,
            alpha: 0.1,
            c: 1.0,
            big_c: 1.0,
            radial_grid: RadialGrid::log_spaced(0.05, 7.0, 160)?,
            angular_samples: 64,
            floor_fraction: 0.5,
        })
    }
}

#[derive(Debug, Clone)]
pub struct KeyBoundReport {
    pub times: Vec<f64>,
    /// `G(t) = ∫ |ω₂| W₁ dr`.
    pub g: Vec<f64>,
    /// `G(t)·exp(-∫₀ᵗ G)`.
    pub growth: Vec<f64>,
    pub termination: Termination,
    /// `G(0) = 0`: nothing to monitor.
    pub degenerate: bool,
    pub bounded_below: bool,
    pub increasing: bool,
}

/// Runs the planar equation from `F₀(r)Γ(θ)` and monitors `G(t)`.
pub fn key_bound_monitor(setup: &KeyBoundSetup) -> Result<KeyBoundReport> {
    if !(setup.interval > 0.0 && setup.interval.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "interval",
            reason: format!("must be positive and finite, got {}", setup.interval),
        });
    }
    let grid = setup.grid;
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: grid.dim(),
        });
    }
    let profile = setup.profile;
    let radial = setup.radial.clone();
    let mut state = SpectralField::from_fn(grid, |[x, y]| {
        let r = x.hypot(y);
        if r == 0.0 {
            0.0
        } else {
            radial.eval(r) * profile.gamma(y.atan2(x))
        }
    })?;
    check_cone_support(&state, &profile)?;

    let w1 = dominance_check_on(&setup.radial_grid, setup.alpha, setup.c, setup.big_c)?.w1;
    let monitor = |field: &SpectralField| -> Result<f64> {
        let f = mode_two(field, &setup.radial_grid, setup.angular_samples)?;
        let integrand: Vec<f64> = setup
            .radial_grid
            .nodes()
            .iter()
            .zip(&f)
            .zip(&w1.values)
            .map(|((&r, &fv), &wv)| fv.abs() * wv * r)
            .collect();
        Ok(trapezoid(&integrand, setup.radial_grid.log_step()))
    };

    let mut times = Vec::from([0.0]);
    let mut g = Vec::from([monitor(&state)?]);
    let mut t = 0.0;
    let mut termination = Termination::ReachedEnd;
    while t < setup.t_end * (1.0 - 1e-12) {
        let span = setup.interval.min(setup.t_end - t);
        let mut scenario = Scenario::new(grid, setup.operator.clone(), FieldFn::Sampled(state.clone()), setup.dt, span);
        scenario.integrator = Integrator::ExponentialEuler;
        scenario.diagnostics = Vec::new();
        let run = simulator::run(&scenario)?;
        if !matches!(run.termination, Termination::ReachedEnd) {
            termination = run.termination;
            break;
        }
        state = run.final_state;
        t += span;
        times.push(t);
        g.push(monitor(&state)?);
    }

    let mut growth = Vec::with_capacity(g.len());
    let mut integral = 0.0;
    for i in 0..g.len() {
        if i > 0 {
            integral += 0.5 * (g[i] + g[i - 1]) * (times[i] - times[i - 1]);
        }
        growth.push(g[i] * (-integral).exp());
    }
    let degenerate = g[0] == 0.0;
    let bounded_below = !degenerate && growth.iter().all(|&v| v >= setup.floor_fraction * growth[0]);
    let increasing = !degenerate && g.windows(2).all(|w| w[1] > w[0]);
    Ok(KeyBoundReport {
        times,
        g,
        growth,
        termination,
        degenerate,
        bounded_below,
        increasing,
    })
}

/// Rejects data with more than `10⁻¹²` of its `L¹` mass outside the cone.
pub fn check_cone_support(field: &SpectralField, profile: &ConeAngularProfile) -> Result<()> {
    let grid = field.grid();
    let mut outside = 0.0;
    let mut total = 0.0;
    for (i, &v) in field.values().iter().enumerate() {
        let [x, y] = grid.coords(i);
        total += v.abs();
        if (x != 0.0 || y != 0.0) && !profile.contains(y.atan2(x)) {
            outside += v.abs();
        }
    }
    if total > 0.0 && outside > 1e-12 * total {
        return Err(Error::NotConeSupported {
            outside_mass: outside / total,
        });
    }
    Ok(())
}

/// `ω₂` on a radial grid, from bicubic interpolation of the Cartesian field
/// onto `angular_samples` angles per circle.
pub fn mode_two(field: &SpectralField, radial: &RadialGrid, angular_samples: usize) -> Result<Vec<f64>> {
    let samples: Vec<Vec<f64>> = radial
        .nodes()
        .iter()
        .map(|&r| {
            (0..angular_samples)
                .map(|j| {
                    let theta = 2.0 * PI * j as f64 / angular_samples as f64;
                    bicubic(field, [r * theta.cos(), r * theta.sin()])
                })
                .collect()
        })
        .collect();
    let modes = angular_modes(radial, &samples, 1e-6)?;
    if modes.k_max() < 1 {
        return Err(Error::InvalidParameter {
            name: "angular samples",
            reason: format!("{angular_samples} samples do not resolve cos 2θ"),
        });
    }
    Ok(modes.modes[1].clone())
}

/// Periodic 4×4 Lagrange interpolation.
pub fn bicubic(field: &SpectralField, at: [f64; 2]) -> f64 {
    let grid = field.grid();
    let n = grid.points_per_axis() as i64;
    let h = grid.spacing();
    let origin = grid.origin();
    let mut index = [0i64; 2];
    let mut weights = [[0.0; 4]; 2];
    for axis in 0..2 {
        let s = (at[axis] - origin[axis]) / h;
        let i0 = s.floor();
        let t = s - i0;
        index[axis] = i0 as i64 - 1;
        weights[axis] = [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ];
    }
    let values = field.values();
    let mut sum = 0.0;
    for (a, wa) in weights[0].iter().enumerate() {
        let i = (index[0] + a as i64).rem_euclid(n) as usize;
        for (b, wb) in weights[1].iter().enumerate() {
            let j = (index[1] + b as i64).rem_euclid(n) as usize;
            sum += wa * wb * values[i * n as usize + j];
        }
    }
    sum
}

fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}
