//! The `polar` verb: stream-function modes, the cone inequality, `L`/`L*`,
//! the singular weight and the cone experiments for `R₁²`.

use std::path::Path;

use blowup_core::polar::cone::{cone_inequality_check, ConeAngularProfile};
use blowup_core::polar::experiment::{ha_experiment, key_bound_monitor, HaOptions, HaReport, KeyBoundSetup};
use blowup_core::polar::operator::{RadialOperator, Range, Term};
use blowup_core::polar::radial::{EndRule, Radial, RadialFn, RadialProfile};
use blowup_core::polar::stream::{mode_ode_residual, s_integral, stream_mode, stream_mode_green};
use blowup_core::polar::weight::{arctan_identity_error, dominance_check, singular_weight, DominanceReport};
use blowup_core::{Grid, MultiplierOp};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{self, HaConfig, KeyBoundConfig, OperatorsConfig, PolarConfig, StreamConfig, WeightConfig};
use crate::error::{CliError, Result};
use crate::expr;
use crate::output::{num, Table};
use crate::pipeline::{Context, Options};

/// Seed of the random operator pairs when neither the config nor the
/// command line sets one.
pub const DEFAULT_SEED: u64 = 2024;

pub fn run_polar(path: &Path, options: &Options, ctx: &mut Context) -> Result<()> {
    let cfg = PolarConfig::load(path)?;
    ctx.report.name = cfg.name.clone();
    ctx.report.config = serde_json::to_value(&cfg)?;
    let seed = options.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    ctx.report.seed = Some(seed);
    ctx.checks = cfg.checks.clone();
    cfg.validate()?;

    let mut section = serde_json::Map::new();
    if let Some(s) = &cfg.stream {
        section.insert("stream".into(), stream(s, ctx)?);
    }
    if let Some(c) = &cfg.cone {
        let r = cone_inequality_check(c.k_max, c.samples);
        ctx.set("cone_min_slack", r.min_slack);
        section.insert(
            "cone".into(),
            json!({"k_max": r.k_max, "samples": r.samples, "min_slack": r.min_slack, "theta": r.theta, "k": r.k}),
        );
    }
    if let Some(o) = &cfg.operators {
        section.insert("operators".into(), operators(o, seed, ctx)?);
    }
    let mut passing = None;
    if let Some(w) = &cfg.weight {
        let (value, pass) = weight(w, ctx)?;
        section.insert("weight".into(), value);
        passing = pass;
    }
    if let Some(h) = &cfg.ha {
        let alpha = match (h.alpha, passing) {
            (Some(a), _) => a,
            (None, Some(a)) => a,
            (None, None) => return Err(CliError::config("ha: no α passed the dominance scan and none was given")),
        };
        section.insert("ha".into(), ha(h, alpha, ctx)?);
    }
    if let Some(k) = &cfg.key_bound {
        section.insert("key_bound".into(), key_bound(k, ctx)?);
    }
    ctx.report.polar = Some(serde_json::Value::Object(section));
    Ok(())
}

fn profile_table(file: String, p: &RadialProfile) -> Table {
    let mut t = Table::new(file, &["r", "value"]);
    for (r, v) in p.grid.nodes().iter().zip(&p.values) {
        t.push_numbers(&[*r, *v]);
    }
    t
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn stream(s: &StreamConfig, ctx: &mut Context) -> Result<serde_json::Value> {
    let grid = s.grid.build()?;
    let engine = Radial::new(grid.clone());
    let profiles: Vec<RadialFn> = s.profiles.iter().map(|p| expr::radial_fn(p)).collect::<Result<_>>()?;
    let mut s_defect = 0.0f64;
    let mut residual_max = 0.0f64;
    let mut green_max = 0.0f64;
    let mut rows = Vec::new();
    for (i, f) in profiles.iter().enumerate() {
        for &r in &s.s_radii {
            let si = s_integral(&engine, f, r)?;
            s_defect = s_defect.max(si.defect());
            rows.push(json!({"profile": f.label, "r": r, "nested": si.nested, "by_parts": si.by_parts, "defect": si.defect()}));
        }
        let omega = f.sample(&grid);
        let scale = omega.max_abs();
        for &k in &s.modes {
            let nested = stream_mode(&engine, f, k)?;
            let green = stream_mode_green(&engine, f, k)?;
            let gscale = max_abs(&green);
            let diff = nested.iter().zip(&green).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let green_defect = if gscale > 0.0 { diff / gscale } else { diff };
            green_max = green_max.max(green_defect);
            let psi = RadialProfile::new(grid.clone(), nested)?;
            let residual = mode_ode_residual(&psi, &omega, k)?;
            let n = residual.values.len();
            let interior = max_abs(&residual.values[2..n - 2]);
            let rel = if scale > 0.0 { interior / scale } else { interior };
            residual_max = residual_max.max(rel);
            rows.push(json!({"profile": f.label, "mode": 2 * k, "ode_residual": rel, "green_defect": green_defect}));
            if i == 0 {
                ctx.tables.push(profile_table(format!("stream_residual_mode{}.csv", 2 * k), &residual));
            }
        }
    }
    ctx.set("s_identity_max_defect", s_defect);
    ctx.set("stream_residual_max", residual_max);
    ctx.set("stream_green_max_defect", green_max);
    Ok(json!({
        "grid": {"r_min": grid.r_min(), "r_max": grid.r_max(), "nodes": grid.len()},
        "s_identity_max_defect": s_defect,
        "stream_residual_max": residual_max,
        "stream_green_max_defect": green_max,
        "interior_trim_nodes": 2,
        "entries": rows,
    }))
}

/// A smooth bump on a random interval inside `[0.05, 20]` with a random
/// cubic modulation.
pub fn random_bump(rng: &mut ChaCha8Rng) -> RadialFn {
    let a: f64 = 0.05 + 2.0 * rng.random::<f64>();
    let b: f64 = a + 0.5 + 15.0 * rng.random::<f64>();
    let p: [f64; 3] = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
    RadialFn::new("bump", move |s| {
        if s <= a || s >= b {
            return 0.0;
        }
        let z = (2.0 * s - a - b) / (b - a);
        (1.0 - z * z).powi(4) * (1.0 + p[0] * z + p[1] * z * z + p[2] * z * z * z)
    })
    .with_ends(EndRule::Compact, EndRule::Compact)
    .with_breakpoints(&[a, b])
}

/// `∫ f g dr`, split at both functions' breakpoints.
fn pairing(e: &Radial, f: &RadialFn, g: &RadialFn) -> f64 {
    let mut merged = f.breakpoints.clone();
    merged.extend_from_slice(&g.breakpoints);
    let f = f.clone().with_breakpoints(&merged);
    e.pairing_inside(&f, g)
}

/// `|⟨Af, h⟩ - ⟨f, Bh⟩| / (‖f‖‖h‖)`.
fn pairing_defect(e: &Radial, a: &RadialOperator, b: &RadialOperator, f: &RadialFn, h: &RadialFn) -> Result<f64> {
    let interp = |p: RadialProfile| p.interpolant(EndRule::Compact, EndRule::Compact);
    let af = interp(a.apply(e, f)?.at_nodes(e)?);
    let bh = interp(b.apply(e, h)?.at_nodes(e)?);
    let norm = (pairing(e, f, f) * pairing(e, h, h)).sqrt();
    Ok((pairing(e, &af, h) - pairing(e, f, &bh)).abs() / norm)
}

fn operators(o: &OperatorsConfig, seed: u64, ctx: &mut Context) -> Result<serde_json::Value> {
    let grid = o.grid.build()?;
    let e = Radial::new(grid.clone());
    let l = RadialOperator::l(o.c, o.big_c);
    let lstar = l.adjoint();
    let mut half = lstar.clone();
    half.terms[0] = Term::Integral {
        coeff: 0.5,
        a: -1.0,
        b: 0.0,
        range: Range::Head,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut half_worst = 0.0f64;
    for _ in 0..o.pairs {
        let f = random_bump(&mut rng);
        let h = random_bump(&mut rng);
        worst = worst.max(pairing_defect(&e, &l, &lstar, &f, &h)?);
        half_worst = half_worst.max(pairing_defect(&e, &l, &half, &f, &h)?);
    }
    ctx.set("adjoint_max_defect", worst);
    ctx.set("half_variant_max_defect", half_worst);
    Ok(json!({
        "grid": {"r_min": grid.r_min(), "r_max": grid.r_max(), "nodes": grid.len()},
        "c": o.c,
        "big_c": o.big_c,
        "pairs": o.pairs,
        "seed": seed,
        "l": l.describe(),
        "l_star": lstar.describe(),
        "half_variant": half.describe(),
        "adjoint_max_defect": worst,
        "half_variant_max_defect": half_worst,
    }))
}

fn weight(w: &WeightConfig, ctx: &mut Context) -> Result<(serde_json::Value, Option<f64>)> {
    let grid = w.grid.build()?;
    let mut arctan = 0.0f64;
    let mut scan = Vec::new();
    let mut summary = Table::new("dominance_scan.csv", &["alpha", "min_margin", "argmin", "passes", "arctan_error"]);
    let mut passing: Option<DominanceReport> = None;
    for &alpha in &w.alphas {
        let sw = singular_weight(alpha)?;
        let err = arctan_identity_error(&sw, &grid)?;
        arctan = arctan.max(err);
        let d = dominance_check(alpha, w.c, w.big_c)?;
        summary.push(vec![num(alpha), num(d.min_margin), num(d.argmin), d.passes().to_string(), num(err)]);
        ctx.tables.push(profile_table(format!("dominance_margin_alpha_{alpha}.csv"), &d.margin));
        scan.push(json!({"alpha": alpha, "min_margin": d.min_margin, "argmin": d.argmin, "passes": d.passes(), "arctan_error": err}));
        if passing.is_none() && d.passes() {
            passing = Some(d);
        }
    }
    ctx.tables.push(summary);
    ctx.set("arctan_max_error", arctan);
    ctx.flag("dominance_any_pass", passing.is_some());
    if let Some(p) = &passing {
        ctx.set("dominance_pass_alpha", p.alpha);
        ctx.set("dominance_min_margin", p.min_margin);
    }
    let dg = &blowup_core::polar::weight::dominance_grid();
    Ok((
        json!({
            "c": w.c,
            "big_c": w.big_c,
            "arctan_grid": {"r_min": grid.r_min(), "r_max": grid.r_max(), "nodes": grid.len()},
            "dominance_grid": {"r_min": dg.r_min(), "r_max": dg.r_max(), "nodes": dg.len()},
            "arctan_max_error": arctan,
            "passing_alpha": passing.as_ref().map(|p| p.alpha),
            "passing_min_margin": passing.as_ref().map(|p| p.min_margin),
            "passing_argmin": passing.as_ref().map(|p| p.argmin),
            "scan": scan,
        }),
        passing.map(|p| p.alpha),
    ))
}

fn ha_json(r: &HaReport) -> serde_json::Value {
    json!({
        "alpha": r.alpha,
        "cone_center": r.profile.center,
        "cone_half_width": r.profile.half_width,
        "shape": r.profile.shape.as_str(),
        "points_per_axis": r.grid.points_per_axis(),
        "half_width": r.grid.period() / 2.0,
        "r_min": r.options.r_min,
        "r_max": r.options.r_max,
        "annulus": [r.options.annulus.0, r.options.annulus.1],
        "tolerance": r.options.tolerance,
        "min_value": r.probe.min_value,
        "min_location": r.probe.min_location,
        "relative_min": r.probe.relative_min(),
        "probed_nodes": r.probe.probed_nodes,
        "max_weight": r.probe.max_weight,
        "l1_mass": r.probe.l1_mass,
        "l2_mass": r.probe.l2_mass,
        "mass_ratio": r.probe.mass_ratio(),
        "nonnegative": r.nonnegative,
        "note": r.note,
    })
}

fn ha(h: &HaConfig, alpha: f64, ctx: &mut Context) -> Result<serde_json::Value> {
    let grid = Grid::line(2, h.points, h.half_width)?;
    let shape = config::shape(&h.shape)?;
    let options = HaOptions {
        r_min: h.r_min,
        r_max: h.r_max,
        annulus: (h.annulus[0], h.annulus[1]),
        tolerance: h.tolerance,
    };
    let vertical = ha_experiment(alpha, &ConeAngularProfile::vertical(shape), &grid, &options)?;
    let control = ha_experiment(alpha, &ConeAngularProfile::horizontal(shape), &grid, &options)?;
    let (v, c) = (vertical.probe.relative_min(), control.probe.relative_min());
    ctx.set("ha_alpha", alpha);
    ctx.set("ha_relative_min", v);
    ctx.set("ha_control_relative_min", c);
    ctx.flag("ha_nonnegative", vertical.nonnegative);
    ctx.flag("ha_control_10x_more_negative", c < 0.0 && c <= 10.0 * v.min(0.0));
    if !vertical.nonnegative {
        ctx.warn(format!("R1^2 W on the vertical cone reaches {v:e} of max W at α = {alpha}"));
    }

    let mut alphas = h.mass_alphas.clone();
    alphas.sort_by(|a, b| b.total_cmp(a));
    let mut table = Table::new("ha_mass_ratio.csv", &["alpha", "l1_mass", "l2_mass", "ratio"]);
    let mut ratios = Vec::new();
    for &a in &alphas {
        let probe = if a == alpha {
            vertical.probe.clone()
        } else {
            ha_experiment(a, &ConeAngularProfile::vertical(shape), &grid, &options)?.probe
        };
        table.push_numbers(&[a, probe.l1_mass, probe.l2_mass, probe.mass_ratio()]);
        ratios.push(probe.mass_ratio());
    }
    if !alphas.is_empty() {
        ctx.tables.push(table);
        ctx.flag("ha_mass_ratio_increasing", ratios.windows(2).all(|w| w[1] > w[0]));
    }
    Ok(json!({
        "vertical": ha_json(&vertical),
        "control": ha_json(&control),
        "mass_ratio": alphas.iter().zip(&ratios).map(|(a, r)| json!({"alpha": a, "ratio": r})).collect::<Vec<_>>(),
    }))
}

fn key_bound(k: &KeyBoundConfig, ctx: &mut Context) -> Result<serde_json::Value> {
    let setup = KeyBoundSetup {
        grid: k.grid.build()?,
        operator: MultiplierOp::by_name(&k.operator)?,
        profile: ConeAngularProfile::vertical(config::shape(&k.shape)?),
        radial: expr::radial_fn(&k.radial)?,
        dt: k.dt,
        t_end: k.t_end,
        interval: k.interval,
        alpha: k.alpha,
        c: k.c,
        big_c: k.big_c,
        radial_grid: k.radial_grid.build()?,
        angular_samples: k.angular_samples,
        floor_fraction: k.floor_fraction,
    };
    let r = key_bound_monitor(&setup)?;
    let mut table = Table::new("key_bound.csv", &["t", "G", "growth"]);
    for i in 0..r.times.len() {
        table.push_numbers(&[r.times[i], r.g[i], r.growth[i]]);
    }
    ctx.tables.push(table);
    ctx.flag("key_bound_degenerate", r.degenerate);
    ctx.flag("key_bound_bounded_below", r.bounded_below);
    ctx.flag("key_bound_increasing", r.increasing);
    if let (Some(first), Some(last)) = (r.g.first(), r.g.last()) {
        ctx.set("key_bound_g_initial", *first);
        ctx.set("key_bound_g_final", *last);
    }
    Ok(json!({
        "operator": k.operator,
        "termination": r.termination.name(),
        "samples": r.times.len(),
        "degenerate": r.degenerate,
        "bounded_below": r.bounded_below,
        "increasing": r.increasing,
    }))
}
