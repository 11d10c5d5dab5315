use std::f64::consts::{FRAC_PI_2, LN_2, PI, SQRT_2};

use blowup_core::polar::cone::{cone_inequality_check, ConeAngularProfile, ConeShape};
use blowup_core::polar::modes::angular_modes;
use blowup_core::polar::operator::{l_apply, lstar_apply, RadialOperator, Range, Term};
use blowup_core::polar::radial::{EndRule, Radial, RadialFn, RadialGrid};
use blowup_core::polar::stream::{mode_ode_residual, s_integral, stream_mode, stream_mode_green, solve_stream_modes};
use blowup_core::polar::weight::{arctan_identity_error, dominance_check, singular_weight};
use blowup_core::polar::modes::PolarModes;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn indicator(a: f64, b: f64) -> RadialFn {
    RadialFn::new(format!("1[{a},{b}]"), move |s| if s >= a && s <= b { 1.0 } else { 0.0 })
        .with_ends(EndRule::Compact, EndRule::Compact)
        .with_breakpoints(&[a, b])
}

fn cubic_exp() -> RadialFn {
    RadialFn::new("r³e^-r", |r| r.powi(3) * (-r).exp())
}

#[test]
fn s_identity_for_indicator_at_two() {
    let e = Radial::new(RadialGrid::log_spaced(1e-4, 1e3, 500).unwrap());
    let s = s_integral(&e, &indicator(1e-4, 1.0), 2.0).unwrap();
    // Both sides are 1/256; the indicator starts at r_min so nothing is lost below the grid.
    let exact = 1.0 / 256.0 - 1e-16 / 256.0;
    assert!((s.nested - exact).abs() < 1e-12 * exact, "{}", s.nested);
    assert!((s.by_parts - exact).abs() < 1e-12 * exact, "{}", s.by_parts);
}

#[test]
fn s_identity_for_smooth_profiles() {
    let e = Radial::new(RadialGrid::log_spaced(1e-6, 1e3, 600).unwrap());
    let profiles = [
        cubic_exp(),
        RadialFn::new("r²e^-r²", |r| r * r * (-r * r).exp()),
        RadialFn::new("r⁴/(1+r)^8", |r| r.powi(4) / (1.0 + r).powi(8)),
    ];
    for f in &profiles {
        for r in [0.1, 1.0, 3.0] {
            let s = s_integral(&e, f, r).unwrap();
            assert!(s.defect() <= 1e-8, "{} at {r}: {}", f.label, s.defect());
        }
    }
    let zero = s_integral(&e, &RadialFn::zero(), 1.0).unwrap();
    assert_eq!((zero.nested, zero.by_parts), (0.0, 0.0));
}

#[test]
fn psi_zero_for_unit_disk_indicator() {
    let g = RadialGrid::log_spaced(1e-3, 1e2, 400).unwrap();
    let e = Radial::new(g.clone());
    // Constant near the origin: the power-law head fit is exact.
    let disk = RadialFn::new("1[0,1]", |s| if s <= 1.0 { 1.0 } else { 0.0 })
        .with_ends(EndRule::Extrapolate, EndRule::Compact)
        .with_breakpoints(&[1.0]);
    let psi = stream_mode(&e, &disk, 0).unwrap();
    for (&r, &v) in g.nodes().iter().zip(&psi) {
        let exact = if r <= 1.0 { r * r / 4.0 } else { 0.25 + 0.5 * r.ln() };
        assert!((v - exact).abs() < 1e-12 * exact, "r = {r}: {v} vs {exact}");
    }
}

#[test]
fn psi_two_solves_the_mode_equation() {
    let g = RadialGrid::log_spaced(1e-3, 1e3, 800).unwrap();
    let e = Radial::new(g.clone());
    let omega = cubic_exp();
    let psi = stream_mode(&e, &omega, 1).unwrap();
    let psi_profile = blowup_core::polar::radial::RadialProfile::new(g.clone(), psi).unwrap();
    let omega_profile = omega.sample(&g);
    let residual = mode_ode_residual(&psi_profile, &omega_profile, 1).unwrap();
    let scale = omega_profile.max_abs();
    let n = residual.values.len();
    let worst = residual.values[2..n - 2].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(worst <= 1e-4 * scale, "{worst}");
}

#[test]
fn nested_and_green_forms_agree() {
    let g = RadialGrid::log_spaced(1e-4, 1e3, 600).unwrap();
    let e = Radial::new(g.clone());
    for omega in [cubic_exp(), RadialFn::new("r²e^-r²", |r| r * r * (-r * r).exp())] {
        for k in 1..=3 {
            let nested = stream_mode(&e, &omega, k).unwrap();
            let green = stream_mode_green(&e, &omega, k).unwrap();
            let scale = green.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in nested.iter().zip(&green) {
                assert!((a - b).abs() <= 1e-9 * scale, "k = {k}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn zero_vorticity_gives_zero_stream() {
    let g = RadialGrid::log_spaced(0.01, 10.0, 50).unwrap();
    let modes = PolarModes::new(g.clone(), vec![vec![0.0; 50]; 4]).unwrap();
    let psi = solve_stream_modes(&modes).unwrap();
    assert!(psi.modes.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn l_on_indicator_at_half() {
    let g = RadialGrid::log_spaced(1e-3, 1e2, 300).unwrap();
    let e = Radial::new(g);
    let (c, big_c) = (1.3, 0.7);
    let applied = RadialOperator::l(c, big_c).apply(&e, &indicator(1.0, 2.0)).unwrap();
    let v = applied.eval(0.5).unwrap();
    let exact = c * LN_2 - big_c / 4.0;
    assert!((v - exact).abs() < 1e-13, "{v} vs {exact}");
    let zero = l_apply(&e, &RadialFn::zero(), c, big_c).unwrap();
    assert!(zero.values.iter().all(|&v| v == 0.0));
}

fn random_bump(rng: &mut ChaCha8Rng) -> RadialFn {
    // Smooth bump supported in [a, b] ⊂ [0.05, 20] with a random cubic modulation.
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

#[test]
fn generated_adjoint_passes_pairing_test() {
    let g = RadialGrid::log_spaced(1e-2, 50.0, 600).unwrap();
    let e = Radial::new(g.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (c, big_c) = (1.0, 1.0);
    for _ in 0..50 {
        let f = random_bump(&mut rng);
        let h = random_bump(&mut rng);
        let lf = l_apply(&e, &f, c, big_c).unwrap().interpolant(EndRule::Compact, EndRule::Compact);
        let lsh = lstar_apply(&e, &h, c, big_c).unwrap().interpolant(EndRule::Compact, EndRule::Compact);
        let lhs = pairing(&e, &lf, &h);
        let rhs = pairing(&e, &f, &lsh);
        let norm = (pairing(&e, &f, &f) * pairing(&e, &h, &h)).sqrt();
        assert!((lhs - rhs).abs() <= 1e-6 * norm, "{lhs} vs {rhs}");
    }
}

/// `∫ f g dr`, split at both functions' breakpoints.
fn pairing(e: &Radial, f: &RadialFn, g: &RadialFn) -> f64 {
    let mut merged = f.breakpoints.clone();
    merged.extend_from_slice(&g.breakpoints);
    let f = f.clone().with_breakpoints(&merged);
    e.pairing_inside(&f, g)
}

#[test]
fn half_coefficient_variant_is_not_the_adjoint() {
    // The variant with (c/(2r))∫₀^r g as first term fails the pairing test.
    let g = RadialGrid::log_spaced(1e-2, 50.0, 600).unwrap();
    let e = Radial::new(g);
    let mut variant = RadialOperator::l(1.0, 1.0).adjoint();
    variant.terms[0] = Term::Integral {
        coeff: 0.5,
        a: -1.0,
        b: 0.0,
        range: Range::Head,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = random_bump(&mut rng);
    let h = random_bump(&mut rng);
    let lf = l_apply(&e, &f, 1.0, 1.0).unwrap().interpolant(EndRule::Compact, EndRule::Compact);
    let vh = variant.apply(&e, &h).unwrap().at_nodes(&e).unwrap().interpolant(EndRule::Compact, EndRule::Compact);
    let lhs = pairing(&e, &lf, &h);
    let rhs = pairing(&e, &f, &vh);
    let norm = (pairing(&e, &f, &f) * pairing(&e, &h, &h)).sqrt();
    assert!((lhs - rhs).abs() > 1e-3 * norm, "{lhs} vs {rhs}");
}

#[test]
fn arctan_identity_by_quadrature() {
    let g = RadialGrid::log_spaced(1e-6, 1e6, 1201).unwrap();
    for alpha in [0.2, 0.1, 0.05, 0.02, 0.01] {
        let w = singular_weight(alpha).unwrap();
        assert!((w.cumulative(1.0) - PI / (4.0 * alpha)).abs() < 1e-12 / alpha);
        let err = arctan_identity_error(&w, &g).unwrap();
        assert!(err <= 1e-6, "α = {alpha}: {err}");
        assert!(w.sample(&g).values.iter().all(|&v| v > 0.0));
    }
}

#[test]
fn dominance_scan() {
    let scan: Vec<_> = [0.2, 0.1, 0.05, 0.02, 0.01]
        .iter()
        .map(|&a| dominance_check(a, 1.0, 1.0).unwrap())
        .collect();
    for r in &scan {
        println!("α = {}: min margin {:e} at r = {:e}", r.alpha, r.min_margin, r.argmin);
    }
    assert!(!scan[0].passes());
    assert!(scan[1..].iter().all(|r| r.passes()));
}

#[test]
fn dominance_without_c_and_with_large_c() {
    for alpha in [0.4, 0.2, 0.1, 0.01] {
        assert!(dominance_check(alpha, 1.0, 0.0).unwrap().passes());
    }
    assert!(!dominance_check(0.4, 1.0, 1e3).unwrap().passes());
}

#[test]
fn cone_inequality_up_to_64() {
    let r = cone_inequality_check(64, 10_000);
    assert!(r.min_slack >= -1e-12, "{r:?}");
}

fn polar_samples(g: &RadialGrid, n: usize, f: impl Fn(f64, f64) -> f64) -> Vec<Vec<f64>> {
    g.nodes()
        .iter()
        .map(|&r| (0..n).map(|j| f(r, 2.0 * PI * j as f64 / n as f64)).collect())
        .collect()
}

#[test]
fn cone_data_reconstructs_from_modes() {
    let g = RadialGrid::log_spaced(0.1, 10.0, 12).unwrap();
    let cone = ConeAngularProfile::vertical(ConeShape::PolynomialBump);
    let n = 512;
    let samples = polar_samples(&g, n, |r, t| (-r).exp() * cone.gamma(t));
    let modes = angular_modes(&g, &samples, 1e-12).unwrap();
    assert!(modes.k_max() >= 64);
    let scale = samples.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for (i, row) in samples.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let back = modes.resynthesize(i, 2.0 * PI * j as f64 / n as f64);
            assert!((back - v).abs() <= 1e-8 * scale);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cone_modes_are_dominated_by_the_second(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = RadialGrid::log_spaced(0.1, 10.0, 6).unwrap();
        let coeffs: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
        let width: f64 = 0.05 + (PI / 8.0 - 0.05) * rng.random::<f64>();
        let shift: f64 = (PI / 8.0 - width) * (2.0 * rng.random::<f64>() - 1.0);
        let cone = ConeAngularProfile::new(FRAC_PI_2 + shift, width, ConeShape::PolynomialBump).unwrap();
        // Symmetrize to keep the data even in θ.
        let samples = polar_samples(&g, 256, |r, t| {
            let amp = coeffs[((r.ln() + 3.0) as usize).min(5)];
            amp * (cone.gamma(t) + cone.gamma(-t))
        });
        let modes = angular_modes(&g, &samples, 1e-12).unwrap();
        let max = samples.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
        for i in 0..g.len() {
            let f2 = modes.modes[1][i].abs();
            for k in 0..=modes.k_max() {
                prop_assert!(modes.modes[k][i].abs() <= SQRT_2 * f2 + 1e-10 * max);
            }
        }
    }
}

#[test]
fn dominance_margin_is_stable_around_the_passing_alpha() {
    let fine = RadialGrid::log_spaced(1e-6, 1e6, 2401).unwrap();
    for alpha in [0.09, 0.095, 0.1, 0.105, 0.11] {
        let coarse = dominance_check(alpha, 1.0, 1.0).unwrap();
        let refined = blowup_core::polar::weight::dominance_check_on(&fine, alpha, 1.0, 1.0).unwrap();
        assert!(coarse.passes() && refined.passes(), "α = {alpha}");
    }
}
