use blowup_core::certificate::{check_hypothesis, check_hypothesis_with, issue_certificate, CertificateOptions};
use blowup_core::function::FieldFn;
use blowup_core::weights::catalog_pair;
use blowup_core::{Error, Grid, SpectralField};
use std::f64::consts::{E, PI};

/// Double-exponential quadrature of `f` over `(a, b)`, tolerant of
/// integrable endpoint singularities.
fn tanh_sinh(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / 64.0;
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for k in -400..=400 {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let x = u.tanh();
        let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
        // Distance to the nearer endpoint, computed without cancellation.
        let gap = half / (u.abs().exp() * u.cosh());
        let point = if x < 0.0 { a + gap } else { b - gap };
        if !(gap > 0.0) || !(point > a && point < b) {
            continue;
        }
        sum += w * f(point);
    }
    sum * h * half
}

fn tanh_sinh_panels(breaks: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    breaks.windows(2).map(|w| tanh_sinh(w[0], w[1], &f)).sum()
}

const CLM_J: f64 = -1.693_147_180_559_945_3;

#[test]
fn oracle_agrees_with_closed_form() {
    let j = tanh_sinh(0.0, 2.0 * PI, |x| (2f64.ln() + 2.0 * (0.5 * x).sin().abs().ln()) * (1.0 + x.cos())) / (2.0 * PI);
    assert!((j - CLM_J).abs() < 1e-12, "{j}");
}

#[test]
fn clm_torus_jensen_constant() {
    let pair = catalog_pair("clm_torus").unwrap();
    let grid = Grid::torus(1, 1024).unwrap();
    let omega = SpectralField::from_fn(grid, |[x, _]| -x.sin()).unwrap();
    let report = check_hypothesis(&omega, &pair).unwrap();
    assert!(report.sign_ok && report.integrable, "{report:?}");
    assert!((report.jensen_integral - CLM_J).abs() < 1e-8, "{}", report.jensen_integral);
    // ∫ sin²x/(2π) = 1/2
    assert!((report.pairing - 0.5).abs() < 1e-12);
    let cert = issue_certificate(report).unwrap();
    assert!((cert.t_bound - 2.0 * E).abs() < 1e-7);
    assert!((cert.t_bound * cert.c_star - 1.0).abs() <= f64::EPSILON);
    assert_eq!(cert.c_star, cert.report.jensen_integral.exp());
}

#[test]
fn jensen_integral_converges_under_refinement() {
    let pair = catalog_pair("clm_torus").unwrap();
    let j = |n| {
        let grid = Grid::torus(1, n).unwrap();
        let omega = SpectralField::from_fn(grid, |[x, _]| -x.sin() * (1.0 + 0.3 * x.cos())).unwrap();
        check_hypothesis(&omega, &pair).unwrap().jensen_integral
    };
    let (a, b) = (j(256), j(512));
    assert!((a - b).abs() <= 1e-6 * b.abs(), "{a} vs {b}");
}

#[test]
fn burgers_line_certificate_matches_box_oracle() {
    let pair = catalog_pair("burgers_line").unwrap();
    let w1 = |x: f64| 4.0 * x / (1.0 + x * x).powi(3);
    let w2 = |x: f64| (1.0 + x * x).powi(-2);
    let omega = FieldFn::closed("W1 exp(-x^2)", move |[x, _]| w1(x) * (-x * x).exp());
    let half = 16.0;
    let base = Grid::line(1, 2048, half).unwrap();
    let report = check_hypothesis_with(&omega, &base, &pair, &CertificateOptions::default()).unwrap();
    assert!(report.sign_ok && report.integrable && report.clipped_nodes == 0, "{report:?}");

    let breaks = [-half, -4.0, -1.0, 0.0, 1.0, 4.0, half];
    let mass = tanh_sinh_panels(&breaks, w2);
    // log(W₁² e^{-x²} / W₂) expanded so the zero at x = 0 stays finite.
    let integrand = |x: f64| (16f64.ln() + 2.0 * x.abs().ln() - 4.0 * (1.0 + x * x).ln() - x * x) * w2(x);
    let oracle = tanh_sinh_panels(&breaks, integrand) / mass;
    assert!((report.jensen_integral - oracle).abs() < 1e-8, "{} vs {oracle}", report.jensen_integral);
    let cert = issue_certificate(report).unwrap();
    // Characteristics x₀ - tω₀(x₀) first cross at 1/max ω₀'.
    let omega0 = |x: f64| w1(x) * (-x * x).exp();
    let slope = (0..200_000)
        .map(|i| {
            let x = -8.0 + 16.0 * i as f64 / 200_000.0;
            (omega0(x + 1e-6) - omega0(x - 1e-6)) / 2e-6
        })
        .fold(f64::MIN, f64::max);
    assert!(1.0 / slope <= cert.t_bound, "{} vs {}", 1.0 / slope, cert.t_bound);
}

#[test]
fn sign_mutation_on_weight_support_is_refused() {
    let pair = catalog_pair("clm_torus").unwrap();
    let grid = Grid::torus(1, 256).unwrap();
    let omega = SpectralField::from_fn(grid, |[x, _]| {
        let v = -x.sin();
        if (1.0..1.5).contains(&x) {
            -v
        } else {
            v
        }
    })
    .unwrap();
    let report = check_hypothesis(&omega, &pair).unwrap();
    assert!(!report.sign_ok);
    assert!(matches!(issue_certificate(report), Err(Error::HypothesisRefused { condition: "sign", .. })));
}
