use blowup_core::polar::cone::{ConeAngularProfile, ConeShape};
use blowup_core::polar::experiment::{ha_experiment, key_bound_monitor, HaOptions, KeyBoundSetup};
use blowup_core::polar::radial::RadialFn;
use blowup_core::simulator::Termination;
use blowup_core::{Error, Grid, MultiplierOp};

#[test]
fn sign_report_records_resolution_and_masses() {
    let grid = Grid::line(2, 1024, 5.0).unwrap();
    let opts = HaOptions {
        r_min: 1e-3,
        r_max: 5.0,
        annulus: (1e-2, 0.5),
        tolerance: 1e-3,
    };
    let cone = ConeAngularProfile::default();
    let reports: Vec<_> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&a| ha_experiment(a, &cone, &grid, &opts).unwrap())
        .collect();
    for r in &reports {
        assert!(r.probe.probed_nodes > 100);
        assert!(r.probe.max_weight > 0.0 && r.probe.l1_mass > 0.0);
        assert!(r.note.contains("N = 1024"));
    }
    // ‖W̃‖₂/‖W̃‖₁ grows as α shrinks.
    assert!(reports.windows(2).all(|w| w[1].probe.mass_ratio() > w[0].probe.mass_ratio()));
}

#[test]
fn sign_experiment_validates_its_window() {
    let grid = Grid::line(2, 256, 10.0).unwrap();
    let cone = ConeAngularProfile::default();
    let wide = HaOptions {
        annulus: (1e-3, 1.0),
        ..HaOptions::default()
    };
    let fine = Grid::line(2, 2048, 10.0).unwrap();
    assert!(matches!(
        ha_experiment(0.1, &cone, &fine, &wide),
        Err(Error::InvalidParameter { name: "annulus", .. })
    ));
    assert!(matches!(
        ha_experiment(0.1, &cone, &grid, &HaOptions::default()),
        Err(Error::GridTooCoarse { .. })
    ));
    assert!(ha_experiment(0.6, &cone, &fine, &HaOptions::default()).is_err());
    let torus = Grid::torus(2, 2048).unwrap();
    assert!(ha_experiment(0.1, &cone, &torus, &HaOptions::default()).is_err());
}

#[test]
fn monitor_of_zero_data_is_degenerate() {
    let mut setup = KeyBoundSetup::standard(MultiplierOp::riesz_product(0, 0)).unwrap();
    setup.radial = RadialFn::zero();
    setup.t_end = 0.5;
    let r = key_bound_monitor(&setup).unwrap();
    assert!(r.degenerate);
    assert!(r.g.iter().all(|&g| g == 0.0));
    assert!(!r.increasing && !r.bounded_below);
}

#[test]
fn monitor_under_negative_identity_is_non_increasing() {
    let mut setup = KeyBoundSetup::standard(MultiplierOp::neg_identity()).unwrap();
    setup.t_end = 2.0;
    let r = key_bound_monitor(&setup).unwrap();
    assert_eq!(r.termination, Termination::ReachedEnd);
    assert!(!r.degenerate);
    assert!(r.g.windows(2).all(|w| w[1] <= w[0]), "{:?}", r.g);
}

#[test]
fn monitor_along_the_riesz_run_is_finite_and_resolved() {
    let mut setup = KeyBoundSetup::standard(MultiplierOp::riesz_product(0, 0)).unwrap();
    setup.t_end = 1.0;
    let r = key_bound_monitor(&setup).unwrap();
    assert_eq!(r.termination, Termination::ReachedEnd);
    assert_eq!(r.times.len(), 5);
    assert!(r.g.iter().chain(&r.growth).all(|v| v.is_finite() && *v > 0.0));
}

#[test]
fn off_cone_data_is_refused() {
    let mut setup = KeyBoundSetup::standard(MultiplierOp::riesz_product(0, 0)).unwrap();
    setup.profile = ConeAngularProfile::new(1.0, 0.3, ConeShape::SmoothBump).unwrap();
    // Data built from the profile is supported in its own cone; check against another.
    let field = blowup_core::SpectralField::from_fn(setup.grid, |[x, y]| {
        (-(x * x + y * y)).exp() * setup.profile.gamma(y.atan2(x))
    })
    .unwrap();
    assert!(blowup_core::polar::experiment::check_cone_support(&field, &setup.profile).is_ok());
    assert!(matches!(
        blowup_core::polar::experiment::check_cone_support(&field, &ConeAngularProfile::default()),
        Err(Error::NotConeSupported { .. })
    ));
}
