use blowup_core::weights::{catalog_pair, numeric_weight, w1_relative_error, Provenance};
use blowup_core::Grid;

fn numeric_matches_closed_form(name: &str, interior: f64) -> f64 {
    let pair = catalog_pair(name).unwrap();
    assert_eq!(pair.provenance, Provenance::ClosedForm);
    let numeric = numeric_weight(&pair.operator, &pair.w2, &pair.grid).unwrap();
    w1_relative_error(&numeric, &pair, &pair.grid, interior).unwrap()
}

#[test]
fn burgers_line_pair() {
    let err = numeric_matches_closed_form("burgers_line", 8.0);
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn clm_line_pair() {
    let err = numeric_matches_closed_form("clm_line", 8.0);
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn torus_pairs() {
    for name in ["clm_torus", "riesz12_torus"] {
        let err = numeric_matches_closed_form(name, f64::INFINITY);
        assert!(err <= 1e-12, "{name}: {err}");
    }
}

#[test]
fn plane_pair_is_numeric_and_normalized_near_its_exact_mass() {
    let pair = catalog_pair("riesz12_plane").unwrap();
    assert_eq!(pair.provenance, Provenance::Numeric);
    let deficit = pair.normalization.deficit().unwrap();
    // Tail of (1+r²)^-3 beyond the box of half-width 32 is about π/(2·32⁴).
    assert!(deficit.abs() < 1e-5, "{deficit}");
}

#[test]
fn line_pairs_converge_with_the_box() {
    // Periodization error of the Hilbert pair decays like 1/L.
    let pair = catalog_pair("clm_line").unwrap();
    let small = Grid::line(1, 1 << 12, 128.0).unwrap();
    let numeric = numeric_weight(&pair.operator, &pair.w2, &small).unwrap();
    let err_small = w1_relative_error(&numeric, &pair, &small, 8.0).unwrap();
    let err_big = numeric_matches_closed_form("clm_line", 8.0);
    assert!(err_big < err_small / 10.0, "{err_small} {err_big}");
}
