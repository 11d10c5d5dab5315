use blowup_core::field::inner_product;
use blowup_core::{Grid, MultiplierOp, SpectralField};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mean-zero random field on an `n`-point torus, band-limited to `|k| ≤ n/4`
/// so it has no Nyquist content.
fn random_field(dim: usize, n: usize, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse = Grid::torus(dim, n / 2).unwrap();
    let mut values: Vec<f64> = (0..coarse.len()).map(|_| rng.random::<f64>() - 0.5).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter_mut().for_each(|v| *v -= mean);
    SpectralField::new(coarse, values)
        .unwrap()
        .resample(&Grid::torus(dim, n).unwrap())
        .unwrap()
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.values().iter().zip(b.values()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn hilbert_of_cosine_is_sine() {
    let grid = Grid::torus(1, 256).unwrap();
    for k in [1.0, 5.0, 127.0] {
        let c = SpectralField::from_fn(grid, |[x, _]| (k * x).cos()).unwrap();
        let s = SpectralField::from_fn(grid, |[x, _]| (k * x).sin()).unwrap();
        let h = MultiplierOp::hilbert().apply(&c).unwrap();
        assert!(max_diff(&h, &s) <= 1e-10);
    }
}

#[test]
fn hilbert_squared_is_minus_identity_on_mean_zero_fields() {
    let h = MultiplierOp::hilbert();
    for seed in 0..10 {
        let f = random_field(1, 256, seed);
        let hh = h.apply(&h.apply(&f).unwrap()).unwrap();
        let minus = f.map(|v| -v).unwrap();
        assert!(max_diff(&hh, &minus) <= 1e-10 * f.max_abs());
    }
}

#[test]
fn riesz_squares_sum_to_minus_identity() {
    let r11 = MultiplierOp::riesz_product(0, 0);
    let r22 = MultiplierOp::riesz_product(1, 1);
    let r1 = MultiplierOp::riesz(0);
    for seed in 0..3 {
        let f = random_field(2, 256, seed);
        let a = r11.apply(&f).unwrap();
        let b = r22.apply(&f).unwrap();
        let sum = SpectralField::new(*f.grid(), a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect()).unwrap();
        assert!(max_diff(&sum, &f.map(|v| -v).unwrap()) <= 1e-10 * f.max_abs());
        // R₁∘R₁ agrees with the product symbol.
        let twice = r1.apply(&r1.apply(&f).unwrap()).unwrap();
        assert!(max_diff(&twice, &a) <= 1e-12 * f.max_abs());
    }
}

#[test]
fn riesz_square_is_negative() {
    let r11 = MultiplierOp::riesz_product(0, 0);
    for seed in 0..100 {
        let f = random_field(2, 64, 1000 + seed);
        let pairing = inner_product(&r11.apply(&f).unwrap(), &f).unwrap();
        let norm2 = inner_product(&f, &f).unwrap();
        assert!(pairing <= 1e-12 * norm2, "seed {seed}: {pairing}");
    }
}

#[test]
fn zero_and_scalar_operators() {
    let f = random_field(2, 32, 3);
    assert_eq!(MultiplierOp::zero().apply(&f).unwrap().max_abs(), 0.0);
    let m = MultiplierOp::neg_identity().apply(&f).unwrap();
    assert!(max_diff(&m, &f.map(|v| -v).unwrap()) <= 1e-14);
}

const OPS: [&str; 9] = [
    "dx", "dy", "hilbert", "riesz1", "riesz2", "riesz11", "riesz12", "riesz22", "neg_identity",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multipliers_satisfy_adjointness(seed in any::<u64>(), which in 0usize..OPS.len()) {
        let op = MultiplierOp::by_name(OPS[which]).unwrap();
        let dim = if OPS[which] == "hilbert" { 1 } else { 2 };
        let n = if dim == 1 { 256 } else { 64 };
        // Full-band random data, Nyquist content included.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = Grid::torus(dim, n).unwrap();
        let f = SpectralField::new(grid, (0..grid.len()).map(|_| rng.random::<f64>() - 0.5).collect()).unwrap();
        let g = SpectralField::new(grid, (0..grid.len()).map(|_| rng.random::<f64>() - 0.5).collect()).unwrap();
        let lhs = inner_product(&op.apply(&f).unwrap(), &g).unwrap();
        let rhs = inner_product(&f, &op.adjoint().apply(&g).unwrap()).unwrap();
        let scale = op.apply(&f).unwrap().l2_norm() * g.l2_norm() + f.l2_norm() * g.l2_norm();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "{} {} {}", OPS[which], lhs, rhs);
    }

    #[test]
    fn multipliers_keep_real_fields_real(seed in any::<u64>(), which in 0usize..OPS.len()) {
        // `apply` fails with NonRealResult when the imaginary residue exceeds
        // rounding level; full-band data exercises the Nyquist rule.
        let op = MultiplierOp::by_name(OPS[which]).unwrap();
        let dim = if OPS[which] == "hilbert" { 1 } else { 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = Grid::torus(dim, 32).unwrap();
        let f = SpectralField::new(grid, (0..grid.len()).map(|_| rng.random::<f64>()).collect()).unwrap();
        prop_assert!(op.apply(&f).is_ok());
    }
}
