//! Complex discrete Fourier transforms.
//!
//! Power-of-two lengths use an iterative radix-2 Cooley–Tukey kernel; every
//! other length goes through Bluestein's chirp-z reduction onto a radix-2
//! transform. Twiddles are evaluated directly (no recurrences), so the
//! round-trip error stays at a few ulps times `log₂ n`.
//!
//! Both directions are unnormalized: `forward` computes
//! `X_k = Σ_j x_j e^{-2πi jk/n}` and `inverse` the same sum with `+i`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Trivial,
    Radix2 {
        // e^{-2πik/n}, k < n/2
        twiddles: Vec<Complex64>,
        reversed: Vec<u32>,
    },
    Bluestein {
        chirp: Vec<Complex64>,
        kernel_hat: Vec<Complex64>,
        inner: Box<FftPlan>,
    },
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "transform length must be positive");
        let kind = if n == 1 {
            Kind::Trivial
        } else if n.is_power_of_two() {
            let bits = n.trailing_zeros();
            let twiddles = (0..n / 2)
                .map(|k| {
                    let angle = -2.0 * PI * (k as f64) / (n as f64);
                    Complex64::new(angle.cos(), angle.sin())
                })
                .collect();
            let reversed = (0..n as u32)
                .map(|i| i.reverse_bits() >> (32 - bits))
                .collect();
            Kind::Radix2 { twiddles, reversed }
        } else {
            let m = (2 * n - 1).next_power_of_two();
            // a_k = e^{-iπk²/n}; k² is reduced mod 2n before scaling.
            let chirp: Vec<Complex64> = (0..n)
                .map(|k| {
                    let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
                    let angle = -PI * k2 / (n as f64);
                    Complex64::new(angle.cos(), angle.sin())
                })
                .collect();
            let mut kernel = vec![Complex64::new(0.0, 0.0); m];
            kernel[0] = chirp[0].conj();
            for k in 1..n {
                kernel[k] = chirp[k].conj();
                kernel[m - k] = chirp[k].conj();
            }
            let inner = FftPlan::new(m);
            inner.forward(&mut kernel);
            Kind::Bluestein {
                chirp,
                kernel_hat: kernel,
                inner: Box::new(inner),
            }
        };
        FftPlan { n, kind }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.n, "buffer length does not match plan");
        match &self.kind {
            Kind::Trivial => {}
            Kind::Radix2 { twiddles, reversed } => radix2(data, twiddles, reversed, inverse),
            Kind::Bluestein {
                chirp,
                kernel_hat,
                inner,
            } => {
                // The inverse is conj(F(conj(x))).
                if inverse {
                    data.iter_mut().for_each(|z| *z = z.conj());
                }
                let m = inner.len();
                let mut work = vec![Complex64::new(0.0, 0.0); m];
                for (k, (w, x)) in work.iter_mut().zip(data.iter()).enumerate() {
                    *w = *x * chirp[k];
                }
                inner.forward(&mut work);
                for (w, k) in work.iter_mut().zip(kernel_hat.iter()) {
                    *w *= *k;
                }
                inner.inverse(&mut work);
                let scale = 1.0 / m as f64;
                for (k, x) in data.iter_mut().enumerate() {
                    *x = work[k] * chirp[k] * scale;
                }
                if inverse {
                    data.iter_mut().for_each(|z| *z = z.conj());
                }
            }
        }
    }
}

fn radix2(data: &mut [Complex64], twiddles: &[Complex64], reversed: &[u32], inverse: bool) {
    let n = data.len();
    for (i, &j) in reversed.iter().enumerate().take(n) {
        let j = j as usize;
        if i < j {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let mut w = twiddles[k * stride];
                if inverse {
                    w = w.conj();
                }
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Transforms a row-major `rows × cols` array along both axes in place.
pub fn transform_2d(
    data: &mut [Complex64],
    rows: usize,
    cols: usize,
    row_plan: &FftPlan,
    col_plan: &FftPlan,
    inverse: bool,
) {
    assert_eq!(data.len(), rows * cols);
    assert_eq!(row_plan.len(), cols);
    assert_eq!(col_plan.len(), rows);
    for row in data.chunks_exact_mut(cols) {
        row_plan.transform(row, inverse);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        col_plan.transform(&mut column, inverse);
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                    let angle = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    acc + v * Complex64::new(angle.cos(), angle.sin())
                })
            })
            .collect()
    }

    fn sample(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                let t = j as f64;
                Complex64::new((0.37 * t).sin() + 0.1 * t, (1.3 * t).cos() - 0.05 * t * t / n as f64)
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_power_of_two_and_other_lengths() {
        for &n in &[1usize, 2, 4, 6, 8, 10, 12, 30, 64, 96] {
            let x = sample(n);
            let expected = naive_dft(&x);
            let mut got = x.clone();
            FftPlan::new(n).forward(&mut got);
            let scale: f64 = expected.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (a, b) in got.iter().zip(expected.iter()) {
                assert!((a - b).norm() <= 1e-12 * scale, "n = {n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        for &n in &[8usize, 12, 1024, 1000] {
            let x = sample(n);
            let plan = FftPlan::new(n);
            let mut y = x.clone();
            plan.forward(&mut y);
            plan.inverse(&mut y);
            for (a, b) in y.iter().zip(x.iter()) {
                assert!((a / n as f64 - b).norm() <= 1e-12 * (1.0 + b.norm()));
            }
        }
    }

    #[test]
    fn two_dimensional_transform_of_a_single_mode() {
        let (rows, cols) = (8, 6);
        let mut data: Vec<Complex64> = (0..rows * cols)
            .map(|idx| {
                let (r, c) = (idx / cols, idx % cols);
                let angle = 2.0 * PI * (r as f64 * 2.0 / rows as f64 + c as f64 / cols as f64);
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        transform_2d(&mut data, rows, cols, &FftPlan::new(cols), &FftPlan::new(rows), false);
        for (idx, z) in data.iter().enumerate() {
            let expected = if idx == 2 * cols + 1 { (rows * cols) as f64 } else { 0.0 };
            assert!((z - Complex64::new(expected, 0.0)).norm() < 1e-10);
        }
    }
}
