#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regfm::spectra::ComplexMatrix;
use regfm::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `J_n(x)` from its power series; accurate to rounding for `|x| ≤ 10`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..60 {
        let m = m as f64;
        term *= -half * half / (m * (m + n as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

pub fn cgauss(r: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller, kept separate from the library generator
    let u1: f64 = 1.0 - r.random::<f64>();
    let u2: f64 = r.random::<f64>();
    let rad = (-2.0 * u1.ln()).sqrt() / std::f64::consts::SQRT_2;
    Complex64::from_polar(rad, std::f64::consts::TAU * u2)
}

pub fn random_vector(r: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| cgauss(r)).collect()
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| cgauss(r))
}

pub fn unitary(r: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    random_matrix(r, n, n).qr().q()
}

/// `Q diag(values) Q*` for a random unitary `Q`.
pub fn with_spectrum(r: &mut ChaCha8Rng, values: &[f64]) -> DMatrix<Complex64> {
    let q = unitary(r, values.len());
    let d = DMatrix::from_fn(values.len(), values.len(), |i, j| {
        if i == j {
            Complex64::new(values[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let m = &q * d * q.adjoint();
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn cm(m: DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_dmatrix(m).expect("finite matrix")
}

pub fn largest_singular_value(m: &DMatrix<Complex64>) -> f64 {
    m.singular_values().max()
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
