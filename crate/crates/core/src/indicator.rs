//! Picard series, regularized solutions and the quadratic indicator
//! `<x^α, A x^α> = Σ φ_α(λ_n)²/λ_n |(x_n, ℓ)|²`.
//!
//! Only modes kept by the [`SingularSystem`] clamp enter any sum.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::regularization::{filter_value, FilterSpec};
use crate::spectra::{inner, norm_sqr, ComplexMatrix, SingularSystem};

/// Partial sums `Σ_{j≤n} |(x_j, ℓ)|²/λ_j` for `n = 1..=truncation`.
#[derive(Clone, Debug, PartialEq)]
pub struct PicardReport {
    pub partial_sums: Vec<f64>,
    pub truncation: usize,
}

impl PicardReport {
    pub fn final_sum(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// Partial sum through mode `n` (1-based); `n = 0` is the empty sum.
    pub fn through(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.partial_sums[n - 1]
        }
    }
}

pub fn picard_sum(
    s: &SingularSystem,
    ell: &[Complex64],
    truncation: usize,
) -> Result<PicardReport> {
    if truncation > s.len() {
        return Err(Error::Dimension(format!(
            "truncation {truncation} exceeds the {} retained modes",
            s.len()
        )));
    }
    let coeffs = s.coefficients(ell)?;
    let mut acc = 0.0;
    let partial_sums = coeffs
        .iter()
        .zip(s.lambdas())
        .take(truncation)
        .map(|(c, l)| {
            acc += c.norm_sqr() / l;
            acc
        })
        .collect();
    Ok(PicardReport {
        partial_sums,
        truncation,
    })
}

/// Per-mode weights `φ(λ_n)/λ_n`; reused across many right-hand sides.
#[derive(Clone, Debug)]
pub struct FilterWeights {
    ratios: Vec<f64>,
    lambdas: Vec<f64>,
}

impl FilterWeights {
    pub fn new(s: &SingularSystem, f: &FilterSpec) -> Result<Self> {
        f.validate_for_spectrum(s.lambdas()[0])?;
        let ratios = s
            .lambdas()
            .iter()
            .map(|&l| Ok(filter_value(f, l)? / l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ratios,
            lambdas: s.lambdas().to_vec(),
        })
    }

    /// `φ(λ_n)/λ_n`.
    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    /// `Σ φ²/λ |c_n|²` given the coefficients `c_n = (x_n, ℓ)`.
    pub fn indicator_from_coefficients(&self, coeffs: &[Complex64]) -> f64 {
        coeffs
            .iter()
            .zip(self.ratios.iter().zip(&self.lambdas))
            .map(|(c, (r, l))| r * r * l * c.norm_sqr())
            .sum()
    }
}

/// Coefficients `c_n = φ(λ_n)/λ_n · conj((x_n, ℓ))` of `x^α = Σ c_n x_n`.
pub fn regularized_solution_coeffs(
    s: &SingularSystem,
    ell: &[Complex64],
    f: &FilterSpec,
) -> Result<Vec<Complex64>> {
    let weights = FilterWeights::new(s, f)?;
    let coeffs = s.coefficients(ell)?;
    Ok(coeffs
        .iter()
        .zip(weights.ratios())
        .map(|(c, r)| c.conj() * *r)
        .collect())
}

/// `Σ c_n x_n`.
pub fn assemble_solution(s: &SingularSystem, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.len() != s.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} modes",
            coeffs.len(),
            s.len()
        )));
    }
    let x = s.vectors() * DVector::from_column_slice(coeffs);
    Ok(x.iter().copied().collect())
}

pub fn quadratic_indicator(s: &SingularSystem, ell: &[Complex64], f: &FilterSpec) -> Result<f64> {
    let weights = FilterWeights::new(s, f)?;
    Ok(weights.indicator_from_coefficients(&s.coefficients(ell)?))
}

/// `J_α(x; ℓ) = α (x, A x) + ‖A x − ℓ‖²`.
pub fn glsm_functional(
    a: &ComplexMatrix,
    x: &[Complex64],
    ell: &[Complex64],
    alpha: f64,
) -> Result<f64> {
    if !a.is_square() || x.len() != a.cols() || ell.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "operator {}x{}, x of length {}, rhs of length {}",
            a.rows(),
            a.cols(),
            x.len(),
            ell.len()
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let ax = a.mul_vec(x)?;
    let energy = inner(x, &ax).re;
    let residual: Vec<Complex64> = ax.iter().zip(ell).map(|(u, v)| u - v).collect();
    Ok(alpha * energy + norm_sqr(&residual))
}
