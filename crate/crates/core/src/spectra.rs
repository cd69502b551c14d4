//! Dense complex Hermitian spectral algebra.
//!
//! Everything here works on the finite-dimensional space `C^N` with the inner
//! product `(u, v) = Σ u_i conj(v_i)`. Eigenspace projections are exact
//! orthogonal projections, which is what the Riesz contour integral around an
//! isolated cluster reduces to in finite dimension.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default relative clamp for discarding eigenvalues of a PSD operator.
pub const DEFAULT_CLAMP_REL: f64 = 1e-14;

/// Eigenvalues closer than this to a projection contour are rejected.
pub const CONTOUR_TOL: f64 = 1e-12;

/// Dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if let Some((idx, _)) = m
            .iter()
            .enumerate()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            // nalgebra storage is column-major
            let (r, c) = (idx % m.nrows(), idx / m.nrows());
            return Err(Error::NonFinite(format!("matrix entry ({r}, {c})")));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by arithmetic on finite inputs.
    pub(crate) fn from_computed(m: DMatrix<Complex64>) -> Self {
        debug_assert!(m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self(DMatrix::from_diagonal(&d))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            out.extend(self.0.row(r).iter().copied());
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M - M*|` entrywise.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.rows();
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                defect = defect.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        defect
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> Result<f64> {
        if self.0.is_empty() {
            return Ok(0.0);
        }
        let svd = SVD::try_new(self.0.clone(), false, false, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("singular value iteration did not converge".into()))?;
        Ok(svd.singular_values.iter().copied().fold(0.0, f64::max))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols() {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols()
            )));
        }
        let v = &self.0 * DVector::from_column_slice(x);
        Ok(v.iter().copied().collect())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::Dimension(format!(
                "{}x{} against {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(())
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {}x{}",
                self.rows(),
                self.cols()
            )));
        }
        Ok(())
    }

    fn require_hermitian(&self) -> Result<()> {
        self.require_square()?;
        let tolerance = HERMITIAN_TOL * self.max_abs();
        let defect = self.hermitian_defect();
        if defect > tolerance {
            return Err(Error::NotHermitian { defect, tolerance });
        }
        Ok(())
    }
}

/// `(u, v) = Σ u_i conj(v_i)`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues in non-increasing order with orthonormal eigenvectors as the
/// matching columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigensystem {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl HermitianEigensystem {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, index: usize) -> Vec<Complex64> {
        self.vectors.column(index).iter().copied().collect()
    }

    /// `V f(Λ) V*`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(j).scale_mut(w);
        }
        let m = scaled * self.vectors.adjoint();
        ComplexMatrix::from_computed(hermitian_part(&m))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|x| x)
    }

    /// Multiplies eigenvector `index` by a unit phase; the eigensystem stays valid.
    pub fn with_phase(mut self, index: usize, phase: f64) -> Self {
        let u = Complex64::from_polar(1.0, phase);
        self.vectors.column_mut(index).apply(|x| *x *= u);
        self
    }
}

pub fn hermitian_eigendecomposition(m: &ComplexMatrix) -> Result<HermitianEigensystem> {
    m.require_hermitian()?;
    let n = m.rows();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let sym = hermitian_part(m.as_dmatrix());
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep the solver's index order
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigensystem { values, vectors })
}

/// `|M| = V |Λ| V*`.
pub fn hermitian_abs(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eigendecomposition(m)?.apply_function(f64::abs))
}

/// Real part `(F + F*)/2` of a square matrix.
pub fn real_part(f: &ComplexMatrix) -> Result<ComplexMatrix> {
    f.require_square()?;
    Ok(ComplexMatrix::from_computed(hermitian_part(f.as_dmatrix())))
}

/// Imaginary part `(F - F*)/(2i)` of a square matrix.
pub fn imag_part(f: &ComplexMatrix) -> Result<ComplexMatrix> {
    f.require_square()?;
    let m = f.as_dmatrix();
    let im = (m - m.adjoint()) * Complex64::new(0.0, -0.5);
    Ok(ComplexMatrix::from_computed(hermitian_part(&im)))
}

/// The augmented operator `F# = |Re F| + |Im F|`.
pub fn augment_sharp(f: &ComplexMatrix) -> Result<ComplexMatrix> {
    let re = hermitian_abs(&real_part(f)?)?;
    let im = hermitian_abs(&imag_part(f)?)?;
    let sum = re.as_dmatrix() + im.as_dmatrix();
    Ok(ComplexMatrix::from_computed(hermitian_part(&sum)))
}

/// Positive part of the spectrum of a PSD operator: the discrete
/// `{λ_n; x_n}` with `λ_n > clamp_threshold`.
#[derive(Clone, Debug)]
pub struct SingularSystem {
    lambdas: Vec<f64>,
    vectors: DMatrix<Complex64>,
    clamp_threshold: f64,
}

impl SingularSystem {
    /// Builds a system from explicit modes; used for synthetic operators.
    pub fn from_parts(lambdas: Vec<f64>, vectors: DMatrix<Complex64>) -> Result<Self> {
        if lambdas.len() != vectors.ncols() {
            return Err(Error::Dimension(format!(
                "{} eigenvalues for {} vectors",
                lambdas.len(),
                vectors.ncols()
            )));
        }
        if lambdas.is_empty() {
            return Err(Error::EmptySpectrum { threshold: 0.0 });
        }
        if lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::Domain(
                "singular values must be finite and positive".into(),
            ));
        }
        if lambdas.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(
                "singular values must be non-increasing".into(),
            ));
        }
        Ok(Self {
            lambdas,
            vectors,
            clamp_threshold: 0.0,
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn clamp_threshold(&self) -> f64 {
        self.clamp_threshold
    }

    /// Length of the vectors (ambient dimension).
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// Number of retained modes.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn vector(&self, index: usize) -> Vec<Complex64> {
        self.vectors.column(index).iter().copied().collect()
    }

    /// `(x_n, ℓ)` for every retained mode.
    pub fn coefficients(&self, ell: &[Complex64]) -> Result<Vec<Complex64>> {
        if ell.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "right-hand side of length {} against vectors of length {}",
                ell.len(),
                self.dim()
            )));
        }
        Ok(self
            .vectors
            .column_iter()
            .map(|col| col.iter().zip(ell).map(|(x, l)| x * l.conj()).sum())
            .collect())
    }
}

pub fn singular_system(a: &ComplexMatrix, clamp_rel: f64) -> Result<SingularSystem> {
    if !(0.0..1.0).contains(&clamp_rel) {
        return Err(Error::Domain(format!(
            "clamp_rel must lie in [0, 1), got {clamp_rel}"
        )));
    }
    let eig = hermitian_eigendecomposition(a)?;
    let lambda_max = eig.values[0];
    let threshold = clamp_rel * lambda_max;
    let keep = eig
        .values
        .iter()
        .take_while(|&&l| l > threshold && l > 0.0)
        .count();
    if keep == 0 {
        return Err(Error::EmptySpectrum { threshold });
    }
    Ok(SingularSystem {
        lambdas: eig.values[..keep].to_vec(),
        vectors: eig.vectors.columns(0, keep).into_owned(),
        clamp_threshold: threshold,
    })
}

/// Orthogonal projection onto the eigenvectors with `|λ - center| < rho_half`.
pub fn spectral_projection(
    e: &HermitianEigensystem,
    cluster_center: f64,
    rho_half: f64,
) -> Result<ComplexMatrix> {
    if !(rho_half > 0.0 && rho_half.is_finite()) {
        return Err(Error::Domain(format!(
            "rho_half must be positive, got {rho_half}"
        )));
    }
    let n = e.dim();
    let mut p = DMatrix::<Complex64>::zeros(n, n);
    for (j, &lambda) in e.values.iter().enumerate() {
        let dist = (lambda - cluster_center).abs();
        if (dist - rho_half).abs() <= CONTOUR_TOL {
            return Err(Error::IllPosedCluster {
                eigenvalue: lambda,
                center: cluster_center,
                radius: rho_half,
            });
        }
        if dist < rho_half {
            let v = e.vectors.column(j);
            p += v * v.adjoint();
        }
    }
    Ok(ComplexMatrix::from_computed(hermitian_part(&p)))
}

/// Hausdorff distance between two finite spectra; the shorter list is padded
/// with zeros.
pub fn spectrum_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Argument(
            "spectrum_distance needs non-empty spectra".into(),
        ));
    }
    let len = a.len().max(b.len());
    let pad = |s: &[f64]| {
        let mut v = s.to_vec();
        v.resize(len, 0.0);
        v
    };
    let (a, b) = (pad(a), pad(b));
    let directed = |from: &[f64], to: &[f64]| {
        from.iter()
            .map(|x| {
                to.iter()
                    .map(|y| (x - y).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(&a, &b).max(directed(&b, &a)))
}

/// Distance from `lambdas[index]` to the rest of the spectrum, with equal
/// values (the same eigenvalue) excluded.
pub fn isolation_gap(lambdas: &[f64], index: usize) -> f64 {
    let target = lambdas[index];
    lambdas
        .iter()
        .filter(|&&l| l != target)
        .map(|l| (l - target).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Largest `n` (1-based) with gap `≥ 2√δ` around `λ_n` and `8 n δ^{1/4} ≤ 1`;
/// `0` when no index qualifies.
pub fn compute_n_delta(lambdas: &[f64], delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::Domain(format!(
            "delta must lie in (0, 1/4), got {delta}"
        )));
    }
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Domain("N(delta) needs a positive spectrum".into()));
    }
    if lambdas.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Domain(
            "N(delta) needs a non-increasing spectrum".into(),
        ));
    }
    let min_gap = 2.0 * delta.sqrt();
    let quartic = delta.powf(0.25);
    Ok((1..=lambdas.len())
        .filter(|&n| 8.0 * n as f64 * quartic <= 1.0 && isolation_gap(lambdas, n - 1) >= min_gap)
        .max()
        .unwrap_or(0))
}
