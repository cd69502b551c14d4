//! Synthetic 2-D far-field data in the Born approximation
//!
//! ```text
//! u∞(x̂, ŷ) ≈ k²(n − 1) ∫_D e^{−ik ω·(x̂−ŷ)} dω + η ∫_∂D e^{−ik ω·(x̂−ŷ)} ds(ω)
//! ```
//!
//! for a star-shaped scatterer `∂D = r(θ)(cos θ, sin θ)`. The volume integral
//! uses polar coordinates with Gauss–Legendre radially on `[0, r(θ)]` and the
//! periodic trapezoid rule in `θ`; the boundary integral uses a trapezoid rule
//! [`BOUNDARY_OVERSAMPLING`] times finer with the arc-length jacobian
//! `√(r² + r′²)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{complex_uniform_pm1, seeded};
use crate::spectra::ComplexMatrix;

pub type Point = [f64; 2];

const POSITIVITY_SAMPLES: usize = 4096;

/// Radial function `r(θ) = c₀ + Σ_k (a_k cos kθ + b_k sin kθ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScattererGeometry {
    c0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl ScattererGeometry {
    /// `cos[k-1] = a_k`, `sin[k-1] = b_k`.
    pub fn new(c0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.len() != sin.len() {
            return Err(Error::Argument(
                "cosine and sine coefficient lists differ in length".into(),
            ));
        }
        if !std::iter::once(&c0)
            .chain(&cos)
            .chain(&sin)
            .all(|c| c.is_finite())
        {
            return Err(Error::NonFinite("radial coefficient".into()));
        }
        let g = Self { c0, cos, sin };
        for i in 0..POSITIVITY_SAMPLES {
            let theta = 2.0 * PI * i as f64 / POSITIVITY_SAMPLES as f64;
            let r = g.radius(theta);
            if !(r > 0.0) {
                return Err(Error::Domain(format!(
                    "radial function is not positive: r({theta:.6}) = {r}"
                )));
            }
        }
        Ok(g)
    }

    /// `r(θ) = 0.5 (1 − 0.3 sin 4θ)`.
    pub fn star() -> Self {
        Self {
            c0: 0.5,
            cos: vec![0.0; 4],
            sin: vec![0.0, 0.0, 0.0, -0.15],
        }
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::new(radius, Vec::new(), Vec::new())
    }

    /// Coefficients flattened as `c₀ a₁ b₁ a₂ b₂ …`.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut out = vec![self.c0];
        for (a, b) in self.cos.iter().zip(&self.sin) {
            out.push(*a);
            out.push(*b);
        }
        out
    }

    pub fn from_coefficients(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len().is_multiple_of(2) {
            return Err(Error::Argument(
                "expected c0 followed by (a_k, b_k) pairs".into(),
            ));
        }
        let (cos, sin) = coeffs[1..].chunks(2).map(|p| (p[0], p[1])).unzip();
        Self::new(coeffs[0], cos, sin)
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.c0
            + self
                .cos
                .iter()
                .zip(&self.sin)
                .enumerate()
                .map(|(i, (a, b))| {
                    let k = (i + 1) as f64;
                    a * (k * theta).cos() + b * (k * theta).sin()
                })
                .sum::<f64>()
    }

    pub fn radius_derivative(&self, theta: f64) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                k * (b * (k * theta).cos() - a * (k * theta).sin())
            })
            .sum()
    }

    /// Strict interior test `|z| < r(atan2(z_y, z_x))`.
    pub fn contains(&self, z: Point) -> bool {
        let rho = z[0].hypot(z[1]);
        rho < self.radius(z[1].atan2(z[0]))
    }

    pub fn max_radius(&self) -> f64 {
        (0..POSITIVITY_SAMPLES)
            .map(|i| self.radius(2.0 * PI * i as f64 / POSITIVITY_SAMPLES as f64))
            .fold(0.0, f64::max)
    }
}

/// Boundary point `r(θ)(cos θ, sin θ)` and arc-length jacobian `√(r² + r′²)`.
pub fn boundary_point(g: &ScattererGeometry, theta: f64) -> (Point, f64) {
    let r = g.radius(theta);
    let dr = g.radius_derivative(theta);
    ([r * theta.cos(), r * theta.sin()], r.hypot(dr))
}

/// Refractive index `n` and conductivity `η`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Medium {
    pub n: Complex64,
    pub eta: Complex64,
}

impl Medium {
    pub fn new(n: Complex64, eta: Complex64) -> Result<Self> {
        if !(n.re.is_finite() && n.im.is_finite() && eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::NonFinite("medium parameter".into()));
        }
        if n.im < 0.0 || eta.im < 0.0 {
            return Err(Error::Domain(format!(
                "Im(n) and Im(eta) must be non-negative, got n = {n}, eta = {eta}"
            )));
        }
        Ok(Self { n, eta })
    }
}

impl Default for Medium {
    /// `n = 4 + 2i`, `η = 2 + i`.
    fn default() -> Self {
        Self {
            n: Complex64::new(4.0, 2.0),
            eta: Complex64::new(2.0, 1.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveConfig {
    pub k: f64,
    pub num_directions: usize,
}

impl WaveConfig {
    pub fn new(k: f64, num_directions: usize) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!(
                "wavenumber must be positive, got {k}"
            )));
        }
        if num_directions < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 directions, got {num_directions}"
            )));
        }
        Ok(Self { k, num_directions })
    }

    /// `θ_i = 2π i / N` for `i = 0..N`.
    pub fn angles(&self) -> Vec<f64> {
        (0..self.num_directions)
            .map(|i| 2.0 * PI * i as f64 / self.num_directions as f64)
            .collect()
    }

    pub fn directions(&self) -> Vec<Point> {
        self.angles()
            .into_iter()
            .map(|t| [t.cos(), t.sin()])
            .collect()
    }
}

impl Default for WaveConfig {
    fn default() -> Self {
        Self {
            k: 1.0,
            num_directions: 64,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[a, b]`, exact for polynomials of
/// degree `2·npts − 1`.
pub fn gauss_legendre(npts: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if npts == 0 {
        return Err(Error::Argument("need at least one quadrature point".into()));
    }
    if !(a < b) {
        return Err(Error::Argument(format!("empty interval [{a}, {b}]")));
    }
    let n = npts;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    // roots are symmetric; Newton on P_n from the Tricomi initial guess
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = mid;
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Angular points of the boundary rule per angular point of the volume rule.
/// The arc-length factor `√(r² + r′²)` has complex singularities close to the
/// real axis for star shapes, so the boundary term needs a finer trapezoid.
pub const BOUNDARY_OVERSAMPLING: usize = 4;

/// Point counts of the polar tensor rule.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    radial_points: usize,
    angular_points: usize,
    radial_nodes: Vec<f64>,
    radial_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(radial_points: usize, angular_points: usize) -> Result<Self> {
        if angular_points < 2 {
            return Err(Error::Argument("need at least 2 angular points".into()));
        }
        let (radial_nodes, radial_weights) = gauss_legendre(radial_points, 0.0, 1.0)?;
        Ok(Self {
            radial_points,
            angular_points,
            radial_nodes,
            radial_weights,
        })
    }

    pub fn radial_points(&self) -> usize {
        self.radial_points
    }

    pub fn angular_points(&self) -> usize {
        self.angular_points
    }
}

impl Default for QuadratureRule {
    /// 32 Gauss–Legendre points radially, 64 trapezoid points in angle.
    fn default() -> Self {
        Self::new(32, 64).expect("default quadrature is valid")
    }
}

/// Geometry sampled on the quadrature nodes, reusable for every direction pair.
#[derive(Clone, Debug)]
pub struct BornKernel {
    k: f64,
    volume_coeff: Complex64,
    eta: Complex64,
    /// `(x, y, weight)` volume nodes.
    volume: Vec<(f64, f64, f64)>,
    /// `(x, y, weight)` boundary nodes.
    boundary: Vec<(f64, f64, f64)>,
}

impl BornKernel {
    pub fn new(g: &ScattererGeometry, m: &Medium, k: f64, q: &QuadratureRule) -> Self {
        let na = q.angular_points;
        let dtheta = 2.0 * PI / na as f64;
        let mut volume = Vec::with_capacity(na * q.radial_points);
        for i in 0..na {
            let theta = dtheta * i as f64;
            let (c, s) = (theta.cos(), theta.sin());
            let r = g.radius(theta);
            for (t, w) in q.radial_nodes.iter().zip(&q.radial_weights) {
                let rho = r * t;
                // ρ dρ dθ with ρ = r t
                volume.push((rho * c, rho * s, dtheta * w * r * rho));
            }
        }
        let nb = na * BOUNDARY_OVERSAMPLING;
        let dtheta_b = 2.0 * PI / nb as f64;
        let boundary = (0..nb)
            .map(|i| {
                let (p, jac) = boundary_point(g, dtheta_b * i as f64);
                (p[0], p[1], dtheta_b * jac)
            })
            .collect();
        Self {
            k,
            volume_coeff: (m.n - 1.0) * (k * k),
            eta: m.eta,
            volume,
            boundary,
        }
    }

    /// Far-field entry for `d = x̂ − ŷ`.
    pub fn entry_for_difference(&self, d: Point) -> Complex64 {
        let phase_sum = |nodes: &[(f64, f64, f64)]| -> Complex64 {
            nodes
                .iter()
                .map(|&(x, y, w)| Complex64::from_polar(w, -self.k * (x * d[0] + y * d[1])))
                .sum()
        };
        self.volume_coeff * phase_sum(&self.volume) + self.eta * phase_sum(&self.boundary)
    }
}

fn check_unit(v: Point, what: &str) -> Result<()> {
    if (v[0].hypot(v[1]) - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("{what} is not a unit vector: {v:?}")));
    }
    Ok(())
}

pub fn born_farfield_entry(
    g: &ScattererGeometry,
    m: &Medium,
    k: f64,
    xhat: Point,
    yhat: Point,
    q: &QuadratureRule,
) -> Result<Complex64> {
    check_unit(xhat, "observation direction")?;
    check_unit(yhat, "incident direction")?;
    let kernel = BornKernel::new(g, m, k, q);
    Ok(kernel.entry_for_difference([xhat[0] - yhat[0], xhat[1] - yhat[1]]))
}

/// `F[i][j] = u∞(x̂_i, ŷ_j)` on the equally spaced directions of `w`.
pub fn assemble_farfield(
    g: &ScattererGeometry,
    m: &Medium,
    w: &WaveConfig,
    q: &QuadratureRule,
) -> ComplexMatrix {
    let kernel = BornKernel::new(g, m, w.k, q);
    let dirs = w.directions();
    let n = dirs.len();
    let entries: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (x, y) = (dirs[idx / n], dirs[idx % n]);
            kernel.entry_for_difference([x[0] - y[0], x[1] - y[1]])
        })
        .collect();
    ComplexMatrix::from_computed(DMatrix::from_row_slice(n, n, &entries))
}

/// How the noise matrix `E` is normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NoiseNorm {
    #[default]
    Spectral,
    Frobenius,
}

impl NoiseNorm {
    pub fn name(self) -> &'static str {
        match self {
            NoiseNorm::Spectral => "spectral",
            NoiseNorm::Frobenius => "frobenius",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "spectral" => Some(NoiseNorm::Spectral),
            "frobenius" => Some(NoiseNorm::Frobenius),
            _ => None,
        }
    }
}

/// Random `E` with real and imaginary parts uniform on `(−1, 1)`, normalized.
pub fn noise_matrix(rows: usize, cols: usize, seed: u64, norm: NoiseNorm) -> Result<ComplexMatrix> {
    let mut rng = seeded(seed);
    let entries: Vec<Complex64> = (0..rows * cols)
        .map(|_| complex_uniform_pm1(&mut rng))
        .collect();
    let e = ComplexMatrix::from_computed(DMatrix::from_row_slice(rows, cols, &entries));
    let scale = match norm {
        NoiseNorm::Spectral => e.spectral_norm()?,
        NoiseNorm::Frobenius => e.frobenius_norm(),
    };
    if !(scale > 0.0) {
        return Err(Error::Numerical("degenerate noise matrix".into()));
    }
    Ok(e.scale(1.0 / scale))
}

/// `F^δ_ij = F_ij (1 + δ E_ij)`.
pub fn add_noise(f: &ComplexMatrix, delta: f64, seed: u64) -> Result<ComplexMatrix> {
    add_noise_with(f, delta, seed, NoiseNorm::Spectral)
}

pub fn add_noise_with(
    f: &ComplexMatrix,
    delta: f64,
    seed: u64,
    norm: NoiseNorm,
) -> Result<ComplexMatrix> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!(
            "noise level must be >= 0, got {delta}"
        )));
    }
    if delta == 0.0 {
        return Ok(f.clone());
    }
    let e = noise_matrix(f.rows(), f.cols(), seed, norm)?;
    let noisy = f
        .as_dmatrix()
        .zip_map(e.as_dmatrix(), |fij, eij| fij * (1.0 + eij * delta));
    Ok(ComplexMatrix::from_computed(noisy))
}

/// `ℓ_z = [e^{−ik x̂_i·z}]`.
pub fn rhs_vector(z: Point, k: f64, w: &WaveConfig) -> Vec<Complex64> {
    w.directions()
        .iter()
        .map(|d| Complex64::from_polar(1.0, -k * (d[0] * z[0] + d[1] * z[1])))
        .collect()
}
