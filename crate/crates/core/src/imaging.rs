//! The imaging functional
//!
//! ```text
//! W(z) = [ Σ_j φ²(σ_j; α)/σ_j |(u_j, ℓ_z)|² ]^{-1}
//! ```
//!
//! where `{σ_j; u_j}` is the positive spectrum of `F# = |Re F| + |Im F|`.
//! `W` is large for `z` inside the scatterer and small outside. The
//! inner products carry no direction-quadrature weights.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::indicator::FilterWeights;
use crate::regularization::FilterSpec;
use crate::scattering::{Point, ScattererGeometry, WaveConfig};
use crate::spectra::{augment_sharp, singular_system, ComplexMatrix, SingularSystem};

/// Value used for `W` where the indicator sum vanishes.
pub const W_CAP: f64 = 1e300;

/// Tensor lattice including both endpoints; point `(ix, iy)` is stored at
/// `iy * nx + ix` with `iy = 0` at `y_min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl SamplingGrid {
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        };
        g.validate()?;
        Ok(g)
    }

    /// `[-h, h]²` with `n × n` points.
    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points per axis, got {}x{}",
                self.nx, self.ny
            )));
        }
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.x_min < self.x_max) || !(self.y_min < self.y_max) {
            return Err(Error::Domain(
                "grid bounds must be finite with min < max".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * ix as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y_min + (self.y_max - self.y_min) * iy as f64 / (self.ny - 1) as f64
    }

    pub fn point(&self, index: usize) -> Point {
        [self.x(index % self.nx), self.y(index / self.nx)]
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

impl Default for SamplingGrid {
    fn default() -> Self {
        Self {
            x_min: -1.0,
            x_max: 1.0,
            y_min: -1.0,
            y_max: 1.0,
            nx: 128,
            ny: 128,
        }
    }
}

/// Provenance carried with a field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMetadata {
    pub filter: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub delta: f64,
    pub seed: u64,
    pub k: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorField {
    pub grid: SamplingGrid,
    pub values: Vec<f64>,
    pub metadata: FieldMetadata,
}

impl IndicatorField {
    pub fn with_noise(mut self, delta: f64, seed: u64) -> Self {
        self.metadata.delta = delta;
        self.metadata.seed = seed;
        self
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            })
            .0
    }

    /// Value at the grid point nearest to `z`.
    pub fn value_near(&self, z: Point) -> f64 {
        let g = &self.grid;
        let ix = ((z[0] - g.x_min) / (g.x_max - g.x_min) * (g.nx - 1) as f64).round();
        let iy = ((z[1] - g.y_min) / (g.y_max - g.y_min) * (g.ny - 1) as f64).round();
        let ix = ix.clamp(0.0, (g.nx - 1) as f64) as usize;
        let iy = iy.clamp(0.0, (g.ny - 1) as f64) as usize;
        self.values[iy * g.nx + ix]
    }
}

/// `F#` and its positive spectrum, computed once per data matrix.
#[derive(Clone, Debug)]
pub struct SharpSpectrum {
    pub sharp: ComplexMatrix,
    pub system: SingularSystem,
}

impl SharpSpectrum {
    pub fn new(f: &ComplexMatrix, clamp_rel: f64) -> Result<Self> {
        let sharp = augment_sharp(f)?;
        let system = singular_system(&sharp, clamp_rel)?;
        Ok(Self { sharp, system })
    }

    /// `‖F#‖₂`, the largest retained eigenvalue.
    pub fn norm(&self) -> f64 {
        self.system.lambdas()[0]
    }
}

pub fn reconstruct(
    f_input: &ComplexMatrix,
    f: &FilterSpec,
    w: &WaveConfig,
    grid: &SamplingGrid,
    clamp_rel: f64,
) -> Result<IndicatorField> {
    if !f_input.is_square() || f_input.rows() != w.num_directions {
        return Err(Error::Dimension(format!(
            "data matrix {}x{} does not match {} directions",
            f_input.rows(),
            f_input.cols(),
            w.num_directions
        )));
    }
    let spectrum = SharpSpectrum::new(f_input, clamp_rel)?;
    reconstruct_from_spectrum(&spectrum.system, f, w, grid)
}

/// Evaluates `W` on the grid for an already decomposed `F#`.
pub fn reconstruct_from_spectrum(
    system: &SingularSystem,
    f: &FilterSpec,
    w: &WaveConfig,
    grid: &SamplingGrid,
) -> Result<IndicatorField> {
    grid.validate()?;
    if system.dim() != w.num_directions {
        return Err(Error::Dimension(format!(
            "spectrum of dimension {} for {} directions",
            system.dim(),
            w.num_directions
        )));
    }
    let weights = FilterWeights::new(system, f)?;
    let dirs = w.directions();
    let vectors = system.vectors();
    let modes = system.len();

    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let z = grid.point(idx);
            // conj(ℓ_z)
            let ell_conj: Vec<Complex64> = dirs
                .iter()
                .map(|d| Complex64::from_polar(1.0, w.k * (d[0] * z[0] + d[1] * z[1])))
                .collect();
            let coeffs: Vec<Complex64> = (0..modes)
                .map(|j| {
                    vectors
                        .column(j)
                        .iter()
                        .zip(&ell_conj)
                        .map(|(u, l)| u * l)
                        .sum()
                })
                .collect();
            let s = weights.indicator_from_coefficients(&coeffs);
            if s > 0.0 {
                (1.0 / s).min(W_CAP)
            } else {
                W_CAP
            }
        })
        .collect();

    Ok(IndicatorField {
        grid: *grid,
        values,
        metadata: FieldMetadata {
            filter: f.kind().name().to_string(),
            alpha: f.alpha(),
            beta: f.beta(),
            delta: 0.0,
            seed: 0,
            k: w.k,
        },
    })
}

/// Divides by the maximum.
pub fn normalize_field(fld: &IndicatorField) -> Result<IndicatorField> {
    let max = fld.max();
    if !(max > 0.0 && max.is_finite()) {
        return Err(Error::Numerical(
            "cannot normalize a field without positive maximum".into(),
        ));
    }
    let mut out = fld.clone();
    out.values.iter_mut().for_each(|v| *v /= max);
    Ok(out)
}

pub fn threshold_mask(fld: &IndicatorField, level: f64) -> Vec<bool> {
    fld.values.iter().map(|&v| v >= level).collect()
}

/// Indicator of the grid points strictly inside the scatterer.
pub fn inside_mask(g: &ScattererGeometry, grid: &SamplingGrid) -> Vec<bool> {
    grid.points().map(|z| g.contains(z)).collect()
}

/// Intersection over union of `mask` and the true interior; `1` when both
/// are empty.
pub fn jaccard(mask: &[bool], g: &ScattererGeometry, grid: &SamplingGrid) -> Result<f64> {
    if mask.len() != grid.len() {
        return Err(Error::Dimension(format!(
            "mask of length {} for a grid of {} points",
            mask.len(),
            grid.len()
        )));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&m, z) in mask.iter().zip(grid.points()) {
        let d = g.contains(z);
        inter += (m && d) as usize;
        union += (m || d) as usize;
    }
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

/// Jaccard scores of the normalized field at `levels`.
pub fn threshold_sweep(
    normalized: &IndicatorField,
    g: &ScattererGeometry,
    levels: &[f64],
) -> Result<Vec<(f64, f64)>> {
    levels
        .iter()
        .map(|&l| {
            Ok((
                l,
                jaccard(&threshold_mask(normalized, l), g, &normalized.grid)?,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(values: Vec<f64>, nx: usize, ny: usize) -> IndicatorField {
        IndicatorField {
            grid: SamplingGrid::new(-1.0, 1.0, -1.0, 1.0, nx, ny).unwrap(),
            values,
            metadata: FieldMetadata {
                filter: "identity".into(),
                alpha: None,
                beta: None,
                delta: 0.0,
                seed: 0,
                k: 1.0,
            },
        }
    }

    #[test]
    fn grid_layout() {
        let g = SamplingGrid::new(0.0, 1.0, 10.0, 12.0, 3, 2).unwrap();
        assert_eq!(g.point(0), [0.0, 10.0]);
        assert_eq!(g.point(2), [1.0, 10.0]);
        assert_eq!(g.point(3), [0.0, 12.0]);
        assert!(SamplingGrid::new(0.0, 1.0, 0.0, 1.0, 1, 4).is_err());
        assert!(SamplingGrid::new(1.0, 0.0, 0.0, 1.0, 2, 4).is_err());
    }

    #[test]
    fn normalization() {
        let f = normalize_field(&field(vec![2.0; 4], 2, 2)).unwrap();
        assert!(f.values.iter().all(|&v| v == 1.0));
        let raw = field(vec![0.5, 3.0, 1.0, 2.0], 2, 2);
        let f = normalize_field(&raw).unwrap();
        assert_eq!(f.max(), 1.0);
        assert_eq!(f.argmax(), raw.argmax());
        assert!(normalize_field(&field(vec![0.0; 4], 2, 2)).is_err());
    }

    #[test]
    fn masks() {
        let f = field(vec![0.0, 0.2, 0.7, 1.0], 2, 2);
        assert_eq!(threshold_mask(&f, 1e-12), vec![false, true, true, true]);
        assert_eq!(threshold_mask(&f, 1.0), vec![false, false, false, true]);
        let hi = threshold_mask(&f, 0.6);
        let lo = threshold_mask(&f, 0.3);
        assert!(hi.iter().zip(&lo).all(|(h, l)| !h || *l));
    }

    #[test]
    fn jaccard_examples() {
        let grid = SamplingGrid::square(1.0, 41).unwrap();
        let disk = ScattererGeometry::disk(0.5).unwrap();
        let inside = inside_mask(&disk, &grid);
        assert_eq!(jaccard(&inside, &disk, &grid).unwrap(), 1.0);
        let outside: Vec<bool> = inside.iter().map(|b| !b).collect();
        assert_eq!(jaccard(&outside, &disk, &grid).unwrap(), 0.0);

        let mut half = vec![false; grid.len()];
        let mut count = 0;
        let total = inside.iter().filter(|&&b| b).count();
        for (i, &b) in inside.iter().enumerate() {
            if b && count < total / 2 {
                half[i] = true;
                count += 1;
            }
        }
        let j = jaccard(&half, &disk, &grid).unwrap();
        assert!((j - (total / 2) as f64 / total as f64).abs() < 1e-15);
        assert!((j - 0.5).abs() < 0.01);

        let tiny = ScattererGeometry::disk(1e-3).unwrap();
        let g2 = SamplingGrid::new(0.5, 1.0, 0.5, 1.0, 2, 2).unwrap();
        assert_eq!(jaccard(&[false; 4], &tiny, &g2).unwrap(), 1.0);
        assert!(jaccard(&[false; 3], &tiny, &g2).is_err());
    }

    #[test]
    fn value_near_picks_nearest_point() {
        let f = field(vec![1.0, 2.0, 3.0, 4.0], 2, 2);
        assert_eq!(f.value_near([0.9, 0.9]), 4.0);
        assert_eq!(f.value_near([-5.0, -5.0]), 1.0);
    }
}
