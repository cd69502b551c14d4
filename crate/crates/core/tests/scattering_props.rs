mod common;

use std::f64::consts::TAU;

use common::*;
use proptest::prelude::*;
use regfm::scattering::{
    add_noise, add_noise_with, assemble_farfield, born_farfield_entry, noise_matrix, BornKernel,
    Medium, NoiseNorm, QuadratureRule, ScattererGeometry, WaveConfig,
};
use regfm::Complex64;

#[test]
fn doubling_quadrature_changes_star_entries_little() {
    let g = ScattererGeometry::star();
    let m = Medium::default();
    let w = WaveConfig::new(1.0, 16).unwrap();
    let coarse = assemble_farfield(&g, &m, &w, &QuadratureRule::new(32, 64).unwrap());
    let fine = assemble_farfield(&g, &m, &w, &QuadratureRule::new(64, 128).unwrap());
    let diff = coarse.sub(&fine).unwrap().max_abs();
    assert!(diff <= 1e-9, "{diff:e}");
}

#[test]
fn disk_oracle_over_the_argument_range() {
    let radius = 0.8;
    let g = ScattererGeometry::disk(radius).unwrap();
    let m = Medium::new(Complex64::new(1.5, 0.3), Complex64::new(0.5, 2.0)).unwrap();
    let k = 2.4;
    let kernel = BornKernel::new(&g, &m, k, &QuadratureRule::default());
    for i in 0..100 {
        // |d| ∈ (0, 2) so k R |d| sweeps (0, 3.84)
        let d_len = 2.0 * (i as f64 + 0.5) / 100.0;
        let phi = i as f64 * 0.7;
        let d = [d_len * phi.cos(), d_len * phi.sin()];
        let s = k * radius * d_len;
        let want = (m.n - 1.0) * k * k * TAU * radius * bessel_j(1, s) / (k * d_len)
            + m.eta * TAU * radius * bessel_j(0, s);
        let got = kernel.entry_for_difference(d);
        assert!(rel_err(got, want) <= 1e-8, "|d| = {d_len}: {got} vs {want}");
    }
}

#[test]
fn noise_is_linear_in_delta() {
    let g = ScattererGeometry::star();
    let w = WaveConfig::new(1.0, 24).unwrap();
    let f = assemble_farfield(&g, &Medium::default(), &w, &QuadratureRule::default());
    for seed in [1, 2, 3] {
        let d1 = f
            .sub(&add_noise(&f, 0.01, seed).unwrap())
            .unwrap()
            .spectral_norm()
            .unwrap();
        let d2 = f
            .sub(&add_noise(&f, 0.02, seed).unwrap())
            .unwrap()
            .spectral_norm()
            .unwrap();
        assert!((d2 / d1 - 2.0).abs() <= 1e-12, "{}", d2 / d1);
    }
    let e = noise_matrix(24, 24, 5, NoiseNorm::Spectral).unwrap();
    assert!((e.spectral_norm().unwrap() - 1.0).abs() <= 1e-12);
    let e = noise_matrix(24, 24, 5, NoiseNorm::Frobenius).unwrap();
    assert!((e.frobenius_norm() - 1.0).abs() <= 1e-12);
    assert_eq!(add_noise_with(&f, 0.0, 9, NoiseNorm::Frobenius).unwrap(), f);
    assert_eq!(
        add_noise(&f, 0.03, 4).unwrap(),
        add_noise(&f, 0.03, 4).unwrap()
    );
    assert_ne!(
        add_noise(&f, 0.03, 4).unwrap(),
        add_noise(&f, 0.03, 5).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reciprocity(a in 0.0..TAU, b in 0.0..TAU, k in 0.2f64..4.0) {
        let g = ScattererGeometry::star();
        let m = Medium::default();
        let q = QuadratureRule::new(16, 32).unwrap();
        let x = [a.cos(), a.sin()];
        let y = [b.cos(), b.sin()];
        let f1 = born_farfield_entry(&g, &m, k, x, y, &q).unwrap();
        let f2 = born_farfield_entry(&g, &m, k, [-y[0], -y[1]], [-x[0], -x[1]], &q).unwrap();
        prop_assert!((f1 - f2).norm() <= 1e-12 * f1.norm().max(1.0));
    }

    #[test]
    fn geometry_round_trips_and_contains(c0 in 0.3f64..1.0, a1 in -0.1f64..0.1, b2 in -0.1f64..0.1) {
        let g = ScattererGeometry::new(c0, vec![a1, 0.0], vec![0.0, b2]).unwrap();
        let back = ScattererGeometry::from_coefficients(&g.coefficients()).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert!(g.contains([0.0, 0.0]));
        let r = g.max_radius();
        prop_assert!(!g.contains([r * 1.01, 0.0]));
    }
}

#[test]
fn farfield_is_translation_consistent_with_kernel() {
    let g = ScattererGeometry::star();
    let m = Medium::default();
    let w = WaveConfig::new(1.5, 12).unwrap();
    let q = QuadratureRule::default();
    let f = assemble_farfield(&g, &m, &w, &q);
    let dirs = w.directions();
    for (i, j) in [(0, 0), (3, 7), (11, 2)] {
        let e = born_farfield_entry(&g, &m, w.k, dirs[i], dirs[j], &q).unwrap();
        assert!((f.get(i, j) - e).norm() <= 1e-13 * e.norm());
    }
    assert!(born_farfield_entry(&g, &m, 1.0, [2.0, 0.0], [1.0, 0.0], &q).is_err());
}
