//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::f64::consts::{PI, TAU};
use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use common::*;
use regfm::imaging::{
    jaccard, normalize_field, reconstruct_from_spectrum, threshold_mask, SharpSpectrum,
};
use regfm::indicator::{
    assemble_solution, glsm_functional, picard_sum, regularized_solution_coeffs,
};
use regfm::perturb_verify::{run_sweep, SweepConfig};
use regfm::regularization::{
    filter_constants, filter_value, select_alpha, FilterKind, FilterSpec, ParamRule,
};
use regfm::scattering::{
    add_noise, assemble_farfield, born_farfield_entry, Medium, QuadratureRule, ScattererGeometry,
    WaveConfig,
};
use regfm::spectra::{singular_system, DEFAULT_CLAMP_REL};
use regfm::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// `|H| = V Σ V*` from the SVD `H = U Σ V*`.
fn abs_via_svd(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let svd = h.clone().svd(false, true);
    let v_t = svd.v_t.unwrap();
    let s = DMatrix::from_diagonal(&svd.singular_values.map(|x| Complex64::new(x, 0.0)));
    v_t.adjoint() * s * v_t
}

fn parameter_rule() -> Outcome {
    let rule = ParamRule::new(0.125).unwrap();
    let tik = select_alpha(FilterKind::Tikhonov, 0.01, &rule).unwrap();
    let glsm = select_alpha(FilterKind::Glsm, 0.01, &rule).unwrap();

    let w = WaveConfig::default();
    let f = assemble_farfield(
        &ScattererGeometry::star(),
        &Medium::default(),
        &w,
        &QuadratureRule::default(),
    );
    let fd = add_noise(&f, 0.01, 1).unwrap();
    let lib_norm = SharpSpectrum::new(&fd, DEFAULT_CLAMP_REL).unwrap().norm();
    let land = select_alpha(
        FilterKind::Landweber,
        0.01,
        &rule.with_operator_norm(lib_norm),
    )
    .unwrap();

    let m = fd.as_dmatrix();
    let i2 = Complex64::new(0.0, 2.0);
    let re = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let im = (m - m.adjoint()) / i2;
    let sharp = abs_via_svd(&re) + abs_via_svd(&im);
    let norm = largest_singular_value(&sharp);
    let expected = 0.01f64.powf(0.125) / (2.0 * norm * norm);
    let land_rel = (land - expected).abs() / expected;

    let pass = (tik - 0.1406).abs() <= 5e-5 && (glsm - 0.7499).abs() <= 5e-5 && land_rel <= 1e-12;
    outcome(
        pass,
        format!("tikhonov {tik:.6}, glsm {glsm:.6}, landweber {land:.6e} (rel {land_rel:.1e})"),
    )
}

fn landweber_by_loop(beta: f64, m: u64, t: f64) -> f64 {
    let base = 1.0 - beta * t * t;
    let mut p = 1.0;
    for _ in 0..m {
        p *= base;
    }
    1.0 - p
}

fn filter_closed_forms() -> Outcome {
    let mut r = rng(2);
    let (mut worst, mut bound_violations) = (0.0f64, 0);
    for _ in 0..10_000 {
        let kind = r.random_range(0..3);
        let (spec, t, closed) = match kind {
            0 => {
                let alpha = 10f64.powf(r.random_range(-6.0..0.0));
                let t = 10f64.powf(r.random_range(-6.0..3.0));
                (
                    FilterSpec::tikhonov(alpha).unwrap(),
                    t,
                    t * t / (t * t + alpha),
                )
            }
            1 => {
                let alpha = 10f64.powf(r.random_range(-3.0..0.0));
                let beta = 10f64.powf(r.random_range(-3.0..0.0));
                let t = r.random_range(0.0..0.999) / beta.sqrt();
                let m = (1.0 / alpha).ceil() as u64;
                (
                    FilterSpec::landweber(alpha, beta).unwrap(),
                    t,
                    landweber_by_loop(beta, m, t),
                )
            }
            _ => {
                let alpha = 10f64.powf(r.random_range(-6.0..0.0));
                let t = 10f64.powf(r.random_range(-6.0..3.0));
                (FilterSpec::glsm(alpha).unwrap(), t, t / (alpha + t))
            }
        };
        let phi = filter_value(&spec, t).unwrap();
        worst = worst.max((phi - closed).abs());
        let (c_reg, c_alpha) = filter_constants(&spec).unwrap();
        if phi > c_reg + 1e-12 || phi > c_alpha * t + 1e-12 {
            bound_violations += 1;
        }
    }
    outcome(
        worst <= 1e-12 && bound_violations == 0,
        format!("max |phi - closed form| {worst:.1e}, bound violations {bound_violations}"),
    )
}

fn perturbation_bounds() -> Outcome {
    let cfg = SweepConfig::default();
    let reports = run_sweep(&cfg).unwrap();
    let mut counts = std::collections::BTreeMap::<&str, (usize, usize, usize)>::new();
    for rep in &reports {
        let e = counts.entry(rep.bound_name.as_str()).or_default();
        if rep.skipped {
            e.2 += 1;
        } else if rep.satisfied {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    let failures: usize = counts.values().map(|c| c.1).sum();
    let summary: Vec<String> = counts
        .iter()
        .map(|(k, (ok, bad, skip))| format!("{k} {ok} ok/{bad} failed/{skip} skipped"))
        .collect();
    let each_checked = ["weyl", "projection", "pconv"]
        .iter()
        .all(|k| counts.get(k).is_some_and(|c| c.0 > 0));
    outcome(failures == 0 && each_checked, summary.join(", "))
}

fn quadrature_oracle() -> Outcome {
    let radius = 0.5;
    let g = ScattererGeometry::disk(radius).unwrap();
    let medium = Medium::default();
    let q = QuadratureRule::default();
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for kr in [0.5, 1.0, 2.0] {
        let k = kr / radius;
        for _ in 0..100 {
            let (a, b) = (r.random_range(0.0..TAU), r.random_range(0.0..TAU));
            let x = [a.cos(), a.sin()];
            let y = [b.cos(), b.sin()];
            let got = born_farfield_entry(&g, &medium, k, x, y, &q).unwrap();
            let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
            let s = k * radius * d;
            let volume = if d > 0.0 {
                TAU * radius * bessel_j(1, s) / (k * d)
            } else {
                PI * radius * radius
            };
            let want =
                (medium.n - 1.0) * k * k * volume + medium.eta * TAU * radius * bessel_j(0, s);
            worst = worst.max(rel_err(got, want));
        }
    }
    let forward = born_farfield_entry(&g, &medium, 1.0, [1.0, 0.0], [1.0, 0.0], &q).unwrap();
    let forward_err = (forward - Complex64::new(2.75 * PI, 1.5 * PI)).norm();
    outcome(
        worst <= 1e-8 && forward_err <= 1e-10,
        format!("max relative error {worst:.1e}, forward entry error {forward_err:.1e}"),
    )
}

fn glsm_equivalence() -> Outcome {
    let n = 16;
    let (mut worst, mut not_minimal) = (0.0f64, 0);
    for seed in 0..20 {
        let mut r = rng(500 + seed);
        let b = random_matrix(&mut r, n, n);
        let a = &b * b.adjoint() / Complex64::new(n as f64, 0.0);
        let a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let ell = random_vector(&mut r, n);
        let alpha = 10f64.powf(r.random_range(-2.0..0.0));

        let am = cm(a.clone());
        let s = singular_system(&am, DEFAULT_CLAMP_REL).unwrap();
        let spec = FilterSpec::glsm(alpha).unwrap();
        let coeffs = regularized_solution_coeffs(&s, &ell, &spec).unwrap();
        let x = assemble_solution(&s, &coeffs).unwrap();

        // (αA + A²) x = A ℓ
        let lhs = &a * Complex64::new(alpha, 0.0) + &a * &a;
        let rhs = &a * DVector::from_column_slice(&ell);
        let direct = lhs.lu().solve(&rhs).unwrap();
        let diff = (DVector::from_column_slice(&x) - &direct).norm() / direct.norm();
        worst = worst.max(diff);

        let j_min = glsm_functional(&am, &x, &ell, alpha).unwrap();
        for _ in 0..50 {
            let eps = 10f64.powf(r.random_range(-4.0..0.0));
            let dx = random_vector(&mut r, n);
            let y: Vec<Complex64> = x.iter().zip(&dx).map(|(a, b)| a + b * eps).collect();
            if glsm_functional(&am, &y, &ell, alpha).unwrap() < j_min {
                not_minimal += 1;
            }
        }
    }
    outcome(
        worst <= 1e-8 && not_minimal == 0,
        format!(
            "max relative deviation {worst:.1e}, perturbations below the minimum {not_minimal}"
        ),
    )
}

fn picard_dichotomy() -> Outcome {
    let (dim, range_dim) = (64usize, 16);
    let s_vals: Vec<f64> = (0..dim).map(|i| 0.85f64.powi(i as i32)).collect();
    let (mut in_range_max, mut random_min, mut good) = (0.0f64, f64::INFINITY, 0);
    for seed in 0..20 {
        let mut r = rng(600 + seed);
        // S = U diag(s) W*, A = S*S
        let u = unitary(&mut r, dim);
        let w = unitary(&mut r, dim);
        let sd = DMatrix::from_fn(dim, dim, |i, j| {
            Complex64::new(if i == j { s_vals[i] } else { 0.0 }, 0.0)
        });
        let smat = &u * sd * w.adjoint();
        let a = smat.adjoint() * &smat;
        let a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let sys = singular_system(&cm(a), DEFAULT_CLAMP_REL).unwrap();
        let n = sys.len();

        let mut v = DVector::zeros(dim);
        for j in 0..range_dim {
            v += u.column(j) * cgauss(&mut r);
        }
        let in_range: Vec<Complex64> = (smat.adjoint() * v).iter().copied().collect();
        let random = random_vector(&mut r, dim);

        let ratio = |ell: &[Complex64]| {
            let rep = picard_sum(&sys, ell, n).unwrap();
            rep.through(n) / rep.through(n / 2)
        };
        let (a_ratio, b_ratio) = (ratio(&in_range), ratio(&random));
        in_range_max = in_range_max.max(a_ratio);
        random_min = random_min.min(b_ratio);
        if n == dim && a_ratio < 2.0 && b_ratio > 10.0 {
            good += 1;
        }
    }
    outcome(
        good == 20,
        format!("{good}/20 seeds, max in-range ratio {in_range_max:.3}, min random ratio {random_min:.3e}"),
    )
}

fn reconstruction_quality() -> Outcome {
    let g = ScattererGeometry::star();
    let w = WaveConfig::new(1.0, 64).unwrap();
    let grid = Default::default();
    let f = assemble_farfield(&g, &Medium::default(), &w, &QuadratureRule::default());
    let score = |sys: &SharpSpectrum, spec: &FilterSpec| {
        let fld = reconstruct_from_spectrum(&sys.system, spec, &w, &grid).unwrap();
        let fld = normalize_field(&fld).unwrap();
        jaccard(&threshold_mask(&fld, 0.5), &g, &grid).unwrap()
    };

    let clean = SharpSpectrum::new(&f, DEFAULT_CLAMP_REL).unwrap();
    let j_clean = score(&clean, &FilterSpec::Identity);

    let seeds = 10;
    let (mut ident, mut land, mut tik, mut glsm) = (0.0, 0.0, 0.0, 0.0);
    for seed in 0..seeds {
        let fd = add_noise(&f, 0.05, 700 + seed).unwrap();
        let sys = SharpSpectrum::new(&fd, DEFAULT_CLAMP_REL).unwrap();
        let beta = 1.0 / (2.0 * sys.norm() * sys.norm());
        ident += score(&sys, &FilterSpec::Identity);
        land += score(&sys, &FilterSpec::landweber(1e-5, beta).unwrap());
        tik += score(&sys, &FilterSpec::tikhonov(1e-5).unwrap());
        glsm += score(&sys, &FilterSpec::glsm(1e-5).unwrap());
    }
    let n = seeds as f64;
    let (ident, land, tik, glsm) = (ident / n, land / n, tik / n, glsm / n);
    let (a, b, c) = (j_clean >= 0.5, land > ident, tik >= 0.4 && glsm >= 0.4);
    let mark = |ok: bool| if ok { "ok" } else { "FAILED" };
    outcome(
        a && b && c,
        format!(
            "(a) noiseless identity {j_clean:.4} {}; (b) landweber {land:.4} vs identity {ident:.4} {}; \
             (c) tikhonov {tik:.4}, glsm {glsm:.4} {}",
            mark(a),
            mark(b),
            mark(c)
        ),
    )
}

fn run_pipeline(dir: &std::path::Path) -> Vec<Vec<u8>> {
    let bin = env!("CARGO_BIN_EXE_regfm");
    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        "noise.delta = 0.05\nnoise.seed = 11\nfilter.kind = landweber\ngrid.nx = 64\ngrid.ny = 64\n",
    )
    .unwrap();
    let run = |args: &[&str]| {
        let st = Command::new(bin)
            .arg("--config")
            .arg(&cfg)
            .arg("--quiet")
            .args(args)
            .current_dir(dir)
            .status()
            .unwrap();
        assert!(st.success(), "{args:?} failed");
    };
    run(&["synthesize", "--out", "f.txt"]);
    run(&["perturb", "--input", "f.txt", "--out", "fd.txt"]);
    run(&["reconstruct", "--input", "fd.txt", "--out", "w.csv"]);
    ["f.txt", "fd.txt", "w.csv", "w.pgm"]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).unwrap())
        .collect()
}

fn determinism() -> Outcome {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (a, b) = (run_pipeline(d1.path()), run_pipeline(d2.path()));
    let same = a == b && a.iter().all(|f| !f.is_empty());
    let sizes: Vec<String> = a.iter().map(|f| f.len().to_string()).collect();
    outcome(
        same,
        format!(
            "matrix, noisy matrix, CSV, PGM byte sizes {}",
            sizes.join("/")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("parameter rule", parameter_rule),
        ("filter closed forms", filter_closed_forms),
        ("perturbation bounds", perturbation_bounds),
        ("quadrature oracle", quadrature_oracle),
        ("GLSM equivalence", glsm_equivalence),
        ("Picard dichotomy", picard_dichotomy),
        ("reconstruction quality", reconstruction_quality),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
