//! `key = value` run configuration.
//!
//! One entry per line, `#` starts a comment. Omitted keys take the defaults
//! of [`RunConfig::default`]; unknown keys are rejected.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::imaging::SamplingGrid;
use crate::perturb_verify::SweepConfig;
use crate::regularization::{
    check_p, default_landweber_beta, select_alpha, FilterKind, FilterSpec, ParamRule, DEFAULT_P,
};
use crate::scattering::{Medium, NoiseNorm, QuadratureRule, ScattererGeometry, WaveConfig};
use crate::spectra::DEFAULT_CLAMP_REL;

#[derive(Clone, Debug, PartialEq)]
pub enum GeometrySpec {
    Star,
    Disk {
        radius: f64,
    },
    /// `c₀ a₁ b₁ a₂ b₂ …`
    Custom(Vec<f64>),
}

impl GeometrySpec {
    pub fn build(&self) -> Result<ScattererGeometry> {
        match self {
            GeometrySpec::Star => Ok(ScattererGeometry::star()),
            GeometrySpec::Disk { radius } => ScattererGeometry::disk(*radius),
            GeometrySpec::Custom(c) => ScattererGeometry::from_coefficients(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub geometry: GeometrySpec,
    pub medium: Medium,
    pub wave: WaveConfig,
    pub quad_radial: usize,
    pub quad_angular: usize,
    pub noise_delta: f64,
    pub noise_seed: u64,
    pub noise_norm: NoiseNorm,
    pub filter_kind: FilterKind,
    pub filter_alpha: f64,
    /// `None`: `β = 1/(2‖F#‖²)`.
    pub filter_beta: Option<f64>,
    pub filter_p: f64,
    /// Choose α from `noise.delta` with the a-priori rule.
    pub filter_auto: bool,
    pub clamp_rel: f64,
    pub grid: SamplingGrid,
    pub output_threshold: f64,
    pub verify: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: GeometrySpec::Star,
            medium: Medium::default(),
            wave: WaveConfig::default(),
            quad_radial: 32,
            quad_angular: 64,
            noise_delta: 0.0,
            noise_seed: 0,
            noise_norm: NoiseNorm::Spectral,
            filter_kind: FilterKind::Landweber,
            filter_alpha: 1e-5,
            filter_beta: None,
            filter_p: DEFAULT_P,
            filter_auto: false,
            clamp_rel: DEFAULT_CLAMP_REL,
            grid: SamplingGrid::default(),
            output_threshold: 0.5,
            verify: SweepConfig::default(),
        }
    }
}

const KEYS: &[&str] = &[
    "geometry.preset",
    "geometry.radius",
    "geometry.coeffs",
    "medium.n_re",
    "medium.n_im",
    "medium.eta_re",
    "medium.eta_im",
    "wave.k",
    "wave.directions",
    "quad.radial",
    "quad.angular",
    "noise.delta",
    "noise.seed",
    "noise.norm",
    "filter.kind",
    "filter.alpha",
    "filter.beta",
    "filter.p",
    "filter.auto",
    "spectrum.clamp_rel",
    "grid.x_min",
    "grid.x_max",
    "grid.y_min",
    "grid.y_max",
    "grid.nx",
    "grid.ny",
    "output.threshold",
    "verify.dims",
    "verify.deltas",
    "verify.pairs",
    "verify.seed",
    "verify.decay_min",
    "verify.decay_max",
];

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| err(line, format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(err(line, format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| err(line, format!("{key}: '{v}' is not a non-negative integer")))
}

fn parse_u64(line: usize, key: &str, v: &str) -> Result<u64> {
    v.parse()
        .map_err(|_| err(line, format!("{key}: '{v}' is not a non-negative integer")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err(
            line,
            format!("{key}: expected true or false, got '{v}'"),
        )),
    }
}

fn positive(line: usize, key: &str, x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(err(line, format!("{key}: must be positive, got {x}")))
    }
}

fn list<T>(
    line: usize,
    key: &str,
    v: &str,
    f: impl Fn(usize, &str, &str) -> Result<T>,
) -> Result<Vec<T>> {
    let items: Vec<T> = v
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| f(line, key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(err(line, format!("{key}: empty list")));
    }
    Ok(items)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: HashMap<&'static str, usize> = HashMap::new();
    let (mut n_re, mut n_im) = (cfg.medium.n.re, cfg.medium.n.im);
    let (mut eta_re, mut eta_im) = (cfg.medium.eta.re, cfg.medium.eta.im);
    let mut preset: Option<String> = None;
    let mut radius = 0.5;
    let mut coeffs: Option<Vec<f64>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', got '{content}'")))?;
        let (key, v) = (key.trim(), value.trim());
        let key: &'static str = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| err(line, format!("unknown key '{key}'")))?;
        if let Some(prev) = seen.insert(key, line) {
            return Err(err(line, format!("{key} already set on line {prev}")));
        }
        match key {
            "geometry.preset" => match v {
                "star" | "disk" | "custom" => preset = Some(v.to_string()),
                _ => {
                    return Err(err(
                        line,
                        format!("geometry.preset: expected star, disk or custom, got '{v}'"),
                    ))
                }
            },
            "geometry.radius" => radius = positive(line, key, parse_f64(line, key, v)?)?,
            "geometry.coeffs" => coeffs = Some(list(line, key, v, parse_f64)?),
            "medium.n_re" => n_re = parse_f64(line, key, v)?,
            "medium.n_im" => n_im = parse_f64(line, key, v)?,
            "medium.eta_re" => eta_re = parse_f64(line, key, v)?,
            "medium.eta_im" => eta_im = parse_f64(line, key, v)?,
            "wave.k" => cfg.wave.k = positive(line, key, parse_f64(line, key, v)?)?,
            "wave.directions" => {
                let n = parse_usize(line, key, v)?;
                if n < 2 {
                    return Err(err(line, "wave.directions: need at least 2"));
                }
                cfg.wave.num_directions = n;
            }
            "quad.radial" => cfg.quad_radial = parse_usize(line, key, v)?,
            "quad.angular" => cfg.quad_angular = parse_usize(line, key, v)?,
            "noise.delta" => {
                let d = parse_f64(line, key, v)?;
                if d < 0.0 {
                    return Err(err(line, format!("noise.delta: must be >= 0, got {d}")));
                }
                cfg.noise_delta = d;
            }
            "noise.seed" => cfg.noise_seed = parse_u64(line, key, v)?,
            "noise.norm" => {
                cfg.noise_norm = NoiseNorm::parse(v).ok_or_else(|| {
                    err(
                        line,
                        format!("noise.norm: expected spectral or frobenius, got '{v}'"),
                    )
                })?
            }
            "filter.kind" => {
                cfg.filter_kind = FilterKind::parse(v).ok_or_else(|| {
                    err(
                        line,
                        format!(
                        "filter.kind: expected identity, tikhonov, landweber or glsm, got '{v}'"
                    ),
                    )
                })?
            }
            "filter.alpha" => cfg.filter_alpha = positive(line, key, parse_f64(line, key, v)?)?,
            "filter.beta" => {
                cfg.filter_beta = if v == "auto" {
                    None
                } else {
                    Some(positive(line, key, parse_f64(line, key, v)?)?)
                }
            }
            "filter.p" => {
                let p = parse_f64(line, key, v)?;
                check_p(p)
                    .map_err(|_| err(line, format!("filter.p: p must lie in (0, 1/4), got {p}")))?;
                cfg.filter_p = p;
            }
            "filter.auto" => cfg.filter_auto = parse_bool(line, key, v)?,
            "spectrum.clamp_rel" => {
                let c = parse_f64(line, key, v)?;
                if !(0.0..1.0).contains(&c) {
                    return Err(err(
                        line,
                        format!("spectrum.clamp_rel: must lie in [0, 1), got {c}"),
                    ));
                }
                cfg.clamp_rel = c;
            }
            "grid.x_min" => cfg.grid.x_min = parse_f64(line, key, v)?,
            "grid.x_max" => cfg.grid.x_max = parse_f64(line, key, v)?,
            "grid.y_min" => cfg.grid.y_min = parse_f64(line, key, v)?,
            "grid.y_max" => cfg.grid.y_max = parse_f64(line, key, v)?,
            "grid.nx" => cfg.grid.nx = parse_usize(line, key, v)?,
            "grid.ny" => cfg.grid.ny = parse_usize(line, key, v)?,
            "output.threshold" => {
                let t = parse_f64(line, key, v)?;
                if !(t > 0.0 && t < 1.0) {
                    return Err(err(
                        line,
                        format!("output.threshold: must lie in (0, 1), got {t}"),
                    ));
                }
                cfg.output_threshold = t;
            }
            "verify.dims" => {
                let dims = list(line, key, v, parse_usize)?;
                if dims.contains(&0) {
                    return Err(err(line, "verify.dims: dimensions must be positive"));
                }
                cfg.verify.dims = dims;
            }
            "verify.deltas" => {
                let deltas = list(line, key, v, parse_f64)?;
                if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d < 0.25)) {
                    return Err(err(
                        line,
                        format!("verify.deltas: each delta must lie in (0, 1/4), got {d}"),
                    ));
                }
                cfg.verify.deltas = deltas;
            }
            "verify.pairs" => cfg.verify.pairs = parse_usize(line, key, v)?,
            "verify.seed" => cfg.verify.seed = parse_u64(line, key, v)?,
            "verify.decay_min" => cfg.verify.decay_min = parse_f64(line, key, v)?,
            "verify.decay_max" => cfg.verify.decay_max = parse_f64(line, key, v)?,
            _ => unreachable!("key list and match arms disagree"),
        }
    }

    let at = |keys: &[&str]| {
        keys.iter()
            .filter_map(|k| seen.get(k))
            .copied()
            .max()
            .unwrap_or(0)
    };

    cfg.medium =
        Medium::new(Complex64::new(n_re, n_im), Complex64::new(eta_re, eta_im)).map_err(|e| {
            err(
                at(&[
                    "medium.n_re",
                    "medium.n_im",
                    "medium.eta_re",
                    "medium.eta_im",
                ]),
                e.to_string(),
            )
        })?;

    cfg.geometry = match (preset.as_deref(), coeffs) {
        (None | Some("custom"), Some(c)) => GeometrySpec::Custom(c),
        (Some("custom"), None) => {
            return Err(err(
                at(&["geometry.preset"]),
                "geometry.preset = custom needs geometry.coeffs",
            ))
        }
        (Some(_), Some(_)) => {
            return Err(err(
                at(&["geometry.coeffs"]),
                "geometry.coeffs only applies to the custom preset",
            ))
        }
        (Some("disk"), None) => GeometrySpec::Disk { radius },
        (None | Some(_), None) => GeometrySpec::Star,
    };
    if seen.contains_key("geometry.radius") && !matches!(cfg.geometry, GeometrySpec::Disk { .. }) {
        return Err(err(
            at(&["geometry.radius"]),
            "geometry.radius only applies to the disk preset",
        ));
    }
    cfg.geometry.build().map_err(|e| {
        err(
            at(&["geometry.preset", "geometry.radius", "geometry.coeffs"]),
            e.to_string(),
        )
    })?;

    QuadratureRule::new(cfg.quad_radial, cfg.quad_angular)
        .map_err(|e| err(at(&["quad.radial", "quad.angular"]), e.to_string()))?;
    cfg.grid.validate().map_err(|e| {
        err(
            at(&[
                "grid.x_min",
                "grid.x_max",
                "grid.y_min",
                "grid.y_max",
                "grid.nx",
                "grid.ny",
            ]),
            e.to_string(),
        )
    })?;
    let v = &cfg.verify;
    if !(v.decay_min > 0.0 && v.decay_min <= v.decay_max && v.decay_max < 1.0) {
        return Err(err(
            at(&["verify.decay_min", "verify.decay_max"]),
            "verify decay range must satisfy 0 < decay_min <= decay_max < 1",
        ));
    }
    if cfg.filter_auto {
        if cfg.filter_kind == FilterKind::Identity {
            return Err(err(
                at(&["filter.auto", "filter.kind"]),
                "filter.auto needs a regularizing filter kind",
            ));
        }
        if !(cfg.noise_delta > 0.0 && cfg.noise_delta < 1.0) {
            return Err(err(
                at(&["filter.auto", "noise.delta"]),
                "filter.auto needs noise.delta in (0, 1); pass filter.alpha for noiseless runs",
            ));
        }
    }
    Ok(cfg)
}

impl RunConfig {
    /// Text that [`parse_config`] maps back to an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        match &self.geometry {
            GeometrySpec::Star => kv("geometry.preset", "star".into()),
            GeometrySpec::Disk { radius } => {
                kv("geometry.preset", "disk".into());
                kv("geometry.radius", radius.to_string());
            }
            GeometrySpec::Custom(c) => {
                kv("geometry.preset", "custom".into());
                kv(
                    "geometry.coeffs",
                    c.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                );
            }
        }
        kv("medium.n_re", self.medium.n.re.to_string());
        kv("medium.n_im", self.medium.n.im.to_string());
        kv("medium.eta_re", self.medium.eta.re.to_string());
        kv("medium.eta_im", self.medium.eta.im.to_string());
        kv("wave.k", self.wave.k.to_string());
        kv("wave.directions", self.wave.num_directions.to_string());
        kv("quad.radial", self.quad_radial.to_string());
        kv("quad.angular", self.quad_angular.to_string());
        kv("noise.delta", self.noise_delta.to_string());
        kv("noise.seed", self.noise_seed.to_string());
        kv("noise.norm", self.noise_norm.name().into());
        kv("filter.kind", self.filter_kind.name().into());
        kv("filter.alpha", self.filter_alpha.to_string());
        kv(
            "filter.beta",
            self.filter_beta
                .map_or_else(|| "auto".to_string(), |b| b.to_string()),
        );
        kv("filter.p", self.filter_p.to_string());
        kv("filter.auto", self.filter_auto.to_string());
        kv("spectrum.clamp_rel", self.clamp_rel.to_string());
        kv("grid.x_min", self.grid.x_min.to_string());
        kv("grid.x_max", self.grid.x_max.to_string());
        kv("grid.y_min", self.grid.y_min.to_string());
        kv("grid.y_max", self.grid.y_max.to_string());
        kv("grid.nx", self.grid.nx.to_string());
        kv("grid.ny", self.grid.ny.to_string());
        kv("output.threshold", self.output_threshold.to_string());
        let join = |xs: Vec<String>| xs.join(" ");
        kv(
            "verify.dims",
            join(self.verify.dims.iter().map(|d| d.to_string()).collect()),
        );
        kv(
            "verify.deltas",
            join(self.verify.deltas.iter().map(|d| d.to_string()).collect()),
        );
        kv("verify.pairs", self.verify.pairs.to_string());
        kv("verify.seed", self.verify.seed.to_string());
        kv("verify.decay_min", self.verify.decay_min.to_string());
        kv("verify.decay_max", self.verify.decay_max.to_string());
        s
    }

    pub fn geometry(&self) -> Result<ScattererGeometry> {
        self.geometry.build()
    }

    pub fn quadrature(&self) -> Result<QuadratureRule> {
        QuadratureRule::new(self.quad_radial, self.quad_angular)
    }

    /// The configured filter for data whose `‖F#‖₂` is `sharp_norm`.
    pub fn filter_spec(&self, sharp_norm: f64) -> Result<FilterSpec> {
        let alpha = if self.filter_auto {
            let rule = ParamRule::new(self.filter_p)?.with_operator_norm(sharp_norm);
            select_alpha(self.filter_kind, self.noise_delta, &rule)?
        } else {
            self.filter_alpha
        };
        match self.filter_kind {
            FilterKind::Identity => Ok(FilterSpec::Identity),
            FilterKind::Tikhonov => FilterSpec::tikhonov(alpha),
            FilterKind::Glsm => FilterSpec::glsm(alpha),
            FilterKind::Landweber => {
                let beta = match self.filter_beta {
                    Some(b) => b,
                    None => default_landweber_beta(sharp_norm)?,
                };
                FilterSpec::landweber(alpha, beta)
            }
        }
    }
}
