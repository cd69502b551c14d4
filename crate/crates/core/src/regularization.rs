//! Spectral regularization filters `φ_α(t)` and the a-priori rule `α(δ)`.

use std::fmt;

use crate::error::{Error, Result};

/// Default exponent of the parameter rule.
pub const DEFAULT_P: f64 = 0.125;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FilterKind {
    Tikhonov,
    Landweber,
    Glsm,
    /// `φ ≡ 1`: the unregularized Picard series.
    Identity,
}

impl FilterKind {
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Tikhonov => "tikhonov",
            FilterKind::Landweber => "landweber",
            FilterKind::Glsm => "glsm",
            FilterKind::Identity => "identity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tikhonov" => Some(FilterKind::Tikhonov),
            "landweber" => Some(FilterKind::Landweber),
            "glsm" => Some(FilterKind::Glsm),
            "identity" | "none" => Some(FilterKind::Identity),
            _ => None,
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FilterSpec {
    Tikhonov {
        alpha: f64,
    },
    /// `m = ⌈1/α⌉` steps with step size `β`.
    Landweber {
        alpha: f64,
        beta: f64,
        iterations: u64,
    },
    Glsm {
        alpha: f64,
    },
    Identity,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "alpha must be positive and finite, got {alpha}"
        )))
    }
}

impl FilterSpec {
    pub fn tikhonov(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(FilterSpec::Tikhonov { alpha })
    }

    pub fn landweber(alpha: f64, beta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        Ok(FilterSpec::Landweber {
            alpha,
            beta,
            iterations: landweber_iterations(alpha),
        })
    }

    /// Landweber with `β = 1/(2‖A‖²)`.
    pub fn landweber_for_norm(alpha: f64, operator_norm: f64) -> Result<Self> {
        Self::landweber(alpha, default_landweber_beta(operator_norm)?)
    }

    pub fn glsm(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(FilterSpec::Glsm { alpha })
    }

    pub fn kind(&self) -> FilterKind {
        match self {
            FilterSpec::Tikhonov { .. } => FilterKind::Tikhonov,
            FilterSpec::Landweber { .. } => FilterKind::Landweber,
            FilterSpec::Glsm { .. } => FilterKind::Glsm,
            FilterSpec::Identity => FilterKind::Identity,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            FilterSpec::Tikhonov { alpha } | FilterSpec::Glsm { alpha } => Some(alpha),
            FilterSpec::Landweber { alpha, .. } => Some(alpha),
            FilterSpec::Identity => None,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            FilterSpec::Landweber { beta, .. } => Some(beta),
            _ => None,
        }
    }

    /// Checks `β t_max² < 1` for Landweber; other kinds accept any spectrum.
    pub fn validate_for_spectrum(&self, t_max: f64) -> Result<()> {
        if let FilterSpec::Landweber { beta, .. } = *self {
            if beta * t_max * t_max >= 1.0 {
                return Err(Error::Domain(format!(
                    "Landweber step beta = {beta:e} violates beta * ||A||^2 < 1 for ||A|| = {t_max:e}"
                )));
            }
        }
        Ok(())
    }
}

/// `β = 1/(2‖A‖²)`.
pub fn default_landweber_beta(operator_norm: f64) -> Result<f64> {
    if !(operator_norm > 0.0 && operator_norm.is_finite()) {
        return Err(Error::Domain(format!(
            "operator norm must be positive, got {operator_norm}"
        )));
    }
    Ok(1.0 / (2.0 * operator_norm * operator_norm))
}

/// Evaluates `φ_α(t)`.
pub fn filter_value(spec: &FilterSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "filter argument must be finite and >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(match *spec {
        FilterSpec::Tikhonov { alpha } => t * t / (t * t + alpha),
        FilterSpec::Landweber {
            beta, iterations, ..
        } => {
            let x = beta * t * t;
            if x >= 1.0 {
                return Err(Error::Domain(format!(
                    "Landweber filter needs beta * t^2 < 1, got {x}"
                )));
            }
            1.0 - (1.0 - x).powf(iterations as f64)
        }
        FilterSpec::Glsm { alpha } => t / (alpha + t),
        FilterSpec::Identity => 1.0,
    })
}

/// `(C_reg, C_α)` with `φ_α ≤ C_reg` and `φ_α(t) ≤ C_α t`.
///
/// For Landweber the constant is `√(β m)`, which is `√(β/α)` when `α = 1/m`.
pub fn filter_constants(spec: &FilterSpec) -> Result<(f64, f64)> {
    let c_alpha = match *spec {
        FilterSpec::Tikhonov { alpha } => 1.0 / (2.0 * alpha.sqrt()),
        FilterSpec::Landweber {
            beta, iterations, ..
        } => (beta * iterations as f64).sqrt(),
        FilterSpec::Glsm { alpha } => 1.0 / alpha,
        FilterSpec::Identity => return Err(Error::NoBound),
    };
    Ok((1.0, c_alpha))
}

/// Exponent `p` and, for Landweber, `‖F#^δ‖₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamRule {
    pub p: f64,
    pub operator_norm: Option<f64>,
}

impl ParamRule {
    pub fn new(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self {
            p,
            operator_norm: None,
        })
    }

    pub fn with_operator_norm(mut self, norm: f64) -> Self {
        self.operator_norm = Some(norm);
        self
    }
}

impl Default for ParamRule {
    fn default() -> Self {
        Self {
            p: DEFAULT_P,
            operator_norm: None,
        }
    }
}

pub fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 0.25 {
        Ok(())
    } else {
        Err(Error::Domain(format!("p must lie in (0, 1/4), got {p}")))
    }
}

/// Solves `C_α² δ^{1/4} = δ^p` for α.
pub fn select_alpha(kind: FilterKind, delta: f64, rule: &ParamRule) -> Result<f64> {
    check_p(rule.p)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let e = 0.25 - rule.p;
    match kind {
        FilterKind::Tikhonov => Ok(0.25 * delta.powf(e)),
        FilterKind::Landweber => {
            let norm = rule.operator_norm.ok_or_else(|| {
                Error::Argument("the Landweber rule needs the operator norm".into())
            })?;
            Ok(delta.powf(e) * default_landweber_beta(norm)?)
        }
        FilterKind::Glsm => Ok(delta.powf(0.5 * e)),
        FilterKind::Identity => Err(Error::Argument(
            "the identity filter has no regularization parameter".into(),
        )),
    }
}

/// `m = ⌈1/α⌉`, at least 1.
pub fn landweber_iterations(alpha: f64) -> u64 {
    ((1.0 / alpha).ceil() as u64).max(1)
}
