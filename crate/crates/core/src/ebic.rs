//! Extended BIC: `EBIC_γ(s) = −2 l(β̂_s) + |s| ln n + 2γ ln C(p, |s|)`.
//!
//! The intercept is fitted in every model but never counted in `|s|`.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::glm_fit::{FitResult, ModelIndex};
use crate::special;

/// `ln C(p, k)`.
pub fn log_choose(p: usize, k: usize) -> Result<f64> {
    special::ln_choose(p as u64, k as u64)
        .ok_or_else(|| Error::InvalidArgs(format!("cannot choose {k} of {p}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelScore {
    pub model: ModelIndex,
    pub log_lik: f64,
    /// `|s| ln n`
    pub size_penalty: f64,
    /// `2γ ln C(p, |s|)`
    pub prior_penalty: f64,
    pub ebic: f64,
    pub gamma: f64,
}

/// Scores a fitted model.
pub fn ebic_score(
    fit: &FitResult,
    model: &ModelIndex,
    n: usize,
    p: usize,
    gamma: f64,
) -> Result<ModelScore> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgs(format!(
            "gamma must be non-negative, got {gamma}"
        )));
    }
    let (size_penalty, prior_penalty, ebic) = ebic_value(fit.log_lik, model.len(), n, p, gamma)?;
    Ok(ModelScore {
        model: model.clone(),
        log_lik: fit.log_lik,
        size_penalty,
        prior_penalty,
        ebic,
        gamma,
    })
}

/// `(size penalty, prior penalty, EBIC)` for a log-likelihood and model size.
pub fn ebic_value(
    log_lik: f64,
    size: usize,
    n: usize,
    p: usize,
    gamma: f64,
) -> Result<(f64, f64, f64)> {
    let size_penalty = size as f64 * libm::log(n as f64);
    let prior_penalty = 2.0 * gamma * log_choose(p, size)?;
    Ok((
        size_penalty,
        prior_penalty,
        -2.0 * log_lik + size_penalty + prior_penalty,
    ))
}

/// The four reference values of `γ` and the consistency boundary
/// `1 − ln n / (2 ln p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaGrid {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub boundary: f64,
}

impl GammaGrid {
    pub fn as_array(&self) -> [f64; 4] {
        [self.gamma1, self.gamma2, self.gamma3, self.gamma4]
    }
}

/// Builds the grid for sample size `n` and `p` candidate covariates. Values
/// are clamped below at zero.
pub fn gamma_grid(n: usize, p: usize) -> Result<GammaGrid> {
    if p <= 1 {
        return Err(Error::InvalidArgs(format!(
            "gamma grid needs p > 1, got {p}"
        )));
    }
    if n <= 1 {
        return Err(Error::InvalidArgs(format!(
            "gamma grid needs n > 1, got {n}"
        )));
    }
    let ratio = libm::log(n as f64) / libm::log(p as f64);
    let boundary = 1.0 - ratio / 2.0;
    Ok(GammaGrid {
        gamma1: 0.0,
        gamma2: (0.5 * boundary).max(0.0),
        gamma3: (1.0 - ratio / 4.0).max(0.0),
        gamma4: 1.0,
        boundary: boundary.max(0.0),
    })
}

/// Named `γ` values that depend on `(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GammaPreset {
    /// `γ = 0`
    Bic,
    Gamma2,
    Gamma3,
    /// `γ = 1`
    Mbic,
    /// `1 − ln n / (3 ln p)`, just above the boundary.
    Final,
    Boundary,
}

impl GammaPreset {
    pub fn name(self) -> &'static str {
        match self {
            GammaPreset::Bic => "bic",
            GammaPreset::Gamma2 => "gamma2",
            GammaPreset::Gamma3 => "gamma3",
            GammaPreset::Mbic => "mbic",
            GammaPreset::Final => "final",
            GammaPreset::Boundary => "boundary",
        }
    }

    pub fn resolve(self, n: usize, p: usize) -> Result<f64> {
        let grid = gamma_grid(n, p)?;
        Ok(match self {
            GammaPreset::Bic => grid.gamma1,
            GammaPreset::Gamma2 => grid.gamma2,
            GammaPreset::Gamma3 => grid.gamma3,
            GammaPreset::Mbic => grid.gamma4,
            GammaPreset::Boundary => grid.boundary,
            GammaPreset::Final => {
                (1.0 - libm::log(n as f64) / (3.0 * libm::log(p as f64))).max(0.0)
            }
        })
    }
}

/// A `γ` given either as a number or as a preset name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaSpec {
    Value(f64),
    Preset(GammaPreset),
}

impl GammaSpec {
    pub fn resolve(self, n: usize, p: usize) -> Result<f64> {
        match self {
            GammaSpec::Value(v) => Ok(v),
            GammaSpec::Preset(preset) => preset.resolve(n, p),
        }
    }

    /// Label used in output tables.
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// `[bic, gamma2, gamma3, mbic]`.
    pub fn standard_grid() -> [GammaSpec; 4] {
        [
            GammaSpec::Preset(GammaPreset::Bic),
            GammaSpec::Preset(GammaPreset::Gamma2),
            GammaSpec::Preset(GammaPreset::Gamma3),
            GammaSpec::Preset(GammaPreset::Mbic),
        ]
    }
}

impl fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaSpec::Value(v) => write!(f, "{v}"),
            GammaSpec::Preset(p) => f.write_str(p.name()),
        }
    }
}

impl FromStr for GammaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let preset = match s {
            "bic" | "gamma1" => GammaPreset::Bic,
            "gamma2" => GammaPreset::Gamma2,
            "gamma3" => GammaPreset::Gamma3,
            "mbic" | "gamma4" => GammaPreset::Mbic,
            "final" => GammaPreset::Final,
            "boundary" => GammaPreset::Boundary,
            other => {
                return match other.parse::<f64>() {
                    Ok(v) if v >= 0.0 && v.is_finite() => Ok(GammaSpec::Value(v)),
                    _ => Err(Error::UnknownName(other.to_string())),
                }
            }
        };
        Ok(GammaSpec::Preset(preset))
    }
}
