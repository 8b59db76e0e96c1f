//! Marginal screening and EBIC-guided forward selection.

use alloc::vec;
use alloc::vec::Vec;

use crate::ebic::{ebic_value, GammaSpec};
use crate::error::{Error, Result};
use crate::glm_fit::{fit_columns, Dataset, FitOptions, FitResult, ModelIndex};
use crate::links::LinkFamily;

/// Result of marginal-estimator screening.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenResult {
    /// Feature indices by decreasing statistic; ties go to the lower index.
    pub ranked: Vec<usize>,
    /// `|slope|` of the one-covariate fit, per feature; `-inf` when the fit
    /// failed.
    pub statistics: Vec<f64>,
    /// The first `d` entries of `ranked`.
    pub keep: Vec<usize>,
}

/// Ranks every feature by the magnitude of its slope in the intercept plus
/// single-covariate model and keeps the top `d`.
pub fn screen_mme(lf: &LinkFamily, data: &Dataset, d: usize) -> Result<ScreenResult> {
    if d == 0 {
        return Err(Error::InvalidArgs(
            "screening must keep at least one feature".into(),
        ));
    }
    let options = FitOptions::default();
    let null = fit_columns(lf, data, &[], true, &options, None).ok();
    let warm = null.map(|f| FitOptions {
        init: Some(vec![f.beta[0], 0.0]),
        ..FitOptions::default()
    });
    let opts = warm.as_ref().unwrap_or(&options);
    let statistics: Vec<f64> = (0..data.p())
        .map(|j| match fit_columns(lf, data, &[j], true, opts, None) {
            Ok(fit) if fit.beta[1].is_finite() => fit.beta[1].abs(),
            _ => f64::NEG_INFINITY,
        })
        .collect();
    let mut ranked: Vec<usize> = (0..data.p()).collect();
    ranked.sort_by(|&a, &b| statistics[b].total_cmp(&statistics[a]).then(a.cmp(&b)));
    let keep = ranked[..d.min(ranked.len())].to_vec();
    Ok(ScreenResult {
        ranked,
        statistics,
        keep,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathStep {
    pub feature: usize,
    pub fit: FitResult,
    /// EBIC of the model after this step, one per requested `γ`.
    pub ebic: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxSteps,
    /// The model reached `n − 2` covariates.
    SampleSize,
    /// No remaining candidate produced a converged fit.
    NoConvergedFit,
    CandidatesExhausted,
}

/// One greedy path with per-`γ` read-outs.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionPath {
    pub gammas: Vec<f64>,
    /// Index into `gammas` of the criterion used to pick each step.
    pub path_gamma: usize,
    pub null_fit: FitResult,
    pub null_ebic: Vec<f64>,
    pub steps: Vec<PathStep>,
    /// For each `γ`, the prefix length minimizing EBIC (0 is the
    /// intercept-only model; ties go to the shorter prefix).
    pub final_prefix: Vec<usize>,
    pub stop: StopReason,
}

impl SelectionPath {
    /// Features in the order they were added.
    pub fn features(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.feature).collect()
    }

    /// EBIC of prefix `len` under `γ` number `g`.
    pub fn prefix_ebic(&self, g: usize, len: usize) -> f64 {
        if len == 0 {
            self.null_ebic[g]
        } else {
            self.steps[len - 1].ebic[g]
        }
    }

    pub fn prefix_fit(&self, len: usize) -> &FitResult {
        if len == 0 {
            &self.null_fit
        } else {
            &self.steps[len - 1].fit
        }
    }

    pub fn prefix_model(&self, len: usize) -> ModelIndex {
        self.steps[..len].iter().map(|s| s.feature).collect()
    }

    /// The selected model for `γ` number `g`.
    pub fn final_model(&self, g: usize) -> ModelIndex {
        self.prefix_model(self.final_prefix[g])
    }
}

/// Greedy forward selection.
///
/// Each step fits every remaining candidate jointly with the current model
/// and appends the one with the smallest EBIC under `gammas[0]`; exact ties
/// go to the lower feature index. Only converged, non-separated fits are
/// eligible. Every `γ` is then read out on the same path.
pub fn forward_select(
    lf: &LinkFamily,
    data: &Dataset,
    candidates: &[usize],
    gammas: &[f64],
    max_steps: usize,
) -> Result<SelectionPath> {
    forward_select_by(lf, data, candidates, gammas, 0, max_steps, false)
}

/// [`forward_select`] with the step criterion taken from `gammas[path_gamma]`.
///
/// With `allow_separated`, fits stopped at the coefficient cap are eligible
/// too and compete on the log-likelihood reached at the cap. Small samples
/// with many features separate after a few steps, and a long path then
/// requires this.
pub fn forward_select_by(
    lf: &LinkFamily,
    data: &Dataset,
    candidates: &[usize],
    gammas: &[f64],
    path_gamma: usize,
    max_steps: usize,
    allow_separated: bool,
) -> Result<SelectionPath> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if gammas.is_empty() || path_gamma >= gammas.len() {
        return Err(Error::InvalidArgs("need at least one gamma".into()));
    }
    if max_steps == 0 {
        return Err(Error::InvalidArgs("max_steps must be at least 1".into()));
    }
    if let Some(&j) = candidates.iter().find(|&&j| j >= data.p()) {
        return Err(Error::InvalidArgs(alloc::format!(
            "candidate {j} out of range"
        )));
    }
    let (n, p) = (data.n(), data.p());
    let ebics = |ll: f64, size: usize| -> Result<Vec<f64>> {
        gammas
            .iter()
            .map(|&g| ebic_value(ll, size, n, p, g).map(|v| v.2))
            .collect()
    };

    let null_fit = fit_columns(lf, data, &[], true, &FitOptions::default(), None)?;
    let null_ebic = ebics(null_fit.log_lik, 0)?;

    let mut remaining: Vec<usize> = candidates.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let mut current: Vec<usize> = Vec::new();
    let mut beta = null_fit.beta.clone();
    let mut steps: Vec<PathStep> = Vec::new();
    let path_g = gammas[path_gamma];
    let max_size = n.saturating_sub(2);

    let stop = loop {
        if steps.len() >= max_steps {
            break StopReason::MaxSteps;
        }
        if current.len() >= max_size {
            break StopReason::SampleSize;
        }
        if remaining.is_empty() {
            break StopReason::CandidatesExhausted;
        }
        let mut init = beta.clone();
        init.push(0.0);
        let options = FitOptions {
            init: Some(init),
            ..FitOptions::default()
        };
        let mut cols = current.clone();
        cols.push(0);
        let size = cols.len();
        let mut best: Option<(f64, usize, FitResult)> = None;
        for (pos, &c) in remaining.iter().enumerate() {
            *cols.last_mut().unwrap() = c;
            let Ok(fit) = fit_columns(lf, data, &cols, true, &options, None) else {
                continue;
            };
            if !(fit.is_usable() || (allow_separated && fit.separated)) {
                continue;
            }
            let score = ebic_value(fit.log_lik, size, n, p, path_g)?.2;
            if best.as_ref().is_none_or(|(b, _, _)| score < *b) {
                best = Some((score, pos, fit));
            }
        }
        let Some((_, pos, fit)) = best else {
            if steps.is_empty() {
                return Err(Error::PathEmpty);
            }
            break StopReason::NoConvergedFit;
        };
        let feature = remaining.remove(pos);
        current.push(feature);
        beta = fit.beta.clone();
        let ebic = ebics(fit.log_lik, current.len())?;
        steps.push(PathStep { feature, fit, ebic });
    };

    let mut path = SelectionPath {
        gammas: gammas.to_vec(),
        path_gamma,
        null_fit,
        null_ebic,
        steps,
        final_prefix: Vec::new(),
        stop,
    };
    path.final_prefix = (0..gammas.len())
        .map(|g| {
            let mut best = 0;
            for len in 1..=path.steps.len() {
                if path.prefix_ebic(g, len) < path.prefix_ebic(g, best) {
                    best = len;
                }
            }
            best
        })
        .collect();
    Ok(path)
}

/// Configuration of the screening + forward-selection pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectConfig {
    pub gammas: Vec<GammaSpec>,
    /// Upper bound on forward steps.
    pub max_steps: usize,
    /// Screening runs only when `p` exceeds this.
    pub screen_threshold: usize,
    pub screen_keep: usize,
    /// With a known true-model size `p0`, the path length is capped at
    /// `⌈k · p0⌉`.
    pub k_multiplier: f64,
    /// Build one path per `γ` instead of one shared path.
    pub path_per_gamma: bool,
    /// Let fits stopped at the coefficient cap enter the path.
    pub allow_separated: bool,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig {
            gammas: GammaSpec::standard_grid().to_vec(),
            max_steps: 50,
            screen_threshold: 1000,
            screen_keep: 400,
            k_multiplier: 3.0,
            path_per_gamma: false,
            allow_separated: false,
        }
    }
}

impl SelectConfig {
    /// `min(⌈k · p0⌉, n − 2, max_steps)`; without `p0` only the last two
    /// bounds apply.
    pub fn steps_for(&self, n: usize, true_size: Option<usize>) -> usize {
        let mut steps = self.max_steps.min(n.saturating_sub(2));
        if let Some(p0) = true_size {
            let k = libm::ceil(self.k_multiplier * p0 as f64) as usize;
            steps = steps.min(k);
        }
        steps.max(1)
    }
}

/// Final model for one `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalModel {
    pub gamma: GammaSpec,
    pub gamma_value: f64,
    /// Features in path order.
    pub features: Vec<usize>,
    pub ebic: f64,
    pub log_lik: f64,
}

impl FinalModel {
    pub fn model(&self) -> ModelIndex {
        self.features.iter().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub screen: Option<ScreenResult>,
    /// One shared path, or one per `γ` when `path_per_gamma` is set.
    pub paths: Vec<SelectionPath>,
    pub finals: Vec<FinalModel>,
}

impl SelectionReport {
    /// The shared path (the first path when paths are per `γ`).
    pub fn path(&self) -> &SelectionPath {
        &self.paths[0]
    }
}

/// Screens when `p` exceeds the threshold, then runs forward selection.
pub fn select_pipeline(
    lf: &LinkFamily,
    data: &Dataset,
    config: &SelectConfig,
    true_size: Option<usize>,
) -> Result<SelectionReport> {
    if config.gammas.is_empty() {
        return Err(Error::InvalidArgs("no gamma values configured".into()));
    }
    let (n, p) = (data.n(), data.p());
    let gammas: Vec<f64> = config
        .gammas
        .iter()
        .map(|g| g.resolve(n, p))
        .collect::<Result<_>>()?;
    let screen = if p > config.screen_threshold {
        Some(screen_mme(lf, data, config.screen_keep)?)
    } else {
        None
    };
    let candidates: Vec<usize> = match &screen {
        Some(s) => s.keep.clone(),
        None => (0..p).collect(),
    };
    let steps = config.steps_for(n, true_size);

    let paths: Vec<SelectionPath> = if config.path_per_gamma {
        (0..gammas.len())
            .map(|g| {
                forward_select_by(
                    lf,
                    data,
                    &candidates,
                    &gammas,
                    g,
                    steps,
                    config.allow_separated,
                )
            })
            .collect::<Result<_>>()?
    } else {
        vec![forward_select_by(
            lf,
            data,
            &candidates,
            &gammas,
            0,
            steps,
            config.allow_separated,
        )?]
    };
    let finals = config
        .gammas
        .iter()
        .enumerate()
        .map(|(g, spec)| {
            let path = if config.path_per_gamma {
                &paths[g]
            } else {
                &paths[0]
            };
            let len = path.final_prefix[g];
            FinalModel {
                gamma: *spec,
                gamma_value: gammas[g],
                features: path.steps[..len].iter().map(|s| s.feature).collect(),
                ebic: path.prefix_ebic(g, len),
                log_lik: path.prefix_fit(len).log_lik,
            }
        })
        .collect();
    Ok(SelectionReport {
        screen,
        paths,
        finals,
    })
}
