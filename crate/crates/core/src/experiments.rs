//! Replicate batches with PDR/FDR summaries, cross-validated link choice and
//! the real-data selection workflow.
//!
//! Everything here is sequential and deterministic; the `ebicsel` crate runs
//! the same per-replicate and per-fold units in parallel and aggregates them
//! in id order, which gives identical output.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::ebic::{GammaPreset, GammaSpec};
use crate::error::{Error, Result};
use crate::glm_fit::{Dataset, ModelIndex};
use crate::links::LinkFamily;
use crate::select::{select_pipeline, SelectConfig, SelectionReport};
use crate::simgen::{generate_replicate_stream, replicate_rng, SimDesign, TrueModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdrFdr {
    pub pdr: f64,
    pub fdr: f64,
}

/// `PDR = |s* ∩ s0| / |s0|`, `FDR = |s* \ s0| / |s*|` (0 for empty `s*`).
pub fn pdr_fdr(selected: &ModelIndex, truth: &TrueModel) -> PdrFdr {
    let true_set: BTreeSet<usize> = truth.support.iter().copied().collect();
    let hits = selected
        .indices()
        .iter()
        .filter(|j| true_set.contains(j))
        .count();
    let pdr = if true_set.is_empty() {
        0.0
    } else {
        hits as f64 / true_set.len() as f64
    };
    let fdr = if selected.is_empty() {
        0.0
    } else {
        (selected.len() - hits) as f64 / selected.len() as f64
    };
    PdrFdr { pdr, fdr }
}

/// Per-replicate result: one PDR/FDR pair and one selected set per `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    pub replicate: u64,
    pub rates: Vec<PdrFdr>,
    pub selected: Vec<Vec<usize>>,
    pub path: Vec<usize>,
}

/// Generates replicate `replicate` of the batch seeded by `seed`, then
/// screens, selects, and scores each `γ` read-out against the truth.
pub fn run_replicate(
    lf: &LinkFamily,
    design: &SimDesign,
    config: &SelectConfig,
    seed: u64,
    replicate: u64,
) -> Result<ReplicateOutcome> {
    let rep = generate_replicate_stream(design, seed, replicate)?;
    let report = select_pipeline(lf, &rep.dataset, config, Some(rep.truth.len()))?;
    Ok(outcome_from_report(replicate, &report, &rep.truth))
}

fn outcome_from_report(
    replicate: u64,
    report: &SelectionReport,
    truth: &TrueModel,
) -> ReplicateOutcome {
    let rates = report
        .finals
        .iter()
        .map(|f| pdr_fdr(&f.model(), truth))
        .collect();
    let selected = report
        .finals
        .iter()
        .map(|f| f.model().indices().to_vec())
        .collect();
    ReplicateOutcome {
        replicate,
        rates,
        selected,
        path: report.path().features(),
    }
}

/// One table cell: a `γ` at a fixed design.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCell {
    pub gamma: GammaSpec,
    pub gamma_value: f64,
    pub mean_pdr: f64,
    pub mean_fdr: f64,
    /// Sample standard deviation of replicate PDRs; `None` with one replicate.
    pub se_pdr: Option<f64>,
    pub se_fdr: Option<f64>,
    pub replicates: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub design: SimDesign,
    pub cells: Vec<SummaryCell>,
    /// Ids of replicates whose pipeline failed.
    pub failed_replicates: Vec<u64>,
}

fn mean_and_sd(values: &[f64]) -> (f64, Option<f64>) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, None);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return (mean, None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, Some(libm::sqrt(ss / (k - 1) as f64)))
}

/// Aggregates replicate results (in the order given) into table cells.
pub fn summarize(
    design: &SimDesign,
    config: &SelectConfig,
    outcomes: &[(u64, Result<ReplicateOutcome>)],
) -> Result<ExperimentSummary> {
    let ok: Vec<&ReplicateOutcome> = outcomes
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .collect();
    let failed_replicates: Vec<u64> = outcomes
        .iter()
        .filter(|(_, r)| r.is_err())
        .map(|(id, _)| *id)
        .collect();
    let cells = config
        .gammas
        .iter()
        .enumerate()
        .map(|(g, spec)| {
            let pdrs: Vec<f64> = ok.iter().map(|o| o.rates[g].pdr).collect();
            let fdrs: Vec<f64> = ok.iter().map(|o| o.rates[g].fdr).collect();
            let (mean_pdr, se_pdr) = mean_and_sd(&pdrs);
            let (mean_fdr, se_fdr) = mean_and_sd(&fdrs);
            Ok(SummaryCell {
                gamma: *spec,
                gamma_value: spec.resolve(design.n, design.pn)?,
                mean_pdr,
                mean_fdr,
                se_pdr,
                se_fdr,
                replicates: ok.len(),
                failed: failed_replicates.len(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentSummary {
        design: design.clone(),
        cells,
        failed_replicates,
    })
}

/// Runs replicates `0..replicates` sequentially and summarizes them.
pub fn run_simulation_batch(
    lf: &LinkFamily,
    design: &SimDesign,
    replicates: u64,
    config: &SelectConfig,
    seed: u64,
) -> Result<ExperimentSummary> {
    if replicates == 0 {
        return Err(Error::InvalidArgs("need at least one replicate".into()));
    }
    let outcomes: Vec<_> = (0..replicates)
        .map(|r| (r, run_replicate(lf, design, config, seed, r)))
        .collect();
    summarize(design, config, &outcomes)
}

/// Fold id per observation. Observations are shuffled within each response
/// class and dealt round-robin, so class proportions match across folds.
pub fn stratified_folds(y: &[f64], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidArgs("need at least two folds".into()));
    }
    if folds > y.len() {
        return Err(Error::FoldTooSmall { folds, n: y.len() });
    }
    let mut classes: Vec<f64> = y.to_vec();
    classes.sort_by(f64::total_cmp);
    classes.dedup();
    let mut rng = replicate_rng(seed, u64::MAX);
    let mut assignment = vec![0; y.len()];
    let mut next = 0;
    for class in classes {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

/// Settings for the cross-validated link comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    /// Forward-path length on each training fold.
    pub path_length: usize,
    /// Criterion used to pick the model on each training fold.
    pub gamma: GammaSpec,
    pub seed: u64,
    /// Screening and separation settings are taken from here; gammas and
    /// max steps are overridden. The default admits separated fits.
    pub select: SelectConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 8,
            path_length: 10,
            gamma: GammaSpec::Preset(GammaPreset::Final),
            seed: 0,
            select: SelectConfig {
                allow_separated: true,
                ..SelectConfig::default()
            },
        }
    }
}

impl CvConfig {
    fn fold_select_config(&self) -> SelectConfig {
        SelectConfig {
            gammas: vec![self.gamma],
            max_steps: self.path_length,
            ..self.select.clone()
        }
    }
}

/// Held-out log-likelihood of one fold for one link: the model is selected
/// (and fitted) on the training rows and scored on the held-out rows.
pub fn cv_fold_score(
    lf: &LinkFamily,
    data: &Dataset,
    assignment: &[usize],
    fold: usize,
    config: &CvConfig,
) -> Result<f64> {
    let train: Vec<usize> = (0..data.n()).filter(|&i| assignment[i] != fold).collect();
    let test: Vec<usize> = (0..data.n()).filter(|&i| assignment[i] == fold).collect();
    if train.len() < 3 || test.is_empty() {
        return Err(Error::FoldTooSmall {
            folds: config.folds,
            n: data.n(),
        });
    }
    let train_data = data.subset_rows(&train)?;
    let report = select_pipeline(lf, &train_data, &config.fold_select_config(), None)?;
    let path = report.path();
    let len = path.final_prefix[0];
    let fit = path.prefix_fit(len);
    let features = &path.features()[..len];
    let mut total = 0.0;
    for &i in &test {
        let eta = fit.beta[0]
            + features
                .iter()
                .zip(&fit.beta[1..])
                .map(|(&j, b)| b * data.get(i, j))
                .sum::<f64>();
        match lf.log_density(data.y()[i], eta) {
            Ok(v) => total += v,
            Err(_) => return Ok(f64::NEG_INFINITY),
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvLinkReport {
    pub links: Vec<LinkFamily>,
    /// Summed held-out log-likelihood per link.
    pub criterion: Vec<f64>,
    /// Per link, per fold.
    pub fold_scores: Vec<Vec<f64>>,
    pub chosen: usize,
    pub folds: usize,
    pub assignment: Vec<usize>,
}

impl CvLinkReport {
    pub fn chosen_link(&self) -> &LinkFamily {
        &self.links[self.chosen]
    }
}

/// Assembles a report from per-link, per-fold scores; the best summed score
/// wins, ties go to the earlier link.
pub fn cv_assemble(
    links: &[LinkFamily],
    fold_scores: Vec<Vec<f64>>,
    folds: usize,
    assignment: Vec<usize>,
) -> CvLinkReport {
    let criterion: Vec<f64> = fold_scores.iter().map(|s| s.iter().sum()).collect();
    let mut chosen = 0;
    for (k, &c) in criterion.iter().enumerate() {
        if c > criterion[chosen] {
            chosen = k;
        }
    }
    CvLinkReport {
        links: links.to_vec(),
        criterion,
        fold_scores,
        chosen,
        folds,
        assignment,
    }
}

/// K-fold comparison of links by held-out log-likelihood.
pub fn cv_select_link(
    data: &Dataset,
    links: &[LinkFamily],
    config: &CvConfig,
) -> Result<CvLinkReport> {
    if links.is_empty() {
        return Err(Error::InvalidArgs("no links to compare".into()));
    }
    let assignment = stratified_folds(data.y(), config.folds, config.seed)?;
    let scores = links
        .iter()
        .map(|lf| {
            (0..config.folds)
                .map(|fold| cv_fold_score(lf, data, &assignment, fold, config))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(cv_assemble(links, scores, config.folds, assignment))
}

/// Per-link output of the real-data workflow.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSelection {
    pub link: LinkFamily,
    /// Features in the order the forward path added them.
    pub path: Vec<usize>,
    pub gamma_value: f64,
    /// Final selection in path order.
    pub selected: Vec<usize>,
    pub max_log_lik: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinalReport {
    pub per_link: Vec<LinkSelection>,
    pub cv: CvLinkReport,
}

impl FinalReport {
    pub fn chosen(&self) -> &LinkSelection {
        &self.per_link[self.cv.chosen]
    }
}

/// Settings for [`real_data_workflow`].
#[derive(Debug, Clone, PartialEq)]
pub struct WorkflowConfig {
    /// Length of the per-link forward path.
    pub path_length: usize,
    /// Criterion for the final selection on each path.
    pub final_gamma: GammaSpec,
    pub cv: CvConfig,
}

impl Default for WorkflowConfig {
    fn default() -> Self {
        WorkflowConfig {
            path_length: 50,
            final_gamma: GammaSpec::Preset(GammaPreset::Final),
            cv: CvConfig::default(),
        }
    }
}

/// Full-data path and final selection for one link.
pub fn link_selection(
    lf: &LinkFamily,
    data: &Dataset,
    config: &WorkflowConfig,
) -> Result<LinkSelection> {
    let select = SelectConfig {
        gammas: vec![config.final_gamma],
        max_steps: config.path_length,
        ..config.cv.select.clone()
    };
    let report = select_pipeline(lf, data, &select, None)?;
    let fin = &report.finals[0];
    Ok(LinkSelection {
        link: *lf,
        path: report.path().features(),
        gamma_value: fin.gamma_value,
        selected: fin.features.clone(),
        max_log_lik: fin.log_lik,
    })
}

/// Per-link paths, cross-validated link choice, and final EBIC selection
/// for every link.
pub fn real_data_workflow(
    data: &Dataset,
    links: &[LinkFamily],
    config: &WorkflowConfig,
) -> Result<FinalReport> {
    for lf in links {
        data.validate_for(lf.family())?;
    }
    let per_link = links
        .iter()
        .map(|lf| link_selection(lf, data, config))
        .collect::<Result<Vec<_>>>()?;
    let cv = cv_select_link(data, links, &config.cv)?;
    Ok(FinalReport { per_link, cv })
}

/// Human-readable name of a link family for tables.
pub fn link_label(lf: &LinkFamily) -> String {
    lf.link().name()
}
