//! Parallel drivers. Work items are keyed by replicate, link and fold ids
//! and collected in key order, so results do not depend on the number of
//! worker threads.

use rayon::prelude::*;

use ebicsel_core::experiments::{
    cv_assemble, cv_fold_score, link_selection, run_replicate, stratified_folds, summarize,
    CvConfig, CvLinkReport, ExperimentSummary, FinalReport, LinkSelection, ReplicateOutcome,
    WorkflowConfig,
};
use ebicsel_core::glm_fit::Dataset;
use ebicsel_core::select::SelectConfig;
use ebicsel_core::simgen::SimDesign;
use ebicsel_core::{Error as CoreError, LinkFamily};

use crate::error::{AppError, AppResult};

/// Environment variable read when `--threads` is not given.
pub const THREADS_ENV: &str = "EBICSEL_THREADS";

/// The flag wins over the environment; `None` leaves the choice to rayon.
pub fn resolve_threads(flag: Option<usize>) -> AppResult<Option<usize>> {
    if let Some(t) = flag {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| AppError::Usage(format!("{THREADS_ENV}={v} is not a thread count"))),
        _ => Ok(None),
    }
}

pub fn thread_pool(threads: Option<usize>) -> AppResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    builder
        .build()
        .map_err(|e| AppError::Usage(format!("cannot start worker threads: {e}")))
}

pub type ReplicateResults = Vec<(u64, Result<ReplicateOutcome, CoreError>)>;

/// Runs replicates `0..replicates` of a design and summarizes them.
pub fn run_batch(
    pool: &rayon::ThreadPool,
    lf: &LinkFamily,
    design: &SimDesign,
    replicates: u64,
    config: &SelectConfig,
    seed: u64,
) -> AppResult<(ExperimentSummary, ReplicateResults)> {
    if replicates == 0 {
        return Err(AppError::Usage("need at least one replicate".into()));
    }
    design.validate()?;
    let outcomes: ReplicateResults = pool.install(|| {
        (0..replicates)
            .into_par_iter()
            .map(|r| (r, run_replicate(lf, design, config, seed, r)))
            .collect()
    });
    let summary = summarize(design, config, &outcomes)?;
    Ok((summary, outcomes))
}

/// Cross-validated link comparison with every (link, fold) pair run as a
/// separate task.
pub fn cv_links(
    pool: &rayon::ThreadPool,
    data: &Dataset,
    links: &[LinkFamily],
    config: &CvConfig,
) -> AppResult<CvLinkReport> {
    if links.is_empty() {
        return Err(AppError::Usage("no links to compare".into()));
    }
    for lf in links {
        data.validate_for(lf.family())?;
    }
    let assignment = stratified_folds(data.y(), config.folds, config.seed)?;
    let jobs: Vec<(usize, usize)> = (0..links.len())
        .flat_map(|l| (0..config.folds).map(move |f| (l, f)))
        .collect();
    let scores: Vec<f64> = pool.install(|| {
        jobs.par_iter()
            .map(|&(l, f)| cv_fold_score(&links[l], data, &assignment, f, config))
            .collect::<Result<Vec<f64>, CoreError>>()
    })?;
    let fold_scores = scores.chunks(config.folds).map(<[f64]>::to_vec).collect();
    Ok(cv_assemble(links, fold_scores, config.folds, assignment))
}

/// Per-link paths and final selections, plus the cross-validated choice.
pub fn workflow(
    pool: &rayon::ThreadPool,
    data: &Dataset,
    links: &[LinkFamily],
    config: &WorkflowConfig,
) -> AppResult<FinalReport> {
    let cv = cv_links(pool, data, links, &config.cv)?;
    let per_link: Vec<LinkSelection> = pool.install(|| {
        links
            .par_iter()
            .map(|lf| link_selection(lf, data, config))
            .collect::<Result<Vec<_>, CoreError>>()
    })?;
    Ok(FinalReport { per_link, cv })
}
