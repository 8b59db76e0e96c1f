//! Likelihood, score and Hessian of a GLM under an arbitrary supported link,
//! and the maximum-likelihood fitter.
//!
//! For a model `s` with linear predictor `η_i = x_iᵀβ`:
//!
//! ```text
//! l(β)  = Σ y_i h(η_i) − b(h(η_i))
//! s(β)  = Σ (y_i − μ_i) h′(η_i) x_i
//! H1(β) = Σ σ_i² h′(η_i)² x_i x_iᵀ
//! H0(β) = Σ (y_i − μ_i) h″(η_i) x_i x_iᵀ
//! ```
//!
//! and the negative Hessian of `l` is `H1 − H0`. Under a canonical link
//! `h″ ≡ 0`, so `H0` vanishes.
//!
//! Coefficient vectors are laid out intercept first (when present), then one
//! entry per model column in the order the columns were given.

mod dataset;
pub mod diagnostics;

use alloc::vec;
use alloc::vec::Vec;

pub use dataset::{Dataset, ModelIndex};
pub use diagnostics::{c6_diagnostics, DiagnosticReport};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::links::LinkFamily;

/// Knobs for [`fit_mle`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Convergence threshold on the sup-norm of the score.
    pub tol: f64,
    pub max_iter: usize,
    /// A fit whose coefficients exceed this in absolute value is stopped and
    /// flagged as (quasi-)separated.
    pub beta_cap: f64,
    pub max_halvings: usize,
    /// Starting coefficients; when absent (or inadmissible) the intercept
    /// starts at `g(ȳ)` and every slope at zero.
    pub init: Option<Vec<f64>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-8,
            max_iter: 100,
            beta_cap: 30.0,
            max_halvings: 30,
            init: None,
        }
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Intercept first (if fitted), then one coefficient per model column.
    pub beta: Vec<f64>,
    pub log_lik: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Sup-norm of the score at `beta`.
    pub grad_norm: f64,
    /// Some Newton step had to use `H1` alone because `H1 − H0` was not
    /// positive definite.
    pub used_fisher_fallback: bool,
    /// The coefficient cap was hit; the data are (quasi-)separated.
    pub separated: bool,
}

impl FitResult {
    /// Converged to an interior maximum.
    pub fn is_usable(&self) -> bool {
        self.converged && !self.separated
    }
}

/// The two parts of the negative Hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianParts {
    pub h1: Matrix,
    pub h0: Matrix,
}

impl HessianParts {
    /// `H1 − H0`.
    pub fn total(&self) -> Matrix {
        self.h1.sub(&self.h0)
    }
}

/// Copied design columns of one model.
pub(crate) struct Design {
    n: usize,
    k: usize,
    intercept: bool,
    z: Vec<f64>,
}

impl Design {
    pub(crate) fn new(data: &Dataset, cols: &[usize], intercept: bool) -> Self {
        let n = data.n();
        let k = cols.len() + usize::from(intercept);
        let mut z = Vec::with_capacity(n * k);
        if intercept {
            z.resize(n, 1.0);
        }
        for &j in cols {
            z.extend_from_slice(data.column(j));
        }
        Design { n, k, intercept, z }
    }

    fn col(&self, a: usize) -> &[f64] {
        &self.z[a * self.n..(a + 1) * self.n]
    }

    fn eta_into(&self, beta: &[f64], eta: &mut [f64]) {
        debug_assert_eq!(beta.len(), self.k);
        if self.intercept {
            eta.fill(beta[0]);
        } else {
            eta.fill(0.0);
        }
        let start = usize::from(self.intercept);
        for (a, &b) in beta.iter().enumerate().take(self.k).skip(start) {
            for (e, x) in eta.iter_mut().zip(self.col(a)) {
                *e += b * x;
            }
        }
    }

    fn eta(&self, beta: &[f64]) -> Vec<f64> {
        let mut eta = vec![0.0; self.n];
        self.eta_into(beta, &mut eta);
        eta
    }

    fn xt(&self, u: &[f64]) -> Vec<f64> {
        (0..self.k).map(|a| dot(self.col(a), u)).collect()
    }

    /// `Σ w_i z_i z_iᵀ`
    fn gram(&self, w: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(self.k);
        let mut wz = vec![0.0; self.n];
        for a in 0..self.k {
            for ((o, wi), x) in wz.iter_mut().zip(w).zip(self.col(a)) {
                *o = wi * x;
            }
            for b in a..self.k {
                m.set(a, b, dot(&wz, self.col(b)));
            }
        }
        m.symmetrize_from_upper();
        m
    }

    /// Full column rank test on unit-normalized columns.
    fn has_full_rank(&self) -> bool {
        if self.k > self.n {
            return false;
        }
        if self.k == 0 {
            return true;
        }
        let norms: Vec<f64> = (0..self.k)
            .map(|a| libm::sqrt(dot(self.col(a), self.col(a))))
            .collect();
        if norms.iter().any(|&v| !(v > 0.0)) {
            return false;
        }
        let mut g = Matrix::zeros(self.k);
        for a in 0..self.k {
            for b in a..self.k {
                g.set(a, b, dot(self.col(a), self.col(b)) / (norms[a] * norms[b]));
            }
        }
        g.symmetrize_from_upper();
        match Cholesky::new(&g) {
            Some(c) => c.diag_ratio() > 1e-7,
            None => false,
        }
    }
}

/// Four interleaved partial sums, so the loop vectorizes.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn log_lik_at(lf: &LinkFamily, y: &[f64], eta: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for (&yi, &e) in y.iter().zip(eta) {
        acc += lf.log_density(yi, e)?;
    }
    Ok(acc)
}

/// Per-observation score weight and the two curvature weights.
struct LocalTerms {
    u: Vec<f64>,
    w1: Vec<f64>,
    w0: Vec<f64>,
}

impl LocalTerms {
    fn with_capacity(n: usize) -> Self {
        LocalTerms {
            u: Vec::with_capacity(n),
            w1: Vec::with_capacity(n),
            w0: Vec::with_capacity(n),
        }
    }
}

fn local_terms(lf: &LinkFamily, y: &[f64], eta: &[f64]) -> Result<LocalTerms> {
    let mut t = LocalTerms::with_capacity(y.len());
    for (&yi, &e) in y.iter().zip(eta) {
        let p = lf.point(e)?;
        let r = yi - p.mean;
        t.u.push(r * p.d1);
        t.w1.push(p.variance * p.d1 * p.d1);
        t.w0.push(r * p.d2);
    }
    Ok(t)
}

/// Log-likelihood at `eta`, refilling `t` with the local terms there.
fn eval_at(lf: &LinkFamily, y: &[f64], eta: &[f64], t: &mut LocalTerms) -> Result<f64> {
    t.u.clear();
    t.w1.clear();
    t.w0.clear();
    let mut acc = 0.0;
    for (&yi, &e) in y.iter().zip(eta) {
        let (ld, p) = lf.log_density_point(yi, e)?;
        acc += ld;
        let r = yi - p.mean;
        t.u.push(r * p.d1);
        t.w1.push(p.variance * p.d1 * p.d1);
        t.w0.push(r * p.d2);
    }
    Ok(acc)
}

fn check_beta(model: &ModelIndex, beta: &[f64]) -> Result<()> {
    if beta.len() != model.n_coef() {
        return Err(Error::InvalidArgs(alloc::format!(
            "coefficient vector has length {}, model needs {}",
            beta.len(),
            model.n_coef()
        )));
    }
    Ok(())
}

/// `l(β) = Σ y_i h(η_i) − b(h(η_i))`.
pub fn log_likelihood(
    lf: &LinkFamily,
    data: &Dataset,
    model: &ModelIndex,
    beta: &[f64],
) -> Result<f64> {
    model.check_bounds(data.p())?;
    check_beta(model, beta)?;
    let design = Design::new(data, model.indices(), model.has_intercept());
    log_lik_at(lf, data.y(), &design.eta(beta))
}

/// Gradient of [`log_likelihood`].
pub fn score(
    lf: &LinkFamily,
    data: &Dataset,
    model: &ModelIndex,
    beta: &[f64],
) -> Result<Vec<f64>> {
    model.check_bounds(data.p())?;
    check_beta(model, beta)?;
    let design = Design::new(data, model.indices(), model.has_intercept());
    let t = local_terms(lf, data.y(), &design.eta(beta))?;
    Ok(design.xt(&t.u))
}

/// `H1` and `H0` at `beta`.
pub fn hessian_parts(
    lf: &LinkFamily,
    data: &Dataset,
    model: &ModelIndex,
    beta: &[f64],
) -> Result<HessianParts> {
    model.check_bounds(data.p())?;
    check_beta(model, beta)?;
    let design = Design::new(data, model.indices(), model.has_intercept());
    let t = local_terms(lf, data.y(), &design.eta(beta))?;
    let h0 = if lf.is_canonical() {
        Matrix::zeros(design.k)
    } else {
        design.gram(&t.w0)
    };
    Ok(HessianParts {
        h1: design.gram(&t.w1),
        h0,
    })
}

/// Maximum-likelihood fit of `model` by damped Newton iteration.
///
/// Each step solves with `H1 − H0`; when that matrix is not positive
/// definite the step uses `H1` (Fisher scoring) instead. Steps are halved
/// until the log-likelihood does not decrease.
pub fn fit_mle(
    lf: &LinkFamily,
    data: &Dataset,
    model: &ModelIndex,
    options: &FitOptions,
) -> Result<FitResult> {
    model.check_bounds(data.p())?;
    fit_columns(
        lf,
        data,
        model.indices(),
        model.has_intercept(),
        options,
        None,
    )
}

/// Like [`fit_mle`] but also returns the log-likelihood after every
/// accepted step (starting value first).
pub fn fit_mle_traced(
    lf: &LinkFamily,
    data: &Dataset,
    model: &ModelIndex,
    options: &FitOptions,
) -> Result<(FitResult, Vec<f64>)> {
    model.check_bounds(data.p())?;
    let mut trace = Vec::new();
    let fit = fit_columns(
        lf,
        data,
        model.indices(),
        model.has_intercept(),
        options,
        Some(&mut trace),
    )?;
    Ok((fit, trace))
}

/// Fits the columns in the given order (not necessarily sorted).
pub fn fit_columns(
    lf: &LinkFamily,
    data: &Dataset,
    cols: &[usize],
    intercept: bool,
    options: &FitOptions,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<FitResult> {
    let design = Design::new(data, cols, intercept);
    let k = design.k;
    if k >= data.n() || !design.has_full_rank() {
        return Err(Error::RankDeficient { columns: k });
    }
    let y = data.y();

    let default_init = || {
        let mut b = vec![0.0; k];
        if intercept {
            b[0] = lf.initial_eta(data.mean_response());
        }
        b
    };
    let mut beta = match &options.init {
        Some(b) if b.len() == k => b.clone(),
        _ => default_init(),
    };
    let mut eta = design.eta(&beta);
    let mut ll = match log_lik_at(lf, y, &eta) {
        Ok(v) => v,
        Err(_) if options.init.is_some() => {
            beta = default_init();
            eta = design.eta(&beta);
            log_lik_at(lf, y, &eta)?
        }
        Err(e) => return Err(e),
    };
    if let Some(t) = trace.as_deref_mut() {
        t.push(ll);
    }

    let canonical = lf.is_canonical();
    let mut iterations = 0;
    let mut converged = false;
    let mut separated = false;
    let mut fallback = false;
    let mut cand = vec![0.0; k];
    let mut eta_c = vec![0.0; data.n()];
    let mut terms = local_terms(lf, y, &eta)?;
    let mut terms_c = LocalTerms::with_capacity(data.n());
    let mut grad = design.xt(&terms.u);

    loop {
        if sup_norm(&grad) < options.tol {
            converged = true;
            break;
        }
        if iterations >= options.max_iter {
            break;
        }
        let newton = if canonical {
            design.gram(&terms.w1)
        } else {
            let w: Vec<f64> = terms.w1.iter().zip(&terms.w0).map(|(a, b)| a - b).collect();
            design.gram(&w)
        };
        let dir = match Cholesky::new(&newton) {
            Some(c) => c.solve(&grad),
            None => {
                fallback = true;
                match Cholesky::with_jitter(&design.gram(&terms.w1)) {
                    Some((c, _)) => c.solve(&grad),
                    None => break,
                }
            }
        };

        let slack = 1e-13 * (1.0 + ll.abs());
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=options.max_halvings {
            for ((c, b), d) in cand.iter_mut().zip(&beta).zip(&dir) {
                *c = b + step * d;
            }
            design.eta_into(&cand, &mut eta_c);
            if let Ok(v) = eval_at(lf, y, &eta_c, &mut terms_c) {
                if v >= ll - slack {
                    accepted = Some(v);
                    break;
                }
            }
            step *= 0.5;
        }
        let Some(new_ll) = accepted else { break };
        core::mem::swap(&mut beta, &mut cand);
        core::mem::swap(&mut eta, &mut eta_c);
        ll = new_ll;
        iterations += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push(ll);
        }
        core::mem::swap(&mut terms, &mut terms_c);
        grad = design.xt(&terms.u);
        if sup_norm(&beta) > options.beta_cap {
            separated = true;
            break;
        }
    }

    Ok(FitResult {
        grad_norm: sup_norm(&grad),
        beta,
        log_lik: ll,
        converged: converged && !separated,
        iterations,
        used_fisher_fallback: fallback,
        separated,
    })
}
