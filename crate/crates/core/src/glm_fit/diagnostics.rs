//! Sample versions of the ratio conditions that make the `H0` part of the
//! Hessian negligible, evaluated at a given coefficient vector.

use crate::error::{Error, Result};
use crate::glm_fit::Dataset;
use crate::links::LinkFamily;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    pub n: usize,
    /// `max_{i,j} x_ij² h′_i² / Σ_i σ_i² x_ij² h′_i²`
    pub score_ratio: f64,
    /// Column attaining `score_ratio`.
    pub score_ratio_column: usize,
    /// `max_i h″_i² / Σ_i σ_i² h″_i²`; `None` when `h″ ≡ 0` on the sample
    /// (canonical links), where the ratio is not applicable.
    pub curvature_ratio: Option<f64>,
    /// Reference rate `n^{-1/3}` the ratios are compared against.
    pub reference: f64,
    pub max_abs_x: f64,
    pub max_abs_h1: f64,
    pub max_abs_h2: f64,
    pub min_variance: f64,
    pub max_variance: f64,
    /// Columns skipped because they are identically zero.
    pub zero_columns: usize,
}

impl DiagnosticReport {
    pub fn score_ratio_below_reference(&self) -> bool {
        self.score_ratio < self.reference
    }

    pub fn curvature_ratio_below_reference(&self) -> Option<bool> {
        self.curvature_ratio.map(|r| r < self.reference)
    }
}

/// Evaluates the ratio statistics at `η = X β0` (no intercept).
pub fn c6_diagnostics(lf: &LinkFamily, data: &Dataset, beta0: &[f64]) -> Result<DiagnosticReport> {
    let (n, p) = (data.n(), data.p());
    if beta0.len() != p {
        return Err(Error::InvalidArgs(alloc::format!(
            "coefficient vector has length {}, data has {p} columns",
            beta0.len()
        )));
    }
    let mut eta = alloc::vec![0.0; n];
    for (j, &b) in beta0.iter().enumerate() {
        if b != 0.0 {
            for (e, x) in eta.iter_mut().zip(data.column(j)) {
                *e += b * x;
            }
        }
    }
    let mut h1sq = alloc::vec::Vec::with_capacity(n);
    let mut var = alloc::vec::Vec::with_capacity(n);
    let (mut max_h1, mut max_h2) = (0.0f64, 0.0f64);
    let (mut curv_num, mut curv_den) = (0.0f64, 0.0f64);
    for &e in &eta {
        let pt = lf.point(e)?;
        h1sq.push(pt.d1 * pt.d1);
        var.push(pt.variance);
        max_h1 = max_h1.max(pt.d1.abs());
        max_h2 = max_h2.max(pt.d2.abs());
        let d2sq = pt.d2 * pt.d2;
        curv_num = curv_num.max(d2sq);
        curv_den += pt.variance * d2sq;
    }

    let mut best = (0.0f64, 0usize);
    let mut max_abs_x = 0.0f64;
    let mut zero_columns = 0;
    for j in 0..p {
        let col = data.column(j);
        let (mut num, mut den) = (0.0f64, 0.0f64);
        for i in 0..n {
            let t = col[i] * col[i] * h1sq[i];
            num = num.max(t);
            den += var[i] * t;
            max_abs_x = max_abs_x.max(col[i].abs());
        }
        if den == 0.0 {
            zero_columns += 1;
            continue;
        }
        let r = num / den;
        if r > best.0 {
            best = (r, j);
        }
    }

    let curvature_ratio = if curv_den == 0.0 {
        None
    } else {
        Some(curv_num / curv_den)
    };
    Ok(DiagnosticReport {
        n,
        score_ratio: best.0,
        score_ratio_column: best.1,
        curvature_ratio,
        reference: libm::pow(n as f64, -1.0 / 3.0),
        max_abs_x,
        max_abs_h1: max_h1,
        max_abs_h2: max_h2,
        min_variance: var.iter().copied().fold(f64::INFINITY, f64::min),
        max_variance: var.iter().copied().fold(0.0, f64::max),
        zero_columns,
    })
}

/// Curvature ratio as a hard result: [`Error::ZeroDenominator`] when `h″ ≡ 0`.
pub fn curvature_ratio(report: &DiagnosticReport) -> Result<f64> {
    report.curvature_ratio.ok_or(Error::ZeroDenominator)
}
