use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::links::Family;

/// Response vector plus an `n × p` covariate matrix stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    p: usize,
    y: Vec<f64>,
    x: Vec<f64>,
    names: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from a response and column-major covariates
    /// (`x[j * n + i]` is row `i` of column `j`).
    pub fn from_columns(y: Vec<f64>, x: Vec<f64>, p: usize) -> Result<Self> {
        let n = y.len();
        if n < 2 {
            return Err(Error::InvalidData(format!("need at least 2 rows, got {n}")));
        }
        if p < 1 {
            return Err(Error::InvalidData("need at least one covariate".into()));
        }
        if x.len() != n * p {
            return Err(Error::InvalidData(format!(
                "covariate buffer has {} entries, expected {n} x {p}",
                x.len()
            )));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite response in row {}",
                i + 1
            )));
        }
        if let Some(k) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite covariate in row {}, column {}",
                k % n + 1,
                k / n + 1
            )));
        }
        Ok(Dataset {
            n,
            p,
            y,
            x,
            names: None,
        })
    }

    /// Builds a dataset from row-major covariates (`rows[i][j]`).
    pub fn from_rows(y: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = y.len();
        if rows.len() != n {
            return Err(Error::InvalidData(format!(
                "{} rows for {n} responses",
                rows.len()
            )));
        }
        let p = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::InvalidData(format!(
                "row {} has the wrong width",
                i + 1
            )));
        }
        let mut x = Vec::with_capacity(n * p);
        for j in 0..p {
            x.extend(rows.iter().map(|r| r[j]));
        }
        Self::from_columns(y, x, p)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p {
            return Err(Error::InvalidData(format!(
                "{} feature names for {} columns",
                names.len(),
                self.p
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    /// Checks that every response lies in the family's support.
    pub fn validate_for(&self, family: Family) -> Result<()> {
        match self.y.iter().position(|&v| !family.admits_response(v)) {
            Some(i) => Err(Error::InvalidData(format!(
                "response {} in row {} is not valid for the {family} family",
                self.y[i],
                i + 1
            ))),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.x[j * self.n..(j + 1) * self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.x[j * self.n + i]
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn mean_response(&self) -> f64 {
        self.y.iter().sum::<f64>() / self.n as f64
    }

    /// Dataset restricted to the given rows, in the given order.
    pub fn subset_rows(&self, rows: &[usize]) -> Result<Dataset> {
        let y = rows.iter().map(|&i| self.y[i]).collect();
        let mut x = Vec::with_capacity(rows.len() * self.p);
        for j in 0..self.p {
            let col = self.column(j);
            x.extend(rows.iter().map(|&i| col[i]));
        }
        let out = Dataset::from_columns(y, x, self.p)?;
        Ok(Dataset {
            names: self.names.clone(),
            ..out
        })
    }

    /// Dataset whose column `k` is column `order[k]` of this one.
    pub fn select_columns(&self, order: &[usize]) -> Result<Dataset> {
        let mut x = Vec::with_capacity(self.n * order.len());
        for &j in order {
            x.extend_from_slice(self.column(j));
        }
        let out = Dataset::from_columns(self.y.clone(), x, order.len())?;
        let names = self
            .names
            .as_ref()
            .map(|nm| order.iter().map(|&j| nm[j].clone()).collect());
        Ok(Dataset { names, ..out })
    }
}

/// A candidate model: a sorted, duplicate-free set of covariate columns.
///
/// An intercept is fitted alongside the covariates unless disabled; it is
/// never counted in the model size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelIndex {
    indices: Vec<usize>,
    intercept: bool,
}

impl ModelIndex {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        ModelIndex {
            indices,
            intercept: true,
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn without_intercept(mut self) -> Self {
        self.intercept = false;
        self
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn has_intercept(&self) -> bool {
        self.intercept
    }

    /// Number of covariates, excluding the intercept.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of fitted coefficients, including the intercept.
    pub fn n_coef(&self) -> usize {
        self.indices.len() + usize::from(self.intercept)
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    pub fn check_bounds(&self, p: usize) -> Result<()> {
        match self.indices.last() {
            Some(&j) if j >= p => Err(Error::InvalidArgs(format!(
                "column index {j} out of range for {p} covariates"
            ))),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for ModelIndex {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ModelIndex::new(iter.into_iter().collect())
    }
}
