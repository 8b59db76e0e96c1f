//! Small dense symmetric matrices and Cholesky solves.

use alloc::vec;
use alloc::vec::Vec;

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn from_rows(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim, "matrix data has wrong length");
        Matrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Copies the upper triangle into the lower one.
    pub fn symmetrize_from_upper(&mut self) {
        let n = self.dim;
        for r in 0..n {
            for c in 0..r {
                self.data[r * n + c] = self.data[c * n + r];
            }
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// `self - other`.
    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `x' A x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for r in 0..n {
            let row = &self.data[r * n..(r + 1) * n];
            acc += x[r] * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
        acc
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    /// Factorizes `a`; `None` when a pivot is not strictly positive.
    pub fn new(a: &Matrix) -> Option<Self> {
        Self::with_shift(a, 0.0)
    }

    fn with_shift(a: &Matrix, shift: f64) -> Option<Self> {
        let n = a.dim;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j) + shift;
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let djj = libm::sqrt(d);
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Some(Cholesky { dim: n, lower: l })
    }

    /// Factorizes `a`, retrying once with `1e-10 · trace / dim` added to the
    /// diagonal. The flag reports whether the jitter was needed.
    pub fn with_jitter(a: &Matrix) -> Option<(Self, bool)> {
        if let Some(c) = Self::new(a) {
            return Some((c, false));
        }
        if a.dim == 0 {
            return None;
        }
        let tr = a.trace();
        if !(tr > 0.0) {
            return None;
        }
        Self::with_shift(a, 1e-10 * tr / a.dim as f64).map(|c| (c, true))
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k * n + i] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        y
    }

    /// Smallest diagonal entry of the factor over the largest; a cheap
    /// conditioning indicator.
    pub fn diag_ratio(&self) -> f64 {
        let n = self.dim;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let d = self.lower[i * n + i];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if n == 0 {
            1.0
        } else {
            lo / hi
        }
    }
}
