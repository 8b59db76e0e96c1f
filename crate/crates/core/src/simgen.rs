//! Seeded generators for the three simulation settings: binary responses
//! through the complementary log-log link with a sparse coefficient pattern.
//!
//! Every replicate is generated from a ChaCha8 stream selected by
//! `(seed, stream)`, so replicates can be produced in any order or in
//! parallel and still be bit-identical.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::glm_fit::{Dataset, ModelIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Setting {
    /// Compound-symmetric block, independent normals, Laplace and a normal
    /// mixture; relevant features spaced 10 apart.
    S1,
    /// As `S1` with spacing 5, so three relevant features share the
    /// correlated block.
    S2,
    /// Independent normals plus a block of features built from the signed
    /// sum of the relevant ones.
    S3,
}

impl Setting {
    pub fn number(self) -> u8 {
        match self {
            Setting::S1 => 1,
            Setting::S2 => 2,
            Setting::S3 => 3,
        }
    }

    pub fn from_number(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Setting::S1),
            2 => Ok(Setting::S2),
            3 => Ok(Setting::S3),
            other => Err(Error::InvalidDesign(format!("unknown setting {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimDesign {
    pub setting: Setting,
    pub n: usize,
    pub pn: usize,
    pub p0n: usize,
    pub rho: f64,
    /// Spacing `L` of the relevant features.
    pub spacing: usize,
    /// Size `q` of the special block.
    pub q: usize,
    /// Variance of the second mixture component `N(1, ·)`.
    pub mixture_second_variance: f64,
}

/// `⌊40 e^{n^{0.2}}⌋`
pub fn divergent_pn(n: usize) -> usize {
    libm::floor(40.0 * libm::exp(libm::pow(n as f64, 0.2))) as usize
}

/// `⌊5 n^{0.1}⌋`
pub fn divergent_p0n(n: usize) -> usize {
    libm::floor(5.0 * libm::pow(n as f64, 0.1)) as usize
}

/// Design for `setting` at sample size `n` following the divergent pattern.
pub fn design_for(setting: Setting, n: usize, rho: f64) -> Result<SimDesign> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidRho(rho));
    }
    let (spacing, q) = match setting {
        Setting::S1 => (10, 15),
        Setting::S2 => (5, 15),
        Setting::S3 => (10, 50),
    };
    Ok(SimDesign {
        setting,
        n,
        pn: divergent_pn(n),
        p0n: divergent_p0n(n),
        rho,
        spacing,
        q,
        mixture_second_variance: 0.5,
    })
}

impl SimDesign {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidRho(self.rho));
        }
        if self.n < 2 || self.p0n == 0 || self.spacing == 0 {
            return Err(Error::InvalidDesign(
                "n, p0n and spacing must be positive".into(),
            ));
        }
        if self.spacing * self.p0n > self.pn {
            return Err(Error::InvalidDesign(format!(
                "support L*p0n = {} exceeds pn = {}",
                self.spacing * self.p0n,
                self.pn
            )));
        }
        if !(self.mixture_second_variance > 0.0) {
            return Err(Error::InvalidDesign(
                "mixture variance must be positive".into(),
            ));
        }
        match self.setting {
            Setting::S1 | Setting::S2 => {
                if self.q > self.pn / 3 {
                    return Err(Error::InvalidDesign("q exceeds pn/3".into()));
                }
            }
            Setting::S3 => {
                if self.p0n > 25 {
                    return Err(Error::InvalidDesign(format!(
                        "25 - p0n is negative (p0n = {})",
                        self.p0n
                    )));
                }
                if self.spacing * self.p0n > self.pn.saturating_sub(self.q) {
                    return Err(Error::InvalidDesign(
                        "relevant features overlap the constructed block".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn true_model(&self) -> TrueModel {
        let support: Vec<usize> = (1..=self.p0n).map(|t| self.spacing * t - 1).collect();
        let mut beta = vec![0.0; self.pn];
        for (t, &j) in support.iter().enumerate() {
            // t is zero-based here, so even t means odd position
            beta[j] = if t % 2 == 0 { 1.0 } else { 1.3 };
        }
        TrueModel { support, beta }
    }
}

/// True support (zero-based column indices) and coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueModel {
    pub support: Vec<usize>,
    pub beta: Vec<f64>,
}

impl TrueModel {
    pub fn model(&self) -> ModelIndex {
        ModelIndex::new(self.support.clone())
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReplicate {
    pub dataset: Dataset,
    pub truth: TrueModel,
    pub seed: u64,
    pub stream: u64,
}

/// Generator for `(seed, stream)`.
pub fn replicate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generates one replicate from stream 0 of `seed`.
pub fn generate_replicate(design: &SimDesign, seed: u64) -> Result<SimReplicate> {
    generate_replicate_stream(design, seed, 0)
}

/// Generates one replicate from stream `stream` of `seed`.
pub fn generate_replicate_stream(
    design: &SimDesign,
    seed: u64,
    stream: u64,
) -> Result<SimReplicate> {
    design.validate()?;
    let mut rng = replicate_rng(seed, stream);
    let (n, p) = (design.n, design.pn);
    let mut x = vec![0.0; n * p];
    match design.setting {
        Setting::S1 | Setting::S2 => fill_block_design(design, &mut rng, &mut x),
        Setting::S3 => fill_constructed_design(design, &mut rng, &mut x),
    }
    let truth = design.true_model();
    let mut eta = vec![0.0; n];
    for &j in &truth.support {
        let b = truth.beta[j];
        for (e, v) in eta.iter_mut().zip(&x[j * n..(j + 1) * n]) {
            *e += b * v;
        }
    }
    let y = cloglog_response(&eta, &mut rng);
    let dataset = Dataset::from_columns(y, x, p)?;
    Ok(SimReplicate {
        dataset,
        truth,
        seed,
        stream,
    })
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Laplace(0, 1) by inversion.
fn laplace<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
    let mag = -libm::log1p(-2.0 * u.abs());
    if u < 0.0 {
        -mag
    } else {
        mag
    }
}

fn fill_block_design<R: Rng + ?Sized>(design: &SimDesign, rng: &mut R, x: &mut [f64]) {
    let (n, p, q) = (design.n, design.pn, design.q);
    let third = p / 3;
    let two_thirds = 2 * p / 3;
    let shared = libm::sqrt(design.rho);
    let own = libm::sqrt(1.0 - design.rho);
    let sd2 = libm::sqrt(design.mixture_second_variance);
    for i in 0..n {
        let z0 = normal(rng);
        for j in 0..q {
            x[j * n + i] = shared * z0 + own * normal(rng);
        }
        for j in q..third {
            x[j * n + i] = normal(rng);
        }
        for j in third..two_thirds {
            x[j * n + i] = laplace(rng);
        }
        for j in two_thirds..p {
            let first = rng.random::<f64>() < 0.5;
            let z = normal(rng);
            x[j * n + i] = if first { -1.0 + z } else { 1.0 + sd2 * z };
        }
    }
}

fn fill_constructed_design<R: Rng + ?Sized>(design: &SimDesign, rng: &mut R, x: &mut [f64]) {
    let (n, p, q) = (design.n, design.pn, design.q);
    let free = p - q;
    let noise = libm::sqrt((25 - design.p0n) as f64);
    for i in 0..n {
        for j in 0..free {
            x[j * n + i] = normal(rng);
        }
        let mut signed = 0.0;
        for t in 1..=design.p0n {
            let v = x[(design.spacing * t - 1) * n + i];
            signed += if t % 2 == 1 { v } else { -v };
        }
        for j in free..p {
            x[j * n + i] = (signed + noise * normal(rng)) / 5.0;
        }
    }
}

/// Independent Bernoulli draws with success probability `1 − exp(−e^η)`.
pub fn cloglog_response<R: Rng + ?Sized>(eta: &[f64], rng: &mut R) -> Vec<f64> {
    eta.iter()
        .map(|&e| {
            let prob = -libm::expm1(-libm::exp(e));
            let u: f64 = rng.sample(Open01);
            if u < prob {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}
