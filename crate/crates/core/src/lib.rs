//! Variable selection for generalized linear models with canonical and
//! non-canonical links in settings where the number of covariates far
//! exceeds the sample size.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! - [`links`]: exponential families, link functions and the composite
//!   `θ = h(η)` with analytic first and second derivatives;
//! - [`glm_fit`]: log-likelihood, score, the two Hessian parts and a damped
//!   Newton maximum-likelihood fitter;
//! - [`ebic`]: the extended BIC and its `γ` grid;
//! - [`select`]: marginal screening and EBIC-guided forward selection;
//! - [`simgen`]: seeded generators for the three simulation settings;
//! - [`experiments`]: PDR/FDR summaries and the cross-validated link choice.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod ebic;
pub mod error;
pub mod experiments;
pub mod glm_fit;
pub mod linalg;
pub mod links;
pub mod select;
pub mod simgen;
pub mod special;

pub use error::{Error, Result};
pub use links::{Family, Link, LinkFamily};
