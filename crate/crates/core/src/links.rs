//! Exponential families, link functions, and the composite map θ = h(η).
//!
//! A response density is written `exp{θ y − b(θ)}` with unit dispersion. The
//! link ties the mean `μ = b′(θ)` to the linear predictor `η = g(μ)`, so the
//! natural parameter is `θ = h(η) = (b′)⁻¹(g⁻¹(η))`. Every supported pair
//! carries closed-form `h`, `h′` and `h″`.

use alloc::format;
use alloc::string::{String, ToString};
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::special;

/// Bernoulli fitted means are clamped to `[MEAN_CLAMP, 1 − MEAN_CLAMP]` before
/// the log-likelihood is evaluated.
pub const MEAN_CLAMP: f64 = 1e-12;

// ln(MEAN_CLAMP) and ln(1 − MEAN_CLAMP)
const LN_CLAMP_LO: f64 = -27.631021115928547;
const LN_CLAMP_HI: f64 = -1.0000000000005e-12;

fn clamped_binary_log_density(y: f64, ln_mu: f64, ln_comp: f64) -> f64 {
    let ln_mu = ln_mu.clamp(LN_CLAMP_LO, LN_CLAMP_HI);
    let ln_comp = ln_comp.clamp(LN_CLAMP_LO, LN_CLAMP_HI);
    if y == 1.0 {
        ln_mu
    } else if y == 0.0 {
        ln_comp
    } else {
        y * ln_mu + (1.0 - y) * ln_comp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Bernoulli,
    Poisson,
    /// Gamma with shape fixed at one (exponential responses).
    Gamma,
}

impl Family {
    /// Cumulant function `b(θ)`.
    pub fn cumulant(self, theta: f64) -> f64 {
        match self {
            Family::Bernoulli => special::softplus(theta),
            Family::Poisson => libm::exp(theta),
            Family::Gamma => -libm::log(-theta),
        }
    }

    /// `b′(θ)`, the mean.
    pub fn mean(self, theta: f64) -> f64 {
        match self {
            Family::Bernoulli => special::logistic(theta),
            Family::Poisson => libm::exp(theta),
            Family::Gamma => -1.0 / theta,
        }
    }

    /// `b″(θ)`, the variance.
    pub fn variance(self, theta: f64) -> f64 {
        match self {
            Family::Bernoulli => {
                let m = special::logistic(theta);
                m * special::logistic(-theta)
            }
            Family::Poisson => libm::exp(theta),
            Family::Gamma => 1.0 / (theta * theta),
        }
    }

    /// `(b′)⁻¹(μ)`.
    pub fn natural_param(self, mu: f64) -> f64 {
        match self {
            Family::Bernoulli => libm::log(mu) - libm::log1p(-mu),
            Family::Poisson => libm::log(mu),
            Family::Gamma => -1.0 / mu,
        }
    }

    /// Whether `θ` lies in the natural-parameter domain.
    pub fn admits_theta(self, theta: f64) -> bool {
        match self {
            Family::Gamma => theta < 0.0,
            _ => theta.is_finite(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Bernoulli => "bernoulli",
            Family::Poisson => "poisson",
            Family::Gamma => "gamma",
        }
    }

    /// Checks that a response value belongs to the family's support.
    pub fn admits_response(self, y: f64) -> bool {
        match self {
            Family::Bernoulli => y == 0.0 || y == 1.0,
            Family::Poisson => y >= 0.0 && y == libm::floor(y),
            Family::Gamma => y > 0.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" | "binomial" | "binary" => Ok(Family::Bernoulli),
            "poisson" => Ok(Family::Poisson),
            "gamma" | "exponential" => Ok(Family::Gamma),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Link {
    Logit,
    Probit,
    Cauchit,
    Cloglog,
    Log,
    Identity,
    Arcsin,
    /// `η = μ^{-k}`; `k = 1` is the reciprocal link, `k = -1` the identity.
    InversePower(f64),
}

impl Link {
    /// `g(μ)`.
    pub fn link(self, mu: f64) -> f64 {
        match self {
            Link::Logit => libm::log(mu) - libm::log1p(-mu),
            Link::Probit => special::norm_quantile(mu),
            Link::Cauchit => libm::tan(PI * (mu - 0.5)),
            Link::Cloglog => libm::log(-libm::log1p(-mu)),
            Link::Log => libm::log(mu),
            Link::Identity => mu,
            Link::Arcsin => libm::asin(libm::sqrt(mu)),
            Link::InversePower(k) => libm::pow(mu, -k),
        }
    }

    /// `g⁻¹(η)`.
    pub fn inverse(self, eta: f64) -> f64 {
        match self {
            Link::Logit => special::logistic(eta),
            Link::Probit => special::norm_cdf(eta),
            Link::Cauchit => libm::atan2(1.0, -eta) / PI,
            Link::Cloglog => -libm::expm1(-libm::exp(eta)),
            Link::Log => libm::exp(eta),
            Link::Identity => eta,
            Link::Arcsin => {
                let s = libm::sin(eta);
                s * s
            }
            Link::InversePower(k) => libm::pow(eta, -1.0 / k),
        }
    }

    pub fn name(self) -> String {
        match self {
            Link::Logit => "logit".to_string(),
            Link::Probit => "probit".to_string(),
            Link::Cauchit => "cauchit".to_string(),
            Link::Cloglog => "cloglog".to_string(),
            Link::Log => "log".to_string(),
            Link::Identity => "identity".to_string(),
            Link::Arcsin => "arcsin".to_string(),
            Link::InversePower(k) => format!("invpower:{k}"),
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logit" => Ok(Link::Logit),
            "probit" => Ok(Link::Probit),
            "cauchit" => Ok(Link::Cauchit),
            "cloglog" => Ok(Link::Cloglog),
            "log" => Ok(Link::Log),
            "identity" => Ok(Link::Identity),
            "arcsin" => Ok(Link::Arcsin),
            other => {
                let k = other
                    .strip_prefix("invpower:")
                    .and_then(|k| k.parse::<f64>().ok())
                    .filter(|k| k.is_finite() && *k != 0.0);
                k.map(Link::InversePower)
                    .ok_or_else(|| Error::UnknownName(other.to_string()))
            }
        }
    }
}

/// Everything the likelihood needs at one linear predictor value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPoint {
    /// `θ = h(η)`
    pub theta: f64,
    /// `h′(η)`
    pub d1: f64,
    /// `h″(η)`
    pub d2: f64,
    /// `μ = b′(θ)`
    pub mean: f64,
    /// `σ² = b″(θ)`
    pub variance: f64,
}

/// A validated family/link pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkFamily {
    family: Family,
    link: Link,
}

/// Builds the composite for a supported pair.
pub fn compose_link_family(family: Family, link: Link) -> Result<LinkFamily> {
    LinkFamily::new(family, link)
}

impl LinkFamily {
    pub fn new(family: Family, link: Link) -> Result<Self> {
        let ok = match family {
            Family::Bernoulli => matches!(
                link,
                Link::Logit
                    | Link::Probit
                    | Link::Cauchit
                    | Link::Cloglog
                    | Link::Identity
                    | Link::Arcsin
            ),
            Family::Poisson | Family::Gamma => {
                matches!(link, Link::Log)
                    || matches!(link, Link::InversePower(k) if k.is_finite() && k != 0.0)
            }
        };
        if ok {
            Ok(LinkFamily { family, link })
        } else {
            Err(Error::UnsupportedPair {
                family: family.name(),
                link: link.name(),
            })
        }
    }

    /// Bernoulli with the given link.
    pub fn binary(link: Link) -> Result<Self> {
        Self::new(Family::Bernoulli, link)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn link(&self) -> Link {
        self.link
    }

    /// True when `h` is affine, so `h″ ≡ 0` and the Hessian has no `H0` part.
    pub fn is_canonical(&self) -> bool {
        matches!(
            (self.family, self.link),
            (Family::Bernoulli, Link::Logit) | (Family::Poisson, Link::Log)
        ) || matches!((self.family, self.link), (Family::Gamma, Link::InversePower(k)) if k == 1.0)
    }

    /// Whether `eta` lies in the admissible range of the link for this family.
    pub fn admits(&self, eta: f64) -> bool {
        if !eta.is_finite() {
            return false;
        }
        match (self.family, self.link) {
            (_, Link::Identity) => eta > 0.0 && eta < 1.0,
            (_, Link::Arcsin) => eta > 0.0 && eta < FRAC_PI_2,
            (_, Link::InversePower(_)) => eta > 0.0,
            _ => true,
        }
    }

    fn domain_error(&self, eta: f64) -> Error {
        Error::Domain {
            link: self.link.name(),
            eta,
        }
    }

    /// `μ = g⁻¹(η)`.
    pub fn eval_mean(&self, eta: f64) -> Result<f64> {
        if !self.admits(eta) {
            return Err(self.domain_error(eta));
        }
        Ok(self.link.inverse(eta))
    }

    /// `h(η)`; NaN outside the admissible range.
    pub fn h(&self, eta: f64) -> f64 {
        self.point(eta).map_or(f64::NAN, |p| p.theta)
    }

    /// `h′(η)`; NaN outside the admissible range.
    pub fn h_prime(&self, eta: f64) -> f64 {
        self.point(eta).map_or(f64::NAN, |p| p.d1)
    }

    /// `h″(η)`; NaN outside the admissible range.
    pub fn h_second(&self, eta: f64) -> f64 {
        self.point(eta).map_or(f64::NAN, |p| p.d2)
    }

    /// θ, h′, h″, mean and variance at `eta`.
    pub fn point(&self, eta: f64) -> Result<LinkPoint> {
        if !self.admits(eta) {
            return Err(self.domain_error(eta));
        }
        Ok(match self.family {
            Family::Bernoulli => binary_point(self.link, eta),
            Family::Poisson => poisson_point(self.link, eta),
            Family::Gamma => gamma_point(self.link, eta),
        })
    }

    /// One observation's contribution `y h(η) − b(h(η))` to the log-likelihood.
    ///
    /// Bernoulli means are clamped to `[MEAN_CLAMP, 1 − MEAN_CLAMP]`, which
    /// keeps separated data finite.
    pub fn log_density(&self, y: f64, eta: f64) -> Result<f64> {
        if !self.admits(eta) {
            return Err(self.domain_error(eta));
        }
        match self.family {
            Family::Bernoulli => {
                let (ln_mu, ln_comp) = binary_log_probs(self.link, eta);
                Ok(clamped_binary_log_density(y, ln_mu, ln_comp))
            }
            Family::Poisson | Family::Gamma => {
                let theta = self.point(eta)?.theta;
                Ok(y * theta - self.family.cumulant(theta))
            }
        }
    }

    /// [`log_density`](Self::log_density) and [`point`](Self::point) in one
    /// pass, sharing the transcendental evaluations where possible.
    pub fn log_density_point(&self, y: f64, eta: f64) -> Result<(f64, LinkPoint)> {
        if !self.admits(eta) {
            return Err(self.domain_error(eta));
        }
        match (self.family, self.link) {
            (Family::Bernoulli, Link::Cloglog) => {
                let (p, ln_mu, ln_comp) = cloglog_parts(eta);
                Ok((clamped_binary_log_density(y, ln_mu, ln_comp), p))
            }
            (Family::Bernoulli, link) => {
                let (ln_mu, ln_comp) = binary_log_probs(link, eta);
                Ok((
                    clamped_binary_log_density(y, ln_mu, ln_comp),
                    binary_point(link, eta),
                ))
            }
            _ => {
                let p = self.point(eta)?;
                Ok((y * p.theta - self.family.cumulant(p.theta), p))
            }
        }
    }

    /// Starting linear predictor for an intercept given the response mean.
    pub fn initial_eta(&self, ybar: f64) -> f64 {
        let mu = match self.family {
            Family::Bernoulli => ybar.clamp(1e-8, 1.0 - 1e-8),
            _ => ybar.max(1e-8),
        };
        self.link.link(mu)
    }
}

impl fmt::Display for LinkFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.family, self.link)
    }
}

/// (ln μ, ln(1 − μ)) for a binary link, evaluated without cancellation.
fn binary_log_probs(link: Link, eta: f64) -> (f64, f64) {
    match link {
        Link::Logit => (-special::softplus(-eta), -special::softplus(eta)),
        Link::Probit => (special::norm_ln_cdf(eta), special::norm_ln_sf(eta)),
        Link::Cauchit => (
            libm::log(libm::atan2(1.0, -eta) / PI),
            libm::log(libm::atan2(1.0, eta) / PI),
        ),
        Link::Cloglog => {
            let t = libm::exp(eta);
            (libm::log(-libm::expm1(-t)), -t)
        }
        Link::Identity => (libm::log(eta), libm::log1p(-eta)),
        Link::Arcsin => (
            2.0 * libm::log(libm::sin(eta)),
            2.0 * libm::log(libm::cos(eta)),
        ),
        Link::Log | Link::InversePower(_) => unreachable!("not a binary link"),
    }
}

/// Composite for θ = logit(G(η)) given CDF value `g`, its complement `gc`,
/// density `dens` and density slope `dens_slope`.
fn binary_from_cdf(g: f64, gc: f64, dens: f64, dens_slope: f64) -> LinkPoint {
    let var = g * gc;
    let d1 = dens / var;
    LinkPoint {
        theta: libm::log(g) - libm::log(gc),
        d1,
        d2: dens_slope / var - d1 * d1 * (gc - g),
        mean: g,
        variance: var,
    }
}

/// Cloglog point together with `ln G(η)` and `ln(1 − G(η)) = −e^η`.
fn cloglog_parts(eta: f64) -> (LinkPoint, f64, f64) {
    // θ = ln(exp(e^η) − 1) = e^η + ln(1 − exp(−e^η))
    let t = libm::exp(eta);
    let g = -libm::expm1(-t);
    let gc = libm::exp(-t);
    let slope = if t < 1e-3 {
        // d/dt [t / (1 − e^{−t})]
        0.5 + t / 6.0 - t * t * t / 180.0
    } else {
        (g - t * gc) / (g * g)
    };
    let ln_g = libm::log(g);
    let p = LinkPoint {
        theta: t + ln_g,
        d1: t / g,
        d2: t * slope,
        mean: g,
        variance: g * gc,
    };
    (p, ln_g, -t)
}

fn binary_point(link: Link, eta: f64) -> LinkPoint {
    match link {
        Link::Logit => {
            let mean = special::logistic(eta);
            LinkPoint {
                theta: eta,
                d1: 1.0,
                d2: 0.0,
                mean,
                variance: mean * special::logistic(-eta),
            }
        }
        Link::Cloglog => cloglog_parts(eta).0,
        Link::Probit => {
            let ln_g = special::norm_ln_cdf(eta);
            let ln_gc = special::norm_ln_sf(eta);
            let d1 = libm::exp(special::norm_ln_pdf(eta) - ln_g - ln_gc);
            let g = libm::exp(ln_g);
            let gc = libm::exp(ln_gc);
            LinkPoint {
                theta: ln_g - ln_gc,
                d1,
                d2: -eta * d1 - d1 * d1 * (gc - g),
                mean: g,
                variance: libm::exp(ln_g + ln_gc),
            }
        }
        Link::Cauchit => {
            let q = 1.0 + eta * eta;
            binary_from_cdf(
                libm::atan2(1.0, -eta) / PI,
                libm::atan2(1.0, eta) / PI,
                1.0 / (PI * q),
                -2.0 * eta / (PI * q * q),
            )
        }
        Link::Identity => binary_from_cdf(eta, 1.0 - eta, 1.0, 0.0),
        Link::Arcsin => {
            let (s, c) = (libm::sin(eta), libm::cos(eta));
            binary_from_cdf(s * s, c * c, 2.0 * s * c, 2.0 * (c * c - s * s))
        }
        Link::Log | Link::InversePower(_) => unreachable!("not a binary link"),
    }
}

fn poisson_point(link: Link, eta: f64) -> LinkPoint {
    match link {
        Link::Log => {
            let mean = libm::exp(eta);
            LinkPoint {
                theta: eta,
                d1: 1.0,
                d2: 0.0,
                mean,
                variance: mean,
            }
        }
        Link::InversePower(k) => {
            let mean = libm::pow(eta, -1.0 / k);
            LinkPoint {
                theta: -libm::log(eta) / k,
                d1: -1.0 / (k * eta),
                d2: 1.0 / (k * eta * eta),
                mean,
                variance: mean,
            }
        }
        _ => unreachable!("not a Poisson link"),
    }
}

fn gamma_point(link: Link, eta: f64) -> LinkPoint {
    match link {
        Link::Log => {
            let e = libm::exp(-eta);
            let mean = libm::exp(eta);
            LinkPoint {
                theta: -e,
                d1: e,
                d2: -e,
                mean,
                variance: mean * mean,
            }
        }
        Link::InversePower(k) => {
            let r = 1.0 / k;
            let mean = libm::pow(eta, -r);
            let (d1, d2) = if k == 1.0 {
                (-1.0, 0.0)
            } else {
                (
                    -r * libm::pow(eta, r - 1.0),
                    -r * (r - 1.0) * libm::pow(eta, r - 2.0),
                )
            };
            LinkPoint {
                theta: -libm::pow(eta, r),
                d1,
                d2,
                mean,
                variance: mean * mean,
            }
        }
        _ => unreachable!("not a Gamma link"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn all_pairs() -> Vec<LinkFamily> {
        let mut out = Vec::new();
        for link in [
            Link::Logit,
            Link::Probit,
            Link::Cauchit,
            Link::Cloglog,
            Link::Identity,
            Link::Arcsin,
        ] {
            out.push(LinkFamily::binary(link).unwrap());
        }
        for fam in [Family::Poisson, Family::Gamma] {
            for link in [
                Link::Log,
                Link::InversePower(1.0),
                Link::InversePower(0.5),
                Link::InversePower(-1.0),
            ] {
                out.push(LinkFamily::new(fam, link).unwrap());
            }
        }
        out
    }

    /// 100 interior grid points of the admissible range.
    fn grid(lf: &LinkFamily) -> Vec<f64> {
        let (lo, hi) = match lf.link() {
            Link::Identity => (0.02, 0.98),
            Link::Arcsin => (0.05, FRAC_PI_2 - 0.05),
            Link::InversePower(_) => (0.2, 4.0),
            // beyond this the reference route through 1 − μ saturates
            Link::Cloglog => (-4.0, 2.5),
            _ => (-4.0, 4.0),
        };
        (0..100).map(|i| lo + (hi - lo) * i as f64 / 99.0).collect()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-12)
    }

    #[test]
    fn canonical_composites_are_identities() {
        let lf = compose_link_family(Family::Bernoulli, Link::Logit).unwrap();
        assert_eq!(lf.h(0.7), 0.7);
        assert_eq!(lf.h_prime(0.7), 1.0);
        assert_eq!(lf.h_second(0.7), 0.0);
        let lf = compose_link_family(Family::Poisson, Link::Log).unwrap();
        assert_eq!(lf.h(1.3), 1.3);
        for eta in [-3.0, 0.0, 2.5] {
            assert_eq!(lf.h_second(eta), 0.0);
        }
    }

    #[test]
    fn cloglog_composite_at_zero() {
        let lf = LinkFamily::binary(Link::Cloglog).unwrap();
        // ln(e − 1)
        assert!((lf.h(0.0) - 0.541_324_854_612_918_1).abs() < 1e-15);
        assert!((lf.eval_mean(0.0).unwrap() - 0.632_120_558_828_557_7).abs() < 1e-15);
    }

    #[test]
    fn eval_mean_simple_values() {
        assert_eq!(
            LinkFamily::binary(Link::Logit)
                .unwrap()
                .eval_mean(0.0)
                .unwrap(),
            0.5
        );
        assert_eq!(
            LinkFamily::binary(Link::Probit)
                .unwrap()
                .eval_mean(0.0)
                .unwrap(),
            0.5
        );
    }

    #[test]
    fn eval_mean_rejects_out_of_range() {
        let lf = LinkFamily::binary(Link::Identity).unwrap();
        assert!(matches!(lf.eval_mean(1.2), Err(Error::Domain { .. })));
        assert!(matches!(lf.eval_mean(0.0), Err(Error::Domain { .. })));
        assert!(lf.eval_mean(0.3).is_ok());
        let lf = LinkFamily::new(Family::Gamma, Link::InversePower(1.0)).unwrap();
        assert!(lf.eval_mean(-0.5).is_err());
    }

    #[test]
    fn unsupported_pairs_rejected() {
        assert!(matches!(
            LinkFamily::new(Family::Gamma, Link::Probit),
            Err(Error::UnsupportedPair { .. })
        ));
        assert!(LinkFamily::new(Family::Poisson, Link::Logit).is_err());
        assert!(LinkFamily::new(Family::Bernoulli, Link::Log).is_err());
    }

    #[test]
    fn route_consistency_on_grid() {
        for lf in all_pairs() {
            for eta in grid(&lf) {
                let p = lf.point(eta).unwrap();
                let via_theta = lf.family().mean(p.theta);
                let via_link = lf.eval_mean(eta).unwrap();
                assert!(rel(via_theta, via_link) < 1e-10, "{lf} eta={eta}");
                assert!(rel(p.mean, via_link) < 1e-10, "{lf} eta={eta}");
                assert!(
                    rel(p.variance, lf.family().variance(p.theta)) < 1e-9,
                    "{lf} eta={eta}"
                );
            }
        }
    }

    #[test]
    fn h_matches_inverse_mean_of_inverse_link() {
        for lf in all_pairs() {
            for eta in grid(&lf) {
                let direct = lf.family().natural_param(lf.link().inverse(eta));
                assert!(
                    rel(lf.h(eta), direct) < 1e-8 || (lf.h(eta) - direct).abs() < 1e-12,
                    "{lf} eta={eta}"
                );
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let step = 1e-5;
        for lf in all_pairs() {
            for eta in grid(&lf) {
                let fd1 = (lf.h(eta + step) - lf.h(eta - step)) / (2.0 * step);
                let fd2 = (lf.h_prime(eta + step) - lf.h_prime(eta - step)) / (2.0 * step);
                let d1 = lf.h_prime(eta);
                let d2 = lf.h_second(eta);
                assert!(rel(d1, fd1) < 1e-6, "{lf} h' eta={eta}: {d1} vs {fd1}");
                if lf.is_canonical() {
                    assert_eq!(d2, 0.0);
                } else {
                    assert!(
                        rel(d2, fd2) < 1e-5 || (d2 - fd2).abs() < 1e-9,
                        "{lf} h'' eta={eta}: {d2} vs {fd2}"
                    );
                }
            }
        }
    }

    #[test]
    fn links_are_monotone_and_invertible() {
        for lf in all_pairs() {
            let etas = grid(&lf);
            let mus: Vec<f64> = etas.iter().map(|&e| lf.link().inverse(e)).collect();
            let incr = mus.windows(2).all(|w| w[1] > w[0]);
            let decr = mus.windows(2).all(|w| w[1] < w[0]);
            assert!(incr || decr, "{lf}");
            for &mu in &mus {
                let back = lf.link().inverse(lf.link().link(mu));
                assert!(rel(back, mu) < 1e-10, "{lf} mu={mu}");
            }
        }
    }

    #[test]
    fn family_mean_increasing_and_variance_positive() {
        let cases = [
            (Family::Bernoulli, vec![-5.0, -1.0, 0.0, 1.0, 5.0]),
            (Family::Poisson, vec![-2.0, 0.0, 1.0, 3.0]),
            (Family::Gamma, vec![-5.0, -2.0, -1.0, -0.1]),
        ];
        for (fam, thetas) in cases {
            for w in thetas.windows(2) {
                assert!(fam.mean(w[1]) > fam.mean(w[0]));
            }
            for &t in &thetas {
                assert!(fam.variance(t) > 0.0);
            }
        }
    }

    #[test]
    fn cloglog_extremes_stay_finite() {
        let lf = LinkFamily::binary(Link::Cloglog).unwrap();
        for eta in [-40.0, -10.0, 8.0, 30.0] {
            let p = lf.point(eta).unwrap();
            assert!(
                p.theta.is_finite() && p.d1.is_finite() && p.d2.is_finite(),
                "eta={eta}"
            );
        }
        // large η: h(η) ≈ e^η
        assert!(rel(lf.h(10.0), libm::exp(10.0)) < 1e-12);
    }

    #[test]
    fn probit_tails_stay_finite() {
        let lf = LinkFamily::binary(Link::Probit).unwrap();
        for eta in [-45.0, -20.0, 20.0, 45.0] {
            let p = lf.point(eta).unwrap();
            assert!(
                p.theta.is_finite() && p.d1.is_finite() && p.d2.is_finite(),
                "eta={eta}"
            );
        }
    }

    #[test]
    fn log_density_clamps_separated_means() {
        let lf = LinkFamily::binary(Link::Logit).unwrap();
        let floor = libm::log(MEAN_CLAMP);
        assert_eq!(lf.log_density(1.0, -100.0).unwrap(), floor);
        assert_eq!(LN_CLAMP_LO, floor);
        assert_eq!(LN_CLAMP_HI, libm::log1p(-MEAN_CLAMP));
        assert!((lf.log_density(1.0, 0.0).unwrap() + core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn names_round_trip() {
        for s in [
            "logit",
            "probit",
            "cauchit",
            "cloglog",
            "log",
            "identity",
            "arcsin",
            "invpower:2",
        ] {
            assert_eq!(s.parse::<Link>().unwrap().name(), s);
        }
        assert!("invpower:0".parse::<Link>().is_err());
        assert!("tanh".parse::<Link>().is_err());
        assert_eq!("binomial".parse::<Family>().unwrap(), Family::Bernoulli);
    }
}
