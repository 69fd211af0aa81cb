//! Synthetic populations and simulated judgments.
//!
//! Skills are drawn from one normal distribution for everyone; unprivileged
//! individuals additionally receive a normally distributed bias that shifts
//! their perceived score. Judgments follow the Bradley-Terry-Luce model on
//! perceived scores.
//!
//! Distribution parameters can be derived from two interpretable targets with
//! [`calibrate`]: the probability that the more skilled individual of a random
//! pair wins, and the probability that a privileged individual beats an
//! unprivileged one.

mod quadrature;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::{Group, Individual, Population};
use crate::rng::SeededRng;

pub use quadrature::GaussHermite;

pub const DEFAULT_QUADRATURE_POINTS: usize = 64;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    #[serde(default)]
    pub mu_skill: f64,
    pub sigma_skill: f64,
    /// Mean bias added to unprivileged perceived scores; non-positive.
    pub mu_bias: f64,
    pub sigma_bias: f64,
}

impl DistributionSpec {
    /// `sigma_bias` defaults to half of `sigma_skill`.
    pub fn new(sigma_skill: f64, mu_bias: f64) -> Self {
        Self {
            mu_skill: 0.0,
            sigma_skill,
            mu_bias,
            sigma_bias: sigma_skill / 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_skill > 0.0 && self.sigma_skill.is_finite()) {
            return Err(Error::invalid("sigma_skill must be positive and finite"));
        }
        if !(self.sigma_bias >= 0.0 && self.sigma_bias.is_finite()) {
            return Err(Error::invalid("sigma_bias must be non-negative and finite"));
        }
        if !(self.mu_bias <= 0.0 && self.mu_bias.is_finite()) {
            return Err(Error::invalid("mu_bias must be non-positive and finite"));
        }
        if !self.mu_skill.is_finite() {
            return Err(Error::invalid("mu_skill must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationTarget {
    pub p_stronger: f64,
    pub p_discr: f64,
}

impl CalibrationTarget {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_stronger", self.p_stronger), ("p_discr", self.p_discr)] {
            if !(p > 0.5 && p < 1.0) {
                return Err(Error::invalid(format!(
                    "{name} must lie strictly between 0.5 and 1, got {p}"
                )));
            }
        }
        Ok(())
    }
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Probability that `i` beats `j` given perceived scores.
pub fn btl_probability(s_i: f64, s_j: f64) -> f64 {
    logistic(s_i - s_j)
}

/// Expected probability that the stronger of two random individuals wins.
pub fn expected_p_stronger(gh: &GaussHermite, sigma_skill: f64) -> f64 {
    let sd = std::f64::consts::SQRT_2 * sigma_skill;
    gh.normal_expectation(0.0, sd, |d| logistic(d.abs()))
}

/// Expected probability that a random privileged individual beats a random
/// unprivileged one.
pub fn expected_p_discr(gh: &GaussHermite, spec: &DistributionSpec) -> f64 {
    let sd = (2.0 * spec.sigma_skill.powi(2) + spec.sigma_bias.powi(2)).sqrt();
    gh.normal_expectation(-spec.mu_bias, sd, logistic)
}

/// Bisection for an increasing `f` on `[lo, hi]`, stopping once `f(mid)` is
/// within `tol` of `target`.
fn bisect(
    quantity: &'static str,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    tol: f64,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let fail = Error::Calibration {
        quantity,
        lo,
        hi,
        target,
    };
    let (flo, fhi) = (f(lo), f(hi));
    if (flo - target).abs() <= tol {
        return Ok(lo);
    }
    if (fhi - target).abs() <= tol {
        return Ok(hi);
    }
    if !(flo < target && target < fhi) {
        return Err(fail);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm - target).abs() <= tol {
            return Ok(mid);
        }
        if fm < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(fail)
}

/// Finds distribution parameters reproducing the target probabilities.
///
/// `sigma_skill` is solved first from `p_stronger`; `mu_bias` then follows
/// from `p_discr` with `sigma_bias = sigma_skill / 2`.
pub fn calibrate(
    target: CalibrationTarget,
    quadrature_points: usize,
    tolerance: f64,
) -> Result<DistributionSpec> {
    calibrate_inner(target, None, quadrature_points, tolerance)
}

/// Like [`calibrate`] but with a fixed `sigma_bias`.
pub fn calibrate_with_sigma_bias(
    target: CalibrationTarget,
    sigma_bias: f64,
    quadrature_points: usize,
    tolerance: f64,
) -> Result<DistributionSpec> {
    if !(sigma_bias.is_finite() && sigma_bias >= 0.0) {
        return Err(Error::invalid("sigma_bias must be finite and non-negative"));
    }
    calibrate_inner(target, Some(sigma_bias), quadrature_points, tolerance)
}

fn calibrate_inner(
    target: CalibrationTarget,
    sigma_bias: Option<f64>,
    quadrature_points: usize,
    tolerance: f64,
) -> Result<DistributionSpec> {
    target.validate()?;
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let gh = GaussHermite::new(quadrature_points)?;
    let sigma_skill = bisect("sigma_skill", 1e-9, 1e3, target.p_stronger, tolerance, |s| {
        expected_p_stronger(&gh, s)
    })?;
    let mut base = DistributionSpec::new(sigma_skill, 0.0);
    if let Some(sb) = sigma_bias {
        base.sigma_bias = sb;
    }
    let sd = (2.0 * base.sigma_skill.powi(2) + base.sigma_bias.powi(2)).sqrt();
    // Solve for the shift m = -mu_bias >= 0.
    let shift = bisect("-mu_bias", 0.0, 100.0 * sd + 100.0, target.p_discr, tolerance, |m| {
        expected_p_discr(&gh, &DistributionSpec { mu_bias: -m, ..base })
    })?;
    Ok(DistributionSpec {
        mu_bias: -shift,
        ..base
    })
}

/// Draws a population of `n` individuals, the last `floor(n * unpriv_fraction)`
/// of them unprivileged.
pub fn generate_population(
    n: usize,
    unpriv_fraction: f64,
    spec: &DistributionSpec,
    rng: &mut SeededRng,
) -> Result<Population> {
    if n < 2 {
        return Err(Error::invalid("population needs at least 2 individuals"));
    }
    if !(unpriv_fraction > 0.0 && unpriv_fraction < 1.0) {
        return Err(Error::invalid("unpriv_fraction must lie strictly between 0 and 1"));
    }
    spec.validate()?;
    let n_unpriv = (n as f64 * unpriv_fraction).floor() as usize;
    if n_unpriv == 0 || n_unpriv == n {
        return Err(Error::invalid(format!(
            "n = {n} with unpriv_fraction = {unpriv_fraction} leaves a group empty"
        )));
    }
    let skill = Normal::new(spec.mu_skill, spec.sigma_skill)
        .map_err(|e| Error::invalid(format!("skill distribution: {e}")))?;
    let bias = Normal::new(spec.mu_bias, spec.sigma_bias)
        .map_err(|e| Error::invalid(format!("bias distribution: {e}")))?;
    let n_priv = n - n_unpriv;
    let individuals = (0..n)
        .map(|id| {
            let t = skill.sample(rng);
            if id < n_priv {
                Individual {
                    id,
                    group: Group::Privileged,
                    skill: t,
                    perceived: t,
                }
            } else {
                Individual {
                    id,
                    group: Group::Unprivileged,
                    skill: t,
                    perceived: t + bias.sample(rng),
                }
            }
        })
        .collect();
    Population::new(individuals)
}

/// Simulates one judgment between `i` and `j`, returning the winner's id.
/// Uses exactly one uniform draw.
pub fn btl_compare(i: &Individual, j: &Individual, rng: &mut SeededRng) -> usize {
    if rng.uniform() < btl_probability(i.perceived, j.perceived) {
        i.id
    } else {
        j.id
    }
}
