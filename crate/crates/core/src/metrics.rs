//! Accuracy and fairness of a ranking against ground-truth skill.
//!
//! * Group-conditioned weighted Kemeny distance: over all unordered pairs with
//!   at least one member in the group,
//!   `sqrt( sum w_ij [discordant] / sum w_ij )` with `w_ij = (t_i - t_j)^2`.
//!   A pair is discordant when `(t_i - t_j)(r_i - r_j) > 0`, since a higher
//!   skill should come with a lower (better) rank.
//! * Exposure: mean of `1 / log2(rank + 2)` over the group, with rank 0 at
//!   the top, so the top position has exposure 1.
//!
//! Differences are always "unprivileged minus privileged".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::Group;
use crate::ranking::Ranking;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// Exposure of a single position.
pub fn position_exposure(rank: usize) -> f64 {
    1.0 / ((rank + 2) as f64).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub trial: usize,
    pub iteration: usize,
    pub error_all: f64,
    pub error_priv: f64,
    pub error_unpriv: f64,
    pub error_diff: f64,
    pub exposure_priv: f64,
    pub exposure_unpriv: f64,
    pub exposure_diff: f64,
}

impl MetricsRecord {
    pub const METRICS: [&'static str; 7] = [
        "error_all",
        "error_priv",
        "error_unpriv",
        "error_diff",
        "exposure_priv",
        "exposure_unpriv",
        "exposure_diff",
    ];

    /// Metric values in the order of [`Self::METRICS`].
    pub fn values(&self) -> [f64; 7] {
        [
            self.error_all,
            self.error_priv,
            self.error_unpriv,
            self.error_diff,
            self.exposure_priv,
            self.exposure_unpriv,
            self.exposure_diff,
        ]
    }
}

fn check_lengths(skills: &[f64], ranking: &Ranking) -> Result<()> {
    if skills.len() != ranking.len() {
        return Err(Error::invalid(format!(
            "{} skills for a ranking of {}",
            skills.len(),
            ranking.len()
        )));
    }
    Ok(())
}

fn membership(n: usize, group: &[usize]) -> Result<Vec<bool>> {
    if group.is_empty() {
        return Err(Error::invalid("group must be non-empty"));
    }
    let mut mask = vec![false; n];
    for &id in group {
        if id >= n {
            return Err(Error::invalid(format!("group member {id} out of range")));
        }
        mask[id] = true;
    }
    Ok(mask)
}

/// Group-conditioned weighted Kemeny distance of `ranking` for `group`.
pub fn group_weighted_kemeny(skills: &[f64], ranking: &Ranking, group: &[usize]) -> Result<f64> {
    check_lengths(skills, ranking)?;
    let mask = membership(skills.len(), group)?;
    let ranks = ranking.rank_of();
    let (mut num, mut den) = (CompensatedSum::default(), CompensatedSum::default());
    for i in 0..skills.len() {
        for j in i + 1..skills.len() {
            if !(mask[i] || mask[j]) {
                continue;
            }
            let dt = skills[i] - skills[j];
            let w = dt * dt;
            den.add(w);
            if dt * (ranks[i] as f64 - ranks[j] as f64) > 0.0 {
                num.add(w);
            }
        }
    }
    finish(num.value(), den.value())
}

fn finish(num: f64, den: f64) -> Result<f64> {
    if den <= 0.0 {
        return Err(Error::UndefinedMetric(
            "all skills relevant to the group are equal".into(),
        ));
    }
    Ok((num / den).sqrt())
}

/// Unprivileged minus privileged weighted Kemeny distance.
pub fn error_difference(
    skills: &[f64],
    ranking: &Ranking,
    g_priv: &[usize],
    g_unpriv: &[usize],
) -> Result<f64> {
    Ok(group_weighted_kemeny(skills, ranking, g_unpriv)?
        - group_weighted_kemeny(skills, ranking, g_priv)?)
}

pub fn exposure(ranking: &Ranking, group: &[usize]) -> Result<f64> {
    if group.is_empty() {
        return Err(Error::invalid("group must be non-empty"));
    }
    let mut sum = CompensatedSum::default();
    for &id in group {
        if id >= ranking.len() {
            return Err(Error::invalid(format!("group member {id} out of range")));
        }
        sum.add(position_exposure(ranking.rank(id)));
    }
    Ok(sum.value() / group.len() as f64)
}

/// Unprivileged minus privileged exposure.
pub fn exposure_difference(ranking: &Ranking, g_priv: &[usize], g_unpriv: &[usize]) -> Result<f64> {
    Ok(exposure(ranking, g_unpriv)? - exposure(ranking, g_priv)?)
}

/// All metrics of one ranking in a single pass over the pairs.
pub fn evaluate(
    skills: &[f64],
    groups: &[Group],
    ranking: &Ranking,
    trial: usize,
    iteration: usize,
) -> Result<MetricsRecord> {
    check_lengths(skills, ranking)?;
    if groups.len() != skills.len() {
        return Err(Error::invalid("group labels do not match the skills"));
    }
    let ranks = ranking.rank_of();
    let n = skills.len();
    // Index 0: all pairs, 1: touching privileged, 2: touching unprivileged.
    let mut num = [CompensatedSum::default(); 3];
    let mut den = [CompensatedSum::default(); 3];
    let is_priv: Vec<bool> = groups.iter().map(|&g| g == Group::Privileged).collect();
    for i in 0..n {
        for j in i + 1..n {
            let dt = skills[i] - skills[j];
            let w = dt * dt;
            let discordant = dt * (ranks[i] as f64 - ranks[j] as f64) > 0.0;
            let touches_priv = is_priv[i] || is_priv[j];
            let touches_unpriv = !is_priv[i] || !is_priv[j];
            for (k, include) in [(0, true), (1, touches_priv), (2, touches_unpriv)] {
                if include {
                    den[k].add(w);
                    if discordant {
                        num[k].add(w);
                    }
                }
            }
        }
    }
    let error_all = finish(num[0].value(), den[0].value())?;
    let error_priv = finish(num[1].value(), den[1].value())?;
    let error_unpriv = finish(num[2].value(), den[2].value())?;

    let (mut exp_p, mut exp_u) = (CompensatedSum::default(), CompensatedSum::default());
    let (mut count_p, mut count_u) = (0usize, 0usize);
    for (id, &p) in is_priv.iter().enumerate() {
        let e = position_exposure(ranks[id]);
        if p {
            exp_p.add(e);
            count_p += 1;
        } else {
            exp_u.add(e);
            count_u += 1;
        }
    }
    if count_p == 0 || count_u == 0 {
        return Err(Error::invalid("both groups must be non-empty"));
    }
    let exposure_priv = exp_p.value() / count_p as f64;
    let exposure_unpriv = exp_u.value() / count_u as f64;
    Ok(MetricsRecord {
        trial,
        iteration,
        error_all,
        error_priv,
        error_unpriv,
        error_diff: error_unpriv - error_priv,
        exposure_priv,
        exposure_unpriv,
        exposure_diff: exposure_unpriv - exposure_priv,
    })
}
