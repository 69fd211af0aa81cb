use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::position_exposure;
use crate::population::Group;
use crate::ranking::Ranking;

fn default_max_swaps() -> usize {
    1_000_000
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpiraConfig {
    /// Required ratio of unprivileged to privileged exposure.
    pub bnd: f64,
    #[serde(default = "default_max_swaps")]
    pub max_swaps: usize,
}

impl EpiraConfig {
    pub fn new(bnd: f64) -> Self {
        Self {
            bnd,
            max_swaps: default_max_swaps(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bnd >= 0.0 && self.bnd <= 1.0) {
            return Err(Error::invalid("EPIRA bnd must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpiraStatus {
    /// The exposure ratio reached the bound.
    Reached,
    /// Swap budget ran out or no improving swap remained.
    BoundNotReached,
}

#[derive(Debug, Clone)]
pub struct EpiraOutcome {
    pub ranking: Ranking,
    pub ratio: f64,
    pub swaps: usize,
    pub status: EpiraStatus,
    /// Exposure ratio after each accepted swap.
    pub history: Vec<f64>,
}

/// Raises the unprivileged/privileged exposure ratio to `bnd` with adjacent
/// swaps that move an unprivileged individual one place up past a privileged
/// one.
///
/// The gain of such a swap at positions `(q, q + 1)` is
/// `1/log2(q + 2) - 1/log2(q + 3)`, which is largest for the smallest `q`, so
/// the greedy best swap is always the topmost privileged/unprivileged
/// adjacency.
pub fn epira_rerank(ranking: &Ranking, groups: &[Group], config: &EpiraConfig) -> Result<EpiraOutcome> {
    config.validate()?;
    let n = ranking.len();
    if groups.len() != n {
        return Err(Error::invalid("group labels do not match the ranking"));
    }
    let n_unpriv = groups.iter().filter(|&&g| g == Group::Unprivileged).count();
    let n_priv = n - n_unpriv;
    if n_unpriv == 0 || n_priv == 0 {
        return Err(Error::invalid("EPIRA needs both groups non-empty"));
    }

    let mut order = ranking.order();
    let (mut sum_u, mut sum_p) = (0.0, 0.0);
    for (pos, &id) in order.iter().enumerate() {
        match groups[id] {
            Group::Unprivileged => sum_u += position_exposure(pos),
            Group::Privileged => sum_p += position_exposure(pos),
        }
    }
    let ratio_of = |u: f64, p: f64| (u / n_unpriv as f64) / (p / n_priv as f64);
    let mut ratio = ratio_of(sum_u, sum_p);
    let mut history = Vec::new();
    let mut cursor = 0;
    let mut swaps = 0;
    let status = loop {
        if ratio >= config.bnd {
            break EpiraStatus::Reached;
        }
        if swaps >= config.max_swaps {
            break EpiraStatus::BoundNotReached;
        }
        let found = (cursor..n.saturating_sub(1)).find(|&q| {
            groups[order[q]] == Group::Privileged && groups[order[q + 1]] == Group::Unprivileged
        });
        let Some(q) = found else {
            break EpiraStatus::BoundNotReached;
        };
        let gain = position_exposure(q) - position_exposure(q + 1);
        sum_u += gain;
        sum_p -= gain;
        order.swap(q, q + 1);
        ratio = ratio_of(sum_u, sum_p);
        history.push(ratio);
        swaps += 1;
        // Only the adjacency ending at q can newly qualify above q.
        cursor = q.saturating_sub(1);
    };
    let ranking = if swaps == 0 {
        ranking.clone()
    } else {
        Ranking::from_order(&order)?
    };
    Ok(EpiraOutcome {
        ranking,
        ratio,
        swaps,
        status,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    use Group::{Privileged as P, Unprivileged as U};

    #[test]
    fn alternating_is_identity() {
        let groups: Vec<Group> = (0..20).map(|i| if i % 2 == 0 { U } else { P }).collect();
        let ranking = Ranking::from_order(&(0..20).collect::<Vec<_>>()).unwrap();
        let out = epira_rerank(&ranking, &groups, &EpiraConfig::new(0.9)).unwrap();
        assert_eq!(out.swaps, 0);
        assert_eq!(out.ranking, ranking);
        assert!(out.ratio > 0.9);
        assert_eq!(out.status, EpiraStatus::Reached);
    }

    #[test]
    fn single_swap_pair() {
        let groups = [P, U];
        let ranking = Ranking::from_order(&[0, 1]).unwrap();
        let before = 1.0 / 3f64.log2();
        let out = epira_rerank(&ranking, &groups, &EpiraConfig::new(1.0)).unwrap();
        assert_eq!(out.swaps, 1);
        assert_eq!(out.ranking.order(), vec![1, 0]);
        assert_abs_diff_eq!(out.ratio, 1.0 / before, epsilon = 1e-12);
        assert_abs_diff_eq!(out.ratio, 1.585, epsilon = 1e-3);
        assert!(before < 1.0);
    }

    #[test]
    fn zero_bound_is_identity() {
        let groups = [P, P, U, U];
        let ranking = Ranking::from_order(&[0, 1, 2, 3]).unwrap();
        let out = epira_rerank(&ranking, &groups, &EpiraConfig::new(0.0)).unwrap();
        assert_eq!(out.ranking, ranking);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let groups = [P, P, P, U];
        let ranking = Ranking::from_order(&[0, 1, 2, 3]).unwrap();
        let config = EpiraConfig { bnd: 1.0, max_swaps: 1 };
        let out = epira_rerank(&ranking, &groups, &config).unwrap();
        assert_eq!(out.status, EpiraStatus::BoundNotReached);
        assert_eq!(out.ranking.order(), vec![0, 1, 3, 2]);
    }

    #[test]
    fn unprivileged_bubbles_to_top() {
        let groups = [P, P, P, U];
        let ranking = Ranking::from_order(&[0, 1, 2, 3]).unwrap();
        let out = epira_rerank(&ranking, &groups, &EpiraConfig::new(1.0)).unwrap();
        assert_eq!(out.ranking.order(), vec![3, 0, 1, 2]);
        assert_eq!(out.swaps, 3);
        assert!(out.history.windows(2).all(|w| w[1] > w[0]));
    }
}
