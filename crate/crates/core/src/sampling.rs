//! Choosing who gets compared in an iteration.
//!
//! Individuals are sampled first and then paired uniformly at random. In
//! empirical mode, where outcomes already exist, existing edges are drawn
//! instead, weighted by the product of their endpoints' sampling weights.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ComparisonGraph;
use crate::population::{Group, Population};
use crate::ranking::Ranking;
use crate::rng::SeededRng;

fn default_fraction() -> f64 {
    0.2
}
fn default_share() -> f64 {
    0.75
}
fn default_decay() -> f64 {
    5.0
}
fn default_floor() -> f64 {
    0.02
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplingVariant {
    /// Uniform over the whole population.
    Random,
    /// A fixed share of every sample comes from the unprivileged group.
    Oversampling {
        #[serde(default = "default_share")]
        unpriv_share: f64,
    },
    /// Selection weight `floor + (1 - floor) * exp(-decay * rank / (n - 1))`
    /// from the previous iteration's ranking.
    RankBased {
        #[serde(default = "default_decay")]
        decay: f64,
        #[serde(default = "default_floor")]
        floor: f64,
    },
}

impl SamplingVariant {
    pub fn oversampling() -> Self {
        SamplingVariant::Oversampling {
            unpriv_share: default_share(),
        }
    }

    pub fn rank_based() -> Self {
        SamplingVariant::RankBased {
            decay: default_decay(),
            floor: default_floor(),
        }
    }

    pub fn is_rank_based(&self) -> bool {
        matches!(self, SamplingVariant::RankBased { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingStrategy {
    pub variant: SamplingVariant,
    #[serde(default = "default_fraction")]
    pub sample_fraction: f64,
}

impl SamplingStrategy {
    pub fn new(variant: SamplingVariant) -> Self {
        Self {
            variant,
            sample_fraction: default_fraction(),
        }
    }

    pub fn random() -> Self {
        Self::new(SamplingVariant::Random)
    }

    pub fn with_fraction(mut self, sample_fraction: f64) -> Self {
        self.sample_fraction = sample_fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_fraction > 0.0 && self.sample_fraction <= 1.0) {
            return Err(Error::invalid("sample_fraction must lie in (0, 1]"));
        }
        match self.variant {
            SamplingVariant::Random => {}
            SamplingVariant::Oversampling { unpriv_share } => {
                if !(unpriv_share > 0.0 && unpriv_share < 1.0) {
                    return Err(Error::invalid("unpriv_share must lie in (0, 1)"));
                }
            }
            SamplingVariant::RankBased { decay, floor } => {
                if !(decay > 0.0 && decay.is_finite()) {
                    return Err(Error::invalid("decay must be positive"));
                }
                if !(floor > 0.0 && floor < 1.0) {
                    return Err(Error::invalid("floor must lie in (0, 1)"));
                }
            }
        }
        Ok(())
    }

    /// Number of individuals drawn per iteration before the odd-size drop.
    pub fn sample_size(&self, n: usize) -> Result<usize> {
        self.validate()?;
        let k = (self.sample_fraction * n as f64).round() as usize;
        if k > n {
            return Err(Error::invalid(format!("sample size {k} exceeds population {n}")));
        }
        if k < 2 {
            return Err(Error::invalid(format!(
                "sample_fraction {} of {n} individuals yields fewer than 2",
                self.sample_fraction
            )));
        }
        Ok(k)
    }
}

/// Rank-based selection weight for an individual at `rank` out of `n`.
pub fn rank_weight(rank: usize, n: usize, decay: f64, floor: f64) -> f64 {
    let normalized = if n > 1 {
        rank as f64 / (n - 1) as f64
    } else {
        0.0
    };
    floor + (1.0 - floor) * (-decay * normalized).exp()
}

/// Per-individual sampling weights under `variant`. `None` means uniform.
fn individual_weights(
    variant: &SamplingVariant,
    population: &Population,
    last_ranking: Option<&Ranking>,
) -> Result<Option<Vec<f64>>> {
    let n = population.len();
    match *variant {
        SamplingVariant::Random => Ok(None),
        SamplingVariant::Oversampling { unpriv_share } => {
            let nu = population.members(Group::Unprivileged).len() as f64;
            let np = population.members(Group::Privileged).len() as f64;
            Ok(Some(
                population
                    .individuals()
                    .iter()
                    .map(|i| match i.group {
                        Group::Unprivileged => unpriv_share / nu,
                        Group::Privileged => (1.0 - unpriv_share) / np,
                    })
                    .collect(),
            ))
        }
        SamplingVariant::RankBased { decay, floor } => match last_ranking {
            None => Ok(None),
            Some(r) => {
                if r.len() != n {
                    return Err(Error::invalid(format!(
                        "ranking covers {} ids, population has {n}",
                        r.len()
                    )));
                }
                Ok(Some(
                    r.rank_of()
                        .iter()
                        .map(|&rank| rank_weight(rank, n, decay, floor))
                        .collect(),
                ))
            }
        },
    }
}

/// Sequential weighted draws without replacement, renormalizing after each.
fn weighted_without_replacement(weights: &[f64], k: usize, rng: &mut SeededRng) -> Vec<usize> {
    let mut w = weights.to_vec();
    let mut picked = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = w.iter().sum();
        let target = rng.uniform() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &wi) in w.iter().enumerate() {
            if wi <= 0.0 {
                continue;
            }
            acc += wi;
            chosen = Some(i);
            if target < acc {
                break;
            }
        }
        let Some(i) = chosen else { break };
        picked.push(i);
        w[i] = 0.0;
    }
    picked
}

fn pick_from(members: &[usize], k: usize, rng: &mut SeededRng) -> Vec<usize> {
    index::sample(rng, members.len(), k)
        .into_iter()
        .map(|i| members[i])
        .collect()
}

/// Draws the individuals compared in one iteration. The result has even
/// length and no duplicates.
pub fn sample_individuals(
    strategy: &SamplingStrategy,
    population: &Population,
    last_ranking: Option<&Ranking>,
    rng: &mut SeededRng,
) -> Result<Vec<usize>> {
    let n = population.len();
    let k = strategy.sample_size(n)?;
    let mut sampled = match strategy.variant {
        SamplingVariant::Random => index::sample(rng, n, k).into_vec(),
        SamplingVariant::Oversampling { unpriv_share } => {
            let unpriv = population.members(Group::Unprivileged);
            let priv_ = population.members(Group::Privileged);
            let mut ku = ((unpriv_share * k as f64).round() as usize).min(unpriv.len());
            let kp = (k - ku).min(priv_.len());
            if ku + kp < k {
                ku = (k - kp).min(unpriv.len());
            }
            let mut out = pick_from(unpriv, ku, rng);
            out.extend(pick_from(priv_, kp, rng));
            out
        }
        SamplingVariant::RankBased { .. } => {
            match individual_weights(&strategy.variant, population, last_ranking)? {
                Some(w) => weighted_without_replacement(&w, k, rng),
                None => index::sample(rng, n, k).into_vec(),
            }
        }
    };
    if sampled.len() % 2 == 1 {
        let drop = rng.random_range(0..sampled.len());
        sampled.remove(drop);
    }
    Ok(sampled)
}

/// Uniformly random perfect matching of `sampled`.
pub fn pair_randomly(sampled: &[usize], rng: &mut SeededRng) -> Result<Vec<(usize, usize)>> {
    if sampled.len() % 2 == 1 {
        return Err(Error::invalid(format!(
            "cannot pair an odd number ({}) of individuals",
            sampled.len()
        )));
    }
    let mut seen = std::collections::HashSet::with_capacity(sampled.len());
    if let Some(dup) = sampled.iter().find(|&&id| !seen.insert(id)) {
        return Err(Error::invalid(format!("id {dup} sampled twice")));
    }
    let mut ids = sampled.to_vec();
    ids.shuffle(rng);
    Ok(ids.chunks_exact(2).map(|c| (c[0], c[1])).collect())
}

/// Draws up to `budget` distinct compared pairs from `graph`.
///
/// Pair weights are the product of the endpoints' sampling weights (uniform
/// for random sampling). Uses exponential keys (Efraimidis-Spirakis), which
/// is distributed like sequential weighted draws without replacement.
pub fn sample_edges(
    strategy: &SamplingStrategy,
    graph: &ComparisonGraph,
    population: &Population,
    last_ranking: Option<&Ranking>,
    budget: usize,
    rng: &mut SeededRng,
) -> Result<Vec<(usize, usize)>> {
    strategy.validate()?;
    if graph.is_empty() {
        return Err(Error::invalid("cannot sample edges from an empty graph"));
    }
    if budget == 0 {
        return Err(Error::invalid("edge budget must be at least 1"));
    }
    if graph.node_count() != population.len() {
        return Err(Error::invalid("graph and population sizes differ"));
    }
    let weights = individual_weights(&strategy.variant, population, last_ranking)?;
    let mut keyed: Vec<(f64, usize, usize)> = graph
        .pairs()
        .map(|(i, j, _)| {
            let w = weights.as_ref().map_or(1.0, |w| w[i] * w[j]);
            // u in (0, 1]
            let u = 1.0 - rng.uniform();
            (u.ln() / w, i, j)
        })
        .collect();
    let take = budget.min(keyed.len());
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    Ok(keyed[..take].iter().map(|&(_, i, j)| (i, j)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::Individual;
    use std::collections::{HashMap, HashSet};

    fn population(n_priv: usize, n_unpriv: usize) -> Population {
        let individuals = (0..n_priv + n_unpriv)
            .map(|id| Individual {
                id,
                group: if id < n_priv {
                    Group::Privileged
                } else {
                    Group::Unprivileged
                },
                skill: id as f64,
                perceived: id as f64,
            })
            .collect();
        Population::new(individuals).unwrap()
    }

    #[test]
    fn random_twenty_percent() {
        let pop = population(200, 200);
        let s = sample_individuals(&SamplingStrategy::random(), &pop, None, &mut SeededRng::new(1)).unwrap();
        assert_eq!(s.len(), 80);
        assert_eq!(s.iter().collect::<HashSet<_>>().len(), 80);
    }

    #[test]
    fn oversampling_three_to_one() {
        let pop = population(200, 200);
        let strategy = SamplingStrategy::new(SamplingVariant::oversampling());
        let s = sample_individuals(&strategy, &pop, None, &mut SeededRng::new(2)).unwrap();
        let unpriv = s.iter().filter(|&&i| pop.group_of(i) == Group::Unprivileged).count();
        assert_eq!((unpriv, s.len() - unpriv), (60, 20));
    }

    #[test]
    fn oversampling_refills_from_other_group() {
        let pop = population(30, 6);
        let strategy = SamplingStrategy::new(SamplingVariant::oversampling()).with_fraction(0.5);
        let s = sample_individuals(&strategy, &pop, None, &mut SeededRng::new(2)).unwrap();
        assert_eq!(s.len(), 18);
        let unpriv = s.iter().filter(|&&i| pop.group_of(i) == Group::Unprivileged).count();
        assert_eq!(unpriv, 6);
    }

    #[test]
    fn rank_weight_ratio() {
        let top = rank_weight(0, 400, 5.0, 0.02);
        let bottom = rank_weight(399, 400, 5.0, 0.02);
        assert_eq!(top, 1.0);
        let expected = 1.0 / (0.02 + 0.98 * (-5.0f64).exp());
        assert!((top / bottom - expected).abs() < 1e-12);
        assert!((top / bottom - 37.6).abs() < 0.05);
    }

    #[test]
    fn rank_based_prefers_top() {
        let pop = population(50, 50);
        let ranking = Ranking::from_order(&(0..100).collect::<Vec<_>>()).unwrap();
        let strategy = SamplingStrategy::new(SamplingVariant::rank_based());
        let mut rng = SeededRng::new(5);
        let mut top = 0;
        let mut bottom = 0;
        for _ in 0..500 {
            let s = sample_individuals(&strategy, &pop, Some(&ranking), &mut rng).unwrap();
            top += s.iter().filter(|&&i| i < 10).count();
            bottom += s.iter().filter(|&&i| i >= 90).count();
        }
        assert!(top > 3 * bottom, "top {top} bottom {bottom}");
        assert!(bottom > 0);
    }

    #[test]
    fn rank_based_without_ranking_is_random() {
        let pop = population(10, 10);
        let strategy = SamplingStrategy::new(SamplingVariant::rank_based());
        let a = sample_individuals(&strategy, &pop, None, &mut SeededRng::new(4)).unwrap();
        let b = sample_individuals(&SamplingStrategy::random(), &pop, None, &mut SeededRng::new(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn odd_samples_drop_one() {
        let pop = population(5, 5);
        let strategy = SamplingStrategy::random().with_fraction(0.5);
        let s = sample_individuals(&strategy, &pop, None, &mut SeededRng::new(8)).unwrap();
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn sample_size_errors() {
        let pop = population(2, 2);
        let tiny = SamplingStrategy::random().with_fraction(0.1);
        assert!(sample_individuals(&tiny, &pop, None, &mut SeededRng::new(0)).is_err());
        let bad = SamplingStrategy::random().with_fraction(1.5);
        assert!(sample_individuals(&bad, &pop, None, &mut SeededRng::new(0)).is_err());
    }

    #[test]
    fn pairing_basics() {
        assert_eq!(pair_randomly(&[3, 7], &mut SeededRng::new(0)).unwrap().len(), 1);
        let p = pair_randomly(&[3, 7], &mut SeededRng::new(0)).unwrap()[0];
        assert!(p == (3, 7) || p == (7, 3));
        assert!(pair_randomly(&[1, 2, 3], &mut SeededRng::new(0)).is_err());
        assert!(pair_randomly(&[1, 1], &mut SeededRng::new(0)).is_err());

        let ids: Vec<usize> = (0..80).collect();
        let pairs = pair_randomly(&ids, &mut SeededRng::new(1)).unwrap();
        assert_eq!(pairs.len(), 40);
        let mut seen: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        seen.sort_unstable();
        assert_eq!(seen, ids);
    }

    #[test]
    fn pairing_is_uniform_over_matchings() {
        // The three perfect matchings of {0,1,2,3}, identified by 0's partner.
        let mut counts = [0usize; 3];
        let mut rng = SeededRng::new(17);
        let reps = 10_000;
        for _ in 0..reps {
            let pairs = pair_randomly(&[0, 1, 2, 3], &mut rng).unwrap();
            let partner = pairs
                .iter()
                .find_map(|&(a, b)| match (a, b) {
                    (0, x) | (x, 0) => Some(x),
                    _ => None,
                })
                .unwrap();
            counts[partner - 1] += 1;
        }
        for c in counts {
            assert!((c as f64 / reps as f64 - 1.0 / 3.0).abs() < 0.02, "{counts:?}");
        }
    }

    fn three_edge_graph() -> ComparisonGraph {
        let mut g = ComparisonGraph::new(4);
        g.record(0, 1).unwrap();
        g.record(2, 1).unwrap();
        g.record(3, 2).unwrap();
        g
    }

    #[test]
    fn single_edge_graph() {
        let pop = population(1, 1);
        let mut g = ComparisonGraph::new(2);
        g.record(1, 0).unwrap();
        for variant in [SamplingVariant::Random, SamplingVariant::oversampling(), SamplingVariant::rank_based()] {
            let e = sample_edges(&SamplingStrategy::new(variant), &g, &pop, None, 1, &mut SeededRng::new(0)).unwrap();
            assert_eq!(e, vec![(0, 1)]);
        }
    }

    #[test]
    fn random_edges_uniform() {
        let pop = population(2, 2);
        let g = three_edge_graph();
        let mut rng = SeededRng::new(3);
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        let reps = 10_000;
        for _ in 0..reps {
            let e = sample_edges(&SamplingStrategy::random(), &g, &pop, None, 1, &mut rng).unwrap();
            *counts.entry(e[0]).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        for c in counts.values() {
            assert!((*c as f64 / reps as f64 - 1.0 / 3.0).abs() < 0.02, "{counts:?}");
        }
    }

    #[test]
    fn oversampled_edges_weighted_nine_to_one() {
        // 0,1 privileged; 2,3 unprivileged. Edges (0,1) and (2,3).
        let pop = population(2, 2);
        let mut g = ComparisonGraph::new(4);
        g.record(0, 1).unwrap();
        g.record(2, 3).unwrap();
        let strategy = SamplingStrategy::new(SamplingVariant::oversampling());
        let mut rng = SeededRng::new(9);
        let reps = 20_000;
        let unpriv_edge = (0..reps)
            .filter(|_| sample_edges(&strategy, &g, &pop, None, 1, &mut rng).unwrap()[0] == (2, 3))
            .count();
        // P(unprivileged edge) = 9 / (9 + 1)
        assert!((unpriv_edge as f64 / reps as f64 - 0.9).abs() < 0.01, "{unpriv_edge}");
    }

    #[test]
    fn edge_budget_caps_and_distinct() {
        let pop = population(2, 2);
        let g = three_edge_graph();
        let e = sample_edges(&SamplingStrategy::random(), &g, &pop, None, 10, &mut SeededRng::new(0)).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e.iter().collect::<HashSet<_>>().len(), 3);
        assert!(sample_edges(&SamplingStrategy::random(), &ComparisonGraph::new(4), &pop, None, 1, &mut SeededRng::new(0)).is_err());
    }

    #[test]
    fn oversampling_homogeneous_pairs() {
        let pop = population(200, 200);
        let strategy = SamplingStrategy::new(SamplingVariant::oversampling());
        let mut rng = SeededRng::new(21);
        let (mut hetero, mut homo_unpriv) = (0usize, 0usize);
        for _ in 0..1000 {
            let s = sample_individuals(&strategy, &pop, None, &mut rng).unwrap();
            for (a, b) in pair_randomly(&s, &mut rng).unwrap() {
                match (pop.group_of(a), pop.group_of(b)) {
                    (Group::Unprivileged, Group::Unprivileged) => homo_unpriv += 1,
                    (x, y) if x != y => hetero += 1,
                    _ => {}
                }
            }
        }
        assert!(hetero < homo_unpriv, "hetero {hetero} homo {homo_unpriv}");
    }

    #[test]
    fn random_sampling_group_blind() {
        let pop = population(300, 100);
        let mut rng = SeededRng::new(13);
        let iterations = 1000;
        let mut unpriv = 0usize;
        for _ in 0..iterations {
            let s = sample_individuals(&SamplingStrategy::random(), &pop, None, &mut rng).unwrap();
            unpriv += s.iter().filter(|&&i| pop.group_of(i) == Group::Unprivileged).count();
        }
        let draws = (iterations * 80) as f64;
        let p = 0.25;
        let sd = (draws * p * (1.0 - p)).sqrt();
        assert!((unpriv as f64 - draws * p).abs() < 3.0 * sd, "{unpriv}");
    }
}
