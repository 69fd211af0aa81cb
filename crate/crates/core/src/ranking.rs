use std::cmp::Ordering;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// A total order over ids. Rank 0 is the best.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    rank_of: Vec<usize>,
    scores: Vec<f64>,
}

impl Ranking {
    /// Sorts ids by descending score. Exact ties are broken uniformly at random.
    ///
    /// Always consumes exactly `scores.len()` draws from `rng`, whether or not
    /// ties occur.
    pub fn from_scores(scores: Vec<f64>, rng: &mut SeededRng) -> Result<Self> {
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::invalid(format!("score of id {i} is not finite")));
        }
        let keys: Vec<u64> = (0..scores.len()).map(|_| rng.next_u64()).collect();
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .unwrap_or(Ordering::Equal)
                .then(keys[a].cmp(&keys[b]))
        });
        let mut rank_of = vec![0; scores.len()];
        for (rank, &id) in order.iter().enumerate() {
            rank_of[id] = rank;
        }
        Ok(Self { rank_of, scores })
    }

    /// Ranking that lists `order[0]` first. Scores are synthetic: `n - rank`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut rank_of = vec![usize::MAX; n];
        for (rank, &id) in order.iter().enumerate() {
            if id >= n || rank_of[id] != usize::MAX {
                return Err(Error::invalid("order is not a permutation of 0..n"));
            }
            rank_of[id] = rank;
        }
        let scores = rank_of.iter().map(|&r| (n - r) as f64).collect();
        Ok(Self { rank_of, scores })
    }

    pub fn len(&self) -> usize {
        self.rank_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank_of.is_empty()
    }

    pub fn rank_of(&self) -> &[usize] {
        &self.rank_of
    }

    pub fn rank(&self, id: usize) -> usize {
        self.rank_of[id]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Ids from best to worst.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.rank_of.len()];
        for (id, &r) in self.rank_of.iter().enumerate() {
            order[r] = id;
        }
        order
    }
}

/// See [`Ranking::from_scores`].
pub fn ranking_from_scores(scores: Vec<f64>, rng: &mut SeededRng) -> Result<Ranking> {
    Ranking::from_scores(scores, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strict_order() {
        let r = Ranking::from_scores(vec![3.0, 1.0, 2.0], &mut SeededRng::new(0)).unwrap();
        assert_eq!(r.rank_of(), &[0, 2, 1]);
        assert_eq!(r.order(), vec![0, 2, 1]);
    }

    #[test]
    fn all_ties_deterministic_per_seed() {
        let a = Ranking::from_scores(vec![1.0; 4], &mut SeededRng::new(9)).unwrap();
        let b = Ranking::from_scores(vec![1.0; 4], &mut SeededRng::new(9)).unwrap();
        assert_eq!(a, b);
        let mut seen = a.rank_of().to_vec();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3]);
    }

    #[test]
    fn tie_confined_to_block() {
        let mut firsts = [0usize; 2];
        for seed in 0..200 {
            let r = Ranking::from_scores(vec![1.0, 1.0, 0.0], &mut SeededRng::new(seed)).unwrap();
            assert_eq!(r.rank(2), 2);
            firsts[r.order()[0]] += 1;
        }
        // Both tied ids reach the top at some point.
        assert!(firsts[0] > 50 && firsts[1] > 50, "{firsts:?}");
    }

    #[test]
    fn rejects_non_finite() {
        let err = Ranking::from_scores(vec![1.0, f64::NAN], &mut SeededRng::new(0));
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn from_order_roundtrip() {
        let r = Ranking::from_order(&[2, 0, 1]).unwrap();
        assert_eq!(r.rank_of(), &[1, 2, 0]);
        assert_eq!(r.scores(), &[2.0, 1.0, 3.0]);
        assert!(Ranking::from_order(&[0, 0]).is_err());
    }

    proptest! {
        #[test]
        fn invariant_under_monotone_transform(
            scores in prop::collection::vec(-5.0f64..5.0, 1..30),
            seed in any::<u64>(),
        ) {
            let a = Ranking::from_scores(scores.clone(), &mut SeededRng::new(seed)).unwrap();
            let b = Ranking::from_scores(scores.iter().map(|s| s.exp()).collect(), &mut SeededRng::new(seed)).unwrap();
            prop_assert_eq!(a.rank_of(), b.rank_of());
            for i in 0..scores.len() {
                for j in 0..scores.len() {
                    if scores[i] > scores[j] {
                        prop_assert!(a.rank(i) < a.rank(j));
                    }
                }
            }
        }
    }
}
