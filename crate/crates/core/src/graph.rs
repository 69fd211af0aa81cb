//! Cumulative comparison graph.
//!
//! Outcomes are stored as integer win counts per unordered pair; every derived
//! view is computed from them on demand:
//!
//! * the winning-ratio adjacency `A`, where `A[i][j]` is the share of the
//!   comparisons between `i` and `j` that `j` won (so `A[i][j] + A[j][i] = 1`
//!   for compared pairs and both are 0 otherwise);
//! * the loser-to-winner multigraph, where each comparison `j` beats `i` is one
//!   unit edge `i -> j`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Outcome counts between a node and one opponent, seen from the node.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub wins: u64,
    pub losses: u64,
}

impl PairCounts {
    pub fn total(self) -> u64 {
        self.wins + self.losses
    }

    /// Share of comparisons the opponent won.
    pub fn loss_ratio(self) -> f64 {
        self.losses as f64 / self.total() as f64
    }

    /// Share of comparisons the node won.
    pub fn win_ratio(self) -> f64 {
        self.wins as f64 / self.total() as f64
    }

    fn swapped(self) -> Self {
        Self {
            wins: self.losses,
            losses: self.wins,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonGraph {
    n: usize,
    // Symmetric: adj[i][j] and adj[j][i] hold mirrored counts.
    adj: Vec<BTreeMap<usize, PairCounts>>,
    total: u64,
}

impl ComparisonGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            adj: vec![BTreeMap::new(); n],
            total: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn total_comparisons(&self) -> u64 {
        self.total
    }

    /// Number of distinct compared pairs.
    pub fn pair_count(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::invalid(format!("self-comparison of node {a}")));
        }
        if a >= self.n || b >= self.n {
            return Err(Error::invalid(format!(
                "node id out of range: ({a}, {b}) with n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Records one comparison won by `winner`.
    pub fn record(&mut self, winner: usize, loser: usize) -> Result<()> {
        self.record_many(winner, loser, 1)
    }

    /// Records `count` comparisons won by `winner` against `loser`.
    pub fn record_many(&mut self, winner: usize, loser: usize, count: u64) -> Result<()> {
        self.check_pair(winner, loser)?;
        if count == 0 {
            return Ok(());
        }
        self.adj[winner].entry(loser).or_default().wins += count;
        self.adj[loser].entry(winner).or_default().losses += count;
        self.total += count;
        Ok(())
    }

    /// Removes a compared pair, returning the counts seen from `a`.
    pub fn remove_pair(&mut self, a: usize, b: usize) -> Option<PairCounts> {
        if a >= self.n || b >= self.n || a == b {
            return None;
        }
        let counts = self.adj[a].remove(&b)?;
        self.adj[b].remove(&a);
        self.total -= counts.total();
        Some(counts)
    }

    /// Number of comparisons `winner` won against `loser`.
    pub fn wins(&self, winner: usize, loser: usize) -> u64 {
        self.counts(winner, loser).wins
    }

    /// Counts between `a` and `b` seen from `a`.
    pub fn counts(&self, a: usize, b: usize) -> PairCounts {
        self.adj
            .get(a)
            .and_then(|m| m.get(&b))
            .copied()
            .unwrap_or_default()
    }

    /// `A[i][j]`: share of the `i`/`j` comparisons won by `j`, 0 if never compared.
    pub fn ratio(&self, i: usize, j: usize) -> f64 {
        let c = self.counts(i, j);
        if c.total() == 0 {
            0.0
        } else {
            c.loss_ratio()
        }
    }

    /// Opponents of `i` with counts seen from `i`, in ascending id order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, PairCounts)> + '_ {
        self.adj[i].iter().map(|(&j, &c)| (j, c))
    }

    /// Number of distinct opponents of `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).max().unwrap_or(0)
    }

    /// Compared pairs `(i, j, counts seen from i)` with `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, PairCounts)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, m)| {
            m.range(i + 1..).map(move |(&j, &c)| (i, j, c))
        })
    }

    /// Dense winning-ratio adjacency matrix.
    pub fn winning_ratio_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for (i, j, c) in self.pairs() {
            a[(i, j)] = c.loss_ratio();
            a[(j, i)] = c.swapped().loss_ratio();
        }
        a
    }

    /// Graph with every outcome reversed.
    pub fn reversed(&self) -> Self {
        let adj = self
            .adj
            .iter()
            .map(|m| m.iter().map(|(&j, &c)| (j, c.swapped())).collect())
            .collect();
        Self {
            n: self.n,
            adj,
            total: self.total,
        }
    }

    /// Graph with node `i` renamed to `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::invalid("permutation length differs from node count"));
        }
        let mut out = Self::new(self.n);
        for (i, j, c) in self.pairs() {
            out.record_many(perm[i], perm[j], c.wins)?;
            out.record_many(perm[j], perm[i], c.losses)?;
        }
        Ok(out)
    }
}
