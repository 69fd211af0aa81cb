use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ComparisonGraph;

/// How off-diagonal transition mass is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeNormalization {
    /// Divide by the largest number of distinct opponents of any node.
    #[default]
    MaxDegree,
    /// Divide by each node's own number of distinct opponents.
    PerNodeDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankCentralityParams {
    pub max_iters: usize,
    pub tol: f64,
    /// Weight of the uniform teleport mixed into every transition.
    pub regularization: f64,
    pub normalization: DegreeNormalization,
}

impl Default for RankCentralityParams {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            tol: 1e-10,
            regularization: 1e-8,
            normalization: DegreeNormalization::MaxDegree,
        }
    }
}

impl RankCentralityParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid("tol must be positive"));
        }
        if !(0.0..1.0).contains(&self.regularization) {
            return Err(Error::invalid("regularization must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Sparse row-stochastic walk that moves from losers toward winners.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    /// `(j, P_ij)` for every `j != i` with `P_ij > 0`.
    rows: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl TransitionMatrix {
    pub fn new(graph: &ComparisonGraph, normalization: DegreeNormalization) -> Self {
        let n = graph.node_count();
        let d_max = graph.max_degree().max(1) as f64;
        let mut rows = Vec::with_capacity(n);
        let mut self_loops = Vec::with_capacity(n);
        for i in 0..n {
            let d = match normalization {
                DegreeNormalization::MaxDegree => d_max,
                DegreeNormalization::PerNodeDegree => graph.degree(i).max(1) as f64,
            };
            let row: Vec<(usize, f64)> = graph
                .neighbors(i)
                .filter(|(_, c)| c.losses > 0)
                .map(|(j, c)| (j, c.loss_ratio() / d))
                .collect();
            let out: f64 = row.iter().map(|r| r.1).sum();
            self_loops.push((1.0 - out).max(0.0));
            rows.push(row);
        }
        Self { rows, self_loops }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Entry `P_ij`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.self_loops[i]
        } else {
            self.rows[i]
                .iter()
                .find(|r| r.0 == j)
                .map_or(0.0, |r| r.1)
        }
    }

    /// `out = x P`.
    fn left_multiply(&self, x: &[f64], out: &mut [f64]) {
        for (o, (&xi, &p)) in out.iter_mut().zip(x.iter().zip(&self.self_loops)) {
            *o = xi * p;
        }
        for (i, row) in self.rows.iter().enumerate() {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for &(j, p) in row {
                out[j] += xi * p;
            }
        }
    }
}

/// RankCentrality: stationary distribution of the loser-to-winner walk,
/// by power iteration from the uniform distribution.
pub fn rank_centrality(graph: &ComparisonGraph, params: &RankCentralityParams) -> Result<Vec<f64>> {
    params.validate()?;
    if graph.is_empty() {
        return Err(Error::invalid("RankCentrality needs at least one comparison"));
    }
    let n = graph.node_count();
    let p = TransitionMatrix::new(graph, params.normalization);
    let eps = params.regularization;
    let teleport = eps / n as f64;
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..params.max_iters {
        p.left_multiply(&pi, &mut next);
        let mut sum = 0.0;
        for v in next.iter_mut() {
            *v = (1.0 - eps) * *v + teleport;
            sum += *v;
        }
        residual = 0.0;
        for (v, old) in next.iter_mut().zip(&pi) {
            *v /= sum;
            residual += (*v - old).abs();
        }
        std::mem::swap(&mut pi, &mut next);
        if residual < params.tol {
            return Ok(pi);
        }
    }
    Err(Error::Convergence {
        method: "RankCentrality",
        iterations: params.max_iters,
        residual,
    })
}
