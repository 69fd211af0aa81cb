//! SerialRank: spectral seriation of the win-pattern similarity matrix.
//!
//! With match matrix `C` (`C_ij = +1` if `i` beat `j` on majority, `-1` if it
//! lost, 0 otherwise), the similarity is `S = (n J + C C^T) / 2` and the
//! scores are the Fiedler vector of `L = diag(S 1) - S`.
//!
//! Since `L 1 = 0` and `J` acts as `n I` on the complement of `1`, the Fiedler
//! vector is the lowest eigenvector, within `1^perp`, of
//! `L_C = (diag(C C^T 1) - C C^T) / 2`. The large-graph path runs Lanczos on
//! that operator without ever forming a dense matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ComparisonGraph;
use crate::rng::SeededRng;

use super::davids::ratio_sums;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SerialRankParams {
    /// Largest `n` handled by dense eigen-decomposition; Lanczos above.
    pub dense_limit: usize,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Relative residual at which a Ritz pair is accepted.
    pub tol: f64,
}

impl Default for SerialRankParams {
    fn default() -> Self {
        Self {
            dense_limit: 256,
            krylov_dim: 160,
            max_restarts: 60,
            tol: 1e-9,
        }
    }
}

/// Sparse antisymmetric match matrix, stored by row.
struct MatchMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl MatchMatrix {
    fn new(graph: &ComparisonGraph) -> Self {
        let rows = (0..graph.node_count())
            .map(|i| {
                graph
                    .neighbors(i)
                    .filter(|(_, c)| c.wins != c.losses)
                    .map(|(j, c)| (j, if c.wins > c.losses { 1.0 } else { -1.0 }))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(j, c)| c * x[j]).sum();
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.rows.len();
        let mut c = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                c[(i, j)] = v;
            }
        }
        c
    }
}

/// Dense Laplacian `diag(S 1) - S`.
pub fn similarity_laplacian(graph: &ComparisonGraph) -> DMatrix<f64> {
    let n = graph.node_count();
    let c = MatchMatrix::new(graph).dense();
    let mut s = &c * c.transpose();
    s.add_scalar_mut(n as f64);
    s *= 0.5;
    let mut l = -s.clone();
    for i in 0..n {
        l[(i, i)] += s.row(i).sum();
    }
    l
}

pub fn serial_rank(graph: &ComparisonGraph, params: &SerialRankParams) -> Result<Vec<f64>> {
    let n = graph.node_count();
    if n < 3 {
        return Err(Error::invalid("SerialRank needs at least 3 nodes"));
    }
    let fiedler = if n <= params.dense_limit {
        fiedler_dense(graph)?
    } else {
        fiedler_lanczos(graph, params)?
    };
    Ok(orient(graph, fiedler))
}

/// Flips the sign so that scores correlate non-negatively with win-ratio sums.
fn orient(graph: &ComparisonGraph, mut v: Vec<f64>) -> Vec<f64> {
    let (w, _) = ratio_sums(graph);
    let n = v.len() as f64;
    let (mv, mw) = (v.iter().sum::<f64>() / n, w.iter().sum::<f64>() / n);
    let cov: f64 = v.iter().zip(&w).map(|(a, b)| (a - mv) * (b - mw)).sum();
    if cov < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

pub(crate) fn fiedler_dense(graph: &ComparisonGraph) -> Result<Vec<f64>> {
    let l = similarity_laplacian(graph);
    let eig = SymmetricEigen::try_new(l, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("symmetric eigen-decomposition did not converge".into()))?;
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    Ok(eig.eigenvectors.column(idx[1]).iter().copied().collect())
}

/// `L_C` restricted to the complement of the constant vector.
struct ReducedLaplacian {
    c: MatchMatrix,
    degree: Vec<f64>,
    scratch: Vec<f64>,
}

impl ReducedLaplacian {
    fn new(graph: &ComparisonGraph) -> Self {
        let c = MatchMatrix::new(graph);
        let n = graph.node_count();
        let ones = vec![1.0; n];
        let mut c1 = vec![0.0; n];
        c.mul(&ones, &mut c1);
        let mut cc1 = vec![0.0; n];
        c.mul(&c1, &mut cc1);
        // C C^T = -C C for antisymmetric C.
        let degree = cc1.iter().map(|v| -v).collect();
        Self {
            c,
            degree,
            scratch: vec![0.0; n],
        }
    }

    fn apply(&mut self, x: &[f64], out: &mut [f64]) {
        self.c.mul(x, &mut self.scratch);
        self.c.mul(&self.scratch, out);
        // out = C C x = -C C^T x
        for ((o, &d), &xi) in out.iter_mut().zip(&self.degree).zip(x) {
            *o = 0.5 * (d * xi + *o);
        }
    }
}

fn project_out_mean(v: &mut [f64]) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Lowest eigenvector of `L_C` on `1^perp` by explicitly restarted Lanczos
/// with full reorthogonalization.
pub(crate) fn fiedler_lanczos(graph: &ComparisonGraph, params: &SerialRankParams) -> Result<Vec<f64>> {
    let n = graph.node_count();
    let mut op = ReducedLaplacian::new(graph);
    let m = params.krylov_dim.clamp(2, n - 1);

    let mut rng = SeededRng::new(0x5E71_A1F0);
    let mut start: Vec<f64> = (0..n).map(|_| rng.uniform() - 0.5).collect();
    let mut best_residual = f64::INFINITY;

    for _ in 0..=params.max_restarts {
        project_out_mean(&mut start);
        if normalize(&mut start) == 0.0 {
            return Err(Error::Numeric("Lanczos start vector vanished".into()));
        }
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut w = vec![0.0; n];
        for k in 0..m {
            op.apply(&basis[k], &mut w);
            let a = dot(&w, &basis[k]);
            alpha.push(a);
            // Full reorthogonalization, twice for stability.
            for _ in 0..2 {
                project_out_mean(&mut w);
                for q in &basis {
                    let h = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= h * qi);
                }
            }
            let b = normalize(&mut w);
            if k + 1 == m || b < 1e-12 * (a.abs() + 1.0) {
                break;
            }
            beta.push(b);
            basis.push(w.clone());
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::try_new(t, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numeric("tridiagonal eigen-decomposition failed".into()))?;
        let (lo, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty Krylov space");
        let scale = eig.eigenvalues.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let coeffs: DVector<f64> = eig.eigenvectors.column(lo).into_owned();
        let mut ritz = vec![0.0; n];
        for (q, &c) in basis.iter().zip(coeffs.iter()) {
            ritz.iter_mut().zip(q).for_each(|(r, qi)| *r += c * qi);
        }
        project_out_mean(&mut ritz);
        normalize(&mut ritz);
        op.apply(&ritz, &mut w);
        let residual = w
            .iter()
            .zip(&ritz)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        best_residual = best_residual.min(residual / scale);
        if residual <= params.tol * scale || k < m {
            return Ok(ritz);
        }
        start = ritz;
    }
    Err(Error::Convergence {
        method: "SerialRank (Lanczos)",
        iterations: params.max_restarts,
        residual: best_residual,
    })
}
