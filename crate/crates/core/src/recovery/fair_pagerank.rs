//! Locally fair PageRank on the loser-to-winner multigraph.
//!
//! Every node hands a fraction `phi` of its damped mass to unprivileged
//! out-neighbors and `1 - phi` to privileged ones, each share split by edge
//! multiplicity. A share with no out-neighbor in its group is spread uniformly
//! over that whole group, and the restart vector splits `phi` / `1 - phi` the
//! same way. Every step therefore keeps exactly `phi` of the mass on the
//! unprivileged group.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ComparisonGraph;
use crate::population::Group;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FairPageRankParams {
    /// Mass reserved for the unprivileged group.
    pub phi: f64,
    pub damping: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for FairPageRankParams {
    fn default() -> Self {
        Self {
            phi: 0.5,
            damping: 0.85,
            max_iters: 10_000,
            tol: 1e-12,
        }
    }
}

impl FairPageRankParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(Error::invalid("phi must lie in (0, 1)"));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::invalid("damping must lie in (0, 1)"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid("tol must be positive"));
        }
        Ok(())
    }
}

/// Out-edges of one node toward a single group, with multiplicities.
#[derive(Default)]
struct GroupEdges {
    targets: Vec<(usize, f64)>,
    total: f64,
}

pub fn fair_pagerank(
    graph: &ComparisonGraph,
    groups: &[Group],
    params: &FairPageRankParams,
) -> Result<Vec<f64>> {
    params.validate()?;
    let n = graph.node_count();
    if groups.len() != n {
        return Err(Error::invalid(format!(
            "{} group labels for {n} nodes",
            groups.len()
        )));
    }
    let n_unpriv = groups.iter().filter(|&&g| g == Group::Unprivileged).count();
    let n_priv = n - n_unpriv;
    if n_unpriv == 0 || n_priv == 0 {
        return Err(Error::invalid("fair PageRank needs both groups non-empty"));
    }
    if graph.is_empty() {
        return Err(Error::invalid("fair PageRank needs at least one comparison"));
    }

    // Edge i -> j once per comparison j won against i.
    let edges: Vec<[GroupEdges; 2]> = (0..n)
        .map(|i| {
            let mut out: [GroupEdges; 2] = Default::default();
            for (j, c) in graph.neighbors(i) {
                if c.losses > 0 {
                    let e = &mut out[slot(groups[j])];
                    e.targets.push((j, c.losses as f64));
                    e.total += c.losses as f64;
                }
            }
            out
        })
        .collect();

    let share = [params.phi, 1.0 - params.phi];
    let size = [n_unpriv as f64, n_priv as f64];
    let d = params.damping;

    let mut x: Vec<f64> = groups
        .iter()
        .map(|&g| share[slot(g)] / size[slot(g)])
        .collect();
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..params.max_iters {
        next.iter_mut().for_each(|v| *v = 0.0);
        let total: f64 = x.iter().sum();
        let mut spread = [(1.0 - d) * share[0] * total, (1.0 - d) * share[1] * total];
        for (i, out) in edges.iter().enumerate() {
            let mass = d * x[i];
            for g in 0..2 {
                let part = share[g] * mass;
                if out[g].total > 0.0 {
                    for &(j, mult) in &out[g].targets {
                        next[j] += part * mult / out[g].total;
                    }
                } else {
                    spread[g] += part;
                }
            }
        }
        for (v, &g) in next.iter_mut().zip(groups) {
            *v += spread[slot(g)] / size[slot(g)];
        }
        residual = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < params.tol {
            return Ok(x);
        }
    }
    Err(Error::Convergence {
        method: "fair PageRank",
        iterations: params.max_iters,
        residual,
    })
}

fn slot(g: Group) -> usize {
    match g {
        Group::Unprivileged => 0,
        Group::Privileged => 1,
    }
}
