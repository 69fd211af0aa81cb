//! Ranking recovery from a comparison graph.
//!
//! Every method maps a [`ComparisonGraph`] to one score per node (higher is
//! better); [`Ranking::from_scores`](crate::ranking::Ranking::from_scores)
//! turns scores into ranks.

mod davids;
mod fair_pagerank;
mod rank_centrality;
mod serial_rank;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ComparisonGraph;
use crate::population::Group;
use crate::rng::SeededRng;

pub use davids::{davids_score, ratio_sums};
pub use fair_pagerank::{fair_pagerank, FairPageRankParams};
pub use rank_centrality::{rank_centrality, DegreeNormalization, RankCentralityParams, TransitionMatrix};
pub use serial_rank::{serial_rank, similarity_laplacian, SerialRankParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RecoveryMethod {
    RandomBaseline,
    DavidsScore,
    RankCentrality(RankCentralityParams),
    SerialRank(SerialRankParams),
    FairPagerank(FairPageRankParams),
}

impl RecoveryMethod {
    pub const NAMES: [&'static str; 5] = [
        "random",
        "davids-score",
        "rank-centrality",
        "serial-rank",
        "fair-pagerank",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RecoveryMethod::RandomBaseline => Self::NAMES[0],
            RecoveryMethod::DavidsScore => Self::NAMES[1],
            RecoveryMethod::RankCentrality(_) => Self::NAMES[2],
            RecoveryMethod::SerialRank(_) => Self::NAMES[3],
            RecoveryMethod::FairPagerank(_) => Self::NAMES[4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RecoveryMethod::RankCentrality(p) => p.validate(),
            RecoveryMethod::FairPagerank(p) => p.validate(),
            _ => Ok(()),
        }
    }

    /// Scores for every node. `rng` is only consumed by the random baseline.
    pub fn recover(
        &self,
        graph: &ComparisonGraph,
        groups: &[Group],
        rng: &mut SeededRng,
    ) -> Result<Vec<f64>> {
        match self {
            RecoveryMethod::RandomBaseline => recover_random(graph.node_count(), rng),
            RecoveryMethod::DavidsScore => Ok(davids_score(graph)),
            RecoveryMethod::RankCentrality(p) => rank_centrality(graph, p),
            RecoveryMethod::SerialRank(p) => serial_rank(graph, p),
            RecoveryMethod::FairPagerank(p) => fair_pagerank(graph, groups, p),
        }
    }
}

impl fmt::Display for RecoveryMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RecoveryMethod {
    type Err = Error;

    /// Parses a method name into the method with default parameters.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(RecoveryMethod::RandomBaseline),
            "davids-score" => Ok(RecoveryMethod::DavidsScore),
            "rank-centrality" => Ok(RecoveryMethod::RankCentrality(Default::default())),
            "serial-rank" => Ok(RecoveryMethod::SerialRank(Default::default())),
            "fair-pagerank" => Ok(RecoveryMethod::FairPagerank(Default::default())),
            other => Err(Error::invalid(format!(
                "unknown recovery method `{other}`; valid methods: {}",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

/// A uniformly random permutation of `0..n`, used as scores.
pub fn recover_random(n: usize, rng: &mut SeededRng) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("random recovery needs at least one node"));
    }
    let mut perm: Vec<f64> = (0..n).map(|v| v as f64).collect();
    perm.shuffle(rng);
    Ok(perm)
}
