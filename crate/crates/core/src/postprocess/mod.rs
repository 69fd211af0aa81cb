//! Fairness post-processing of recovered rankings.

mod epira;
mod fair;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::population::Group;
use crate::ranking::Ranking;

pub use epira::{epira_rerank, EpiraConfig, EpiraOutcome, EpiraStatus};
pub use fair::{fair_mtable, fair_rerank, Exhausted, FairConfig};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PostProcess {
    #[default]
    None,
    Fair(FairConfig),
    Epira(EpiraConfig),
}

impl PostProcess {
    pub fn validate(&self) -> Result<()> {
        match self {
            PostProcess::None => Ok(()),
            PostProcess::Fair(c) => c.validate(),
            PostProcess::Epira(c) => c.validate(),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, PostProcess::None)
    }

    /// Applies the post-processor. An EPIRA run that misses its bound still
    /// returns its best ranking.
    pub fn apply(&self, ranking: &Ranking, groups: &[Group]) -> Result<Ranking> {
        match self {
            PostProcess::None => Ok(ranking.clone()),
            PostProcess::Fair(c) => fair_rerank(ranking, groups, c),
            PostProcess::Epira(c) => Ok(epira_rerank(ranking, groups, c)?.ranking),
        }
    }
}
