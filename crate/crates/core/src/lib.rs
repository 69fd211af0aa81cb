//! Rankings recovered from biased pairwise comparisons, and how accurate and
//! fair they turn out for a privileged and an unprivileged group.
//!
//! ```
//! use fairrank::{ComparisonGraph, RecoveryMethod, Ranking, SeededRng};
//!
//! let mut graph = ComparisonGraph::new(3);
//! graph.record(0, 1)?;
//! graph.record(1, 2)?;
//!
//! let mut rng = SeededRng::new(7);
//! let groups = vec![fairrank::Group::Privileged; 3];
//! let scores = RecoveryMethod::DavidsScore.recover(&graph, &groups, &mut rng)?;
//! let ranking = Ranking::from_scores(scores, &mut rng)?;
//! assert_eq!(ranking.order(), vec![0, 1, 2]);
//! # Ok::<(), fairrank::Error>(())
//! ```

pub mod cli;
mod error;
pub mod graph;
pub mod metrics;
pub mod pipeline;
pub mod population;
pub mod postprocess;
pub mod ranking;
pub mod recovery;
mod rng;
pub mod sampling;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{ComparisonGraph, PairCounts};
pub use metrics::{evaluate, MetricsRecord};
pub use pipeline::{run_experiment, run_trial, ExperimentConfig};
pub use population::{Group, Individual, Population};
pub use postprocess::PostProcess;
pub use ranking::Ranking;
pub use recovery::RecoveryMethod;
pub use rng::{derive_seed, SeededRng};
pub use sampling::{SamplingStrategy, SamplingVariant};
pub use synth::{calibrate, CalibrationTarget, DistributionSpec};
