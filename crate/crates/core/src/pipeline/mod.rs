//! The simulation loop: sample, compare, recover, post-process, evaluate.

mod config;
pub mod empirical;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

pub use config::{DistributionSource, ExperimentConfig, Mode, RecoverSchedule};
pub use empirical::load_empirical;

use crate::error::{Error, Result};
use crate::graph::ComparisonGraph;
use crate::metrics::{self, MetricsRecord};
use crate::population::{Group, Population};
use crate::ranking::Ranking;
use crate::recovery::RecoveryMethod;
use crate::rng::{derive_seed, SeededRng};
use crate::sampling::{pair_randomly, sample_edges, sample_individuals};
use crate::synth::{btl_compare, generate_population, DistributionSpec};

// Child streams of a trial's generator.
const POPULATION_STREAM: u64 = 0;
const SIMULATION_STREAM: u64 = 1;
fn recovery_stream(iteration: usize) -> u64 {
    2 + 2 * iteration as u64
}
fn feedback_stream(iteration: usize) -> u64 {
    3 + 2 * iteration as u64
}

/// Everything one trial produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub records: Vec<MetricsRecord>,
    pub population: Population,
    /// Evaluated ranking at the last iteration.
    pub final_ranking: Ranking,
    /// Comparisons collected over the trial.
    pub graph: ComparisonGraph,
}

/// Per-iteration summary across trials: lower median, minimum and maximum
/// of each metric, in [`MetricsRecord::METRICS`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub iteration: usize,
    pub median: [f64; 7],
    pub min: [f64; 7],
    pub max: [f64; 7],
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub trials: Vec<TrialResult>,
    pub aggregate: Vec<AggregateRow>,
}

/// Returned when some trials failed. The completed ones are kept.
#[derive(Debug, thiserror::Error)]
#[error("{} of {} trials failed; first failure: {}", .failures.len(), .failures.len() + .completed.len(), .failures[0])]
pub struct ExperimentFailure {
    pub completed: Vec<TrialResult>,
    pub failures: Vec<Error>,
}

enum Source {
    Synthetic {
        n: usize,
        unpriv_fraction: f64,
        spec: DistributionSpec,
    },
    Empirical {
        data: Arc<(Population, ComparisonGraph)>,
        budget: usize,
    },
}

/// A validated configuration with its population source resolved, ready to
/// run trials.
pub struct Experiment {
    config: ExperimentConfig,
    source: Source,
}

impl Experiment {
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let source = match &config.mode {
            Mode::Synthetic {
                n,
                unpriv_fraction,
                distribution,
            } => Source::Synthetic {
                n: *n,
                unpriv_fraction: *unpriv_fraction,
                spec: distribution.resolve()?,
            },
            Mode::Empirical {
                nodes_path,
                edges_path,
                budget_per_iteration,
            } => Source::Empirical {
                data: Arc::new(load_empirical(nodes_path, edges_path)?),
                budget: *budget_per_iteration,
            },
        };
        Ok(Self { config, source })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Skill distribution used for synthetic populations.
    pub fn distribution(&self) -> Option<DistributionSpec> {
        match self.source {
            Source::Synthetic { spec, .. } => Some(spec),
            Source::Empirical { .. } => None,
        }
    }

    /// Runs trial `trial`. The result depends only on the configuration and
    /// the trial index.
    pub fn run_trial(&self, trial: usize) -> Result<TrialResult> {
        let rng = SeededRng::new(derive_seed(self.config.seed, trial as u64));
        let wrap = |iteration: usize| {
            move |e: Error| Error::Trial {
                trial,
                iteration,
                source: Box::new(e),
            }
        };
        let (population, mut remaining, budget) = match &self.source {
            Source::Synthetic {
                n,
                unpriv_fraction,
                spec,
            } => {
                let mut prng = rng.child(POPULATION_STREAM);
                let pop = generate_population(*n, *unpriv_fraction, spec, &mut prng).map_err(wrap(0))?;
                (pop, None, 0)
            }
            Source::Empirical { data, budget } => (data.0.clone(), Some(data.1.clone()), *budget),
        };
        let cfg = &self.config;
        let n = population.len();
        let labels = population.labels();
        let skills = population.skills();
        let rank_based = cfg.sampling.variant.is_rank_based();
        let mut sim = rng.child(SIMULATION_STREAM);
        let mut graph = ComparisonGraph::new(n);
        let mut feedback: Option<Ranking> = None;
        let mut records = Vec::with_capacity(cfg.iterations / cfg.checkpoint_every);
        let mut final_ranking = None;

        for it in 1..=cfg.iterations {
            let err = wrap(it);
            // 1-2. Sample and compare.
            match remaining.as_mut() {
                None => {
                    let ids = sample_individuals(&cfg.sampling, &population, feedback.as_ref(), &mut sim)
                        .map_err(&err)?;
                    for (a, b) in pair_randomly(&ids, &mut sim).map_err(&err)? {
                        let ind = population.individuals();
                        let winner = btl_compare(&ind[a], &ind[b], &mut sim);
                        let loser = if winner == a { b } else { a };
                        graph.record(winner, loser).map_err(&err)?;
                    }
                }
                Some(rest) if !rest.is_empty() => {
                    let edges = sample_edges(&cfg.sampling, rest, &population, feedback.as_ref(), budget, &mut sim)
                        .map_err(&err)?;
                    for (i, j) in edges {
                        let c = rest.remove_pair(i, j).expect("sampled pair exists");
                        if c.wins > 0 {
                            graph.record_many(i, j, c.wins).map_err(&err)?;
                        }
                        if c.losses > 0 {
                            graph.record_many(j, i, c.losses).map_err(&err)?;
                        }
                    }
                }
                Some(_) => {}
            }

            // 3-4. Recover and post-process.
            let checkpoint = cfg.is_checkpoint(it);
            let feedback_from_eval = rank_based && cfg.feedback_method.is_none();
            let want_eval = checkpoint || cfg.recover_every == RecoverSchedule::EveryIteration || feedback_from_eval;
            let mut evaluated = None;
            if want_eval {
                let mut rrng = rng.child(recovery_stream(it));
                let (raw, post) = self
                    .rank(&cfg.recovery, &graph, &labels, &mut rrng)
                    .map_err(&err)?;
                if feedback_from_eval {
                    feedback = Some(if cfg.postprocess_in_feedback { post.clone() } else { raw });
                }
                evaluated = Some(post);
            }
            if rank_based {
                if let Some(method) = &cfg.feedback_method {
                    let mut frng = rng.child(feedback_stream(it));
                    let (raw, post) = self.rank(method, &graph, &labels, &mut frng).map_err(&err)?;
                    feedback = Some(if cfg.postprocess_in_feedback { post } else { raw });
                }
            }

            // 5. Evaluate.
            if checkpoint {
                let ranking = evaluated.expect("recovered at checkpoints");
                records.push(metrics::evaluate(&skills, &labels, &ranking, trial, it).map_err(&err)?);
                final_ranking = Some(ranking);
            }
        }
        Ok(TrialResult {
            trial,
            records,
            population,
            final_ranking: final_ranking.expect("last iteration is a checkpoint"),
            graph,
        })
    }

    fn rank(
        &self,
        method: &RecoveryMethod,
        graph: &ComparisonGraph,
        labels: &[Group],
        rng: &mut SeededRng,
    ) -> Result<(Ranking, Ranking)> {
        let scores = method.recover(graph, labels, rng)?;
        let raw = Ranking::from_scores(scores, rng)?;
        let post = if self.config.postprocess.is_none() {
            raw.clone()
        } else {
            self.config.postprocess.apply(&raw, labels)?
        };
        Ok((raw, post))
    }

    /// Runs every trial in parallel and aggregates the checkpoints.
    pub fn run(&self) -> std::result::Result<ExperimentResult, ExperimentFailure> {
        let outcomes: Vec<Result<TrialResult>> = (0..self.config.trials)
            .into_par_iter()
            .map(|t| self.run_trial(t))
            .collect();
        let mut completed = Vec::new();
        let mut failures = Vec::new();
        for outcome in outcomes {
            match outcome {
                Ok(t) => completed.push(t),
                Err(e) => failures.push(e),
            }
        }
        if failures.is_empty() {
            let aggregate = aggregate(&completed);
            Ok(ExperimentResult {
                trials: completed,
                aggregate,
            })
        } else {
            Err(ExperimentFailure { completed, failures })
        }
    }
}

/// Runs a single trial of `config`.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<TrialResult> {
    Experiment::prepare(config.clone())?.run_trial(trial)
}

/// Runs every trial of `config`.
///
/// Configuration and data errors come back as a failure with no completed
/// trials.
pub fn run_experiment(config: &ExperimentConfig) -> std::result::Result<ExperimentResult, ExperimentFailure> {
    match Experiment::prepare(config.clone()) {
        Ok(exp) => exp.run(),
        Err(e) => Err(ExperimentFailure {
            completed: Vec::new(),
            failures: vec![e],
        }),
    }
}

/// Lower median, minimum and maximum per iteration and metric.
pub fn aggregate(trials: &[TrialResult]) -> Vec<AggregateRow> {
    let mut by_iteration: BTreeMap<usize, Vec<[f64; 7]>> = BTreeMap::new();
    for t in trials {
        for r in &t.records {
            by_iteration.entry(r.iteration).or_default().push(r.values());
        }
    }
    by_iteration
        .into_iter()
        .map(|(iteration, rows)| {
            let mut row = AggregateRow {
                iteration,
                median: [0.0; 7],
                min: [0.0; 7],
                max: [0.0; 7],
            };
            for m in 0..7 {
                let mut col: Vec<f64> = rows.iter().map(|r| r[m]).collect();
                col.sort_by(f64::total_cmp);
                row.median[m] = col[(col.len() - 1) / 2];
                row.min[m] = col[0];
                row.max[m] = col[col.len() - 1];
            }
            row
        })
        .collect()
}
