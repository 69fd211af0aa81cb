//! A dataset the size of a real crowd-sourced comparison corpus, written in
//! the node/edge file schema and run through the empirical pipeline.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fairrank::pipeline::{load_empirical, DistributionSource, Experiment, ExperimentConfig, Mode, RecoverSchedule};
use fairrank::{Group, RecoveryMethod, SamplingStrategy, SamplingVariant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const NODES: usize = 6123;
const PAIRS: usize = 125_000;
const BIAS: f64 = 0.8;

fn generate(dir: &Path) -> (PathBuf, PathBuf, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(6123);
    let mut nodes = String::from("id,group,score\n");
    let mut perceived = Vec::with_capacity(NODES);
    for id in 0..NODES {
        let skill: f64 = rng.sample(StandardNormal);
        let unpriv = rng.random_bool(0.4);
        perceived.push(if unpriv { skill - BIAS } else { skill });
        let group = if unpriv { "unprivileged" } else { "privileged" };
        writeln!(nodes, "{id},{group},{skill}").unwrap();
    }
    let mut seen = HashSet::with_capacity(PAIRS);
    let mut edges = String::from("winner,loser,count\n");
    let mut total = 0;
    while seen.len() < PAIRS {
        let (a, b) = (rng.random_range(0..NODES), rng.random_range(0..NODES));
        if a == b || !seen.insert((a.min(b), a.max(b))) {
            continue;
        }
        let p = 1.0 / (1.0 + (perceived[b] - perceived[a]).exp());
        let rounds = rng.random_range(1..=3u64);
        let wins = (0..rounds).filter(|_| rng.random_bool(p)).count() as u64;
        for (w, l, c) in [(a, b, wins), (b, a, rounds - wins)] {
            if c > 0 {
                writeln!(edges, "{w},{l},{c}").unwrap();
            }
        }
        total += rounds;
    }
    let (n, e) = (dir.join("nodes.csv"), dir.join("edges.csv"));
    std::fs::write(&n, nodes).unwrap();
    std::fs::write(&e, edges).unwrap();
    (n, e, total)
}

fn config(nodes: &Path, edges: &Path, variant: SamplingVariant) -> ExperimentConfig {
    let mut c = ExperimentConfig::synthetic(
        2,
        DistributionSource::calibrated(0.75, 0.75),
        SamplingStrategy::new(variant),
        RecoveryMethod::DavidsScore,
    );
    c.mode = Mode::Empirical {
        nodes_path: nodes.to_path_buf(),
        edges_path: edges.to_path_buf(),
        budget_per_iteration: 2000,
    };
    c.iterations = 20;
    c.checkpoint_every = 20;
    c.trials = 3;
    c.seed = 41;
    c.recover_every = RecoverSchedule::Checkpoints;
    c
}

#[test]
fn full_size_dataset_loads_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (nodes, edges, total) = generate(dir.path());
    let (population, graph) = load_empirical(&nodes, &edges).unwrap();
    assert_eq!(population.len(), NODES);
    assert_eq!(graph.pair_count(), PAIRS);
    assert_eq!(graph.total_comparisons(), total);
    assert!((240_000..=260_000).contains(&total), "{total}");

    let mut share = Vec::new();
    let mut exposure_diff = Vec::new();
    for variant in [SamplingVariant::Random, SamplingVariant::oversampling()] {
        let result = Experiment::prepare(config(&nodes, &edges, variant)).unwrap().run().unwrap();
        let (mut touching, mut all) = (0, 0);
        for t in &result.trials {
            assert_eq!(t.graph.pair_count(), 40_000);
            for (i, j, _) in t.graph.pairs() {
                all += 1;
                if population.group_of(i) == Group::Unprivileged || population.group_of(j) == Group::Unprivileged {
                    touching += 1;
                }
            }
        }
        share.push(touching as f64 / all as f64);
        exposure_diff.push((result.aggregate[0].min[6], result.aggregate[0].max[6]));
    }
    // Oversampling spends more of the budget on pairs with an unprivileged
    // endpoint and lifts that group's exposure in every trial.
    assert!(share[1] > share[0] + 0.1, "{share:?}");
    assert!(exposure_diff[1].0 > exposure_diff[0].1, "{exposure_diff:?}");
}
