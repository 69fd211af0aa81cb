use std::path::{Path, PathBuf};
use std::process::Command;

use fairrank::cli::results::{read_aggregate, read_raw};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fairrank"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const CONFIG: &str = r#"
iterations = 1
trials = 1
checkpoint_every = 1
seed = 11

[mode]
kind = "synthetic"
n = 40

[mode.distribution]
kind = "calibrated"
p_stronger = 0.75
p_discr = 0.75

[sampling]
sample_fraction = 0.2

[sampling.variant]
kind = "random"

[recovery]
kind = "davids_score"
"#;

fn simulate(dir: &Path, name: &str, config: &str) -> (i32, String, String, PathBuf) {
    let cfg = dir.join(format!("{name}.toml"));
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join(name);
    let (code, stdout, stderr) = run(&["simulate", "--config", p(&cfg), "--out", p(&out)]);
    (code, stdout, stderr, out)
}

#[test]
fn calibrate_prints_parameters_and_rejects_bad_targets() {
    let (code, out, _) = run(&["calibrate", "--p-stronger", "0.75", "--p-discr", "0.75", "--mc-pairs", "200000"]);
    assert_eq!(code, 0);
    for key in ["sigma_skill = ", "mu_bias = ", "sigma_bias = ", "p_stronger: target 0.75", "p_discr: target 0.75"] {
        assert!(out.contains(key), "{out}");
    }
    let (code, _, err) = run(&["calibrate", "--p-stronger", "0.4", "--p-discr", "0.75"]);
    assert_eq!(code, 1);
    assert!(err.contains("p_stronger"), "{err}");
}

#[test]
fn simulate_writes_reproducible_tables() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _, a) = simulate(dir.path(), "a", CONFIG);
    assert_eq!(code, 0);
    assert!(out.contains("1 of 1 trials completed"));
    let (_, _, _, b) = simulate(dir.path(), "b", CONFIG);
    for file in ["raw.csv", "aggregate.csv"] {
        let x = std::fs::read(a.join(file)).unwrap();
        assert_eq!(x, std::fs::read(b.join(file)).unwrap(), "{file}");
        assert!(!x.contains(&b'\r'));
    }
    let raw = read_raw(&a.join("raw.csv")).unwrap();
    assert_eq!(raw.len(), 1);
    assert_eq!(raw[0].1.iteration, 1);
    assert!(out.contains(&raw[0].0));

    // Reading back and rewriting reproduces the file exactly.
    let text = std::fs::read_to_string(a.join("raw.csv")).unwrap();
    let line = text.lines().nth(1).unwrap();
    let (fp, rec) = &raw[0];
    let mut fields = vec![fp.clone(), rec.trial.to_string(), rec.iteration.to_string()];
    fields.extend(rec.values().iter().map(|v| v.to_string()));
    assert_eq!(line, fields.join(","));

    let agg = read_aggregate(&a.join("aggregate.csv")).unwrap();
    assert_eq!(agg.len(), 1);
    assert_eq!(agg[0].median, rec.values());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, _, a) = simulate(dir.path(), "a", CONFIG);
    let cfg = dir.path().join("a.toml");
    let c = dir.path().join("c");
    let (code, _, _) = run(&["simulate", "--config", p(&cfg), "--out", p(&c), "--seed", "12"]);
    assert_eq!(code, 0);
    assert_ne!(std::fs::read(a.join("raw.csv")).unwrap(), std::fs::read(c.join("raw.csv")).unwrap());
}

#[test]
fn invalid_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = CONFIG.replace("sample_fraction = 0.2", "sample_fraction = 1.5");
    let (code, _, err, out) = simulate(dir.path(), "bad", &bad);
    assert_eq!(code, 1);
    assert!(err.contains("sample_fraction"), "{err}");
    assert!(!out.join("raw.csv").exists());

    let unknown = CONFIG.replace("trials = 1", "trials = 1\ntrails = 2");
    let (code, _, err, _) = simulate(dir.path(), "typo", &unknown);
    assert_eq!(code, 1);
    assert!(err.contains("trails"), "{err}");
}

#[test]
fn failed_trials_still_write_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let failing = format!("{CONFIG}\n[postprocess]\nkind = \"fair\"\np = 0.99\nalpha = 0.1\n");
    let (code, out, err, dir_out) = simulate(dir.path(), "fail", &failing);
    assert_eq!(code, 2, "{err}");
    assert!(out.contains("0 of 1 trials completed"));
    assert!(err.contains("trial 0"), "{err}");
    assert!(read_raw(&dir_out.join("raw.csv")).unwrap().is_empty());
}

fn dataset(dir: &Path, nodes: &str, edges: &str) -> (PathBuf, PathBuf) {
    let (n, e) = (dir.join("nodes.csv"), dir.join("edges.csv"));
    std::fs::write(&n, nodes).unwrap();
    std::fs::write(&e, edges).unwrap();
    (n, e)
}

fn recovered_order(path: &Path) -> Vec<usize> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,rank,score,group"));
    lines
        .enumerate()
        .map(|(pos, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[1], pos.to_string());
            fields[0].parse().unwrap()
        })
        .collect()
}

#[test]
fn recover_orders_simple_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let (n, e) = dataset(
        dir.path(),
        "id,group,score\n0,privileged,2\n1,unprivileged,1\n",
        "winner,loser\n0,1\n",
    );
    let out = dir.path().join("two.csv");
    let (code, stdout, err) = run(&["recover", "--nodes", p(&n), "--edges", p(&e), "--method", "davids-score", "--out", p(&out)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(recovered_order(&out), [0, 1]);
    assert!(stdout.contains("error_all = 0"));

    let (n, e) = dataset(
        dir.path(),
        "id,group,score\n0,privileged,3\n1,unprivileged,2\n2,unprivileged,1\n",
        "winner,loser,count\n0,1,2\n1,2,2\n0,2,2\n",
    );
    for method in ["davids-score", "rank-centrality", "serial-rank", "fair-pagerank"] {
        let out = dir.path().join(format!("{method}.csv"));
        let (code, _, err) = run(&["recover", "--nodes", p(&n), "--edges", p(&e), "--method", method, "--out", p(&out)]);
        assert_eq!(code, 0, "{method}: {err}");
        assert_eq!(recovered_order(&out), [0, 1, 2], "{method}");
    }
}

#[test]
fn recover_applies_post_processing() {
    let dir = tempfile::tempdir().unwrap();
    let (n, e) = dataset(
        dir.path(),
        "id,group,score\n0,privileged,4\n1,privileged,3\n2,unprivileged,2\n3,unprivileged,1\n",
        "winner,loser\n0,1\n0,2\n0,3\n1,2\n1,3\n2,3\n",
    );
    let out = dir.path().join("fair.csv");
    let args = ["recover", "--nodes", p(&n), "--edges", p(&e), "--method", "davids-score", "--out", p(&out)];
    let fair = ["--postprocess", "fair", "--p", "0.9", "--alpha", "0.1"];
    let (code, _, err) = run(&[&args[..], &fair[..]].concat());
    assert_eq!(code, 2);
    assert!(err.contains("infeasible"), "{err}");
    let (code, _, err) = run(&[&args[..], &fair[..], &["--fill-exhausted"]].concat());
    assert_eq!(code, 0, "{err}");
    // Minimum protected counts per prefix are 1, 1, 2, 3.
    assert_eq!(recovered_order(&out), [2, 0, 3, 1]);

    let (code, _, err) = run(&[&args[..], &["--postprocess", "fair"]].concat());
    assert_eq!(code, 1);
    assert!(err.contains("--p"), "{err}");
}

#[test]
fn unknown_method_lists_choices() {
    let dir = tempfile::tempdir().unwrap();
    let (n, e) = dataset(dir.path(), "id,group,score\n0,privileged,2\n1,unprivileged,1\n", "winner,loser\n0,1\n");
    let out = dir.path().join("x.csv");
    let (code, _, err) = run(&["recover", "--nodes", p(&n), "--edges", p(&e), "--method", "borda", "--out", p(&out)]);
    assert_eq!(code, 1);
    for name in ["random", "davids-score", "rank-centrality", "serial-rank", "fair-pagerank"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn malformed_edges_report_line() {
    let dir = tempfile::tempdir().unwrap();
    let (n, e) = dataset(dir.path(), "id,group,score\n0,privileged,2\n1,unprivileged,1\n", "winner,loser\n0,1\n1,7\n");
    let out = dir.path().join("x.csv");
    let (code, _, err) = run(&["recover", "--nodes", p(&n), "--edges", p(&e), "--method", "davids-score", "--out", p(&out)]);
    assert_eq!(code, 1);
    assert!(err.contains(":3"), "{err}");
}

fn count(hay: &str, needle: &str) -> usize {
    hay.matches(needle).count()
}

#[test]
fn plot_draws_one_series_per_table() {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, _, a) = simulate(dir.path(), "first", CONFIG);
    let (_, _, _, b) = simulate(dir.path(), "second", &CONFIG.replace("seed = 11", "seed = 5"));
    let (a, b) = (a.join("aggregate.csv"), b.join("aggregate.csv"));

    let one = dir.path().join("one.svg");
    let (code, _, err) = run(&["plot", "--inputs", p(&a), "--out", p(&one)]);
    assert_eq!(code, 0, "{err}");
    let svg = std::fs::read_to_string(&one).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(count(&svg, "class=\"panel\""), 3);
    assert_eq!(count(&svg, "class=\"legend-entry\""), 1);
    assert!(svg.contains(">first<"));

    let two = dir.path().join("two.svg");
    let (code, _, _) = run(&["plot", "--inputs", p(&a), p(&b), "--out", p(&two)]);
    assert_eq!(code, 0);
    let svg = std::fs::read_to_string(&two).unwrap();
    assert_eq!(count(&svg, "class=\"legend-entry\""), 2);
    let (c0, c1) = (fairrank::cli::plot::color(0), fairrank::cli::plot::color(1));
    assert_ne!(c0, c1);
    assert!(svg.contains(c0) && svg.contains(c1));
}

#[test]
fn plot_rejects_empty_and_mismatched_tables() {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, _, a) = simulate(dir.path(), "ok", CONFIG);

    let empty = dir.path().join("empty.csv");
    let header = std::fs::read_to_string(a.join("aggregate.csv")).unwrap();
    std::fs::write(&empty, format!("{}\n", header.lines().next().unwrap())).unwrap();
    let out = dir.path().join("e.svg");
    let (code, _, err) = run(&["plot", "--inputs", p(&empty), "--out", p(&out)]);
    assert_eq!(code, 1, "{err}");
    assert!(!out.exists());

    // A raw table is not an aggregate table.
    let (code, _, err) = run(&["plot", "--inputs", p(&a.join("raw.csv")), "--out", p(&out)]);
    assert_eq!(code, 1, "{err}");
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).0, 1);
    assert_eq!(run(&["simulate"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}
