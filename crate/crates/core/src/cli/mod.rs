//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for invalid input or configuration, 2 for
//! runtime failures (non-convergence, infeasible constraints, failed trials).

pub mod plot;
pub mod results;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::metrics::{self, MetricsRecord};
use crate::pipeline::{load_empirical, Experiment, ExperimentConfig};
use crate::postprocess::{EpiraConfig, FairConfig, PostProcess};
use crate::ranking::Ranking;
use crate::recovery::RecoveryMethod;
use crate::rng::SeededRng;
use crate::synth::{self, logistic, CalibrationTarget, DistributionSpec};

#[derive(Debug, Parser)]
#[command(name = "fairrank", version, about = "Simulate biased pairwise comparisons and recover fair rankings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for distribution parameters matching target win probabilities.
    Calibrate {
        #[arg(long)]
        p_stronger: f64,
        #[arg(long)]
        p_discr: f64,
        #[arg(long, default_value_t = synth::DEFAULT_QUADRATURE_POINTS)]
        points: usize,
        #[arg(long, default_value_t = synth::DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Pairs drawn for the Monte-Carlo check.
        #[arg(long, default_value_t = 1_000_000)]
        mc_pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an experiment described by a TOML file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recover a ranking from a full comparison dataset.
    Recover {
        #[arg(long)]
        nodes: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long, value_enum)]
        postprocess: Option<PostProcessName>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        bnd: Option<f64>,
        /// With fair: once the unprivileged group runs out, fill the rest of
        /// the ranking instead of failing.
        #[arg(long)]
        fill_exhausted: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw aggregate tables as an SVG figure.
    Plot {
        #[arg(long, required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PostProcessName {
    Fair,
    Epira,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        1
    } else {
        2
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Calibrate {
            p_stronger,
            p_discr,
            points,
            tolerance,
            mc_pairs,
            seed,
        } => cmd_calibrate(p_stronger, p_discr, points, tolerance, mc_pairs, seed, out),
        Command::Simulate { config, out: dir, seed } => cmd_simulate(&config, &dir, seed, out),
        Command::Recover {
            nodes,
            edges,
            method,
            postprocess,
            p,
            alpha,
            bnd,
            fill_exhausted,
            out: path,
            seed,
        } => {
            let method: RecoveryMethod = method.parse()?;
            let post = postprocess_from_flags(postprocess, p, alpha, bnd, fill_exhausted)?;
            cmd_recover(&nodes, &edges, &method, &post, &path, seed, out)
        }
        Command::Plot { inputs, out: path } => cmd_plot(&inputs, &path),
    }
}

fn postprocess_from_flags(
    name: Option<PostProcessName>,
    p: Option<f64>,
    alpha: Option<f64>,
    bnd: Option<f64>,
    fill_exhausted: bool,
) -> Result<PostProcess> {
    if fill_exhausted && name != Some(PostProcessName::Fair) {
        return Err(Error::invalid("--fill-exhausted applies to --postprocess fair"));
    }
    let post = match name {
        None => {
            if p.is_some() || alpha.is_some() || bnd.is_some() {
                return Err(Error::invalid("--p, --alpha and --bnd need --postprocess"));
            }
            PostProcess::None
        }
        Some(PostProcessName::Fair) => {
            if bnd.is_some() {
                return Err(Error::invalid("--bnd applies to --postprocess epira"));
            }
            match (p, alpha) {
                (Some(p), Some(alpha)) => {
                    let mut config = FairConfig::new(p, alpha);
                    if fill_exhausted {
                        config = config.continue_when_exhausted();
                    }
                    PostProcess::Fair(config)
                }
                _ => return Err(Error::invalid("--postprocess fair needs --p and --alpha")),
            }
        }
        Some(PostProcessName::Epira) => {
            if p.is_some() || alpha.is_some() {
                return Err(Error::invalid("--p and --alpha apply to --postprocess fair"));
            }
            match bnd {
                Some(bnd) => PostProcess::Epira(EpiraConfig::new(bnd)),
                None => return Err(Error::invalid("--postprocess epira needs --bnd")),
            }
        }
    };
    post.validate()?;
    Ok(post)
}

/// Monte-Carlo estimates of `(p_stronger, p_discr)` under `spec`, from
/// `pairs` simulated judgments each.
pub fn monte_carlo_probabilities(spec: &DistributionSpec, pairs: usize, rng: &mut SeededRng) -> Result<(f64, f64)> {
    if pairs == 0 {
        return Err(Error::invalid("Monte-Carlo check needs at least one pair"));
    }
    let skill = Normal::new(spec.mu_skill, spec.sigma_skill).map_err(|e| Error::invalid(e.to_string()))?;
    let bias = Normal::new(spec.mu_bias, spec.sigma_bias).map_err(|e| Error::invalid(e.to_string()))?;
    let (mut stronger, mut discr) = (0usize, 0usize);
    for _ in 0..pairs {
        let (a, b) = (skill.sample(rng), skill.sample(rng));
        if rng.uniform() < logistic((a - b).abs()) {
            stronger += 1;
        }
        let (p, u) = (skill.sample(rng), skill.sample(rng) + bias.sample(rng));
        if rng.uniform() < logistic(p - u) {
            discr += 1;
        }
    }
    Ok((stronger as f64 / pairs as f64, discr as f64 / pairs as f64))
}

pub fn cmd_calibrate(
    p_stronger: f64,
    p_discr: f64,
    points: usize,
    tolerance: f64,
    mc_pairs: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<()> {
    let spec = synth::calibrate(CalibrationTarget { p_stronger, p_discr }, points, tolerance)?;
    let (ms, md) = monte_carlo_probabilities(&spec, mc_pairs, &mut SeededRng::new(seed))?;
    writeln!(out, "sigma_skill = {}", spec.sigma_skill)?;
    writeln!(out, "mu_bias = {}", spec.mu_bias)?;
    writeln!(out, "sigma_bias = {}", spec.sigma_bias)?;
    writeln!(out, "monte_carlo_pairs = {mc_pairs}")?;
    writeln!(out, "p_stronger: target {p_stronger}, simulated {ms:.4}")?;
    writeln!(out, "p_discr: target {p_discr}, simulated {md:.4}")?;
    Ok(())
}

pub fn cmd_simulate(config_path: &Path, out_dir: &Path, seed: Option<u64>, out: &mut dyn Write) -> Result<()> {
    let mut config = ExperimentConfig::load(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let fingerprint = config.fingerprint();
    let experiment = Experiment::prepare(config)?;
    let trials = experiment.config().trials;
    let (completed, failure) = match experiment.run() {
        Ok(r) => (r.trials, None),
        Err(f) => (f.completed, Some(f.failures)),
    };
    fs::create_dir_all(out_dir)?;
    let rows = crate::pipeline::aggregate(&completed);
    results::write_raw(fs::File::create(out_dir.join("raw.csv"))?, &fingerprint, &completed)?;
    results::write_aggregate(
        fs::File::create(out_dir.join("aggregate.csv"))?,
        &fingerprint,
        completed.len(),
        &rows,
    )?;
    writeln!(out, "fingerprint {fingerprint}")?;
    writeln!(out, "{} of {trials} trials completed", completed.len())?;
    match failure {
        None => Ok(()),
        Some(mut failures) => {
            for f in &failures[1..] {
                writeln!(out, "trial failed: {f}")?;
            }
            Err(failures.swap_remove(0))
        }
    }
}

pub fn cmd_recover(
    nodes: &Path,
    edges: &Path,
    method: &RecoveryMethod,
    post: &PostProcess,
    out_path: &Path,
    seed: u64,
    out: &mut dyn Write,
) -> Result<()> {
    method.validate()?;
    let (population, graph) = load_empirical(nodes, edges)?;
    let labels = population.labels();
    let mut rng = SeededRng::new(seed);
    let scores = method.recover(&graph, &labels, &mut rng)?;
    let mut ranking = Ranking::from_scores(scores, &mut rng)?;
    if !post.is_none() {
        ranking = post.apply(&ranking, &labels)?;
    }
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(out_path)?;
    wtr.write_record(["id", "rank", "score", "group"])?;
    for id in ranking.order() {
        wtr.write_record([
            id.to_string(),
            ranking.rank(id).to_string(),
            format!("{}", ranking.scores()[id]),
            labels[id].as_str().to_string(),
        ])?;
    }
    wtr.flush()?;
    let record = metrics::evaluate(&population.skills(), &labels, &ranking, 0, 0)?;
    for (name, value) in MetricsRecord::METRICS.iter().zip(record.values()) {
        writeln!(out, "{name} = {value}")?;
    }
    Ok(())
}

pub fn cmd_plot(inputs: &[PathBuf], out_path: &Path) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::invalid("plot needs at least one input table"));
    }
    let mut tables = Vec::with_capacity(inputs.len());
    for path in inputs {
        let rows = results::read_aggregate(path)?;
        if rows.is_empty() {
            return Err(Error::invalid(format!("{} has no rows", path.display())));
        }
        tables.push(rows);
    }
    let series: Vec<plot::Series<'_>> = inputs
        .iter()
        .zip(&tables)
        .map(|(path, rows)| plot::Series {
            label: series_label(path),
            rows,
        })
        .collect();
    fs::write(out_path, plot::render(&series))?;
    Ok(())
}

// `runs/rank-centrality/aggregate.csv` is labelled `rank-centrality`.
fn series_label(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if stem == "aggregate" {
        if let Some(parent) = path.parent().and_then(Path::file_name) {
            return parent.to_string_lossy().into_owned();
        }
    }
    stem
}
