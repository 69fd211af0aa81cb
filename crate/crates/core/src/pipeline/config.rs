use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::postprocess::PostProcess;
use crate::recovery::RecoveryMethod;
use crate::sampling::SamplingStrategy;
use crate::synth::{self, CalibrationTarget, DistributionSpec};

fn default_unpriv_fraction() -> f64 {
    0.5
}
fn default_points() -> usize {
    synth::DEFAULT_QUADRATURE_POINTS
}
fn default_tolerance() -> f64 {
    synth::DEFAULT_TOLERANCE
}
fn default_checkpoint_every() -> usize {
    10
}
fn default_true() -> bool {
    true
}

/// Where the skill and bias distributions come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSource {
    /// Solve for parameters from target win probabilities.
    Calibrated {
        p_stronger: f64,
        p_discr: f64,
        /// Overrides the default `sigma_skill / 2`. The bias mean is still
        /// solved for `p_discr`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma_bias: Option<f64>,
        #[serde(default = "default_points")]
        quadrature_points: usize,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
    },
    Explicit(DistributionSpec),
}

impl DistributionSource {
    pub fn calibrated(p_stronger: f64, p_discr: f64) -> Self {
        DistributionSource::Calibrated {
            p_stronger,
            p_discr,
            sigma_bias: None,
            quadrature_points: default_points(),
            tolerance: default_tolerance(),
        }
    }

    pub fn resolve(&self) -> Result<DistributionSpec> {
        match *self {
            DistributionSource::Explicit(spec) => {
                spec.validate()?;
                Ok(spec)
            }
            DistributionSource::Calibrated {
                p_stronger,
                p_discr,
                sigma_bias,
                quadrature_points,
                tolerance,
            } => {
                let target = CalibrationTarget { p_stronger, p_discr };
                match sigma_bias {
                    None => synth::calibrate(target, quadrature_points, tolerance),
                    Some(sb) => synth::calibrate_with_sigma_bias(target, sb, quadrature_points, tolerance),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Mode {
    Synthetic {
        n: usize,
        #[serde(default = "default_unpriv_fraction")]
        unpriv_fraction: f64,
        distribution: DistributionSource,
    },
    Empirical {
        nodes_path: PathBuf,
        edges_path: PathBuf,
        budget_per_iteration: usize,
    },
}

/// When the method under test is run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoverSchedule {
    #[default]
    EveryIteration,
    /// Only at checkpoints, unless rank-based sampling needs the ranking.
    Checkpoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub sampling: SamplingStrategy,
    pub recovery: RecoveryMethod,
    #[serde(default)]
    pub postprocess: PostProcess,
    pub iterations: usize,
    pub trials: usize,
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: usize,
    pub seed: u64,
    #[serde(default)]
    pub recover_every: RecoverSchedule,
    /// Method whose ranking drives rank-based sampling; defaults to the
    /// method under test.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback_method: Option<RecoveryMethod>,
    /// Feed the post-processed (rather than raw) ranking back into sampling.
    #[serde(default = "default_true")]
    pub postprocess_in_feedback: bool,
}

impl ExperimentConfig {
    /// Synthetic experiment with the given population source and defaults
    /// elsewhere.
    pub fn synthetic(
        n: usize,
        distribution: DistributionSource,
        sampling: SamplingStrategy,
        recovery: RecoveryMethod,
    ) -> Self {
        Self {
            mode: Mode::Synthetic {
                n,
                unpriv_fraction: default_unpriv_fraction(),
                distribution,
            },
            sampling,
            recovery,
            postprocess: PostProcess::None,
            iterations: 500,
            trials: 10,
            checkpoint_every: default_checkpoint_every(),
            seed: 0,
            recover_every: RecoverSchedule::EveryIteration,
            feedback_method: None,
            postprocess_in_feedback: true,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.iterations == 0 {
            return cfg("iterations must be at least 1");
        }
        if self.trials == 0 {
            return cfg("trials must be at least 1");
        }
        if self.checkpoint_every == 0 || self.iterations % self.checkpoint_every != 0 {
            return cfg("checkpoint_every must be positive and divide iterations");
        }
        let field = |name: &str, e: Error| Error::Config(format!("{name}: {e}"));
        self.sampling.validate().map_err(|e| field("sampling", e))?;
        self.recovery.validate().map_err(|e| field("recovery", e))?;
        self.postprocess.validate().map_err(|e| field("postprocess", e))?;
        if let Some(m) = &self.feedback_method {
            m.validate().map_err(|e| field("feedback_method", e))?;
        }
        match &self.mode {
            Mode::Synthetic {
                n, unpriv_fraction, ..
            } => {
                if *n < 2 {
                    return cfg("mode.n must be at least 2");
                }
                if !(*unpriv_fraction > 0.0 && *unpriv_fraction < 1.0) {
                    return cfg("mode.unpriv_fraction must lie in (0, 1)");
                }
                self.sampling
                    .sample_size(*n)
                    .map_err(|e| field("sampling", e))?;
            }
            Mode::Empirical {
                budget_per_iteration,
                ..
            } => {
                if *budget_per_iteration == 0 {
                    return cfg("mode.budget_per_iteration must be at least 1");
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form (keys sorted), as hex.
    pub fn fingerprint(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("json value serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn is_checkpoint(&self, iteration: usize) -> bool {
        iteration % self.checkpoint_every == 0
    }
}
