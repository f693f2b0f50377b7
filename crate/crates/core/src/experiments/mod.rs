//! Reproducible harnesses. Each takes a validated configuration and a seed
//! and returns an [`ExperimentReport`]; trials run in parallel on seeds
//! derived from `(seed, label, trial)` and are assembled in trial order, so
//! reports are identical across runs and thread counts (wall time aside).

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::ExperimentReport;

mod core_lemma;
mod global_vr;
mod higher_sphere;
mod projection;
mod schedule;
mod sections;
mod two_bodies;

pub use core_lemma::{run_core_lemma, sphere_centered_cover, CoreLemmaConfig};
pub use global_vr::{run_global_vr, GlobalVrConfig};
pub use higher_sphere::{run_higher_sphere, HigherSphereConfig, SetSpec};
pub use projection::{run_projection, ProjectionConfig};
pub use schedule::{theorem_schedule, ScheduleConfig, ScheduleParams, PROVEN_A_BOUND};
pub use sections::{run_sections, SectionsConfig};
pub use two_bodies::{run_two_bodies, BodiesConfig, Dims, Mode, TwoBodiesConfig};

/// The harness names accepted by [`run_experiment`] and the CLI.
pub const EXPERIMENTS: [&str; 6] = ["two-bodies", "sections", "core", "higher-sphere", "projection", "global-vr"];

/// A parsed configuration for any harness.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ExperimentConfig {
    TwoBodies(TwoBodiesConfig),
    Sections(SectionsConfig),
    Core(CoreLemmaConfig),
    HigherSphere(HigherSphereConfig),
    Projection(ProjectionConfig),
    GlobalVr(GlobalVrConfig),
}

impl ExperimentConfig {
    pub fn parse(kind: &str, text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if !value.is_object() {
            return Err(Error::Config("configuration must be a JSON object".into()));
        }
        fn typed<T: DeserializeOwned>(text: &str) -> Result<T> {
            Ok(serde_json::from_str(text)?)
        }
        let cfg = match kind {
            "two-bodies" => Self::TwoBodies(typed(text)?),
            "sections" => Self::Sections(typed(text)?),
            "core" => Self::Core(typed(text)?),
            "higher-sphere" => Self::HigherSphere(typed(text)?),
            "projection" => Self::Projection(typed(text)?),
            "global-vr" => Self::GlobalVr(typed(text)?),
            other => {
                return Err(Error::Config(format!(
                    "unknown experiment '{other}', expected one of {}",
                    EXPERIMENTS.join(", ")
                )))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::TwoBodies(_) => "two-bodies",
            Self::Sections(_) => "sections",
            Self::Core(_) => "core",
            Self::HigherSphere(_) => "higher-sphere",
            Self::Projection(_) => "projection",
            Self::GlobalVr(_) => "global-vr",
        }
    }

    /// Schema checks that need no heavy computation (the schedule included).
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::TwoBodies(c) => c.validate(),
            Self::Sections(c) => c.validate(),
            Self::Core(c) => c.validate(),
            Self::HigherSphere(c) => c.validate(),
            Self::Projection(c) => c.validate(),
            Self::GlobalVr(c) => c.validate(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Reads and validates the configuration of harness `kind` from `path`.
/// Unknown keys are rejected by name; parse errors carry line and column.
pub fn load_config(path: &Path, kind: &str) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    ExperimentConfig::parse(kind, &text).map_err(|e| match e {
        Error::Json(j) => Error::Config(format!("{}: {j}", path.display())),
        other => other,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    match cfg {
        ExperimentConfig::TwoBodies(c) => run_two_bodies(c, seed),
        ExperimentConfig::Sections(c) => run_sections(c, seed),
        ExperimentConfig::Core(c) => run_core_lemma(c, seed),
        ExperimentConfig::HigherSphere(c) => run_higher_sphere(c, seed),
        ExperimentConfig::Projection(c) => run_projection(c, seed),
        ExperimentConfig::GlobalVr(c) => run_global_vr(c, seed),
    }
}

pub(crate) fn echo<T: Serialize>(cfg: &T) -> serde_json::Value {
    serde_json::to_value(cfg).expect("configurations serialize")
}

/// Runs `trial(i)` for `i < trials` in parallel, in trial order.
pub(crate) fn run_trials<T, F>(trials: usize, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    (0..trials).into_par_iter().map(|i| trial(i)).collect()
}

pub(crate) struct Clock(Instant);

impl Clock {
    pub fn start() -> Self {
        Clock(Instant::now())
    }

    pub fn finish(self, mut report: ExperimentReport) -> ExperimentReport {
        report.wall_time_secs = self.0.elapsed().as_secs_f64();
        report
    }
}

pub(crate) fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::spec(field, format!("must be positive and finite, got {v}")))
    }
}

fn default_trials() -> usize {
    200
}

fn default_samples() -> usize {
    200_000
}

fn default_section_bound() -> Option<f64> {
    Some(1.0)
}
