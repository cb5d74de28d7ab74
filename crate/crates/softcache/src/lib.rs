//! Experiment driver for `softcache-core`: file formats, JSON configs,
//! figure-style sweeps and gain reports. The `softcache` binary exposes
//! these as subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiment;
pub mod formats;
pub mod gains;
pub mod scenario;

use std::fmt;
use std::path::PathBuf;

pub use config::ExperimentConfig;
pub use experiment::{run_experiment, Manifest};
pub use gains::{report_gains, GainRow};

/// Pipeline stage an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Catalog,
    Graph,
    Ingest,
    Solve,
    Trace,
    Simulate,
    Sweep,
    Report,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Catalog => "catalog",
            Stage::Graph => "graph",
            Stage::Ingest => "ingest",
            Stage::Solve => "solve",
            Stage::Trace => "trace",
            Stage::Simulate => "simulate",
            Stage::Sweep => "sweep",
            Stage::Report => "report",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub struct StageError {
    pub stage: Stage,
    pub config: Option<PathBuf>,
    #[source]
    pub source: anyhow::Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.stage)?;
        if let Some(path) = &self.config {
            write!(f, " ({})", path.display())?;
        }
        write!(f, " {:#}", self.source)
    }
}

/// Tags an error with the stage it came from.
pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T, StageError>;
}

impl<T, E: Into<anyhow::Error>> StageExt<T> for Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T, StageError> {
        self.map_err(|e| StageError {
            stage,
            config: None,
            source: e.into(),
        })
    }
}
