use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use wavechaos::io::{FileDigest, OutputSet, RunManifest};
use wavechaos::{Error, ErrorCategory};

use crate::{AnalyzeRun, CompareRun, FitRun, GraphRun, RmtRun, TheoryRun};
use crate::{EXIT_IO, EXIT_NUMERIC, EXIT_VALIDATION};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("replay differs from the manifest: {}", .0.join("; "))]
    ReplayMismatch(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.category() {
                ErrorCategory::Validation => EXIT_VALIDATION,
                ErrorCategory::Numeric => EXIT_NUMERIC,
                ErrorCategory::Io => EXIT_IO,
            },
            CliError::ReplayMismatch(_) => EXIT_NUMERIC,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandConfig {
    SimulateGraph(GraphRun),
    SimulateRmt(RmtRun),
    Theory(TheoryRun),
    Analyze(AnalyzeRun),
    Fit(FitRun),
    Compare(CompareRun),
}

/// What a command produced before anything is written.
#[derive(Debug, Default)]
pub(crate) struct Outcome {
    pub outputs: OutputSet,
    pub results: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::SimulateGraph(_) => "simulate-graph",
            CommandConfig::SimulateRmt(_) => "simulate-rmt",
            CommandConfig::Theory(_) => "theory",
            CommandConfig::Analyze(_) => "analyze",
            CommandConfig::Fit(_) => "fit",
            CommandConfig::Compare(_) => "compare",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            CommandConfig::SimulateGraph(c) => Some(c.seed),
            CommandConfig::SimulateRmt(c) => Some(c.ensemble.seed),
            CommandConfig::Analyze(c) => Some(c.bootstrap.seed),
            CommandConfig::Fit(c) => Some(c.fit.bootstrap.seed),
            _ => None,
        }
    }

    /// Cheap checks of every parameter and input, run before any compute.
    pub fn validate(&self) -> Result<(), Error> {
        match self {
            CommandConfig::SimulateGraph(c) => c.validate(),
            CommandConfig::SimulateRmt(c) => c.validate(),
            CommandConfig::Theory(c) => c.validate(),
            CommandConfig::Analyze(c) => c.validate(),
            CommandConfig::Fit(c) => c.validate(),
            CommandConfig::Compare(c) => c.validate(),
        }
    }

    fn execute(&self) -> Result<Outcome, Error> {
        match self {
            CommandConfig::SimulateGraph(c) => c.execute(),
            CommandConfig::SimulateRmt(c) => c.execute(),
            CommandConfig::Theory(c) => c.execute(),
            CommandConfig::Analyze(c) => c.execute(),
            CommandConfig::Fit(c) => c.execute(),
            CommandConfig::Compare(c) => c.execute(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub manifest: RunManifest,
    pub written: Vec<PathBuf>,
}

/// Validates, computes, and writes outputs plus `manifest.json` into `out`.
/// Nothing is written unless every step succeeds.
pub fn run(cfg: &CommandConfig, out: &Path) -> Result<RunReport, CliError> {
    let start = Instant::now();
    cfg.validate()?;
    let mut outcome = cfg.execute()?;
    let config = serde_json::to_value(cfg).map_err(|e| Error::invalid("config", e.to_string()))?;
    let manifest = RunManifest {
        tool: "wavechaos".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cfg.name().into(),
        seed: cfg.seed(),
        config,
        inputs: outcome.inputs,
        outputs: outcome.outputs.digests(),
        wall_time_s: start.elapsed().as_secs_f64(),
        warnings: outcome.warnings,
        notes: outcome.notes,
        results: outcome.results,
    };
    outcome.outputs.add(MANIFEST_NAME, manifest.to_json()?);
    let written = outcome.outputs.commit(out)?;
    Ok(RunReport { manifest, written })
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub original: RunManifest,
    pub rerun: RunReport,
}

/// Reruns the command recorded in a manifest and checks that every output
/// file is byte-identical to the recorded digest.
pub fn replay(manifest_path: &Path, out: &Path) -> Result<ReplayReport, CliError> {
    let original = RunManifest::read(manifest_path)?;
    let cfg: CommandConfig = serde_json::from_value(original.config.clone()).map_err(|e| Error::Config {
        location: format!("{}: config", manifest_path.display()),
        reason: e.to_string(),
    })?;
    if cfg.name() != original.command {
        return Err(Error::Config {
            location: format!("{}: command", manifest_path.display()),
            reason: format!("command {:?} does not match config {:?}", original.command, cfg.name()),
        }
        .into());
    }
    let rerun = run(&cfg, out)?;
    let mut diffs = Vec::new();
    for want in &original.outputs {
        match rerun.manifest.outputs.iter().find(|d| d.path == want.path) {
            Some(got) if got.sha256 == want.sha256 => {}
            Some(_) => diffs.push(format!("{} content differs", want.path)),
            None => diffs.push(format!("{} not produced", want.path)),
        }
    }
    for got in &rerun.manifest.outputs {
        if !original.outputs.iter().any(|d| d.path == got.path) {
            diffs.push(format!("{} is new", got.path));
        }
    }
    if !diffs.is_empty() {
        return Err(CliError::ReplayMismatch(diffs));
    }
    Ok(ReplayReport { original, rerun })
}

pub(crate) fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>, Error> {
    let mut b = serde_json::to_vec_pretty(v).map_err(|e| Error::invalid("json", e.to_string()))?;
    b.push(b'\n');
    Ok(b)
}

pub(crate) fn value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}
