use serde::{Deserialize, Serialize};
use wavechaos::io::samples_to_csv;
use wavechaos::rmt_mc::{preset, Ensemble, EnsembleConfig};
use wavechaos::Result;

use wavechaos::scattering_stats::Bootstrap;

use crate::analyze::summarize;
use crate::commands::{value, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmtRun {
    /// Preset the channel model came from, if any.
    pub preset: Option<String>,
    pub ensemble: EnsembleConfig,
}

impl RmtRun {
    pub fn from_preset(name: &str, beta: u8, n_samples: usize, seed: u64) -> Result<Self> {
        Ok(RmtRun {
            preset: Some(name.to_string()),
            ensemble: EnsembleConfig::new(beta, preset(name)?, n_samples, seed),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = &self.preset {
            preset(p)?;
        }
        if self.ensemble.n_samples == 0 {
            return Err(wavechaos::Error::invalid("n_samples", "need at least one sample"));
        }
        self.ensemble.validate()
    }

    pub(crate) fn execute(&self) -> Result<Outcome> {
        let ens = Ensemble::new(self.ensemble)?;
        let samples = ens.samples()?;
        let mut out = Outcome::default();
        let (mut results, warnings) = summarize(&samples, Bootstrap::default())?;
        results["gamma"] = serde_json::json!(self.ensemble.channels.gamma());
        results["calibration"] = value(&ens.calibration);
        results["shift"] = serde_json::json!(ens.shift);
        out.warnings = warnings;
        out.results = results;
        out.outputs.add("samples.csv", samples_to_csv(&samples)?);
        Ok(out)
    }
}
