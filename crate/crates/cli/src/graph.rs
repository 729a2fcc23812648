use std::sync::Arc;

use serde::{Deserialize, Serialize};
use wavechaos::graph_sim::{
    ensemble_sweep, generate_realizations, ghz_to_wavenumber, network_preset, CompiledNetwork,
    NetworkSpec,
};
use wavechaos::io::samples_to_csv;
use wavechaos::{Error, Result};

use wavechaos::scattering_stats::Bootstrap;

use crate::analyze::summarize;
use crate::commands::Outcome;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRun {
    /// Preset the network came from, if any.
    pub preset: Option<String>,
    pub network: NetworkSpec,
    pub realizations: usize,
    pub seed: u64,
    pub f_min_ghz: f64,
    pub f_max_ghz: f64,
    pub points: usize,
}

impl GraphRun {
    /// Preset run with the measured ensemble size of each network.
    pub fn from_preset(name: &str, seed: u64) -> Result<Self> {
        let network = network_preset(name)?;
        let realizations = if name == "hexagon" { 983 } else { 1500 };
        Ok(GraphRun {
            preset: Some(name.to_string()),
            network,
            realizations,
            seed,
            f_min_ghz: 3.0,
            f_max_ghz: 7.0,
            points: 200,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        if self.realizations == 0 {
            return Err(Error::invalid("realizations", "need at least one realization"));
        }
        if self.points == 0 {
            return Err(Error::invalid("points", "need at least one frequency point"));
        }
        if !(self.f_min_ghz > 0.0 && self.f_min_ghz < self.f_max_ghz) {
            return Err(Error::invalid(
                "frequency window",
                format!("need 0 < f_min < f_max, got [{}, {}] GHz", self.f_min_ghz, self.f_max_ghz),
            ));
        }
        if let Some(coax) = &self.network.coax {
            let cut = coax.cutoff_ghz();
            if self.f_max_ghz >= cut {
                return Err(Error::invalid(
                    "f_max",
                    format!("{} GHz is above the coax cutoff {cut:.2} GHz", self.f_max_ghz),
                ));
            }
        }
        if self.network.shifter_edges.len() < 2 {
            return Err(Error::invalid("shifter_edges", "ensembles need at least two shifter edges"));
        }
        Ok(())
    }

    pub(crate) fn execute(&self) -> Result<Outcome> {
        let net = Arc::new(CompiledNetwork::new(self.network.clone())?);
        let realizations = generate_realizations(&net, self.realizations, self.seed)?;
        let window = (ghz_to_wavenumber(self.f_min_ghz), ghz_to_wavenumber(self.f_max_ghz));
        let (samples, jittered) = ensemble_sweep(&realizations, window, self.points)?;
        let mut out = Outcome::default();
        let (mut results, warnings) = summarize(&samples, Bootstrap::default())?;
        results["k_window"] = serde_json::json!([window.0, window.1]);
        results["pole_retries"] = serde_json::json!(jittered.len());
        out.warnings = warnings;
        if !jittered.is_empty() {
            out.notes.push(format!("{} evaluations were moved off a pole by k jitter", jittered.len()));
        }
        out.results = results;
        out.outputs.add("samples.csv", samples_to_csv(&samples)?);
        Ok(out)
    }
}
