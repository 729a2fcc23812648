use serde::{Deserialize, Serialize};
use wavechaos::io::{k_samples_to_csv, SampleFile, Table};
use wavechaos::scattering_stats::{
    direct_process_check, enhancement_factor, estimate_distribution, k_ab_parts, k_samples, s_ab_parts,
    transmission_coefficient, Bootstrap, DistributionEstimate, EstimatorConfig, KMatrix, KMode, Port, TwoPort,
    MIN_DIRECT_SAMPLES, MIN_ENHANCEMENT_SAMPLES,
};
use wavechaos::{Error, Result};

use crate::commands::{to_json, value, Outcome};
use crate::inputs::{InputKind, InputRef};

/// Transmission, enhancement and direct-process summary of an S ensemble.
pub(crate) fn summarize(samples: &[TwoPort<f64>], boot: Bootstrap) -> Result<(serde_json::Value, Vec<String>)> {
    let mut warnings = Vec::new();
    let mut groups: Vec<(u8, u64)> = samples
        .iter()
        .map(|s| (s.tag.source as u8, s.tag.realization))
        .collect();
    groups.sort_unstable();
    groups.dedup();
    let mut r = serde_json::json!({
        "samples": samples.len(),
        "realizations": groups.len(),
        "t_a": transmission_coefficient(samples, Port::A)?,
        "t_b": transmission_coefficient(samples, Port::B)?,
    });
    if samples.len() >= MIN_ENHANCEMENT_SAMPLES {
        r["enhancement"] = value(&enhancement_factor(samples, boot)?);
    } else {
        warnings.push(format!("W skipped: {} samples < {MIN_ENHANCEMENT_SAMPLES}", samples.len()));
    }
    if samples.len() >= MIN_DIRECT_SAMPLES {
        let report = direct_process_check(samples)?;
        warnings.extend(report.warning());
        r["direct_process"] = value(&report);
    }
    Ok((r, warnings))
}

fn distribution_table(d: &DistributionEstimate) -> Table {
    let mut t = Table::new(&["lo", "hi", "center", "density"]);
    for (i, &p) in d.densities.iter().enumerate() {
        let (lo, hi) = (d.edges[i], d.edges[i + 1]);
        t.push(vec![lo, hi, 0.5 * (lo + hi), p]);
    }
    t
}

/// Loads every input as S samples. Touchstone file `i` is realization `i`.
pub(crate) fn load_s(inputs: &[InputRef]) -> Result<Vec<TwoPort<f64>>> {
    let mut all = Vec::new();
    for (i, input) in inputs.iter().enumerate() {
        match input.load(i as u64)? {
            SampleFile::S(s) => all.extend(s),
            SampleFile::K(_) => {
                return Err(Error::invalid(
                    "input",
                    format!("{} holds K samples; analyze needs S samples", input.path.display()),
                ))
            }
        }
    }
    Ok(all)
}

/// K samples from either schema; S files go through `k_from_s` with `mode`.
pub(crate) fn load_k(input: &InputRef, mode: KMode) -> Result<Vec<KMatrix<f64>>> {
    match input.load(0)? {
        SampleFile::K(k) => Ok(k),
        SampleFile::S(s) => k_samples(&s, mode),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeRun {
    pub inputs: Vec<InputRef>,
    pub k_mode: KMode,
    pub estimator: EstimatorConfig,
    pub bootstrap: Bootstrap,
}

impl AnalyzeRun {
    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::invalid("inputs", "need at least one sample file"));
        }
        for i in &self.inputs {
            if i.kind == InputKind::Curve {
                return Err(Error::invalid("inputs", format!("{} is a curve file", i.path.display())));
            }
            i.check()?;
        }
        if self.bootstrap.resamples < 2 {
            return Err(Error::invalid("bootstrap.resamples", "need at least 2"));
        }
        Ok(())
    }

    pub(crate) fn execute(&self) -> Result<Outcome> {
        let mut out = Outcome::default();
        for i in &self.inputs {
            out.inputs.push(i.check()?);
        }
        let samples = load_s(&self.inputs)?;
        if samples.is_empty() {
            return Err(Error::invalid("inputs", "no samples"));
        }
        let (mut results, warnings) = summarize(&samples, self.bootstrap)?;
        out.warnings = warnings;
        let ks = k_samples(&samples, self.k_mode)?;
        results["k_mode"] = serde_json::json!(self.k_mode.as_str());
        if self.k_mode != KMode::Raw {
            out.notes.push(format!("K computed from {} S", self.k_mode.as_str()));
        }
        let (kre, kim) = k_ab_parts(&ks);
        let (sre, sim) = s_ab_parts(&samples);
        let mut dists = serde_json::Map::new();
        for (name, v) in [("re_kab", &kre), ("im_kab", &kim), ("re_sab", &sre), ("im_sab", &sim)] {
            let d = estimate_distribution(v, &self.estimator)?;
            dists.insert(
                name.into(),
                serde_json::json!({ "bins": d.densities.len(), "bandwidth": d.bandwidth }),
            );
            out.outputs.add(format!("dist_{name}.csv"), distribution_table(&d).to_csv()?);
        }
        results["distributions"] = serde_json::Value::Object(dists);
        out.outputs.add("k_samples.csv", k_samples_to_csv(&ks)?);
        out.outputs.add("analysis.json", to_json(&results)?);
        out.results = results;
        Ok(out)
    }
}
