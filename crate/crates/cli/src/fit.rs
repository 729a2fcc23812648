use serde::{Deserialize, Serialize};
use wavechaos::io::Table;
use wavechaos::scattering_stats::{
    estimate_distribution, fit_gamma, k_ab_parts, EstimatorConfig, FitConfig, FitInput, KMatrix, KMode,
};
use wavechaos::theory_density::MarginalCurve;
use wavechaos::{Error, Result, TheoryParams64};

use crate::analyze::load_k;
use crate::commands::{to_json, value, Outcome};
use crate::inputs::{InputKind, InputRef};

/// Bootstrap group of a sample: its (source, realization) pair.
pub(crate) fn group_keys(ks: &[KMatrix<f64>]) -> Vec<u64> {
    ks.iter()
        .map(|k| ((k.tag.source as u64) << 56) ^ k.tag.realization)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRun {
    pub input: InputRef,
    /// Used only when the input holds S samples.
    pub k_mode: KMode,
    pub fit: FitConfig,
    /// Histogram written next to the fitted curve.
    pub estimator: EstimatorConfig,
}

impl FitRun {
    pub fn validate(&self) -> Result<()> {
        if self.input.kind == InputKind::Curve {
            return Err(Error::invalid("input", "fit needs samples, not a curve"));
        }
        self.input.check()?;
        let (lo, hi) = self.fit.bounds;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::invalid("bounds", format!("need 0 < lo < hi, got ({lo}, {hi})")));
        }
        if let Some(h) = &self.fit.channels {
            for (n, t) in [("t_a", h.t_a), ("t_b", h.t_b)] {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::invalid(n, format!("must lie in [0, 1], got {t}")));
                }
            }
            if h.m == 0 {
                return Err(Error::invalid("m", "need at least one parasitic channel"));
            }
        }
        Ok(())
    }

    pub(crate) fn execute(&self) -> Result<Outcome> {
        let mut out = Outcome::default();
        out.inputs.push(self.input.check()?);
        let ks = load_k(&self.input, self.k_mode)?;
        let (re, im) = k_ab_parts(&ks);
        let groups = group_keys(&ks);
        let fit = fit_gamma(FitInput { re: &re, im: &im, groups: Some(&groups) }, &self.fit)?;
        out.warnings.extend(fit.warnings.iter().cloned());
        let pooled: Vec<f64> = re.iter().chain(&im).copied().collect();
        let hist = estimate_distribution(&pooled, &self.estimator)?;
        let curve = MarginalCurve::new(TheoryParams64::from_gamma(fit.gamma_hat)?)?;
        let mut t = Table::new(&["u", "empirical", "theory"]);
        for (u, p) in hist.centers().into_iter().zip(&hist.densities) {
            t.push(vec![u, *p, curve.density(u)]);
        }
        out.outputs.add("fit_curve.csv", t.to_csv()?);
        out.outputs.add("fit.json", to_json(&fit)?);
        out.results = value(&fit);
        Ok(out)
    }
}
