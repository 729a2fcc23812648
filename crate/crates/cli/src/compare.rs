use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use wavechaos::io::{read_table, Table};
use wavechaos::scattering_stats::{estimate_distribution, k_ab_parts, ks_statistic, EstimatorConfig, KMode};
use wavechaos::theory_density::{gaussian_baseline, matched_sigma, MarginalCurve};
use wavechaos::{Error, Result, TheoryParams64};

use crate::analyze::load_k;
use crate::commands::{to_json, Outcome};
use crate::inputs::{InputKind, InputRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    Re,
    Im,
    /// Re and Im parts together.
    Pooled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRun {
    pub input: InputRef,
    pub k_mode: KMode,
    pub component: Component,
    /// Exact theory at this `γ`.
    pub gamma: Option<f64>,
    /// Or a curve file from `theory`.
    pub theory_curve: Option<InputRef>,
    pub gaussian: bool,
    pub estimator: EstimatorConfig,
}

/// A theory marginal known either exactly or through a sampled curve.
enum Theory {
    Exact(MarginalCurve<f64>),
    Sampled { u: Vec<f64>, p: Vec<f64>, cdf: Vec<f64> },
}

fn interp(xs: &[f64], ys: &[f64], x: f64, outside: (f64, f64)) -> f64 {
    if x < xs[0] {
        return outside.0;
    }
    if x > xs[xs.len() - 1] {
        return outside.1;
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

impl Theory {
    fn sampled(table: &Table) -> Result<Self> {
        let u = table
            .column("u")
            .ok_or_else(|| Error::invalid("theory_curve", "missing column u"))?;
        let p = table
            .column("density")
            .ok_or_else(|| Error::invalid("theory_curve", "missing column density"))?;
        if u.len() < 3 || u.windows(2).any(|w| w[1] <= w[0]) || p.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::invalid("theory_curve", "need ≥ 3 increasing nodes and non-negative densities"));
        }
        let mut cdf = vec![0.0];
        for i in 1..u.len() {
            cdf.push(cdf[i - 1] + 0.5 * (p[i] + p[i - 1]) * (u[i] - u[i - 1]));
        }
        let total = cdf[cdf.len() - 1];
        cdf.iter_mut().for_each(|c| *c /= total);
        Ok(Theory::Sampled { u, p, cdf })
    }

    fn density(&self, x: f64) -> f64 {
        match self {
            Theory::Exact(c) => c.density(x),
            Theory::Sampled { u, p, .. } => interp(u, p, x, (0.0, 0.0)),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self {
            Theory::Exact(c) => c.cdf(x),
            Theory::Sampled { u, cdf, .. } => interp(u, cdf, x, (0.0, 1.0)),
        }
    }

    fn sigma(&self) -> Result<f64> {
        match self {
            Theory::Exact(c) => matched_sigma(&c.params),
            Theory::Sampled { u, p, .. } => {
                let mut m0 = 0.0;
                let mut m2 = 0.0;
                for i in 1..u.len() {
                    let h = u[i] - u[i - 1];
                    m0 += 0.5 * h * (p[i] + p[i - 1]);
                    m2 += 0.5 * h * (p[i] * u[i] * u[i] + p[i - 1] * u[i - 1] * u[i - 1]);
                }
                Ok((m2 / m0).sqrt())
            }
        }
    }

    fn range(&self) -> (f64, f64) {
        match self {
            Theory::Exact(c) => (-c.support_radius(), c.support_radius()),
            Theory::Sampled { u, .. } => (u[0], u[u.len() - 1]),
        }
    }
}

impl CompareRun {
    pub fn validate(&self) -> Result<()> {
        if self.input.kind == InputKind::Curve {
            return Err(Error::invalid("input", "compare needs samples as its first input"));
        }
        self.input.check()?;
        match (&self.gamma, &self.theory_curve) {
            (Some(g), None) => {
                TheoryParams64::from_gamma(*g)?;
            }
            (None, Some(c)) => {
                c.check()?;
            }
            _ => return Err(Error::invalid("theory", "give exactly one of gamma or theory_curve")),
        }
        Ok(())
    }

    pub(crate) fn execute(&self) -> Result<Outcome> {
        let mut out = Outcome::default();
        out.inputs.push(self.input.check()?);
        let theory = match (&self.gamma, &self.theory_curve) {
            (Some(g), _) => Theory::Exact(MarginalCurve::new(TheoryParams64::from_gamma(*g)?)?),
            (None, Some(c)) => {
                out.inputs.push(c.check()?);
                Theory::sampled(&read_table(&c.path)?)?
            }
            (None, None) => return Err(Error::invalid("theory", "missing")),
        };
        let ks = load_k(&self.input, self.k_mode)?;
        let (re, im) = k_ab_parts(&ks);
        let values: Vec<f64> = match self.component {
            Component::Re => re,
            Component::Im => im,
            Component::Pooled => re.into_iter().chain(im).collect(),
        };
        let hist = estimate_distribution(&values, &self.estimator)?;
        let centers = hist.centers();
        let (lo, hi) = (hist.edges[0], hist.edges[hist.edges.len() - 1]);
        let (tlo, thi) = theory.range();
        if let Theory::Sampled { u, .. } = &theory {
            let outside = centers.iter().filter(|&&c| c < tlo || c > thi).count();
            out.notes.push(format!(
                "theory curve re-gridded from {} nodes on [{tlo}, {thi}] onto {} bin centers on [{lo}, {hi}]; {outside} centers outside the curve set to 0",
                u.len(),
                centers.len()
            ));
        }
        let sigma = theory.sigma()?;
        let ks_theory = ks_statistic(&values, |x| theory.cdf(x))?;
        let mut columns = vec!["u", "empirical", "theory"];
        if self.gaussian {
            columns.push("gaussian");
        }
        let mut t = Table::new(&columns);
        let mut sup_theory: f64 = 0.0;
        let mut sup_gauss: f64 = 0.0;
        for (&c, &p) in centers.iter().zip(&hist.densities) {
            let th = theory.density(c);
            let g = gaussian_baseline(c, sigma)?;
            sup_theory = sup_theory.max((p - th).abs());
            sup_gauss = sup_gauss.max((p - g).abs());
            let mut row = vec![c, p, th];
            if self.gaussian {
                row.push(g);
            }
            t.push(row);
        }
        let mut results = serde_json::json!({
            "samples": values.len(),
            "component": self.component,
            "sigma": sigma,
            "ks_theory": ks_theory,
            "sup_theory": sup_theory,
        });
        if self.gaussian {
            let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid("sigma", e.to_string()))?;
            results["ks_gaussian"] = serde_json::json!(ks_statistic(&values, |x| normal.cdf(x))?);
            results["sup_gaussian"] = serde_json::json!(sup_gauss);
        }
        out.outputs.add("overlay.csv", t.to_csv()?);
        out.outputs.add("compare.json", to_json(&results)?);
        out.results = results;
        Ok(out)
    }
}
