use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_DISTRIBUTION_SAMPLES: usize = 100;
const MAX_BINS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Histogram,
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    /// Histogram: number of bins (Freedman–Diaconis when absent).
    /// Kernel: number of evaluation cells.
    pub bins: Option<usize>,
    /// Gaussian kernel bandwidth (Silverman's rule when absent).
    pub bandwidth: Option<f64>,
    pub range: Option<(f64, f64)>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            kind: EstimatorKind::Histogram,
            bins: None,
            bandwidth: None,
            range: None,
        }
    }
}

/// Normalized empirical density on contiguous cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionEstimate {
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub samples: usize,
    pub kind: EstimatorKind,
    /// Bin width for histograms, kernel width for kernel estimates.
    pub bandwidth: f64,
}

impl DistributionEstimate {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `Σ density · width`.
    pub fn total_mass(&self) -> f64 {
        self.densities
            .iter()
            .zip(self.widths())
            .map(|(d, w)| d * w)
            .sum()
    }

    /// Piecewise-constant density; zero outside the edges.
    pub fn density_at(&self, u: f64) -> f64 {
        let n = self.densities.len();
        if u < self.edges[0] || u > self.edges[n] {
            return 0.0;
        }
        let i = self.edges.partition_point(|&e| e <= u).saturating_sub(1).min(n - 1);
        self.densities[i]
    }

    /// Cumulative mass at each edge.
    pub fn cdf_at_edges(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.edges.len());
        let mut acc = 0.0;
        out.push(0.0);
        for (d, w) in self.densities.iter().zip(self.widths()) {
            acc += d * w;
            out.push(acc);
        }
        out
    }
}

pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let t = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - t) + sorted[i + 1] * t
    } else {
        sorted[i]
    }
}

fn normalize(densities: &mut [f64], edges: &[f64]) {
    let mass: f64 = densities
        .iter()
        .zip(edges.windows(2))
        .map(|(d, w)| d * (w[1] - w[0]))
        .sum();
    if mass > 0.0 {
        for d in densities.iter_mut() {
            *d /= mass;
        }
    }
}

pub fn estimate_distribution(values: &[f64], cfg: &EstimatorConfig) -> Result<DistributionEstimate> {
    if values.len() < MIN_DISTRIBUTION_SAMPLES {
        return Err(Error::invalid(
            "values",
            format!(
                "need at least {MIN_DISTRIBUTION_SAMPLES} values, got {}",
                values.len()
            ),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values", "non-finite value"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if lo == hi {
        return Err(Error::invalid("values", "degenerate input: all values equal"));
    }
    let n = sorted.len() as f64;
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);

    match cfg.kind {
        EstimatorKind::Histogram => {
            let (a, b) = cfg.range.unwrap_or((lo, hi));
            if !(b > a) {
                return Err(Error::invalid("range", "empty histogram range"));
            }
            let bins = match cfg.bins {
                Some(b) if b > 0 => b,
                Some(_) => return Err(Error::invalid("bins", "must be positive")),
                None => {
                    let fd = 2.0 * iqr * n.powf(-1.0 / 3.0);
                    let w = if fd > 0.0 { fd } else { (b - a) / n.sqrt() };
                    (((b - a) / w).ceil() as usize).clamp(1, MAX_BINS)
                }
            };
            let width = (b - a) / bins as f64;
            let edges: Vec<f64> = (0..=bins).map(|i| a + width * i as f64).collect();
            let mut counts = vec![0.0; bins];
            for &v in &sorted {
                if v < a || v > b {
                    continue;
                }
                let i = (((v - a) / width) as usize).min(bins - 1);
                counts[i] += 1.0;
            }
            normalize(&mut counts, &edges);
            Ok(DistributionEstimate {
                edges,
                densities: counts,
                samples: sorted.len(),
                kind: EstimatorKind::Histogram,
                bandwidth: width,
            })
        }
        EstimatorKind::Kernel => {
            let sd = {
                let mean = sorted.iter().sum::<f64>() / n;
                (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
            let h = match cfg.bandwidth {
                Some(h) if h > 0.0 => h,
                Some(_) => return Err(Error::invalid("bandwidth", "must be positive")),
                None => 0.9 * spread * n.powf(-0.2),
            };
            let (a, b) = cfg.range.unwrap_or((lo - 3.0 * h, hi + 3.0 * h));
            let cells = cfg.bins.unwrap_or(512).max(2);
            let width = (b - a) / cells as f64;
            let edges: Vec<f64> = (0..=cells).map(|i| a + width * i as f64).collect();
            let norm = 1.0 / (n * h * (2.0 * std::f64::consts::PI).sqrt());
            let mut dens: Vec<f64> = edges
                .windows(2)
                .map(|w| {
                    let c = 0.5 * (w[0] + w[1]);
                    // only samples within 8h contribute measurably
                    let i0 = sorted.partition_point(|&v| v < c - 8.0 * h);
                    let i1 = sorted.partition_point(|&v| v <= c + 8.0 * h);
                    sorted[i0..i1]
                        .iter()
                        .map(|v| (-(c - v).powi(2) / (2.0 * h * h)).exp())
                        .sum::<f64>()
                        * norm
                })
                .collect();
            normalize(&mut dens, &edges);
            Ok(DistributionEstimate {
                edges,
                densities: dens,
                samples: sorted.len(),
                kind: EstimatorKind::Kernel,
                bandwidth: h,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering_stats::ks::ks_statistic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal, Uniform};

    fn normal_cdf(x: f64) -> f64 {
        // Φ by integrating the density from −8
        let r = crate::quadrature::integrate(
            |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            -8.0,
            x.max(-8.0),
            crate::quadrature::Tolerance::default(),
        )
        .unwrap();
        r.value
    }

    #[test]
    fn uniform_sample_is_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = Uniform::new(0.0, 1.0);
        let v: Vec<f64> = (0..100_000).map(|_| u.sample(&mut rng)).collect();
        let est = estimate_distribution(&v, &EstimatorConfig { bins: Some(20), ..Default::default() }).unwrap();
        for d in &est.densities {
            assert!((d - 1.0).abs() < 0.05, "{d}");
        }
        assert!((est.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_sample_matches_normal_cdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let est = estimate_distribution(&v, &EstimatorConfig::default()).unwrap();
        assert!((est.total_mass() - 1.0).abs() < 1e-12);
        let d = ks_statistic(&v, normal_cdf).unwrap();
        assert!(d < 0.005, "{d}");
        // histogram-implied CDF tracks Φ at the edges
        let cdf = est.cdf_at_edges();
        for (e, f) in est.edges.iter().zip(&cdf).step_by(7) {
            assert!((f - normal_cdf(*e)).abs() < 0.005);
        }
        let kde = estimate_distribution(&v, &EstimatorConfig { kind: EstimatorKind::Kernel, ..Default::default() }).unwrap();
        assert!((kde.total_mass() - 1.0).abs() < 1e-12);
        assert!((kde.density_at(0.0) - 0.398_942_28).abs() < 0.01);
    }

    #[test]
    fn degenerate_and_short_inputs_fail() {
        assert!(estimate_distribution(&[1.0; 200], &EstimatorConfig::default()).is_err());
        assert!(estimate_distribution(&[1.0, 2.0], &EstimatorConfig::default()).is_err());
    }
}
