//! One-parameter fit of `γ` to the pooled `Re K_ab`/`Im K_ab` marginals.

use std::cell::RefCell;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theory_density::{MarginalCurve, TheoryParams};

use super::channels::solve_tc;
use super::distribution::{estimate_distribution, DistributionEstimate, EstimatorConfig};
use super::enhancement::{std_dev, Bootstrap};
use super::ks::ks_statistic_sorted;

pub const MIN_FIT_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Kolmogorov–Smirnov distance of the pooled sample.
    #[default]
    Ks,
    /// Integrated squared error between the pooled histogram and the
    /// bin-averaged theory.
    Ise,
}

/// Known antenna couplings, used to split the fitted `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelHint {
    pub t_a: f64,
    pub t_b: f64,
    pub m: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub objective: Objective,
    pub bounds: (f64, f64),
    /// Relative width of the final bracket in `γ`.
    pub rel_tol: f64,
    pub grid_points: usize,
    pub curve_cells: usize,
    pub bootstrap: Bootstrap,
    pub channels: Option<ChannelHint>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            objective: Objective::Ks,
            bounds: (0.2, 400.0),
            rel_tol: 1e-4,
            grid_points: 33,
            curve_cells: 800,
            bootstrap: Bootstrap {
                resamples: 50,
                ..Bootstrap::default()
            },
            channels: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelDecomposition {
    pub t_a: f64,
    pub t_b: f64,
    pub m: u32,
    pub t_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub gamma_hat: f64,
    /// Half-width of the interval where the objective stays within the
    /// bootstrap noise floor of its minimum.
    pub stderr: Option<f64>,
    pub objective_kind: Objective,
    pub objective: f64,
    pub noise_floor: Option<f64>,
    pub ks_re: Option<f64>,
    pub ks_im: Option<f64>,
    pub ks_pooled: Option<f64>,
    pub samples: usize,
    pub decomposition: Option<ChannelDecomposition>,
    pub warnings: Vec<String>,
}

/// Samples of `Re K_ab` and `Im K_ab`, optionally labelled by realization for
/// the bootstrap.
#[derive(Debug, Clone, Copy)]
pub struct FitInput<'a> {
    pub re: &'a [f64],
    pub im: &'a [f64],
    pub groups: Option<&'a [u64]>,
}

struct Curves {
    cells: usize,
    cache: RefCell<HashMap<u64, MarginalCurve<f64>>>,
}

impl Curves {
    fn new(cells: usize) -> Self {
        Self {
            cells,
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn with<R>(&self, gamma: f64, f: impl FnOnce(&MarginalCurve<f64>) -> R) -> Result<R> {
        let key = gamma.to_bits();
        if !self.cache.borrow().contains_key(&key) {
            let c = MarginalCurve::with_cells(TheoryParams::from_gamma(gamma)?, self.cells)?;
            self.cache.borrow_mut().insert(key, c);
        }
        Ok(f(&self.cache.borrow()[&key]))
    }
}

fn ise(hist: &DistributionEstimate, curve: &MarginalCurve<f64>) -> f64 {
    hist.edges
        .windows(2)
        .zip(&hist.densities)
        .map(|(e, d)| {
            let w = e[1] - e[0];
            let p = (curve.cdf(e[1]) - curve.cdf(e[0])) / w;
            (d - p).powi(2) * w
        })
        .sum()
}

/// Minimizes `f` over `[lo, hi]` in `log γ`: a geometric grid, then golden
/// section around the best grid point.
fn minimize(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    cfg: &FitConfig,
    warnings: &mut Vec<String>,
) -> Result<(f64, f64)> {
    let (lo, hi) = cfg.bounds;
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid("bounds", format!("need 0 < lo < hi, got ({lo}, {hi})")));
    }
    let n = cfg.grid_points.max(5);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let vals = grid.iter().map(|&g| f(g)).collect::<Result<Vec<_>>>()?;
    let (best, &vbest) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let vmax = vals.iter().cloned().fold(f64::MIN, f64::max);
    if vmax - vbest <= 1e-12 * vmax.abs().max(1.0) {
        return Err(Error::NoFit("objective is flat across the search range".into()));
    }
    if best == 0 || best == n - 1 {
        warnings.push(format!("minimum at the search bound gamma = {}", grid[best]));
    }
    let mut a = grid[best.saturating_sub(1)].ln();
    let mut b = grid[(best + 1).min(n - 1)].ln();
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c.exp())?;
    let mut fd = f(d.exp())?;
    while b - a > cfg.rel_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d.exp())?;
        }
    }
    let (g, v) = if fc <= fd { (c.exp(), fc) } else { (d.exp(), fd) };
    if v > vbest {
        return Ok((grid[best], vbest));
    }
    Ok((g, v))
}

/// Finds where `f` first exceeds `level` moving from `from` towards `to`.
fn crossing(f: &mut dyn FnMut(f64) -> Result<f64>, from: f64, to: f64, level: f64) -> Result<Option<f64>> {
    // step outwards geometrically until the level is exceeded
    let ratio: f64 = if to > from { 1.02 } else { 1.0 / 1.02 };
    let mut inner = from;
    let mut outer = from;
    loop {
        let next = outer * ratio;
        if (to > from && next >= to) || (to < from && next <= to) {
            return Ok(None);
        }
        outer = next;
        if f(outer)? > level {
            break;
        }
        inner = outer;
    }
    for _ in 0..30 {
        let mid = (inner * outer).sqrt();
        if f(mid)? > level {
            outer = mid;
        } else {
            inner = mid;
        }
    }
    Ok(Some((inner * outer).sqrt()))
}

fn decompose(gamma: f64, hint: Option<ChannelHint>, warnings: &mut Vec<String>) -> Option<ChannelDecomposition> {
    let h = hint?;
    match solve_tc(gamma, h.t_a, h.t_b, h.m) {
        Ok(t_c) => Some(ChannelDecomposition {
            t_a: h.t_a,
            t_b: h.t_b,
            m: h.m,
            t_c,
        }),
        Err(e) => {
            warnings.push(e.to_string());
            None
        }
    }
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Fits `γ` to pooled `Re K_ab`/`Im K_ab` samples.
pub fn fit_gamma(input: FitInput<'_>, cfg: &FitConfig) -> Result<FitResult> {
    let n = input.re.len() + input.im.len();
    if input.re.len() != input.im.len() {
        return Err(Error::invalid("samples", "Re and Im columns differ in length"));
    }
    if n < 2 * MIN_FIT_SAMPLES {
        return Err(Error::NoFit(format!(
            "need at least {MIN_FIT_SAMPLES} samples, got {}",
            input.re.len()
        )));
    }
    if input.re.iter().chain(input.im).any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples", "non-finite K_ab value"));
    }
    if let Some(g) = input.groups {
        if g.len() != input.re.len() {
            return Err(Error::invalid("groups", "one realization label per sample required"));
        }
    }
    let curves = Curves::new(cfg.curve_cells);
    let pooled: Vec<f64> = input.re.iter().chain(input.im).copied().collect();
    let pooled_sorted = sorted(&pooled);
    let hist = estimate_distribution(&pooled, &EstimatorConfig::default())?;

    let objective = |data: &[f64], hist: &DistributionEstimate, gamma: f64| -> Result<f64> {
        match cfg.objective {
            Objective::Ks => curves.with(gamma, |c| ks_statistic_sorted(data, |u| c.cdf(u)))?,
            Objective::Ise => curves.with(gamma, |c| ise(hist, c)),
        }
    };

    let mut warnings = Vec::new();
    let mut f = |g: f64| objective(&pooled_sorted, &hist, g);
    let (gamma_hat, best) = minimize(&mut f, cfg, &mut warnings)?;

    // bootstrap noise floor of the objective at the optimum
    let mut floor = None;
    if cfg.bootstrap.resamples >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.bootstrap.seed);
        let m = input.re.len();
        let groups: Vec<Vec<usize>> = match input.groups {
            Some(g) => {
                let mut map: std::collections::BTreeMap<u64, Vec<usize>> = Default::default();
                for (i, &label) in g.iter().enumerate() {
                    map.entry(label).or_default().push(i);
                }
                map.into_values().collect()
            }
            None => (0..m).map(|i| vec![i]).collect(),
        };
        let mut stats = Vec::with_capacity(cfg.bootstrap.resamples);
        for _ in 0..cfg.bootstrap.resamples {
            let mut re = Vec::with_capacity(2 * m);
            for _ in 0..groups.len() {
                for &i in &groups[rng.gen_range(0..groups.len())] {
                    re.push(input.re[i]);
                    re.push(input.im[i]);
                }
            }
            let h = estimate_distribution(&re, &EstimatorConfig::default())?;
            re.sort_by(|a, b| a.total_cmp(b));
            stats.push(objective(&re, &h, gamma_hat)?);
        }
        floor = Some(std_dev(&stats));
    }

    let stderr = match floor {
        Some(fl) if fl > 0.0 => {
            let level = best + fl;
            let up = crossing(&mut f, gamma_hat, cfg.bounds.1, level)?;
            let down = crossing(&mut f, gamma_hat, cfg.bounds.0, level)?;
            match (down, up) {
                (Some(d), Some(u)) => Some(0.5 * (u - d)),
                (Some(d), None) => Some(gamma_hat - d),
                (None, Some(u)) => Some(u - gamma_hat),
                (None, None) => {
                    warnings.push("objective never rises above the noise floor".into());
                    None
                }
            }
        }
        _ => None,
    };

    let (ks_re, ks_im) = curves.with(gamma_hat, |c| {
        (
            ks_statistic_sorted(&sorted(input.re), |u| c.cdf(u)),
            ks_statistic_sorted(&sorted(input.im), |u| c.cdf(u)),
        )
    })?;
    let ks_pooled = curves.with(gamma_hat, |c| ks_statistic_sorted(&pooled_sorted, |u| c.cdf(u)))??;
    let decomposition = decompose(gamma_hat, cfg.channels, &mut warnings);

    Ok(FitResult {
        gamma_hat,
        stderr,
        objective_kind: cfg.objective,
        objective: best,
        noise_floor: floor,
        ks_re: Some(ks_re?),
        ks_im: Some(ks_im?),
        ks_pooled: Some(ks_pooled),
        samples: input.re.len(),
        decomposition,
        warnings,
    })
}

/// Fits `γ` to an already binned density by integrated squared error.
pub fn fit_gamma_binned(estimate: &DistributionEstimate, cfg: &FitConfig) -> Result<FitResult> {
    if estimate.samples < MIN_FIT_SAMPLES {
        return Err(Error::NoFit(format!(
            "need at least {MIN_FIT_SAMPLES} samples, got {}",
            estimate.samples
        )));
    }
    let curves = Curves::new(cfg.curve_cells);
    let mut warnings = Vec::new();
    let mut f = |g: f64| curves.with(g, |c| ise(estimate, c));
    let (gamma_hat, best) = minimize(&mut f, cfg, &mut warnings)?;
    let decomposition = decompose(gamma_hat, cfg.channels, &mut warnings);
    Ok(FitResult {
        gamma_hat,
        stderr: None,
        objective_kind: Objective::Ise,
        objective: best,
        noise_floor: None,
        ks_re: None,
        ks_im: None,
        ks_pooled: None,
        samples: estimate.samples,
        decomposition,
        warnings,
    })
}
