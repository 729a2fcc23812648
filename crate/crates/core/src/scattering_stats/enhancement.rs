use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::accumulate::{s_moments, SMoments};
use super::matrix::TwoPort;

pub const MIN_ENHANCEMENT_SAMPLES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bootstrap {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for Bootstrap {
    fn default() -> Self {
        Self {
            resamples: 200,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnhancementEstimate {
    pub w: f64,
    /// Bootstrap standard error, resampling whole realizations.
    pub stderr: f64,
    pub var_aa: f64,
    pub var_bb: f64,
    pub var_ab: f64,
    pub var_ba: f64,
    pub samples: usize,
    pub realizations: usize,
}

fn w_of(m: &SMoments) -> Result<f64> {
    let var_ab = m.variance(1);
    if !(var_ab > 0.0) {
        return Err(Error::Singular("var(S_ab) = 0, enhancement factor undefined".into()));
    }
    Ok((m.variance(0) * m.variance(3)).sqrt() / var_ab)
}

/// `W = √(var S_aa · var S_bb) / var S_ab`.
pub fn enhancement_factor(samples: &[TwoPort<f64>], boot: Bootstrap) -> Result<EnhancementEstimate> {
    if samples.len() < MIN_ENHANCEMENT_SAMPLES {
        return Err(Error::invalid(
            "samples",
            format!(
                "need at least {MIN_ENHANCEMENT_SAMPLES} samples for a variance, got {}",
                samples.len()
            ),
        ));
    }
    let total = s_moments(samples);
    let w = w_of(&total)?;

    // per-realization partial moments, in realization order
    let mut groups: BTreeMap<(u8, u64), SMoments> = BTreeMap::new();
    for s in samples {
        groups
            .entry((s.tag.source as u8, s.tag.realization))
            .or_default()
            .push(s);
    }
    let groups: Vec<SMoments> = groups.into_values().collect();
    let stderr = if groups.len() >= 2 && boot.resamples >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(boot.seed);
        let mut ws = Vec::with_capacity(boot.resamples);
        for _ in 0..boot.resamples {
            let mut m = SMoments::default();
            for _ in 0..groups.len() {
                m = m.merge(&groups[rng.gen_range(0..groups.len())]);
            }
            if let Ok(v) = w_of(&m) {
                ws.push(v);
            }
        }
        std_dev(&ws)
    } else {
        f64::NAN
    };

    Ok(EnhancementEstimate {
        w,
        stderr,
        var_aa: total.variance(0),
        var_bb: total.variance(3),
        var_ab: total.variance(1),
        var_ba: total.variance(2),
        samples: samples.len(),
        realizations: groups.len(),
    })
}

pub(crate) fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return f64::NAN;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}
