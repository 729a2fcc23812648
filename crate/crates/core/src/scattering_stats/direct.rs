use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::accumulate::s_moments;
use super::matrix::TwoPort;

/// `|⟨S_ab⟩|` above this marks the data as carrying direct processes.
pub const DIRECT_PROCESS_THRESHOLD: f64 = 0.1;
pub const MIN_DIRECT_SAMPLES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectProcessReport {
    pub mean_abs_s_aa: f64,
    pub mean_abs_s_bb: f64,
    pub mean_abs_s_ab: f64,
    pub mean_abs_s_ba: f64,
    pub threshold: f64,
    pub flagged: bool,
    pub samples: usize,
}

impl DirectProcessReport {
    pub fn warning(&self) -> Option<String> {
        self.flagged.then(|| {
            format!(
                "direct-process contamination: |<S_ab>| = {:.4}, |<S_ba>| = {:.4} exceed {}; \
                 K is still computed from raw S",
                self.mean_abs_s_ab, self.mean_abs_s_ba, self.threshold
            )
        })
    }
}

pub fn direct_process_check(samples: &[TwoPort<f64>]) -> Result<DirectProcessReport> {
    if samples.len() < MIN_DIRECT_SAMPLES {
        return Err(Error::invalid(
            "samples",
            format!("need at least {MIN_DIRECT_SAMPLES} samples, got {}", samples.len()),
        ));
    }
    let m = s_moments(samples);
    let ab = m.mean(1).norm();
    let ba = m.mean(2).norm();
    Ok(DirectProcessReport {
        mean_abs_s_aa: m.mean(0).norm(),
        mean_abs_s_bb: m.mean(3).norm(),
        mean_abs_s_ab: ab,
        mean_abs_s_ba: ba,
        threshold: DIRECT_PROCESS_THRESHOLD,
        flagged: ab.max(ba) > DIRECT_PROCESS_THRESHOLD,
        samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering_stats::matrix::SampleTag;
    use num_complex::Complex64 as C;

    fn ring(offset: C) -> Vec<TwoPort<f64>> {
        (0..1000)
            .map(|i| {
                let p = C::from_polar(0.5, i as f64 * 0.01 * std::f64::consts::TAU);
                let s = [[p, p.conj() + offset], [-p + offset, p.conj()]];
                TwoPort::new(s, 0.0, SampleTag { index: i, ..Default::default() })
            })
            .collect()
    }

    #[test]
    fn constant_offset_is_flagged() {
        let r = direct_process_check(&ring(C::new(0.3, 0.0))).unwrap();
        assert!(r.flagged);
        assert!((r.mean_abs_s_ab - 0.3).abs() < 0.01);
        assert!(r.warning().is_some());
    }

    #[test]
    fn zero_mean_is_clean() {
        let r = direct_process_check(&ring(C::new(0.0, 0.0))).unwrap();
        assert!(!r.flagged && r.mean_abs_s_ab < 0.01);
        assert!(r.warning().is_none());
    }
}
