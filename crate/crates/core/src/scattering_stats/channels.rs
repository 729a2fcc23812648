use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::TwoPort;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    A,
    B,
}

impl Port {
    fn index(self) -> usize {
        match self {
            Port::A => 0,
            Port::B => 1,
        }
    }
}

pub const MIN_TRANSMISSION_SAMPLES: usize = 100;

/// `T_m = 1 − |⟨S_mm⟩|²`, the average running over every supplied sample
/// (realizations and spectral points alike).
pub fn transmission_coefficient(samples: &[TwoPort<f64>], port: Port) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("samples", "empty input"));
    }
    if samples.len() < MIN_TRANSMISSION_SAMPLES {
        return Err(Error::invalid(
            "samples",
            format!(
                "need at least {MIN_TRANSMISSION_SAMPLES} samples, got {}",
                samples.len()
            ),
        ));
    }
    let i = port.index();
    let mean = super::accumulate::mean_complex(samples.iter().map(|s| s.s[i][i]));
    Ok(transmission_from_mean(mean))
}

pub fn transmission_from_mean(mean: Complex64) -> f64 {
    (1.0 - mean.norm_sqr()).clamp(0.0, 1.0)
}

fn check_t(name: &str, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(name, format!("must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// `γ = T_a + T_b + M·T_c` for `M` identical parasitic channels.
pub fn gamma_from_channels(t_a: f64, t_b: f64, m: u32, t_c: f64) -> Result<f64> {
    check_t("T_a", t_a)?;
    check_t("T_b", t_b)?;
    check_t("T_c", t_c)?;
    Ok(t_a + t_b + m as f64 * t_c)
}

/// Solves `γ = T_a + T_b + M·T_c` for `T_c`.
pub fn solve_tc(gamma: f64, t_a: f64, t_b: f64, m: u32) -> Result<f64> {
    check_t("T_a", t_a)?;
    check_t("T_b", t_b)?;
    if m == 0 {
        return Err(Error::invalid("M", "need at least one parasitic channel"));
    }
    let t_c = (gamma - t_a - t_b) / m as f64;
    if !(0.0..=1.0).contains(&t_c) {
        return Err(Error::invalid(
            "decomposition",
            format!("infeasible: gamma {gamma} with T_a {t_a}, T_b {t_b}, M {m} needs T_c = {t_c}"),
        ));
    }
    Ok(t_c)
}
