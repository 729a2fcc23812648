//! S → K conversion over whole ensembles, with optional treatment of the
//! ensemble-average S.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::accumulate::s_moments;
use super::matrix::{
    adjoint, identity, inverse, k_from_s, mul, scale, sub, KMatrix, Mat2, TwoPort,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KMode {
    /// `K` from the raw `S`.
    #[default]
    Raw,
    /// Subtract the ensemble mean of the off-diagonal entries first.
    SubtractMean,
    /// Map out the average `S̄` with the Poisson-kernel transform
    /// `S₀ = (I − S̄S̄†)^(−1/2) (S − S̄)(I − S̄†S)⁻¹ (I − S̄†S̄)^(1/2)`,
    /// which reduces the ports to perfect coupling.
    CouplingNormalized,
}

impl KMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "raw" => Some(KMode::Raw),
            "subtract-mean" => Some(KMode::SubtractMean),
            "coupling-normalized" => Some(KMode::CouplingNormalized),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KMode::Raw => "raw",
            KMode::SubtractMean => "subtract-mean",
            KMode::CouplingNormalized => "coupling-normalized",
        }
    }
}

/// Square root of a 2×2 Hermitian positive-definite matrix.
fn sqrt_hpd(m: &Mat2<f64>) -> Option<Mat2<f64>> {
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re;
    let tr = (m[0][0] + m[1][1]).re;
    if !(det > 0.0 && tr > 0.0) {
        return None;
    }
    let sd = det.sqrt();
    let t = (tr + 2.0 * sd).sqrt();
    let mut r = *m;
    r[0][0] += sd;
    r[1][1] += sd;
    Some(scale(&r, Complex64::new(1.0 / t, 0.0)))
}

fn normalize_coupling(s: &Mat2<f64>, mean: &Mat2<f64>) -> Result<Mat2<f64>> {
    let id = identity::<f64>();
    let mean_h = adjoint(mean);
    let left = sqrt_hpd(&sub(&id, &mul(mean, &mean_h)))
        .and_then(|r| inverse(&r, 1e-13))
        .ok_or_else(|| Error::Singular("average S is not strictly sub-unitary".into()))?;
    let right = sqrt_hpd(&sub(&id, &mul(&mean_h, mean)))
        .ok_or_else(|| Error::Singular("average S is not strictly sub-unitary".into()))?;
    let inv = inverse(&sub(&id, &mul(&mean_h, s)), 1e-13)
        .ok_or_else(|| Error::Singular("I - <S>^H S not invertible".into()))?;
    Ok(mul(&mul(&left, &mul(&sub(s, mean), &inv)), &right))
}

/// Converts every sample, preserving order.
pub fn k_samples(samples: &[TwoPort<f64>], mode: KMode) -> Result<Vec<KMatrix<f64>>> {
    let m = s_moments(samples);
    let mean = [[m.mean(0), m.mean(1)], [m.mean(2), m.mean(3)]];
    samples
        .par_iter()
        .map(|s| {
            let mut t = *s;
            match mode {
                KMode::Raw => {}
                KMode::SubtractMean => {
                    t.s[0][1] -= mean[0][1];
                    t.s[1][0] -= mean[1][0];
                }
                KMode::CouplingNormalized => t.s = normalize_coupling(&s.s, &mean)?,
            }
            k_from_s(&t)
        })
        .collect()
}

/// `(Re K_ab, Im K_ab)` columns.
pub fn k_ab_parts(ks: &[KMatrix<f64>]) -> (Vec<f64>, Vec<f64>) {
    ks.iter().map(|k| (k.k[0][1].re, k.k[0][1].im)).unzip()
}

/// `(Re S_ab, Im S_ab)` columns.
pub fn s_ab_parts(samples: &[TwoPort<f64>]) -> (Vec<f64>, Vec<f64>) {
    samples.iter().map(|s| (s.s[0][1].re, s.s[0][1].im)).unzip()
}
