use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Loss parameterization of the off-diagonal K-matrix density at the band
/// center, where the level density is `rho0 = 1/π` and `x = 2π·rho0·α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams<T> {
    /// Dimensionless resonance width `2πΓ/Δ`.
    pub gamma: T,
    /// Imaginary shift of the spectral parameter, `γ/4`.
    pub alpha: T,
    /// Argument of the differential operator, `γ/2`.
    pub x: T,
    /// Semicircle density at the band center.
    pub rho0: T,
}

impl<T: Real> TheoryParams<T> {
    pub fn from_gamma(gamma: T) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::invalid(
                "gamma",
                format!("must be finite and > 0, got {gamma}"),
            ));
        }
        let two = T::lit(2.0);
        Ok(Self {
            gamma,
            alpha: gamma / (two * two),
            x: gamma / two,
            rho0: T::FRAC_1_PI(),
        })
    }

    pub fn from_alpha(alpha: T) -> Result<Self> {
        Self::from_gamma(alpha * T::lit(4.0))
    }

    /// Ratio of mean resonance width to mean level spacing, `γ/(2π)`.
    pub fn gamma_over_delta(&self) -> T {
        self.gamma / (T::lit(2.0) * T::PI())
    }

    /// Mean GUE level spacing `1/(N·ρ0)` for an `n`-dimensional matrix.
    pub fn mean_spacing(&self, n: usize) -> T {
        T::one() / (T::lit(n as f64) * self.rho0)
    }
}

/// γ → (α, x) map at the band center.
pub fn gamma_alpha_map<T: Real>(gamma: T) -> Result<TheoryParams<T>> {
    TheoryParams::from_gamma(gamma)
}

/// Inverse map α → γ.
pub fn alpha_to_gamma<T: Real>(alpha: T) -> Result<T> {
    Ok(TheoryParams::from_alpha(alpha)?.gamma)
}
