//! Exact density of the off-diagonal reaction-matrix element `K_ab` for
//! broken time-reversal symmetry at arbitrary absorption.
//!
//! All functions are pure and generic over the scalar type.

mod curve;
mod density;
mod kernel;
mod params;

pub use curve::{DensityGrid, MarginalCurve};
pub use density::{
    gaussian_baseline, grid_half_width, joint_density, joint_normalization,
    marginal_density, marginal_density_tol, marginal_normalization, marginal_second_moment,
    matched_sigma, radial_density, tail_radius,
};
pub use kernel::{apply_dx, dx_kernel, kernel, kernel_jet, KernelJet};
pub use params::{alpha_to_gamma, gamma_alpha_map, TheoryParams};

use crate::error::Result;
use crate::scalar::Real;

/// Sup-norm distance between the marginal and its variance-matched Gaussian,
/// evaluated on `points` nodes across the exported grid.
pub fn gaussian_sup_distance<T: Real>(params: &TheoryParams<T>, points: usize) -> Result<T> {
    let sigma = matched_sigma(params)?;
    let u_max = grid_half_width(params).min(T::lit(12.0) * sigma);
    let mut worst = T::zero();
    for i in 0..points {
        let u = u_max * T::lit(i as f64) / T::lit((points - 1).max(1) as f64);
        let d = (marginal_density(u, params)? - gaussian_baseline(u, sigma)?).abs();
        worst = worst.max(d);
    }
    Ok(worst)
}
