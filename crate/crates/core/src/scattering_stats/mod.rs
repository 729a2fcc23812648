//! Reaction-matrix statistics of two-port scattering ensembles.

mod accumulate;
mod channels;
mod direct;
mod distribution;
mod enhancement;
mod fit;
mod ks;
mod matrix;
mod transform;

pub use accumulate::{mean_complex, s_moments, SMoments};
pub use channels::{
    gamma_from_channels, solve_tc, transmission_coefficient, transmission_from_mean, Port,
    MIN_TRANSMISSION_SAMPLES,
};
pub use direct::{direct_process_check, DirectProcessReport, DIRECT_PROCESS_THRESHOLD, MIN_DIRECT_SAMPLES};
pub use distribution::{
    estimate_distribution, DistributionEstimate, EstimatorConfig, EstimatorKind,
    MIN_DISTRIBUTION_SAMPLES,
};
pub use enhancement::{enhancement_factor, Bootstrap, EnhancementEstimate, MIN_ENHANCEMENT_SAMPLES};
pub use fit::{
    fit_gamma, fit_gamma_binned, ChannelDecomposition, ChannelHint, FitConfig, FitInput,
    FitResult, Objective, MIN_FIT_SAMPLES,
};
pub use ks::{ks_statistic, ks_statistic_sorted, ks_two_sample};
pub use matrix::{
    adjoint, identity, inverse, k_from_s, s_from_k, spectral_norm, KMatrix, Mat2, SampleTag,
    Source, TwoPort,
};
pub use transform::{k_ab_parts, k_samples, s_ab_parts, KMode};
