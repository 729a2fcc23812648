//! Wave-chaos laboratory: quantum-graph and random-matrix two-port
//! scattering ensembles, the exact `K_ab` density at broken time-reversal
//! symmetry, and the statistics tying them together.

pub mod error;
pub mod graph_sim;
pub mod io;
pub mod quadrature;
pub mod rmt_mc;
pub mod scalar;
pub mod scattering_stats;
pub mod theory_density;

pub use error::{Error, ErrorCategory, Result};
pub use scalar::Real;

pub type TheoryParams64 = theory_density::TheoryParams<f64>;
pub type TwoPortS = scattering_stats::TwoPort<f64>;
pub type KMatrix64 = scattering_stats::KMatrix<f64>;
