//! Heidelberg-approach Monte Carlo: `S = I − 2πi W†(E − H + iπWW†)⁻¹W` with
//! `H` drawn from GOE or GUE and fixed orthogonal channel couplings.

mod config;
mod coupling;
mod ensemble;
mod hamiltonian;

pub use config::{
    preset, semicircle, semicircle_cdf, AbsorptionMode, CalibrationConfig, ChannelModel,
    EnsembleConfig, SpectralScale, BAND_HALF_WIDTH, MAX_WINDOW, MIN_DIM, MIN_PARASITIC,
    PRESET_NAMES,
};
pub use coupling::{
    coupling_vectors, kappa_from_transmission, s_block, s_matrix_full, s_matrix_ports,
    transmission_from_kappa, Couplings,
};
pub use ensemble::{sample_ensemble, Calibration, Ensemble};
pub use hamiltonian::{eigenvalues, sample_hamiltonian};
