//! Microwave-network quantum graphs: Neumann joints, circulators and lossy
//! coaxial edges, solved in the bond basis.

mod ensemble;
mod presets;
mod solve;
mod spec;

pub use ensemble::{
    ensemble_sweep, frequency_sweep, frequency_sweep_with_diagnostics, generate_realizations,
    sweep_points,
};
pub use presets::{hexagon, network_preset, nine_vertex, HEXAGON_LOSS, NETWORK_PRESETS, NINE_VERTEX_LOSS};
pub use solve::{
    circulator_matrix, neumann_matrix, two_port_s, two_port_s_with_diagnostics,
    vertex_scattering_matrix, CompiledNetwork, Realization, TwoPortSolve, POLE_JITTER,
};
pub use spec::{
    ghz_to_wavenumber, wavenumber_to_ghz, CoaxParams, EdgeSpec, NetworkSpec, VertexKind,
    VertexSpec, SPEED_OF_LIGHT,
};
