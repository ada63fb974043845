//! Resonant tunnelling through squeezed barrier-well potentials and the
//! point interactions they converge to.
//!
//! Units are chosen so that `ħ²/2m = 1`; energies are `E = k²`.

pub mod boundary;
pub mod ddouble;
pub mod error;
pub mod limits;
pub mod profile;
pub mod resonance;
pub mod roots;
pub mod transfer;

pub use boundary::{
    bc_from_product, bound_state, delta_prime_delta_matrix, params_from_resonance, resonant_matrix,
    round_trip_residual, scattering_from_matrix, seba_matrix, BoundaryData, ConnectionMatrix,
    ProductParams,
};
pub use ddouble::Dd;
pub use error::{Error, Result};
pub use limits::{
    classify, classify_with, predict, trace, trace_with, transmission_sweep, EntryVerdict,
    LimitConfig, LimitTrace, LimitVerdict, Peak, Prediction, SqueezePath, Sweep, SweepPoint,
    TraceRow,
};
pub use profile::RectProfile;
pub use resonance::{
    bound_state_kappa, chi_adjacent, chi_linear, g_quadratic, resonant_scattering, solve,
    solve_adjacent, solve_linear, solve_quadratic, Resonance, ResonanceFamily,
};
pub use transfer::{
    piecewise_transfer, scattering, transfer_matrix, ScatteringAmplitudes, TransferMatrix,
    WaveParams,
};
