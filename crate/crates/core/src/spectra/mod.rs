//! Low-lying spectra and ground-state observables of the rotor chain.

pub mod eigen;
pub mod observables;

pub use eigen::{
    dense_hermitian_eigen, lowest_eigenpairs, residual, SolverMethod, SolverOptions, SpectrumResult, DENSE_CROSSOVER,
    START_VECTOR_SEED,
};
pub use observables::{
    chain_spectrum, charge_scan, correlation, correlation_profile, correlations, exponential_fit, ground_state,
    mass_gap, ChargeScan, CorrelationProfile, GroundState, MassGap, CROSSING_TOL, DEGENERACY_TOL, FIT_QUALITY_MIN,
};
