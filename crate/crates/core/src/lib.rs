//! Design calculator and exact-diagonalization toolkit for a chain of
//! electrons on insulating spheres coupled through image charges, an analog
//! simulator of the 1+1 dimensional O(3) nonlinear sigma model.
//!
//! * [`design`] maps device geometry to effective field-theory parameters
//!   and grades the validity conditions of the mapping.
//! * [`lattice`] builds the truncated quantum rotor chain Hamiltonian, the
//!   Noether charge and total-M sectors.
//! * [`spectra`] computes low-lying spectra, mass gaps, charge scans and
//!   correlations.
//! * [`dynamics`] propagates the chain through a coupling ramp and evaluates
//!   the adiabatic criterion.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix `f64`.

pub mod design;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod lattice;
pub mod scalar;
pub mod spectra;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub use design::{ScanParameter, Verdict};
pub use lattice::{Boundary, SectorMap, SiteBasis};
pub use spectra::SolverMethod;
pub use dynamics::RampShape;

pub type Constants = design::Constants<f64>;
pub type Geometry = design::Geometry<f64>;
pub type Environment = design::Environment<f64>;
pub type EffectiveParams = design::EffectiveParams<f64>;
pub type FeasibilityReport = design::FeasibilityReport<f64>;
pub type Designer = design::Designer<f64>;
pub type ScanRow = design::ScanRow<f64>;
pub type ChainSpec = lattice::ChainSpec<f64>;
pub type SparseOperator = lattice::SparseOperator<f64>;
pub type SpectrumResult = spectra::SpectrumResult<f64>;
pub type ChargeScan = spectra::ChargeScan<f64>;
pub type CorrelationProfile = spectra::CorrelationProfile<f64>;
pub type RampSchedule = dynamics::RampSchedule<f64>;
pub type EvolutionResult = dynamics::EvolutionResult<f64>;
