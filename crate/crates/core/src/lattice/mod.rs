//! Truncated quantum rotor chain: basis, operators and symmetry sectors.

pub mod basis;
pub mod chain;
pub mod operator;

pub use basis::{angular_momentum, axis_angular_momentum, direction_matrices, DirectionMatrices, SiteBasis, SiteOperator, SiteState};
pub use chain::{
    build_bond_operator, build_charge, build_direction_correlator, build_grand_canonical, build_hamiltonian,
    build_kinetic, build_sector_grand_canonical, build_sector_hamiltonian, is_block_diagonal, sector_decompose,
    Boundary, ChainSpec, SectorMap, DEFAULT_DIMENSION_CAP,
};
pub use operator::SparseOperator;
