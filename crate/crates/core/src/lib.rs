//! Sector-resolved simulation, gate synthesis and realizability checks for
//! n qubits coupled to one oscillator through the Tavis–Cummings interaction.
//!
//! Everything is expressed in the dimensionless convention g_TC = 1; circuit
//! interaction times are reported in units of 2π.

pub mod dynamics;
pub mod error;
pub mod liealg;
pub mod linalg;
pub mod operators;
pub mod pibasis;
pub mod realizability;
pub mod sectors;
pub mod synthesis;

pub use dynamics::{
    apply_circuit, apply_circuit_with, distance_up_to_phase, gate_block, interaction_time, vacuum_sandwich,
    Backend, BlockUnitary, Circuit, Gate, GateKind, VacuumSandwich,
};
pub use error::{Error, Result};
pub use linalg::CMat;
pub use operators::{JSectorOperator, SectorMatrix};
pub use sectors::{accidental_partner, basis_labels, enumerate_sectors, multiplicity, sector_dim, BasisLabel, SectorIndex};

pub use num_complex::Complex64;
