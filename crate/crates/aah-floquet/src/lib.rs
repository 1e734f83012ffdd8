//! Floquet band engineering with Bloch oscillations on a driven
//! Aubry-Andre-Harper chain.
//!
//! The crate simulates one and two interacting bosons on a 1D superlattice
//! with a harmonically driven on-site potential and a linear tilt. The tilt
//! is rotated into a time-periodic hopping phase; when the Bloch frequency
//! and the drive frequency are commensurate (ω_F/Ω = a/b) the rotated system
//! is Floquet with common period T = a·T₂ = b·T₁. It provides:
//!
//! - occupation bases with co-translation symmetry reduction ([`fock`]),
//! - lab/rotated Hamiltonians and their Bloch-sector blocks ([`hamiltonian`]),
//! - one-period propagators and quasienergy bands ([`floquet`]),
//! - Chern numbers on the (β, φ) torus via plaquette link products
//!   ([`topology`]),
//! - Wannier/Gaussian wavepacket pumping and momentum-space diagnostics
//!   ([`pumping`]).

pub mod error;
pub mod floquet;
pub mod fock;
pub mod hamiltonian;
pub mod linalg;
pub mod params;
pub mod pumping;
pub mod topology;

pub use error::{Error, Result};
pub use floquet::{
    obc_quasienergies, propagate_period, BandStructure, FloquetEngine, PropagationSpace,
    PropagatorSettings, ReducedFloquet,
};
pub use fock::{FockBasis, FockState, SeedDecomposition};
pub use hamiltonian::{
    lab_hamiltonian, rotated_hamiltonian, sector_hamiltonian, Boundary, Frame, LatticeOperator,
    OperatorMatrix, SectorOperator,
};
pub use params::{ModelParams, Ratio};
pub use pumping::{
    evolve_pump, gaussian_state, momentum_density, momentum_sweep, run_pump, InitialKind,
    MomentumSweep, PumpFrame, PumpOptions, PumpProtocol, PumpTrajectory, Wavepacket,
};
pub use topology::{
    band_chern, chern_all, chern_all_refined, ChernSet, ChernSettings, GridEigens, Grouping,
    TorusGrid,
};
