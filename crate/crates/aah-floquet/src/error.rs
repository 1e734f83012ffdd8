//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The co-translation symmetry needs gcd(L, N) = 1 for N > 1; orbits
    /// would otherwise have non-uniform length and the seed reduction breaks.
    #[error("coprimality violation: L = {cells} and N = {particles} share a factor; co-translation orbits are not uniform")]
    CoprimalityViolation { cells: usize, particles: usize },

    /// Requested basis would exceed the configured dimension cap.
    #[error("basis dimension {dim} exceeds the configured cap {cap}")]
    OverflowRisk { dim: u128, cap: usize },

    /// An orbit of the co-translation came out with the wrong length.
    #[error("co-translation orbit of basis state {index} has size {size}, expected {expected}")]
    OrbitSizeError {
        index: usize,
        size: usize,
        expected: usize,
    },

    /// A state passed where an orbit representative was required.
    #[error("state is not a registered seed state")]
    NotASeed,

    /// Operation defined only under periodic boundary conditions.
    #[error("operation requires periodic boundary conditions")]
    BoundaryError,

    /// Doubling the time slicing moved an eigenphase more than the tolerance.
    #[error("propagator not converged: max eigenphase shift {shift:.3e} under slice doubling exceeds {tol:.3e} ({slices} slices)")]
    ConvergenceError { shift: f64, tol: f64, slices: usize },

    /// Two band groups touch somewhere on the grid.
    #[error("spectral gap closes at grid point ({i_beta}, {i_phi}): gap {gap:.3e} below floor {floor:.3e}")]
    GapClosure {
        i_beta: usize,
        i_phi: usize,
        gap: f64,
        floor: f64,
    },

    /// Plaquette sum did not land on an integer; the grid is under-resolved.
    #[error("chern sum {value:.6} is {dist:.3e} from the nearest integer; refine the grid")]
    NonIntegerResult { value: f64, dist: f64 },

    /// Per-sublattice momentum transform is a one-particle diagnostic.
    #[error("momentum density needs a one-particle state, got N = {particles}")]
    WrongParticleNumber { particles: usize },

    /// Wavepacket weight reached the edge of the real-space lattice.
    #[error("boundary contamination at period {period}: edge density {density:.3e} exceeds {threshold:.3e} (lattice of {cells} cells)")]
    BoundaryContamination {
        period: usize,
        density: f64,
        threshold: f64,
        cells: usize,
    },

    /// State norm drifted during pump evolution beyond the allowed budget.
    #[error("norm drift {drift:.3e} at period {period} exceeds 1e-6")]
    NormDrift { period: usize, drift: f64 },

    /// Invalid physical or numerical parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
