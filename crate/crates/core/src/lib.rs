//! Desk-scale simulator of a quantum-chemistry pipeline for H4 on a circle.
//!
//! The crate walks the full chain classically, without approximations beyond
//! the minimal basis itself:
//!
//! 1. [`molsys`] — H4-on-a-circle geometry and analytic STO-3G integrals.
//! 2. [`scf`] — restricted Hartree-Fock, spin-orbital transforms, MP2.
//! 3. [`qham`] — second-quantized Hamiltonian mapped to Pauli strings by the
//!    Jordan-Wigner transformation.
//! 4. [`ansatz`] / [`vqe`] — UCCD excitation pools and derivative-free (COBYLA)
//!    energy minimization on a dense statevector.
//! 5. [`fci`] — exact diagonalization in the (N = 4, S_z = 0) sector; the
//!    benchmark oracle and eigenstate-overlap reporting.
//! 6. [`iqpe`] — single-ancilla iterative quantum phase estimation with
//!    deterministic or shot-sampled bit readout.
//!
//! Conventions used throughout (they fix every determinant literal):
//! qubit `k` maps one-to-one onto spin orbital `k`; spin orbitals are in
//! block-spin order (0–3 = alpha spatial 0–3, 4–7 = beta); statevector indices
//! are little-endian (qubit 0 = least significant bit); printed bitstrings show
//! qubit 7 leftmost. The Hartree-Fock determinant of H4/STO-3G is `|00110011>`.

pub mod ansatz;
pub mod fci;
pub mod iqpe;
mod linalg;
pub mod molsys;
pub mod qham;
pub mod scf;
pub mod simstate;
pub mod vqe;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A precondition on user-supplied input was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Geometry requested at exactly beta = 90 degrees, where the two
    /// rectangle diagonals coincide and the electronic configurations of
    /// interest become inaccessible.
    #[error("degenerate geometry: beta = 90 degrees exactly is excluded")]
    DegenerateGeometry,
    /// Two centers coincide, so Coulomb integrals diverge.
    #[error("singular geometry: atoms {0} and {1} coincide")]
    SingularGeometry(usize, usize),
    /// SCF did not reach the density convergence threshold.
    #[error("SCF not converged after {iterations} iterations (last energy {last_energy} hartree)")]
    ScfNotConverged { iterations: usize, last_energy: f64 },
    /// An MP2 denominator is too close to zero to divide by.
    #[error("degenerate MP2 denominator for excitation {0}")]
    DegenerateDenominator(String),
    /// A statevector lost normalization beyond tolerance.
    #[error("state corrupt: |norm - 1| = {0:.3e}")]
    StateCorrupt(f64),
    /// A state that must live in the cached (N, S_z) sector has weight outside it.
    #[error("state leaked outside the symmetry sector: residual weight {0:.3e}")]
    SectorLeak(f64),
    /// Eigenstate labeling could not find the requested states.
    #[error("could not label eigenstates: {0}")]
    MissingLabel(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
