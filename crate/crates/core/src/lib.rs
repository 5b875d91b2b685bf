//! Real-time Green's functions of Hubbard models from variational quantum
//! simulation, on an exact statevector backend.
//!
//! The pipeline maps the model to qubits with Jordan-Wigner, evolves
//! `P_j|ψ⟩` with McLachlan dynamics on a Hamiltonian variational ansatz,
//! assembles lesser/greater/retarded functions from Hadamard-test brakets and
//! reads poles off their spectra. Exact diagonalization provides the
//! reference throughout.

pub mod dimer;
pub mod error;
pub mod exact;
pub mod greens;
pub mod grid;
pub mod hubbard;
pub mod pauli;
pub mod resources;
pub mod spectral;
pub mod statevector;
pub mod vqs;

pub use error::{Error, Result};
pub use exact::{exact_greens, ExactGreens, GroundStateSelector, SpectralDecomposition};
pub use greens::{
    cf_greens, os_greens, Algorithm, BraketMode, GreensKind, GreensProblem, GreensResult, GreensSeries,
};
pub use grid::TimeGrid;
pub use hubbard::{
    ladder_operator, momentum_operator, qubit_hamiltonian, Boundary, HubbardModel, LadderKind,
    LadderOperatorExpansion, Spin,
};
pub use pauli::{Pauli, PauliString, PauliSum, PauliTerm, Phase};
pub use resources::{CircuitKind, GateCountReport};
pub use spectral::{Pole, Spectrum};
pub use statevector::QubitState;
pub use vqs::{VhaAnsatz, VqsLinearSystem, VqsTrajectory};
