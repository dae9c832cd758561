//! Walsh-function circuit synthesis for the 2+1D compact and non-compact
//! U(1) rotor lattice Hamiltonian: field digitization, diagonal-operator
//! Walsh series, sequency-ordered circuits, Trotter steps and a dense
//! statevector simulator to check them.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod error;
pub mod exec;
pub mod hamiltonian;
pub mod lattice;
pub mod linalg;
pub mod qasm;
pub mod sim;
pub mod studies;
pub mod trotter;
pub mod walsh;

pub use circuit::{exact_circuit, gate_count, truncated_circuit, Circuit, Gate, GateCounts};
pub use error::{Error, Result};
pub use exec::Exec;
pub use hamiltonian::{HamiltonianModel, ModelConfig};
pub use lattice::{Basis, Digitization, Formulation, LatticeSpec, WeaveMatrix};
pub use sim::Statevector;
pub use trotter::{ThetaPolicy, TrotterOrder, TrotterPlan};
pub use walsh::{DiagonalValues, WalshIndex, WalshSeries};
