//! Exact simulation of quantum interactive-proof protocols with perfect
//! completeness: registers and dense operators, the named gates of the
//! constructions, QMA verifiers and the distillation step, the reflection
//! family of tests, the EPR-assisted QMA protocol and the multi-message
//! transformation.
//!
//! Qubits are ordered big-endian over a [`RegisterLayout`]'s declaration
//! order. All probabilities are computed by exact branch expansion unless a
//! Monte Carlo mode is requested explicitly.

pub mod circuit;
pub mod eig;
pub mod epr;
pub mod error;
pub mod gates;
mod kernel;
pub mod layout;
pub mod measure;
pub mod metrics;
pub mod operator;
pub mod outcome;
pub mod qip;
pub mod qma;
pub mod random;
pub mod reflection;
pub mod state;

/// Absolute tolerance for equality-class checks.
pub const TOL: f64 = 1e-9;

/// Largest register space the simulators will allocate by default.
pub const DEFAULT_QUBIT_BUDGET: usize = 18;

pub use eig::{eig_hermitian, EigenDecomposition};
pub use error::{QError, Result};
pub use gates::{Bell, WGateParam, WSign};
pub use layout::RegisterLayout;
pub use measure::{projective_measure, Measurement};
pub use metrics::{fidelity, fidelity_pure, trace_distance};
pub use operator::{CMatrix, CVector, HermitianOperator, Projector, UnitaryOperator};
pub use outcome::{ProtocolOutcome, Verdict};
pub use qma::{HonestWitnessParams, VerifierCircuit};
pub use reflection::ReflectionSpec;
pub use state::{apply_unitary, DensityOperator, Evolve, StateVector, SubState};
