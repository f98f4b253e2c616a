//! Quantum second-order cellular automata: the classical parity rule, its
//! quantization as a partial isometry, gate and Hamiltonian models, the
//! quantum fast-rule circuit and a unitary compiler.

pub mod bits;
pub mod error;
pub mod frt_quantum;
pub mod operator;
pub mod qstate;
pub mod quantize;
pub mod sca;
pub mod spin_chain;
pub mod suite;
pub mod unitary_compile;

pub use error::{Error, Result};
pub use operator::{Operator, SparseOperator, C64};
pub use qstate::{Circuit, GateOp, ResetVariant, StateVector};
pub use quantize::{StepMode, TransitionOperator};
pub use sca::{BasicString, Configuration, Particle, Rule};
pub use spin_chain::GeneratorVariant;
