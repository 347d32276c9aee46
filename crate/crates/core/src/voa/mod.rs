//! The vertex algebra instance: Fock states, modes, Virasoro operators, the
//! invariant form and dual bases.

pub mod fock;
pub mod form;
pub mod heisenberg;
pub mod vector;

pub use fock::FockState;
pub use form::DualBasis;
pub use heisenberg::{Heisenberg, VertexAlgebra};
pub use vector::ModuleVector;
