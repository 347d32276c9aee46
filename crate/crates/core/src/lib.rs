//! Exact double-complex cohomology computations over the rank-one Heisenberg
//! vertex algebra.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod cochains;
pub mod correlators;
pub mod differential;
pub mod eproduct;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod ratfield;
pub mod rational;
pub mod sewing;
pub mod suites;
pub mod voa;

pub use error::{Error, Result};
