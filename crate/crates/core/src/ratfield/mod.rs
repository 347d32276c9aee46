//! Exact rational functions whose poles sit on `z_i = 0` and `z_i = z_j`.

pub mod laurent;
pub mod perm;
pub mod poly;
pub mod ratfunc;
pub mod text;
pub mod uniseries;

pub use laurent::{expand_region, reconstruct, LaurentSeries, PoleAnsatz};
pub use perm::Permutation;
pub use poly::MultiPoly;
pub use ratfunc::RatFunc;
