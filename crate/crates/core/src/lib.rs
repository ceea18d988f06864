//! Free beta prime distribution and relatives: exact moment computations by
//! combinatorial sums, series transforms and Fock-space operator models,
//! together with numerical checks of densities, score functions and the
//! random Fisher matrix limit.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod distributions;
pub mod error;
pub mod fock;
pub mod ncl;
pub mod randmat;
pub mod rational;
pub mod series;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
pub use series::PowerSeries;
