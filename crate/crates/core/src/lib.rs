//! Reliability of coherent systems whose dependent, identically distributed
//! components carry heterogeneous active spares.
//!
//! The system lifetime is expressed through a distortion `q` of the
//! component (or block) reliability, built from the diagonal sections of an
//! exchangeable copula. On top of that the crate offers stochastic-order
//! checks between two systems, numerical checks of the sufficient conditions
//! under which spare allocations are ordered, a Monte Carlo oracle and an
//! exhaustive allocation recommender.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocate;
pub mod conditions;
pub mod copulas;
pub mod distributions;
pub mod error;
pub mod montecarlo;
pub mod numdiff;
pub mod orders;
pub mod presets;
pub mod prob;
pub mod quad;
pub mod scenario;
mod shape;
pub mod structure;
pub mod systems;

pub use copulas::{CopulaFamily, CopulaSpec};
pub use distributions::{LifetimeFamily, LifetimeModel};
pub use error::{Error, Result};

pub use prob::UnitValue;
pub use shape::linspace;
pub use orders::{OrderKind, OrderVerdict, Relation};
pub use structure::{CoherentStructure, Distortion};
pub use systems::{ComponentLevelSystem, EvalGrid, Lifetime, RedundantSystem, SystemLevelSystem};

