//! A numerical laboratory for abstract summing norms, mixed `(s;q)`-norms and
//! mixing constants on finite instances.
//!
//! Everything here works on finite data: a handful of probe indices, kernel
//! tensors evaluated on finite point sets standing in for compact probe
//! spaces, and probability vectors standing in for Borel probability
//! measures. On such instances the classical domination theorems become
//! small linear programs and concave maximizations over a simplex, so every
//! constant the library reports comes with a checkable certificate: a
//! dominating measure, an extremal weighted family, or a splitting sequence.
//!
//! The main entry points are:
//!
//! * [`summing::pietsch_norm`] — the smallest domination constant together
//!   with its measure, computed exactly by LP.
//! * [`mixed::mixed_norm_sup_measure`] / [`mixed::mixed_norm_splitting_search`]
//!   — the mixed `(s;q)`-norm of a weighted family, from both sides.
//! * [`mixing::mixing_upper_domination`] / [`mixing::mixing_lower_bound`] —
//!   the mixing constant of an instance, sandwiched between a measure sweep
//!   and certified family ratios.
//! * [`adapters`] — builders that discretize linear operators and Lipschitz
//!   maps into instances.
//! * [`suite`] — the property suite run by the `verify-suite` CLI command.

pub mod adapters;
pub mod cli;
pub mod error;
pub mod exponents;
pub mod lp;
pub mod math;
pub mod mixed;
pub mod mixing;
pub mod model;
pub mod multilinear;
pub mod report;
pub mod schema;
pub mod suite;
pub mod summing;

pub use error::Error;
pub use exponents::ExponentParams;
pub use model::{FamilyItem, Instance, Side, SimplexMeasure, WeightedFamily};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
