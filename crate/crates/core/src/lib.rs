//! Exact computations for acyclic skew-symmetrizable (quantum) cluster
//! algebras with principal coefficients and their categorification by
//! representations of valued quivers over finite fields.

pub mod characters;
pub mod classical;
pub mod error;
pub mod exchange;
pub mod finfield;
pub mod harness;
pub mod laurent;
pub mod matrix;
pub mod quantum;
pub mod reps;

pub use error::{Error, Result};
