//! Exact computations for coherent sheaves on weighted projective lines:
//! cycle-and-patching presentations of vector bundles, logarithmic
//! connections with prescribed residue eigenvalues, and the translation to
//! representations of deformed preprojective algebras of star-shaped quivers.
//!
//! Everything is computed over the Gaussian rationals with zero tolerance;
//! there is no floating point in the crate. See the module docs for the
//! storage conventions that make all the identities checkable as exact
//! rational-matrix equations.

// Error payloads carry exact scalars (two big rationals each); errors are
// cold, so the size does not matter.
#![allow(clippy::result_large_err)]

pub mod scalar;
pub mod poly;
pub mod ratfun;
pub mod matrix;
pub mod flag;
pub mod report;
pub mod sheaf;
pub mod conn;
pub mod quiver;
pub mod bridge;
pub mod json;
pub mod selftest;
pub mod commands;

pub use bridge::FuchsianTuple;
pub use conn::{ConnectionSection, FuchsianConnection, ZetaData};
pub use flag::Flag;
pub use matrix::{QMat, RatMat};
pub use quiver::{DoubledRep, LambdaVec, Quiver};
pub use ratfun::{Chart, PolyFrac, RatFun};
pub use report::Diagnostics;
pub use scalar::{GaussRat, Rat};
pub use sheaf::{Cycle, PatchedSheaf, SheafMorphism, WeightData};
