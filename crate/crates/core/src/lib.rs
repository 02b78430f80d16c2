//! Exact-arithmetic circuit augmentation for linear programs.
//!
//! Everything is computed over arbitrary-precision rationals: elementary
//! vectors and conformal decompositions, the Support-Circuit and
//! Ratio-Circuit oracles, circuit diameter walks, a Phase-I feasibility
//! method and a variable-fixing optimizer.

mod error;

pub mod circuits;
pub mod doubling;
pub mod instance;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod oracles;
pub mod rational;
pub mod simplex;
pub mod solver;
pub mod walk;

pub use error::{Error, Result};
pub use instance::LpInstance;
pub use matrix::{IndexSet, Matrix};
pub use rational::{Bound, Rational};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;
