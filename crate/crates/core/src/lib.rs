//! Linear-programming and symmetry tools for orthogonal arrays.
//!
//! An `OA(λ s^t, k, s, t)` is described by its frequency vector `N_x` over
//! `[s]^k`. This crate builds the full margin system and its reduced
//! inequality form over the variables `N_y`, `d(1,y) > t`, certifies facets
//! and interior points with exact rational simplex, computes the symmetry
//! group of either system and enumerates integer solutions up to symmetry.

pub mod cli;
pub mod coefficients;
pub mod constraints;
pub mod enumeration;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod rational;
pub mod symmetry;

pub use error::{OapError, Result};
pub use model::{LevelTuple, OAParams, VariableIndex};
