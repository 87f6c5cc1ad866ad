//! Boundary objects of Teichmüller space at desk scale.
//!
//! * [`surface`]: signature inequalities (compactification type, Busemann
//!   continuity, global sections, fiber dimension bound).
//! * [`foliation`]: combinatorial decompositions of measured foliations.
//! * [`gm`]: Gardiner-Masur functions over finite curve systems.
//! * [`torus`]: closed-form extremal length, distance and horofunctions on
//!   the once-marked torus.
//! * [`pillowcase`]: Schwarz-Christoffel realization of L-shaped pillowcases
//!   and the regularity certificate for extremal length.
//! * [`cli`]: the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod foliation;
pub mod gm;
pub mod pillowcase;
pub mod surface;
pub mod torus;

pub use error::{Error, Result};
