//! Finite-dimensional C*-weak Hopf algebras: structure constants, axiom
//! checks, duality, Haar integrals, representations, module algebras and
//! reconstruction from depth-2 inclusions.

pub mod actions;
pub mod algebra;
pub mod constructors;
pub mod error;
pub mod linalg;
pub mod reconstruct;
pub mod rep;
pub mod report;
pub mod wha;

pub use error::{Error, Result};
