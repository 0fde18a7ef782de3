//! Numerical toolkit for complex Dirac structures.

pub mod classify;
pub mod cli;
pub mod dirac;
pub mod exprdsl;
pub mod field;
pub mod subspace;
