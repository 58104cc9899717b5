//! Exact computation of degree-one Milnor K-invariants of algebraic groups
//! of multiplicative type.
//!
//! Everything happens on the character-module side: a group of multiplicative
//! type is handled as a finitely generated module over a finite Galois
//! quotient, invariant groups come out of fixed points and first cohomology
//! of such modules, and every headline computation is cross-checked against a
//! second, independent route (a resolution by tori or a brute-force oracle).
//! All arithmetic is exact.

pub mod corpus;
pub mod error;
pub mod galois;
pub mod invariants;
pub mod lattice;
pub mod multtype;
pub mod problem;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
