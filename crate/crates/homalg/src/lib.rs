//! Exact-arithmetic workbench for homological algebra over the integers.
//!
//! The crate computes with bounded cochain complexes of finitely generated
//! free `Z`-modules and the structures layered on top of them:
//!
//! * [`exactlin`] — Smith/Hermite normal forms, subgroup calculus, homology
//!   of composable integer matrices;
//! * [`complexes`] — cochain complexes, chain maps, shifts, cones, tensor
//!   products, brutal truncations, cubes and total cofibers;
//! * [`filtered`] — filtered complexes, strict double complexes and the
//!   graded/total-complex dictionary, Day convolution, completion;
//! * [`specseq`] — the spectral sequence of a filtered complex and the
//!   Deligne décalage operator;
//! * [`koszul`] — weight-graded free noncommutative dgas, the tower of
//!   algebras presenting the exterior algebra, and Massey powers;
//! * [`barcobar`] — bar and cobar constructions for weight-graded connected
//!   (co)algebras;
//! * [`json`] — the JSON wire formats for every ingestable and emittable
//!   value;
//! * [`sampling`] — seeded random instance generators for the test suites;
//! * [`verify`] — the acceptance checks, runnable from tests or the CLI.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything is safe to share across threads.

pub mod barcobar;
pub mod complexes;
pub mod error;
pub mod exactlin;
pub mod filtered;
pub mod json;
pub mod koszul;
pub mod sampling;
pub mod specseq;
pub mod verify;

pub use error::{HomalgError, Result};
