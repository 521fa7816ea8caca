//! Exact integer linear algebra: Smith/Hermite normal forms, subgroup
//! calculus on `Z^n`, and homology of two composable integer matrices.
//!
//! Everything downstream (complexes, filtrations, spectral sequences, dga
//! homology) reduces to the primitives in this module. No floating point
//! appears anywhere in the crate.

mod matrix;
mod quotient;
mod snf;
mod subgroup;

pub use matrix::IntMatrix;
pub use quotient::{homology_at, quotient, FgAbGroup, PresentedHom, QuotPres};
pub use snf::{smith_normal_form, SmithForm};
pub use subgroup::{col_hnf, col_hnf_transform, kernel, solve_exact, Subgroup};
