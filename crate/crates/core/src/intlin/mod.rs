//! Exact integer linear algebra and finitely generated abelian groups.

pub mod group;
pub mod matrix;
pub mod snf;

pub use group::{codim_support, group_from_presentation, local_cohomology_at_prime, torsion_split, Codim, FgAbGroup};
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, Snf};
