//! Half-integer indexed t-structures on complexes of abelian groups and on
//! constructible sheaf complexes over finite cell posets.

mod error;
pub mod int;
pub mod cellspace;
pub mod dz;
pub mod intlin;
pub mod perv;
pub mod tmod;

pub use error::Error;
pub use int::Int;
