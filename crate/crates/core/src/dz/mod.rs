//! Bounded complexes of finite-rank free abelian groups as a model of `D^b(ℤ)`.

mod complex;
mod cut;
mod lift;
mod map;
mod model;
mod ops;
mod trunc;

pub use complex::FreeComplex;
pub use cut::{CutParam, Flavor, Half, ParseCutError, Side};
pub use lift::{
    induced_cone_map, induced_cone_map_masked, lift_over, lift_over_masked, no_mask, null_homotopy_masked,
    same_cohomology, Mask,
};
pub use map::ChainMap;
pub use model::{minimal_model, MinimalModel};
pub use ops::{
    cone, cone_map, dual, fiber, hom_complex, is_null_homotopic, is_quasi_iso, shift, shift_map, tensor_complex,
    tensor_map, Cone, HomLayout,
};
pub use trunc::{qa_truncate, split_at, std_truncate, Split};

pub fn cohomology(x: &FreeComplex, i: i64) -> crate::intlin::FgAbGroup {
    x.cohomology(i)
}
