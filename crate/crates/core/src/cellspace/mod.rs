//! Finite cell posets and constructible sheaf complexes on them.

mod expr;
mod poset;
mod sheaf;
mod simplicial;
mod functors;
pub(crate) mod kill;
mod value;

pub use expr::parse_sheaf;
pub use poset::{CellSpec, PosetSpec, StratPoset};
pub use sheaf::{cellular_complex, constant_sheaf, point_resolution, skyscraper, SheafComplex, SheafCone, SheafMap};
pub use simplicial::{builtin, SimplicialComplex, RP3_FACETS};
pub use functors::{
    closed_indicator, costalk, dualizing_complex, extend_zero, external_tensor, external_tensor_on, global_hom, open_indicator, punctured_star,
    restrict, restrict_closed, restrict_open, sections, sections_c, sheaf_hom, verdier_dual, Region,
};
pub use kill::{costalks_vanish_off, kill_all, pushforward_open, top_down, Killing, Pushforward};
pub use value::{resolve, Resolution, ValueSheaf};
