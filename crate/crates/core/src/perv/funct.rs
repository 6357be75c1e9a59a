use serde::{Deserialize, Serialize};

use crate::cellspace::{
    constant_sheaf, costalk, dualizing_complex, extend_zero, pushforward_open, restrict_open, sections, sections_c, skyscraper,
    Region, SheafComplex,
};
use crate::dz::{minimal_model, shift, CutParam, FreeComplex, Side};
use crate::perv::{Profile, Structure};
use crate::Error;

/// The maps whose shift bounds can be checked.
#[derive(Clone, Debug)]
pub enum FunctMap {
    /// A point of the given cell; push-forwards only when the cell is a vertex.
    Point(usize),
    /// Inclusion of an open cell union.
    Open(Vec<bool>),
    /// The constant map to a point.
    ToPoint,
}

/// One implication `input ∈ side(c) ⟹ output ∈ side(c ± d/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctCheck {
    pub functor: String,
    pub cut: CutParam,
    pub side: Side,
    pub premise: bool,
    pub conclusion: bool,
}

impl FunctCheck {
    pub fn holds(&self) -> bool {
        !self.premise || self.conclusion
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctReport {
    pub fiber_dim: usize,
    pub checks: Vec<FunctCheck>,
}

impl FunctReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(FunctCheck::holds)
    }

    /// Checks whose premise held, so the bound was actually exercised.
    pub fn exercised(&self) -> usize {
        self.checks.iter().filter(|c| c.premise).count()
    }
}

enum Obj {
    /// The input complex itself, whose profile is given.
    Input,
    Point(FreeComplex),
    Sheaf(SheafComplex),
}

impl Obj {
    fn profile(&self, input: &Profile) -> Profile {
        match self {
            Obj::Input => input.clone(),
            Obj::Point(x) => Profile::of_module(x),
            Obj::Sheaf(k) => Profile::of(k),
        }
    }
}

/// Checks the four shift bounds for pull-backs and push-forwards along `f` on `K`,
/// at every cut in `cuts`. Pull-backs use `K`; push-forwards use `f^{-1}K`, or
/// `K` itself for the constant map.
pub fn check_funct(f: &FunctMap, k: &SheafComplex, cuts: &[CutParam]) -> Result<FunctReport, Error> {
    check_funct_with(f, k, &Profile::of(k), cuts)
}

/// [`check_funct`] with the profile of `K` already computed, for many maps on one `K`.
pub fn check_funct_with(f: &FunctMap, k: &SheafComplex, kp: &Profile, cuts: &[CutParam]) -> Result<FunctReport, Error> {
    let base = k.base();
    let (d, g, pulls, f_src, pushes): (usize, Obj, Vec<(&str, Obj)>, Obj, Vec<(&str, Obj)>) = match f {
        FunctMap::Point(s) => {
            let s = *s;
            if s >= base.len() {
                return Err(Error::UnknownCell(s.to_string()));
            }
            let dim = base.dim(s) as i64;
            let stalk = k.stalk(s);
            let pulls = vec![("f^-1", Obj::Point(stalk.clone())), ("f^!", Obj::Point(shift(&costalk(k, s), -dim)))];
            let pushes = if dim == 0 {
                let sky = skyscraper(base, s, &stalk);
                vec![("Rf_*", Obj::Sheaf(sky.clone())), ("Rf_!", Obj::Sheaf(sky))]
            } else {
                Vec::new()
            };
            (0, Obj::Input, pulls, Obj::Point(stalk), pushes)
        }
        FunctMap::Open(mask) => {
            let u = Region::open(base, mask.clone())?;
            let ku = restrict_open(k, &u)?;
            let pulls = vec![("f^-1", Obj::Sheaf(ku.clone())), ("f^!", Obj::Sheaf(ku.clone()))];
            let pushes = vec![
                ("Rf_*", Obj::Sheaf(pushforward_open(&ku, &u, base)?.complex)),
                ("Rf_!", Obj::Sheaf(extend_zero(&ku, &u, base)?)),
            ];
            (0, Obj::Input, pulls, Obj::Sheaf(ku), pushes)
        }
        FunctMap::ToPoint => {
            let all = vec![true; base.len()];
            // Minimal models keep the pulled-back sheaves small.
            let rg = minimal_model(&sections(k, &all)?).complex;
            let rgc = minimal_model(&sections_c(k, &all)?).complex;
            let pulls = vec![
                ("f^-1", Obj::Sheaf(constant_sheaf(base, &rg))),
                ("f^!", Obj::Sheaf(dualizing_complex(base).tensor_module(&rg))),
            ];
            let pushes = vec![("Rf_*", Obj::Point(rg.clone())), ("Rf_!", Obj::Point(rgc))];
            (base.max_dim(), Obj::Point(rg), pulls, Obj::Input, pushes)
        }
    };
    let half = d as i64;
    let gp = g.profile(kp);
    let fp = f_src.profile(kp);
    let mut checks = Vec::new();
    // f^{-1} raises the ≤ bound by d/2; f^! lowers the ≥ bound by d/2; dually for push-forwards.
    let rules = |name: &str| match name {
        "f^-1" | "Rf_!" => (Side::Le, half),
        _ => (Side::Ge, -half),
    };
    for (name, obj) in pulls.iter().map(|(n, o)| (*n, o)).chain(pushes.iter().map(|(n, o)| (*n, o))) {
        let src = if name.starts_with('f') { &gp } else { &fp };
        let out = obj.profile(kp);
        let (side, shift_halves) = rules(name);
        for &c in cuts {
            checks.push(FunctCheck {
                functor: name.to_string(),
                cut: c,
                side,
                premise: src.member(c, Structure::Sd, side),
                conclusion: out.member(c.add_halves(shift_halves), Structure::Sd, side),
            });
        }
    }
    Ok(FunctReport { fiber_dim: d, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellspace::builtin;
    use std::sync::Arc;

    #[test]
    fn circle_bounds() {
        let c = Arc::new(builtin::circle().face_poset());
        let k = constant_sheaf(&c, &FreeComplex::z(0));
        let cuts = CutParam::grid(CutParam::int(-2), CutParam::int(2), CutParam::new(1, 4));
        for f in [FunctMap::Point(0), FunctMap::ToPoint, FunctMap::Open(c.mask(&[c.cell("0-1").unwrap()]))] {
            let r = check_funct(&f, &k, &cuts).unwrap();
            assert!(r.passed(), "{f:?}: {:?}", r.checks.iter().find(|c| !c.holds()));
            assert!(r.exercised() > 0);
        }
        let r = check_funct(&FunctMap::Point(0), &k, &[CutParam::new(1, 2)]).unwrap();
        let up = r.checks.iter().find(|c| c.functor == "f^!").unwrap();
        assert!(up.premise && up.conclusion);
        let r = check_funct(&FunctMap::ToPoint, &k, &[CutParam::new(1, 2)]).unwrap();
        let push = r.checks.iter().find(|c| c.functor == "Rf_*").unwrap();
        assert!(push.premise && push.conclusion);
    }
}
