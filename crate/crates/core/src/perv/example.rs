use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cellspace::{
    builtin, constant_sheaf, costalk, kill_all, open_indicator, punctured_star, sections, skyscraper, Killing, SheafComplex,
    SheafMap,
};
use crate::dz::{ChainMap, CutParam, Flavor, FreeComplex, Half, Side};
use crate::int::Int;
use crate::intlin::{FgAbGroup, IntMatrix};
use crate::perv::{ks_truncate, lower_part, sd_truncate, Profile, Structure};

/// One expected-versus-computed comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryLine {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub ok: bool,
}

fn show(h: &BTreeMap<i64, FgAbGroup>) -> String {
    if h.is_empty() {
        return "0".into();
    }
    h.iter().map(|(i, g)| format!("H^{i}={g}")).collect::<Vec<_>>().join(", ")
}

fn yes(b: bool) -> String {
    if b { "yes" } else { "no" }.into()
}

struct Lines(Vec<BatteryLine>);

impl Lines {
    fn push(&mut self, name: &str, expected: String, computed: String) {
        let ok = expected == computed;
        self.0.push(BatteryLine { name: name.into(), expected, computed, ok });
    }

    fn truth(&mut self, name: &str, computed: bool) {
        self.push(name, yes(true), yes(computed));
    }

    /// Isomorphism test by stalk and costalk cohomology at every cell.
    fn iso(&mut self, name: &str, want: &Profile, got: &Profile, label: &str) {
        let computed = if want == got { label.to_string() } else { describe(got) };
        self.push(name, label.to_string(), computed);
    }
}

/// Nonzero stalks, for a mismatch message.
fn describe(p: &Profile) -> String {
    let parts: Vec<String> =
        p.stalks.iter().enumerate().filter(|(_, h)| !h.is_empty()).map(|(s, h)| format!("#{s}: {}", show(h))).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        format!("stalks {}", parts.join("; "))
    }
}

fn groups(v: &[(i64, FgAbGroup)]) -> BTreeMap<i64, FgAbGroup> {
    v.iter().cloned().collect()
}

fn in_range(p: &Profile, a: CutParam, b: CutParam) -> bool {
    p.member(a, Structure::Sd, Side::Ge) && p.member(b, Structure::Sd, Side::Le)
}

/// Prefix inclusion `cone(φ) → cone(φ')` when `φ'` extends `φ` by further pieces.
fn stage_map(from: &SheafComplex, to: &SheafComplex) -> SheafMap {
    let m = ChainMap::from_fn(from.complex().clone(), to.complex().clone(), |n| {
        let (r, c) = (to.complex().rank(n), from.complex().rank(n));
        IntMatrix::from_triplets(r, c, (0..c).map(|i| (i, i, Int::ONE)))
    });
    SheafMap::new(from.clone(), to.clone(), m).expect("prefix inclusion is a sheaf map")
}

/// The worked example on the cone over the real projective 3-space with `M = ℤ`.
pub fn rp3_cone_battery() -> Vec<BatteryLine> {
    let x = Arc::new(builtin::rp3_cone().face_poset());
    let apex = x.cell("c").expect("apex");
    let z = FreeComplex::z(0);
    let zx = constant_sheaf(&x, &z);
    let q = CutParam::new;
    let two = CutParam::int(2);
    let mut out = Lines(Vec::new());

    let link = groups(&[(0, FgAbGroup::free(1)), (2, FgAbGroup::cyclic(2)), (3, FgAbGroup::free(1))]);
    let u = punctured_star(&x, apex);
    let u_all: Vec<bool> = (0..x.len()).map(|s| s != apex).collect();
    out.push("sections over the punctured cone", show(&link), show(&sections(&zx, &u).expect("open").cohomology_all()));
    let cost = groups(&[(3, FgAbGroup::cyclic(2)), (4, FgAbGroup::free(1))]);
    out.push("costalk of Z_X at the apex", show(&cost), show(&costalk(&zx, apex).cohomology_all()));

    let pz = Profile::of(&zx);
    out.truth("Z_X in pD<=2", pz.member(two, Structure::Sd, Side::Le));
    out.truth("Z_X in pD>=2", pz.member(two, Structure::Sd, Side::Ge));

    // j_! of the constant sheaf off the apex.
    let jz = open_indicator(&x, &u_all).expect("open");
    let pj = Profile::of(&jz);
    out.truth("j_!Z in pD[1,2]", in_range(&pj, CutParam::int(1), two));
    let t = sd_truncate(&jz, two, Flavor::LtGe);
    out.truth("triangle ptau<2 j_!Z -> j_!Z -> ptau>=2 j_!Z", t.verify().is_ok());
    let sky1 = Profile::of(&skyscraper(&x, apex, &FreeComplex::z(1)));
    let pl = Profile::of(&t.lower);
    out.iso("ptau<2 j_!Z", &sky1, &pl, "Z_apex[-1]");
    out.truth("Z_apex[-1] in pD1", in_range(&pl, CutParam::int(1), CutParam::int(1)));
    out.iso("ptau>=2 j_!Z", &pz, &Profile::of(&t.upper), "Z_X");

    // Rj_* in two stages: first the torsion of the apex costalk, then the rest.
    let mut kill = Killing::start(&zx);
    kill.step(apex, |c| lower_part(c, Half::int(3)));
    let l = kill.cone();
    kill.step(apex, kill_all);
    let r = kill.cone();
    let pr = Profile::of(&r.complex);
    out.push("stalk of Rj_*Z at the apex", show(&link), show(&pr.stalks[apex]));
    out.truth("Rj_*Z in pD[2,3]", in_range(&pr, two, CutParam::int(3)));
    let t = sd_truncate(&r.complex, two, Flavor::LeGt);
    out.truth("triangle ptau<=2 Rj_*Z -> Rj_*Z -> ptau>2 Rj_*Z", t.verify().is_ok());
    let sky3 = Profile::of(&skyscraper(&x, apex, &FreeComplex::z(3)));
    let pu = Profile::of(&t.upper);
    out.iso("ptau>2 Rj_*Z", &sky3, &pu, "Z_apex[-3]");
    out.truth("Z_apex[-3] in pD3", in_range(&pu, CutParam::int(3), CutParam::int(3)));

    // L = cone(Z/2_apex[-3] -> Z_X) is the truncation: L -> Rj_*Z -> Z_apex[-3] with L in pD<=2.
    let ll = &l.complex;
    let pll = Profile::of(ll);
    let to_r = stage_map(ll, &r.complex);
    let c = to_r.cone();
    out.iso("cone(L -> Rj_*Z)", &sky3, &Profile::of(&c.complex), "Z_apex[-3]");
    out.truth("L in pD<=2", pll.member(two, Structure::Sd, Side::Le));
    out.iso("L against ptau<=2 Rj_*Z", &Profile::of(&t.lower), &pll, "equal");

    // First heart sequence: 0 -> Z_S -> L -> (Z/2)_apex[-2] -> 0 in pD[3/2,2].
    let m = l.incl.clone();
    let c1 = m.cone();
    let tors2 = Profile::of(&skyscraper(&x, apex, &FreeComplex::torsion_model(2, 2)));
    let pc1 = Profile::of(&c1.complex);
    out.iso("cone(Z_S -> L)", &tors2, &pc1, "(Z/2)_apex[-2]");
    out.truth("(Z/2)_apex[-2] in pD3/2", in_range(&pc1, q(3, 2), q(3, 2)));
    let (a, b) = (q(3, 2), two);
    out.truth("Z_S, L, (Z/2)_apex[-2] in pD[3/2,2]", in_range(&pz, a, b) && in_range(&pll, a, b) && in_range(&pc1, a, b));

    // Second heart sequence: 0 -> (Z/2)_apex[-3] -> Z_S -> L -> 0 in pD[2,5/2].
    let (fib, _) = m.fiber();
    let tors3 = Profile::of(&skyscraper(&x, apex, &FreeComplex::torsion_model(2, 3)));
    let pf = Profile::of(&fib);
    out.iso("fiber(Z_S -> L)", &tors3, &pf, "(Z/2)_apex[-3]");
    let (a, b) = (two, q(5, 2));
    out.truth("(Z/2)_apex[-3], Z_S, L in pD[2,5/2]", in_range(&pf, a, b) && in_range(&pz, a, b) && in_range(&pll, a, b));

    // The middle perversity sees the same truncation but puts the Z/2 term at 2.
    let k = ks_truncate(&r.complex, two, Flavor::LeGt);
    out.iso("KS tau<=2 Rj_*Z", &Profile::of(&t.lower), &Profile::of(&k.lower), "ptau<=2 Rj_*Z");
    out.truth(
        "(Z/2)_apex[-2] in the KS heart at 2",
        pc1.member(two, Structure::Ks, Side::Le) && pc1.member(two, Structure::Ks, Side::Ge),
    );
    out.truth("(Z/2)_apex[-2] below 2 in pD", pc1.member_strict(two, Structure::Sd, Side::Le));
    out.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_matches() {
        let lines = rp3_cone_battery();
        for l in &lines {
            assert!(l.ok, "{}: expected {}, computed {}", l.name, l.expected, l.computed);
        }
        assert!(lines.len() >= 20);
    }
}
