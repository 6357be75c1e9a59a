//! Acceptance criteria, one printed line each. Runs without the libtest harness
//! so the lines are always shown.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use halfstep::cellspace::{builtin, constant_sheaf, external_tensor, skyscraper, SheafComplex};
use halfstep::dz::{hom_complex, qa_truncate, tensor_complex, CutParam, Flavor, FreeComplex, Half, Side};
use halfstep::intlin::FgAbGroup;
use halfstep::perv::{check_funct_with, random_sheaf, rp3_cone_battery, verify_tstructure, FunctMap, Profile, Structure};
use halfstep::tmod::{
    member, member_codim, member_ge_local, member_gt, member_half, member_std, p_truncate, same_truncation,
    torsion_pair_truncate,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Coh = BTreeMap<i64, FgAbGroup>;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn quarter_grid(lo: i64, hi: i64) -> Vec<CutParam> {
    CutParam::grid(CutParam::int(lo), CutParam::int(hi), CutParam::new(1, 4))
}

fn worked_example() -> Outcome {
    let lines = rp3_cone_battery();
    let bad: Vec<String> = lines
        .iter()
        .filter(|l| !l.ok)
        .map(|l| format!("{}: expected {}, computed {}", l.name, l.expected, l.computed))
        .collect();
    let n = lines.len();
    if bad.is_empty() {
        outcome(true, format!("{n}/{n} comparisons match"))
    } else {
        outcome(false, bad.join("; "))
    }
}

fn circle_heart() -> Outcome {
    let x = Arc::new(builtin::circle().face_poset());
    let p = Profile::of(&constant_sheaf(&x, &FreeComplex::z(0)));
    let half = CutParam::new(1, 2);
    let mut bad = Vec::new();
    for c in quarter_grid(-1, 2) {
        let le = p.member(c, Structure::Sd, Side::Le);
        let ge = p.member(c, Structure::Sd, Side::Ge);
        if le != (c >= half) || ge != (c <= half) {
            bad.push(format!("c={c}: <= {le}, >= {ge}"));
        }
    }
    if bad.is_empty() {
        outcome(true, "heart exactly at c=1/2 on 1/4Z in [-1,2]")
    } else {
        outcome(false, bad.join("; "))
    }
}

fn module_coincidence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checks, mut bad) = (0usize, Vec::new());
    for n in 0..200 {
        let x = common::random_complex(&mut rng);
        for k in -8..=8 {
            let s = Half::from_twice(k);
            let c = s.cut();
            let p = p_truncate(&x, c, Flavor::LeGt);
            let t = torsion_pair_truncate(&x, s);
            let lo = qa_truncate(&x, s, Side::Le);
            let hi = qa_truncate(&x, s.plus_half(), Side::Ge);
            let ok = p.verify().is_ok()
                && t.verify().is_ok()
                && same_truncation(&p, &t)
                && member(&t.lower, c, Side::Le)
                && member_gt(&t.upper, c)
                && member(&lo, c, Side::Le)
                && member_gt(&hi, c);
            checks += 1;
            if !ok {
                bad.push(format!("complex {n} at {c}"));
            }
        }
    }
    if bad.is_empty() {
        outcome(true, format!("200 complexes, {checks} cuts agree"))
    } else {
        outcome(false, format!("{} failures, first {}", bad.len(), bad[0]))
    }
}

fn pd(h: &Coh, c: CutParam, side: Side) -> bool {
    let s = match side {
        Side::Le => c.canon_le(),
        Side::Ge => c.canon_ge(),
    };
    member_half(h, s, side)
}

fn std(h: &Coh, c: CutParam, side: Side) -> bool {
    match side {
        Side::Le => h.keys().all(|&i| CutParam::int(i) <= c),
        Side::Ge => h.keys().all(|&i| CutParam::int(i) >= c),
    }
}

#[derive(Default)]
struct Tally {
    checked: usize,
    exercised: usize,
    failed: Vec<String>,
}

impl Tally {
    fn imply(&mut self, premise: bool, conclusion: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if premise {
            self.exercised += 1;
            if !conclusion {
                self.failed.push(what());
            }
        }
    }

    fn same(&mut self, a: bool, b: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        self.exercised += 1;
        if a != b {
            self.failed.push(what());
        }
    }
}

fn module_properties() -> Outcome {
    const PAIRS: usize = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid = quarter_grid(-4, 4);
    let names = ["hom bound", "inner (i)", "inner (ii)", "inner (iii)", "inner (iv)", "local criterion", "sandwich"];
    let mut t: Vec<Tally> = names.iter().map(|_| Tally::default()).collect();
    for n in 0..PAIRS {
        let f = common::random_complex(&mut rng);
        let g = common::random_complex(&mut rng);
        let (hf, hg) = (f.cohomology_all(), g.cohomology_all());
        let hom = hom_complex(&f, &g).cohomology_all();
        let ten = tensor_complex(&f, &g).cohomology_all();
        for &c in &grid {
            for &c2 in &grid {
                let at = || format!("pair {n}, c={c}, c'={c2}");
                let (diff, sum) = (c2.sub(c), c.add(c2));
                t[0].imply(pd(&hf, c, Side::Le) && pd(&hg, c2, Side::Ge), std(&hom, diff, Side::Ge), at);
                t[1].imply(pd(&hf, c, Side::Le) && std(&hg, c2, Side::Le), pd(&ten, sum, Side::Le), at);
                t[2].imply(std(&hf, c, Side::Le) && pd(&hg, c2, Side::Ge), pd(&hom, diff, Side::Ge), at);
                t[3].imply(pd(&hf, c, Side::Ge) && std(&hg, c2, Side::Le), pd(&hom, diff, Side::Le), at);
                t[4].imply(pd(&hf, c, Side::Ge) && pd(&hg, c2, Side::Ge), std(&ten, sum, Side::Ge), at);
            }
            for (x, h) in [(&f, &hf), (&g, &hg)] {
                let at = || format!("pair {n}, c={c}");
                t[5].same(pd(h, c, Side::Ge), member_ge_local(x, c), at);
                let half = c.add_halves(1);
                t[6].imply(member_std(x, c, Side::Le), member(x, c, Side::Le), at);
                t[6].imply(member(x, c, Side::Le), member_std(x, half, Side::Le), at);
                t[6].imply(member_std(x, half, Side::Ge), member(x, c, Side::Ge), at);
                t[6].imply(member(x, c, Side::Ge), member_std(x, c, Side::Ge), at);
                for side in [Side::Le, Side::Ge] {
                    t[6].same(member(x, c, side), member_codim(x, c, side), at);
                }
            }
        }
    }
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, t) in names.iter().zip(&t) {
        ok &= t.failed.is_empty() && t.exercised > 0;
        match t.failed.first() {
            None => parts.push(format!("{name} {}/{}", t.exercised, t.checked)),
            Some(first) => parts.push(format!("{name} FAILED {}x ({first})", t.failed.len())),
        }
    }
    outcome(ok, format!("{PAIRS} pairs; exercised/checked: {}", parts.join(", ")))
}

fn axioms() -> Outcome {
    let grid = quarter_grid(-3, 3);
    let mut parts = Vec::new();
    let mut ok = true;
    for name in ["interval", "circle", "simplex2", "sphere2"] {
        let x = Arc::new(builtin::by_name(name).expect("builtin").face_poset());
        let r = verify_tstructure(&x, 100, 5, &grid);
        let tot = r.total();
        ok &= r.passed() && tot.pass > 0;
        match r.failures.first() {
            None => parts.push(format!("{name} {} checks", tot.pass)),
            Some(f) => parts.push(format!("{name} {} failures, first {} on sample {}: {}", tot.fail, f.check, f.sample, f.detail)),
        }
    }
    outcome(ok, format!("100 samples each; {}", parts.join(", ")))
}

fn best_ge(p: &Profile, grid: &[CutParam]) -> Option<CutParam> {
    grid.iter().copied().filter(|&c| p.member(c, Structure::Sd, Side::Ge)).max()
}

fn product_bound(k: &SheafComplex, l: &SheafComplex, grid: &[CutParam]) -> Result<bool, String> {
    let (a, b) = match (best_ge(&Profile::of(k), grid), best_ge(&Profile::of(l), grid)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(false),
    };
    let p = Profile::of(&external_tensor(k, l));
    match p.failure(a.add(b), Structure::Ks, Side::Ge, false) {
        None => Ok(true),
        Some(f) => Err(format!("product misses KS>={} at {f:?}", a.add(b))),
    }
}

fn functoriality() -> Outcome {
    let grid = quarter_grid(-3, 6);
    let mut bad = Vec::new();
    let (mut checks, mut exercised) = (0, 0);
    for name in builtin::NAMES {
        let x = Arc::new(builtin::by_name(name).expect("builtin").face_poset());
        let mut sheaves = vec![constant_sheaf(&x, &FreeComplex::z(0))];
        if x.len() <= 20 {
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            sheaves.extend((0..3).map(|_| random_sheaf(&x, &mut rng)));
        }
        for k in &sheaves {
            let kp = Profile::of(k);
            let maps = (0..x.len()).map(FunctMap::Point).chain([FunctMap::ToPoint]);
            for f in maps {
                match check_funct_with(&f, k, &kp, &grid) {
                    Ok(r) => {
                        checks += r.checks.len();
                        exercised += r.exercised();
                        if let Some(c) = r.checks.iter().find(|c| !c.holds()) {
                            bad.push(format!("{name} {f:?}: {} at {} ({:?})", c.functor, c.cut, c.side));
                        }
                    }
                    Err(e) => bad.push(format!("{name} {f:?}: {e}")),
                }
            }
        }
    }
    let circle = Arc::new(builtin::circle().face_poset());
    let interval = Arc::new(builtin::interval().face_poset());
    let z = FreeComplex::z(0);
    let mut products = vec![(constant_sheaf(&circle, &z), constant_sheaf(&circle, &z))];
    for (a, b) in [(&circle, &circle), (&interval, &circle)] {
        for s in 0..a.len() {
            for t in 0..b.len() {
                products.push((skyscraper(a, s, &z), skyscraper(b, t, &FreeComplex::torsion_model(2, 0))));
            }
        }
    }
    let mut prods = 0;
    for (k, l) in &products {
        match product_bound(k, l, &grid) {
            Ok(true) => prods += 1,
            Ok(false) => bad.push("factor without a lower bound".into()),
            Err(e) => bad.push(e),
        }
    }
    if bad.is_empty() && exercised > 0 {
        outcome(true, format!("{exercised}/{checks} shift bounds exercised, {prods} product bounds hold"))
    } else {
        outcome(false, format!("{} failures, first {}", bad.len(), bad.first().cloned().unwrap_or_default()))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("worked example on the cone over RP3", worked_example),
        ("half-step heart of the circle", circle_heart),
        ("torsion pair and t-structure truncations agree", module_coincidence),
        ("module-level degree bounds", module_properties),
        ("t-structure axioms on cell spaces", axioms),
        ("functoriality and external products", functoriality),
    ];
    // Optional criterion numbers on the command line select a subset.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let t = Instant::now();
        let o = run();
        all &= o.ok;
        let mark = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {}: {mark} {name} ({:.1}s): {}", i + 1, t.elapsed().as_secs_f64(), o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
