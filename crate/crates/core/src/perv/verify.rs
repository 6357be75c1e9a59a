use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cellspace::{external_tensor, global_hom, top_down, verdier_dual, SheafComplex, StratPoset};
use crate::dz::{CutParam, Flavor, Half, Side};
use crate::perv::{cell_level, random_sheaf, shuffled_order, truncate_ordered, Profile, SheafTriangle, Structure};

/// Products are only formed on spaces this small.
const PRODUCT_CELLS: usize = 8;
/// Number of sample pairs whose external product is checked.
const PRODUCT_PAIRS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyFailure {
    pub check: String,
    pub sample: usize,
    pub cut: Option<CutParam>,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub samples: usize,
    pub seed: u64,
    pub grid: Vec<CutParam>,
    pub checks: BTreeMap<String, Tally>,
    pub failures: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn total(&self) -> Tally {
        self.checks.values().fold(Tally::default(), |a, t| Tally { pass: a.pass + t.pass, fail: a.fail + t.fail })
    }

    fn record(&mut self, check: &str, ok: bool, sample: usize, cut: Option<CutParam>, detail: impl FnOnce() -> String) {
        let t = self.checks.entry(check.to_string()).or_default();
        if ok {
            t.pass += 1;
        } else {
            t.fail += 1;
            self.failures.push(VerifyFailure { check: check.to_string(), sample, cut, detail: detail() });
        }
    }

    fn merge(&mut self, other: VerifyReport) {
        for (k, t) in other.checks {
            let e = self.checks.entry(k).or_default();
            e.pass += t.pass;
            e.fail += t.fail;
        }
        self.failures.extend(other.failures);
    }
}

/// Truncations depend on the cut only through the per-dimension levels.
type Key = (Structure, Vec<Half>);

fn key(base: &StratPoset, c: CutParam, st: Structure, flavor: Flavor) -> Key {
    (st, (0..=base.max_dim()).map(|d| cell_level(c, d, st, flavor)).collect())
}

struct Sample {
    k: SheafComplex,
    prof: Profile,
    truncs: HashMap<Key, SheafTriangle>,
}

const STRUCTS: [Structure; 2] = [Structure::Sd, Structure::Ks];
const FLAVORS: [Flavor; 2] = [Flavor::LeGt, Flavor::LtGe];

fn flavor_sides(flavor: Flavor) -> (bool, bool) {
    // (lower strict, upper strict)
    match flavor {
        Flavor::LeGt => (false, true),
        Flavor::LtGe => (true, false),
    }
}

fn check_sample(i: usize, k: SheafComplex, grid: &[CutParam], seed: u64) -> (Sample, VerifyReport) {
    let base = k.base().clone();
    let mut rep = VerifyReport::default();
    let prof = Profile::of(&k);
    let dk = verdier_dual(&k);
    let dprof = Profile::of(&dk);
    let ddk = verdier_dual(&dk);
    rep.record("biduality of stalks", Profile::of(&ddk).stalks == prof.stalks, i, None, || "D D K has different stalks".into());
    let order = top_down(&base);
    let shuffled = shuffled_order(&base, seed ^ (i as u64).wrapping_mul(0x9e37_79b9));
    let mut truncs: HashMap<Key, SheafTriangle> = HashMap::new();
    for &c in grid {
        for (a, b) in [(Side::Ge, Side::Le), (Side::Le, Side::Ge)] {
            let ok = prof.member(c, Structure::Sd, a) == dprof.member(c.neg(), Structure::Sd, b);
            rep.record("duality exchange", ok, i, Some(c), || format!("{a:?} at c vs dual {b:?} at -c"));
        }
        let sd = |c: CutParam, s| prof.member(c, Structure::Sd, s);
        let ks = |c: CutParam, s| prof.member(c, Structure::Ks, s);
        let half = c.add_halves(1);
        rep.record("KS <= c inside sd <= c", !ks(c, Side::Le) || sd(c, Side::Le), i, Some(c), String::new);
        rep.record("sd >= c inside KS >= c", !sd(c, Side::Ge) || ks(c, Side::Ge), i, Some(c), String::new);
        rep.record("sd <= c inside KS <= c+1/2", !sd(c, Side::Le) || ks(half, Side::Le), i, Some(c), String::new);
        rep.record("KS >= c+1/2 inside sd >= c", !ks(half, Side::Ge) || sd(c, Side::Ge), i, Some(c), String::new);
        for st in STRUCTS {
            for flavor in FLAVORS {
                let key = key(&base, c, st, flavor);
                if truncs.contains_key(&key) {
                    continue;
                }
                let t = truncate_ordered(&k, c, flavor, st, &order);
                let tag = |name: &str| format!("{name} ({st:?}, {flavor:?})");
                rep.record(&tag("triangle"), t.verify().is_ok(), i, Some(c), || t.verify().unwrap_err());
                let (ls, us) = flavor_sides(flavor);
                let lp = Profile::of(&t.lower);
                let up = Profile::of(&t.upper);
                let lf = lp.failure(c, st, Side::Le, ls);
                let uf = up.failure(c, st, Side::Ge, us);
                rep.record(&tag("lower membership"), lf.is_none(), i, Some(c), || format!("{lf:?}"));
                rep.record(&tag("upper membership"), uf.is_none(), i, Some(c), || format!("{uf:?}"));
                let hom = global_hom(&t.lower, &t.upper);
                rep.record(&tag("orthogonality"), hom.is_zero(), i, Some(c), || format!("Hom(lower, upper) = {hom}"));
                let again = truncate_ordered(&t.lower, c, flavor, st, &order);
                rep.record(&tag("idempotence"), again.upper.is_stalkwise_acyclic(), i, Some(c), || "lower is not fixed".into());
                let again = truncate_ordered(&t.upper, c, flavor, st, &order);
                rep.record(&tag("idempotence"), again.lower.is_stalkwise_acyclic(), i, Some(c), || "upper is not fixed".into());
                let other = truncate_ordered(&k, c, flavor, st, &shuffled);
                let same = Profile::of(&other.lower).stalks == lp.stalks && Profile::of(&other.upper).stalks == up.stalks;
                rep.record(&tag("order independence"), same, i, Some(c), || "permuted cell order changed the output".into());
                truncs.insert(key, t);
            }
        }
    }
    (Sample { k, prof, truncs }, rep)
}

/// Largest grid cut with `K ∈ ≥c`, if any.
fn best_ge(prof: &Profile, grid: &[CutParam]) -> Option<CutParam> {
    grid.iter().copied().filter(|&c| prof.member(c, Structure::Sd, Side::Ge)).max()
}

/// Randomized check of the t-structure axioms on `base`.
pub fn verify_tstructure(base: &Arc<StratPoset>, samples: usize, seed: u64, grid: &[CutParam]) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sheaves: Vec<SheafComplex> = (0..samples).map(|_| random_sheaf(base, &mut rng)).collect();
    let results: Vec<(Sample, VerifyReport)> =
        sheaves.into_par_iter().enumerate().map(|(i, k)| check_sample(i, k, grid, seed)).collect();
    let mut report = VerifyReport { samples, seed, grid: grid.to_vec(), ..Default::default() };
    let mut data = Vec::with_capacity(samples);
    for (s, r) in results {
        report.merge(r);
        data.push(s);
    }
    // Orthogonality across samples: lower parts of one against upper parts of the next.
    let cross: Vec<VerifyReport> = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let mut rep = VerifyReport::default();
            let j = (i + 1) % data.len();
            for &c in grid {
                for st in STRUCTS {
                    for flavor in FLAVORS {
                        let key = key(base, c, st, flavor);
                        let (a, b) = (&data[i].truncs[&key], &data[j].truncs[&key]);
                        let hom = global_hom(&a.lower, &b.upper);
                        rep.record(&format!("cross orthogonality ({st:?}, {flavor:?})"), hom.is_zero(), i, Some(c), || {
                            format!("Hom(lower_{i}, upper_{j}) = {hom}")
                        });
                    }
                }
            }
            rep
        })
        .collect();
    for r in cross {
        report.merge(r);
    }
    if base.len() <= PRODUCT_CELLS && data.len() >= 2 {
        let prods: Vec<VerifyReport> = (0..PRODUCT_PAIRS.min(data.len()))
            .into_par_iter()
            .map(|i| {
                let mut rep = VerifyReport::default();
                let j = (i + 1) % data.len();
                if let (Some(a), Some(b)) = (best_ge(&data[i].prof, grid), best_ge(&data[j].prof, grid)) {
                    let p = Profile::of(&external_tensor(&data[i].k, &data[j].k));
                    let bound = a.add(b);
                    let f = p.failure(bound, Structure::Ks, Side::Ge, false);
                    rep.record("external product bound", f.is_none(), i, Some(bound), || format!("{f:?}"));
                }
                rep
            })
            .collect();
        for r in prods {
            report.merge(r);
        }
    }
    report.failures.sort_by(|a, b| (a.sample, &a.check).cmp(&(b.sample, &b.check)));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellspace::builtin;

    #[test]
    fn empty_and_small_runs() {
        let x = Arc::new(builtin::interval().face_poset());
        let grid = CutParam::grid(CutParam::int(-1), CutParam::int(1), CutParam::new(1, 2));
        let r = verify_tstructure(&x, 0, 1, &grid);
        assert!(r.passed() && r.checks.is_empty());
        let r = verify_tstructure(&x, 4, 1, &grid);
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.total().pass > 0);
        assert_eq!(r, verify_tstructure(&x, 4, 1, &grid));
    }
}
