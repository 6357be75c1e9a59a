#![allow(dead_code)]

use halfstep::dz::FreeComplex;
use halfstep::intlin::snf::kernel;
use halfstep::intlin::IntMatrix;
use halfstep::Int;
use rand::Rng;

pub const ENTRY: i64 = 4;

/// A random complex with ranks at most 4, support in `[-3, 3]` and entries in `[-4, 4]`.
///
/// Each differential is drawn row by row from small combinations of the left
/// kernel of the previous one, so `d ∘ d = 0` by construction.
pub fn random_complex(rng: &mut impl Rng) -> FreeComplex {
    let lo = rng.gen_range(-3..=3);
    let hi = rng.gen_range(lo..=3);
    let ranks: Vec<usize> = (lo..=hi).map(|_| rng.gen_range(0..=4)).collect();
    let mut diffs: Vec<IntMatrix> = Vec::new();
    for w in ranks.windows(2) {
        let (c, r) = (w[0], w[1]);
        let rows: Vec<Vec<Int>> = match diffs.last() {
            None => (0..r).map(|_| (0..c).map(|_| small(rng)).collect()).collect(),
            Some(prev) => {
                // Rows must annihilate the columns of the previous differential.
                let k = kernel(&prev.transpose());
                (0..r).map(|_| row_in(&k, rng)).collect()
            }
        };
        diffs.push(IntMatrix::from_nested(&rows, c).expect("shape"));
    }
    FreeComplex::new(lo, ranks, diffs).expect("d∘d = 0")
}

fn small(rng: &mut impl Rng) -> Int {
    Int::from(rng.gen_range(-ENTRY..=ENTRY))
}

fn row_in(k: &IntMatrix, rng: &mut impl Rng) -> Vec<Int> {
    for _ in 0..4 {
        let coef: Vec<Int> = (0..k.cols()).map(|_| Int::from(rng.gen_range(-2i64..=2))).collect();
        let v = k.mul_vec(&coef);
        if v.iter().all(|x| x.abs() <= Int::from(ENTRY)) {
            return v;
        }
    }
    vec![Int::ZERO; k.rows()]
}
