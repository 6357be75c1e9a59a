use std::collections::BTreeMap;

use crate::int::Int;
use crate::intlin::snf::{invariant_factors, rank};
use crate::intlin::{FgAbGroup, IntMatrix};
use crate::Error;

/// Bounded cochain complex of finite-rank free abelian groups.
///
/// `ranks[k]` is the rank in degree `lo + k`; `diffs[k]` is the differential
/// from degree `lo + k` to `lo + k + 1`, shaped `ranks[k+1] × ranks[k]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeComplex {
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<IntMatrix>,
}

impl FreeComplex {
    /// Validates shapes and `d ∘ d = 0`.
    pub fn new(lo: i64, ranks: Vec<usize>, diffs: Vec<IntMatrix>) -> Result<Self, Error> {
        let x = FreeComplex { lo, ranks, diffs };
        x.check()?;
        Ok(x)
    }

    pub(crate) fn from_parts(lo: i64, ranks: Vec<usize>, diffs: Vec<IntMatrix>) -> Self {
        debug_assert_eq!(diffs.len(), ranks.len().saturating_sub(1));
        FreeComplex { lo, ranks, diffs }
    }

    pub fn check(&self) -> Result<(), Error> {
        if self.diffs.len() != self.ranks.len().saturating_sub(1) {
            return Err(Error::InvalidComplex(format!(
                "{} degrees need {} differentials, found {}",
                self.ranks.len(),
                self.ranks.len().saturating_sub(1),
                self.diffs.len()
            )));
        }
        for (k, d) in self.diffs.iter().enumerate() {
            if d.shape() != (self.ranks[k + 1], self.ranks[k]) {
                return Err(Error::InvalidComplex(format!(
                    "differential in degree {} has shape {:?}, expected {:?}",
                    self.lo + k as i64,
                    d.shape(),
                    (self.ranks[k + 1], self.ranks[k])
                )));
            }
        }
        for k in 1..self.diffs.len() {
            if !self.diffs[k].mul(&self.diffs[k - 1]).is_zero() {
                return Err(Error::InvalidComplex(format!(
                    "d∘d ≠ 0 at degree {}",
                    self.lo + k as i64 - 1
                )));
            }
        }
        Ok(())
    }

    pub fn zero() -> Self {
        FreeComplex { lo: 0, ranks: Vec::new(), diffs: Vec::new() }
    }

    /// `ℤ^rank` concentrated in degree `deg`.
    pub fn free(rank: usize, deg: i64) -> Self {
        if rank == 0 {
            return Self::zero();
        }
        FreeComplex { lo: deg, ranks: vec![rank], diffs: Vec::new() }
    }

    /// `ℤ[−deg]`, i.e. ℤ in degree `deg`.
    pub fn z(deg: i64) -> Self {
        Self::free(1, deg)
    }

    /// Two-term complex `ℤ^cols → ℤ^rows` with the source in degree `deg`.
    pub fn two_term(deg: i64, m: IntMatrix) -> Self {
        FreeComplex { lo: deg, ranks: vec![m.cols(), m.rows()], diffs: vec![m] }.trimmed()
    }

    /// `[ℤ →(×n) ℤ]` in degrees `deg − 1, deg`; a free model of `ℤ/n` in degree `deg`.
    pub fn torsion_model(n: i64, deg: i64) -> Self {
        Self::two_term(deg - 1, IntMatrix::from_rows(1, 1, &[n]))
    }

    /// A minimal free model of the group `g` placed in degree `deg`.
    pub fn of_group(g: &FgAbGroup, deg: i64) -> Self {
        let t = g.torsion.len();
        let mut m = IntMatrix::zeros(g.rank + t, t);
        for (j, d) in g.torsion.iter().enumerate() {
            m.set(g.rank + j, j, d.clone());
        }
        Self::two_term(deg - 1, m)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Top degree; `lo − 1` for the zero complex.
    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, i: i64) -> usize {
        if i < self.lo || i > self.hi() {
            0
        } else {
            self.ranks[(i - self.lo) as usize]
        }
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    /// Stored differential out of degree `i`, if any.
    pub fn d_ref(&self, i: i64) -> Option<&IntMatrix> {
        if i < self.lo || i >= self.hi() {
            None
        } else {
            Some(&self.diffs[(i - self.lo) as usize])
        }
    }

    /// Differential `d^i`, shaped `rank(i+1) × rank(i)` in every degree.
    pub fn d(&self, i: i64) -> IntMatrix {
        match self.d_ref(i) {
            Some(m) => m.clone(),
            None => IntMatrix::zeros(self.rank(i + 1), self.rank(i)),
        }
    }

    pub fn diffs(&self) -> &[IntMatrix] {
        &self.diffs
    }

    /// Drops zero-rank degrees at both ends.
    pub fn trimmed(self) -> Self {
        let Some(first) = self.ranks.iter().position(|&r| r > 0) else {
            return Self::zero();
        };
        let last = self.ranks.iter().rposition(|&r| r > 0).unwrap();
        if first == 0 && last + 1 == self.ranks.len() {
            return self;
        }
        FreeComplex {
            lo: self.lo + first as i64,
            ranks: self.ranks[first..=last].to_vec(),
            diffs: self.diffs[first..last].to_vec(),
        }
    }

    /// Builds from a per-degree description over `[lo, hi]`; `d(i)` must be shaped correctly.
    pub fn build(lo: i64, hi: i64, rank: impl Fn(i64) -> usize, d: impl Fn(i64) -> IntMatrix) -> Self {
        if hi < lo {
            return Self::zero();
        }
        let ranks: Vec<usize> = (lo..=hi).map(&rank).collect();
        let diffs: Vec<IntMatrix> = (lo..hi).map(&d).collect();
        FreeComplex::from_parts(lo, ranks, diffs).trimmed()
    }

    pub fn cohomology(&self, i: i64) -> FgAbGroup {
        let n = self.rank(i);
        if n == 0 {
            return FgAbGroup::zero();
        }
        let out_rank = self.d_ref(i).map_or(0, rank);
        let inv = self.d_ref(i - 1).map_or_else(Vec::new, invariant_factors);
        FgAbGroup {
            rank: n - out_rank - inv.len(),
            torsion: inv.into_iter().filter(|d| !d.is_one()).collect(),
        }
    }

    /// Nonzero cohomology groups by degree.
    pub fn cohomology_all(&self) -> BTreeMap<i64, FgAbGroup> {
        let invs: Vec<Vec<Int>> = self.diffs.iter().map(invariant_factors).collect();
        let mut out = BTreeMap::new();
        for (k, &n) in self.ranks.iter().enumerate() {
            let out_rank = invs.get(k).map_or(0, Vec::len);
            let inv: &[Int] = if k > 0 { &invs[k - 1] } else { &[] };
            let g = FgAbGroup {
                rank: n - out_rank - inv.len(),
                torsion: inv.iter().filter(|d| !d.is_one()).cloned().collect(),
            };
            if !g.is_zero() {
                out.insert(self.lo + k as i64, g);
            }
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology_all().is_empty()
    }

    pub fn direct_sum(&self, other: &FreeComplex) -> FreeComplex {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        FreeComplex::build(
            lo,
            hi,
            |i| self.rank(i) + other.rank(i),
            |i| {
                let (a, b) = (self.d(i), other.d(i));
                IntMatrix::block(
                    &a,
                    &IntMatrix::zeros(a.rows(), b.cols()),
                    &IntMatrix::zeros(b.rows(), a.cols()),
                    &b,
                )
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cohomology_examples() {
        let x = FreeComplex::two_term(0, IntMatrix::from_rows(1, 1, &[2]));
        assert_eq!(x.cohomology(0), FgAbGroup::zero());
        assert_eq!(x.cohomology(1), FgAbGroup::cyclic(2));
        assert_eq!(FreeComplex::z(0).cohomology(0), FgAbGroup::free(1));
        let y = FreeComplex::two_term(0, IntMatrix::from_rows(1, 1, &[1]));
        assert!(y.is_acyclic());
    }

    #[test]
    fn rejects_bad_square() {
        let d = IntMatrix::from_rows(1, 1, &[1]);
        let err = FreeComplex::new(3, vec![1, 1, 1], vec![d.clone(), d]).unwrap_err();
        assert!(err.to_string().contains("degree 3"));
    }
}
