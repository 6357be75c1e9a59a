use std::collections::BTreeMap;

use crate::dz::FreeComplex;
use crate::intlin::IntMatrix;
use crate::Error;

/// Degreewise integer matrices `f^i : X^i → Y^i` commuting with differentials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainMap {
    source: FreeComplex,
    target: FreeComplex,
    mats: BTreeMap<i64, IntMatrix>,
}

impl ChainMap {
    /// Validates shapes and `d_Y ∘ f = f ∘ d_X`.
    pub fn new(source: FreeComplex, target: FreeComplex, mats: BTreeMap<i64, IntMatrix>) -> Result<Self, Error> {
        for (&i, m) in &mats {
            if m.shape() != (target.rank(i), source.rank(i)) {
                return Err(Error::InvalidComplex(format!(
                    "map in degree {i} has shape {:?}, expected {:?}",
                    m.shape(),
                    (target.rank(i), source.rank(i))
                )));
            }
        }
        let f = ChainMap::from_parts(source, target, mats);
        f.check()?;
        Ok(f)
    }

    pub(crate) fn from_parts(source: FreeComplex, target: FreeComplex, mats: BTreeMap<i64, IntMatrix>) -> Self {
        let mats = mats.into_iter().filter(|(_, m)| m.rows() > 0 && m.cols() > 0).collect();
        ChainMap { source, target, mats }
    }

    /// Builds from a per-degree function; only called on degrees where both sides are nonzero.
    pub fn from_fn(source: FreeComplex, target: FreeComplex, f: impl Fn(i64) -> IntMatrix) -> Self {
        let mut mats = BTreeMap::new();
        for i in source.degrees() {
            if source.rank(i) > 0 && target.rank(i) > 0 {
                let m = f(i);
                debug_assert_eq!(m.shape(), (target.rank(i), source.rank(i)), "degree {i}");
                mats.insert(i, m);
            }
        }
        ChainMap { source, target, mats }
    }

    pub fn check(&self) -> Result<(), Error> {
        let lo = self.source.lo().min(self.target.lo());
        let hi = self.source.hi().max(self.target.hi());
        for i in lo..=hi {
            let left = self.target.d(i).mul(&self.mat(i));
            let right = self.mat(i + 1).mul(&self.source.d(i));
            if left != right {
                return Err(Error::InvalidComplex(format!("map does not commute with d in degree {i}")));
            }
        }
        Ok(())
    }

    pub fn identity(x: &FreeComplex) -> Self {
        ChainMap::from_fn(x.clone(), x.clone(), |i| IntMatrix::identity(x.rank(i)))
    }

    pub fn zero(source: &FreeComplex, target: &FreeComplex) -> Self {
        ChainMap { source: source.clone(), target: target.clone(), mats: BTreeMap::new() }
    }

    pub fn source(&self) -> &FreeComplex {
        &self.source
    }

    pub fn target(&self) -> &FreeComplex {
        &self.target
    }

    pub fn mats(&self) -> &BTreeMap<i64, IntMatrix> {
        &self.mats
    }

    pub fn mat_ref(&self, i: i64) -> Option<&IntMatrix> {
        self.mats.get(&i)
    }

    /// `f^i`, shaped `rank Y^i × rank X^i` in every degree.
    pub fn mat(&self, i: i64) -> IntMatrix {
        match self.mats.get(&i) {
            Some(m) => m.clone(),
            None => IntMatrix::zeros(self.target.rank(i), self.source.rank(i)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mats.values().all(IntMatrix::is_zero)
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &ChainMap) -> ChainMap {
        assert_eq!(self.target.ranks(), g.source.ranks(), "composition: middle complexes differ");
        let mut mats = BTreeMap::new();
        for (&i, a) in &self.mats {
            if let Some(b) = g.mats.get(&i) {
                mats.insert(i, b.mul(a));
            }
        }
        ChainMap::from_parts(self.source.clone(), g.target.clone(), mats)
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        let mut mats = self.mats.clone();
        for (&i, m) in &other.mats {
            let v = match mats.get(&i) {
                Some(a) => a.add(m),
                None => m.clone(),
            };
            mats.insert(i, v);
        }
        ChainMap::from_parts(self.source.clone(), self.target.clone(), mats)
    }

    pub fn neg(&self) -> ChainMap {
        let mats = self.mats.iter().map(|(&i, m)| (i, m.neg())).collect();
        ChainMap::from_parts(self.source.clone(), self.target.clone(), mats)
    }

    pub fn sub(&self, other: &ChainMap) -> ChainMap {
        self.add(&other.neg())
    }

    /// Same matrices viewed between replacement complexes of identical ranks.
    pub fn with_ends(&self, source: FreeComplex, target: FreeComplex) -> ChainMap {
        ChainMap::from_parts(source, target, self.mats.clone())
    }
}
