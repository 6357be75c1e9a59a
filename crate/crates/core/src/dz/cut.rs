use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A half-integer `k/2`, stored as `k`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(i64);

impl Half {
    pub fn from_twice(k: i64) -> Self {
        Half(k)
    }

    pub fn int(n: i64) -> Self {
        Half(2 * n)
    }

    /// `n − ½`.
    pub fn below(n: i64) -> Self {
        Half(2 * n - 1)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `n` with `self ∈ {n − ½, n}`.
    pub fn ceil(self) -> i64 {
        Integer::div_ceil(&self.0, &2)
    }

    pub fn floor(self) -> i64 {
        Integer::div_floor(&self.0, &2)
    }

    pub fn plus_half(self) -> Self {
        Half(self.0 + 1)
    }

    pub fn minus_half(self) -> Self {
        Half(self.0 - 1)
    }

    pub fn to_ratio(self) -> Ratio<i64> {
        Ratio::new(self.0, 2)
    }

    pub fn cut(self) -> CutParam {
        CutParam(self.to_ratio())
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Debug for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Which half of a t-structure a membership test refers to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Side {
    Le,
    Ge,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Le => Side::Ge,
            Side::Ge => Side::Le,
        }
    }
}

/// The two ways to split at a cut: `(≤c, >c)` or `(<c, ≥c)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Flavor {
    LeGt,
    LtGe,
}

impl Flavor {
    /// Half-integer level `s` such that the split is `(≤s, ≥s+½)`.
    pub fn level(self, c: CutParam) -> Half {
        match self {
            Flavor::LeGt => c.canon_le(),
            Flavor::LtGe => c.strict_below(),
        }
    }
}

/// A rational cut `c`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CutParam(pub Ratio<i64>);

impl CutParam {
    pub fn new(num: i64, den: i64) -> Self {
        CutParam(Ratio::new(num, den))
    }

    pub fn int(n: i64) -> Self {
        CutParam(Ratio::from_integer(n))
    }

    pub fn value(self) -> Ratio<i64> {
        self.0
    }

    /// `max{s ∈ ½ℤ : s ≤ c}`.
    pub fn canon_le(self) -> Half {
        Half((self.0 * 2).floor().to_integer())
    }

    /// `min{s ∈ ½ℤ : s ≥ c}`.
    pub fn canon_ge(self) -> Half {
        Half((self.0 * 2).ceil().to_integer())
    }

    /// `max{s ∈ ½ℤ : s < c}`.
    pub fn strict_below(self) -> Half {
        Half(self.canon_ge().0 - 1)
    }

    /// `min{s ∈ ½ℤ : s > c}`.
    pub fn strict_above(self) -> Half {
        Half(self.canon_le().0 + 1)
    }

    pub fn is_half_integer(self) -> bool {
        (self.0 * 2).is_integer()
    }

    /// `c + k/2`.
    pub fn add_halves(self, k: i64) -> Self {
        CutParam(self.0 + Ratio::new(k, 2))
    }

    pub fn add(self, other: CutParam) -> Self {
        CutParam(self.0 + other.0)
    }

    pub fn sub(self, other: CutParam) -> Self {
        CutParam(self.0 - other.0)
    }

    pub fn neg(self) -> Self {
        CutParam(-self.0)
    }

    /// Largest integer `≤ c`.
    pub fn floor(self) -> i64 {
        self.0.floor().to_integer()
    }

    /// Smallest integer `≥ c`.
    pub fn ceil(self) -> i64 {
        self.0.ceil().to_integer()
    }

    /// `i < c` for an integer degree `i`.
    pub fn gt_int(self, i: i64) -> bool {
        Ratio::from_integer(i) < self.0
    }

    /// Grid `{k·step : lo ≤ k·step ≤ hi}`.
    pub fn grid(lo: CutParam, hi: CutParam, step: CutParam) -> Vec<CutParam> {
        assert!(step.0 > Ratio::from_integer(0), "grid step must be positive");
        let mut k = (lo.0 / step.0).ceil().to_integer();
        let mut out = Vec::new();
        loop {
            let c = step.0 * k;
            if c > hi.0 {
                break;
            }
            out.push(CutParam(c));
            k += 1;
        }
        out
    }
}

impl From<Half> for CutParam {
    fn from(h: Half) -> Self {
        h.cut()
    }
}

impl fmt::Display for CutParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for CutParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse cut `{0}`: expected an integer or p/q")]
pub struct ParseCutError(String);

impl FromStr for CutParam {
    type Err = ParseCutError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseCutError(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| err())?;
                let q: i64 = q.trim().parse().map_err(|_| err())?;
                if q == 0 {
                    return Err(err());
                }
                Ok(CutParam::new(p, q))
            }
            None => Ok(CutParam::int(t.parse().map_err(|_| err())?)),
        }
    }
}

impl Serialize for CutParam {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CutParam {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_levels() {
        let c = CutParam::new(-1, 4);
        assert_eq!(c.canon_le(), Half::below(0));
        assert_eq!(c.canon_ge(), Half::int(0));
        let h = CutParam::new(1, 2);
        assert_eq!(h.canon_le(), h.canon_ge());
        assert_eq!(h.strict_below(), Half::int(0));
        assert_eq!(h.strict_above(), Half::int(1));
        assert_eq!("3/6".parse::<CutParam>().unwrap(), h);
        assert_eq!(h.to_string(), "1/2");
        assert_eq!(CutParam::int(2).to_string(), "2/1");
        assert_eq!(CutParam::grid(CutParam::int(-1), CutParam::int(2), CutParam::new(1, 4)).len(), 13);
    }
}
