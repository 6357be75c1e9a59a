//! Exact integers with an inline fast path.
//!
//! Values that fit in an `i64` are stored inline; anything larger is promoted
//! to a heap `BigInt`. Every operation is exact: overflow of the inline path
//! falls through to arbitrary precision, never wraps.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An arbitrary-precision integer. `Big` is used only for values outside `i64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Int {
    Small(i64),
    Big(Box<BigInt>),
}

impl Int {
    pub const ZERO: Int = Int::Small(0);
    pub const ONE: Int = Int::Small(1);

    fn from_big(b: BigInt) -> Int {
        match b.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(Box::new(b)),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => (**b).clone(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Int::Small(v) => Some(*v),
            Int::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Int::Small(1))
    }

    /// True for ±1.
    pub fn is_unit(&self) -> bool {
        matches!(self, Int::Small(1) | Int::Small(-1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Int::Small(v) => *v < 0,
            Int::Big(b) => b.is_negative(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Int::Small(v) => v.signum() as i32,
            Int::Big(b) => {
                if b.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn abs(&self) -> Int {
        match self {
            Int::Small(v) => match v.checked_abs() {
                Some(a) => Int::Small(a),
                None => Int::from_big(BigInt::from(*v).abs()),
            },
            Int::Big(b) => Int::from_big(b.abs()),
        }
    }

    /// Compares absolute values.
    pub fn cmp_abs(&self, other: &Int) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.unsigned_abs().cmp(&b.unsigned_abs()),
            _ => self.to_big().abs().cmp(&other.to_big().abs()),
        }
    }

    /// Floor division and the matching non-negative-for-positive-divisor remainder.
    pub fn div_mod_floor(&self, d: &Int) -> (Int, Int) {
        assert!(!d.is_zero(), "division by zero");
        if let (Int::Small(a), Int::Small(b)) = (self, d) {
            if !(*a == i64::MIN && *b == -1) {
                let (q, r) = a.div_mod_floor(b);
                return (Int::Small(q), Int::Small(r));
            }
        }
        let (q, r) = self.to_big().div_mod_floor(&d.to_big());
        (Int::from_big(q), Int::from_big(r))
    }

    /// Exact division; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Int) -> Int {
        let (q, r) = self.div_mod_floor(d);
        assert!(r.is_zero(), "inexact division");
        q
    }

    pub fn is_multiple_of(&self, d: &Int) -> bool {
        if d.is_zero() {
            return self.is_zero();
        }
        self.div_mod_floor(d).1.is_zero()
    }

    pub fn gcd(&self, other: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, other) {
            let g = a.unsigned_abs().gcd(&b.unsigned_abs());
            if let Ok(g) = i64::try_from(g) {
                return Int::Small(g);
            }
        }
        Int::from_big(self.to_big().gcd(&other.to_big()))
    }

    /// `(g, s, t)` with `g = gcd(self, other) ≥ 0` and `s·self + t·other = g`.
    pub fn ext_gcd(&self, other: &Int) -> (Int, Int, Int) {
        let e = self.to_big().extended_gcd(&other.to_big());
        let (g, s, t) = (Int::from_big(e.gcd), Int::from_big(e.x), Int::from_big(e.y));
        if g.is_negative() {
            (-g, -s, -t)
        } else {
            (g, s, t)
        }
    }

    pub fn pow(&self, e: u32) -> Int {
        let mut acc = Int::ONE;
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Default for Int {
    fn default() -> Self {
        Int::ZERO
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int::Small(v)
    }
}

impl From<i32> for Int {
    fn from(v: i32) -> Self {
        Int::Small(v as i64)
    }
}

impl From<usize> for Int {
    fn from(v: usize) -> Self {
        match i64::try_from(v) {
            Ok(s) => Int::Small(s),
            Err(_) => Int::from_big(BigInt::from(v)),
        }
    }
}

impl From<BigInt> for Int {
    fn from(b: BigInt) -> Self {
        Int::from_big(b)
    }
}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident, $op:tt) => {
        impl<'a> $tr<&'a Int> for &'a Int {
            type Output = Int;
            fn $method(self, rhs: &'a Int) -> Int {
                if let (Int::Small(a), Int::Small(b)) = (self, rhs) {
                    if let Some(v) = a.$checked(*b) {
                        return Int::Small(v);
                    }
                }
                Int::from_big(self.to_big() $op rhs.to_big())
            }
        }
        impl $tr<Int> for Int {
            type Output = Int;
            fn $method(self, rhs: Int) -> Int {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Int> for Int {
            type Output = Int;
            fn $method(self, rhs: &'a Int) -> Int {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add, +);
binop!(Sub, sub, checked_sub, -);
binop!(Mul, mul, checked_mul, *);

impl AddAssign<&Int> for Int {
    fn add_assign(&mut self, rhs: &Int) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Int> for Int {
    fn sub_assign(&mut self, rhs: &Int) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Int> for Int {
    fn mul_assign(&mut self, rhs: &Int) {
        *self = &*self * rhs;
    }
}

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match self {
            Int::Small(v) => match v.checked_neg() {
                Some(n) => Int::Small(n),
                None => Int::from_big(-BigInt::from(*v)),
            },
            Int::Big(b) => Int::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(v) => write!(f, "{v}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Int {
    type Err = num_bigint::ParseBigIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Int::from_big(s.trim().parse::<BigInt>()?))
    }
}

// Small values serialize as JSON numbers, large ones as decimal strings.
impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Int::Small(v) => s.serialize_i64(*v),
            Int::Big(b) => s.serialize_str(&b.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Int::Small(v)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes() {
        let a = Int::from(i64::MAX);
        let b = &a + &Int::ONE;
        assert!(matches!(b, Int::Big(_)));
        let c = &b - &Int::ONE;
        assert_eq!(c, a);
        let sq = &a * &a;
        assert_eq!(sq.to_big(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
        assert_eq!(-Int::from(i64::MIN), Int::from(BigInt::from(i64::MIN) * -1));
    }

    #[test]
    fn floor_division() {
        let (q, r) = Int::from(-7).div_mod_floor(&Int::from(2));
        assert_eq!((q, r), (Int::from(-4), Int::from(1)));
        assert_eq!(Int::from(12).gcd(&Int::from(-18)), Int::from(6));
        let (g, s, t) = Int::from(4).ext_gcd(&Int::from(6));
        assert_eq!(g, Int::from(2));
        assert_eq!(&(&s * &Int::from(4)) + &(&t * &Int::from(6)), g);
    }

    #[test]
    fn json_round_trip() {
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        let s = serde_json::to_string(&vec![Int::from(-3), big.clone()]).unwrap();
        let back: Vec<Int> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Int::from(-3), big]);
    }
}
