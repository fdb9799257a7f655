//! Integers that stay in machine words until they overflow.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq)]
pub enum Int {
    Small(i64),
    Big(BigInt),
}

impl Int {
    pub const ZERO: Int = Int::Small(0);
    pub const ONE: Int = Int::Small(1);

    pub fn from_big(b: BigInt) -> Int {
        match b.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(b),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Int::Small(1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Int::Small(v) => *v < 0,
            Int::Big(b) => b.is_negative(),
        }
    }

    pub fn neg(&self) -> Int {
        match self {
            Int::Small(v) => match v.checked_neg() {
                Some(r) => Int::Small(r),
                None => Int::Big(-BigInt::from(*v)),
            },
            Int::Big(b) => Int::from_big(-b),
        }
    }

    pub fn abs(&self) -> Int {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, o: &Int) -> Int {
        if let (Int::Small(x), Int::Small(y)) = (self, o) {
            if let Some(r) = x.checked_add(*y) {
                return Int::Small(r);
            }
        }
        Int::from_big(self.to_big() + o.to_big())
    }

    pub fn sub(&self, o: &Int) -> Int {
        if let (Int::Small(x), Int::Small(y)) = (self, o) {
            if let Some(r) = x.checked_sub(*y) {
                return Int::Small(r);
            }
        }
        Int::from_big(self.to_big() - o.to_big())
    }

    pub fn mul(&self, o: &Int) -> Int {
        if let (Int::Small(x), Int::Small(y)) = (self, o) {
            if let Some(r) = x.checked_mul(*y) {
                return Int::Small(r);
            }
        }
        Int::from_big(self.to_big() * o.to_big())
    }

    /// `self·p − o·c`, the basic fraction-free update.
    pub fn mul_sub(&self, p: &Int, o: &Int, c: &Int) -> Int {
        if let (Int::Small(x), Int::Small(pp), Int::Small(y), Int::Small(cc)) = (self, p, o, c) {
            let r = (*x as i128) * (*pp as i128) - (*y as i128) * (*cc as i128);
            if let Ok(v) = i64::try_from(r) {
                return Int::Small(v);
            }
            return Int::Big(BigInt::from(r));
        }
        Int::from_big(self.to_big() * p.to_big() - o.to_big() * c.to_big())
    }

    /// Exact division; panics in debug builds if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Int) -> Int {
        if let (Int::Small(x), Int::Small(y)) = (self, d) {
            debug_assert_eq!(x % y, 0);
            if let Some(r) = x.checked_div(*y) {
                return Int::Small(r);
            }
        }
        let (q, r) = self.to_big().div_rem(&d.to_big());
        debug_assert!(r.is_zero());
        Int::from_big(q)
    }

    /// Nonnegative gcd.
    pub fn gcd(&self, o: &Int) -> Int {
        if let (Int::Small(x), Int::Small(y)) = (self, o) {
            let (mut a, mut b) = (x.unsigned_abs(), y.unsigned_abs());
            while b != 0 {
                (a, b) = (b, a % b);
            }
            return match i64::try_from(a) {
                Ok(v) => Int::Small(v),
                Err(_) => Int::Big(BigInt::from(a)),
            };
        }
        Int::from_big(self.to_big().gcd(&o.to_big()))
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

impl From<BigInt> for Int {
    fn from(b: BigInt) -> Self {
        Int::from_big(b)
    }
}

impl fmt::Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(v) => write!(f, "{v}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Divides a vector of integers by the gcd of its entries and makes the
/// first entry positive.
pub fn normalize_content(vals: &mut [Int]) {
    let mut g = Int::ZERO;
    for v in vals.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let flip = vals.first().is_some_and(Int::is_negative);
    if g.is_zero() {
        return;
    }
    if !g.is_one() {
        for v in vals.iter_mut() {
            *v = v.div_exact(&g);
        }
    }
    if flip {
        for v in vals.iter_mut() {
            *v = v.neg();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn overflow_promotes() {
        let a = Int::Small(i64::MAX);
        let b = a.add(&Int::ONE);
        assert!(matches!(b, Int::Big(_)));
        assert_eq!(b.sub(&Int::ONE), a);
        let c = a.mul(&a).div_exact(&a);
        assert_eq!(c, a);
        assert_eq!(Int::Small(i64::MIN).neg().to_big(), -BigInt::from(i64::MIN));
    }

    #[test]
    fn content() {
        let mut v = vec![Int::from(-6), Int::from(9), Int::from(0)];
        normalize_content(&mut v);
        assert_eq!(v, vec![Int::from(2), Int::from(-3), Int::from(0)]);
    }

    proptest! {
        #[test]
        fn matches_bigint(x in any::<i64>(), y in any::<i64>(), p in any::<i64>(), c in any::<i64>()) {
            let (bx, by, bp, bc) = (BigInt::from(x), BigInt::from(y), BigInt::from(p), BigInt::from(c));
            let (ix, iy, ip, ic) = (Int::from(x), Int::from(y), Int::from(p), Int::from(c));
            prop_assert_eq!(ix.add(&iy).to_big(), &bx + &by);
            prop_assert_eq!(ix.sub(&iy).to_big(), &bx - &by);
            prop_assert_eq!(ix.mul(&iy).to_big(), &bx * &by);
            prop_assert_eq!(ix.mul_sub(&ip, &iy, &ic).to_big(), &bx * &bp - &by * &bc);
            prop_assert_eq!(ix.gcd(&iy).to_big(), bx.gcd(&by));
            // Canonical form: small whenever it fits.
            let s = ix.mul(&iy);
            prop_assert_eq!(matches!(s, Int::Small(_)), (&bx * &by).to_i64().is_some());
        }
    }
}
