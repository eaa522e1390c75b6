//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! Every scalar in this crate is a Gaussian rational `a + b·i` with `a`, `b`
//! reduced big rationals. There is no floating point anywhere; equality is
//! decidable and all identities are checked exactly.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// Reduced arbitrary-precision rational.
pub type Rat = BigRational;

/// `n/d` as a [`Rat`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(n.into(), d.into())
}

/// Integer as a [`Rat`].
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Ring with exact equality. Operations take references; values are immutable.
pub trait Ring: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
}

/// Ring in which every nonzero element is invertible.
pub trait Field: Ring {
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }
}

/// Gaussian rational `re + im·i`, the scalar field of the whole crate.
///
/// The derived ordering is lexicographic in `(re, im)`; it has no algebraic
/// meaning and exists so values can key ordered maps canonically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        GaussRat { re, im: Rat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rint(n))
    }

    /// `n/d` as a real Gaussian rational.
    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rat(rat(n, d))
    }

    pub fn i() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::one() }
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `re² + im²`, zero iff the value is zero.
    pub fn norm_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn add(&self, o: &Self) -> Self {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn neg(&self) -> Self {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sq();
        if n.is_zero() {
            return None;
        }
        Some(GaussRat { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|r| self.mul(&r))
    }

    pub fn scale(&self, r: &Rat) -> Self {
        GaussRat { re: &self.re * r, im: &self.im * r }
    }
}

impl Ring for GaussRat {
    fn zero() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::zero() }
    }
    fn one() -> Self {
        GaussRat { re: Rat::one(), im: Rat::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        GaussRat::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        GaussRat::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        GaussRat::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        GaussRat::neg(self)
    }
}

impl Field for GaussRat {
    fn inv(&self) -> Option<Self> {
        GaussRat::inv(self)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            if self.im.is_one() {
                return write!(f, "i");
            }
            return write!(f, "{}i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

// Debug by Display: exact values read better unescaped in assertions.
impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    Rat::from_str(s.trim()).map_err(|e| format!("bad rational {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(re: (i64, i64), im: (i64, i64)) -> GaussRat {
        GaussRat::new(rat(re.0, re.1), rat(im.0, im.1))
    }

    #[test]
    fn basic_arithmetic() {
        let a = g((1, 2), (3, 1));
        let b = g((-1, 3), (0, 1));
        assert_eq!(a.add(&b), g((1, 6), (3, 1)));
        let i = GaussRat::i();
        assert_eq!(i.mul(&i), GaussRat::from_int(-1));
        assert_eq!(a.mul(&a.inv().unwrap()), GaussRat::one());
    }

    #[test]
    fn display_forms() {
        assert_eq!(g((1, 2), (0, 1)).to_string(), "1/2");
        assert_eq!(g((0, 1), (1, 1)).to_string(), "i");
        assert_eq!(g((1, 2), (-3, 1)).to_string(), "1/2-3i");
        assert_eq!(GaussRat::zero().to_string(), "0");
    }

    prop_compose! {
        pub(crate) fn arb_gauss()(a in -20i64..20, b in 1i64..8, c in -20i64..20, d in 1i64..8) -> GaussRat {
            GaussRat::new(rat(a, b), rat(c, d))
        }
    }

    proptest! {
        // Field axioms, exact.
        #[test]
        fn field_axioms(a in arb_gauss(), b in arb_gauss(), c in arb_gauss()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b.add(&c)), a.add(&b).add(&c));
            prop_assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&GaussRat::zero()), a.clone());
            prop_assert_eq!(a.mul(&GaussRat::one()), a.clone());
            prop_assert_eq!(a.sub(&a), GaussRat::zero());
            if !a.is_zero() {
                prop_assert_eq!(a.mul(&a.inv().unwrap()), GaussRat::one());
            }
        }
    }
}
