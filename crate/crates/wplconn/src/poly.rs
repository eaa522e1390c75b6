//! Dense univariate polynomials over the Gaussian rationals.
//!
//! Coefficients are stored constant-term first with no trailing zeros, so the
//! zero polynomial is the empty vector and `degree` of a nonzero polynomial is
//! `coeffs.len() - 1`.

use crate::scalar::{GaussRat, Ring};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<GaussRat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        Poly::new(vec![c])
    }

    /// The coordinate `z`.
    pub fn x() -> Self {
        Poly::new(vec![GaussRat::zero(), GaussRat::one()])
    }

    /// The monic linear factor `z - a`.
    pub fn x_minus(a: &GaussRat) -> Self {
        Poly::new(vec![a.neg(), GaussRat::one()])
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> GaussRat {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> GaussRat {
        self.coeffs.last().cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k).add(&o.coeff(k))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k).sub(&o.coeff(k))).collect())
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(GaussRat::neg).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![GaussRat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn eval(&self, a: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&crate::scalar::rint(k as i64)))
                .collect(),
        )
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`. Panics on `d = 0`.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dlead_inv = d.leading().inv().expect("nonzero leading coefficient");
        let dd = d.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![GaussRat::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k].mul(&dlead_inv);
            if c.is_zero() {
                continue;
            }
            quot[k - dd] = c.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k - dd + j] = rem[k - dd + j].sub(&c.mul(dc));
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Quotient when the division is known to be exact; panics on a remainder.
    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd by the Euclidean algorithm; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().inv().unwrap())
    }

    /// Multiplicity of `a` as a root.
    pub fn root_mult(&self, a: &GaussRat) -> u32 {
        if self.is_zero() {
            return 0;
        }
        let lin = Poly::x_minus(a);
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = p.divrem(&lin);
            if !r.is_zero() {
                return m;
            }
            m += 1;
            p = q;
        }
    }

    /// `Π (z - root)^mult` over the given factor list.
    pub fn from_linear_factors<'a, I>(factors: I) -> Self
    where
        I: IntoIterator<Item = (&'a GaussRat, u32)>,
    {
        let mut p = Poly::one();
        for (root, mult) in factors {
            let lin = Poly::x_minus(root);
            for _ in 0..mult {
                p = p.mul(&lin);
            }
        }
        p
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn p(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| GaussRat::from_int(c)).collect())
    }

    #[test]
    fn divrem_roundtrip() {
        let a = p(&[1, 0, -3, 2, 5]);
        let d = p(&[2, 1, 1]);
        let (q, r) = a.divrem(&d);
        assert_eq!(q.mul(&d).add(&r), a);
        assert!(r.degree() < d.degree());
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = p(&[-1, 1]); // z - 1
        let a = f.mul(&p(&[3, 1]));
        let b = f.mul(&p(&[0, 0, 7]));
        assert_eq!(a.gcd(&b), f.monic());
    }

    #[test]
    fn root_multiplicity() {
        let two = GaussRat::from_int(2);
        let f = Poly::from_linear_factors([(&two, 3)]).mul(&p(&[1, 1]));
        assert_eq!(f.root_mult(&two), 3);
        assert_eq!(f.root_mult(&GaussRat::from_int(5)), 0);
    }

    #[test]
    fn derivative_leibniz() {
        let a = p(&[1, 2, 3]);
        let b = p(&[-4, 0, 1, 1]);
        let lhs = a.mul(&b).derivative();
        let rhs = a.derivative().mul(&b).add(&a.mul(&b.derivative()));
        assert_eq!(lhs, rhs);
        assert_eq!(p(&[0, 0, 1]).derivative(), p(&[0, 2]));
    }

    #[test]
    fn eval_horner() {
        let f = p(&[1, -2, 1]); // (z-1)^2
        assert_eq!(f.eval(&GaussRat::from_int(1)), GaussRat::zero());
        assert_eq!(f.eval(&GaussRat::from_rat(rat(3, 2))), GaussRat::from_rat(rat(1, 4)));
    }
}
