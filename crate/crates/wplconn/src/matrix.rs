//! Dense matrices over an exact ring, with Gaussian elimination over fields.
//!
//! Matrices of rational functions are not eliminated directly: they are
//! lifted to [`PolyFrac`] entries, reduced there, and converted back with the
//! marked points as the only permitted denominator roots. Kernel and image
//! bases are cleared of denominators, so they always convert back.

use crate::ratfun::{Chart, FunError, PolyFrac, RatFun};
use crate::scalar::{Field, GaussRat, Ring};
use std::fmt;

#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type QMat = Mat<GaussRat>;
pub type RatMat = Mat<RatFun>;
pub type PfMat = Mat<PolyFrac>;

impl<T: Ring> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn scalar(n: usize, v: &T) -> Self {
        Mat::from_fn(n, n, |r, c| if r == c { v.clone() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Mat::from_fn(self.rows, self.cols, |r, c| self.at(r, c).add(o.at(r, c)))
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Mat::from_fn(self.rows, self.cols, |r, c| self.at(r, c).sub(o.at(r, c)))
    }

    pub fn neg(&self) -> Self {
        self.map(|v| v.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "inner dimension mismatch");
        Mat::from_fn(self.rows, o.cols, |r, c| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                let b = o.at(k, c);
                if b.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
            acc
        })
    }

    pub fn scale(&self, v: &T) -> Self {
        self.map(|e| e.mul(v))
    }

    /// `[self | o]` side by side.
    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows, "row mismatch");
        Mat::from_fn(self.rows, self.cols + o.cols, |r, c| {
            if c < self.cols { self.at(r, c).clone() } else { o.at(r, c - self.cols).clone() }
        })
    }

    /// `[self; o]` stacked.
    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols, "column mismatch");
        Mat::from_fn(self.rows + o.rows, self.cols, |r, c| {
            if r < self.rows { self.at(r, c).clone() } else { o.at(r - self.rows, c).clone() }
        })
    }

    /// `[[a, b], [c, d]]` from equal-height / equal-width blocks.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        a.hstack(b).vstack(&c.hstack(d))
    }

    pub fn col(&self, c: usize) -> Self {
        Mat::from_fn(self.rows, 1, |r, _| self.at(r, c).clone())
    }

    /// Contiguous block of the given shape with top-left corner `(r0, c0)`.
    pub fn submat(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Mat::from_fn(rows, cols, |r, c| self.at(r0 + r, c0 + c).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Mat::from_fn(self.rows, idx.len(), |r, c| self.at(r, idx[c]).clone())
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> T {
        assert!(self.is_square());
        let mut acc = T::zero();
        for k in 0..self.rows {
            acc = acc.add(self.at(k, k));
        }
        acc
    }
}

impl<T: Field> Mat<T> {
    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(row * self.cols + c, p * self.cols + c);
                }
            }
            let inv = self.at(row, col).inv().unwrap();
            for c in col..self.cols {
                let v = self.at(row, c).mul(&inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row || self.at(r, col).is_zero() {
                    continue;
                }
                let factor = self.at(r, col).clone();
                for c in col..self.cols {
                    let v = self.at(r, c).sub(&factor.mul(self.at(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Basis of `{ x : self · x = 0 }` as columns; `cols × nullity`.
    pub fn kernel_basis(&self) -> Self {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zeros(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, T::one());
            for (prow, &pc) in pivots.iter().enumerate() {
                out.set(pc, k, m.at(prow, fc).neg());
            }
        }
        out
    }

    /// The pivot columns of `self`, a basis of the column span.
    pub fn image_basis(&self) -> Self {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        self.select_cols(&pivots)
    }

    /// One solution `X` of `self · X = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &Self) -> Option<Self> {
        assert_eq!(self.rows, b.rows, "row mismatch");
        let mut aug = self.hstack(b);
        let pivots = aug.rref_in_place();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(self.cols, b.cols);
        for (prow, &pc) in pivots.iter().enumerate() {
            for c in 0..b.cols {
                x.set(pc, c, aug.at(prow, self.cols + c).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let mut aug = self.hstack(&Mat::identity(self.rows));
        let pivots = aug.rref_in_place();
        if pivots.len() != self.rows || pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        Some(Mat::from_fn(self.rows, self.cols, |r, c| aug.at(r, self.cols + c).clone()))
    }

    /// Determinant by elimination.
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.at(r, col).is_zero()) else {
                return T::zero();
            };
            if p != col {
                for c in 0..n {
                    m.data.swap(col * n + c, p * n + c);
                }
                det = det.neg();
            }
            let pivot = m.at(col, col).clone();
            det = det.mul(&pivot);
            let inv = pivot.inv().unwrap();
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).mul(&inv);
                for c in col..n {
                    let v = m.at(r, c).sub(&factor.mul(m.at(col, c)));
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    /// Do the columns of `sub` span a subspace of the column span of `ambient`?
    pub fn cols_contained_in(sub: &Self, ambient: &Self) -> bool {
        assert_eq!(sub.rows, ambient.rows);
        ambient.hstack(sub).rank() == ambient.rank()
    }

    /// Equality of column spans.
    pub fn same_column_span(a: &Self, b: &Self) -> bool {
        Self::cols_contained_in(a, b) && Self::cols_contained_in(b, a)
    }
}

impl RatMat {
    pub fn constant(q: &QMat) -> RatMat {
        q.map(|v| RatFun::constant(v.clone()))
    }

    pub fn to_pf(&self) -> PfMat {
        self.map(RatFun::to_polyfrac)
    }

    pub fn from_pf(m: &PfMat, roots: &[GaussRat], chart: Chart) -> Result<RatMat, FunError> {
        let mut out = RatMat::zeros(m.rows(), m.cols());
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.set(r, c, RatFun::from_polyfrac(m.at(r, c), roots, chart)?);
            }
        }
        Ok(out)
    }

    /// Entrywise evaluation; fails on a pole at `a`.
    pub fn eval(&self, a: &GaussRat) -> Result<QMat, FunError> {
        let mut out = QMat::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.at(r, c).eval(a)?);
            }
        }
        Ok(out)
    }

    pub fn derivative(&self) -> RatMat {
        self.map(RatFun::derivative)
    }

    pub fn rank_ff(&self) -> usize {
        self.to_pf().rank()
    }

    /// Inverse over the fraction field, converted back with `roots` as the
    /// only legal denominator roots.
    pub fn inverse_with_roots(&self, roots: &[GaussRat], chart: Chart) -> Result<RatMat, FunError> {
        let inv = self
            .to_pf()
            .inverse()
            .ok_or_else(|| FunError::NotAUnit("singular matrix".into()))?;
        RatMat::from_pf(&inv, roots, chart)
    }

    pub fn det_pf(&self) -> PolyFrac {
        self.to_pf().det()
    }

    pub fn scale_fun(&self, f: &RatFun) -> RatMat {
        self.map(|e| e.mul(f))
    }

    /// True if every entry's poles are legal for `chart` over `marked`.
    pub fn poles_legal(&self, marked: &[GaussRat], chart: Chart) -> bool {
        self.data.iter().all(|e| e.poles_legal(marked, chart))
    }
}

/// Multiplicity of `a` in a reduced fraction: numerator root multiplicity
/// minus denominator root multiplicity.
pub fn pf_valuation_at(pf: &PolyFrac, a: &GaussRat) -> i64 {
    assert!(!pf.num.is_zero(), "valuation of zero");
    pf.num.root_mult(a) as i64 - pf.den.root_mult(a) as i64
}

/// Is the fraction a unit in the ring whose legal poles are `allowed`, i.e.
/// do numerator and denominator both factor over `allowed`?
pub fn pf_is_unit_over(pf: &PolyFrac, allowed: &[GaussRat]) -> bool {
    if pf.num.is_zero() {
        return false;
    }
    let strip = |p: &crate::poly::Poly| {
        let mut rest = p.clone();
        for r in allowed {
            let lin = crate::poly::Poly::x_minus(r);
            loop {
                if rest.degree().is_none_or(|d| d == 0) {
                    break;
                }
                let (q, rem) = rest.divrem(&lin);
                if !rem.is_zero() {
                    break;
                }
                rest = q;
            }
        }
        rest.degree() == Some(0)
    };
    strip(&pf.num) && strip(&pf.den)
}

impl<T: Ring + fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.at(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn qm(rows: &[&[i64]]) -> QMat {
        Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| GaussRat::from_int(v)).collect()).collect(),
        )
    }

    #[test]
    fn rank_and_kernel() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let m = qm(&[&[1, 2], &[3, 5]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMat::identity(2));
        assert_eq!(m.det(), GaussRat::from_int(-1));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = qm(&[&[1, 0], &[0, 0]]);
        let b = qm(&[&[5], &[0]]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul(&x), b);
        let bad = qm(&[&[0], &[1]]);
        assert!(m.solve(&bad).is_none());
    }

    #[test]
    fn image_basis_spans() {
        let m = qm(&[&[1, 2, 0], &[0, 0, 1]]);
        let im = m.image_basis();
        assert_eq!(im.cols(), 2);
        assert!(QMat::same_column_span(&im, &qm(&[&[1, 0], &[0, 1]])));
    }

    #[test]
    fn ratmat_inverse_with_roots() {
        // diag(z, 1) over chart of a marked point at 0: inverse legal on overlap
        let zero = GaussRat::from_int(0);
        let m = RatMat::from_rows(vec![
            vec![RatFun::x_minus(&zero), RatFun::zero()],
            vec![RatFun::zero(), RatFun::one()],
        ]);
        let inv = m.inverse_with_roots(std::slice::from_ref(&zero), Chart::Overlap).unwrap();
        assert_eq!(m.mul(&inv), RatMat::identity(2));
        assert_eq!(inv.at(0, 0).pole_order(&zero), 1);
    }

    #[test]
    fn pf_unit_tests() {
        let zero = GaussRat::from_int(0);
        let one = GaussRat::from_int(1);
        let pf = PolyFrac::new(Poly::x_minus(&zero), Poly::x_minus(&one));
        assert!(pf_is_unit_over(&pf, &[zero.clone(), one.clone()]));
        assert!(!pf_is_unit_over(&pf, std::slice::from_ref(&one)));
        assert_eq!(pf_valuation_at(&pf, &zero), 1);
        assert_eq!(pf_valuation_at(&pf, &one), -1);
    }

    prop_compose! {
        fn arb_ratmat()(rows in 1usize..4, cols in 1usize..4)
            (rows in Just(rows), cols in Just(cols),
             nums in proptest::collection::vec(-5i64..5, rows * cols),
             dens in proptest::collection::vec(0usize..3, rows * cols)) -> RatMat {
            let pts = [GaussRat::from_int(0), GaussRat::from_int(1)];
            RatMat::from_fn(rows, cols, |r, c| {
                let k = r * cols + c;
                let base = RatFun::from_poly(Poly::new(vec![
                    GaussRat::from_int(nums[k]),
                    GaussRat::from_rat(rat((k % 3) as i64, 1)),
                ]));
                match dens[k] {
                    0 => base,
                    1 => base.mul(&RatFun::inv_x_minus(&pts[0], Chart::Overlap)),
                    _ => base.mul(&RatFun::inv_x_minus(&pts[1], Chart::Overlap)),
                }
            })
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        // Rank-nullity over the fraction field.
        #[test]
        fn rank_nullity(m in arb_ratmat()) {
            let pf = m.to_pf();
            let k = pf.kernel_basis();
            prop_assert_eq!(pf.rank() + k.cols(), m.cols());
            prop_assert!(pf.mul(&k).is_zero());
        }
    }
}
