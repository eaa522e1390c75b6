//! Descending flags of subspaces in a fibre, and evaluation-image extraction.

use crate::matrix::{QMat, RatMat};
use crate::ratfun::FunError;
use crate::scalar::GaussRat;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlagError {
    #[error("flag layer {0} is not contained in layer {1}")]
    NotDescending(usize, usize),
    #[error("flag layer {layer} has ambient dimension {got}, expected {want}")]
    AmbientMismatch { layer: usize, got: usize, want: usize },
    #[error("first flag layer must be the full space")]
    FirstLayerNotFull,
    #[error("last flag layer must be zero")]
    LastLayerNotZero,
    #[error("flag must have at least two layers")]
    TooShort,
    #[error(transparent)]
    Fun(#[from] FunError),
}

/// Descending chain of subspaces `V = L_0 ⊇ L_1 ⊇ … ⊇ L_w = 0`, each layer a
/// basis matrix (`ambient × dim`). Layer count is `weight + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Flag {
    pub ambient: usize,
    pub layers: Vec<QMat>,
}

impl Flag {
    pub fn new(ambient: usize, layers: Vec<QMat>) -> Result<Self, FlagError> {
        let flag = Flag { ambient, layers };
        flag.validate()?;
        Ok(flag)
    }

    /// The flag `V ⊇ 0 ⊇ … ⊇ 0` with `weight` steps.
    pub fn trivial(ambient: usize, weight: usize) -> Self {
        let mut layers = vec![QMat::identity(ambient)];
        for _ in 0..weight {
            layers.push(QMat::zeros(ambient, 0));
        }
        Flag { ambient, layers }
    }

    pub fn validate(&self) -> Result<(), FlagError> {
        if self.layers.len() < 2 {
            return Err(FlagError::TooShort);
        }
        for (s, layer) in self.layers.iter().enumerate() {
            if layer.rows() != self.ambient {
                return Err(FlagError::AmbientMismatch {
                    layer: s,
                    got: layer.rows(),
                    want: self.ambient,
                });
            }
        }
        if self.layers[0].rank() != self.ambient {
            return Err(FlagError::FirstLayerNotFull);
        }
        if self.layers.last().unwrap().rank() != 0 {
            return Err(FlagError::LastLayerNotZero);
        }
        for s in 0..self.layers.len() - 1 {
            if !QMat::cols_contained_in(&self.layers[s + 1], &self.layers[s]) {
                return Err(FlagError::NotDescending(s + 1, s));
            }
        }
        Ok(())
    }

    /// Number of steps `w` (layers minus one).
    pub fn weight(&self) -> usize {
        self.layers.len() - 1
    }

    /// `dim L_s` for `s = 0..=w`.
    pub fn dims(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.rank()).collect()
    }

    /// Interior dimensions `dim L_1, …, dim L_{w-1}`.
    pub fn interior_dims(&self) -> Vec<usize> {
        let d = self.dims();
        d[1..d.len() - 1].to_vec()
    }

    /// Layer-wise equality of subspaces, not of chosen bases.
    pub fn same_subspaces(&self, other: &Flag) -> bool {
        self.ambient == other.ambient
            && self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| QMat::same_column_span(a, b))
    }

    /// A basis of the ambient space adapted to the flag: column `p` carries a
    /// level `sigma(p)`, the deepest layer containing it, and for every `s`
    /// the columns with `sigma(p) >= s` form a basis of layer `s`. Levels are
    /// weakly increasing along the columns.
    pub fn adapted_basis(&self) -> (QMat, Vec<usize>) {
        let w = self.weight();
        // Grow bases from the deepest layer outwards.
        let mut cols: Vec<(usize, QMat)> = Vec::new(); // (sigma, column)
        let mut current = QMat::zeros(self.ambient, 0);
        for s in (0..w).rev() {
            let target = &self.layers[s];
            for c in 0..target.cols() {
                let cand = target.col(c);
                if !QMat::cols_contained_in(&cand, &current) {
                    current = current.hstack(&cand);
                    cols.push((s, cand));
                }
            }
        }
        debug_assert_eq!(current.rank(), self.ambient);
        // Shallow levels first, so that the last d_s columns span layer s.
        cols.sort_by_key(|(s, _)| *s);
        let mut basis = QMat::zeros(self.ambient, 0);
        let mut sigma = Vec::new();
        for (s, col) in cols {
            basis = basis.hstack(&col);
            sigma.push(s);
        }
        (basis, sigma)
    }
}

/// Column span of `m` evaluated at `a`, as a basis matrix. Errors if any
/// entry has a pole at `a`.
pub fn mat_image_mod_point(m: &RatMat, a: &GaussRat) -> Result<QMat, FunError> {
    Ok(m.eval(a)?.image_basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Mat;
    use crate::ratfun::RatFun;

    fn qm(rows: &[&[i64]]) -> QMat {
        Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| GaussRat::from_int(v)).collect()).collect(),
        )
    }

    #[test]
    fn validate_catches_non_descending() {
        let layers = vec![QMat::identity(2), qm(&[&[1], &[0]]), qm(&[&[0], &[1]]), QMat::zeros(2, 0)];
        let err = Flag::new(2, layers).unwrap_err();
        assert!(matches!(err, FlagError::NotDescending(2, 1)));
    }

    #[test]
    fn adapted_basis_levels() {
        // C^2 ⊇ span(e2) ⊇ 0
        let flag = Flag::new(2, vec![QMat::identity(2), qm(&[&[0], &[1]]), QMat::zeros(2, 0)]).unwrap();
        let (basis, sigma) = flag.adapted_basis();
        assert_eq!(sigma, vec![0, 1]);
        // Last 1 column spans layer 1.
        assert!(QMat::same_column_span(&basis.select_cols(&[1]), &flag.layers[1]));
        assert_eq!(basis.rank(), 2);
    }

    #[test]
    fn image_mod_point_examples() {
        // identity: full space
        let id = RatMat::identity(3);
        let im = mat_image_mod_point(&id, &GaussRat::from_int(5)).unwrap();
        assert_eq!(im.rank(), 3);

        // [[z],[1]] at 0: span{(0,1)}
        let m = RatMat::from_rows(vec![
            vec![RatFun::x_minus(&GaussRat::from_int(0))],
            vec![RatFun::one()],
        ]);
        let im = mat_image_mod_point(&m, &GaussRat::from_int(0)).unwrap();
        assert!(QMat::same_column_span(&im, &qm(&[&[0], &[1]])));

        // [[1, z],[z, z^2]] at 1: rank drops to span{(1,1)}
        let z = RatFun::x_minus(&GaussRat::from_int(0));
        let m = RatMat::from_rows(vec![
            vec![RatFun::one(), z.clone()],
            vec![z.clone(), z.mul(&z)],
        ]);
        let im = mat_image_mod_point(&m, &GaussRat::from_int(1)).unwrap();
        assert_eq!(im.cols(), 1);
        assert!(QMat::same_column_span(&im, &qm(&[&[1], &[1]])));
    }
}
