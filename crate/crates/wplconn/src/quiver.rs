//! Quivers, doubled representations, and deformed relations.
//!
//! The deformed relation at a vertex `v` reads
//! `Σ_{head(a)=v} X_a X_{a*} - Σ_{tail(a)=v} X_{a*} X_a = λ_v·Id`;
//! [`moment_defect`] returns the left side minus the right, vertex by vertex.
//! Star quivers have one central vertex `"0"` and arm vertices `"i.s"`
//! (one-based point `i`, level `s`), arrows oriented toward the center.

use crate::conn::ZetaData;
use crate::matrix::QMat;
use crate::scalar::{GaussRat, Ring};
use crate::sheaf::WeightData;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuiverError {
    #[error("arrow {0} has an endpoint that is not a vertex")]
    BadEndpoint(String),
    #[error("dimension list at point {0} must have length w-1 = {1}")]
    ArmLength(usize, usize),
    #[error("dimension list at point {0} is not weakly decreasing or exceeds the rank")]
    NotMonotone(usize),
    #[error("representation shape mismatch: {0}")]
    Shape(String),
    #[error("lambda vector length {got}, expected {want}")]
    LambdaLength { got: usize, want: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arrow {
    pub name: String,
    pub tail: usize,
    pub head: usize,
}

/// Finite quiver with named vertices and arrows.
#[derive(Clone, Debug, PartialEq)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Result<Self, QuiverError> {
        for a in &arrows {
            if a.tail >= vertices.len() || a.head >= vertices.len() {
                return Err(QuiverError::BadEndpoint(a.name.clone()));
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }
}

/// Per-vertex deformation scalars, aligned with the quiver's vertex order.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaVec {
    pub values: Vec<GaussRat>,
}

/// Representation of the doubled quiver: for each arrow `a`, matrices
/// `X_a : V_{tail} → V_{head}` and `X_{a*} : V_{head} → V_{tail}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubledRep {
    pub dims: Vec<usize>,
    pub x: Vec<QMat>,
    pub xstar: Vec<QMat>,
}

impl DoubledRep {
    pub fn validate(&self, q: &Quiver) -> Result<(), QuiverError> {
        if self.dims.len() != q.vertices.len() {
            return Err(QuiverError::Shape("dimension vector length".into()));
        }
        if self.x.len() != q.arrows.len() || self.xstar.len() != q.arrows.len() {
            return Err(QuiverError::Shape("arrow matrix count".into()));
        }
        for (k, a) in q.arrows.iter().enumerate() {
            let (dt, dh) = (self.dims[a.tail], self.dims[a.head]);
            if self.x[k].rows() != dh || self.x[k].cols() != dt {
                return Err(QuiverError::Shape(format!("X[{}] must be {dh}x{dt}", a.name)));
            }
            if self.xstar[k].rows() != dt || self.xstar[k].cols() != dh {
                return Err(QuiverError::Shape(format!("X*[{}] must be {dt}x{dh}", a.name)));
            }
        }
        Ok(())
    }
}

/// Star quiver of the weight data: central vertex of dimension `n`, arm `i`
/// with vertices `i.1 … i.(w_i - 1)` carrying the interior flag dimensions,
/// arrows pointing toward the center.
pub fn star_quiver(
    weights: &WeightData,
    n: usize,
    flag_dims: &[Vec<usize>],
) -> Result<(Quiver, Vec<usize>), QuiverError> {
    let k = weights.k();
    assert_eq!(flag_dims.len(), k, "one dimension list per marked point");
    let mut vertices = vec!["0".to_string()];
    let mut dims = vec![n];
    let mut arrows = Vec::new();
    for (i, arm) in flag_dims.iter().enumerate().take(k) {
        let w = weights.weights[i];
        if arm.len() != w - 1 {
            return Err(QuiverError::ArmLength(i + 1, w - 1));
        }
        let mut prev = n;
        for (s, &d) in arm.iter().enumerate() {
            if d > prev {
                return Err(QuiverError::NotMonotone(i + 1));
            }
            prev = d;
            let name = format!("{}.{}", i + 1, s + 1);
            vertices.push(name);
            dims.push(d);
            let this = vertices.len() - 1;
            let target = if s == 0 {
                0
            } else {
                this - 1
            };
            arrows.push(Arrow { name: format!("a{}.{}", i + 1, s + 1), tail: this, head: target });
        }
    }
    Ok((Quiver::new(vertices, arrows)?, dims))
}

/// Deformation scalars of an eigenvalue table on the star quiver, in the
/// star vertex order: `λ_0 = -Σ ζ_{i1}`, `λ_{i.s} = ζ_{is} - ζ_{i,s+1}`.
pub fn zeta_to_lambda(zeta: &ZetaData) -> LambdaVec {
    let mut center = GaussRat::zero();
    for row in &zeta.table {
        center = center.sub(&row[0]);
    }
    let mut values = vec![center];
    for row in &zeta.table {
        for s in 0..row.len().saturating_sub(1) {
            values.push(row[s].sub(&row[s + 1]));
        }
    }
    LambdaVec { values }
}

/// Per-vertex defect `Σ_{head} X X* - Σ_{tail} X* X - λ·Id`; the zero vector
/// exactly when the representation satisfies the deformed relations.
pub fn moment_defect(q: &Quiver, rep: &DoubledRep, lambda: &LambdaVec) -> Result<Vec<QMat>, QuiverError> {
    rep.validate(q)?;
    if lambda.values.len() != q.vertices.len() {
        return Err(QuiverError::LambdaLength {
            got: lambda.values.len(),
            want: q.vertices.len(),
        });
    }
    let mut out: Vec<QMat> = rep.dims.iter().map(|&d| QMat::zeros(d, d)).collect();
    for (k, a) in q.arrows.iter().enumerate() {
        out[a.head] = out[a.head].add(&rep.x[k].mul(&rep.xstar[k]));
        out[a.tail] = out[a.tail].sub(&rep.xstar[k].mul(&rep.x[k]));
    }
    for (v, m) in out.iter_mut().enumerate() {
        *m = m.sub(&QMat::scalar(rep.dims[v], &lambda.values[v]));
    }
    Ok(out)
}

/// `Σ_v λ_v d_v`; vanishes whenever a defect-zero representation exists in
/// dimension vector `d` (the defect traces telescope to zero).
pub fn trace_pairing(lambda: &LambdaVec, dims: &[usize]) -> GaussRat {
    lambda
        .values
        .iter()
        .zip(dims)
        .fold(GaussRat::zero(), |acc, (l, &d)| acc.add(&l.scale(&crate::scalar::rint(d as i64))))
}

/// `Σ_v d_v² - Σ_a d_{tail} d_{head}`.
pub fn tits_form(q: &Quiver, dims: &[usize]) -> i64 {
    let vv: i64 = dims.iter().map(|&d| (d * d) as i64).sum();
    let aa: i64 = q.arrows.iter().map(|a| (dims[a.tail] * dims[a.head]) as i64).sum();
    vv - aa
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Mat;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn pts(vals: &[i64]) -> Vec<GaussRat> {
        vals.iter().map(|&v| GaussRat::from_int(v)).collect()
    }

    fn zeta(points: &[i64], rows: &[&[(i64, i64)]]) -> ZetaData {
        ZetaData {
            points: pts(points),
            table: rows
                .iter()
                .map(|r| r.iter().map(|&(n, d)| GaussRat::from_ratio(n, d)).collect())
                .collect(),
        }
    }

    #[test]
    fn star_shapes() {
        // k=3, w=(2,2,2), n=2, dims all (1): affine D4 shape.
        let w = WeightData::new(pts(&[0, 1, -1]), vec![2, 2, 2]).unwrap();
        let (q, d) = star_quiver(&w, 2, &[vec![1], vec![1], vec![1]]).unwrap();
        assert_eq!(q.vertices, vec!["0", "1.1", "2.1", "3.1"]);
        assert_eq!(d, vec![2, 1, 1, 1]);
        assert_eq!(q.arrows.len(), 3);
        assert!(q.arrows.iter().all(|a| a.head == 0));

        // All weights 1: a single vertex, no arrows.
        let w = WeightData::new(pts(&[0, 1]), vec![1, 1]).unwrap();
        let (q, d) = star_quiver(&w, 3, &[vec![], vec![]]).unwrap();
        assert_eq!(q.vertices.len(), 1);
        assert!(q.arrows.is_empty());
        assert_eq!(d, vec![3]);

        // k=2, w=(3,2), n=2, dims ((2,1),(1)): arm lengths 2 and 1.
        let w = WeightData::new(pts(&[0, 1]), vec![3, 2]).unwrap();
        let (q, d) = star_quiver(&w, 2, &[vec![2, 1], vec![1]]).unwrap();
        assert_eq!(q.vertices, vec!["0", "1.1", "1.2", "2.1"]);
        assert_eq!(d, vec![2, 2, 1, 1]);
        let a12 = &q.arrows[q.arrow_index("a1.2").unwrap()];
        assert_eq!(q.vertices[a12.tail], "1.2");
        assert_eq!(q.vertices[a12.head], "1.1");

        // Non-monotone dims are rejected.
        assert!(star_quiver(&w, 2, &[vec![1, 2], vec![1]]).is_err());
    }

    #[test]
    fn lambda_examples() {
        // ζ = 0 gives λ = 0.
        let z = zeta(&[0, 1], &[&[(0, 1), (0, 1)], &[(0, 1)]]);
        let l = zeta_to_lambda(&z);
        assert!(l.values.iter().all(|v| v.is_zero()));

        // k=3, w=(2,2,2), ζ = ((1/2,0),(1/2,0),(-1/2,0)).
        let z = zeta(
            &[0, 1, -1],
            &[&[(1, 2), (0, 1)], &[(1, 2), (0, 1)], &[(-1, 2), (0, 1)]],
        );
        let l = zeta_to_lambda(&z);
        assert_eq!(
            l.values,
            vec![
                GaussRat::from_ratio(-1, 2),
                GaussRat::from_ratio(1, 2),
                GaussRat::from_ratio(1, 2),
                GaussRat::from_ratio(-1, 2),
            ]
        );

        // Telescoping: λ_0 + Σ λ_{i.s} = -Σ ζ_{i,w_i}.
        let z = zeta(&[0, 1], &[&[(1, 2), (1, 3), (1, 5)], &[(2, 7), (-1, 4)]]);
        let l = zeta_to_lambda(&z);
        let total = l.values.iter().fold(GaussRat::zero(), |a, b| a.add(b));
        let expect = z.table[0][2].add(&z.table[1][1]).neg();
        assert_eq!(total, expect);
    }

    #[test]
    fn defect_examples() {
        // One vertex, no arrows, λ = 0: zero defect at any dimension.
        let q = Quiver::new(vec!["0".into()], vec![]).unwrap();
        let rep = DoubledRep { dims: vec![3], x: vec![], xstar: vec![] };
        let l = LambdaVec { values: vec![GaussRat::zero()] };
        let defects = moment_defect(&q, &rep, &l).unwrap();
        assert!(defects[0].is_zero());

        // Zero-dimensional representation: vacuously zero.
        let rep0 = DoubledRep { dims: vec![0], x: vec![], xstar: vec![] };
        let defects = moment_defect(&q, &rep0, &l).unwrap();
        assert_eq!(defects[0].rows(), 0);

        // A2 quiver 1 -> 2, d = (1,1), X = (x), X* = (y):
        // defect_2 = xy - λ_2, defect_1 = -yx - λ_1.
        let q = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![Arrow { name: "a".into(), tail: 0, head: 1 }],
        )
        .unwrap();
        let x = rat(3, 1);
        let y = rat(5, 1);
        let rep = DoubledRep {
            dims: vec![1, 1],
            x: vec![Mat::from_rows(vec![vec![GaussRat::from_rat(x.clone())]])],
            xstar: vec![Mat::from_rows(vec![vec![GaussRat::from_rat(y.clone())]])],
        };
        let l = LambdaVec { values: vec![GaussRat::from_int(-15), GaussRat::from_int(15)] };
        let defects = moment_defect(&q, &rep, &l).unwrap();
        assert!(defects[0].is_zero() && defects[1].is_zero());
    }

    #[test]
    fn tits_examples() {
        let q = Quiver::new(vec!["0".into()], vec![]).unwrap();
        assert_eq!(tits_form(&q, &[1]), 1);

        // Affine D4 star: center 2, four arms of 1.
        let w = WeightData::new(pts(&[0, 1, -1, 2]), vec![2, 2, 2, 2]).unwrap();
        let (q, d) = star_quiver(&w, 2, &[vec![1], vec![1], vec![1], vec![1]]).unwrap();
        assert_eq!(tits_form(&q, &d), 0);

        let a2 = Quiver::new(
            vec!["1".into(), "2".into()],
            vec![Arrow { name: "a".into(), tail: 0, head: 1 }],
        )
        .unwrap();
        assert_eq!(tits_form(&a2, &[1, 1]), 1);
    }

    #[test]
    fn trace_pairing_examples() {
        let z = zeta(
            &[0, 1, -1],
            &[&[(1, 2), (0, 1)], &[(1, 2), (0, 1)], &[(-1, 2), (-1, 2)]],
        );
        let l = zeta_to_lambda(&z);
        // d = (2; 1, 1, 0)
        assert_eq!(trace_pairing(&l, &[2, 1, 1, 0]), GaussRat::zero());
        let zero = LambdaVec { values: vec![GaussRat::zero(); 4] };
        assert!(trace_pairing(&zero, &[5, 1, 2, 3]).is_zero());
    }

    prop_compose! {
        fn arb_rep()(seed in 0u64..5000) -> (Quiver, DoubledRep) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // Random small star-ish quiver.
            let nv = rng.gen_range(2usize..5);
            let vertices: Vec<String> = (0..nv).map(|v| format!("v{v}")).collect();
            let dims: Vec<usize> = (0..nv).map(|_| rng.gen_range(0usize..3)).collect();
            let na = rng.gen_range(1usize..4);
            let arrows: Vec<Arrow> = (0..na)
                .map(|a| {
                    let t = rng.gen_range(0..nv);
                    let mut h = rng.gen_range(0..nv);
                    if h == t { h = (h + 1) % nv; }
                    Arrow { name: format!("a{a}"), tail: t, head: h }
                })
                .collect();
            let q = Quiver::new(vertices, arrows).unwrap();
            let mut mk = |r: usize, c: usize| {
                QMat::from_fn(r, c, |_, _| GaussRat::from_int(rng.gen_range(-3i64..=3)))
            };
            let x: Vec<QMat> = q.arrows.iter().map(|a| mk(dims[a.head], dims[a.tail])).collect();
            let xstar: Vec<QMat> = q.arrows.iter().map(|a| mk(dims[a.tail], dims[a.head])).collect();
            (q, DoubledRep { dims, x, xstar })
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        // Σ_v trace(pre-deformation defect) = 0 identically; hence a
        // defect-zero representation forces trace_pairing(λ, d) = 0.
        #[test]
        fn defect_traces_telescope((q, rep) in arb_rep()) {
            let zero = LambdaVec { values: vec![GaussRat::zero(); q.vertices.len()] };
            let defects = moment_defect(&q, &rep, &zero).unwrap();
            let total = defects
                .iter()
                .filter(|m| m.rows() > 0)
                .fold(GaussRat::zero(), |acc, m| acc.add(&m.trace()));
            prop_assert!(total.is_zero());
        }
    }
}
