//! The concrete two-way correspondence between Fuchsian systems with
//! parabolic flags and defect-zero representations of the deformed star
//! quiver, plus the seeded instance generator behind the property suites.
//!
//! Forward: the central space is the ambient fibre, arm spaces are the flag
//! layers, unstarred arrows are the inclusions, and the starred arrow at arm
//! level `s` is `(A_i - ζ_{is})` restricted to layer `s-1` and corestricted
//! to layer `s` (well defined exactly because of the eigenvalue condition).
//! Backward: `A_i = X_{i1} X*_{i1} + ζ_{i1}·Id` and the flags are the images
//! of the arm composites, which must be injective; representations with
//! non-injective arms correspond to sheaves with torsion and are rejected.

use crate::conn::{check_zeta_condition, FuchsianConnection, ZetaData};
use crate::flag::Flag;
use crate::matrix::QMat;
use crate::quiver::{
    moment_defect, star_quiver, trace_pairing, zeta_to_lambda, DoubledRep, LambdaVec, Quiver,
};
use crate::scalar::{GaussRat, Ring};
use crate::sheaf::WeightData;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("residues do not sum to zero")]
    ResidueSum,
    #[error("zeta condition fails: {0}")]
    ZetaCondition(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("moment defect is nonzero at vertex {0}")]
    NonzeroDefect(String),
    #[error("lambda vector does not match the zeta table")]
    LambdaMismatch,
    #[error("non-injective arm ({0},{1})")]
    NonInjectiveArm(usize, usize),
    #[error("trace pairing is nonzero for the requested shape: {0}")]
    TraceObstruction(String),
    #[error("generation failed after {0} retries")]
    GenerationFailed(usize),
    #[error(transparent)]
    Quiver(#[from] crate::quiver::QuiverError),
    #[error(transparent)]
    Conn(#[from] crate::conn::ConnError),
    #[error(transparent)]
    Sheaf(#[from] crate::sheaf::SheafError),
}

/// Fuchsian system with parabolic structure: residues summing to zero, one
/// flag per marked point, and an eigenvalue table satisfying the inclusion
/// condition.
#[derive(Clone, Debug, PartialEq)]
pub struct FuchsianTuple {
    pub weights: WeightData,
    pub rank: usize,
    pub residues: Vec<QMat>,
    pub flags: Vec<Flag>,
    pub zeta: ZetaData,
}

impl FuchsianTuple {
    pub fn connection(&self) -> FuchsianConnection {
        FuchsianConnection { points: self.weights.points.clone(), residues: self.residues.clone() }
    }

    pub fn validate(&self) -> Result<(), BridgeError> {
        if !self.zeta.shape_matches(&self.weights) {
            return Err(BridgeError::Shape("zeta table vs weights".into()));
        }
        if self.residues.len() != self.weights.k() {
            return Err(BridgeError::Shape("one residue per marked point".into()));
        }
        for (i, a) in self.residues.iter().enumerate() {
            if a.rows() != self.rank || a.cols() != self.rank {
                return Err(BridgeError::Shape(format!("residue {i} is not rank x rank")));
            }
        }
        for (i, f) in self.flags.iter().enumerate() {
            f.validate().map_err(|e| BridgeError::Shape(format!("flag {i}: {e}")))?;
            if f.ambient != self.rank || f.weight() != self.weights.weights[i] {
                return Err(BridgeError::Shape(format!("flag {i} has wrong shape")));
            }
        }
        if !self.connection().residue_sum().is_zero() {
            return Err(BridgeError::ResidueSum);
        }
        let d = check_zeta_condition(&self.connection(), &self.flags, &self.zeta);
        if !d.ok() {
            return Err(BridgeError::ZetaCondition(d.to_string()));
        }
        Ok(())
    }

    pub fn interior_dims(&self) -> Vec<Vec<usize>> {
        self.flags.iter().map(Flag::interior_dims).collect()
    }
}

/// Coordinates of the columns of `sub` in the column basis `basis`; `None`
/// if some column falls outside the span.
fn coords_in(basis: &QMat, sub: &QMat) -> Option<QMat> {
    basis.solve(sub)
}

/// Fuchsian tuple to defect-zero representation of the deformed star quiver.
pub fn fuchs_to_rep(t: &FuchsianTuple) -> Result<(Quiver, DoubledRep, LambdaVec), BridgeError> {
    t.validate()?;
    let (q, dims) = star_quiver(&t.weights, t.rank, &t.interior_dims())?;
    let lambda = zeta_to_lambda(&t.zeta);
    let mut x = Vec::with_capacity(q.arrows.len());
    let mut xstar = Vec::with_capacity(q.arrows.len());
    for i in 0..t.weights.k() {
        let w = t.weights.weights[i];
        let flag = &t.flags[i];
        for s in 1..w {
            // X along a_{i s}: coordinates of layer s in layer s-1.
            let inc = coords_in(&flag.layers[s - 1], &flag.layers[s])
                .ok_or_else(|| BridgeError::Shape(format!("flag {i} is not nested at {s}")))?;
            // X* along a_{i s}: (A_i - ζ_{is}) from layer s-1 into layer s.
            let shifted = t.residues[i]
                .sub(&QMat::scalar(t.rank, &t.zeta.table[i][s - 1]))
                .mul(&flag.layers[s - 1]);
            let star = coords_in(&flag.layers[s], &shifted).ok_or_else(|| {
                BridgeError::ZetaCondition(format!("corestriction fails at ({},{s})", i + 1))
            })?;
            x.push(inc);
            xstar.push(star);
        }
    }
    let rep = DoubledRep { dims: dims.clone(), x, xstar };
    let defects = moment_defect(&q, &rep, &lambda)?;
    for (v, m) in defects.iter().enumerate() {
        if !m.is_zero() {
            return Err(BridgeError::NonzeroDefect(q.vertices[v].clone()));
        }
    }
    Ok((q, rep, lambda))
}

/// Result of the backward translation: the tuple plus the per-vertex base
/// changes that intertwine the input representation with the canonical one
/// rebuilt from the tuple.
#[derive(Clone, Debug)]
pub struct RepToFuchs {
    pub tuple: FuchsianTuple,
    /// Invertible base change per vertex (identity at the center).
    pub intertwiner: Vec<QMat>,
}

/// Defect-zero representation back to a Fuchsian tuple. Arm composites must
/// be injective; the flags are their images.
pub fn rep_to_fuchs(
    q: &Quiver,
    rep: &DoubledRep,
    lambda: &LambdaVec,
    zeta: &ZetaData,
    weights: &WeightData,
) -> Result<RepToFuchs, BridgeError> {
    rep.validate(q)?;
    if !zeta.shape_matches(weights) {
        return Err(BridgeError::Shape("zeta table vs weights".into()));
    }
    if zeta_to_lambda(zeta) != *lambda {
        return Err(BridgeError::LambdaMismatch);
    }
    let defects = moment_defect(q, rep, lambda)?;
    for (v, m) in defects.iter().enumerate() {
        if !m.is_zero() {
            return Err(BridgeError::NonzeroDefect(q.vertices[v].clone()));
        }
    }
    let n = rep.dims[q.vertex_index("0").ok_or_else(|| BridgeError::Shape("no center".into()))?];
    let k = weights.k();

    // Arm data and flags as images of arm composites.
    let mut residues = Vec::with_capacity(k);
    let mut flags = Vec::with_capacity(k);
    let mut intertwiner: Vec<QMat> = vec![QMat::zeros(0, 0); q.vertices.len()];
    intertwiner[q.vertex_index("0").unwrap()] = QMat::identity(n);
    for i in 0..k {
        let w = weights.weights[i];
        let mut layers = vec![QMat::identity(n)];
        let mut composite = QMat::identity(n);
        for s in 1..w {
            let ai = q
                .arrow_index(&format!("a{}.{}", i + 1, s))
                .ok_or_else(|| BridgeError::Shape(format!("missing arm arrow a{}.{}", i + 1, s)))?;
            let xa = &rep.x[ai];
            composite = composite.mul(xa);
            let d = rep.dims[q.vertex_index(&format!("{}.{}", i + 1, s)).unwrap()];
            if composite.rank() != d {
                return Err(BridgeError::NonInjectiveArm(i + 1, s));
            }
            // Use the composite image itself as the flag basis; then the
            // base change at this vertex is the identity.
            layers.push(composite.clone());
            intertwiner[q.vertex_index(&format!("{}.{}", i + 1, s)).unwrap()] = QMat::identity(d);
        }
        layers.push(QMat::zeros(n, 0));
        flags.push(
            Flag::new(n, layers).map_err(|e| BridgeError::Shape(format!("arm {i}: {e}")))?,
        );
        // A_i = X_{i1} X*_{i1} + ζ_{i1}·Id, with no arm meaning A_i = ζ_{i1}·Id.
        let a_i = if w > 1 {
            let ai = q.arrow_index(&format!("a{}.1", i + 1)).unwrap();
            rep.x[ai]
                .mul(&rep.xstar[ai])
                .add(&QMat::scalar(n, &zeta.table[i][0]))
        } else {
            QMat::scalar(n, &zeta.table[i][0])
        };
        residues.push(a_i);
    }
    let tuple = FuchsianTuple {
        weights: weights.clone(),
        rank: n,
        residues,
        flags,
        zeta: zeta.clone(),
    };
    tuple.validate()?;

    // The canonical representation of the rebuilt tuple must be intertwined
    // with the input by the recorded base changes.
    let (q2, rep2, _) = fuchs_to_rep(&tuple)?;
    for (a_idx, arrow) in q2.arrows.iter().enumerate() {
        let src_change = &intertwiner[arrow.tail];
        let dst_change = &intertwiner[arrow.head];
        let orig = q
            .arrow_index(&arrow.name)
            .ok_or_else(|| BridgeError::Shape(format!("arrow {} missing", arrow.name)))?;
        if rep2.x[a_idx].mul(src_change) != dst_change.mul(&rep.x[orig])
            || rep2.xstar[a_idx].mul(dst_change) != src_change.mul(&rep.xstar[orig])
        {
            return Err(BridgeError::Shape(format!(
                "intertwiner fails along arrow {}",
                arrow.name
            )));
        }
    }
    Ok(RepToFuchs { tuple, intertwiner })
}

/// Section on a trivially-patched sheaf straight to the quiver side.
pub fn section_to_rep(
    s: &crate::sheaf::PatchedSheaf,
    zeta: &ZetaData,
    sec: &crate::conn::ConnectionSection,
) -> Result<(Quiver, DoubledRep, LambdaVec), BridgeError> {
    let (f, flags) = crate::conn::section_to_connection(s, zeta, sec)?;
    let tuple = FuchsianTuple {
        weights: s.weights.clone(),
        rank: s.rank,
        residues: f.residues,
        flags,
        zeta: zeta.clone(),
    };
    fuchs_to_rep(&tuple)
}

fn rand_gauss(rng: &mut ChaCha8Rng) -> GaussRat {
    GaussRat::from_ratio(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=2))
}

fn rand_qmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> QMat {
    QMat::from_fn(rows, cols, |_, _| GaussRat::from_int(rng.gen_range(-3i64..=3)))
}

/// Random admissible eigenvalue table for the star shape: random values with
/// one entry adjusted so the trace pairing vanishes.
fn random_zeta(
    rng: &mut ChaCha8Rng,
    weights: &WeightData,
    n: usize,
    dims: &[Vec<usize>],
) -> Option<ZetaData> {
    let k = weights.k();
    let mut table: Vec<Vec<GaussRat>> = (0..k)
        .map(|i| (0..weights.weights[i]).map(|_| rand_gauss(rng)).collect())
        .collect();
    // Coefficient of ζ_{is} in trace_pairing(λ(ζ), d).
    let coeff = |i: usize, s: usize| -> i64 {
        let w = weights.weights[i];
        let d = &dims[i];
        if s == 0 {
            let first = if w > 1 { d[0] as i64 } else { 0 };
            first - n as i64
        } else if s + 1 < w {
            d[s] as i64 - d[s - 1] as i64
        } else {
            -(d[s - 1] as i64)
        }
    };
    let zeta = ZetaData { points: weights.points.clone(), table: table.clone() };
    let lambda = zeta_to_lambda(&zeta);
    let mut all_dims = vec![n];
    for d in dims {
        all_dims.extend(d.iter().copied());
    }
    let t = trace_pairing(&lambda, &all_dims);
    if t.is_zero() {
        return Some(zeta);
    }
    for i in 0..k {
        for s in 0..weights.weights[i] {
            let c = coeff(i, s);
            if c != 0 {
                let adj = t.div(&GaussRat::from_int(c)).unwrap();
                table[i][s] = table[i][s].sub(&adj);
                return Some(ZetaData { points: weights.points.clone(), table });
            }
        }
    }
    None
}

/// Seeded random Fuchsian tuple of the requested shape.
///
/// Built on the quiver side: random injective unstarred arm maps, then the
/// starred maps as one exact linear solve of all vertex relations at once,
/// randomized inside the solution space; converted back by [`rep_to_fuchs`].
/// When `zeta` is supplied, a nonzero trace pairing is rejected before any
/// sampling; otherwise an admissible table is drawn per attempt.
pub fn random_instance(
    weights: &WeightData,
    n: usize,
    flag_dims: &[Vec<usize>],
    zeta: Option<&ZetaData>,
    seed: u64,
    retries: usize,
) -> Result<FuchsianTuple, BridgeError> {
    let (q, dims) = star_quiver(weights, n, flag_dims)?;
    if let Some(z) = zeta {
        if !z.shape_matches(weights) {
            return Err(BridgeError::Shape("zeta table vs weights".into()));
        }
        let lambda = zeta_to_lambda(z);
        let t = trace_pairing(&lambda, &dims);
        if !t.is_zero() {
            return Err(BridgeError::TraceObstruction(format!(
                "Σ λ_v d_v = {t} != 0, no defect-zero representation exists in this dimension"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..retries.max(1) {
        let z = match zeta {
            Some(z) => z.clone(),
            None => match random_zeta(&mut rng, weights, n, flag_dims) {
                Some(z) => z,
                None => continue,
            },
        };
        let lambda = zeta_to_lambda(&z);
        if !trace_pairing(&lambda, &dims).is_zero() {
            continue;
        }
        // Random injective unstarred maps.
        let mut x: Vec<QMat> = Vec::with_capacity(q.arrows.len());
        let mut ok = true;
        for a in &q.arrows {
            let (dt, dh) = (dims[a.tail], dims[a.head]);
            let mut m = rand_qmat(&mut rng, dh, dt);
            let mut tries = 0;
            while m.rank() != dt.min(dh).min(dt) && tries < 8 {
                m = rand_qmat(&mut rng, dh, dt);
                tries += 1;
            }
            if m.rank() != dt {
                ok = false;
            }
            x.push(m);
        }
        if !ok {
            continue;
        }
        // All vertex relations as one linear system in the starred entries.
        let Some(xstar) = solve_starred(&q, &dims, &x, &lambda, &mut rng) else {
            continue;
        };
        let rep = DoubledRep { dims: dims.clone(), x, xstar };
        match rep_to_fuchs(&q, &rep, &lambda, &z, weights) {
            Ok(out) => return Ok(out.tuple),
            Err(_) => continue,
        }
    }
    Err(BridgeError::GenerationFailed(retries))
}

/// Solves `Σ_{head} X X* - Σ_{tail} X* X = λ·Id` for the starred matrices,
/// returning a random point of the affine solution space.
fn solve_starred(
    q: &Quiver,
    dims: &[usize],
    x: &[QMat],
    lambda: &LambdaVec,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<QMat>> {
    // Unknown layout: for each arrow a, the entries of X*_a (d_t × d_h),
    // row major, in arrow order.
    let offsets: Vec<usize> = {
        let mut acc = 0;
        let mut out = Vec::with_capacity(q.arrows.len() + 1);
        for a in &q.arrows {
            out.push(acc);
            acc += dims[a.tail] * dims[a.head];
        }
        out.push(acc);
        out
    };
    let unknowns = *offsets.last().unwrap();
    let equations: usize = dims.iter().map(|&d| d * d).sum();
    let mut sys = QMat::zeros(equations, unknowns);
    let mut rhs = QMat::zeros(equations, 1);
    let eq_offsets: Vec<usize> = {
        let mut acc = 0;
        let mut out = Vec::with_capacity(dims.len());
        for &d in dims {
            out.push(acc);
            acc += d * d;
        }
        out
    };
    for (v, &dv) in dims.iter().enumerate() {
        for r in 0..dv {
            for c in 0..dv {
                let eq = eq_offsets[v] + r * dv + c;
                if r == c {
                    rhs.set(eq, 0, lambda.values[v].clone());
                }
            }
        }
    }
    for (ai, a) in q.arrows.iter().enumerate() {
        let (dt, dh) = (dims[a.tail], dims[a.head]);
        // Head contribution: (X_a X*_a)[r][c] = Σ_m X[r][m]·X*[m][c].
        for r in 0..dh {
            for c in 0..dh {
                let eq = eq_offsets[a.head] + r * dh + c;
                for m in 0..dt {
                    let cur = sys.at(eq, offsets[ai] + m * dh + c).clone();
                    sys.set(eq, offsets[ai] + m * dh + c, cur.add(x[ai].at(r, m)));
                }
            }
        }
        // Tail contribution: -(X*_a X_a)[r][c] = -Σ_m X*[r][m]·X[m][c].
        for r in 0..dt {
            for c in 0..dt {
                let eq = eq_offsets[a.tail] + r * dt + c;
                for m in 0..dh {
                    let cur = sys.at(eq, offsets[ai] + r * dh + m).clone();
                    sys.set(eq, offsets[ai] + r * dh + m, cur.sub(x[ai].at(m, c)));
                }
            }
        }
    }
    let particular = sys.solve(&rhs)?;
    // Randomize inside the kernel for generic instances.
    let kernel = sys.kernel_basis();
    let mut solution = particular;
    for kc in 0..kernel.cols() {
        let coeff = GaussRat::from_int(rng.gen_range(-2i64..=2));
        if coeff.is_zero() {
            continue;
        }
        let col = kernel.col(kc).scale(&coeff);
        solution = solution.add(&col);
    }
    let mut out = Vec::with_capacity(q.arrows.len());
    for (ai, a) in q.arrows.iter().enumerate() {
        let (dt, dh) = (dims[a.tail], dims[a.head]);
        out.push(QMat::from_fn(dt, dh, |r, c| solution.at(offsets[ai] + r * dh + c, 0).clone()));
    }
    Some(out)
}

/// The built-in worked example: rank 2, three marked points `0, 1, -1` of
/// weight 2, residues `diag(1/2,0)`, `diag(0,1/2)`, `-1/2·Id` with flags
/// `span(e2)`, `span(e1)`, `0` and eigenvalue table
/// `((1/2,0), (1/2,0), (-1/2,-1/2))`. Small enough to verify by hand, rich
/// enough to exercise every pipeline stage.
pub fn worked_instance() -> FuchsianTuple {
    let g = |n: i64, d: i64| GaussRat::from_ratio(n, d);
    let points = vec![g(0, 1), g(1, 1), g(-1, 1)];
    let weights = WeightData::new(points.clone(), vec![2, 2, 2]).unwrap();
    let residues = vec![
        QMat::from_rows(vec![vec![g(1, 2), g(0, 1)], vec![g(0, 1), g(0, 1)]]),
        QMat::from_rows(vec![vec![g(0, 1), g(0, 1)], vec![g(0, 1), g(1, 2)]]),
        QMat::from_rows(vec![vec![g(-1, 2), g(0, 1)], vec![g(0, 1), g(-1, 2)]]),
    ];
    let e2 = QMat::from_rows(vec![vec![g(0, 1)], vec![g(1, 1)]]);
    let e1 = QMat::from_rows(vec![vec![g(1, 1)], vec![g(0, 1)]]);
    let flags = vec![
        Flag::new(2, vec![QMat::identity(2), e2, QMat::zeros(2, 0)]).unwrap(),
        Flag::new(2, vec![QMat::identity(2), e1, QMat::zeros(2, 0)]).unwrap(),
        Flag::new(2, vec![QMat::identity(2), QMat::zeros(2, 0), QMat::zeros(2, 0)]).unwrap(),
    ];
    let zeta = ZetaData {
        points,
        table: vec![
            vec![g(1, 2), g(0, 1)],
            vec![g(1, 2), g(0, 1)],
            vec![g(-1, 2), g(-1, 2)],
        ],
    };
    FuchsianTuple { weights, rank: 2, residues, flags, zeta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Mat;

    fn pts(vals: &[i64]) -> Vec<GaussRat> {
        vals.iter().map(|&v| GaussRat::from_int(v)).collect()
    }

    fn qm(rows: &[&[i64]]) -> QMat {
        Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| GaussRat::from_int(v)).collect()).collect(),
        )
    }

    fn qm_r(rows: &[&[(i64, i64)]]) -> QMat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| GaussRat::from_ratio(n, d)).collect())
                .collect(),
        )
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
    fn worked_instance_rep() {
        let t = worked_instance();
        t.validate().unwrap();
        let (q, rep, lambda) = fuchs_to_rep(&t).unwrap();
        assert_eq!(rep.dims, vec![2, 1, 1, 0]);
        assert_eq!(
            lambda.values,
            vec![
                GaussRat::from_ratio(-1, 2),
                GaussRat::from_ratio(1, 2),
                GaussRat::from_ratio(1, 2),
                GaussRat::zero(),
            ]
        );
        // Arm 1: X = (0,1)^T, X* = (0,-1/2).
        let a11 = q.arrow_index("a1.1").unwrap();
        assert_eq!(rep.x[a11], qm(&[&[0], &[1]]));
        assert_eq!(rep.xstar[a11], qm_r(&[&[(0, 1), (-1, 2)]]));
        // Center relation: Σ X X* = -1/2 · Id.
        let mut acc = QMat::zeros(2, 2);
        for (ai, a) in q.arrows.iter().enumerate() {
            if a.head == 0 {
                acc = acc.add(&rep.x[ai].mul(&rep.xstar[ai]));
            }
        }
        assert_eq!(acc, QMat::scalar(2, &GaussRat::from_ratio(-1, 2)));
        // Defect certified zero by construction; trace pairing vanishes.
        assert!(trace_pairing(&lambda, &rep.dims).is_zero());
    }

    #[test]
    fn worked_instance_round_trip() {
        let t = worked_instance();
        let (q, rep, lambda) = fuchs_to_rep(&t).unwrap();
        let back = rep_to_fuchs(&q, &rep, &lambda, &t.zeta, &t.weights).unwrap();
        assert_eq!(back.tuple.residues, t.residues);
        for (a, b) in back.tuple.flags.iter().zip(&t.flags) {
            assert!(a.same_subspaces(b));
        }
        // Spectral consequence at each point.
        for (i, a) in t.residues.iter().enumerate() {
            let mut prod = QMat::identity(2);
            for s in 0..2 {
                prod = prod.mul(&a.sub(&QMat::scalar(2, &t.zeta.table[i][s])));
            }
            assert!(prod.is_zero());
        }
    }

    #[test]
    fn scalar_tuple_round_trip() {
        // n=1, k=2, w=(1,1), A = (1/2), (-1/2), ζ = (1/2), (-1/2).
        let weights = WeightData::new(pts(&[0, 1]), vec![1, 1]).unwrap();
        let t = FuchsianTuple {
            weights: weights.clone(),
            rank: 1,
            residues: vec![qm_r(&[&[(1, 2)]]), qm_r(&[&[(-1, 2)]])],
            flags: vec![Flag::trivial(1, 1), Flag::trivial(1, 1)],
            zeta: zeta(&[0, 1], &[&[(1, 2)], &[(-1, 2)]]),
        };
        let (q, rep, lambda) = fuchs_to_rep(&t).unwrap();
        assert_eq!(q.vertices.len(), 1);
        assert!(lambda.values[0].is_zero());
        let back = rep_to_fuchs(&q, &rep, &lambda, &t.zeta, &weights).unwrap();
        assert_eq!(back.tuple.residues, t.residues);
    }

    #[test]
    fn nilpotent_undeformed_instance() {
        // ζ = 0, nilpotent residues with image flags: the undeformed relation.
        let weights = WeightData::new(pts(&[0, 1, -1]), vec![2, 2, 2]).unwrap();
        let nil = qm(&[&[0, 1], &[0, 0]]);
        let residues = vec![nil.clone(), nil.clone(), nil.scale(&GaussRat::from_int(-2))];
        let e1 = qm(&[&[1], &[0]]);
        let flag =
            Flag::new(2, vec![QMat::identity(2), e1, QMat::zeros(2, 0)]).unwrap();
        let z = zeta(
            &[0, 1, -1],
            &[&[(0, 1), (0, 1)], &[(0, 1), (0, 1)], &[(0, 1), (0, 1)]],
        );
        let t = FuchsianTuple {
            weights,
            rank: 2,
            residues,
            flags: vec![flag.clone(), flag.clone(), flag.clone()],
            zeta: z,
        };
        let (_, _, lambda) = fuchs_to_rep(&t).unwrap();
        assert!(lambda.values.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn rejects_non_injective_arm() {
        let t = worked_instance();
        let (q, mut rep, lambda) = fuchs_to_rep(&t).unwrap();
        let a11 = q.arrow_index("a1.1").unwrap();
        rep.x[a11] = QMat::zeros(2, 1);
        // Zeroing an arm map breaks the relations, so fix lambda mismatch
        // aside and expect either a defect error or the arm error; force the
        // arm check by also zeroing the starred map at the same arrow and
        // adjusting nothing else: defect will fail first at the center.
        let err = rep_to_fuchs(&q, &rep, &lambda, &t.zeta, &t.weights).unwrap_err();
        match err {
            BridgeError::NonzeroDefect(_) | BridgeError::NonInjectiveArm(..) => {}
            other => panic!("unexpected error {other:?}"),
        }

        // A genuinely relation-satisfying rep with a zero arm where d > 0:
        // single arm, λ = 0, X = 0, X* = 0 on dims (1,1) satisfies the
        // relations vacuously but has a non-injective arm.
        let weights = WeightData::new(pts(&[0, 1]), vec![2, 1]).unwrap();
        let (q1, _) = star_quiver(&weights, 1, &[vec![1], vec![]]).unwrap();
        let z = zeta(&[0, 1], &[&[(0, 1), (0, 1)], &[(0, 1)]]);
        let lam = zeta_to_lambda(&z);
        let rep = DoubledRep {
            dims: vec![1, 1],
            x: vec![QMat::zeros(1, 1)],
            xstar: vec![QMat::zeros(1, 1)],
        };
        let err = rep_to_fuchs(&q1, &rep, &lam, &z, &weights).unwrap_err();
        assert!(matches!(err, BridgeError::NonInjectiveArm(1, 1)));
    }

    #[test]
    fn trace_obstruction_rejected_early() {
        let weights = WeightData::new(pts(&[0, 1, -1]), vec![2, 2, 2]).unwrap();
        // ζ with nonzero pairing against d = (2;1,1,1).
        let z = zeta(
            &[0, 1, -1],
            &[&[(1, 1), (0, 1)], &[(0, 1), (0, 1)], &[(0, 1), (0, 1)]],
        );
        let err = random_instance(&weights, 2, &[vec![1], vec![1], vec![1]], Some(&z), 7, 4)
            .unwrap_err();
        assert!(matches!(err, BridgeError::TraceObstruction(_)));
    }

    #[test]
    fn generator_d4_shape_succeeds_and_is_deterministic() {
        let weights = WeightData::new(pts(&[0, 1, -1]), vec![2, 2, 2]).unwrap();
        let t1 = random_instance(&weights, 2, &[vec![1], vec![1], vec![1]], None, 11, 24).unwrap();
        let t2 = random_instance(&weights, 2, &[vec![1], vec![1], vec![1]], None, 11, 24).unwrap();
        assert_eq!(t1, t2);
        t1.validate().unwrap();
        let (_, rep, lambda) = fuchs_to_rep(&t1).unwrap();
        assert!(trace_pairing(&lambda, &rep.dims).is_zero());
        let t3 = random_instance(&weights, 2, &[vec![1], vec![1], vec![1]], None, 12, 24).unwrap();
        assert_ne!(t1, t3);
    }

    #[test]
    fn generator_scalar_shapes() {
        // n = 1 shapes succeed whenever the scalar constraints are consistent.
        let weights = WeightData::new(pts(&[0, 1]), vec![1, 1]).unwrap();
        let t = random_instance(&weights, 1, &[vec![], vec![]], None, 3, 8).unwrap();
        t.validate().unwrap();
        assert!(t.connection().residue_sum().is_zero());
    }
}
