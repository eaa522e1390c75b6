//! Seeded verification suites behind the `selftest` command and the
//! acceptance tests. Every suite is deterministic in its seed; instances are
//! independent and can run on several threads with identical results.

use crate::bridge::{
    fuchs_to_rep, random_instance, rep_to_fuchs, section_to_rep, worked_instance, FuchsianTuple,
};
use crate::conn::{
    add_scalar_form, build_dzeta, check_zeta_condition, connection_to_section, dzeta_check,
    normalize_zeta, residue_tower, section_to_connection, verify_section, ZetaData,
};
use crate::flag::Flag;
use crate::matrix::QMat;
use crate::quiver::{moment_defect, trace_pairing, zeta_to_lambda};
use crate::ratfun::RatFun;
use crate::scalar::{GaussRat, Ring};
use crate::sheaf::{
    check_sheaf, extract_flags, framed_degree, parabolic_to_sheaf, shift_sheaf, twist_omega,
    WeightData,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one suite: instance count, passes, and indexed failures.
#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: String,
    pub total: usize,
    pub passed: usize,
    pub failures: Vec<(usize, String)>,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }

    pub fn summary(&self) -> String {
        if self.ok() {
            format!("{}: {}/{} pass", self.name, self.passed, self.total)
        } else {
            let first = &self.failures[0];
            format!(
                "{}: {}/{} pass; first failure at instance {}: {}",
                self.name, self.passed, self.total, first.0, first.1
            )
        }
    }
}

/// Runs `count` independent instances, optionally on `jobs` threads, and
/// merges the results in instance order.
fn run_indexed<F>(name: &str, count: usize, jobs: usize, f: F) -> SuiteResult
where
    F: Fn(usize) -> Result<(), String> + Sync,
{
    let jobs = jobs.max(1).min(count.max(1));
    let mut outcomes: Vec<Option<(usize, String)>> = Vec::with_capacity(count);
    if jobs <= 1 {
        for idx in 0..count {
            outcomes.push(f(idx).err().map(|e| (idx, e)));
        }
    } else {
        type Slot = Option<(usize, String)>;
        let mut slots: Vec<Slot> = vec![None; count];
        std::thread::scope(|scope| {
            let chunks: Vec<(usize, &mut [Slot])> = {
                let mut rest = slots.as_mut_slice();
                let mut start = 0;
                let size = count.div_ceil(jobs);
                let mut out = Vec::new();
                while !rest.is_empty() {
                    let take = size.min(rest.len());
                    let (head, tail) = rest.split_at_mut(take);
                    out.push((start, head));
                    start += take;
                    rest = tail;
                }
                out
            };
            for (start, chunk) in chunks {
                let f = &f;
                scope.spawn(move || {
                    for (off, slot) in chunk.iter_mut().enumerate() {
                        let idx = start + off;
                        *slot = f(idx).err().map(|e| (idx, e));
                    }
                });
            }
        });
        outcomes = slots.into_iter().collect();
    }
    let failures: Vec<(usize, String)> = outcomes.into_iter().flatten().collect();
    SuiteResult {
        name: name.to_string(),
        total: count,
        passed: count - failures.len(),
        failures,
    }
}

fn point_pool() -> Vec<GaussRat> {
    vec![
        GaussRat::from_int(0),
        GaussRat::from_int(1),
        GaussRat::from_int(-1),
        GaussRat::from_int(2),
        GaussRat::from_int(-2),
        GaussRat::from_ratio(1, 2),
        GaussRat::i(),
    ]
}

/// Seeded weight data with `2 ≤ k ≤ 4`, `1 ≤ w_i ≤ 4`; the first few indices
/// deterministically cover the corner shapes.
fn random_weights(rng: &mut ChaCha8Rng, idx: usize) -> WeightData {
    let pool = point_pool();
    let (k, forced_w): (usize, Option<usize>) = match idx {
        0 => (2, Some(1)),
        1 => (4, None),
        2 => (2, Some(4)),
        _ => (rng.gen_range(2..=4), None),
    };
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut used = vec![false; pool.len()];
    for _ in 0..k {
        let mut p = rng.gen_range(0..pool.len());
        while used[p] {
            p = (p + 1) % pool.len();
        }
        used[p] = true;
        points.push(pool[p].clone());
        weights.push(forced_w.unwrap_or_else(|| rng.gen_range(1..=4)));
    }
    WeightData::new(points, weights).unwrap()
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> QMat {
    loop {
        let m = QMat::from_fn(n, n, |_, _| GaussRat::from_int(rng.gen_range(-2i64..=2)));
        if m.rank() == n {
            return m;
        }
    }
}

/// Random flag: nested spans of suffix columns of a random invertible basis.
fn random_flag(rng: &mut ChaCha8Rng, n: usize, w: usize) -> Flag {
    let basis = random_invertible(rng, n);
    let mut dims = Vec::with_capacity(w + 1);
    dims.push(n);
    for _ in 0..w {
        let prev = *dims.last().unwrap();
        dims.push(rng.gen_range(0..=prev));
    }
    dims[w] = 0;
    let layers = dims
        .iter()
        .map(|&d| {
            let idx: Vec<usize> = (n - d..n).collect();
            basis.select_cols(&idx)
        })
        .collect();
    Flag::new(n, layers).unwrap()
}

fn random_parabolic(idx: usize, seed: u64) -> (WeightData, usize, Vec<Flag>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9e3779b97f4a7c15));
    let weights = random_weights(&mut rng, idx);
    let n = match idx {
        3 => 4,
        _ => rng.gen_range(1..=4),
    };
    let flags = weights.weights.iter().map(|&w| random_flag(&mut rng, n, w)).collect();
    (weights, n, flags)
}

fn random_zeta_table(rng: &mut ChaCha8Rng, weights: &WeightData) -> ZetaData {
    ZetaData {
        points: weights.points.clone(),
        table: weights
            .weights
            .iter()
            .map(|&w| {
                (0..w)
                    .map(|_| GaussRat::from_ratio(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=2)))
                    .collect()
            })
            .collect(),
    }
}

/// Cycle-and-patching calculus: sheaf validity, flag round trip, shift
/// additivity with the degree law, and omega-twist validity.
pub fn suite_sheaf_calculus(seed: u64, count: usize, jobs: usize) -> SuiteResult {
    run_indexed("sheaf calculus", count, jobs, |idx| {
        let (weights, n, flags) = random_parabolic(idx, seed);
        let s = parabolic_to_sheaf(n, &flags, &weights).map_err(|e| e.to_string())?;
        let d = check_sheaf(&s);
        if !d.ok() {
            return Err(d.to_string());
        }
        let extracted = extract_flags(&s).map_err(|e| e.to_string())?;
        for (a, b) in extracted.iter().zip(&flags) {
            if !a.same_subspaces(b) {
                return Err("extracted flags differ from the input flags".into());
            }
        }
        // Shift: zero is the identity, shifts add, degree follows r/w.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd ^ idx as u64);
        let k = weights.k();
        let r1: Vec<i64> = (0..k).map(|_| rng.gen_range(-2i64..=2)).collect();
        let r2: Vec<i64> = (0..k).map(|_| rng.gen_range(-2i64..=2)).collect();
        if shift_sheaf(&s, &vec![0; k]).map_err(|e| e.to_string())? != s {
            return Err("shift by zero is not the identity".into());
        }
        let a = shift_sheaf(&shift_sheaf(&s, &r1).map_err(|e| e.to_string())?, &r2)
            .map_err(|e| e.to_string())?;
        let sum: Vec<i64> = r1.iter().zip(&r2).map(|(x, y)| x + y).collect();
        let b = shift_sheaf(&s, &sum).map_err(|e| e.to_string())?;
        if a != b {
            return Err("shift additivity fails".into());
        }
        let da = check_sheaf(&a);
        if !da.ok() {
            return Err(format!("shifted sheaf invalid: {da}"));
        }
        let base_deg = framed_degree(&s).map_err(|e| e.to_string())?;
        let shifted_deg = framed_degree(&a).map_err(|e| e.to_string())?;
        let mut expect = base_deg;
        for (i, &ri) in sum.iter().enumerate() {
            expect += crate::scalar::rat(n as i64 * ri, weights.weights[i] as i64);
        }
        if shifted_deg != expect {
            return Err("shift degree law fails".into());
        }
        // Twist.
        let t = twist_omega(&s).map_err(|e| e.to_string())?;
        if t.rank != s.rank {
            return Err("twist changed the rank".into());
        }
        let dt = check_sheaf(&t);
        if !dt.ok() {
            return Err(format!("twisted sheaf invalid: {dt}"));
        }
        Ok(())
    })
}

/// Extension construction: the rank-2n sheaf is valid (period products
/// included), the exact-sequence diagrams commute, and the twisted module
/// action satisfies its axioms on generators.
pub fn suite_extension(seed: u64, count: usize, jobs: usize) -> SuiteResult {
    run_indexed("extension construction", count, jobs, |idx| {
        let (weights, n, flags) = random_parabolic(idx, seed);
        let s = parabolic_to_sheaf(n, &flags, &weights).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed ^ (idx as u64) << 1);
        let zeta = random_zeta_table(&mut rng, &weights);
        let dz = build_dzeta(&s, &zeta).map_err(|e| e.to_string())?;
        if dz.sheaf.rank != 2 * n {
            return Err("extension rank is not 2n".into());
        }
        let d = dzeta_check(&dz);
        if !d.ok() {
            return Err(d.to_string());
        }
        let total: GaussRat = dz.zeta_shift.iter().fold(GaussRat::zero(), |a, b| a.add(b));
        if !total.is_zero() {
            return Err("normalization shifts do not sum to zero".into());
        }
        Ok(())
    })
}

/// Instance shapes for the generator-backed suites, all solvable at small
/// seeds: scalar shapes, stars with one-step flags, and a longer-arm shape.
fn generator_shape(idx: usize) -> (WeightData, usize, Vec<Vec<usize>>) {
    let pool = point_pool();
    let mk = |k: usize, w: Vec<usize>| {
        WeightData::new(pool[..k].to_vec(), w).unwrap()
    };
    // All shapes are roots of their star quivers, so a generic admissible
    // eigenvalue table admits solutions and retries stay rare.
    match idx % 5 {
        0 => (mk(2, vec![1, 1]), 1, vec![vec![], vec![]]),
        1 => (mk(3, vec![2, 2, 2]), 2, vec![vec![1], vec![1], vec![1]]),
        2 => (mk(2, vec![2, 2]), 1, vec![vec![0], vec![1]]),
        3 => (mk(3, vec![3, 2, 2]), 2, vec![vec![1, 1], vec![1], vec![1]]),
        _ => (mk(4, vec![2, 2, 2, 2]), 2, vec![vec![1], vec![1], vec![1], vec![1]]),
    }
}

fn generate(idx: usize, seed: u64) -> Result<FuchsianTuple, String> {
    let (weights, n, dims) = generator_shape(idx);
    random_instance(&weights, n, &dims, None, seed.wrapping_add(idx as u64), 40)
        .map_err(|e| format!("generation: {e}"))
}

/// Section bijection: building the section and reading the connection back
/// are mutually inverse, exactly, on generated instances.
pub fn suite_bijection(seed: u64, count: usize, jobs: usize) -> SuiteResult {
    run_indexed("section bijection", count, jobs, |idx| {
        let t = generate(idx, seed)?;
        let s = parabolic_to_sheaf(t.rank, &t.flags, &t.weights).map_err(|e| e.to_string())?;
        let sec = connection_to_section(&t.flags, &t.weights, &t.zeta, &t.connection())
            .map_err(|e| e.to_string())?;
        let v = verify_section(&s, &t.zeta, &sec);
        if !v.ok() {
            return Err(v.to_string());
        }
        let (f, flags) = section_to_connection(&s, &t.zeta, &sec).map_err(|e| e.to_string())?;
        if f.residues != t.residues {
            return Err("recovered residues differ".into());
        }
        for (a, b) in flags.iter().zip(&t.flags) {
            if !a.same_subspaces(b) {
                return Err("recovered flags differ".into());
            }
        }
        // And back: the section rebuilt from the recovered connection is
        // identical as stored matrices.
        let sec2 = connection_to_section(&flags, &t.weights, &t.zeta, &f)
            .map_err(|e| e.to_string())?;
        if sec2 != sec {
            return Err("rebuilt section differs".into());
        }
        let tower = residue_tower(&s, &t.zeta, &sec).map_err(|e| e.to_string())?;
        if !tower.report.ok() {
            return Err(tower.report.to_string());
        }
        Ok(())
    })
}

/// Quiver correspondence: zero defect, zero trace pairing, exact round trip
/// of residues and flags, and coherence with the section pipeline.
pub fn suite_correspondence(seed: u64, count: usize, jobs: usize) -> SuiteResult {
    run_indexed("quiver correspondence", count, jobs, |idx| {
        let t = generate(idx, seed ^ 0x00c0ffee)?;
        let (q, rep, lambda) = fuchs_to_rep(&t).map_err(|e| e.to_string())?;
        let defects = moment_defect(&q, &rep, &lambda).map_err(|e| e.to_string())?;
        if defects.iter().any(|m| !m.is_zero()) {
            return Err("nonzero moment defect".into());
        }
        if !trace_pairing(&lambda, &rep.dims).is_zero() {
            return Err("nonzero trace pairing".into());
        }
        let back = rep_to_fuchs(&q, &rep, &lambda, &t.zeta, &t.weights).map_err(|e| e.to_string())?;
        if back.tuple.residues != t.residues {
            return Err("round-trip residues differ".into());
        }
        for (a, b) in back.tuple.flags.iter().zip(&t.flags) {
            if !a.same_subspaces(b) {
                return Err("round-trip flags differ".into());
            }
        }
        // Center relation <-> residue sum, both ways.
        if !t.connection().residue_sum().is_zero() {
            return Err("residue sum nonzero".into());
        }
        // Spectral consequence.
        for (i, a) in t.residues.iter().enumerate() {
            let mut prod = QMat::identity(t.rank);
            for z in &t.zeta.table[i] {
                prod = prod.mul(&a.sub(&QMat::scalar(t.rank, z)));
            }
            if !prod.is_zero() {
                return Err(format!("spectral product nonzero at point {}", i + 1));
            }
        }
        // Full pipeline coherence: the section route lands on the same rep.
        let s = parabolic_to_sheaf(t.rank, &t.flags, &t.weights).map_err(|e| e.to_string())?;
        let sec = connection_to_section(&t.flags, &t.weights, &t.zeta, &t.connection())
            .map_err(|e| e.to_string())?;
        let (q2, rep2, lambda2) = section_to_rep(&s, &t.zeta, &sec).map_err(|e| e.to_string())?;
        if q2 != q || lambda2 != lambda {
            return Err("pipeline quiver or lambda differs".into());
        }
        // Flag bases may differ, so exhibit the base change per vertex
        // (coordinates of the pipeline flags in the source flags) and check
        // that it intertwines the two representations exactly.
        if rep2.dims != rep.dims {
            return Err("pipeline dims differ".into());
        }
        let (_, flags2) = crate::conn::section_to_connection(&s, &t.zeta, &sec)
            .map_err(|e| e.to_string())?;
        let mut eta: Vec<QMat> = vec![QMat::identity(t.rank)];
        for (i, f2) in flags2.iter().enumerate() {
            for lvl in 1..t.weights.weights[i] {
                let change = t.flags[i].layers[lvl]
                    .solve(&f2.layers[lvl])
                    .ok_or("pipeline flags are not the same subspaces")?;
                eta.push(change);
            }
        }
        for (a_idx, arrow) in q.arrows.iter().enumerate() {
            let lhs_x = rep.x[a_idx].mul(&eta[arrow.tail]);
            let rhs_x = eta[arrow.head].mul(&rep2.x[a_idx]);
            let lhs_s = rep.xstar[a_idx].mul(&eta[arrow.head]);
            let rhs_s = eta[arrow.tail].mul(&rep2.xstar[a_idx]);
            if lhs_x != rhs_x || lhs_s != rhs_s {
                return Err("pipeline reps are not intertwined by the base change".into());
            }
        }
        Ok(())
    })
}

/// The worked instance, verified end to end.
pub fn suite_worked_instance() -> SuiteResult {
    run_indexed("worked instance", 1, 1, |_| {
        let t = worked_instance();
        t.validate().map_err(|e| e.to_string())?;
        let zc = check_zeta_condition(&t.connection(), &t.flags, &t.zeta);
        if !zc.ok() {
            return Err(zc.to_string());
        }
        let (q, rep, lambda) = fuchs_to_rep(&t).map_err(|e| e.to_string())?;
        let g = |n: i64, d: i64| GaussRat::from_ratio(n, d);
        if lambda.values != vec![g(-1, 2), g(1, 2), g(1, 2), g(0, 1)] {
            return Err("lambda differs from (-1/2; 1/2, 1/2, 0)".into());
        }
        let defects = moment_defect(&q, &rep, &lambda).map_err(|e| e.to_string())?;
        if defects.iter().any(|m| !m.is_zero()) {
            return Err("nonzero defect".into());
        }
        let back = rep_to_fuchs(&q, &rep, &lambda, &t.zeta, &t.weights).map_err(|e| e.to_string())?;
        if back.tuple.residues != t.residues {
            return Err("rep round trip changes residues".into());
        }
        let s = parabolic_to_sheaf(t.rank, &t.flags, &t.weights).map_err(|e| e.to_string())?;
        let sec = connection_to_section(&t.flags, &t.weights, &t.zeta, &t.connection())
            .map_err(|e| e.to_string())?;
        let (f, _) = section_to_connection(&s, &t.zeta, &sec).map_err(|e| e.to_string())?;
        if f.residues != t.residues {
            return Err("section round trip changes residues".into());
        }
        let tower = residue_tower(&s, &t.zeta, &sec).map_err(|e| e.to_string())?;
        if !tower.report.ok() {
            return Err(tower.report.to_string());
        }
        // (Res_{a_1} - ζ_{11})(Res_{a_1} - ζ_{12}) = 0.
        let a1 = &t.residues[0];
        let prod = a1
            .sub(&QMat::scalar(2, &g(1, 2)))
            .mul(&a1.sub(&QMat::scalar(2, &g(0, 1))));
        if !prod.is_zero() {
            return Err("spectral product at the first point is nonzero".into());
        }
        Ok(())
    })
}

/// Degenerate regimes: weight-one reduction to the uncoupled block form,
/// scalar closed forms against hand computation, and the undeformed
/// nilpotent family.
pub fn suite_degenerate(seed: u64) -> SuiteResult {
    run_indexed("degenerate regimes", 3, 1, |case| match case {
        0 => {
            // All weights 1: extension cycle matrices are block diagonal.
            let _ = seed;
            for n in 1..=3usize {
                let pool = point_pool();
                let weights = WeightData::new(pool[..3].to_vec(), vec![1, 1, 1]).unwrap();
                let flags: Vec<Flag> = (0..3).map(|_| Flag::trivial(n, 1)).collect();
                let s = parabolic_to_sheaf(n, &flags, &weights).map_err(|e| e.to_string())?;
                let zeta = ZetaData {
                    points: weights.points.clone(),
                    table: vec![
                        vec![GaussRat::from_ratio(1, 3)],
                        vec![GaussRat::from_ratio(-1, 6)],
                        vec![GaussRat::from_ratio(-1, 6)],
                    ],
                };
                let dz = build_dzeta(&s, &zeta).map_err(|e| e.to_string())?;
                let d = dzeta_check(&dz);
                if !d.ok() {
                    return Err(d.to_string());
                }
                for cy in &dz.sheaf.cycles {
                    for m in &cy.mats {
                        if !m.submat(n, 0, n, n).is_zero() {
                            return Err("weight-one lower-left block is nonzero".into());
                        }
                    }
                }
            }
            Ok(())
        }
        1 => {
            // Scalar closed forms against hand computation, k=2, w=(2,2).
            scalar_closed_forms()
        }
        _ => {
            // ζ = 0, nilpotent residues, image flags: the undeformed relation.
            let g = |n: i64, d: i64| GaussRat::from_ratio(n, d);
            let pool = point_pool();
            let weights = WeightData::new(pool[..3].to_vec(), vec![2, 2, 2]).unwrap();
            let nil = QMat::from_rows(vec![vec![g(0, 1), g(1, 1)], vec![g(0, 1), g(0, 1)]]);
            let residues = vec![nil.clone(), nil.clone(), nil.scale(&g(-2, 1))];
            let e1 = QMat::from_rows(vec![vec![g(1, 1)], vec![g(0, 1)]]);
            let flag = Flag::new(2, vec![QMat::identity(2), e1, QMat::zeros(2, 0)])
                .map_err(|e| e.to_string())?;
            let zeta = ZetaData {
                points: weights.points.clone(),
                table: vec![vec![GaussRat::zero(); 2]; 3],
            };
            let t = FuchsianTuple {
                weights: weights.clone(),
                rank: 2,
                residues,
                flags: vec![flag.clone(), flag.clone(), flag],
                zeta,
            };
            t.validate().map_err(|e| e.to_string())?;
            let (q, rep, lambda) = fuchs_to_rep(&t).map_err(|e| e.to_string())?;
            if lambda.values.iter().any(|v| !v.is_zero()) {
                return Err("lambda is nonzero for zero zeta".into());
            }
            let defects = moment_defect(&q, &rep, &lambda).map_err(|e| e.to_string())?;
            if defects.iter().any(|m| !m.is_zero()) {
                return Err("undeformed relation fails".into());
            }
            // The section route passes too.
            let s = parabolic_to_sheaf(t.rank, &t.flags, &t.weights).map_err(|e| e.to_string())?;
            let sec = connection_to_section(&t.flags, &t.weights, &t.zeta, &t.connection())
                .map_err(|e| e.to_string())?;
            let v = verify_section(&s, &t.zeta, &sec);
            if !v.ok() {
                return Err(v.to_string());
            }
            Ok(())
        }
    })
}

/// Hand-computed scalar sections for rank 1, k=2, w=(2,2), flag levels
/// carrying the coordinate at level 0 on the first chart and level 1 on the
/// second: residues are then `(ζ_{11}, ζ_{22})`-forced.
fn scalar_closed_forms() -> Result<(), String> {
    let g = |n: i64, d: i64| GaussRat::from_ratio(n, d);
    let p0 = GaussRat::from_int(0);
    let p1 = GaussRat::from_int(1);
    let weights = WeightData::new(vec![p0.clone(), p1.clone()], vec![2, 2]).unwrap();
    // Chart 1 flag: C ⊇ 0 ⊇ 0 (x at level 0); chart 2 flag: C ⊇ C ⊇ 0.
    let full = QMat::identity(1);
    let zero = QMat::zeros(1, 0);
    let flag1 = Flag::new(1, vec![full.clone(), zero.clone(), zero.clone()]).unwrap();
    let flag2 = Flag::new(1, vec![full.clone(), full.clone(), zero.clone()]).unwrap();
    // A_1 = ζ_{11} = 1/3, A_2 = ζ_{22} = -1/3; free entries ζ_{12} = 2/7,
    // ζ_{21} = 1/5.
    let zeta = ZetaData {
        points: vec![p0.clone(), p1.clone()],
        table: vec![vec![g(1, 3), g(2, 7)], vec![g(1, 5), g(-1, 3)]],
    };
    let f = crate::conn::FuchsianConnection {
        points: vec![p0.clone(), p1.clone()],
        residues: vec![
            QMat::scalar(1, &g(1, 3)),
            QMat::scalar(1, &g(-1, 3)),
        ],
    };
    let flags = vec![flag1, flag2];
    let sec = connection_to_section(&flags, &weights, &zeta, &f).map_err(|e| e.to_string())?;
    // Hand values. M(z) = (1/3)/z - (1/3)/(z-1); M_1 = z·M, M_2 = (z-1)·M.
    let m = f.global_form();
    let x1 = weights.x(0);
    let x2 = weights.x(1);
    let m1 = m.scale_fun(&x1).at(0, 0).clone();
    let m2 = m.scale_fun(&x2).at(0, 0).clone();
    let inv = |fun: &RatFun| fun.inv_with_roots(&weights.points).map_err(|e| e.to_string());
    // Chart 1: N_0 = (M_1 - 1/3)/x_1, N_1 = 1 + M_1 - 2/7.
    let n0 = m1.sub(&RatFun::constant(g(1, 3))).mul(&inv(&x1)?);
    let n1 = RatFun::one().add(&m1).sub(&RatFun::constant(g(2, 7)));
    if sec.charts[0][0].at(0, 0) != &n0 || sec.charts[0][1].at(0, 0) != &n1 {
        return Err("chart-1 scalar closed forms differ".into());
    }
    // Chart 2: N_0 = M_2 - 1/5, N_1 = (M_2 + 1/3)/x_2.
    let n0 = m2.sub(&RatFun::constant(g(1, 5)));
    let n1 = m2.add(&RatFun::constant(g(1, 3))).mul(&inv(&x2)?);
    if sec.charts[1][0].at(0, 0) != &n0 || sec.charts[1][1].at(0, 0) != &n1 {
        return Err("chart-2 scalar closed forms differ".into());
    }
    Ok(())
}

/// Normalization: the deformation scalars are normalization-invariant, and
/// adding the explicit scalar form with residues `c_i` carries valid
/// sections to valid sections.
pub fn suite_normalization(seed: u64, count: usize, jobs: usize) -> SuiteResult {
    run_indexed("normalization", count, jobs, |idx| {
        let t = generate(idx, seed ^ 0x0b0e)?;
        let (zn, c) = normalize_zeta(&t.zeta);
        if zeta_to_lambda(&zn) != zeta_to_lambda(&t.zeta) {
            return Err("lambda changes under normalization".into());
        }
        let f_shifted = add_scalar_form(&t.connection(), &c);
        let zc = check_zeta_condition(&f_shifted, &t.flags, &zn);
        if !zc.ok() {
            return Err(format!("shifted connection violates the condition: {zc}"));
        }
        let s = parabolic_to_sheaf(t.rank, &t.flags, &t.weights).map_err(|e| e.to_string())?;
        let sec = connection_to_section(&t.flags, &t.weights, &zn, &f_shifted)
            .map_err(|e| e.to_string())?;
        let v = verify_section(&s, &zn, &sec);
        if !v.ok() {
            return Err(v.to_string());
        }
        let (back, _) = section_to_connection(&s, &zn, &sec).map_err(|e| e.to_string())?;
        if back != f_shifted {
            return Err("normalized section does not return the shifted form".into());
        }
        Ok(())
    })
}

/// Runs every suite with the default instance counts scaled by `count`.
pub fn run_all(seed: u64, count: usize, jobs: usize) -> Vec<SuiteResult> {
    let big = count.max(1) * 4;
    let small = count.max(1) * 2;
    vec![
        suite_sheaf_calculus(seed, big.max(100), jobs),
        suite_extension(seed, big.max(100), jobs),
        suite_worked_instance(),
        suite_bijection(seed, small.max(50), jobs),
        suite_correspondence(seed, small.max(50), jobs),
        suite_degenerate(seed),
        suite_normalization(seed, count.max(20), jobs),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_deterministic_and_jobs_independent() {
        let a = suite_bijection(7, 6, 1);
        let b = suite_bijection(7, 6, 3);
        assert_eq!(a.passed, b.passed);
        assert_eq!(a.total, b.total);
        assert_eq!(a.failures, b.failures);
        assert_eq!(a.summary(), b.summary());
    }

    #[test]
    fn failures_are_indexed_in_order() {
        // A suite with deliberate failures reports them sorted by instance.
        let r = run_indexed("toy", 7, 3, |idx| {
            if idx % 2 == 0 {
                Err(format!("even {idx}"))
            } else {
                Ok(())
            }
        });
        assert_eq!(r.passed, 3);
        let idxs: Vec<usize> = r.failures.iter().map(|(i, _)| *i).collect();
        assert_eq!(idxs, vec![0, 2, 4, 6]);
    }
}
