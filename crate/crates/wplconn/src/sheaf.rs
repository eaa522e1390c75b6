//! Vector bundles on a weighted projective line as cycles plus patching.
//!
//! Storage conventions, used by everything downstream:
//!
//! * Chart `i` is the complement of the marked points other than `a_i` and of
//!   infinity; all charts share the global coordinate `z`, and `x_i = z - a_i`.
//! * A weight-`w` cycle at `a_i` of rank `n` is stored as `w` matrices
//!   `Φ_0, …, Φ_{w-1}` over the chart ring, `Φ_s` being the map from level
//!   `s+1` to level `s` in fixed bases. Indices extend to all of `ℤ`
//!   periodically: the twist identification of level `s ± w` with level `s`
//!   is trivialized by the generator `x_i`, so that the natural "drop one
//!   period" map is multiplication by `x_i` on coordinates and the cycle law
//!   reads `Φ_s Φ_{s+1} ⋯ Φ_{s+w-1} = x_i·Id` for every start `s`.
//! * Patching matrices `g_ij` translate chart-`j` level-0 coordinates to
//!   chart-`i` level-0 coordinates over the overlap ring and satisfy the
//!   cocycle law `g_ij g_jl = g_il` together with `g_ji = g_ij⁻¹`.
//!
//! Infinity is never marked: global objects are framed there implicitly, and
//! [`framed_degree`] is degree bookkeeping relative to that framing.

use crate::flag::{mat_image_mod_point, Flag, FlagError};
use crate::matrix::{pf_valuation_at, RatMat};
use crate::ratfun::{Chart, FunError, RatFun};
use crate::report::Diagnostics;
use crate::scalar::{rint, GaussRat, Rat};
#[cfg(test)]
use crate::matrix::QMat;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SheafError {
    #[error("need at least two marked points, got {0}")]
    TooFewPoints(usize),
    #[error("marked points must be pairwise distinct")]
    DuplicatePoint,
    #[error("weights must be at least 1")]
    BadWeight,
    #[error("expected {want} flags, got {got}")]
    FlagCount { want: usize, got: usize },
    #[error("flag at point {point}: expected weight {want}, got {got}")]
    FlagWeight { point: usize, want: usize, got: usize },
    #[error("shift vector length {got}, expected {want}")]
    ShiftLength { got: usize, want: usize },
    #[error("chart {chart}: {src}")]
    Chart { chart: usize, src: FunError },
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error(transparent)]
    Fun(#[from] FunError),
    #[error("invalid sheaf: {0}")]
    Invalid(String),
}

/// Marked points with their weights. Weight 1 is allowed and is the same as
/// the point not being marked.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightData {
    pub points: Vec<GaussRat>,
    pub weights: Vec<usize>,
}

impl WeightData {
    pub fn new(points: Vec<GaussRat>, weights: Vec<usize>) -> Result<Self, SheafError> {
        if points.len() < 2 || points.len() != weights.len() {
            return Err(SheafError::TooFewPoints(points.len()));
        }
        for (a, p) in points.iter().enumerate() {
            if points[a + 1..].iter().any(|q| q == p) {
                return Err(SheafError::DuplicatePoint);
            }
        }
        if weights.contains(&0) {
            return Err(SheafError::BadWeight);
        }
        Ok(WeightData { points, weights })
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    /// The local coordinate `x_i = z - a_i`.
    pub fn x(&self, i: usize) -> RatFun {
        RatFun::x_minus(&self.points[i])
    }
}

/// One chart's cycle: `w` square matrices over the chart ring, periodic by
/// storage, with period product `x_i·Id`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    pub chart: usize,
    pub rank: usize,
    pub mats: Vec<RatMat>,
}

impl Cycle {
    pub fn weight(&self) -> usize {
        self.mats.len()
    }

    /// `Φ_s` for any integer `s`, via periodic storage.
    pub fn mat_at(&self, s: i64) -> &RatMat {
        let w = self.mats.len() as i64;
        &self.mats[(s.rem_euclid(w)) as usize]
    }

    /// `Φ_start · Φ_{start+1} ⋯ Φ_{start+len-1}` (empty product = identity).
    pub fn product_from(&self, start: i64, len: usize) -> RatMat {
        let mut acc = RatMat::identity(self.rank);
        for t in 0..len as i64 {
            acc = acc.mul(self.mat_at(start + t));
        }
        acc
    }

    /// Derivative-twist matrix `C_s = Φ_{s+1} ⋯ Φ_{s+w-1}`, the coordinate
    /// form of `e ↦ (composition of all other cycle maps)(x_i ⊗ e)`. It
    /// satisfies `Φ_s C_s = C_s Φ_s = x_i·Id`.
    pub fn c_mat(&self, s: i64) -> RatMat {
        self.product_from(s + 1, self.weight() - 1)
    }
}

/// A vector bundle: one cycle per chart plus overlap patching matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchedSheaf {
    pub weights: WeightData,
    pub rank: usize,
    pub cycles: Vec<Cycle>,
    /// `patching[i][j]` is `g_ij` for `i != j`, `None` on the diagonal.
    pub patching: Vec<Vec<Option<RatMat>>>,
}

impl PatchedSheaf {
    pub fn g(&self, i: usize, j: usize) -> &RatMat {
        self.patching[i][j].as_ref().expect("diagonal patching entry")
    }

    pub fn k(&self) -> usize {
        self.weights.k()
    }
}

/// Morphism data between two sheaves of the same weight type: per chart, per
/// level matrices, periodic by storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SheafMorphism {
    /// `comps[i][s]`: level-`s` component on chart `i`, target-rank × source-rank.
    pub comps: Vec<Vec<RatMat>>,
}

impl SheafMorphism {
    pub fn identity(s: &PatchedSheaf) -> Self {
        SheafMorphism {
            comps: s
                .weights
                .weights
                .iter()
                .map(|&w| vec![RatMat::identity(s.rank); w])
                .collect(),
        }
    }

    pub fn scalar(s: &PatchedSheaf, c: &GaussRat) -> Self {
        let m = RatMat::scalar(s.rank, &RatFun::constant(c.clone()));
        SheafMorphism {
            comps: s.weights.weights.iter().map(|&w| vec![m.clone(); w]).collect(),
        }
    }

    pub fn comp_at(&self, i: usize, s: i64) -> &RatMat {
        let w = self.comps[i].len() as i64;
        &self.comps[i][s.rem_euclid(w) as usize]
    }
}

/// Cycle sanity: square matrices of the stated rank, legal pole support, the
/// period-product law from every start, and unit-times-`x_i^m` determinants.
pub fn check_cycle(cycle: &Cycle, weights: &WeightData) -> Diagnostics {
    let mut d = Diagnostics::new(format!("cycle at chart {}", cycle.chart));
    let i = cycle.chart;
    let w = weights.weights[i];
    let n = cycle.rank;
    if cycle.mats.len() != w {
        d.fail(format!("expected {w} matrices, got {}", cycle.mats.len()));
        return d;
    }
    for (s, m) in cycle.mats.iter().enumerate() {
        if m.rows() != n || m.cols() != n {
            d.fail(format!("matrix {s} is {}x{}, expected {n}x{n}", m.rows(), m.cols()));
            return d;
        }
        if !m.poles_legal(&weights.points, Chart::Affine(i)) {
            d.fail(format!("matrix {s} has an illegal pole for chart {i}"));
        }
    }
    // One period product suffices: if Φ_s·(Φ_{s+1}⋯Φ_{s+w-1}) = x·Id then
    // the reversed order is x·Id too (AB = cI forces BA = cI over the
    // fraction field), and by induction every cyclic start follows. The same
    // product law makes every det(Φ_s) a divisor of x^w·(units) in the chart
    // ring, which is a PID, so the determinants are units times powers of
    // x_i without a separate check; pole legality was verified above.
    let x_id = RatMat::scalar(n, &weights.x(i));
    if cycle.product_from(0, w) != x_id {
        // All starts stand or fall together, so the first failing level is 0.
        d.fail(format!("period product starting at level 0 is not x_{i}·Id"));
    }
    d
}

/// Full sheaf validity: every cycle, patching presence and legality, the
/// cocycle law, and `g_ji = g_ij⁻¹`.
pub fn check_sheaf(s: &PatchedSheaf) -> Diagnostics {
    let mut d = Diagnostics::new("sheaf");
    let k = s.k();
    if s.cycles.len() != k {
        d.fail(format!("expected {k} cycles, got {}", s.cycles.len()));
        return d;
    }
    for (i, cy) in s.cycles.iter().enumerate() {
        if cy.chart != i {
            d.fail(format!("cycle {i} is labelled chart {}", cy.chart));
        }
        if cy.rank != s.rank {
            d.fail(format!("cycle {i} has rank {}, sheaf has rank {}", cy.rank, s.rank));
        }
        d.merge(check_cycle(cy, &s.weights));
    }
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let Some(g) = s.patching[i][j].as_ref() else {
                d.fail(format!("missing patching matrix g_{i}{j}"));
                continue;
            };
            if g.rows() != s.rank || g.cols() != s.rank {
                d.fail(format!("g_{i}{j} has wrong shape"));
                continue;
            }
            if !g.poles_legal(&s.weights.points, Chart::Overlap) {
                d.fail(format!("g_{i}{j} has a pole outside the marked points"));
            }
        }
    }
    if !d.ok() {
        return d;
    }
    // g_ij·g_ji = Id with legal entries on both sides already forces every
    // determinant to be a unit of the overlap ring (a zero off the marked
    // points would need a matching illegal pole in the partner), so no
    // separate determinant test is run. Likewise one orientation of each
    // cocycle triple generates the other five from the pair inverses.
    let id = RatMat::identity(s.rank);
    for i in 0..k {
        for j in i + 1..k {
            if s.g(i, j).mul(s.g(j, i)) != id {
                d.fail(format!("g_{i}{j}·g_{j}{i} != Id"));
            }
        }
    }
    if !d.ok() {
        return d;
    }
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                if s.g(i, j).mul(s.g(j, l)) != *s.g(i, l) {
                    d.fail(format!("cocycle g_{i}{j}·g_{j}{l} != g_{i}{l}"));
                }
            }
        }
    }
    d
}

/// Flag at each marked point: layer `s` is the image at `a_i` of
/// `Φ_0 ⋯ Φ_{s-1}`, so layer 0 is the full fibre and layer `w_i` is zero.
pub fn extract_flags(s: &PatchedSheaf) -> Result<Vec<Flag>, SheafError> {
    let mut flags = Vec::with_capacity(s.k());
    for (i, cy) in s.cycles.iter().enumerate() {
        let a = &s.weights.points[i];
        let w = cy.weight();
        let mut layers = Vec::with_capacity(w + 1);
        for lvl in 0..=w {
            let prod = cy.product_from(0, lvl);
            layers.push(
                mat_image_mod_point(&prod, a)
                    .map_err(|e| SheafError::Chart { chart: i, src: e })?,
            );
        }
        flags.push(Flag::new(s.rank, layers)?);
    }
    Ok(flags)
}

/// A parabolic bundle with trivial underlying bundle, as a sheaf.
///
/// Per chart, an adapted basis `B` is chosen so each basis vector carries a
/// level; the cycle matrices are the adapted diagonals `diag(x_i or 1)` with
/// the basis change folded into the boundary matrices, so that level 0 keeps
/// the global frame and all patching matrices are the identity.
pub fn parabolic_to_sheaf(
    n: usize,
    flags: &[Flag],
    weights: &WeightData,
) -> Result<PatchedSheaf, SheafError> {
    let k = weights.k();
    if flags.len() != k {
        return Err(SheafError::FlagCount { want: k, got: flags.len() });
    }
    let mut cycles = Vec::with_capacity(k);
    for (i, flag) in flags.iter().enumerate() {
        flag.validate()?;
        if flag.ambient != n {
            return Err(SheafError::Invalid(format!(
                "flag at point {i} has ambient {}, expected {n}",
                flag.ambient
            )));
        }
        let w = weights.weights[i];
        if flag.weight() != w {
            return Err(SheafError::FlagWeight { point: i, want: w, got: flag.weight() });
        }
        let x = weights.x(i);
        if w == 1 {
            cycles.push(Cycle { chart: i, rank: n, mats: vec![RatMat::scalar(n, &x)] });
            continue;
        }
        let (basis, sigma) = flag.adapted_basis();
        let diag = |lvl: usize| {
            RatMat::from_fn(n, n, |r, c| {
                if r != c {
                    RatFun::zero()
                } else if sigma[r] == lvl {
                    x.clone()
                } else {
                    RatFun::one()
                }
            })
        };
        let b = RatMat::constant(&basis);
        let b_inv = RatMat::constant(&basis.inverse().expect("adapted basis is invertible"));
        let mut mats = Vec::with_capacity(w);
        for lvl in 0..w {
            let mut m = diag(lvl);
            if lvl == 0 {
                m = b.mul(&m);
            }
            if lvl == w - 1 {
                m = m.mul(&b_inv);
            }
            mats.push(m);
        }
        cycles.push(Cycle { chart: i, rank: n, mats });
    }
    let patching = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { None } else { Some(RatMat::identity(n)) })
                .collect()
        })
        .collect();
    Ok(PatchedSheaf { weights: weights.clone(), rank: n, cycles, patching })
}

/// Matrix of the overlap-ring isomorphism from level 0 to level `-r` of a
/// cycle (composition of cycle maps for `r > 0`, inverted for `r < 0`).
fn transition(cycle: &Cycle, r: i64, weights: &WeightData) -> Result<RatMat, SheafError> {
    if r == 0 {
        return Ok(RatMat::identity(cycle.rank));
    }
    if r > 0 {
        return Ok(cycle.product_from(-r, r as usize));
    }
    let fwd = cycle.product_from(0, (-r) as usize);
    fwd.inverse_with_roots(&weights.points, Chart::Overlap)
        .map_err(|e| SheafError::Chart { chart: cycle.chart, src: e })
}

/// Inverse of [`transition`] without a detour through matrix inversion when
/// the sign makes it a plain product.
fn transition_inv(cycle: &Cycle, r: i64, weights: &WeightData) -> Result<RatMat, SheafError> {
    if r == 0 {
        return Ok(RatMat::identity(cycle.rank));
    }
    if r < 0 {
        return Ok(cycle.product_from(0, (-r) as usize));
    }
    let fwd = cycle.product_from(-r, r as usize);
    fwd.inverse_with_roots(&weights.points, Chart::Overlap)
        .map_err(|e| SheafError::Chart { chart: cycle.chart, src: e })
}

/// Shift by `r_i` at each point: cycle levels reindex by `s ↦ s - r_i` and the
/// patching is conjugated by the level-transition isomorphisms. Shifting by
/// zero is the identity on all stored matrices, and shifts add exactly.
pub fn shift_sheaf(s: &PatchedSheaf, r: &[i64]) -> Result<PatchedSheaf, SheafError> {
    let k = s.k();
    if r.len() != k {
        return Err(SheafError::ShiftLength { got: r.len(), want: k });
    }
    let mut cycles = Vec::with_capacity(k);
    for (i, cy) in s.cycles.iter().enumerate() {
        let w = cy.weight() as i64;
        let mats = (0..w).map(|t| cy.mat_at(t - r[i]).clone()).collect();
        cycles.push(Cycle { chart: i, rank: cy.rank, mats });
    }
    let mut patching: Vec<Vec<Option<RatMat>>> = vec![vec![None; k]; k];
    let trans: Vec<RatMat> = (0..k)
        .map(|i| transition(&s.cycles[i], r[i], &s.weights))
        .collect::<Result<_, _>>()?;
    let trans_inv: Vec<RatMat> = (0..k)
        .map(|i| transition_inv(&s.cycles[i], r[i], &s.weights))
        .collect::<Result<_, _>>()?;
    for (i, row) in patching.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            if i != j {
                *slot = Some(trans[i].mul(s.g(i, j)).mul(&trans_inv[j]));
            }
        }
    }
    Ok(PatchedSheaf { weights: s.weights.clone(), rank: s.rank, cycles, patching })
}

/// Tensor with the logarithmic 1-forms and apply the weight twist: chart `i`
/// level `s` of the result is level `s+1` of the input tensored with the
/// log-forms, trivialized by `dx_i/x_i`, so the cycle matrices rotate one
/// step and the patching picks up the form-translation factor `x_i/x_j`
/// conjugated through the level-0 maps.
pub fn twist_omega(s: &PatchedSheaf) -> Result<PatchedSheaf, SheafError> {
    let k = s.k();
    let mut cycles = Vec::with_capacity(k);
    for (i, cy) in s.cycles.iter().enumerate() {
        let w = cy.weight() as i64;
        let mats = (0..w).map(|t| cy.mat_at(t + 1).clone()).collect();
        cycles.push(Cycle { chart: i, rank: cy.rank, mats });
    }
    let phi0_inv: Vec<RatMat> = (0..k)
        .map(|i| {
            s.cycles[i]
                .mats[0]
                .inverse_with_roots(&s.weights.points, Chart::Overlap)
                .map_err(|e| SheafError::Chart { chart: i, src: e })
        })
        .collect::<Result<_, _>>()?;
    let mut patching: Vec<Vec<Option<RatMat>>> = vec![vec![None; k]; k];
    #[allow(clippy::needless_range_loop)]
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            // rho_ij = x_i / x_j translates the dx_j/x_j frame into dx_i/x_i.
            let rho = s
                .weights
                .x(i)
                .mul(&RatFun::inv_x_minus(&s.weights.points[j], Chart::Overlap));
            patching[i][j] = Some(
                phi0_inv[i]
                    .mul(s.g(i, j))
                    .mul(&s.cycles[j].mats[0])
                    .scale_fun(&rho),
            );
        }
    }
    Ok(PatchedSheaf { weights: s.weights.clone(), rank: s.rank, cycles, patching })
}

/// Morphism verification: componentwise shape and pole legality, the level
/// intertwining law (periodicity included by the cyclic wrap), and the
/// patching squares.
pub fn verify_morphism(src: &PatchedSheaf, dst: &PatchedSheaf, f: &SheafMorphism) -> Diagnostics {
    let mut d = Diagnostics::new("morphism");
    let k = src.k();
    if dst.k() != k || dst.weights.points != src.weights.points || dst.weights.weights != src.weights.weights {
        d.fail("source and target weight data differ");
        return d;
    }
    if f.comps.len() != k {
        d.fail(format!("expected {k} chart components, got {}", f.comps.len()));
        return d;
    }
    for i in 0..k {
        let w = src.weights.weights[i];
        if f.comps[i].len() != w {
            d.fail(format!("chart {i}: expected {w} levels, got {}", f.comps[i].len()));
            return d;
        }
        for (s, m) in f.comps[i].iter().enumerate() {
            if m.rows() != dst.rank || m.cols() != src.rank {
                d.fail(format!("chart {i} level {s}: component has wrong shape"));
                return d;
            }
            if !m.poles_legal(&src.weights.points, Chart::Affine(i)) {
                d.fail(format!("chart {i} level {s}: illegal pole"));
            }
        }
        for s in 0..w as i64 {
            let lhs = dst.cycles[i].mat_at(s).mul(f.comp_at(i, s + 1));
            let rhs = f.comp_at(i, s).mul(src.cycles[i].mat_at(s));
            if lhs != rhs {
                d.fail(format!("chart {i}: intertwining fails at level {s}"));
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let lhs = dst.g(i, j).mul(&f.comps[j][0]);
            let rhs = f.comps[i][0].mul(src.g(i, j));
            if lhs != rhs {
                d.fail(format!("patching square fails for ({i},{j})"));
            }
        }
    }
    d
}

/// Degree bookkeeping relative to the implicit framing at infinity, chart 0
/// as reference: marked-point valuations of the reference patching
/// determinants plus the weighted valuation content of the cycles. Shifts
/// change it by `rank·Σ r_i/w_i` and the omega twist by
/// `rank·Σ (w_i-1)/w_i` (the remaining `-2·rank` of the twist lives in the
/// frame change at infinity, which the charts never see).
pub fn framed_degree(s: &PatchedSheaf) -> Result<Rat, SheafError> {
    let k = s.k();
    let mut deg = Rat::new(0.into(), 1.into());
    let val = |m: &RatMat, p: &GaussRat| -> Result<i64, SheafError> {
        let det = m.det_pf();
        if det.num.is_zero() {
            return Err(SheafError::Invalid("singular patching matrix".into()));
        }
        Ok(pf_valuation_at(&det, p))
    };
    if k > 1 {
        deg += rint(val(s.g(0, 1), &s.weights.points[0])?);
        for j in 1..k {
            deg += rint(val(s.g(j, 0), &s.weights.points[j])?);
        }
    }
    for (i, cy) in s.cycles.iter().enumerate() {
        let w = cy.weight();
        let mut acc = Rat::new(0.into(), 1.into());
        for lvl in 1..w {
            let det = cy.mats[lvl].det_pf();
            if det.num.is_zero() {
                return Err(SheafError::Invalid("singular cycle matrix".into()));
            }
            acc += rint(lvl as i64) * rint(pf_valuation_at(&det, &s.weights.points[i]));
        }
        deg += acc / rint(w as i64);
    }
    Ok(deg)
}

/// Degree drop of the omega twist on the completed line: the data-level gain
/// `Σ (w_i-1)/w_i` per rank minus the 2 per rank carried at infinity.
pub fn omega_degree_shift(weights: &WeightData, rank: usize) -> Rat {
    let mut acc = Rat::new(0.into(), 1.into());
    for &w in &weights.weights {
        acc += Rat::new((w as i64 - 1).into(), (w as i64).into());
    }
    (acc - rint(2)) * rint(rank as i64)
}
