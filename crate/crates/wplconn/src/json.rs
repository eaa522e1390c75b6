//! JSON encodings of every domain value.
//!
//! Exactness is the contract: rationals travel as decimal strings `"p/q"`
//! (or `"p"`), Gaussian rationals as `{"re","im"}` objects, polynomials as
//! coefficient arrays with the constant term first, rational functions as
//! `{num, den:[{root, mult}]}`. Chart indices in the wire format are
//! one-based, matching the usual notation; internally everything is
//! zero-based.

use crate::bridge::FuchsianTuple;
use crate::conn::{ConnectionSection, FuchsianConnection, ZetaData};
use crate::flag::Flag;
use crate::matrix::{QMat, RatMat};
use crate::poly::Poly;
use crate::quiver::{Arrow, DoubledRep, LambdaVec, Quiver};
use crate::ratfun::{Chart, RatFun};
use crate::report::Diagnostics;
use crate::scalar::{parse_rat, GaussRat};
use crate::sheaf::{Cycle, PatchedSheaf, SheafMorphism, WeightData};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("malformed input: {0}")]
pub struct JsonError(pub String);

type R<T> = Result<T, JsonError>;

fn bad(msg: impl Into<String>) -> JsonError {
    JsonError(msg.into())
}

fn field<'a>(v: &'a Value, name: &str) -> R<&'a Value> {
    v.get(name).ok_or_else(|| bad(format!("missing field {name:?}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> R<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn as_usize(v: &Value, what: &str) -> R<usize> {
    v.as_u64().map(|u| u as usize).ok_or_else(|| bad(format!("{what} must be a nonnegative integer")))
}

pub fn gauss_to_json(g: &GaussRat) -> Value {
    json!({ "re": g.re.to_string(), "im": g.im.to_string() })
}

pub fn gauss_from_json(v: &Value) -> R<GaussRat> {
    // Accept both the {re, im} object and a bare rational string.
    if let Some(s) = v.as_str() {
        return Ok(GaussRat::from_rat(parse_rat(s).map_err(bad)?));
    }
    let re = field(v, "re")?.as_str().ok_or_else(|| bad("re must be a string"))?;
    let im = field(v, "im")?.as_str().ok_or_else(|| bad("im must be a string"))?;
    Ok(GaussRat::new(parse_rat(re).map_err(bad)?, parse_rat(im).map_err(bad)?))
}

pub fn poly_to_json(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(gauss_to_json).collect())
}

pub fn poly_from_json(v: &Value) -> R<Poly> {
    let arr = as_array(v, "polynomial")?;
    Ok(Poly::new(arr.iter().map(gauss_from_json).collect::<R<Vec<_>>>()?))
}

pub fn ratfun_to_json(f: &RatFun) -> Value {
    let den: Vec<Value> = f
        .den_factors()
        .iter()
        .map(|(root, mult)| json!({ "root": gauss_to_json(root), "mult": mult }))
        .collect();
    json!({ "num": poly_to_json(f.num()), "den": den })
}

pub fn ratfun_from_json(v: &Value, chart: Chart) -> R<RatFun> {
    let num = poly_from_json(field(v, "num")?)?;
    let mut den = BTreeMap::new();
    for item in as_array(field(v, "den")?, "den")? {
        let root = gauss_from_json(field(item, "root")?)?;
        let mult = as_usize(field(item, "mult")?, "mult")? as u32;
        *den.entry(root).or_insert(0) += mult;
    }
    Ok(RatFun::new(num, den, chart))
}

pub fn qmat_to_json(m: &QMat) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array((0..m.cols()).map(|c| gauss_to_json(m.at(r, c))).collect()))
            .collect(),
    )
}

/// Parses `[[GaussRat]]`; `cols` disambiguates an empty row list.
pub fn qmat_from_json(v: &Value, rows_hint: Option<usize>, cols_hint: Option<usize>) -> R<QMat> {
    let rows = as_array(v, "matrix")?;
    if rows.is_empty() {
        return Ok(QMat::zeros(rows_hint.unwrap_or(0), cols_hint.unwrap_or(0)));
    }
    let mut data = Vec::with_capacity(rows.len());
    for row in rows {
        let row = as_array(row, "matrix row")?;
        data.push(row.iter().map(gauss_from_json).collect::<R<Vec<_>>>()?);
    }
    if data.iter().any(|r| r.len() != data[0].len()) {
        return Err(bad("ragged matrix"));
    }
    if data[0].is_empty() {
        return Ok(QMat::zeros(data.len(), cols_hint.unwrap_or(0)));
    }
    Ok(QMat::from_rows(data))
}

pub fn ratmat_to_json(m: &RatMat) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array((0..m.cols()).map(|c| ratfun_to_json(m.at(r, c))).collect()))
            .collect(),
    )
}

pub fn ratmat_from_json(v: &Value, chart: Chart) -> R<RatMat> {
    let rows = as_array(v, "matrix")?;
    let mut data = Vec::with_capacity(rows.len());
    for row in rows {
        let row = as_array(row, "matrix row")?;
        data.push(
            row.iter()
                .map(|e| ratfun_from_json(e, chart))
                .collect::<R<Vec<_>>>()?,
        );
    }
    if data.is_empty() || data.iter().any(|r| r.len() != data[0].len()) {
        return Err(bad("empty or ragged matrix"));
    }
    Ok(RatMat::from_rows(data))
}

pub fn weights_to_json(w: &WeightData) -> Value {
    Value::Array(
        w.points
            .iter()
            .zip(&w.weights)
            .map(|(p, &wi)| json!({ "point": gauss_to_json(p), "w": wi }))
            .collect(),
    )
}

pub fn weights_from_json(v: &Value) -> R<WeightData> {
    let arr = as_array(v, "weights")?;
    let mut points = Vec::with_capacity(arr.len());
    let mut weights = Vec::with_capacity(arr.len());
    for item in arr {
        points.push(gauss_from_json(field(item, "point")?)?);
        weights.push(as_usize(field(item, "w")?, "w")?);
    }
    WeightData::new(points, weights).map_err(|e| bad(e.to_string()))
}

pub fn sheaf_to_json(s: &PatchedSheaf) -> Value {
    let cycles: Vec<Value> = s
        .cycles
        .iter()
        .map(|c| {
            json!({
                "chart": c.chart + 1,
                "mats": c.mats.iter().map(ratmat_to_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut patching = Vec::new();
    for i in 0..s.k() {
        for j in 0..s.k() {
            if i != j {
                patching.push(json!({ "i": i + 1, "j": j + 1, "mat": ratmat_to_json(s.g(i, j)) }));
            }
        }
    }
    json!({
        "weights": weights_to_json(&s.weights),
        "rank": s.rank,
        "cycles": cycles,
        "patching": patching,
    })
}

pub fn sheaf_from_json(v: &Value) -> R<PatchedSheaf> {
    let weights = weights_from_json(field(v, "weights")?)?;
    let rank = as_usize(field(v, "rank")?, "rank")?;
    let k = weights.k();
    let mut cycles: Vec<Option<Cycle>> = vec![None; k];
    for item in as_array(field(v, "cycles")?, "cycles")? {
        let chart = as_usize(field(item, "chart")?, "chart")?;
        if chart == 0 || chart > k {
            return Err(bad(format!("chart index {chart} out of range 1..={k}")));
        }
        let mats = as_array(field(item, "mats")?, "mats")?
            .iter()
            .map(|m| ratmat_from_json(m, Chart::Affine(chart - 1)))
            .collect::<R<Vec<_>>>()?;
        cycles[chart - 1] = Some(Cycle { chart: chart - 1, rank, mats });
    }
    let cycles = cycles
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| bad(format!("missing cycle for chart {}", i + 1))))
        .collect::<R<Vec<_>>>()?;
    let mut patching: Vec<Vec<Option<RatMat>>> = vec![vec![None; k]; k];
    for item in as_array(field(v, "patching")?, "patching")? {
        let i = as_usize(field(item, "i")?, "i")?;
        let j = as_usize(field(item, "j")?, "j")?;
        if i == 0 || j == 0 || i > k || j > k || i == j {
            return Err(bad(format!("bad patching pair ({i},{j})")));
        }
        patching[i - 1][j - 1] = Some(ratmat_from_json(field(item, "mat")?, Chart::Overlap)?);
    }
    Ok(PatchedSheaf { weights, rank, cycles, patching })
}

pub fn morphism_to_json(f: &SheafMorphism) -> Value {
    Value::Array(
        f.comps
            .iter()
            .enumerate()
            .map(|(i, mats)| {
                json!({ "chart": i + 1, "mats": mats.iter().map(ratmat_to_json).collect::<Vec<_>>() })
            })
            .collect(),
    )
}

pub fn zeta_to_json(z: &ZetaData) -> Value {
    json!({
        "points": z.points.iter().map(gauss_to_json).collect::<Vec<_>>(),
        "zeta": z
            .table
            .iter()
            .map(|row| Value::Array(row.iter().map(gauss_to_json).collect()))
            .collect::<Vec<_>>(),
    })
}

pub fn zeta_from_json(v: &Value) -> R<ZetaData> {
    let points = as_array(field(v, "points")?, "points")?
        .iter()
        .map(gauss_from_json)
        .collect::<R<Vec<_>>>()?;
    let table = as_array(field(v, "zeta")?, "zeta")?
        .iter()
        .map(|row| as_array(row, "zeta row")?.iter().map(gauss_from_json).collect::<R<Vec<_>>>())
        .collect::<R<Vec<_>>>()?;
    if table.iter().any(|r| r.is_empty()) || table.len() != points.len() {
        return Err(bad("zeta table shape"));
    }
    Ok(ZetaData { points, table })
}

pub fn fuchsian_to_json(f: &FuchsianConnection) -> Value {
    json!({
        "points": f.points.iter().map(gauss_to_json).collect::<Vec<_>>(),
        "residues": f.residues.iter().map(qmat_to_json).collect::<Vec<_>>(),
    })
}

pub fn fuchsian_from_json(v: &Value) -> R<FuchsianConnection> {
    let points = as_array(field(v, "points")?, "points")?
        .iter()
        .map(gauss_from_json)
        .collect::<R<Vec<_>>>()?;
    let residues = as_array(field(v, "residues")?, "residues")?
        .iter()
        .map(|m| qmat_from_json(m, None, None))
        .collect::<R<Vec<_>>>()?;
    if residues.len() != points.len() {
        return Err(bad("one residue matrix per point"));
    }
    Ok(FuchsianConnection { points, residues })
}

pub fn section_to_json(s: &ConnectionSection) -> Value {
    Value::Array(
        s.charts
            .iter()
            .enumerate()
            .map(|(i, mats)| {
                json!({ "i": i + 1, "N": mats.iter().map(ratmat_to_json).collect::<Vec<_>>() })
            })
            .collect(),
    )
}

pub fn section_from_json(v: &Value, k: usize) -> R<ConnectionSection> {
    let arr = as_array(v, "section")?;
    let mut charts: Vec<Option<Vec<RatMat>>> = vec![None; k];
    for item in arr {
        let i = as_usize(field(item, "i")?, "i")?;
        if i == 0 || i > k {
            return Err(bad(format!("section chart {i} out of range")));
        }
        let mats = as_array(field(item, "N")?, "N")?
            .iter()
            .map(|m| ratmat_from_json(m, Chart::Affine(i - 1)))
            .collect::<R<Vec<_>>>()?;
        charts[i - 1] = Some(mats);
    }
    let charts = charts
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| bad(format!("missing section chart {}", i + 1))))
        .collect::<R<Vec<_>>>()?;
    Ok(ConnectionSection { charts })
}

/// Flags of one tuple: per point, the list of layer basis matrices. Layer
/// matrices may have zero columns; ambient dimension disambiguates them.
pub fn flags_to_json(flags: &[Flag]) -> Value {
    Value::Array(
        flags
            .iter()
            .map(|f| Value::Array(f.layers.iter().map(qmat_to_json).collect()))
            .collect(),
    )
}

pub fn flags_from_json(v: &Value, ambient: usize) -> R<Vec<Flag>> {
    as_array(v, "flags")?
        .iter()
        .map(|layers| {
            let layers = as_array(layers, "flag layers")?
                .iter()
                .map(|l| qmat_from_json(l, Some(ambient), Some(0)))
                .collect::<R<Vec<_>>>()?;
            Flag::new(ambient, layers).map_err(|e| bad(e.to_string()))
        })
        .collect()
}

pub fn quiver_to_json(q: &Quiver) -> Value {
    json!({
        "vertices": q.vertices.clone(),
        "arrows": q
            .arrows
            .iter()
            .map(|a| json!({ "t": &q.vertices[a.tail], "h": &q.vertices[a.head], "name": &a.name }))
            .collect::<Vec<_>>(),
    })
}

pub fn quiver_from_json(v: &Value) -> R<Quiver> {
    let vertices = as_array(field(v, "vertices")?, "vertices")?
        .iter()
        .map(|s| s.as_str().map(String::from).ok_or_else(|| bad("vertex name must be a string")))
        .collect::<R<Vec<_>>>()?;
    let mut arrows = Vec::new();
    for item in as_array(field(v, "arrows")?, "arrows")? {
        let t = field(item, "t")?.as_str().ok_or_else(|| bad("arrow tail"))?;
        let h = field(item, "h")?.as_str().ok_or_else(|| bad("arrow head"))?;
        let name = field(item, "name")?.as_str().ok_or_else(|| bad("arrow name"))?;
        let tail = vertices.iter().position(|x| x == t).ok_or_else(|| bad("unknown tail"))?;
        let head = vertices.iter().position(|x| x == h).ok_or_else(|| bad("unknown head"))?;
        arrows.push(Arrow { name: name.to_string(), tail, head });
    }
    Quiver::new(vertices, arrows).map_err(|e| bad(e.to_string()))
}

pub fn rep_to_json(q: &Quiver, rep: &DoubledRep) -> Value {
    let mut x = Map::new();
    let mut xs = Map::new();
    for (k, a) in q.arrows.iter().enumerate() {
        x.insert(a.name.clone(), qmat_to_json(&rep.x[k]));
        xs.insert(a.name.clone(), qmat_to_json(&rep.xstar[k]));
    }
    json!({ "dims": rep.dims.clone(), "X": Value::Object(x), "Xstar": Value::Object(xs) })
}

pub fn rep_from_json(v: &Value, q: &Quiver) -> R<DoubledRep> {
    let dims = as_array(field(v, "dims")?, "dims")?
        .iter()
        .map(|d| as_usize(d, "dim"))
        .collect::<R<Vec<_>>>()?;
    if dims.len() != q.vertices.len() {
        return Err(bad("dims length must match the vertex count"));
    }
    let xmap = field(v, "X")?.as_object().ok_or_else(|| bad("X must be an object"))?;
    let xsmap = field(v, "Xstar")?.as_object().ok_or_else(|| bad("Xstar must be an object"))?;
    let mut x = Vec::with_capacity(q.arrows.len());
    let mut xstar = Vec::with_capacity(q.arrows.len());
    for a in &q.arrows {
        let (dt, dh) = (dims[a.tail], dims[a.head]);
        let xv = xmap.get(&a.name).ok_or_else(|| bad(format!("missing X[{}]", a.name)))?;
        let xsv = xsmap.get(&a.name).ok_or_else(|| bad(format!("missing Xstar[{}]", a.name)))?;
        x.push(qmat_from_json(xv, Some(dh), Some(dt))?);
        xstar.push(qmat_from_json(xsv, Some(dt), Some(dh))?);
    }
    Ok(DoubledRep { dims, x, xstar })
}

pub fn lambda_to_json(q: &Quiver, l: &LambdaVec) -> Value {
    let mut m = Map::new();
    for (v, name) in q.vertices.iter().enumerate() {
        m.insert(name.clone(), gauss_to_json(&l.values[v]));
    }
    Value::Object(m)
}

pub fn lambda_from_json(v: &Value, q: &Quiver) -> R<LambdaVec> {
    let obj = v.as_object().ok_or_else(|| bad("lambda must be an object"))?;
    let values = q
        .vertices
        .iter()
        .map(|name| {
            obj.get(name)
                .ok_or_else(|| bad(format!("missing lambda for vertex {name}")))
                .and_then(gauss_from_json)
        })
        .collect::<R<Vec<_>>>()?;
    Ok(LambdaVec { values })
}

pub fn tuple_to_json(t: &FuchsianTuple) -> Value {
    json!({
        "points": t.weights.points.iter().map(gauss_to_json).collect::<Vec<_>>(),
        "weights": t.weights.weights.clone(),
        "rank": t.rank,
        "residues": t.residues.iter().map(qmat_to_json).collect::<Vec<_>>(),
        "flags": flags_to_json(&t.flags),
        "zeta": t.table_json(),
    })
}

impl FuchsianTuple {
    fn table_json(&self) -> Value {
        Value::Array(
            self.zeta
                .table
                .iter()
                .map(|row| Value::Array(row.iter().map(gauss_to_json).collect()))
                .collect(),
        )
    }
}

pub fn tuple_from_json(v: &Value) -> R<FuchsianTuple> {
    let points = as_array(field(v, "points")?, "points")?
        .iter()
        .map(gauss_from_json)
        .collect::<R<Vec<_>>>()?;
    let weights = as_array(field(v, "weights")?, "weights")?
        .iter()
        .map(|w| as_usize(w, "weight"))
        .collect::<R<Vec<_>>>()?;
    let weights = WeightData::new(points.clone(), weights).map_err(|e| bad(e.to_string()))?;
    let rank = as_usize(field(v, "rank")?, "rank")?;
    let residues = as_array(field(v, "residues")?, "residues")?
        .iter()
        .map(|m| qmat_from_json(m, Some(rank), Some(rank)))
        .collect::<R<Vec<_>>>()?;
    let flags = flags_from_json(field(v, "flags")?, rank)?;
    let table = as_array(field(v, "zeta")?, "zeta")?
        .iter()
        .map(|row| as_array(row, "zeta row")?.iter().map(gauss_from_json).collect::<R<Vec<_>>>())
        .collect::<R<Vec<_>>>()?;
    let zeta = ZetaData { points, table };
    Ok(FuchsianTuple { weights, rank, residues, flags, zeta })
}

pub fn diagnostics_to_json(d: &Diagnostics) -> Value {
    json!({ "ok": d.ok(), "failures": d.failures.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge;
    use crate::sheaf::parabolic_to_sheaf;
    use proptest::prelude::*;

    #[test]
    fn tuple_round_trip() {
        let t = bridge::worked_instance();
        let v = tuple_to_json(&t);
        let back = tuple_from_json(&v).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn sheaf_round_trip() {
        let t = bridge::worked_instance();
        let s = parabolic_to_sheaf(t.rank, &t.flags, &t.weights).unwrap();
        let v = sheaf_to_json(&s);
        let back = sheaf_from_json(&v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn section_and_zeta_round_trip() {
        let t = bridge::worked_instance();
        let s = parabolic_to_sheaf(t.rank, &t.flags, &t.weights).unwrap();
        let sec =
            crate::conn::connection_to_section(&t.flags, &t.weights, &t.zeta, &t.connection())
                .unwrap();
        let back = section_from_json(&section_to_json(&sec), s.k()).unwrap();
        assert_eq!(back, sec);
        let zback = zeta_from_json(&zeta_to_json(&t.zeta)).unwrap();
        assert_eq!(zback, t.zeta);
    }

    #[test]
    fn quiver_rep_lambda_round_trip() {
        let t = bridge::worked_instance();
        let (q, rep, lambda) = bridge::fuchs_to_rep(&t).unwrap();
        let qv = quiver_to_json(&q);
        let q2 = quiver_from_json(&qv).unwrap();
        assert_eq!(q2, q);
        let rep2 = rep_from_json(&rep_to_json(&q, &rep), &q).unwrap();
        assert_eq!(rep2, rep);
        let l2 = lambda_from_json(&lambda_to_json(&q, &lambda), &q).unwrap();
        assert_eq!(l2, lambda);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        // parse(print(x)) = x for scalars and rational functions.
        #[test]
        fn scalar_round_trip(a in -40i64..40, b in 1i64..12, c in -40i64..40, d in 1i64..12) {
            let g = GaussRat::new(crate::scalar::rat(a, b), crate::scalar::rat(c, d));
            let back = gauss_from_json(&gauss_to_json(&g)).unwrap();
            prop_assert_eq!(back, g);
        }

        #[test]
        fn ratfun_round_trip(c0 in -9i64..9, c1 in -9i64..9, m in 0u32..3) {
            let mut den = std::collections::BTreeMap::new();
            if m > 0 {
                den.insert(GaussRat::from_int(1), m);
            }
            let f = RatFun::new(
                Poly::new(vec![GaussRat::from_int(c0), GaussRat::from_int(c1)]),
                den,
                Chart::Overlap,
            );
            let back = ratfun_from_json(&ratfun_to_json(&f), Chart::Overlap).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
