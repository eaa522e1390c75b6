//! Name-dispatched command layer: JSON value in, JSON value out. The
//! command-line binary and the C ABI are both thin wrappers around [`eval`].

use crate::conn::ZetaData;
use crate::json as wj;
use crate::report::Diagnostics;
use crate::sheaf::WeightData;
use serde_json::{json, Map, Value};

/// Options shared by the seeded commands.
#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub seed: u64,
    pub count: usize,
    pub jobs: usize,
    pub retries: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { seed: 1, count: 1, jobs: 1, retries: 40 }
    }
}

/// Result payload plus the pass/fail verdict that drives the exit code.
#[derive(Clone, Debug)]
pub struct CommandOutcome {
    pub value: Value,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub enum CommandError {
    /// Mathematically meaningful failure (exit code 1); may carry payload.
    Domain(String, Option<Value>),
    /// Unreadable or ill-formed input (exit code 2).
    Input(String),
    /// No such command.
    UnknownCommand(String),
}

impl From<wj::JsonError> for CommandError {
    fn from(e: wj::JsonError) -> Self {
        CommandError::Input(e.to_string())
    }
}

pub const COMMANDS: &[&str] = &[
    "check-sheaf",
    "flags",
    "shift",
    "twist-omega",
    "build-dzeta",
    "verify-section",
    "section2conn",
    "conn2section",
    "residue-tower",
    "check-zeta",
    "star-quiver",
    "zeta2lambda",
    "moment-defect",
    "fuchs2rep",
    "rep2fuchs",
    "gen-instance",
    "selftest",
];

type R<T> = Result<T, CommandError>;

fn need(input: Option<&Value>) -> R<&Value> {
    input.ok_or_else(|| CommandError::Input("this command needs input JSON".into()))
}

fn get<'a>(v: &'a Value, name: &str) -> R<&'a Value> {
    v.get(name)
        .ok_or_else(|| CommandError::Input(format!("missing field {name:?}")))
}

fn domain(e: impl std::fmt::Display) -> CommandError {
    CommandError::Domain(e.to_string(), None)
}

fn diag(d: &Diagnostics) -> CommandOutcome {
    CommandOutcome { value: wj::diagnostics_to_json(d), ok: d.ok() }
}

fn parse_flag_dims(v: &Value) -> R<Vec<Vec<usize>>> {
    v.as_array()
        .ok_or_else(|| CommandError::Input("flag_dims must be an array".into()))?
        .iter()
        .map(|arm| {
            arm.as_array()
                .ok_or_else(|| CommandError::Input("flag_dims arms must be arrays".into()))?
                .iter()
                .map(|d| {
                    d.as_u64()
                        .map(|u| u as usize)
                        .ok_or_else(|| CommandError::Input("flag dims must be integers".into()))
                })
                .collect()
        })
        .collect()
}

fn parse_rank(v: &Value) -> R<usize> {
    get(v, "rank")?
        .as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| CommandError::Input("rank must be an integer".into()))
}

/// Runs one named command. `input` carries the parsed JSON for every command
/// except `selftest`, which takes none.
pub fn eval(command: &str, input: Option<&Value>, opts: &EvalOptions) -> R<CommandOutcome> {
    match command {
        "check-sheaf" => {
            let s = wj::sheaf_from_json(need(input)?)?;
            Ok(diag(&crate::sheaf::check_sheaf(&s)))
        }
        "flags" => {
            let s = wj::sheaf_from_json(need(input)?)?;
            let d = crate::sheaf::check_sheaf(&s);
            if !d.ok() {
                return Err(CommandError::Domain(
                    "invalid sheaf".into(),
                    Some(wj::diagnostics_to_json(&d)),
                ));
            }
            let flags = crate::sheaf::extract_flags(&s).map_err(domain)?;
            Ok(CommandOutcome {
                value: json!({ "ok": true, "flags": wj::flags_to_json(&flags) }),
                ok: true,
            })
        }
        "shift" => {
            let v = need(input)?;
            let s = wj::sheaf_from_json(get(v, "sheaf")?)?;
            let r: Vec<i64> = get(v, "r")?
                .as_array()
                .ok_or_else(|| CommandError::Input("r must be an array of integers".into()))?
                .iter()
                .map(|x| {
                    x.as_i64()
                        .ok_or_else(|| CommandError::Input("r entries must be integers".into()))
                })
                .collect::<R<_>>()?;
            let out = crate::sheaf::shift_sheaf(&s, &r).map_err(domain)?;
            Ok(CommandOutcome { value: wj::sheaf_to_json(&out), ok: true })
        }
        "twist-omega" => {
            let s = wj::sheaf_from_json(need(input)?)?;
            let out = crate::sheaf::twist_omega(&s).map_err(domain)?;
            Ok(CommandOutcome { value: wj::sheaf_to_json(&out), ok: true })
        }
        "build-dzeta" => {
            let v = need(input)?;
            let s = wj::sheaf_from_json(get(v, "sheaf")?)?;
            let zeta = wj::zeta_from_json(get(v, "zeta")?)?;
            let dz = crate::conn::build_dzeta(&s, &zeta).map_err(domain)?;
            let d = crate::conn::dzeta_check(&dz);
            let value = json!({
                "ok": d.ok(),
                "sheaf": wj::sheaf_to_json(&dz.sheaf),
                "omega": wj::sheaf_to_json(&dz.omega),
                "inclusion": wj::morphism_to_json(&dz.inclusion),
                "projection": wj::morphism_to_json(&dz.projection),
                "zeta_normalized": wj::zeta_to_json(&dz.zeta),
                "zeta_shift": dz.zeta_shift.iter().map(wj::gauss_to_json).collect::<Vec<_>>(),
                "failures": d.failures,
            });
            Ok(CommandOutcome { value, ok: d.ok() })
        }
        "verify-section" => {
            let v = need(input)?;
            let s = wj::sheaf_from_json(get(v, "sheaf")?)?;
            let zeta = wj::zeta_from_json(get(v, "zeta")?)?;
            let sec = wj::section_from_json(get(v, "section")?, s.k())?;
            Ok(diag(&crate::conn::verify_section(&s, &zeta, &sec)))
        }
        "section2conn" => {
            let v = need(input)?;
            let s = wj::sheaf_from_json(get(v, "sheaf")?)?;
            let zeta = wj::zeta_from_json(get(v, "zeta")?)?;
            let sec = wj::section_from_json(get(v, "section")?, s.k())?;
            let (f, flags) = crate::conn::section_to_connection(&s, &zeta, &sec).map_err(domain)?;
            Ok(CommandOutcome {
                value: json!({
                    "ok": true,
                    "connection": wj::fuchsian_to_json(&f),
                    "flags": wj::flags_to_json(&flags),
                }),
                ok: true,
            })
        }
        "conn2section" => {
            let v = need(input)?;
            let weights = wj::weights_from_json(get(v, "weights")?)?;
            let f = wj::fuchsian_from_json(get(v, "connection")?)?;
            let flags = wj::flags_from_json(get(v, "flags")?, f.rank())?;
            let zeta = wj::zeta_from_json(get(v, "zeta")?)?;
            let sec =
                crate::conn::connection_to_section(&flags, &weights, &zeta, &f).map_err(domain)?;
            Ok(CommandOutcome {
                value: json!({ "ok": true, "section": wj::section_to_json(&sec) }),
                ok: true,
            })
        }
        "residue-tower" => {
            let v = need(input)?;
            let s = wj::sheaf_from_json(get(v, "sheaf")?)?;
            let zeta = wj::zeta_from_json(get(v, "zeta")?)?;
            let sec = wj::section_from_json(get(v, "section")?, s.k())?;
            let tower = crate::conn::residue_tower(&s, &zeta, &sec).map_err(domain)?;
            let maps: Vec<Value> = tower
                .maps
                .iter()
                .map(|per_chart| Value::Array(per_chart.iter().map(wj::qmat_to_json).collect()))
                .collect();
            let value = json!({
                "ok": tower.report.ok(),
                "maps": maps,
                "residues": tower.residues.iter().map(wj::qmat_to_json).collect::<Vec<_>>(),
                "failures": tower.report.failures,
            });
            Ok(CommandOutcome { value, ok: tower.report.ok() })
        }
        "check-zeta" => {
            let v = need(input)?;
            let f = wj::fuchsian_from_json(get(v, "connection")?)?;
            let flags = wj::flags_from_json(get(v, "flags")?, f.rank())?;
            let zeta = wj::zeta_from_json(get(v, "zeta")?)?;
            Ok(diag(&crate::conn::check_zeta_condition(&f, &flags, &zeta)))
        }
        "star-quiver" => {
            let v = need(input)?;
            let weights = wj::weights_from_json(get(v, "weights")?)?;
            let rank = parse_rank(v)?;
            let dims = parse_flag_dims(get(v, "flag_dims")?)?;
            let (q, d) = crate::quiver::star_quiver(&weights, rank, &dims).map_err(domain)?;
            Ok(CommandOutcome {
                value: json!({ "ok": true, "quiver": wj::quiver_to_json(&q), "dims": d }),
                ok: true,
            })
        }
        "zeta2lambda" => {
            let zeta: ZetaData = wj::zeta_from_json(need(input)?)?;
            let weights =
                WeightData::new(zeta.points.clone(), zeta.table.iter().map(Vec::len).collect())
                    .map_err(|e| CommandError::Input(e.to_string()))?;
            let dims: Vec<Vec<usize>> = weights.weights.iter().map(|&w| vec![0; w - 1]).collect();
            let (q, _) = crate::quiver::star_quiver(&weights, 0, &dims).map_err(domain)?;
            let lambda = crate::quiver::zeta_to_lambda(&zeta);
            Ok(CommandOutcome {
                value: json!({ "ok": true, "lambda": wj::lambda_to_json(&q, &lambda) }),
                ok: true,
            })
        }
        "moment-defect" => {
            let v = need(input)?;
            let q = wj::quiver_from_json(get(v, "quiver")?)?;
            let rep = wj::rep_from_json(get(v, "rep")?, &q)?;
            let lambda = wj::lambda_from_json(get(v, "lambda")?, &q)?;
            let defects = crate::quiver::moment_defect(&q, &rep, &lambda).map_err(domain)?;
            let all_zero = defects.iter().all(|m| m.is_zero());
            let mut obj = Map::new();
            for (v_idx, m) in defects.iter().enumerate() {
                obj.insert(q.vertices[v_idx].clone(), wj::qmat_to_json(m));
            }
            Ok(CommandOutcome {
                value: json!({ "ok": all_zero, "defects": Value::Object(obj) }),
                ok: all_zero,
            })
        }
        "fuchs2rep" => {
            let t = wj::tuple_from_json(need(input)?)?;
            let (q, rep, lambda) = crate::bridge::fuchs_to_rep(&t).map_err(domain)?;
            Ok(CommandOutcome {
                value: json!({
                    "ok": true,
                    "quiver": wj::quiver_to_json(&q),
                    "rep": wj::rep_to_json(&q, &rep),
                    "lambda": wj::lambda_to_json(&q, &lambda),
                }),
                ok: true,
            })
        }
        "rep2fuchs" => {
            let v = need(input)?;
            let q = wj::quiver_from_json(get(v, "quiver")?)?;
            let rep = wj::rep_from_json(get(v, "rep")?, &q)?;
            let lambda = wj::lambda_from_json(get(v, "lambda")?, &q)?;
            let zeta = wj::zeta_from_json(get(v, "zeta")?)?;
            let weights = wj::weights_from_json(get(v, "weights")?)?;
            let out =
                crate::bridge::rep_to_fuchs(&q, &rep, &lambda, &zeta, &weights).map_err(domain)?;
            Ok(CommandOutcome {
                value: json!({
                    "ok": true,
                    "tuple": wj::tuple_to_json(&out.tuple),
                    "intertwiner": out.intertwiner.iter().map(wj::qmat_to_json).collect::<Vec<_>>(),
                }),
                ok: true,
            })
        }
        "gen-instance" => {
            let v = need(input)?;
            let weights = wj::weights_from_json(get(v, "weights")?)?;
            let rank = parse_rank(v)?;
            let dims = parse_flag_dims(get(v, "flag_dims")?)?;
            let zeta = match v.get("zeta") {
                Some(z) if !z.is_null() => Some(wj::zeta_from_json(z)?),
                _ => None,
            };
            let mut instances = Vec::with_capacity(opts.count.max(1));
            for idx in 0..opts.count.max(1) {
                let t = crate::bridge::random_instance(
                    &weights,
                    rank,
                    &dims,
                    zeta.as_ref(),
                    opts.seed.wrapping_add(idx as u64),
                    opts.retries,
                )
                .map_err(domain)?;
                instances.push(wj::tuple_to_json(&t));
            }
            let value = if opts.count <= 1 {
                instances.pop().unwrap()
            } else {
                json!({ "instances": instances })
            };
            Ok(CommandOutcome { value, ok: true })
        }
        "selftest" => {
            let results = crate::selftest::run_all(opts.seed, opts.count, opts.jobs);
            let ok = results.iter().all(|r| r.ok());
            let value = json!({
                "ok": ok,
                "seed": opts.seed,
                "suites": results
                    .iter()
                    .map(|r| {
                        json!({
                            "name": r.name,
                            "passed": r.passed,
                            "total": r.total,
                            "summary": r.summary(),
                            "failures": r
                                .failures
                                .iter()
                                .map(|(i, m)| json!({ "instance": i, "message": m }))
                                .collect::<Vec<_>>(),
                        })
                    })
                    .collect::<Vec<_>>(),
            });
            Ok(CommandOutcome { value, ok })
        }
        other => Err(CommandError::UnknownCommand(other.to_string())),
    }
}
