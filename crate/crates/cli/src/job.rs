//! Jobs: one command with its inputs, run to a JSON report and a status.

use std::sync::mpsc;
use std::time::Duration;

use bredon::budget;
use bredon::dimension::{cd_report, group_label, verify_mainalg, Status, DEFAULT_N_MAX};
use bredon::family::all_families;
use bredon::nonab::{h1, subconjugate_iff_principal};
use bredon::orbitcat::orbit_category;
use bredon::permgroup::semidirect_product;
use bredon::posetred::{find_crown, reduce, verify_crown_survives, FinPoset, Regime};
use bredon::suites::{self, Case, SuiteReport};
use bredon::zcat::ext::cohomology;
use bredon::zcat::CatModule;
use bredon::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::input;

pub const SUITES: &[&str] = &[
    "mainalg",
    "shapiro",
    "quotient",
    "trivial-action",
    "doublecoset",
    "crown",
];

/// A command with its inputs. Spec fields take a keyword, inline JSON, a
/// path, or (in manifests) a JSON object.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poset: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_classes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub command: String,
    pub inputs: JobSpec,
    pub status: &'static str,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Value>,
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Indeterminate => 3,
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Budget(_) => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn status_name(code: i32) -> &'static str {
    match code {
        0 => "pass",
        1 => "fail",
        2 => "input_error",
        _ => "indeterminate",
    }
}

impl Outcome {
    fn new(job: &JobSpec, r: Result<(Status, Value)>) -> Outcome {
        let (code, report, error) = match r {
            Ok((s, v)) => (exit_code(s), Some(v), None),
            Err(e) => (
                error_code(&e),
                None,
                Some(json!({"category": e.category(), "message": e.to_string()})),
            ),
        };
        Outcome {
            command: job.command.clone(),
            inputs: job.clone(),
            status: status_name(code),
            exit_code: code,
            report,
            error,
        }
    }
}

fn need<'a>(v: &'a Option<Value>, name: &str) -> Result<&'a Value> {
    v.as_ref()
        .ok_or_else(|| Error::InvalidInput(format!("missing required input {name:?}")))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable report")
}

fn pass(v: Value) -> Result<(Status, Value)> {
    Ok((Status::Pass, v))
}

fn coefficients(
    spec: Option<&str>,
    cat: &std::sync::Arc<bredon::zcat::FinCategory>,
) -> Result<CatModule> {
    let s = spec.unwrap_or("z").trim().to_ascii_lowercase();
    if s == "z" {
        return Ok(CatModule::constant(cat.clone()));
    }
    if let Some(k) = s.strip_prefix("z/") {
        let k: i64 = k
            .parse()
            .ok()
            .filter(|&k| k > 1)
            .ok_or_else(|| Error::InvalidInput(format!("bad modulus in {s:?}")))?;
        return Ok(CatModule::constant_mod(cat.clone(), k));
    }
    if let Some(c) = s.strip_prefix("free:") {
        let c: usize = c
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad object in {s:?}")))?;
        if c >= cat.object_count() {
            return Err(Error::InvalidInput(format!("no object {c}")));
        }
        return Ok(CatModule::free(cat.clone(), c));
    }
    Err(Error::InvalidInput(format!(
        "unknown coefficients {s:?}; use z, z/k or free:<object>"
    )))
}

fn regime(spec: Option<&str>) -> Result<Regime> {
    let s = spec.unwrap_or("first");
    Ok(match s {
        "first" => Regime::First,
        "last" => Regime::Last,
        "depth-one-first" => Regime::DepthOneFirst,
        _ => match s.strip_prefix("random:").map(str::parse) {
            Some(Ok(seed)) => Regime::Random(seed),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown regime {s:?}; use first, last, depth-one-first or random:<seed>"
                )))
            }
        },
    })
}

fn suite_value(r: &SuiteReport) -> (Status, Value) {
    (r.status, to_value(r))
}

fn run_suite(name: &str, job: &JobSpec) -> Result<SuiteReport> {
    Ok(match name {
        "mainalg" => match &job.group {
            Some(g) => {
                let g = input::group(g)?;
                let sweep = verify_mainalg(&g)?;
                let case = Case {
                    label: group_label(&g),
                    status: sweep.status,
                    detail: to_value(&sweep),
                };
                SuiteReport {
                    suite: "mainalg".into(),
                    status: case.status,
                    cases: vec![case],
                }
            }
            None => suites::mainalg_suite()?,
        },
        "shapiro" => suites::shapiro_suite(job.n_max.unwrap_or(3))?,
        "quotient" => suites::quotient_suite(job.n_max.unwrap_or(2))?,
        "trivial-action" => suites::trivial_action_suite(job.n_max.unwrap_or(4))?,
        "doublecoset" => suites::doublecoset_suite()?,
        "crown" => match &job.group {
            Some(g) => {
                let g = input::group(g)?;
                let report = verify_crown_survives(g.clone());
                let case = {
                    let r = report?;
                    Case {
                        label: group_label(&g),
                        status: if r.holds { Status::Pass } else { Status::Fail },
                        detail: to_value(&r),
                    }
                };
                SuiteReport {
                    suite: "crown".into(),
                    status: case.status,
                    cases: vec![case],
                }
            }
            None => suites::crown_suite()?,
        },
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown suite {other:?}; expected one of {SUITES:?} or all"
            )))
        }
    })
}

fn verify(job: &JobSpec) -> Result<(Status, Value)> {
    let name = job.suite.as_deref().unwrap_or("all");
    if name != "all" {
        return Ok(suite_value(&run_suite(name, job)?));
    }
    let reports = SUITES
        .iter()
        .map(|s| run_suite(s, job))
        .collect::<Result<Vec<_>>>()?;
    let status = reports
        .iter()
        .map(|r| r.status)
        .max()
        .unwrap_or(Status::Pass);
    Ok((status, json!({"status": status, "suites": reports})))
}

fn compute(job: &JobSpec) -> Result<(Status, Value)> {
    let n_max = job.n_max.unwrap_or(DEFAULT_N_MAX);
    match job.command.as_str() {
        "subgroups" => {
            let g = input::group(need(&job.group, "group")?)?;
            let l = g.lattice()?;
            let subgroups: Vec<Value> = l
                .subgroups()
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "index": i,
                        "order": s.order(),
                        "class": l.class_of(i),
                        "members": s.members(),
                        "generators": s.generators().iter().map(|&x| g.element(x).images()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            pass(json!({
                "order": g.order(),
                "degree": g.degree(),
                "elements": g.elements().iter().map(|p| p.images()).collect::<Vec<_>>(),
                "class_count": l.classes().len(),
                "subgroups": subgroups,
            }))
        }
        "families" => {
            let g = input::group(need(&job.group, "group")?)?;
            let fams = all_families(&g)?;
            pass(json!({
                "order": g.order(),
                "count": fams.len(),
                "families": fams.iter().map(|f| f.summary()).collect::<Vec<_>>(),
            }))
        }
        "orbitcat" => {
            let g = input::group(need(&job.group, "group")?)?;
            let f = input::family(&g, need(&job.family, "family")?)?;
            let o = orbit_category(&f, !job.full.unwrap_or(false))?;
            pass(to_value(&o.export()))
        }
        "cohomology" => {
            let g = input::group(need(&job.group, "group")?)?;
            let f = input::family(&g, need(&job.family, "family")?)?;
            let o = orbit_category(&f, true)?;
            let m = coefficients(job.coefficients.as_deref(), o.cat())?;
            let h = cohomology(&m, n_max)?;
            pass(json!({
                "coefficients": job.coefficients.clone().unwrap_or_else(|| "z".into()),
                "groups": h,
                "display": h.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            }))
        }
        "cd" => {
            let g = input::group(need(&job.group, "group")?)?;
            let f = input::family(&g, need(&job.family, "family")?)?;
            let r = cd_report(&f, n_max)?;
            let mut v = to_value(&r);
            v["display"] = json!(r.display_value());
            pass(v)
        }
        "h1" | "semidirect" => {
            let pi = input::group(need(&job.pi, "pi")?)?;
            let g = input::group(need(&job.g, "g")?)?;
            let act = input::action(&g, &pi, need(&job.action, "action")?)?;
            let h = match &job.subgroup {
                Some(s) => input::subgroup(&g, s)?,
                None => g.whole(),
            };
            if job.command == "h1" {
                return pass(to_value(&h1(&g, &h, &pi, &act)?.summary()));
            }
            let sd = semidirect_product(&pi, &g, &act)?;
            let report = subconjugate_iff_principal(&pi, &g, &act, &h)?;
            let status = if report.holds {
                Status::Pass
            } else {
                Status::Fail
            };
            Ok((
                status,
                json!({
                    "order": sd.group.order(),
                    "degree": sd.group.degree(),
                    "generators": sd.group.generators().iter().map(|p| p.images()).collect::<Vec<_>>(),
                    "pi_subgroup": sd.pi_subgroup().members(),
                    "g_subgroup": sd.g_subgroup().members(),
                    "complements": report,
                }),
            ))
        }
        "ereduce" => {
            let p = match (&job.poset, &job.group) {
                (Some(p), None) => input::poset(p)?,
                (None, Some(g)) => {
                    let g = input::group(g)?;
                    let f = match &job.family {
                        Some(f) => input::family(&g, f)?,
                        None => bredon::family::Family::proper(g.clone())?,
                    };
                    FinPoset::of_family(&f)
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "ereduce takes either a poset or a group".into(),
                    ))
                }
            };
            let red = reduce(&p, regime(job.regime.as_deref())?);
            pass(json!({
                "size": p.len(),
                "reduced_size": red.kept.len(),
                "is_point": red.is_point(),
                "reduced": red.poset.elements(),
                "removed": red.removed.iter().map(|&i| p.elements()[i].clone()).collect::<Vec<_>>(),
            }))
        }
        "crown" => {
            let g = input::group(need(&job.group, "group")?)?;
            pass(to_value(&find_crown(&g)?))
        }
        "verify" => verify(job),
        other => Err(Error::InvalidInput(format!("unknown command {other:?}"))),
    }
}

struct Budgets {
    order: usize,
    rank: usize,
    classes: usize,
}

impl Budgets {
    fn apply(job: &JobSpec) -> Budgets {
        let saved = Budgets {
            order: budget::max_order(),
            rank: budget::max_rank(),
            classes: budget::max_classes(),
        };
        if let Some(n) = job.max_order {
            budget::set_max_order(n.min(budget::HARD_MAX_ORDER));
        }
        if let Some(n) = job.max_rank {
            budget::set_max_rank(n);
        }
        if let Some(n) = job.max_classes {
            budget::set_max_classes(n);
        }
        saved
    }

    fn restore(self) {
        budget::set_max_order(self.order);
        budget::set_max_rank(self.rank);
        budget::set_max_classes(self.classes);
    }
}

/// Runs one job under its budgets; a time limit abandons the computation
/// and reports it as indeterminate.
pub fn run(job: &JobSpec) -> Outcome {
    let saved = Budgets::apply(job);
    let result = match job.time_limit {
        None | Some(0) => compute(job),
        Some(secs) => {
            let (tx, rx) = mpsc::channel();
            let j = job.clone();
            std::thread::spawn(move || {
                let _ = tx.send(compute(&j));
            });
            rx.recv_timeout(Duration::from_secs(secs))
                .unwrap_or_else(|_| Err(Error::Budget(format!("time limit of {secs} s reached"))))
        }
    };
    saved.restore();
    Outcome::new(job, result)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    jobs: Vec<Value>,
}

/// Runs every job of a manifest (`{"jobs":[...]}` or a bare list) in order
/// of job id. A malformed job is reported with exit code 2 without
/// affecting the others. `defaults` fills in budgets a job leaves unset.
pub fn batch(text: &str, defaults: impl Fn(&mut JobSpec)) -> Result<(i32, Value)> {
    let parsed: Value = if text.trim().is_empty() {
        Value::Array(Vec::new())
    } else {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("malformed manifest: {e}")))?
    };
    let jobs = match parsed {
        Value::Array(jobs) => jobs,
        other => {
            serde_json::from_value::<Manifest>(other)
                .map_err(|e| Error::InvalidInput(format!("malformed manifest: {e}")))?
                .jobs
        }
    };
    let mut entries: Vec<(String, Value)> = Vec::new();
    for (i, raw) in jobs.into_iter().enumerate() {
        let id = raw
            .get("id")
            .and_then(Value::as_str)
            .map(str::to_string)
            .unwrap_or_else(|| format!("job-{i:04}"));
        let outcome = match serde_json::from_value::<JobSpec>(raw.clone()) {
            Ok(mut job) => {
                defaults(&mut job);
                to_value(&run(&job))
            }
            Err(e) => json!({
                "command": raw.get("command").cloned().unwrap_or(Value::Null),
                "inputs": raw,
                "status": status_name(2),
                "exit_code": 2,
                "error": {"category": "invalid_input", "message": format!("malformed job: {e}")},
            }),
        };
        entries.push((id, outcome));
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let ids: Vec<&String> = entries.iter().map(|e| &e.0).collect();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("duplicate job ids in manifest".into()));
    }
    let worst = entries
        .iter()
        .map(|e| e.1["exit_code"].as_i64().unwrap_or(2) as i32)
        .max_by_key(|&c| severity(c))
        .unwrap_or(0);
    let jobs: Vec<Value> = entries
        .into_iter()
        .map(|(id, mut v)| {
            v["id"] = json!(id);
            v
        })
        .collect();
    Ok((
        worst,
        json!({"status": status_name(worst), "exit_code": worst, "jobs": jobs}),
    ))
}

/// Ordering of exit codes from best to worst.
fn severity(code: i32) -> u8 {
    match code {
        0 => 0,
        3 => 1,
        1 => 2,
        _ => 3,
    }
}
