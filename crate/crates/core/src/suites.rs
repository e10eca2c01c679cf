//! Battery-wide verification suites with per-case status.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::dimension::{
    battery, theorem_sweep, verify_quotient, verify_shapiro, verify_trivial_action, BatteryEntry,
    Coefficients, QuotientCoefficients, Status,
};
use crate::family::Family;
use crate::orbitcat::{double_coset_decomposition, orbit_category, restriction};
use crate::permgroup::{named, PermGroup, Subgroup};
use crate::posetred::{point_check, verify_crown_survives, FinPoset};
use crate::zcat::NatMap;
use crate::{Error, Result};

/// Battery groups up to this order take part in the exhaustive suites.
pub const SMALL_ORDER: usize = 24;

#[derive(Clone, Debug, Serialize)]
pub struct Case {
    pub label: String,
    pub status: Status,
    pub detail: Value,
}

impl Case {
    fn from_result(label: String, r: Result<(bool, Value)>) -> Case {
        match r {
            Ok((ok, detail)) => Case {
                label,
                status: if ok { Status::Pass } else { Status::Fail },
                detail,
            },
            Err(e) => Case {
                label,
                status: if matches!(e, Error::Budget(_)) {
                    Status::Indeterminate
                } else {
                    Status::Fail
                },
                detail: json!({"error": e.category(), "message": e.to_string()}),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub status: Status,
    pub cases: Vec<Case>,
}

impl SuiteReport {
    fn new(suite: &str, cases: Vec<Case>) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            status: cases.iter().map(|c| c.status).max().unwrap_or(Status::Pass),
            cases,
        }
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable report")
}

fn small_battery() -> Result<Vec<BatteryEntry>> {
    Ok(battery()?
        .into_iter()
        .filter(|e| e.group.order() <= SMALL_ORDER)
        .collect())
}

fn class_reps(g: &PermGroup) -> Result<Vec<Subgroup>> {
    let l = g.lattice()?;
    Ok(l.classes().iter().map(|c| l.get(c[0]).clone()).collect())
}

pub fn mainalg_suite() -> Result<SuiteReport> {
    let cases = battery()?
        .iter()
        .map(|e| {
            let sweep = theorem_sweep(e.name, &e.families);
            Case {
                label: e.name.into(),
                status: sweep.status,
                detail: to_value(&sweep),
            }
        })
        .collect();
    Ok(SuiteReport::new("mainalg", cases))
}

/// `(group, family, subgroup, coefficients)` instances for the Shapiro
/// comparison.
pub fn shapiro_instances() -> Result<Vec<(String, Family, Subgroup, Coefficients)>> {
    let mut out = Vec::new();
    for name in ["z4", "z2xz2", "s3", "z6", "d4"] {
        let g = Arc::new(named::by_name(name).expect("named group"));
        for family in [Family::proper(g.clone())?, Family::all(g.clone())?] {
            for h in class_reps(&g)?.into_iter().filter(|h| !h.is_trivial()) {
                for c in [
                    Coefficients::Constant,
                    Coefficients::ConstantMod(2),
                    Coefficients::Free(0),
                ] {
                    out.push((name.to_string(), family.clone(), h.clone(), c));
                }
            }
        }
    }
    Ok(out)
}

pub fn shapiro_suite(n_max: usize) -> Result<SuiteReport> {
    let cases = shapiro_instances()?
        .into_iter()
        .map(|(name, family, h, c)| {
            let label = format!(
                "{name} {} H={} M={}",
                crate::dimension::family_label(&family),
                h.order(),
                c.label()
            );
            let r = verify_shapiro(&family, &h, &c, n_max).map(|r| (r.holds, to_value(&r)));
            Case::from_result(label, r)
        })
        .collect();
    Ok(SuiteReport::new("shapiro", cases))
}

pub fn quotient_suite(n_max: usize) -> Result<SuiteReport> {
    let mut cases = Vec::new();
    for e in small_battery()? {
        let g = &e.group;
        let normals: Vec<Subgroup> = class_reps(g)?
            .into_iter()
            .filter(|n| !n.is_trivial() && g.is_normal(n))
            .collect();
        for family in &e.families {
            for n in normals.iter().filter(|n| family.contains(n)) {
                let label = format!(
                    "{} {} N={}",
                    e.name,
                    crate::dimension::family_label(family),
                    n.order()
                );
                let r = verify_quotient(family, n, n_max).map(|r| (r.holds, to_value(&r)));
                cases.push(Case::from_result(label, r));
            }
        }
    }
    Ok(SuiteReport::new("quotient", cases))
}

pub fn trivial_action_suite(n_max: usize) -> Result<SuiteReport> {
    let instances: [(&str, usize, &[QuotientCoefficients]); 4] = [
        (
            "z6",
            3,
            &[QuotientCoefficients::Trivial, QuotientCoefficients::Sign],
        ),
        (
            "s3",
            3,
            &[QuotientCoefficients::Trivial, QuotientCoefficients::Sign],
        ),
        (
            "z4",
            2,
            &[
                QuotientCoefficients::Trivial,
                QuotientCoefficients::TrivialMod(2),
            ],
        ),
        (
            "d4",
            4,
            &[QuotientCoefficients::Trivial, QuotientCoefficients::Sign],
        ),
    ];
    let mut cases = Vec::new();
    for (name, order, coefficients) in instances {
        let g = Arc::new(named::by_name(name).expect("named group"));
        let n = class_reps(&g)?
            .into_iter()
            .find(|s| s.order() == order && g.is_normal(s))
            .ok_or_else(|| {
                Error::Internal(format!("{name} has no normal subgroup of order {order}"))
            })?;
        for c in coefficients {
            let label = format!("{name}/N{order} P={}", c.label());
            let r = verify_trivial_action(&g, &n, c, n_max).map(|r| (r.holds, to_value(&r)));
            cases.push(Case::from_result(label, r));
        }
    }
    Ok(SuiteReport::new("trivial-action", cases))
}

/// Both composites of the decomposition maps are identities.
pub fn decomposition_invertible(d: &crate::orbitcat::DoubleCosetDecomposition) -> bool {
    let there = d.forward.then(&d.backward);
    let back = d.backward.then(&d.forward);
    there.equal_mod(&NatMap::identity(&d.source), &d.source)
        && back.equal_mod(&NatMap::identity(&d.target), &d.target)
}

pub fn doublecoset_suite() -> Result<SuiteReport> {
    let mut cases = Vec::new();
    for e in small_battery()? {
        let g = &e.group;
        for family in &e.families {
            let o = Arc::new(orbit_category(family, true)?);
            for h in class_reps(g)? {
                let label = format!(
                    "{} {} H={}",
                    e.name,
                    crate::dimension::family_label(family),
                    h.order()
                );
                let r = (|| {
                    let r = restriction(&o, &h)?;
                    let mut ok = true;
                    let mut counts = Vec::new();
                    for k in 0..o.object_count() {
                        let d = double_coset_decomposition(&r, k)?;
                        let want = g.double_cosets(&h, o.subgroup(k)).len();
                        ok &= d.summand_count() == want && decomposition_invertible(&d);
                        counts.push(d.summand_count());
                    }
                    Ok((ok, json!({"summands": counts})))
                })();
                cases.push(Case::from_result(label, r));
            }
        }
    }
    Ok(SuiteReport::new("doublecoset", cases))
}

/// The posets used for the reduction cross-check: chains, crowns with a
/// bottom, and the family posets of the battery.
pub fn point_posets() -> Result<Vec<(String, FinPoset)>> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push((format!("chain {n}"), FinPoset::chain(n)));
    }
    for m in 1..=3 {
        for n in 1..=3 {
            out.push((format!("crown {m}x{n}"), FinPoset::crown(m, n)));
        }
    }
    for e in battery()? {
        for family in &e.families {
            out.push((
                format!("{} {}", e.name, crate::dimension::family_label(family)),
                FinPoset::of_family(family),
            ));
        }
    }
    Ok(out)
}

pub fn crown_suite() -> Result<SuiteReport> {
    let mut cases: Vec<Case> = point_posets()?
        .into_iter()
        .map(|(label, p)| {
            let r = point_check(&p).map(|r| (r.agree, to_value(&r)));
            Case::from_result(label, r)
        })
        .collect();
    let a5 = Arc::new(named::alternating(5));
    let r = verify_crown_survives(a5).map(|r| (r.holds, to_value(&r)));
    cases.push(Case::from_result("a5 crown".into(), r));
    Ok(SuiteReport::new("crown", cases))
}
