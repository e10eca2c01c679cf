//! Parsing of group, family, action, subgroup and poset specifications.
//!
//! Every spec is either a short keyword, inline JSON, or a path to a JSON
//! file. Objects reject unknown keys.

use std::collections::BTreeMap;
use std::sync::Arc;

use bredon::family::Family;
use bredon::permgroup::{named, GAction, Perm, PermGroup, Subgroup};
use bredon::posetred::FinPoset;
use bredon::{Error, Result};
use serde::Deserialize;
use serde_json::Value;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Resolves a string spec to JSON: inline if it starts with `{` or `[`,
/// otherwise the contents of the file at that path.
fn load(text: &str) -> Result<Value> {
    let t = text.trim();
    let raw = if t.starts_with('{') || t.starts_with('[') {
        t.to_string()
    } else {
        std::fs::read_to_string(t).map_err(|e| invalid(format!("cannot read {t:?}: {e}")))?
    };
    serde_json::from_str(&raw).map_err(|e| invalid(format!("malformed JSON in {t:?}: {e}")))
}

fn is_bare_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| invalid(format!("bad {what}: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupJson {
    degree: usize,
    generators: Vec<Vec<usize>>,
}

pub fn group(spec: &Value) -> Result<Arc<PermGroup>> {
    let v = match spec {
        Value::String(s) => match named::by_name(s) {
            Some(g) => return Ok(Arc::new(g)),
            None if is_bare_name(s) => {
                return Err(invalid(format!(
                    "unknown group {s:?}; known names are {}",
                    named::NAMES.join(", ")
                )))
            }
            None => load(s)?,
        },
        other => other.clone(),
    };
    if let Value::String(s) = &v {
        return named::by_name(s)
            .map(Arc::new)
            .ok_or_else(|| invalid(format!("unknown group {s:?}")));
    }
    let g: GroupJson = from_value(v, "group")?;
    Ok(Arc::new(PermGroup::from_images(g.degree, &g.generators)?))
}

fn perms(g: &PermGroup, lists: &[Vec<usize>]) -> Result<Vec<Perm>> {
    lists
        .iter()
        .map(|p| {
            if p.len() != g.degree() {
                return Err(invalid(format!(
                    "permutation {p:?} does not have degree {}",
                    g.degree()
                )));
            }
            Perm::new(p.clone())
        })
        .collect()
}

/// A subgroup given by generating permutations.
pub fn subgroup(g: &PermGroup, spec: &Value) -> Result<Subgroup> {
    let v = match spec {
        Value::String(s) if s == "whole" => return Ok(g.whole()),
        Value::String(s) if s == "trivial" => return Ok(g.trivial_subgroup()),
        Value::String(s) => load(s)?,
        other => other.clone(),
    };
    let gens: Vec<Vec<usize>> = from_value(v, "subgroup generators")?;
    g.subgroup_from_perms(&perms(g, &gens)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, tag = "type", rename_all = "snake_case")]
enum FamilyJson {
    All,
    Proper,
    Trivial,
    Generated { seeds: Vec<Vec<Vec<usize>>> },
}

pub fn family(g: &Arc<PermGroup>, spec: &Value) -> Result<Family> {
    let v = match spec {
        Value::String(s) => match s.as_str() {
            "all" => return Family::all(g.clone()),
            "proper" => return Family::proper(g.clone()),
            "trivial" => return Family::trivial(g.clone()),
            _ => load(s)?,
        },
        other => other.clone(),
    };
    match from_value(v, "family")? {
        FamilyJson::All => Family::all(g.clone()),
        FamilyJson::Proper => Family::proper(g.clone()),
        FamilyJson::Trivial => Family::trivial(g.clone()),
        FamilyJson::Generated { seeds } => {
            let seeds = seeds
                .iter()
                .map(|s| g.subgroup_from_perms(&perms(g, s)?))
                .collect::<Result<Vec<_>>>()?;
            Family::generated(g.clone(), &seeds)
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionJson {
    generator_images: BTreeMap<String, Vec<usize>>,
}

/// `trivial`, `invert` (every generator acts by inversion, so `pi` must be
/// abelian), or the automorphisms of `pi` assigned to the generators of `g`,
/// keyed by generator index.
pub fn action(g: &PermGroup, pi: &PermGroup, spec: &Value) -> Result<GAction> {
    let v = match spec {
        Value::String(s) if s == "trivial" => return Ok(GAction::trivial(g, pi)),
        Value::String(s) if s == "invert" => {
            let inv: Vec<usize> = (0..pi.order()).map(|a| pi.inv(a)).collect();
            let images = vec![inv; g.generator_indices().len()];
            return GAction::from_generator_images(g, pi, &images);
        }
        Value::String(s) => load(s)?,
        other => other.clone(),
    };
    let a: ActionJson = from_value(v, "action")?;
    let k = g.generator_indices().len();
    let mut images = vec![None; k];
    for (key, img) in a.generator_images {
        let i: usize = key
            .parse()
            .map_err(|_| invalid(format!("generator index {key:?} is not a number")))?;
        let slot = images
            .get_mut(i)
            .ok_or_else(|| invalid(format!("generator index {i} out of range (0..{k})")))?;
        *slot = Some(img);
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, x)| x.ok_or_else(|| invalid(format!("missing image for generator {i}"))))
        .collect::<Result<Vec<_>>>()?;
    GAction::from_generator_images(g, pi, &images)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PosetJson {
    elements: Vec<String>,
    #[serde(default)]
    less: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    leq: Option<Vec<Vec<bool>>>,
}

/// `chain:N`, `crown:M,N`, or `{"elements":[…],"less":[[a,b],…]}` (or a
/// full `leq` matrix).
pub fn poset(spec: &Value) -> Result<FinPoset> {
    let v = match spec {
        Value::String(s) => {
            if let Some(n) = s.strip_prefix("chain:") {
                let n: usize = n
                    .parse()
                    .map_err(|_| invalid("chain length must be a number"))?;
                if n == 0 {
                    return Err(invalid("chain length must be positive"));
                }
                return Ok(FinPoset::chain(n));
            }
            if let Some(mn) = s.strip_prefix("crown:") {
                let parts: Vec<usize> = mn
                    .split(',')
                    .map(|x| x.trim().parse())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| invalid("crown sizes must be numbers"))?;
                let [m, n] = parts[..] else {
                    return Err(invalid("crown needs two sizes, e.g. crown:2,2"));
                };
                return Ok(FinPoset::crown(m, n));
            }
            load(s)?
        }
        other => other.clone(),
    };
    let p: PosetJson = from_value(v, "poset")?;
    match (p.less, p.leq) {
        (Some(less), None) => FinPoset::from_relations(p.elements, &less),
        (None, Some(leq)) => FinPoset::new(p.elements, leq),
        _ => Err(invalid("a poset needs exactly one of \"less\" or \"leq\"")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn named_and_inline_groups() {
        assert_eq!(group(&json!("s3")).unwrap().order(), 6);
        let g = group(&json!({"degree": 3, "generators": [[1, 2, 0]]})).unwrap();
        assert_eq!(g.order(), 3);
        assert!(group(&json!({"degree": 3, "gens": [[1, 2, 0]]})).is_err());
    }

    #[test]
    fn generated_family() {
        let g = group(&json!("s3")).unwrap();
        let f = family(&g, &json!({"type": "generated", "seeds": [[[1, 0, 2]]]})).unwrap();
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn posets() {
        assert_eq!(poset(&json!("chain:4")).unwrap().len(), 4);
        assert_eq!(poset(&json!("crown:2,3")).unwrap().len(), 6);
        let p = poset(&json!({"elements": ["a", "b"], "less": [[0, 1]]})).unwrap();
        assert!(p.lt(0, 1));
    }
}
