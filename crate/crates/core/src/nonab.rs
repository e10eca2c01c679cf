//! Non-abelian first cohomology `H^1(H; π)` of a subgroup `H ≤ G` acting on
//! a finite group `π`, and its relation to complements in `π ⋊ G`.

use serde::Serialize;
use std::collections::{BTreeMap, VecDeque};

use crate::family::Family;
use crate::permgroup::{GAction, PermGroup, Semidirect, Subgroup};
use crate::{Error, Result};

/// Cap on the number of generator assignments tried.
const MAX_ASSIGNMENTS: usize = 1 << 22;

/// A map `φ: H → π` with `φ(gh) = φ(g) · g(φ(h))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cocycle {
    /// sorted elements of `H` (indices in `G`)
    domain: Vec<usize>,
    values: Vec<usize>,
}

impl Cocycle {
    pub fn from_values(domain: Vec<usize>, values: Vec<usize>) -> Result<Cocycle> {
        if domain.len() != values.len() || domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "cocycle domain must be sorted and match its values".into(),
            ));
        }
        Ok(Cocycle { domain, values })
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, g: usize) -> Option<usize> {
        self.domain.binary_search(&g).ok().map(|i| self.values[i])
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == PermGroup::IDENTITY)
    }

    /// Checks the cocycle identity on every pair.
    pub fn is_cocycle(&self, g: &PermGroup, pi: &PermGroup, act: &GAction) -> bool {
        self.domain.iter().zip(&self.values).all(|(&x, &fx)| {
            self.domain
                .iter()
                .zip(&self.values)
                .all(|(&y, &fy)| self.value(g.mul(x, y)) == Some(pi.mul(fx, act.apply(x, fy))))
        })
    }

    /// `g ↦ α⁻¹ φ(g) g(α)`.
    pub fn twist(&self, alpha: usize, pi: &PermGroup, act: &GAction) -> Cocycle {
        let ai = pi.inv(alpha);
        Cocycle {
            domain: self.domain.clone(),
            values: self
                .domain
                .iter()
                .zip(&self.values)
                .map(|(&x, &v)| pi.mul(pi.mul(ai, v), act.apply(x, alpha)))
                .collect(),
        }
    }
}

/// The principal cocycle `φ_α(g) = α · g(α⁻¹)` on `H`.
pub fn principal_cocycle(h: &Subgroup, alpha: usize, pi: &PermGroup, act: &GAction) -> Cocycle {
    let ai = pi.inv(alpha);
    Cocycle {
        domain: h.members().to_vec(),
        values: h
            .members()
            .iter()
            .map(|&x| pi.mul(alpha, act.apply(x, ai)))
            .collect(),
    }
}

/// Every cocycle on `H`: values are chosen on the generators of `H` and
/// propagated along `φ(xs) = φ(x) · x(φ(s))`; consistent assignments are
/// then checked exhaustively.
pub fn cocycles(
    g: &PermGroup,
    h: &Subgroup,
    pi: &PermGroup,
    act: &GAction,
) -> Result<Vec<Cocycle>> {
    let gens = h.generators();
    let m = pi.order();
    let total = (0..gens.len()).try_fold(1usize, |acc, _| acc.checked_mul(m));
    if total.is_none_or(|t| t > MAX_ASSIGNMENTS) {
        return Err(Error::Budget(format!(
            "{m}^{} generator assignments exceed the bound {MAX_ASSIGNMENTS}",
            gens.len()
        )));
    }
    let total = total.unwrap();
    let domain = h.members().to_vec();
    let pos = |x: usize| domain.binary_search(&x).expect("element of H");
    let mut out = Vec::new();
    'assign: for code in 0..total {
        let mut gv = Vec::with_capacity(gens.len());
        let mut c = code;
        for _ in gens {
            gv.push(c % m);
            c /= m;
        }
        let mut values = vec![usize::MAX; domain.len()];
        values[pos(PermGroup::IDENTITY)] = PermGroup::IDENTITY;
        let mut queue = VecDeque::from([PermGroup::IDENTITY]);
        while let Some(x) = queue.pop_front() {
            let fx = values[pos(x)];
            for (k, &s) in gens.iter().enumerate() {
                let y = g.mul(x, s);
                let fy = pi.mul(fx, act.apply(x, gv[k]));
                let slot = &mut values[pos(y)];
                if *slot == usize::MAX {
                    *slot = fy;
                    queue.push_back(y);
                } else if *slot != fy {
                    continue 'assign;
                }
            }
        }
        let phi = Cocycle {
            domain: domain.clone(),
            values,
        };
        if phi.is_cocycle(g, pi, act) {
            out.push(phi);
        }
    }
    out.sort();
    Ok(out)
}

/// Cocycles modulo `φ ~ α⁻¹ φ(-) (-)(α)`.
#[derive(Clone, Debug, Serialize)]
pub struct H1Classes {
    pub cocycles: Vec<Cocycle>,
    /// indices into `cocycles`
    pub classes: Vec<Vec<usize>>,
    /// the class of the trivial cocycle
    pub principal: usize,
}

impl H1Classes {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.classes
            .iter()
            .position(|c| c.contains(&i))
            .expect("partition")
    }

    pub fn is_principal(&self, i: usize) -> bool {
        self.class_of(i) == self.principal
    }

    pub fn summary(&self) -> H1Summary {
        H1Summary {
            cocycle_count: self.cocycles.len(),
            class_count: self.classes.len(),
            principal_class_size: self.classes[self.principal].len(),
            classes: self
                .classes
                .iter()
                .map(|c| c.iter().map(|&i| self.cocycles[i].values.clone()).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H1Summary {
    pub cocycle_count: usize,
    pub class_count: usize,
    pub principal_class_size: usize,
    /// each class as the value lists of its cocycles on the sorted domain
    pub classes: Vec<Vec<Vec<usize>>>,
}

/// `H^1(H; π)` as orbits of the twisting action of `π` on cocycles.
pub fn h1(g: &PermGroup, h: &Subgroup, pi: &PermGroup, act: &GAction) -> Result<H1Classes> {
    let cocycles = cocycles(g, h, pi, act)?;
    let index: BTreeMap<&Cocycle, usize> =
        cocycles.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut class_of = vec![usize::MAX; cocycles.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..cocycles.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let mut members: Vec<usize> = (0..pi.order())
            .map(|a| {
                index
                    .get(&cocycles[i].twist(a, pi, act))
                    .copied()
                    .ok_or_else(|| Error::Internal("twisted cocycle is missing".into()))
            })
            .collect::<Result<_>>()?;
        members.sort_unstable();
        members.dedup();
        for &j in &members {
            class_of[j] = classes.len();
        }
        classes.push(members);
    }
    let trivial = cocycles
        .iter()
        .position(Cocycle::is_trivial)
        .ok_or_else(|| Error::Internal("trivial cocycle is missing".into()))?;
    Ok(H1Classes {
        principal: class_of[trivial],
        cocycles,
        classes,
    })
}

/// Whether two cocycles are related by some `α`, by direct search.
pub fn equivalent(a: &Cocycle, b: &Cocycle, pi: &PermGroup, act: &GAction) -> bool {
    (0..pi.order()).any(|alpha| a.twist(alpha, pi, act) == *b)
}

/// `H_φ = {(φ(h), h) : h ∈ H}` inside `π ⋊ G`.
pub fn subgroup_from_cocycle(phi: &Cocycle, sd: &Semidirect) -> Result<Subgroup> {
    let mut members: Vec<usize> = phi
        .domain
        .iter()
        .zip(&phi.values)
        .map(|(&x, &a)| sd.element(a, x))
        .collect();
    members.sort_unstable();
    sd.group.subgroup_from_members(&members)
}

/// The cocycle on the image of `K` in `G`, for `K` meeting `π` trivially.
pub fn cocycle_from_complement(k: &Subgroup, sd: &Semidirect) -> Result<Cocycle> {
    let mut pairs: Vec<(usize, usize)> = k
        .members()
        .iter()
        .map(|&x| (sd.coords[x].1, sd.coords[x].0))
        .collect();
    if k.members()
        .iter()
        .any(|&x| x != PermGroup::IDENTITY && sd.coords[x].1 == PermGroup::IDENTITY)
    {
        return Err(Error::InvalidInput("subgroup meets pi nontrivially".into()));
    }
    pairs.sort_unstable();
    let (domain, values) = pairs.into_iter().unzip();
    Ok(Cocycle { domain, values })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubconjugacyEntry {
    pub values: Vec<usize>,
    pub principal: bool,
    /// `H_φ` lies in the family of subgroups subconjugate to `1 × G`
    pub subconjugate: bool,
    pub agree: bool,
}

/// For each cocycle on `H`, principality against membership of `H_φ` in
/// `F⟨G⟩`. For finite nontrivial `π` the family-level statement
/// (`F⟨G⟩` equals the finite subgroups) does not apply.
#[derive(Clone, Debug, Serialize)]
pub struct SubconjugacyReport {
    pub subgroup_order: usize,
    pub cocycle_count: usize,
    pub class_count: usize,
    pub entries: Vec<SubconjugacyEntry>,
    pub round_trips: bool,
    pub holds: bool,
    pub family_level: Option<String>,
}

pub fn subconjugate_iff_principal(
    pi: &PermGroup,
    g: &PermGroup,
    act: &GAction,
    h: &Subgroup,
) -> Result<SubconjugacyReport> {
    let sd = crate::permgroup::semidirect_product(pi, g, act)?;
    let classes = h1(g, h, pi, act)?;
    let gs = sd.g_subgroup();
    let group = sd.group.clone();
    let family = Family::generated(group, &[gs])?;
    let mut entries = Vec::with_capacity(classes.cocycles.len());
    let mut round_trips = true;
    for (i, phi) in classes.cocycles.iter().enumerate() {
        let hphi = subgroup_from_cocycle(phi, &sd)?;
        round_trips &= cocycle_from_complement(&hphi, &sd)? == *phi;
        let principal = classes.is_principal(i);
        let subconjugate = family.contains(&hphi);
        entries.push(SubconjugacyEntry {
            values: phi.values.clone(),
            principal,
            subconjugate,
            agree: principal == subconjugate,
        });
    }
    Ok(SubconjugacyReport {
        subgroup_order: h.order(),
        cocycle_count: classes.cocycles.len(),
        class_count: classes.class_count(),
        holds: round_trips && entries.iter().all(|e| e.agree),
        entries,
        round_trips,
        family_level: (pi.order() > 1)
            .then(|| "not applicable: pi is finite and nontrivial, so it is a finite subgroup outside F<G>".into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named::cyclic;

    fn inversion(g: &PermGroup, pi: &PermGroup) -> GAction {
        let inv: Vec<usize> = (0..pi.order()).map(|a| pi.inv(a)).collect();
        GAction::from_generator_images(g, pi, &[inv]).unwrap()
    }

    #[test]
    fn trivial_action_gives_homomorphisms() {
        let (g, pi) = (cyclic(4), cyclic(2));
        let act = GAction::trivial(&g, &pi);
        let cs = cocycles(&g, &g.whole(), &pi, &act).unwrap();
        assert_eq!(cs.len(), 2);
        for c in &cs {
            let f: Vec<usize> = (0..g.order()).map(|x| c.value(x).unwrap()).collect();
            assert!(g.is_homomorphism(&f, &pi));
        }
    }

    #[test]
    fn inverting_z3() {
        let (g, pi) = (cyclic(2), cyclic(3));
        let act = inversion(&g, &pi);
        let cl = h1(&g, &g.whole(), &pi, &act).unwrap();
        assert_eq!(cl.cocycles.len(), 3);
        assert_eq!(cl.class_count(), 1);
        for a in 0..3 {
            let p = principal_cocycle(&g.whole(), a, &pi, &act);
            assert!(cl.is_principal(cl.cocycles.binary_search(&p).unwrap()));
        }
    }
}
