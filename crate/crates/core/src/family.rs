//! Families of subgroups: sets closed under conjugation and passing to
//! subgroups.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::budget;
use crate::permgroup::{PermGroup, Quotient, Subgroup};
use crate::{Error, Result};

/// A family of subgroups of a fixed group, stored as a union of conjugacy
/// classes of subgroups.
#[derive(Clone)]
pub struct Family {
    group: Arc<PermGroup>,
    /// sorted class indices
    classes: Vec<usize>,
    /// sorted lattice indices
    members: Vec<usize>,
}

impl PartialEq for Family {
    fn eq(&self, other: &Family) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.classes == other.classes
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Family(classes={:?}, size={})",
            self.classes,
            self.members.len()
        )
    }
}

/// Subconjugacy relation between classes: `below[a][b]` iff a member of
/// class `a` lies in a member of class `b`.
fn class_order(g: &PermGroup) -> Result<Vec<Vec<bool>>> {
    let l = g.lattice()?;
    let nc = l.classes().len();
    let mut below = vec![vec![false; nc]; nc];
    for b in 0..nc {
        let rb = l.get(l.class_rep(b));
        for (i, s) in l.subgroups().iter().enumerate() {
            if s.is_subgroup_of(rb) {
                below[l.class_of(i)][b] = true;
            }
        }
    }
    Ok(below)
}

impl Family {
    /// Builds a family from class indices, checking downward closure.
    pub fn from_classes(group: Arc<PermGroup>, classes: Vec<usize>) -> Result<Family> {
        let below = class_order(&group)?;
        let mut classes = classes;
        classes.sort_unstable();
        classes.dedup();
        if classes.is_empty() {
            return Err(Error::EmptyFamily("no classes given".into()));
        }
        let nc = below.len();
        if classes.iter().any(|&c| c >= nc) {
            return Err(Error::InvalidInput("class index out of range".into()));
        }
        for &c in &classes {
            for a in 0..nc {
                if below[a][c] && classes.binary_search(&a).is_err() {
                    return Err(Error::InvalidInput(format!(
                        "class {a} lies below class {c} but is missing"
                    )));
                }
            }
        }
        Ok(Family::assemble(group, classes))
    }

    fn assemble(group: Arc<PermGroup>, classes: Vec<usize>) -> Family {
        let l = group.lattice().expect("lattice available");
        let mut members: Vec<usize> = classes
            .iter()
            .flat_map(|&c| l.classes()[c].iter().copied())
            .collect();
        members.sort_unstable();
        Family {
            group,
            classes,
            members,
        }
    }

    /// The smallest family containing the seeds: all subgroups subconjugate
    /// to some seed.
    pub fn generated(group: Arc<PermGroup>, seeds: &[Subgroup]) -> Result<Family> {
        let l = group.lattice()?;
        let below = class_order(&group)?;
        let mut classes = vec![l.class_of(0)];
        for s in seeds {
            let i = l.index_of(s).ok_or_else(|| {
                Error::NotSubgroup(format!("seed {s:?} is not a subgroup of the group"))
            })?;
            let c = l.class_of(i);
            classes.extend((0..below.len()).filter(|&a| below[a][c]));
        }
        classes.sort_unstable();
        classes.dedup();
        Ok(Family::assemble(group, classes))
    }

    pub fn trivial(group: Arc<PermGroup>) -> Result<Family> {
        Family::generated(group, &[])
    }

    pub fn all(group: Arc<PermGroup>) -> Result<Family> {
        let nc = group.lattice()?.classes().len();
        Ok(Family::assemble(group, (0..nc).collect()))
    }

    /// All subgroups except the group itself.
    pub fn proper(group: Arc<PermGroup>) -> Result<Family> {
        let l = group.lattice()?;
        let top = l.class_of(l.len() - 1);
        let classes = (0..l.classes().len()).filter(|&c| c != top).collect();
        Ok(Family::assemble(group, classes))
    }

    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    /// Lattice indices of the members, sorted.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn contains(&self, h: &Subgroup) -> bool {
        let l = self.group.lattice().expect("lattice available");
        l.index_of(h).is_some_and(|i| self.contains_index(i))
    }

    /// Whether the whole group is missing from the family.
    pub fn is_proper(&self) -> bool {
        let l = self.group.lattice().expect("lattice available");
        !self.contains_index(l.len() - 1)
    }

    /// Member subgroups.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let l = self.group.lattice().expect("lattice available");
        self.members.iter().map(|&i| l.get(i).clone()).collect()
    }

    /// Checks both closure properties directly on the member set.
    pub fn check_closure(&self) -> Result<()> {
        let g = &self.group;
        let l = g.lattice()?;
        for &i in &self.members {
            for &s in g.generator_indices() {
                if !self.contains_index(l.conjugate_index(g, i, s)) {
                    return Err(Error::Internal(
                        "family not closed under conjugation".into(),
                    ));
                }
            }
            let h = l.get(i);
            for (j, k) in l.subgroups().iter().enumerate() {
                if k.is_subgroup_of(h) && !self.contains_index(j) {
                    return Err(Error::Internal("family not closed under subgroups".into()));
                }
            }
        }
        if !self.contains_index(0) {
            return Err(Error::Internal("family misses the trivial subgroup".into()));
        }
        Ok(())
    }

    /// `H ∩ F` as a family of `H`, with `H` realised as its own group.
    pub fn intersect_with_subgroup(&self, h: &Subgroup) -> Result<SubFamily> {
        let (hg, embed) = subgroup_as_group(&self.group, h)?;
        let hg = Arc::new(hg);
        let hl = hg.lattice()?;
        let gl = self.group.lattice()?;
        let mut classes = Vec::new();
        for (c, cls) in hl.classes().iter().enumerate() {
            let k = hl.get(cls[0]);
            let image = self
                .group
                .subgroup_generated(&k.members().iter().map(|&x| embed[x]).collect::<Vec<_>>());
            let idx = gl.index_of(&image).expect("image is a subgroup");
            if self.contains_index(idx) {
                classes.push(c);
            }
        }
        let family = Family::assemble(hg.clone(), classes);
        Ok(SubFamily {
            group: hg,
            embed,
            family,
        })
    }

    /// The quotient family `{L ≤ Γ/N : p^-1(L) ∈ F}`.
    pub fn quotient_family(&self, n: &Subgroup) -> Result<QuotientFamily> {
        let Quotient {
            group,
            kernel,
            proj,
            lift,
        } = self.group.quotient(n)?;
        if !self.contains(n) {
            return Err(Error::EmptyFamily(
                "the normal subgroup is not in the family, so the quotient family is empty".into(),
            ));
        }
        let qg = Arc::new(group);
        let ql = qg.lattice()?;
        let mut classes = Vec::new();
        for (c, cls) in ql.classes().iter().enumerate() {
            let pre = self.group.preimage_subgroup(ql.get(cls[0]), &proj);
            if self.contains(&pre) {
                classes.push(c);
            }
        }
        let family = Family::assemble(qg.clone(), classes);
        Ok(QuotientFamily {
            group: qg,
            proj,
            lift,
            kernel,
            family,
        })
    }

    /// The inclusion poset on the members.
    pub fn subgroup_poset(&self) -> SubgroupPoset {
        let l = self.group.lattice().expect("lattice available");
        let subs: Vec<&Subgroup> = self.members.iter().map(|&i| l.get(i)).collect();
        let leq = subs
            .iter()
            .map(|a| subs.iter().map(|b| a.is_subgroup_of(b)).collect())
            .collect();
        SubgroupPoset {
            elements: self.members.clone(),
            leq,
        }
    }

    /// A deterministic description used for serialization.
    pub fn summary(&self) -> FamilySummary {
        let l = self.group.lattice().expect("lattice available");
        FamilySummary {
            size: self.members.len(),
            proper: self.is_proper(),
            classes: self
                .classes
                .iter()
                .map(|&c| {
                    let rep = l.get(l.class_rep(c));
                    ClassSummary {
                        order: rep.order(),
                        size: l.classes()[c].len(),
                        representative: rep
                            .generators()
                            .iter()
                            .map(|&x| self.group.element(x).images())
                            .collect(),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassSummary {
    pub order: usize,
    pub size: usize,
    /// generators of the class representative, as image lists
    pub representative: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilySummary {
    pub size: usize,
    pub proper: bool,
    pub classes: Vec<ClassSummary>,
}

/// A family over a subgroup `H`, with `H` as a group in its own right.
#[derive(Clone, Debug)]
pub struct SubFamily {
    pub group: Arc<PermGroup>,
    /// element of `H` ↦ element of the ambient group
    pub embed: Vec<usize>,
    pub family: Family,
}

/// A quotient family over `Γ/N`.
#[derive(Clone, Debug)]
pub struct QuotientFamily {
    pub group: Arc<PermGroup>,
    pub proj: Vec<usize>,
    pub lift: Vec<usize>,
    pub kernel: Subgroup,
    pub family: Family,
}

/// `H` as a permutation group on the same points, with its embedding.
pub fn subgroup_as_group(g: &PermGroup, h: &Subgroup) -> Result<(PermGroup, Vec<usize>)> {
    let gens: Vec<_> = h
        .generators()
        .iter()
        .map(|&x| g.element(x).clone())
        .collect();
    let hg = PermGroup::from_generators(g.degree(), gens)?;
    let embed: Vec<usize> = hg
        .elements()
        .iter()
        .map(|p| g.index_of(p).expect("subgroup element"))
        .collect();
    if hg.order() != h.order() {
        return Err(Error::Internal(
            "subgroup generators do not generate it".into(),
        ));
    }
    Ok((hg, embed))
}

/// The inclusion order on the members of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupPoset {
    /// lattice indices, sorted (the trivial subgroup comes first)
    pub elements: Vec<usize>,
    pub leq: Vec<Vec<bool>>,
}

impl SubgroupPoset {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Every family of the group: down-closed sets of subgroup classes that
/// contain the trivial class.
pub fn all_families(group: &Arc<PermGroup>) -> Result<Vec<Family>> {
    let below = class_order(group)?;
    let nc = below.len();
    if nc > budget::max_classes() {
        return Err(Error::Budget(format!(
            "{nc} subgroup classes exceed the family enumeration bound {}",
            budget::max_classes()
        )));
    }
    // classes are ordered by subgroup order, so every class comes after
    // the classes below it
    let mut out = Vec::new();
    let mut chosen = vec![false; nc];
    chosen[0] = true;
    fn rec(c: usize, below: &[Vec<bool>], chosen: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let nc = below.len();
        if c == nc {
            out.push((0..nc).filter(|&i| chosen[i]).collect());
            return;
        }
        rec(c + 1, below, chosen, out);
        if (0..nc).all(|a| a == c || !below[a][c] || chosen[a]) {
            chosen[c] = true;
            rec(c + 1, below, chosen, out);
            chosen[c] = false;
        }
    }
    let mut sets = Vec::new();
    rec(1, &below, &mut chosen, &mut sets);
    sets.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    for s in sets {
        out.push(Family::assemble(group.clone(), s));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named::*;

    #[test]
    fn proper_and_all() {
        let g = Arc::new(cyclic(2));
        let p = Family::proper(g.clone()).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.is_proper());
        assert!(!Family::all(g).unwrap().is_proper());
    }

    #[test]
    fn families_of_small_groups() {
        assert_eq!(all_families(&Arc::new(cyclic(5))).unwrap().len(), 2);
        assert_eq!(all_families(&Arc::new(cyclic(4))).unwrap().len(), 3);
        assert_eq!(all_families(&Arc::new(symmetric(3))).unwrap().len(), 5);
    }

    #[test]
    fn quotient_family_of_z4() {
        let g = Arc::new(cyclic(4));
        let l = g.lattice().unwrap();
        let f = Family::generated(g.clone(), &[l.get(1).clone()]).unwrap();
        assert_eq!(f.len(), 2);
        let qf = f.quotient_family(l.get(1)).unwrap();
        assert_eq!(qf.group.order(), 2);
        assert_eq!(qf.family.len(), 1);
        let triv = Family::trivial(g.clone()).unwrap();
        assert!(matches!(
            triv.quotient_family(l.get(1)),
            Err(Error::EmptyFamily(_))
        ));
    }
}
