//! Finite permutation groups with fully enumerated elements.
//!
//! Elements are stored sorted by their image arrays, so index 0 is always
//! the identity. Products use the convention `(p * q)(i) = p(q(i))`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::budget;
use crate::{Error, Result};

/// A permutation of `{0, ..., d-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Perm> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(Error::InvalidInput(format!(
                    "{images:?} is not a permutation of 0..{d}"
                )));
            }
            seen[i] = true;
        }
        Ok(Perm(images.into_iter().map(|i| i as u32).collect()))
    }

    pub fn identity(degree: usize) -> Perm {
        Perm((0..degree as u32).collect())
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Perm> {
        let mut img: Vec<usize> = (0..degree).collect();
        for c in cycles {
            for (k, &a) in c.iter().enumerate() {
                if a >= degree {
                    return Err(Error::InvalidInput(format!("point {a} out of range")));
                }
                img[a] = c[(k + 1) % c.len()];
            }
        }
        Perm::new(img)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&i| i as usize).collect()
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Disjoint cycles of length at least two.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for s in 0..self.0.len() {
            if seen[s] || self.0[s] as usize == s {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut i = self.0[s] as usize;
            while i != s {
                seen[i] = true;
                c.push(i);
                i = self.0[i] as usize;
            }
            out.push(c);
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Perm {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Perm> {
        Perm::new(v)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Vec<usize> {
        p.images()
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs = self.cycles();
        if cs.is_empty() {
            return write!(f, "()");
        }
        for c in cs {
            let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

/// A subgroup of a fixed [`PermGroup`], identified by its sorted member
/// indices. The parent group is not stored; operations take it explicitly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: Vec<usize>,
    bits: FixedBitSet,
    gens: Vec<usize>,
}

impl Subgroup {
    fn from_members(members: Vec<usize>, gens: Vec<usize>, n: usize) -> Subgroup {
        let mut bits = FixedBitSet::with_capacity(n);
        for &m in &members {
            bits.insert(m);
        }
        Subgroup {
            members,
            bits,
            gens,
        }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Sorted element indices.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// A generating set (not necessarily minimal).
    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn contains(&self, g: usize) -> bool {
        self.bits.contains(g)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.order() <= other.order() && self.bits.is_subset(&other.bits)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    /// Canonical ordering: by order, then lexicographically by members.
    pub fn canonical_cmp(&self, other: &Subgroup) -> std::cmp::Ordering {
        (self.order(), &self.members).cmp(&(other.order(), &other.members))
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.members)
    }
}

/// A finite group of permutations with its full multiplication table.
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    gen_idx: Vec<usize>,
    lattice: OnceLock<SubgroupLattice>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

impl PermGroup {
    /// The closure of `gens` acting on `degree` points.
    pub fn from_generators(degree: usize, gens: Vec<Perm>) -> Result<PermGroup> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::InvalidInput(format!(
                    "generator {g:?} has degree {} but the group has degree {degree}",
                    g.degree()
                )));
            }
        }
        let id = Perm::identity(degree);
        let mut seen: HashMap<Perm, ()> = HashMap::new();
        seen.insert(id.clone(), ());
        let mut queue = VecDeque::from([id]);
        let mut all = Vec::new();
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = x.compose(g);
                if !seen.contains_key(&y) {
                    if seen.len() >= budget::HARD_MAX_ORDER {
                        return Err(Error::Budget(format!(
                            "group order exceeds {}",
                            budget::HARD_MAX_ORDER
                        )));
                    }
                    seen.insert(y.clone(), ());
                    queue.push_back(y);
                }
            }
            all.push(x);
        }
        all.sort();
        let n = all.len();
        let index: HashMap<Perm, usize> = all
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut mul = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                mul[i * n + j] = index[&all[i].compose(&all[j])] as u32;
            }
        }
        let mut inv = vec![0u32; n];
        for i in 0..n {
            for j in 0..n {
                if mul[i * n + j] == 0 {
                    inv[i] = j as u32;
                    break;
                }
            }
        }
        let gen_idx = gens.iter().map(|g| index[g]).collect();
        Ok(PermGroup {
            degree,
            generators: gens,
            elements: all,
            index,
            mul,
            inv,
            gen_idx,
            lattice: OnceLock::new(),
        })
    }

    /// Parses generators given as image lists.
    pub fn from_images(degree: usize, gens: &[Vec<usize>]) -> Result<PermGroup> {
        let perms = gens
            .iter()
            .cloned()
            .map(Perm::new)
            .collect::<Result<Vec<_>>>()?;
        PermGroup::from_generators(degree, perms)
    }

    pub fn trivial() -> PermGroup {
        PermGroup::from_generators(1, vec![]).expect("trivial group")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Element indices of the generators.
    pub fn generator_indices(&self) -> &[usize] {
        &self.gen_idx
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub const IDENTITY: usize = 0;

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `g x g^-1`
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.gen_idx;
        g.iter()
            .all(|&a| g.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_members(
            (0..self.order()).collect(),
            self.gen_idx.clone(),
            self.order(),
        )
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_members(vec![0], vec![], self.order())
    }

    /// The subgroup generated by the given element indices.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Subgroup {
        let n = self.order();
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert(0);
        let mut members = vec![0];
        let mut k = 0;
        while k < members.len() {
            let x = members[k];
            for &s in gens {
                let y = self.mul(x, s);
                if !bits.contains(y) {
                    bits.insert(y);
                    members.push(y);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        let mut gens: Vec<usize> = gens.iter().copied().filter(|&g| g != 0).collect();
        gens.sort_unstable();
        gens.dedup();
        Subgroup {
            members,
            bits,
            gens,
        }
    }

    /// `<h, g>` for a subgroup `h`.
    fn extend(&self, h: &Subgroup, g: usize) -> Subgroup {
        let mut gens = h.gens.clone();
        gens.push(g);
        let n = self.order();
        let mut bits = h.bits.clone();
        let mut members = h.members.clone();
        // every new element is a product of old members and g's
        let mut k = 0;
        while k < members.len() {
            let x = members[k];
            for &s in &gens {
                let y = self.mul(x, s);
                if !bits.contains(y) {
                    bits.insert(y);
                    members.push(y);
                }
            }
            k += 1;
        }
        debug_assert!(bits.len() == n);
        members.sort_unstable();
        Subgroup {
            members,
            bits,
            gens,
        }
    }

    /// The subgroup generated by explicit permutations of this group.
    pub fn subgroup_from_perms(&self, perms: &[Perm]) -> Result<Subgroup> {
        let idx = perms
            .iter()
            .map(|p| {
                self.index_of(p).ok_or_else(|| {
                    Error::NotSubgroup(format!("{p:?} is not an element of the group"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.subgroup_generated(&idx))
    }

    /// Validates an arbitrary member set as a subgroup.
    pub fn subgroup_from_members(&self, members: &[usize]) -> Result<Subgroup> {
        let mut m = members.to_vec();
        m.sort_unstable();
        m.dedup();
        if m.iter().any(|&x| x >= self.order()) {
            return Err(Error::NotSubgroup("element index out of range".into()));
        }
        let s = self.subgroup_generated(&m);
        if s.members != m {
            return Err(Error::NotSubgroup(format!("{members:?} is not closed")));
        }
        Ok(s)
    }

    /// `g H g^-1`
    pub fn conjugate(&self, h: &Subgroup, g: usize) -> Subgroup {
        let mut members: Vec<usize> = h.members.iter().map(|&x| self.conj(g, x)).collect();
        members.sort_unstable();
        let gens = h.gens.iter().map(|&x| self.conj(g, x)).collect();
        Subgroup::from_members(members, gens, self.order())
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.gen_idx
            .iter()
            .all(|&g| h.gens.iter().all(|&x| h.contains(self.conj(g, x))))
    }

    pub fn normalizer(&self, h: &Subgroup) -> Subgroup {
        let members: Vec<usize> = (0..self.order())
            .filter(|&g| h.gens.iter().all(|&x| h.contains(self.conj(g, x))))
            .collect();
        self.subgroup_generated(&members)
    }

    /// Left cosets `gH`, each sorted, ordered by least element.
    pub fn left_cosets(&self, h: &Subgroup) -> Vec<Vec<usize>> {
        self.partition(|g, out| {
            for &x in &h.members {
                out.push(self.mul(g, x));
            }
        })
    }

    /// Double cosets `HgK`, each sorted, ordered by least element.
    pub fn double_cosets(&self, h: &Subgroup, k: &Subgroup) -> Vec<Vec<usize>> {
        self.partition(|g, out| {
            for &a in &h.members {
                let ag = self.mul(a, g);
                for &b in &k.members {
                    out.push(self.mul(ag, b));
                }
            }
        })
    }

    fn partition(&self, block: impl Fn(usize, &mut Vec<usize>)) -> Vec<Vec<usize>> {
        let mut seen = FixedBitSet::with_capacity(self.order());
        let mut out = Vec::new();
        for g in 0..self.order() {
            if seen.contains(g) {
                continue;
            }
            let mut b = Vec::new();
            block(g, &mut b);
            b.sort_unstable();
            b.dedup();
            for &x in &b {
                seen.insert(x);
            }
            out.push(b);
        }
        out
    }

    /// Normal closure of a single element.
    pub fn normal_closure(&self, x: usize) -> Subgroup {
        let conjugates: Vec<usize> = (0..self.order()).map(|g| self.conj(g, x)).collect();
        self.subgroup_generated(&conjugates)
    }

    /// Non-abelian with no proper nontrivial normal subgroup.
    pub fn is_nonabelian_simple(&self) -> bool {
        if self.is_abelian() {
            return false;
        }
        (1..self.order()).all(|x| self.normal_closure(x).order() == self.order())
    }

    /// The subgroup lattice, enumerated on first use.
    pub fn lattice(&self) -> Result<&SubgroupLattice> {
        if let Some(l) = self.lattice.get() {
            return Ok(l);
        }
        if self.order() > budget::max_order() {
            return Err(Error::Budget(format!(
                "subgroup enumeration for a group of order {} exceeds the bound {}",
                self.order(),
                budget::max_order()
            )));
        }
        Ok(self.lattice.get_or_init(|| SubgroupLattice::build(self)))
    }

    /// All subgroups sorted by order, then lexicographically by members.
    pub fn all_subgroups(&self) -> Result<&[Subgroup]> {
        Ok(&self.lattice()?.subgroups)
    }

    /// Conjugacy classes of subgroups as lists of lattice indices.
    pub fn conjugacy_classes_of_subgroups(&self) -> Result<Vec<Vec<Subgroup>>> {
        let l = self.lattice()?;
        Ok(l.classes
            .iter()
            .map(|c| c.iter().map(|&i| l.subgroups[i].clone()).collect())
            .collect())
    }

    /// The quotient by a normal subgroup, acting on left cosets.
    pub fn quotient(&self, n: &Subgroup) -> Result<Quotient> {
        if !self.is_normal(n) {
            return Err(Error::NotNormal(format!("{n:?}")));
        }
        let cosets = self.left_cosets(n);
        let mut coset_of = vec![0usize; self.order()];
        for (c, b) in cosets.iter().enumerate() {
            for &x in b {
                coset_of[x] = c;
            }
        }
        let reps: Vec<usize> = cosets.iter().map(|b| b[0]).collect();
        let act = |g: usize| -> Perm {
            Perm(
                reps.iter()
                    .map(|&r| coset_of[self.mul(g, r)] as u32)
                    .collect(),
            )
        };
        let gens: Vec<Perm> = self.gen_idx.iter().map(|&g| act(g)).collect();
        let group = PermGroup::from_generators(cosets.len(), gens)?;
        let proj: Vec<usize> = (0..self.order())
            .map(|g| group.index_of(&act(g)).expect("coset action closes"))
            .collect();
        let mut lift = vec![usize::MAX; group.order()];
        for g in (0..self.order()).rev() {
            lift[proj[g]] = g;
        }
        Ok(Quotient {
            group,
            kernel: n.clone(),
            proj,
            lift,
        })
    }

    /// Image of a subgroup under a homomorphism given on element indices.
    pub fn image_subgroup(&self, h: &Subgroup, f: &[usize], target: &PermGroup) -> Subgroup {
        let gens: Vec<usize> = h.members.iter().map(|&x| f[x]).collect();
        target.subgroup_generated(&gens)
    }

    /// Preimage of a subgroup of `target` under `f`.
    pub fn preimage_subgroup(&self, l: &Subgroup, f: &[usize]) -> Subgroup {
        let members: Vec<usize> = (0..self.order()).filter(|&x| l.contains(f[x])).collect();
        self.subgroup_generated(&members)
    }

    /// Whether every entry of `f` (indexed by elements) defines a homomorphism.
    pub fn is_homomorphism(&self, f: &[usize], target: &PermGroup) -> bool {
        (0..self.order())
            .all(|a| (0..self.order()).all(|b| f[self.mul(a, b)] == target.mul(f[a], f[b])))
    }
}

/// A quotient group together with its projection.
#[derive(Debug)]
pub struct Quotient {
    pub group: PermGroup,
    pub kernel: Subgroup,
    /// projection on element indices
    pub proj: Vec<usize>,
    /// least preimage of each quotient element
    pub lift: Vec<usize>,
}

/// All subgroups of a group with their conjugacy classification.
#[derive(Debug)]
pub struct SubgroupLattice {
    subgroups: Vec<Subgroup>,
    lookup: HashMap<Vec<usize>, usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    /// `transport[i] = t` with `t^-1 S_i t = S_rep`
    transport: Vec<usize>,
}

impl SubgroupLattice {
    fn build(g: &PermGroup) -> SubgroupLattice {
        let n = g.order();
        // generators of distinct cyclic subgroups
        let mut cyc_seen: HashMap<Vec<usize>, ()> = HashMap::new();
        let mut cyclic_gens = Vec::new();
        for x in 1..n {
            let c = g.subgroup_generated(&[x]);
            if cyc_seen.insert(c.members.clone(), ()).is_none() {
                cyclic_gens.push(x);
            }
        }
        let triv = g.trivial_subgroup();
        let mut lookup: HashMap<Vec<usize>, usize> = HashMap::new();
        lookup.insert(triv.members.clone(), 0);
        let mut subgroups = vec![triv];
        let mut k = 0;
        while k < subgroups.len() {
            let h = subgroups[k].clone();
            for &x in &cyclic_gens {
                if h.contains(x) {
                    continue;
                }
                let e = g.extend(&h, x);
                if !lookup.contains_key(&e.members) {
                    lookup.insert(e.members.clone(), subgroups.len());
                    subgroups.push(e);
                }
            }
            k += 1;
        }
        subgroups.sort_by(|a, b| a.canonical_cmp(b));
        let lookup: HashMap<Vec<usize>, usize> = subgroups
            .iter()
            .enumerate()
            .map(|(i, s)| (s.members.clone(), i))
            .collect();
        let m = subgroups.len();
        let mut class_of = vec![usize::MAX; m];
        let mut transport = vec![0usize; m];
        let mut classes = Vec::new();
        for r in 0..m {
            if class_of[r] != usize::MAX {
                continue;
            }
            let c = classes.len();
            class_of[r] = c;
            let mut members = vec![r];
            let mut q = 0;
            while q < members.len() {
                let x = members[q];
                for &s in &g.gen_idx {
                    let y = lookup[&g.conjugate(&subgroups[x], s).members];
                    if class_of[y] == usize::MAX {
                        class_of[y] = c;
                        transport[y] = g.mul(s, transport[x]);
                        members.push(y);
                    }
                }
                q += 1;
            }
            members.sort_unstable();
            classes.push(members);
        }
        SubgroupLattice {
            subgroups,
            lookup,
            classes,
            class_of,
            transport,
        }
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn get(&self, i: usize) -> &Subgroup {
        &self.subgroups[i]
    }

    pub fn index_of(&self, h: &Subgroup) -> Option<usize> {
        self.lookup.get(&h.members).copied()
    }

    /// Lattice index of `g S_i g^-1`.
    pub fn conjugate_index(&self, g: &PermGroup, i: usize, x: usize) -> usize {
        self.lookup[&g.conjugate(&self.subgroups[i], x).members]
    }

    /// Classes as lists of lattice indices; the first entry of each class is
    /// its representative (the lexicographically least member set).
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn class_rep(&self, c: usize) -> usize {
        self.classes[c][0]
    }

    /// `t` with `t^-1 S_i t` equal to the representative of its class.
    pub fn transport(&self, i: usize) -> usize {
        self.transport[i]
    }
}

/// An action of `G` on `pi` by automorphisms, tabulated on elements:
/// `map[g][a]` is the index of `g` acting on `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GAction {
    map: Vec<Vec<usize>>,
}

impl GAction {
    /// Extends automorphisms given on the generators of `g` (as permutations
    /// of `pi`'s element indices) to the whole group, checking consistency.
    pub fn from_generator_images(
        g: &PermGroup,
        pi: &PermGroup,
        images: &[Vec<usize>],
    ) -> Result<GAction> {
        if images.len() != g.generator_indices().len() {
            return Err(Error::InvalidInput(format!(
                "expected {} generator images, got {}",
                g.generator_indices().len(),
                images.len()
            )));
        }
        let m = pi.order();
        for img in images {
            Perm::new(img.clone())?;
            if img.len() != m {
                return Err(Error::InvalidInput(
                    "generator image has the wrong length".into(),
                ));
            }
            for a in 0..m {
                for b in 0..m {
                    if img[pi.mul(a, b)] != pi.mul(img[a], img[b]) {
                        return Err(Error::InvalidInput(
                            "generator image is not an automorphism".into(),
                        ));
                    }
                }
            }
        }
        let mut map: Vec<Option<Vec<usize>>> = vec![None; g.order()];
        map[0] = Some((0..m).collect());
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let fx = map[x].clone().unwrap();
            for (k, &s) in g.generator_indices().iter().enumerate() {
                let y = g.mul(x, s);
                let fy: Vec<usize> = (0..m).map(|a| fx[images[k][a]]).collect();
                match &map[y] {
                    Some(old) if *old != fy => {
                        return Err(Error::InvalidInput(
                            "generator images do not define a homomorphism".into(),
                        ))
                    }
                    Some(_) => {}
                    None => {
                        map[y] = Some(fy);
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok(GAction {
            map: map.into_iter().map(|x| x.unwrap()).collect(),
        })
    }

    pub fn trivial(g: &PermGroup, pi: &PermGroup) -> GAction {
        GAction {
            map: vec![(0..pi.order()).collect(); g.order()],
        }
    }

    /// An action given on every element of `g`.
    pub fn from_table(g: &PermGroup, pi: &PermGroup, map: Vec<Vec<usize>>) -> Result<GAction> {
        if map.len() != g.order() {
            return Err(Error::InvalidInput(
                "action table has the wrong size".into(),
            ));
        }
        let act = GAction { map };
        act.validate(g, pi)?;
        Ok(act)
    }

    /// `g` acting on `a`.
    pub fn apply(&self, g: usize, a: usize) -> usize {
        self.map[g][a]
    }

    pub fn automorphism(&self, g: usize) -> &[usize] {
        &self.map[g]
    }

    /// Checks the automorphism and homomorphism laws exhaustively.
    pub fn validate(&self, g: &PermGroup, pi: &PermGroup) -> Result<()> {
        let m = pi.order();
        let bad = |s: &str| Err(Error::InvalidInput(s.to_string()));
        if self.map[0] != (0..m).collect::<Vec<_>>() {
            return bad("identity does not act trivially");
        }
        for x in 0..g.order() {
            let f = &self.map[x];
            if f.len() != m || Perm::new(f.clone()).is_err() {
                return bad("action is not a bijection");
            }
            for a in 0..m {
                for b in 0..m {
                    if f[pi.mul(a, b)] != pi.mul(f[a], f[b]) {
                        return bad("action is not by automorphisms");
                    }
                }
            }
            for y in 0..g.order() {
                let fxy = &self.map[g.mul(x, y)];
                if (0..m).any(|a| fxy[a] != f[self.map[y][a]]) {
                    return bad("action is not a homomorphism");
                }
            }
        }
        Ok(())
    }
}

/// `pi ⋊ G` acting on `pi × G` by left translation.
#[derive(Debug)]
pub struct Semidirect {
    pub group: Arc<PermGroup>,
    /// element index of `(a, 1)` for each `a` in `pi`
    pub pi_embed: Vec<usize>,
    /// element index of `(1, g)` for each `g` in `G`
    pub g_embed: Vec<usize>,
    /// `(a, g)` coordinates of each element
    pub coords: Vec<(usize, usize)>,
}

impl Semidirect {
    pub fn pi_subgroup(&self) -> Subgroup {
        self.group.subgroup_generated(&self.pi_embed)
    }

    pub fn g_subgroup(&self) -> Subgroup {
        self.group.subgroup_generated(&self.g_embed)
    }

    pub fn element(&self, a: usize, g: usize) -> usize {
        self.group.mul(self.pi_embed[a], self.g_embed[g])
    }
}

/// Builds `pi ⋊ G` with `(a, g)(b, h) = (a · g(b), gh)`.
pub fn semidirect_product(pi: &PermGroup, g: &PermGroup, act: &GAction) -> Result<Semidirect> {
    act.validate(g, pi)?;
    let (m, k) = (pi.order(), g.order());
    let point = |a: usize, h: usize| (a * k + h) as u32;
    let translate = |a: usize, x: usize| -> Perm {
        let mut img = vec![0u32; m * k];
        for b in 0..m {
            for h in 0..k {
                img[point(b, h) as usize] = point(pi.mul(a, act.apply(x, b)), g.mul(x, h));
            }
        }
        Perm(img)
    };
    let mut gens: Vec<Perm> = pi
        .generator_indices()
        .iter()
        .map(|&a| translate(a, 0))
        .collect();
    gens.extend(g.generator_indices().iter().map(|&x| translate(0, x)));
    let group = PermGroup::from_generators(m * k, gens)?;
    if group.order() != m * k {
        return Err(Error::Internal(
            "semidirect product has the wrong order".into(),
        ));
    }
    let pi_embed = (0..m)
        .map(|a| group.index_of(&translate(a, 0)).unwrap())
        .collect();
    let g_embed = (0..k)
        .map(|x| group.index_of(&translate(0, x)).unwrap())
        .collect();
    let coords = group
        .elements()
        .iter()
        .map(|p| {
            let q = p.apply(0);
            (q / k, q % k)
        })
        .collect();
    Ok(Semidirect {
        group: Arc::new(group),
        pi_embed,
        g_embed,
        coords,
    })
}

/// Named groups used throughout the tests and the command line.
pub mod named {
    use super::*;

    fn cyc(degree: usize, cycles: &[&[usize]]) -> Perm {
        Perm::from_cycles(degree, cycles).expect("valid cycle")
    }

    pub fn cyclic(n: usize) -> PermGroup {
        let c: Vec<usize> = (0..n).collect();
        let gens = if n > 1 { vec![cyc(n, &[&c])] } else { vec![] };
        PermGroup::from_generators(n.max(1), gens).unwrap()
    }

    pub fn klein_four() -> PermGroup {
        PermGroup::from_generators(
            4,
            vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])],
        )
        .unwrap()
    }

    pub fn symmetric(n: usize) -> PermGroup {
        let c: Vec<usize> = (0..n).collect();
        let gens = if n > 1 {
            vec![cyc(n, &[&[0, 1]]), cyc(n, &[&c])]
        } else {
            vec![]
        };
        PermGroup::from_generators(n.max(1), gens).unwrap()
    }

    pub fn alternating(n: usize) -> PermGroup {
        let gens = (2..n).map(|k| cyc(n, &[&[0, 1, k]])).collect();
        PermGroup::from_generators(n.max(1), gens).unwrap()
    }

    /// Dihedral group of order `2n` acting on the `n`-gon.
    pub fn dihedral(n: usize) -> PermGroup {
        let c: Vec<usize> = (0..n).collect();
        let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        PermGroup::from_generators(n, vec![cyc(n, &[&c]), Perm::new(refl).unwrap()]).unwrap()
    }

    /// Quaternion group in its regular representation on 8 points.
    pub fn quaternion() -> PermGroup {
        // elements ±1, ±i, ±j, ±k numbered 1,i,j,k,-1,-i,-j,-k
        let i = cyc(8, &[&[0, 1, 4, 5], &[2, 7, 6, 3]]);
        let j = cyc(8, &[&[0, 2, 4, 6], &[1, 3, 5, 7]]);
        PermGroup::from_generators(8, vec![i, j]).unwrap()
    }

    /// `Z/2 × Z/2` given as a product of disjoint transpositions.
    pub fn z2xz2() -> PermGroup {
        PermGroup::from_generators(4, vec![cyc(4, &[&[0, 1]]), cyc(4, &[&[2, 3]])]).unwrap()
    }

    /// `Z/6` as a product of disjoint 2- and 3-cycles.
    pub fn z6() -> PermGroup {
        PermGroup::from_generators(5, vec![cyc(5, &[&[0, 1], &[2, 3, 4]])]).unwrap()
    }

    /// Looks up a group by its short name.
    pub fn by_name(name: &str) -> Option<PermGroup> {
        Some(match name.to_ascii_lowercase().as_str() {
            "z1" | "trivial" => cyclic(1),
            "z2" => cyclic(2),
            "z3" => cyclic(3),
            "z4" => cyclic(4),
            "z5" => cyclic(5),
            "z6" => z6(),
            "z2xz2" | "v4" => z2xz2(),
            "s3" => symmetric(3),
            "d4" => dihedral(4),
            "q8" => quaternion(),
            "a4" => alternating(4),
            "d5" => dihedral(5),
            "s4" => symmetric(4),
            "a5" => alternating(5),
            "a6" => alternating(6),
            _ => return None,
        })
    }

    pub const NAMES: &[&str] = &[
        "z2", "z3", "z4", "z2xz2", "z5", "z6", "s3", "d4", "q8", "a4", "d5", "s4", "a5", "a6",
    ];
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn identity_is_index_zero() {
        let g = symmetric(3);
        assert!(g.element(0).is_identity());
        for a in 0..g.order() {
            assert_eq!(g.mul(a, g.inv(a)), 0);
        }
    }

    #[test]
    fn named_orders() {
        let cases = [
            ("z2", 2),
            ("z6", 6),
            ("z2xz2", 4),
            ("s3", 6),
            ("d4", 8),
            ("q8", 8),
            ("a4", 12),
            ("d5", 10),
            ("s4", 24),
            ("a5", 60),
        ];
        for (n, o) in cases {
            assert_eq!(by_name(n).unwrap().order(), o, "{n}");
        }
    }

    #[test]
    fn quaternion_has_one_involution() {
        let q = quaternion();
        let inv = (1..8).filter(|&x| q.element_order(x) == 2).count();
        assert_eq!(inv, 1);
        assert!(!q.is_abelian());
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Perm::new(vec![0, 0, 1]).is_err());
        assert!(PermGroup::from_images(3, &[vec![1, 2]]).is_err());
    }

    #[test]
    fn transport_conjugates_to_rep() {
        let g = symmetric(4);
        let l = g.lattice().unwrap();
        for i in 0..l.len() {
            let t = l.transport(i);
            let r = l.class_rep(l.class_of(i));
            assert_eq!(l.conjugate_index(&g, i, g.inv(t)), r);
        }
    }

    #[test]
    fn quotient_of_z4() {
        let g = cyclic(4);
        let n = g.subgroup_generated(&[g.index_of(&Perm::new(vec![2, 3, 0, 1]).unwrap()).unwrap()]);
        let q = g.quotient(&n).unwrap();
        assert_eq!(q.group.order(), 2);
        assert!(g.is_homomorphism(&q.proj, &q.group));
    }
}
