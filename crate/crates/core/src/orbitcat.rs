//! Orbit categories of a finite group relative to a family, and the functors
//! between their module categories.
//!
//! A morphism `Γ/H → Γ/K` is a coset `γK` with `γ⁻¹Hγ ≤ K`, acting by
//! `xH ↦ xγK`; the composite of `γK` followed by `γ'L` is `γγ'L`. Cosets are
//! stored by their least element.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::family::{Family, SubgroupPoset};
use crate::linalg::{kernel_from_columns, CoordLattice, SparseVec};
use crate::matrix::IntMatrix;
use crate::permgroup::{PermGroup, Subgroup};
use crate::zcat::category::{FinCategory, Functor};
use crate::zcat::hom::hom_group;
use crate::zcat::module::{CatModule, NatMap};
use crate::{Error, Result};

/// The orbit category `O_F(Γ)`, either on one object per conjugacy class
/// (skeleton) or on every member of the family.
#[derive(Clone, Debug)]
pub struct OrbitCategory {
    group: Arc<PermGroup>,
    family: Family,
    skeleton: bool,
    cat: Arc<FinCategory>,
    labels: Vec<usize>,
    object_of: HashMap<usize, usize>,
    cosets: Vec<usize>,
    coset_rep: Vec<Vec<u32>>,
    lookup: HashMap<(usize, usize, usize), usize>,
}

/// Builds `O_F(Γ)`; objects are listed in lattice order.
pub fn orbit_category(family: &Family, skeleton: bool) -> Result<OrbitCategory> {
    let g = family.group().clone();
    let lat = g.lattice()?;
    let labels: Vec<usize> = if skeleton {
        family.classes().iter().map(|&c| lat.class_rep(c)).collect()
    } else {
        family.members().to_vec()
    };
    let subs: Vec<&Subgroup> = labels.iter().map(|&i| lat.get(i)).collect();
    let coset_rep: Vec<Vec<u32>> = subs
        .iter()
        .map(|s| {
            (0..g.order())
                .map(|x| s.members().iter().map(|&k| g.mul(x, k)).min().unwrap() as u32)
                .collect()
        })
        .collect();
    let n = labels.len();
    let mut ends = Vec::new();
    let mut cosets = Vec::new();
    let mut lookup = HashMap::new();
    let mut identity = vec![0; n];
    for a in 0..n {
        for b in 0..n {
            if !subs[b].order().is_multiple_of(subs[a].order()) {
                continue;
            }
            for gamma in 0..g.order() {
                if coset_rep[b][gamma] as usize != gamma {
                    continue;
                }
                let gi = g.inv(gamma);
                if subs[a]
                    .generators()
                    .iter()
                    .all(|&h| subs[b].contains(g.conj(gi, h)))
                {
                    if a == b && gamma == PermGroup::IDENTITY {
                        identity[a] = ends.len();
                    }
                    lookup.insert((a, b, gamma), ends.len());
                    ends.push((a, b));
                    cosets.push(gamma);
                }
            }
        }
    }
    let names = labels
        .iter()
        .map(|&i| format!("G/H{i}[{}]", lat.get(i).order()))
        .collect();
    let cat = FinCategory::new(names, ends.clone(), identity, |f, h| {
        let c = g.mul(cosets[f], cosets[h]);
        let b = ends[h].1;
        lookup[&(ends[f].0, b, coset_rep[b][c] as usize)]
    })?;
    let object_of = labels.iter().enumerate().map(|(o, &i)| (i, o)).collect();
    Ok(OrbitCategory {
        group: g,
        family: family.clone(),
        skeleton,
        cat: Arc::new(cat),
        labels,
        object_of,
        cosets,
        coset_rep,
        lookup,
    })
}

impl OrbitCategory {
    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_skeleton(&self) -> bool {
        self.skeleton
    }

    pub fn cat(&self) -> &Arc<FinCategory> {
        &self.cat
    }

    pub fn object_count(&self) -> usize {
        self.labels.len()
    }

    /// Lattice index of the subgroup labelling an object.
    pub fn label(&self, obj: usize) -> usize {
        self.labels[obj]
    }

    pub fn subgroup(&self, obj: usize) -> &Subgroup {
        self.group
            .lattice()
            .expect("lattice built")
            .get(self.labels[obj])
    }

    /// The object labelled by a lattice index, if there is one.
    pub fn object_of(&self, idx: usize) -> Option<usize> {
        self.object_of.get(&idx).copied()
    }

    /// Least element of the coset labelling a morphism.
    pub fn coset(&self, f: usize) -> usize {
        self.cosets[f]
    }

    /// The morphism `a → b` given by the coset of `gamma`, if admissible.
    pub fn morphism(&self, a: usize, b: usize, gamma: usize) -> Option<usize> {
        self.lookup
            .get(&(a, b, self.coset_rep[b][gamma] as usize))
            .copied()
    }

    /// The object isomorphic to `Γ/S` for a family member `S`, with `t` such
    /// that `xS ↦ xtS'` is the isomorphism onto it.
    pub fn locate(&self, idx: usize) -> Result<(usize, usize)> {
        if !self.family.contains_index(idx) {
            return Err(Error::InvalidInput(format!(
                "subgroup {idx} is not in the family"
            )));
        }
        if !self.skeleton {
            return Ok((self.object_of[&idx], PermGroup::IDENTITY));
        }
        let lat = self.group.lattice()?;
        let rep = lat.class_rep(lat.class_of(idx));
        Ok((self.object_of[&rep], lat.transport(idx)))
    }

    /// The morphism corresponding to `γK: Γ/H → Γ/K` for arbitrary family
    /// members `H`, `K` (lattice indices).
    pub fn morphism_from_full(&self, h: usize, k: usize, gamma: usize) -> Result<usize> {
        let (a, th) = self.locate(h)?;
        let (b, tk) = self.locate(k)?;
        let g = &self.group;
        let c = g.mul(g.mul(g.inv(th), gamma), tk);
        self.morphism(a, b, c)
            .ok_or_else(|| Error::InvalidInput("coset does not define a morphism".into()))
    }

    /// The object of the trivial subgroup.
    pub fn free_orbit(&self) -> usize {
        0
    }

    pub fn export(&self) -> OrbitExport {
        let g = &self.group;
        OrbitExport {
            objects: (0..self.object_count())
                .map(|o| {
                    let s = self.subgroup(o);
                    ObjectLabel {
                        name: self.cat.object_name(o).to_string(),
                        order: s.order(),
                        generators: s
                            .generators()
                            .iter()
                            .map(|&x| g.element(x).images())
                            .collect(),
                    }
                })
                .collect(),
            morphisms: (0..self.cat.morphism_count())
                .map(|f| MorphismLabel {
                    source: self.cat.src(f),
                    target: self.cat.tgt(f),
                    coset: g.element(self.cosets[f]).images(),
                })
                .collect(),
            compositions: self.cat.export().compositions,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ObjectLabel {
    pub name: String,
    pub order: usize,
    pub generators: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismLabel {
    pub source: usize,
    pub target: usize,
    pub coset: Vec<usize>,
}

/// JSON form of an orbit category.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitExport {
    pub objects: Vec<ObjectLabel>,
    pub morphisms: Vec<MorphismLabel>,
    pub compositions: Vec<[usize; 3]>,
}

/// Number of Γ-maps `Γ/H → Γ/K`, found by testing every image of the base
/// point for well-definedness and equivariance on all cosets.
pub fn count_equivariant_maps(g: &PermGroup, h: &Subgroup, k: &Subgroup) -> usize {
    let ch = g.left_cosets(h);
    let ck = g.left_cosets(k);
    let mut coset_k = vec![0; g.order()];
    for (i, c) in ck.iter().enumerate() {
        for &x in c {
            coset_k[x] = i;
        }
    }
    let mut coset_h = vec![0; g.order()];
    for (i, c) in ch.iter().enumerate() {
        for &x in c {
            coset_h[x] = i;
        }
    }
    let mut count = 0;
    for target in &ck {
        let y = target[0];
        // f(xH) = x y K
        let mut f = vec![usize::MAX; ch.len()];
        let mut ok = true;
        for x in 0..g.order() {
            let img = coset_k[g.mul(x, y)];
            let slot = &mut f[coset_h[x]];
            if *slot == usize::MAX {
                *slot = img;
            } else if *slot != img {
                ok = false;
                break;
            }
        }
        if ok {
            ok = (0..g.order()).all(|s| {
                ch.iter().all(|c| {
                    f[coset_h[g.mul(s, c[0])]] == coset_k[g.mul(s, ck[f[coset_h[c[0]]]][0])]
                })
            });
        }
        if ok {
            count += 1;
        }
    }
    count
}

/// The category of pointed orbits `(Γ/H, γH)`, `H` in the family, with the
/// maps preserving base points.
#[derive(Clone, Debug)]
pub struct PointedOrbitCategory {
    pub cat: Arc<FinCategory>,
    /// `(lattice index of H, least element of γH)`
    pub objects: Vec<(usize, usize)>,
}

/// The comparison functor from the subgroup poset, `H ↦ (Γ/H, H)`.
#[derive(Clone, Debug)]
pub struct PointedEquivalence {
    pub poset: SubgroupPoset,
    pub functor: Functor,
    pub fully_faithful: bool,
    /// for each pointed object, a subgroup whose image is isomorphic to it
    pub preimages: Vec<Option<usize>>,
}

impl PointedEquivalence {
    pub fn is_equivalence(&self) -> bool {
        self.fully_faithful && self.preimages.iter().all(|p| p.is_some())
    }
}

pub fn pointed_orbit_category(
    family: &Family,
) -> Result<(PointedOrbitCategory, PointedEquivalence)> {
    let g = family.group().clone();
    let lat = g.lattice()?;
    let mut objects = Vec::new();
    for &i in family.members() {
        for c in g.left_cosets(lat.get(i)) {
            objects.push((i, c[0]));
        }
    }
    let n = objects.len();
    let mut ends = Vec::new();
    let mut id_of = HashMap::new();
    for (a, &(h, x)) in objects.iter().enumerate() {
        let xh = g.conjugate(lat.get(h), x);
        for (b, &(k, y)) in objects.iter().enumerate() {
            let yk = g.conjugate(lat.get(k), y);
            if xh.is_subgroup_of(&yk) {
                id_of.insert((a, b), ends.len());
                ends.push((a, b));
            }
        }
    }
    let identity = (0..n).map(|a| id_of[&(a, a)]).collect();
    let names = objects
        .iter()
        .map(|(h, x)| format!("(G/H{h}, {x})"))
        .collect();
    let e2 = ends.clone();
    let cat = Arc::new(FinCategory::new(names, ends, identity, |f, h| {
        id_of[&(e2[f].0, e2[h].1)]
    })?);
    if !cat.is_thin() {
        return Err(Error::Internal("pointed orbit category is not thin".into()));
    }
    let poset = family.subgroup_poset();
    let names: Vec<String> = poset.elements.iter().map(|i| format!("H{i}")).collect();
    let pcat = Arc::new(FinCategory::from_poset(names, &poset.leq)?);
    let obj_of: HashMap<(usize, usize), usize> =
        objects.iter().enumerate().map(|(o, &p)| (p, o)).collect();
    let fobj: Vec<usize> = poset
        .elements
        .iter()
        .map(|&i| obj_of[&(i, PermGroup::IDENTITY)])
        .collect();
    let fmor: Vec<usize> = (0..pcat.morphism_count())
        .map(|m| cat.hom(fobj[pcat.src(m)], fobj[pcat.tgt(m)])[0])
        .collect();
    let functor = Functor::new(pcat, cat.clone(), fobj, fmor)?;
    let fully_faithful = functor.is_fully_faithful();
    let preimages = functor.essential_preimages();
    Ok((
        PointedOrbitCategory { cat, objects },
        PointedEquivalence {
            poset,
            functor,
            fully_faithful,
            preimages,
        },
    ))
}

/// The inclusion `O_{H∩F}(H) → O_F(Γ)`, `H/L ↦ Γ/L`, on skeleta.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub big: Arc<OrbitCategory>,
    pub small: Arc<OrbitCategory>,
    /// element of `H` ↦ element of `Γ`
    pub embed: Vec<usize>,
    /// lattice index in `H` ↦ lattice index in `Γ`
    pub lattice_embed: Vec<usize>,
    pub subgroup: Subgroup,
    pub functor: Functor,
}

pub fn restriction(big: &Arc<OrbitCategory>, h: &Subgroup) -> Result<Restriction> {
    let sub = big.family().intersect_with_subgroup(h)?;
    let small = Arc::new(orbit_category(&sub.family, big.is_skeleton())?);
    let g = big.group();
    let hl = sub.group.lattice()?;
    let gl = g.lattice()?;
    let mut lattice_embed = Vec::with_capacity(hl.len());
    for s in hl.subgroups() {
        let mut m: Vec<usize> = s.members().iter().map(|&x| sub.embed[x]).collect();
        m.sort_unstable();
        let image = g.subgroup_from_members(&m)?;
        lattice_embed.push(gl.index_of(&image).expect("subgroup of the group"));
    }
    let sc = small.cat();
    let objects = (0..small.object_count())
        .map(|o| big.locate(lattice_embed[small.label(o)]).map(|p| p.0))
        .collect::<Result<Vec<_>>>()?;
    let morphisms = (0..sc.morphism_count())
        .map(|f| {
            big.morphism_from_full(
                lattice_embed[small.label(sc.src(f))],
                lattice_embed[small.label(sc.tgt(f))],
                sub.embed[small.coset(f)],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let functor = Functor::new(sc.clone(), big.cat().clone(), objects, morphisms)?;
    Ok(Restriction {
        big: big.clone(),
        small,
        embed: sub.embed,
        lattice_embed,
        subgroup: h.clone(),
        functor,
    })
}

/// `res^Γ_H M`, by precomposition.
pub fn restrict(m: &CatModule, r: &Restriction) -> Result<CatModule> {
    m.pullback(&r.functor)
}

/// Double cosets `H g K` for a fixed object `Γ/K` of the big skeleton.
struct DoubleCosets {
    k_obj: usize,
    dc_of: Vec<usize>,
    /// `(g_i, object of H ∩ g_i K g_i⁻¹ in the small category, lattice index there)`
    summands: Vec<(usize, usize, usize)>,
}

impl Restriction {
    fn double_cosets(&self, k_obj: usize) -> Result<DoubleCosets> {
        let g = self.big.group();
        let k = self.big.subgroup(k_obj);
        let hg = self.small.group();
        let hl = hg.lattice()?;
        let dcs = g.double_cosets(&self.subgroup, k);
        let mut dc_of = vec![0; g.order()];
        let mut summands = Vec::with_capacity(dcs.len());
        for (i, d) in dcs.iter().enumerate() {
            for &x in d {
                dc_of[x] = i;
            }
            let gi = d[0];
            let conj = g.conjugate(k, gi);
            let members: Vec<usize> = (0..hg.order())
                .filter(|&x| conj.contains(self.embed[x]))
                .collect();
            let kg = hl
                .index_of(&hg.subgroup_from_members(&members)?)
                .expect("intersection is a subgroup");
            let (obj, _) = self.small.locate(kg)?;
            summands.push((gi, obj, kg));
        }
        Ok(DoubleCosets {
            k_obj,
            dc_of,
            summands,
        })
    }

    /// Sorts a basis element `c: ι(a) → Γ/K` of `res(Z[hom(-, Γ/K)])` at a
    /// small object `a` into its double coset summand and the corresponding
    /// morphism `a → H/(H ∩ g K g⁻¹)` of the small category.
    fn classify(&self, d: &DoubleCosets, a: usize, c: usize) -> Result<(usize, usize)> {
        let g = self.big.group();
        let l = self.lattice_embed[self.small.label(a)];
        let (_, t) = self.big.locate(l)?;
        let gamma = g.mul(t, self.big.coset(c));
        let i = d.dc_of[gamma];
        let (gi, _, kg) = d.summands[i];
        let k = self.big.subgroup(d.k_obj);
        let hg = self.small.group();
        let h = (0..hg.order())
            .find(|&h| k.contains(g.mul(g.inv(g.mul(self.embed[h], gi)), gamma)))
            .ok_or_else(|| Error::Internal("double coset element not found".into()))?;
        let psi = self.small.morphism_from_full(self.small.label(a), kg, h)?;
        Ok((i, psi))
    }
}

/// A bijection of bases, assembled into mutually inverse natural maps and
/// checked.
fn permutation_iso(
    src: &CatModule,
    tgt: &CatModule,
    row_of: impl Fn(usize, usize) -> Result<usize>,
) -> Result<(NatMap, NatMap)> {
    let cat = src.cat();
    let mut fwd = Vec::with_capacity(cat.object_count());
    let mut bwd = Vec::with_capacity(cat.object_count());
    for c in 0..cat.object_count() {
        let (n, m) = (src.gens(c), tgt.gens(c));
        if n != m {
            return Err(Error::Internal(format!("ranks differ at object {c}")));
        }
        let mut f = IntMatrix::zeros(m, n);
        let mut hit = vec![false; m];
        for col in 0..n {
            let r = row_of(c, col)?;
            if hit[r] {
                return Err(Error::Internal(format!(
                    "basis map is not injective at {c}"
                )));
            }
            hit[r] = true;
            f[(r, col)] = crate::int::Int::ONE;
        }
        bwd.push(f.transpose());
        fwd.push(f);
    }
    let fwd = NatMap { mats: fwd };
    let bwd = NatMap { mats: bwd };
    fwd.check(src, tgt)?;
    bwd.check(tgt, src)?;
    if fwd.then(&bwd) != NatMap::identity(src) || bwd.then(&fwd) != NatMap::identity(tgt) {
        return Err(Error::Internal("basis bijection is not invertible".into()));
    }
    Ok((fwd, bwd))
}

/// `res_H Z[hom(-, Γ/K)] ≅ ⊕_{HgK} Z[hom(-, H/(H ∩ gKg⁻¹))]`.
#[derive(Clone, Debug)]
pub struct DoubleCosetDecomposition {
    /// double coset representatives `g`
    pub representatives: Vec<usize>,
    /// small-category object of each summand
    pub summand_objects: Vec<usize>,
    pub source: CatModule,
    pub target: CatModule,
    pub forward: NatMap,
    pub backward: NatMap,
}

impl DoubleCosetDecomposition {
    pub fn summand_count(&self) -> usize {
        self.representatives.len()
    }
}

/// The double coset isomorphism for the big object `k_obj`.
pub fn double_coset_decomposition(
    r: &Restriction,
    k_obj: usize,
) -> Result<DoubleCosetDecomposition> {
    let d = r.double_cosets(k_obj)?;
    let source = restrict(&CatModule::free(r.big.cat().clone(), k_obj), r)?;
    let sc = r.small.cat();
    let mut target = CatModule::zero(sc.clone());
    for &(_, obj, _) in &d.summands {
        target = target.direct_sum(&CatModule::free(sc.clone(), obj));
    }
    let bc = r.big.cat();
    let (forward, backward) = permutation_iso(&source, &target, |a, col| {
        let c = bc.hom(r.functor.objects[a], k_obj)[col];
        let (i, psi) = r.classify(&d, a, c)?;
        let offset: usize = d.summands[..i]
            .iter()
            .map(|&(_, o, _)| sc.hom(a, o).len())
            .sum();
        Ok(offset + sc.hom_pos(psi))
    })?;
    Ok(DoubleCosetDecomposition {
        representatives: d.summands.iter().map(|s| s.0).collect(),
        summand_objects: d.summands.iter().map(|s| s.1).collect(),
        source,
        target,
        forward,
        backward,
    })
}

/// Co-induction: the right adjoint of restriction. Its value at `Γ/K` is
/// `hom(res Z[hom(-, Γ/K)], M) ≅ ⊕_{HgK} M(H/(H ∩ gKg⁻¹))` by Yoneda.
pub fn coinduce(m: &CatModule, r: &Restriction) -> Result<CatModule> {
    if !Arc::ptr_eq(m.cat(), r.small.cat()) {
        return Err(Error::InvalidInput(
            "module is not over the subgroup's orbit category".into(),
        ));
    }
    let bc = r.big.cat();
    let sc = r.small.cat();
    let nb = bc.object_count();
    let dcs = (0..nb)
        .map(|k| r.double_cosets(k))
        .collect::<Result<Vec<_>>>()?;
    // generator c_i: ι(R_i) → Γ/K of summand i, the image of the identity
    let mut anchors = Vec::with_capacity(nb);
    for (k, d) in dcs.iter().enumerate() {
        let mut v = Vec::with_capacity(d.summands.len());
        for (i, &(_, obj, _)) in d.summands.iter().enumerate() {
            let mut found = None;
            for &c in bc.hom(r.functor.objects[obj], k) {
                if r.classify(d, obj, c)? == (i, sc.identity(obj)) {
                    found = Some(c);
                    break;
                }
            }
            v.push(found.ok_or_else(|| Error::Internal("summand generator missing".into()))?);
        }
        anchors.push(v);
    }
    let offsets: Vec<Vec<usize>> = dcs
        .iter()
        .map(|d| {
            let mut acc = 0;
            let mut o: Vec<usize> = d
                .summands
                .iter()
                .map(|&(_, obj, _)| {
                    let s = acc;
                    acc += m.gens(obj);
                    s
                })
                .collect();
            o.push(acc);
            o
        })
        .collect();
    let gens: Vec<usize> = offsets.iter().map(|o| *o.last().unwrap()).collect();
    let rels: Vec<Vec<SparseVec>> = dcs
        .iter()
        .enumerate()
        .map(|(k, d)| {
            d.summands
                .iter()
                .enumerate()
                .flat_map(|(i, &(_, obj, _))| {
                    m.rels(obj).iter().map(move |x| (i, x)).collect::<Vec<_>>()
                })
                .map(|(i, x)| x.shifted(offsets[k][i]))
                .collect()
        })
        .collect();
    let mut maps = Vec::with_capacity(bc.morphism_count());
    for f in 0..bc.morphism_count() {
        let (k, k2) = (bc.src(f), bc.tgt(f));
        let mut mat = IntMatrix::zeros(gens[k], gens[k2]);
        for (i, &(_, obj, _)) in dcs[k].summands.iter().enumerate() {
            let c = bc.compose(anchors[k][i], f);
            let (j, psi) = r.classify(&dcs[k2], obj, c)?;
            let block = m.map(psi);
            for a in 0..block.rows() {
                for b in 0..block.cols() {
                    mat[(offsets[k][i] + a, offsets[k2][j] + b)] = block[(a, b)].clone();
                }
            }
        }
        maps.push(mat);
    }
    CatModule::new(bc.clone(), gens, rels, maps)
}

/// Compares `hom(res Z[hom(-, Γ/K)], M)` with `hom(Z[hom(-, Γ/K)], coind M)`
/// for every object `Γ/K`.
pub fn verify_coinduction_adjunction(m: &CatModule, r: &Restriction) -> Result<bool> {
    let co = coinduce(m, r)?;
    for k in 0..r.big.object_count() {
        let free = CatModule::free(r.big.cat().clone(), k);
        let left = hom_group(&restrict(&free, r)?, m)?.invariants;
        let right = hom_group(&free, &co)?.invariants;
        if left != right || right != co.value(k) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The functor `p*: O_{F_N}(Γ/N) → O_F(Γ)`, `(Γ/N)/L ↦ Γ/p⁻¹(L)`.
#[derive(Clone, Debug)]
pub struct QuotientFunctor {
    pub big: Arc<OrbitCategory>,
    pub quotient: Arc<OrbitCategory>,
    pub kernel: Subgroup,
    pub proj: Vec<usize>,
    pub lift: Vec<usize>,
    /// lattice index in `Γ/N` ↦ lattice index of the preimage in `Γ`
    pub preimage: Vec<usize>,
    pub functor: Functor,
}

pub fn quotient_functor(big: &Arc<OrbitCategory>, n: &Subgroup) -> Result<QuotientFunctor> {
    let qf = big.family().quotient_family(n)?;
    let quotient = Arc::new(orbit_category(&qf.family, big.is_skeleton())?);
    let g = big.group();
    let gl = g.lattice()?;
    let ql = qf.group.lattice()?;
    let preimage: Vec<usize> = ql
        .subgroups()
        .iter()
        .map(|s| {
            gl.index_of(&g.preimage_subgroup(s, &qf.proj))
                .expect("preimage")
        })
        .collect();
    let qc = quotient.cat();
    let objects = (0..quotient.object_count())
        .map(|o| big.locate(preimage[quotient.label(o)]).map(|p| p.0))
        .collect::<Result<Vec<_>>>()?;
    let morphisms = (0..qc.morphism_count())
        .map(|f| {
            big.morphism_from_full(
                preimage[quotient.label(qc.src(f))],
                preimage[quotient.label(qc.tgt(f))],
                qf.lift[quotient.coset(f)],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let functor = Functor::new(qc.clone(), big.cat().clone(), objects, morphisms)?;
    Ok(QuotientFunctor {
        big: big.clone(),
        quotient,
        kernel: qf.kernel,
        proj: qf.proj,
        lift: qf.lift,
        preimage,
        functor,
    })
}

/// `p_* M = M ∘ p*`.
pub fn quotient_pushforward(m: &CatModule, q: &QuotientFunctor) -> Result<CatModule> {
    m.pullback(&q.functor)
}

/// What `p_*` does to the free module at a big object: zero when `N` is not
/// contained in the label, otherwise the free module at the image, with the
/// isomorphism checked.
#[derive(Clone, Debug)]
pub enum PushedFree {
    Zero,
    Free { object: usize, iso: NatMap },
}

pub fn pushforward_of_free(q: &QuotientFunctor, s_obj: usize) -> Result<PushedFree> {
    let pushed = quotient_pushforward(&CatModule::free(q.big.cat().clone(), s_obj), q)?;
    let s = q.big.subgroup(s_obj);
    if !q.kernel.is_subgroup_of(s) {
        if pushed.total_rank() != 0 {
            return Err(Error::Internal(
                "pushforward of a free module should vanish".into(),
            ));
        }
        return Ok(PushedFree::Zero);
    }
    let qg = q.quotient.group();
    let ql = qg.lattice()?;
    let image = ql
        .index_of(&q.big.group().image_subgroup(s, &q.proj, qg))
        .expect("image subgroup");
    let (object, _) = q.quotient.locate(image)?;
    let qc = q.quotient.cat();
    let target = CatModule::free(qc.clone(), object);
    let g = q.big.group();
    let (iso, _) = permutation_iso(&pushed, &target, |a, col| {
        let c = q.big.cat().hom(q.functor.objects[a], s_obj)[col];
        let (_, t) = q.big.locate(q.preimage[q.quotient.label(a)])?;
        let gamma = g.mul(t, q.big.coset(c));
        let psi = q
            .quotient
            .morphism_from_full(q.quotient.label(a), image, q.proj[gamma])?;
        Ok(qc.hom_pos(psi))
    })?;
    Ok(PushedFree::Free { object, iso })
}

/// `res_F` and `ind_F` between `O_F(Γ)`-modules, `F` the subgroups of a
/// normal `N`, and modules over the group `Γ/N`.
#[derive(Clone, Debug)]
pub struct TrivialActionPair {
    pub orbit: Arc<OrbitCategory>,
    pub quotient: Arc<PermGroup>,
    pub quotient_cat: Arc<FinCategory>,
    pub proj: Vec<usize>,
    /// `Γ/N` as a category → `O_F(Γ)`, onto the automorphisms of `Γ/N`
    pub evaluation: Functor,
    /// `O_F(Γ) → Γ/N`, `γK ↦ (γN)⁻¹`
    pub projection: Functor,
}

pub fn trivial_action_pair(g: &Arc<PermGroup>, n: &Subgroup) -> Result<TrivialActionPair> {
    let q = g.quotient(n)?;
    let family = Family::generated(g.clone(), std::slice::from_ref(n))?;
    let orbit = Arc::new(orbit_category(&family, true)?);
    let quotient = Arc::new(q.group);
    let quotient_cat = Arc::new(FinCategory::from_group(&quotient));
    let n_idx = g.lattice()?.index_of(n).expect("normal subgroup");
    let (n_obj, _) = orbit.locate(n_idx)?;
    let ev_mor = (0..quotient.order())
        .map(|x| {
            orbit
                .morphism(n_obj, n_obj, q.lift[quotient.inv(x)])
                .ok_or_else(|| Error::Internal("automorphism of G/N missing".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let evaluation = Functor::new(
        quotient_cat.clone(),
        orbit.cat().clone(),
        vec![n_obj],
        ev_mor,
    )?;
    let oc = orbit.cat();
    let pr_mor = (0..oc.morphism_count())
        .map(|f| q.proj[g.inv(orbit.coset(f))])
        .collect();
    let projection = Functor::new(
        oc.clone(),
        quotient_cat.clone(),
        vec![0; oc.object_count()],
        pr_mor,
    )?;
    Ok(TrivialActionPair {
        orbit,
        quotient,
        quotient_cat,
        proj: q.proj,
        evaluation,
        projection,
    })
}

impl TrivialActionPair {
    /// Evaluation at `Γ/N`.
    pub fn res_f(&self, m: &CatModule) -> Result<CatModule> {
        m.pullback(&self.evaluation)
    }

    /// `Γ/H ↦ P^H = P`, with `γK` acting through `γN`.
    pub fn ind_f(&self, p: &CatModule) -> Result<CatModule> {
        p.pullback(&self.projection)
    }
}

/// The fixed point module `Γ/H ↦ M^H` of a module over the one-object
/// category of `Γ`; the map of `γK: Γ/H → Γ/K` sends `v ∈ M^K` to `γv`.
pub fn fixed_point_coefficients(m: &CatModule, orbit: &OrbitCategory) -> Result<CatModule> {
    m.require_free_values()?;
    let g = orbit.group();
    if m.cat().object_count() != 1 || m.cat().morphism_count() != g.order() {
        return Err(Error::InvalidInput(
            "module is not over the group's category".into(),
        ));
    }
    let n = m.gens(0);
    // left action: rho(g) = M(g^-1)
    let rho = |x: usize| m.map(g.inv(x));
    let mut bases = Vec::with_capacity(orbit.object_count());
    for o in 0..orbit.object_count() {
        let h = orbit.subgroup(o);
        let basis = if h.is_trivial() {
            (0..n).map(SparseVec::unit).collect()
        } else {
            let cols: Vec<SparseVec> = (0..n)
                .map(|j| {
                    let mut parts = Vec::new();
                    for (b, &x) in h.generators().iter().enumerate() {
                        let mut col = rho(x).sparse_column(j);
                        col = col.add_scaled(&SparseVec::unit(j), &crate::int::Int::from(-1));
                        parts.push(col.shifted(b * n));
                    }
                    parts.into_iter().fold(SparseVec::new(), |a, p| {
                        a.add_scaled(&p, &crate::int::Int::ONE)
                    })
                })
                .collect();
            kernel_from_columns(&cols)
        };
        bases.push(CoordLattice::new(basis));
    }
    let cat = orbit.cat();
    let mut maps = Vec::with_capacity(cat.morphism_count());
    for f in 0..cat.morphism_count() {
        let (a, b) = (cat.src(f), cat.tgt(f));
        let r = rho(orbit.coset(f));
        let cols = bases[b]
            .basis()
            .iter()
            .map(|v| {
                bases[a]
                    .coordinates(&r.mul_sparse(v))
                    .ok_or_else(|| Error::Internal("fixed vector leaves the fixed lattice".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        maps.push(IntMatrix::from_sparse_columns(bases[a].rank(), &cols));
    }
    CatModule::new(
        cat.clone(),
        bases.iter().map(|b| b.rank()).collect(),
        vec![Vec::new(); cat.object_count()],
        maps,
    )
}
