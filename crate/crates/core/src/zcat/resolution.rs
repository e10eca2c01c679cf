//! Free modules, free covers and free resolutions.
//!
//! A free module `⊕_j Z[hom(-, c_j)]` is kept implicit: its value at `e` has
//! the basis `(j, φ)` with `φ: e → c_j`, laid out summand by summand in hom
//! order. Syzygies are sublattices of these values.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::budget;
use crate::linalg::{kernel_from_columns, transpose, IntSystem, SolveOutcome, SparseVec};
use crate::matrix::IntMatrix;
use crate::zcat::category::FinCategory;
use crate::zcat::module::{CatModule, NatMap};
use crate::{Error, Result};

/// `⊕_j Z[hom(-, c_j)]`.
#[derive(Clone, Debug)]
pub struct FreeModule {
    cat: Arc<FinCategory>,
    summands: Vec<usize>,
    /// `offsets[e][j]`, with a final entry equal to the rank at `e`
    offsets: Vec<Vec<usize>>,
}

impl FreeModule {
    pub fn new(cat: Arc<FinCategory>, summands: Vec<usize>) -> FreeModule {
        let offsets = (0..cat.object_count())
            .map(|e| {
                let mut acc = 0;
                let mut v = Vec::with_capacity(summands.len() + 1);
                for &c in &summands {
                    v.push(acc);
                    acc += cat.hom(e, c).len();
                }
                v.push(acc);
                v
            })
            .collect();
        FreeModule {
            cat,
            summands,
            offsets,
        }
    }

    pub fn cat(&self) -> &Arc<FinCategory> {
        &self.cat
    }

    /// Objects `c_j` of the representable summands.
    pub fn summands(&self) -> &[usize] {
        &self.summands
    }

    pub fn rank(&self, e: usize) -> usize {
        *self.offsets[e].last().unwrap()
    }

    pub fn total_rank(&self) -> usize {
        (0..self.cat.object_count()).map(|e| self.rank(e)).sum()
    }

    /// Basis index of `(j, φ)` at `e = src φ`.
    pub fn index(&self, j: usize, phi: usize) -> usize {
        self.offsets[self.cat.src(phi)][j] + self.cat.hom_pos(phi)
    }

    /// `(j, φ)` for a basis index at `e`.
    pub fn decode(&self, e: usize, idx: usize) -> (usize, usize) {
        let offs = &self.offsets[e];
        let j = offs.partition_point(|&o| o <= idx) - 1;
        let phi = self.cat.hom(e, self.summands[j])[idx - offs[j]];
        (j, phi)
    }

    /// The generator of summand `j`, as an element of the value at `c_j`.
    pub fn generator(&self, j: usize) -> SparseVec {
        SparseVec::unit(self.index(j, self.cat.identity(self.summands[j])))
    }

    /// `F(ψ)(v)` for `ψ: e → d` and `v` in the value at `d`.
    pub fn act(&self, psi: usize, v: &SparseVec) -> SparseVec {
        let d = self.cat.tgt(psi);
        let pairs = v
            .iter()
            .map(|(idx, c)| {
                let (j, phi) = self.decode(d, *idx);
                (self.index(j, self.cat.compose(psi, phi)), c.clone())
            })
            .collect();
        SparseVec::from_pairs(pairs)
    }

    /// The module as an explicit [`CatModule`].
    pub fn to_module(&self) -> CatModule {
        let cat = &self.cat;
        let n = cat.object_count();
        let maps = (0..cat.morphism_count())
            .map(|psi| {
                let (e, d) = (cat.src(psi), cat.tgt(psi));
                let cols: Vec<SparseVec> = (0..self.rank(d))
                    .map(|i| self.act(psi, &SparseVec::unit(i)))
                    .collect();
                IntMatrix::from_sparse_columns(self.rank(e), &cols)
            })
            .collect();
        CatModule::new_unchecked(
            cat.clone(),
            (0..n).map(|e| self.rank(e)).collect(),
            vec![Vec::new(); n],
            maps,
        )
        .expect("free module shapes")
    }
}

/// Something a free module can map into: a module with free values or a
/// free module.
#[derive(Clone, Copy)]
pub enum Ambient<'a> {
    Module(&'a CatModule),
    Free(&'a FreeModule),
}

impl Ambient<'_> {
    pub fn rank(&self, e: usize) -> usize {
        match self {
            Ambient::Module(m) => m.gens(e),
            Ambient::Free(f) => f.rank(e),
        }
    }

    pub fn act(&self, psi: usize, v: &SparseVec) -> SparseVec {
        match self {
            Ambient::Module(m) => m.map(psi).mul_sparse(v),
            Ambient::Free(f) => f.act(psi, v),
        }
    }
}

/// A map out of a free module, given by the images of its generators.
pub fn apply_map(
    free: &FreeModule,
    images: &[SparseVec],
    target: Ambient<'_>,
    e: usize,
    v: &SparseVec,
) -> SparseVec {
    let mut out = SparseVec::new();
    for (idx, c) in v.iter() {
        let (j, phi) = free.decode(e, *idx);
        out = out.add_scaled(&target.act(phi, &images[j]), c);
    }
    out
}

/// Images of all basis elements of the free module's value at `e`.
pub fn map_columns(
    free: &FreeModule,
    images: &[SparseVec],
    target: Ambient<'_>,
    e: usize,
) -> Vec<SparseVec> {
    (0..free.rank(e))
        .map(|idx| {
            let (j, phi) = free.decode(e, idx);
            target.act(phi, &images[j])
        })
        .collect()
}

/// How generators are picked when covering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoverOrder {
    /// objects by decreasing in-degree, bases in computed order
    #[default]
    Canonical,
    /// objects and basis vectors shuffled by a seeded generator
    Shuffled(u64),
}

/// Picks generators of the submodule with per-object lattice bases `sub`
/// inside `amb`, greedily, one representable summand per generator.
fn cover(
    cat: &Arc<FinCategory>,
    amb: Ambient<'_>,
    sub: &[Vec<SparseVec>],
    order: CoverOrder,
    salt: u64,
) -> Result<(Vec<usize>, Vec<SparseVec>)> {
    let n = cat.object_count();
    let mut objects: Vec<usize> = (0..n).collect();
    let mut sub: Vec<Vec<SparseVec>> = sub.to_vec();
    match order {
        CoverOrder::Canonical => {
            objects.sort_by_key(|&c| (std::cmp::Reverse(cat.in_degree(c)), c));
        }
        CoverOrder::Shuffled(seed) => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            objects.shuffle(&mut rng);
            for b in sub.iter_mut() {
                b.shuffle(&mut rng);
            }
        }
    }
    let mut image: Vec<Vec<SparseVec>> = vec![Vec::new(); n];
    let mut done = vec![false; n];
    let mut summands = Vec::new();
    let mut images = Vec::new();
    let mut rank = 0usize;
    for &c in &objects {
        let dim = amb.rank(c);
        let mut sys: Option<IntSystem> = None;
        for b in &sub[c] {
            if !image[c].is_empty() {
                let s = sys.get_or_insert_with(|| {
                    IntSystem::new(transpose(&image[c], dim), image[c].len())
                });
                if matches!(s.solve(&b.to_dense(dim)), SolveOutcome::Solution(_)) {
                    continue;
                }
            }
            rank += (0..n).map(|e| cat.hom(e, c).len()).sum::<usize>();
            if rank > budget::max_rank() {
                return Err(Error::Budget(format!(
                    "free resolution stage exceeds the rank budget {}",
                    budget::max_rank()
                )));
            }
            for d in 0..n {
                if done[d] {
                    continue;
                }
                for &psi in cat.hom(d, c) {
                    image[d].push(amb.act(psi, b));
                }
            }
            sys = None;
            summands.push(c);
            images.push(b.clone());
        }
        done[c] = true;
        image[c] = Vec::new();
    }
    Ok((summands, images))
}

/// One stage `F_k` of a resolution with the images `d_k(gen_j)`.
#[derive(Clone, Debug)]
pub struct Stage {
    pub free: FreeModule,
    pub images: Vec<SparseVec>,
}

/// A free resolution `… → F_1 → F_0 → M`, built on demand.
#[derive(Clone, Debug)]
pub struct Resolution {
    target: CatModule,
    order: CoverOrder,
    stages: Vec<Stage>,
    /// `kernels[k][e]`: basis of `ker(d_k)` at `e`
    kernels: Vec<Vec<Vec<SparseVec>>>,
}

impl Resolution {
    /// Starts a resolution of a module with free values.
    pub fn new(target: &CatModule, order: CoverOrder) -> Result<Resolution> {
        target.require_free_values()?;
        let cat = target.cat().clone();
        let full: Vec<Vec<SparseVec>> = (0..cat.object_count())
            .map(|e| (0..target.gens(e)).map(SparseVec::unit).collect())
            .collect();
        let (summands, images) = cover(&cat, Ambient::Module(target), &full, order, 0)?;
        Ok(Resolution {
            target: target.clone(),
            order,
            stages: vec![Stage {
                free: FreeModule::new(cat, summands),
                images,
            }],
            kernels: Vec::new(),
        })
    }

    pub fn cat(&self) -> &Arc<FinCategory> {
        self.target.cat()
    }

    pub fn target(&self) -> &CatModule {
        &self.target
    }

    /// Number of stages built so far.
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn stage(&self, k: usize) -> &Stage {
        &self.stages[k]
    }

    /// Where `d_k` lands.
    pub fn codomain(&self, k: usize) -> Ambient<'_> {
        if k == 0 {
            Ambient::Module(&self.target)
        } else {
            Ambient::Free(&self.stages[k - 1].free)
        }
    }

    /// Number of generators of each built stage.
    pub fn ranks(&self) -> Vec<usize> {
        self.stages
            .iter()
            .map(|s| s.free.summands().len())
            .collect()
    }

    /// Basis of `ker(d_k)` at every object (the syzygy `Syz_{k+1}`).
    pub fn kernel(&mut self, k: usize) -> Result<&[Vec<SparseVec>]> {
        self.extend_to(k)?;
        while self.kernels.len() <= k {
            let i = self.kernels.len();
            let st = &self.stages[i];
            let amb = self.codomain(i);
            let bases = (0..self.cat().object_count())
                .map(|e| kernel_from_columns(&map_columns(&st.free, &st.images, amb, e)))
                .collect();
            self.kernels.push(bases);
        }
        Ok(&self.kernels[k])
    }

    /// Ensures stages `0..=n` exist.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.stages.len() <= n {
            let k = self.stages.len();
            let sub = self.kernel(k - 1)?.to_vec();
            let cat = self.cat().clone();
            let prev = &self.stages[k - 1].free;
            let (summands, images) = cover(&cat, Ambient::Free(prev), &sub, self.order, k as u64)?;
            self.stages.push(Stage {
                free: FreeModule::new(cat, summands),
                images,
            });
        }
        Ok(())
    }

    /// Whether the stage is zero (so the resolution has stopped).
    pub fn stage_is_zero(&self, k: usize) -> bool {
        self.stages[k].free.summands().is_empty()
    }

    /// Re-verifies exactness: `d_{k-1} d_k = 0` on generators, and the image
    /// of `d_k` contains the kernel of `d_{k-1}` (the image of `d_0` is
    /// everything) at every object.
    pub fn verify_exactness(&mut self) -> Result<()> {
        let cat = self.cat().clone();
        for k in 0..self.stages.len() {
            let expected: Vec<Vec<SparseVec>> = if k == 0 {
                (0..cat.object_count())
                    .map(|e| (0..self.target.gens(e)).map(SparseVec::unit).collect())
                    .collect()
            } else {
                self.kernel(k - 1)?.to_vec()
            };
            let st = &self.stages[k];
            if k > 0 {
                let prev = &self.stages[k - 1];
                let amb = self.codomain(k - 1);
                for (j, x) in st.images.iter().enumerate() {
                    if !apply_map(&prev.free, &prev.images, amb, st.free.summands()[j], x)
                        .is_empty()
                    {
                        return Err(Error::Internal(format!("d∘d is not zero at stage {k}")));
                    }
                }
            }
            let amb = self.codomain(k);
            for e in 0..cat.object_count() {
                let cols = map_columns(&st.free, &st.images, amb, e);
                let dim = amb.rank(e);
                let sys = IntSystem::new(transpose(&cols, dim), cols.len());
                if !expected[e]
                    .iter()
                    .all(|v| matches!(sys.solve(&v.to_dense(dim)), SolveOutcome::Solution(_)))
                {
                    return Err(Error::Internal(format!(
                        "resolution is not exact at stage {k}, object {e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `d_k` as an explicit natural map between materialized modules.
    pub fn differential(&self, k: usize) -> NatMap {
        let st = &self.stages[k];
        let amb = self.codomain(k);
        NatMap {
            mats: (0..self.cat().object_count())
                .map(|e| {
                    IntMatrix::from_sparse_columns(
                        amb.rank(e),
                        &map_columns(&st.free, &st.images, amb, e),
                    )
                })
                .collect(),
        }
    }
}

/// A free resolution through stage `n`, with exactness verified.
pub fn free_resolution(m: &CatModule, n: usize) -> Result<Resolution> {
    free_resolution_with(m, n, CoverOrder::Canonical)
}

pub fn free_resolution_with(m: &CatModule, n: usize, order: CoverOrder) -> Result<Resolution> {
    let mut r = Resolution::new(m, order)?;
    r.extend_to(n)?;
    r.verify_exactness()?;
    Ok(r)
}

/// A free cover `F_0 → M` as explicit modules.
pub fn free_cover(m: &CatModule) -> Result<(CatModule, NatMap, Vec<usize>)> {
    let r = Resolution::new(m, CoverOrder::Canonical)?;
    let st = r.stage(0);
    Ok((
        st.free.to_module(),
        r.differential(0),
        st.free.summands().to_vec(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named::cyclic;

    #[test]
    fn cyclic_group_resolution_is_periodic() {
        let cat = Arc::new(FinCategory::from_group(&cyclic(2)));
        let z = CatModule::constant(cat);
        let r = free_resolution(&z, 4).unwrap();
        assert_eq!(r.ranks(), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn terminal_object_gives_length_zero() {
        let leq = vec![vec![true, true], vec![false, true]];
        let cat = Arc::new(FinCategory::from_poset(vec!["a".into(), "b".into()], &leq).unwrap());
        let mut r = Resolution::new(&CatModule::constant(cat), CoverOrder::Canonical).unwrap();
        r.extend_to(1).unwrap();
        assert_eq!(r.ranks(), vec![1, 0]);
        r.verify_exactness().unwrap();
    }

    #[test]
    fn free_module_act_matches_materialized() {
        let g = cyclic(3);
        let cat = Arc::new(FinCategory::from_group(&g));
        let f = FreeModule::new(cat.clone(), vec![0, 0]);
        let m = f.to_module();
        m.validate().unwrap();
        let p = CatModule::free(cat, 0);
        assert!(m.same_presentation(&p.direct_sum(&p)));
    }
}
