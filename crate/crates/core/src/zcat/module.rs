//! Modules over a finite category: contravariant functors to finitely
//! generated abelian groups, and natural maps between them.

use std::sync::Arc;

use crate::int::Int;
use crate::linalg::{CoordLattice, Echelon, SparseVec};
use crate::matrix::IntMatrix;
use crate::permgroup::PermGroup;
use crate::zcat::abgroup::AbGroupInvariants;
use crate::zcat::category::{FinCategory, Functor};
use crate::{Error, Result};

/// A contravariant functor `C → Ab`.
///
/// The value at `c` is `Z^gens[c] / span(rels[c])`. For `f: a → b`,
/// `maps[f]` is the matrix of `M(f): M(b) → M(a)` on generators, with
/// `gens[a]` rows and `gens[b]` columns.
#[derive(Clone, Debug)]
pub struct CatModule {
    cat: Arc<FinCategory>,
    gens: Vec<usize>,
    rels: Vec<Vec<SparseVec>>,
    maps: Vec<IntMatrix>,
}

impl CatModule {
    /// Builds and validates a module.
    pub fn new(
        cat: Arc<FinCategory>,
        gens: Vec<usize>,
        rels: Vec<Vec<SparseVec>>,
        maps: Vec<IntMatrix>,
    ) -> Result<CatModule> {
        let m = CatModule::new_unchecked(cat, gens, rels, maps)?;
        m.validate()?;
        Ok(m)
    }

    /// Builds a module checking only matrix shapes.
    pub fn new_unchecked(
        cat: Arc<FinCategory>,
        gens: Vec<usize>,
        rels: Vec<Vec<SparseVec>>,
        maps: Vec<IntMatrix>,
    ) -> Result<CatModule> {
        let n = cat.object_count();
        if gens.len() != n || rels.len() != n || maps.len() != cat.morphism_count() {
            return Err(Error::InvalidInput(
                "module data has the wrong shape".into(),
            ));
        }
        for (f, m) in maps.iter().enumerate() {
            if m.rows() != gens[cat.src(f)] || m.cols() != gens[cat.tgt(f)] {
                return Err(Error::InvalidInput(format!(
                    "structure map of morphism {f} has the wrong size"
                )));
            }
        }
        for (c, rs) in rels.iter().enumerate() {
            if rs
                .iter()
                .any(|r| r.max_index().is_some_and(|i| i >= gens[c]))
            {
                return Err(Error::InvalidInput(format!("relation out of range at {c}")));
            }
        }
        Ok(CatModule {
            cat,
            gens,
            rels,
            maps,
        })
    }

    /// The constant module with value `Z/n` (`n = 0` gives `Z`).
    pub fn constant_mod(cat: Arc<FinCategory>, n: i64) -> CatModule {
        let k = cat.object_count();
        let rels = if n == 0 || n == 1 {
            vec![Vec::new(); k]
        } else {
            vec![vec![SparseVec::from_pairs(vec![(0, Int::from(n))])]; k]
        };
        let gens = if n == 1 { vec![0; k] } else { vec![1; k] };
        let maps = (0..cat.morphism_count())
            .map(|_| {
                if n == 1 {
                    IntMatrix::zeros(0, 0)
                } else {
                    IntMatrix::identity(1)
                }
            })
            .collect();
        CatModule {
            cat,
            gens,
            rels,
            maps,
        }
    }

    /// The constant module `Z`.
    pub fn constant(cat: Arc<FinCategory>) -> CatModule {
        CatModule::constant_mod(cat, 0)
    }

    pub fn zero(cat: Arc<FinCategory>) -> CatModule {
        CatModule::constant_mod(cat, 1)
    }

    /// The representable module `Z[hom(-, c)]`.
    pub fn free(cat: Arc<FinCategory>, c: usize) -> CatModule {
        let n = cat.object_count();
        let gens: Vec<usize> = (0..n).map(|d| cat.hom(d, c).len()).collect();
        let maps = (0..cat.morphism_count())
            .map(|psi| {
                let (e, d) = (cat.src(psi), cat.tgt(psi));
                let mut m = IntMatrix::zeros(gens[e], gens[d]);
                for (k, &phi) in cat.hom(d, c).iter().enumerate() {
                    m[(cat.hom_pos(cat.compose(psi, phi)), k)] = Int::ONE;
                }
                m
            })
            .collect();
        CatModule {
            cat,
            gens,
            rels: vec![Vec::new(); n],
            maps,
        }
    }

    /// A left representation `rho` of a group, as a module over its
    /// one-object category: `M(g) = rho(g^-1)`.
    pub fn from_representation(
        cat: Arc<FinCategory>,
        g: &PermGroup,
        rho: &[IntMatrix],
        rels: Vec<SparseVec>,
    ) -> Result<CatModule> {
        if cat.object_count() != 1 || cat.morphism_count() != g.order() || rho.len() != g.order() {
            return Err(Error::InvalidInput(
                "representation does not match the group category".into(),
            ));
        }
        let n = rho[0].rows();
        let maps = (0..g.order()).map(|x| rho[g.inv(x)].clone()).collect();
        CatModule::new(cat, vec![n], vec![rels], maps)
    }

    pub fn cat(&self) -> &Arc<FinCategory> {
        &self.cat
    }

    pub fn gens(&self, c: usize) -> usize {
        self.gens[c]
    }

    pub fn rels(&self, c: usize) -> &[SparseVec] {
        &self.rels[c]
    }

    pub fn map(&self, f: usize) -> &IntMatrix {
        &self.maps[f]
    }

    /// Whether every value is presented without relations.
    pub fn has_free_values(&self) -> bool {
        self.rels.iter().all(|r| r.is_empty())
    }

    pub fn require_free_values(&self) -> Result<()> {
        if self.has_free_values() {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "this operation needs a module with torsion-free presented values".into(),
            ))
        }
    }

    pub fn value(&self, c: usize) -> AbGroupInvariants {
        AbGroupInvariants::of_presentation(self.gens[c], &self.rels[c])
    }

    /// Total number of generators over all objects.
    pub fn total_rank(&self) -> usize {
        self.gens.iter().sum()
    }

    fn rel_lattice(&self, c: usize) -> Echelon {
        let mut e = Echelon::new();
        for r in &self.rels[c] {
            e.insert_plain(r.clone());
        }
        e
    }

    /// Checks relations are respected and functoriality holds, exhaustively.
    pub fn validate(&self) -> Result<()> {
        let cat = &self.cat;
        let rel: Vec<Echelon> = (0..cat.object_count())
            .map(|c| self.rel_lattice(c))
            .collect();
        let zero_mod = |c: usize, m: &IntMatrix| -> bool {
            (0..m.cols()).all(|j| rel[c].contains(&m.sparse_column(j)))
        };
        for f in 0..cat.morphism_count() {
            let (a, b) = (cat.src(f), cat.tgt(f));
            for r in &self.rels[b] {
                if !rel[a].contains(&self.maps[f].mul_sparse(r)) {
                    return Err(Error::InvalidInput(format!(
                        "structure map of morphism {f} does not respect relations"
                    )));
                }
            }
            for &g in cat.out(b) {
                let lhs = &self.maps[cat.compose(f, g)];
                let rhs = self.maps[f].mul(&self.maps[g]);
                if !zero_mod(a, &lhs.sub(&rhs)) {
                    return Err(Error::InvalidInput(format!(
                        "functoriality fails for morphisms {f} and {g}"
                    )));
                }
            }
        }
        for c in 0..cat.object_count() {
            let id = &self.maps[cat.identity(c)];
            if !zero_mod(c, &id.sub(&IntMatrix::identity(self.gens[c]))) {
                return Err(Error::InvalidInput(format!(
                    "identity not preserved at {c}"
                )));
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &CatModule) -> CatModule {
        assert!(Arc::ptr_eq(&self.cat, &other.cat));
        let n = self.cat.object_count();
        let gens = (0..n).map(|c| self.gens[c] + other.gens[c]).collect();
        let rels = (0..n)
            .map(|c| {
                let mut r = self.rels[c].clone();
                r.extend(other.rels[c].iter().map(|v| v.shifted(self.gens[c])));
                r
            })
            .collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        CatModule {
            cat: self.cat.clone(),
            gens,
            rels,
            maps,
        }
    }

    /// Precomposition with a functor into this module's category.
    pub fn pullback(&self, f: &Functor) -> Result<CatModule> {
        if !Arc::ptr_eq(&f.target, &self.cat) {
            return Err(Error::InvalidInput(
                "functor does not land in the module's category".into(),
            ));
        }
        CatModule::new_unchecked(
            f.source.clone(),
            f.objects.iter().map(|&c| self.gens[c]).collect(),
            f.objects.iter().map(|&c| self.rels[c].clone()).collect(),
            f.morphisms.iter().map(|&m| self.maps[m].clone()).collect(),
        )
    }

    /// Equality of presentations (same generators, relations, maps).
    pub fn same_presentation(&self, other: &CatModule) -> bool {
        self.gens == other.gens && self.rels == other.rels && self.maps == other.maps
    }
}

/// A natural map `M → N`, given per object by a matrix with `N.gens(c)`
/// rows and `M.gens(c)` columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatMap {
    pub mats: Vec<IntMatrix>,
}

impl NatMap {
    pub fn identity(m: &CatModule) -> NatMap {
        NatMap {
            mats: (0..m.cat.object_count())
                .map(|c| IntMatrix::identity(m.gens(c)))
                .collect(),
        }
    }

    pub fn zero(m: &CatModule, n: &CatModule) -> NatMap {
        NatMap {
            mats: (0..m.cat.object_count())
                .map(|c| IntMatrix::zeros(n.gens(c), m.gens(c)))
                .collect(),
        }
    }

    /// `other ∘ self`
    pub fn then(&self, other: &NatMap) -> NatMap {
        NatMap {
            mats: self
                .mats
                .iter()
                .zip(&other.mats)
                .map(|(a, b)| b.mul(a))
                .collect(),
        }
    }

    /// Checks shapes, relation compatibility and naturality modulo relations.
    pub fn check(&self, m: &CatModule, n: &CatModule) -> Result<()> {
        let cat = m.cat();
        let rel: Vec<Echelon> = (0..cat.object_count()).map(|c| n.rel_lattice(c)).collect();
        for c in 0..cat.object_count() {
            let s = &self.mats[c];
            if s.rows() != n.gens(c) || s.cols() != m.gens(c) {
                return Err(Error::InvalidInput(format!(
                    "natural map has the wrong size at {c}"
                )));
            }
            for r in m.rels(c) {
                if !rel[c].contains(&s.mul_sparse(r)) {
                    return Err(Error::InvalidInput(format!(
                        "natural map does not respect relations at {c}"
                    )));
                }
            }
        }
        for f in 0..cat.morphism_count() {
            let (a, b) = (cat.src(f), cat.tgt(f));
            let d = self.mats[a].mul(m.map(f)).sub(&n.map(f).mul(&self.mats[b]));
            if !(0..d.cols()).all(|j| rel[a].contains(&d.sparse_column(j))) {
                return Err(Error::InvalidInput(format!(
                    "naturality fails at morphism {f}"
                )));
            }
        }
        Ok(())
    }

    /// Whether `self` and `other` agree as maps into `n` (modulo relations).
    pub fn equal_mod(&self, other: &NatMap, n: &CatModule) -> bool {
        self.mats
            .iter()
            .zip(&other.mats)
            .enumerate()
            .all(|(c, (a, b))| {
                let rel = n.rel_lattice(c);
                let d = a.sub(b);
                (0..d.cols()).all(|j| rel.contains(&d.sparse_column(j)))
            })
    }
}

/// The objectwise kernel of a natural map between modules with free values.
pub fn kernel(m: &CatModule, n: &CatModule, s: &NatMap) -> Result<(CatModule, NatMap)> {
    m.require_free_values()?;
    n.require_free_values()?;
    let cat = m.cat().clone();
    let bases: Vec<Vec<SparseVec>> = (0..cat.object_count())
        .map(|c| {
            let cols: Vec<SparseVec> = (0..m.gens(c)).map(|j| s.mats[c].sparse_column(j)).collect();
            crate::linalg::kernel_from_columns(&cols)
        })
        .collect();
    let lattices: Vec<CoordLattice> = bases.iter().map(|b| CoordLattice::new(b.clone())).collect();
    let gens: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let mut maps = Vec::with_capacity(cat.morphism_count());
    for f in 0..cat.morphism_count() {
        let (a, b) = (cat.src(f), cat.tgt(f));
        let cols = bases[b]
            .iter()
            .map(|v| {
                lattices[a]
                    .coordinates(&m.map(f).mul_sparse(v))
                    .ok_or_else(|| Error::Internal("kernel is not a submodule".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        maps.push(IntMatrix::from_sparse_columns(gens[a], &cols));
    }
    let k = CatModule::new(
        cat.clone(),
        gens,
        vec![Vec::new(); cat.object_count()],
        maps,
    )?;
    let inclusion = NatMap {
        mats: (0..cat.object_count())
            .map(|c| IntMatrix::from_sparse_columns(m.gens(c), &bases[c]))
            .collect(),
    };
    Ok((k, inclusion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named::cyclic;

    #[test]
    fn free_module_over_group_is_group_ring() {
        let g = cyclic(3);
        let cat = Arc::new(FinCategory::from_group(&g));
        let p = CatModule::free(cat.clone(), 0);
        assert_eq!(p.gens(0), 3);
        p.validate().unwrap();
        CatModule::constant(cat.clone()).validate().unwrap();
        CatModule::constant_mod(cat, 2).validate().unwrap();
    }

    #[test]
    fn free_over_chain_top() {
        let leq = vec![vec![true, true], vec![false, true]];
        let cat = Arc::new(FinCategory::from_poset(vec!["a".into(), "b".into()], &leq).unwrap());
        let p = CatModule::free(cat, 1);
        assert_eq!((p.gens(0), p.gens(1)), (1, 1));
    }
}
