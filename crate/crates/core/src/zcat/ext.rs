//! Ext groups from free resolutions.

use crate::int::Int;
use crate::linalg::SparseVec;
use crate::zcat::abgroup::{subquotient, AbGroupInvariants};
use crate::zcat::module::CatModule;
use crate::zcat::resolution::{CoverOrder, Resolution};
use crate::{Error, Result};

/// The cochain complex `hom(F_•, N)` with `hom(F_k, N) = ⊕_j N(c_j)`.
struct Cochains<'a> {
    res: &'a Resolution,
    n: &'a CatModule,
}

impl Cochains<'_> {
    fn offsets(&self, k: usize) -> Vec<usize> {
        let mut acc = 0;
        let mut v = Vec::new();
        for &c in self.res.stage(k).free.summands() {
            v.push(acc);
            acc += self.n.gens(c);
        }
        v.push(acc);
        v
    }

    fn dim(&self, k: usize) -> usize {
        *self.offsets(k).last().unwrap()
    }

    fn relations(&self, k: usize) -> Vec<SparseVec> {
        let offs = self.offsets(k);
        let mut out = Vec::new();
        for (j, &c) in self.res.stage(k).free.summands().iter().enumerate() {
            out.extend(self.n.rels(c).iter().map(|r| r.shifted(offs[j])));
        }
        out
    }

    /// Columns of `δ^k: C^k → C^{k+1}`.
    fn coboundary(&self, k: usize) -> Vec<SparseVec> {
        let src = self.offsets(k);
        let dst = self.offsets(k + 1);
        let fk = &self.res.stage(k).free;
        let next = self.res.stage(k + 1);
        let mut cols: Vec<Vec<(usize, Int)>> = vec![Vec::new(); *src.last().unwrap()];
        for (l, y) in next.images.iter().enumerate() {
            let e = next.free.summands()[l];
            for (idx, coef) in y.iter() {
                let (j, phi) = fk.decode(e, *idx);
                let nphi = self.n.map(phi);
                for t in 0..nphi.cols() {
                    for i in 0..nphi.rows() {
                        let v = &nphi[(i, t)];
                        if !v.is_zero() {
                            cols[src[j] + t].push((dst[l] + i, v * coef));
                        }
                    }
                }
            }
        }
        cols.into_iter().map(SparseVec::from_pairs).collect()
    }
}

/// `Ext^k(M, N)` for `k = 0..=n_max` from a given resolution of `M`.
pub fn ext_from_resolution(
    res: &mut Resolution,
    n: &CatModule,
    n_max: usize,
) -> Result<Vec<AbGroupInvariants>> {
    if !std::sync::Arc::ptr_eq(res.cat(), n.cat()) {
        return Err(Error::InvalidInput(
            "modules live over different categories".into(),
        ));
    }
    res.extend_to(n_max + 1)?;
    let co = Cochains { res, n };
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev: Vec<SparseVec> = Vec::new();
    for k in 0..=n_max {
        let delta = co.coboundary(k);
        let mut boundaries = prev;
        boundaries.extend(co.relations(k));
        let sq = subquotient(co.dim(k), &delta, &co.relations(k + 1), &boundaries)?;
        out.push(sq.invariants);
        prev = delta;
    }
    Ok(out)
}

/// `Ext^k(M, N)` for `k = 0..=n_max`; `M` must have free values.
pub fn ext_groups(m: &CatModule, n: &CatModule, n_max: usize) -> Result<Vec<AbGroupInvariants>> {
    ext_groups_with(m, n, n_max, CoverOrder::Canonical)
}

pub fn ext_groups_with(
    m: &CatModule,
    n: &CatModule,
    n_max: usize,
    order: CoverOrder,
) -> Result<Vec<AbGroupInvariants>> {
    let mut res = Resolution::new(m, order)?;
    ext_from_resolution(&mut res, n, n_max)
}

/// Bredon-style cohomology `H^k(C; N) = Ext^k(Z̄, N)`.
pub fn cohomology(n: &CatModule, n_max: usize) -> Result<Vec<AbGroupInvariants>> {
    let z = CatModule::constant(n.cat().clone());
    ext_groups(&z, n, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named::cyclic;
    use crate::zcat::category::FinCategory;
    use std::sync::Arc;

    #[test]
    fn cyclic_two_cohomology() {
        let cat = Arc::new(FinCategory::from_group(&cyclic(2)));
        let z = CatModule::constant(cat);
        let h = cohomology(&z, 4).unwrap();
        let want: Vec<AbGroupInvariants> = [&[0][..], &[], &[2], &[], &[2]]
            .iter()
            .map(|l| AbGroupInvariants::from_list(l))
            .collect();
        assert_eq!(h, want);
    }

    #[test]
    fn free_module_is_acyclic() {
        let cat = Arc::new(FinCategory::from_group(&cyclic(3)));
        let p = CatModule::free(cat.clone(), 0);
        let z3 = CatModule::constant_mod(cat, 3);
        let e = ext_groups(&p, &z3, 3).unwrap();
        assert_eq!(e[0], AbGroupInvariants::cyclic(3));
        assert!(e[1..].iter().all(|g| g.is_zero()));
    }
}
