//! Groups of natural maps between modules.

use crate::int::Int;
use crate::linalg::SparseVec;
use crate::matrix::IntMatrix;
use crate::zcat::abgroup::{subquotient, AbGroupInvariants};
use crate::zcat::module::{CatModule, NatMap};
use crate::Result;

/// `hom(M, N)` with a generating set of natural maps, one per cyclic factor.
#[derive(Clone, Debug)]
pub struct HomGroup {
    pub invariants: AbGroupInvariants,
    pub generators: Vec<NatMap>,
}

/// Layout of the unknown matrices `s_c: M(c) → N(c)`, row-major per object.
struct Layout {
    offset: Vec<usize>,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Layout {
    fn new(m: &CatModule, n: &CatModule) -> Layout {
        let k = m.cat().object_count();
        let mut offset = Vec::with_capacity(k);
        let mut acc = 0;
        for c in 0..k {
            offset.push(acc);
            acc += m.gens(c) * n.gens(c);
        }
        offset.push(acc);
        Layout {
            offset,
            rows: (0..k).map(|c| n.gens(c)).collect(),
            cols: (0..k).map(|c| m.gens(c)).collect(),
        }
    }

    fn total(&self) -> usize {
        *self.offset.last().unwrap()
    }

    fn var(&self, c: usize, i: usize, j: usize) -> usize {
        self.offset[c] + i * self.cols[c] + j
    }

    fn to_natmap(&self, x: &SparseVec) -> NatMap {
        let dense = x.to_dense(self.total());
        NatMap {
            mats: (0..self.rows.len())
                .map(|c| {
                    let mut m = IntMatrix::zeros(self.rows[c], self.cols[c]);
                    for i in 0..self.rows[c] {
                        for j in 0..self.cols[c] {
                            m[(i, j)] = dense[self.var(c, i, j)].clone();
                        }
                    }
                    m
                })
                .collect(),
        }
    }
}

/// Solves the naturality constraints for maps `M → N` over the integers.
pub fn hom_group(m: &CatModule, n: &CatModule) -> Result<HomGroup> {
    let cat = m.cat();
    let lay = Layout::new(m, n);
    let total = lay.total();
    // constraint rows, grouped in blocks of size N.gens(a)
    let mut a_cols: Vec<Vec<(usize, Int)>> = vec![Vec::new(); total];
    let mut r_gens: Vec<SparseVec> = Vec::new();
    let mut row = 0usize;
    let block = |a: usize, r_gens: &mut Vec<SparseVec>, row: &mut usize| -> usize {
        let start = *row;
        for rel in n.rels(a) {
            r_gens.push(rel.shifted(start));
        }
        *row += n.gens(a);
        start
    };
    for f in 0..cat.morphism_count() {
        let (a, b) = (cat.src(f), cat.tgt(f));
        let mf = m.map(f);
        let nf = n.map(f);
        for t in 0..m.gens(b) {
            // column t of s_a M(f) - N(f) s_b
            let start = block(a, &mut r_gens, &mut row);
            for i in 0..n.gens(a) {
                for k in 0..m.gens(a) {
                    let v = &mf[(k, t)];
                    if !v.is_zero() {
                        a_cols[lay.var(a, i, k)].push((start + i, v.clone()));
                    }
                }
                for k in 0..n.gens(b) {
                    let v = &nf[(i, k)];
                    if !v.is_zero() {
                        a_cols[lay.var(b, k, t)].push((start + i, -v));
                    }
                }
            }
        }
    }
    for c in 0..cat.object_count() {
        for rel in m.rels(c) {
            let start = block(c, &mut r_gens, &mut row);
            for i in 0..n.gens(c) {
                for (k, v) in rel.iter() {
                    a_cols[lay.var(c, i, *k)].push((start + i, v.clone()));
                }
            }
        }
    }
    let a_cols: Vec<SparseVec> = a_cols.into_iter().map(SparseVec::from_pairs).collect();
    // maps that vanish modulo the relations of N
    let mut b_gens = Vec::new();
    for c in 0..cat.object_count() {
        for t in 0..m.gens(c) {
            for rel in n.rels(c) {
                b_gens.push(SparseVec::from_pairs(
                    rel.iter()
                        .map(|(i, v)| (lay.var(c, *i, t), v.clone()))
                        .collect(),
                ));
            }
        }
    }
    let sq = subquotient(total, &a_cols, &r_gens, &b_gens)?;
    Ok(HomGroup {
        invariants: sq.invariants,
        generators: sq.generators.iter().map(|x| lay.to_natmap(x)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named::cyclic;
    use crate::zcat::category::FinCategory;
    use std::sync::Arc;

    #[test]
    fn constant_endomorphisms() {
        let cat = Arc::new(FinCategory::from_group(&cyclic(3)));
        let z = CatModule::constant(cat.clone());
        let h = hom_group(&z, &z).unwrap();
        assert_eq!(h.invariants, AbGroupInvariants::free(1));
        h.generators[0].check(&z, &z).unwrap();
    }

    #[test]
    fn constant_into_torsion() {
        let cat = Arc::new(FinCategory::from_group(&cyclic(2)));
        let z = CatModule::constant(cat.clone());
        let z2 = CatModule::constant_mod(cat, 2);
        let h = hom_group(&z, &z2).unwrap();
        assert_eq!(h.invariants, AbGroupInvariants::cyclic(2));
    }

    #[test]
    fn yoneda_over_group() {
        let cat = Arc::new(FinCategory::from_group(&cyclic(4)));
        let p = CatModule::free(cat.clone(), 0);
        let z2 = CatModule::constant_mod(cat, 2);
        assert_eq!(
            hom_group(&p, &z2).unwrap().invariants,
            AbGroupInvariants::cyclic(2)
        );
        assert_eq!(
            hom_group(&p, &p).unwrap().invariants,
            AbGroupInvariants::free(4)
        );
    }
}
