//! Group cohomology from the normalized bar complex.
//!
//! A cochain of degree `n` is a function `(G \ 1)^n → P`; the coboundary is
//! `(δφ)(g_1, …, g_{n+1}) = g_1 φ(g_2, …) + Σ (-1)^i φ(…, g_i g_{i+1}, …) +
//! (-1)^{n+1} φ(g_1, …, g_n)`, with terms vanishing whenever an argument
//! becomes the identity. This is independent of the resolution machinery.

use crate::int::Int;
use crate::linalg::SparseVec;
use crate::permgroup::PermGroup;
use crate::zcat::abgroup::{subquotient, AbGroupInvariants};
use crate::zcat::module::CatModule;
use crate::{Error, Result};

/// Cochain spaces larger than this are refused.
const MAX_COCHAIN_DIM: usize = 200_000;

struct Bar<'a> {
    g: &'a PermGroup,
    p: &'a CatModule,
    /// non-identity elements
    k: usize,
    r: usize,
}

impl Bar<'_> {
    fn tuples(&self, n: usize) -> usize {
        self.k.pow(n as u32)
    }

    fn digits(&self, mut t: usize, n: usize) -> Vec<usize> {
        let mut d = vec![0; n];
        for slot in d.iter_mut().rev() {
            *slot = t % self.k + 1;
            t /= self.k;
        }
        d
    }

    fn index(&self, d: &[usize]) -> usize {
        d.iter().fold(0, |acc, &x| acc * self.k + (x - 1))
    }

    fn relations(&self, n: usize) -> Vec<SparseVec> {
        (0..self.tuples(n))
            .flat_map(|t| {
                self.p
                    .rels(0)
                    .iter()
                    .map(move |rel| rel.shifted(t * self.r))
            })
            .collect()
    }

    /// Columns of `δ^n`.
    fn coboundary(&self, n: usize) -> Vec<SparseVec> {
        let (g, r) = (self.g, self.r);
        let mut cols: Vec<Vec<(usize, Int)>> = vec![Vec::new(); self.tuples(n) * r];
        let sign = |i: usize| {
            if i.is_multiple_of(2) {
                Int::ONE
            } else {
                Int::from(-1)
            }
        };
        for s in 0..self.tuples(n + 1) {
            let d = self.digits(s, n + 1);
            // g_1 φ(g_2, …, g_{n+1}), with the left action M(g^-1)
            let rho = self.p.map(g.inv(d[0]));
            let t = self.index(&d[1..]);
            for j in 0..r {
                for i in 0..r {
                    let v = &rho[(i, j)];
                    if !v.is_zero() {
                        cols[t * r + j].push((s * r + i, v.clone()));
                    }
                }
            }
            for i in 1..=n {
                let prod = g.mul(d[i - 1], d[i]);
                if prod == PermGroup::IDENTITY {
                    continue;
                }
                let mut e = Vec::with_capacity(n);
                e.extend_from_slice(&d[..i - 1]);
                e.push(prod);
                e.extend_from_slice(&d[i + 1..]);
                let t = self.index(&e);
                for j in 0..r {
                    cols[t * r + j].push((s * r + j, sign(i)));
                }
            }
            let t = self.index(&d[..n]);
            for j in 0..r {
                cols[t * r + j].push((s * r + j, sign(n + 1)));
            }
        }
        cols.into_iter().map(SparseVec::from_pairs).collect()
    }
}

/// `H^k(G; P)` for `k = 0..=n_max`, `P` a module over the one-object
/// category of `G`.
pub fn bar_cohomology(
    g: &PermGroup,
    p: &CatModule,
    n_max: usize,
) -> Result<Vec<AbGroupInvariants>> {
    if p.cat().object_count() != 1 || p.cat().morphism_count() != g.order() {
        return Err(Error::InvalidInput(
            "module is not over the group's category".into(),
        ));
    }
    let bar = Bar {
        g,
        p,
        k: g.order() - 1,
        r: p.gens(0),
    };
    if bar.k > 0 && bar.tuples(n_max + 1).saturating_mul(bar.r.max(1)) > MAX_COCHAIN_DIM {
        return Err(Error::Budget("bar complex is too large".into()));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev: Vec<SparseVec> = Vec::new();
    for n in 0..=n_max {
        let dim = bar.tuples(n) * bar.r;
        let delta = bar.coboundary(n);
        let mut boundaries = prev;
        boundaries.extend(bar.relations(n));
        let sq = subquotient(dim, &delta, &bar.relations(n + 1), &boundaries)?;
        out.push(sq.invariants);
        prev = delta;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named::{cyclic, klein_four};
    use crate::zcat::category::FinCategory;
    use std::sync::Arc;

    fn inv(lists: &[&[i64]]) -> Vec<AbGroupInvariants> {
        lists
            .iter()
            .map(|l| AbGroupInvariants::from_list(l))
            .collect()
    }

    #[test]
    fn cyclic_three_with_integer_coefficients() {
        let g = cyclic(3);
        let z = CatModule::constant(Arc::new(FinCategory::from_group(&g)));
        assert_eq!(
            bar_cohomology(&g, &z, 4).unwrap(),
            inv(&[&[0], &[], &[3], &[], &[3]])
        );
    }

    #[test]
    fn klein_four_mod_two() {
        let g = klein_four();
        let z2 = CatModule::constant_mod(Arc::new(FinCategory::from_group(&g)), 2);
        // dimensions 1, 2, 3 over F_2
        assert_eq!(
            bar_cohomology(&g, &z2, 2).unwrap(),
            inv(&[&[2], &[2, 2], &[2, 2, 2]])
        );
    }
}
