//! Finitely generated abelian groups in invariant factor form, and the
//! subquotient computation behind every hom and cohomology group.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::int::Int;
use crate::linalg::{
    kernel_from_columns, lattice_basis, CoordLattice, IntSystem, SolveOutcome, SparseVec,
};
use crate::matrix::{smith_normal_form, IntMatrix};
use crate::{Error, Result};

/// `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with `1 < d_1 | d_2 | … | d_k`.
///
/// Serialized as a list: one `0` per free summand, then the torsion
/// invariant factors in increasing order. `[0, 2]` is `Z ⊕ Z/2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AbGroupInvariants {
    free_rank: usize,
    torsion: Vec<Int>,
}

impl AbGroupInvariants {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        AbGroupInvariants {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(n: i64) -> Self {
        Self::from_factors(std::iter::once(Int::from(n)))
    }

    /// From arbitrary diagonal entries of a Smith form (any order; `0`
    /// means free, `±1` is dropped). Non-chain inputs are normalized.
    pub fn from_factors(factors: impl IntoIterator<Item = Int>) -> Self {
        let mut free_rank = 0;
        let mut primary: Vec<Int> = Vec::new();
        for d in factors {
            let d = d.abs();
            if d.is_zero() {
                free_rank += 1;
            } else if !d.is_one() {
                primary.push(d);
            }
        }
        // pairwise gcd/lcm normalization into a divisibility chain
        let mut chain = primary;
        let mut changed = true;
        while changed {
            changed = false;
            chain.sort();
            for i in 0..chain.len() {
                for j in i + 1..chain.len() {
                    if !chain[i].divides(&chain[j]) {
                        let g = chain[i].gcd(&chain[j]);
                        let l = (&chain[i] * &chain[j]).div_floor(&g);
                        chain[i] = g;
                        chain[j] = l;
                        changed = true;
                    }
                }
            }
            chain.retain(|d| !d.is_one());
        }
        AbGroupInvariants {
            free_rank,
            torsion: chain,
        }
    }

    /// Parses the serialized list form.
    pub fn from_list(list: &[i64]) -> Self {
        Self::from_factors(list.iter().map(|&x| Int::from(x)))
    }

    pub fn to_list(&self) -> Vec<Int> {
        let mut v = vec![Int::ZERO; self.free_rank];
        v.extend(self.torsion.iter().cloned());
        v
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[Int] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the group, `None` if infinite.
    pub fn order(&self) -> Option<Int> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().fold(Int::ONE, |a, b| &a * b))
    }

    pub fn direct_sum(&self, other: &AbGroupInvariants) -> AbGroupInvariants {
        Self::from_factors(self.to_list().into_iter().chain(other.to_list()))
    }

    /// The group `Z^n / span(relations)`.
    pub fn of_presentation(n: usize, relations: &[SparseVec]) -> AbGroupInvariants {
        if relations.is_empty() {
            return Self::free(n);
        }
        let m = IntMatrix::from_sparse_columns(n, relations);
        let snf = smith_normal_form(&m);
        let mut d = snf.diagonal();
        d.resize(n, Int::ZERO);
        Self::from_factors(d)
    }
}

impl fmt::Display for AbGroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for AbGroupInvariants {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_list().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AbGroupInvariants {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<Int> = Vec::deserialize(d)?;
        if v.iter().any(|x| x.is_negative()) {
            return Err(serde::de::Error::custom(
                "invariant factors are nonnegative",
            ));
        }
        Ok(Self::from_factors(v))
    }
}

/// A subquotient `{x ∈ Z^m : A x ∈ R} / B` together with generators of its
/// cyclic factors (listed in the order of [`AbGroupInvariants::to_list`]).
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub invariants: AbGroupInvariants,
    pub generators: Vec<SparseVec>,
    /// basis of the cycle lattice `{x : A x ∈ R}`
    pub cycles: Vec<SparseVec>,
}

/// Computes `{x ∈ Z^m : A x ∈ span(r_gens)} / span(b_gens)`.
///
/// `a_cols[i]` is `A e_i`. Every element of `b_gens` must satisfy the cycle
/// condition; this is checked.
pub fn subquotient(
    m: usize,
    a_cols: &[SparseVec],
    r_gens: &[SparseVec],
    b_gens: &[SparseVec],
) -> Result<Subquotient> {
    assert_eq!(a_cols.len(), m);
    let cycles: Vec<SparseVec> = if r_gens.is_empty() {
        kernel_from_columns(a_cols)
    } else {
        let mut cols = a_cols.to_vec();
        cols.extend(r_gens.iter().cloned());
        let gens: Vec<SparseVec> = kernel_from_columns(&cols)
            .into_iter()
            .map(|v| v.slice(0..m))
            .filter(|v| !v.is_empty())
            .collect();
        lattice_basis(&gens)
    };
    let z = cycles.len();
    let lattice = CoordLattice::new(cycles.clone());
    let mut coords = Vec::with_capacity(b_gens.len());
    for b in b_gens {
        match lattice.coordinates(b) {
            Some(c) => coords.push(c),
            None => {
                return Err(Error::Internal(
                    "boundary is not contained in the cycles".into(),
                ))
            }
        }
    }
    let mat = IntMatrix::from_sparse_columns(z, &coords);
    let snf = smith_normal_form(&mat);
    let mut diag = snf.diagonal();
    diag.resize(z, Int::ZERO);
    // generators of the cyclic factors: columns of U^-1 in the cycle basis
    let u_rows: Vec<SparseVec> = (0..z).map(|i| snf.u.sparse_row(i)).collect();
    let u_sys = IntSystem::new(u_rows, z);
    let mut free_gens = Vec::new();
    let mut torsion_gens: Vec<(Int, SparseVec)> = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        let mut e = vec![Int::ZERO; z];
        e[i] = Int::ONE;
        let col = match u_sys.solve(&e) {
            SolveOutcome::Solution(x) => x,
            SolveOutcome::Infeasible(_) => {
                return Err(Error::Internal("transform is not unimodular".into()))
            }
        };
        let mut g = SparseVec::new();
        for (t, c) in col.iter() {
            g = g.add_scaled(&cycles[*t], c);
        }
        if d.is_zero() {
            free_gens.push(g);
        } else {
            torsion_gens.push((d.clone(), g));
        }
    }
    torsion_gens.sort_by(|a, b| a.0.cmp(&b.0));
    let invariants = AbGroupInvariants::from_factors(diag);
    let mut generators = free_gens;
    generators.extend(torsion_gens.into_iter().map(|p| p.1));
    Ok(Subquotient {
        invariants,
        generators,
        cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_form() {
        let a = AbGroupInvariants::from_list(&[2, 0, 1, 3]);
        assert_eq!(a.free_rank(), 1);
        assert_eq!(a.to_list(), vec![Int::ZERO, Int::from(6)]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[0,6]");
        let b: AbGroupInvariants = serde_json::from_str("[0,2]").unwrap();
        assert_eq!(b.to_string(), "Z + Z/2");
    }

    #[test]
    fn chain_normalization() {
        let a = AbGroupInvariants::from_list(&[4, 6]);
        assert_eq!(a.torsion(), &[Int::from(2), Int::from(12)]);
    }

    #[test]
    fn presentation_of_z_mod_2() {
        let g = AbGroupInvariants::of_presentation(
            2,
            &[SparseVec::from_pairs(vec![(0, Int::from(2))])],
        );
        assert_eq!(g, AbGroupInvariants::from_list(&[0, 2]));
    }

    #[test]
    fn subquotient_basic() {
        // kernel of (1, -1) in Z^2, modulo 2(1, 1)
        let a = vec![
            SparseVec::from_pairs(vec![(0, Int::ONE)]),
            SparseVec::from_pairs(vec![(0, Int::from(-1))]),
        ];
        let b = vec![SparseVec::from_pairs(vec![
            (0, Int::from(2)),
            (1, Int::from(2)),
        ])];
        let sq = subquotient(2, &a, &[], &b).unwrap();
        assert_eq!(sq.invariants, AbGroupInvariants::cyclic(2));
        assert_eq!(sq.generators.len(), 1);
    }
}
