//! Sparse integer linear algebra: echelon forms with tracked transforms,
//! integer linear systems with certificates, and lattices.
//!
//! Everything here works over `Z` exactly. Rows are reduced by unimodular
//! operations only, so the transform of a row that reduces to zero is a
//! vector of the (saturated) left kernel.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::int::Int;
use crate::modular::ModularSystem;

/// A sparse integer vector: strictly increasing indices, no explicit zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SparseVec(Vec<(usize, Int)>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(Vec::new())
    }

    pub fn unit(i: usize) -> Self {
        SparseVec(vec![(i, Int::ONE)])
    }

    /// From unsorted pairs; duplicate indices are summed.
    pub fn from_pairs(mut pairs: Vec<(usize, Int)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut out: Vec<(usize, Int)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match out.last_mut() {
                Some((j, w)) if *j == i => *w += &v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseVec(out)
    }

    pub fn from_dense(v: &[Int]) -> Self {
        SparseVec(
            v.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        )
    }

    pub fn to_dense(&self, len: usize) -> Vec<Int> {
        let mut out = vec![Int::ZERO; len];
        for (i, v) in &self.0 {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (usize, Int)> {
        self.0.iter()
    }

    pub fn lead(&self) -> Option<&(usize, Int)> {
        self.0.first()
    }

    pub fn get(&self, i: usize) -> Int {
        match self.0.binary_search_by_key(&i, |p| p.0) {
            Ok(k) => self.0[k].1.clone(),
            Err(_) => Int::ZERO,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().map(|p| p.0)
    }

    /// `self + k * other`
    pub fn add_scaled(&self, other: &SparseVec, k: &Int) -> SparseVec {
        if k.is_zero() || other.is_empty() {
            return self.clone();
        }
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, k * &b[j].1));
                j += 1;
            } else {
                let mut v = a[i].1.clone();
                v.add_mul(k, &b[j].1);
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec(out)
    }

    /// `s * self + t * other`
    pub fn combine(&self, s: &Int, other: &SparseVec, t: &Int) -> SparseVec {
        self.scale(s).add_scaled(other, t)
    }

    pub fn scale(&self, k: &Int) -> SparseVec {
        if k.is_zero() {
            return SparseVec::new();
        }
        if k.is_one() {
            return self.clone();
        }
        SparseVec(self.0.iter().map(|(i, v)| (*i, v * k)).collect())
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec(self.0.iter().map(|(i, v)| (*i, -v)).collect())
    }

    pub fn dot(&self, other: &SparseVec) -> Int {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        let mut acc = Int::ZERO;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc.add_mul(&a[i].1, &b[j].1);
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Shifts every index by `offset`.
    pub fn shifted(&self, offset: usize) -> SparseVec {
        SparseVec(
            self.0
                .iter()
                .map(|(i, v)| (i + offset, v.clone()))
                .collect(),
        )
    }

    /// Restricts to indices in `range`, re-based at `range.start`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> SparseVec {
        SparseVec(
            self.0
                .iter()
                .filter(|(i, _)| range.contains(i))
                .map(|(i, v)| (i - range.start, v.clone()))
                .collect(),
        )
    }

    /// Concatenation where `other` indices are shifted by `offset`
    /// (all of `self` must lie below `offset`).
    pub fn concat(&self, other: &SparseVec, offset: usize) -> SparseVec {
        debug_assert!(self.max_index().is_none_or(|m| m < offset));
        let mut v = self.0.clone();
        v.extend(other.0.iter().map(|(i, x)| (i + offset, x.clone())));
        SparseVec(v)
    }

    pub fn into_inner(self) -> Vec<(usize, Int)> {
        self.0
    }
}

/// A row being reduced: the main part drives pivoting, `aux` rides along.
#[derive(Clone, Debug)]
struct Row {
    v: SparseVec,
    aux: SparseVec,
}

impl Row {
    fn combine(&self, s: &Int, other: &Row, t: &Int) -> Row {
        Row {
            v: self.v.combine(s, &other.v, t),
            aux: self.aux.combine(s, &other.aux, t),
        }
    }
}

/// Incremental row echelon form over `Z`.
///
/// Pivot rows have pairwise distinct leading columns. Rows that reduce to
/// zero are kept with their auxiliary part.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: Vec<Row>,
    pivot_at: std::collections::HashMap<usize, usize>,
    zeros: Vec<Row>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a row with auxiliary payload.
    pub fn insert(&mut self, v: SparseVec, aux: SparseVec) {
        let mut row = Row { v, aux };
        loop {
            let Some((j, a)) = row.v.lead().cloned() else {
                self.zeros.push(row);
                return;
            };
            let Some(&p) = self.pivot_at.get(&j) else {
                self.pivot_at.insert(j, self.pivots.len());
                self.pivots.push(row);
                return;
            };
            let b = self.pivots[p].v.lead().unwrap().1.clone();
            if let Some(q) = a.div_exact(&b) {
                row = row.combine(&Int::ONE, &self.pivots[p], &-q);
            } else if let Some(q) = b.div_exact(&a) {
                // the incoming row has the smaller pivot: swap it in
                let old = std::mem::replace(&mut self.pivots[p], row);
                row = old.combine(&Int::ONE, &self.pivots[p], &-q);
            } else {
                let (g, s, t) = Int::extended_gcd(&b, &a);
                let bg = b.div_floor(&g);
                let ag = a.div_floor(&g);
                let piv = &self.pivots[p];
                let new_piv = piv.combine(&s, &row, &t);
                let rest = piv.combine(&ag, &row, &-bg);
                self.pivots[p] = new_piv;
                row = rest;
            }
        }
    }

    /// Inserts a row; the auxiliary payload is empty.
    pub fn insert_plain(&mut self, v: SparseVec) {
        self.insert(v, SparseVec::new());
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Pivot rows sorted by leading column, with their auxiliary parts.
    pub fn sorted_pivots(&self) -> Vec<(SparseVec, SparseVec)> {
        let mut idx: Vec<usize> = (0..self.pivots.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i].v.lead().unwrap().0);
        idx.into_iter()
            .map(|i| (self.pivots[i].v.clone(), self.pivots[i].aux.clone()))
            .collect()
    }

    /// Auxiliary parts of rows that reduced to zero (with their residual aux).
    pub fn zero_aux(&self) -> Vec<SparseVec> {
        self.zeros.iter().map(|r| r.aux.clone()).collect()
    }

    /// Reduces `v` against the pivots. Returns the residual main part and the
    /// accumulated `-combination` of pivot auxiliaries
    /// (so that `v - sum c_p pivot_p = residual`, aux = `-sum c_p aux_p`).
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut row = Row {
            v: v.clone(),
            aux: SparseVec::new(),
        };
        let mut skipped: Vec<(usize, Int)> = Vec::new();
        while let Some((j, a)) = row.v.lead().cloned() {
            let Some(&p) = self.pivot_at.get(&j) else {
                // no pivot here; set the entry aside
                skipped.push((j, a));
                row.v = SparseVec(row.v.0[1..].to_vec());
                continue;
            };
            let b = self.pivots[p].v.lead().unwrap().1.clone();
            match a.div_exact(&b) {
                Some(q) => row = row.combine(&Int::ONE, &self.pivots[p], &-q),
                None => {
                    let q = a.div_floor(&b);
                    row = row.combine(&Int::ONE, &self.pivots[p], &-q);
                    // the remainder stays at the lead; set aside
                    let (j, r) = row.v.lead().cloned().unwrap();
                    skipped.push((j, r));
                    row.v = SparseVec(row.v.0[1..].to_vec());
                }
            }
        }
        let residual = SparseVec::from_pairs(skipped).add_scaled(&row.v, &Int::ONE);
        (residual, row.aux)
    }

    /// Whether `v` lies in the lattice spanned by the inserted rows.
    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }
}

/// Saturated basis of the kernel `{x : D x = 0}` where `D` is given by its
/// columns (`columns[j]` is `D e_j`).
pub fn kernel_from_columns(columns: &[SparseVec]) -> Vec<SparseVec> {
    let nrows = columns
        .iter()
        .filter_map(|c| c.max_index())
        .max()
        .map_or(0, |m| m + 1);
    let mut rows: Vec<Vec<(usize, Int)>> = vec![Vec::new(); nrows];
    for (j, c) in columns.iter().enumerate() {
        for (i, v) in c.iter() {
            rows[*i].push((j, v.clone()));
        }
    }
    let rows = rows.into_iter().map(SparseVec).collect();
    IntSystem::new(rows, columns.len()).kernel()
}

/// Rows of the matrix whose columns are given.
pub fn transpose(cols: &[SparseVec], nrows: usize) -> Vec<SparseVec> {
    let mut rows: Vec<Vec<(usize, Int)>> = vec![Vec::new(); nrows];
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter() {
            rows[*i].push((j, v.clone()));
        }
    }
    rows.into_iter().map(SparseVec::from_pairs).collect()
}

/// Basis (echelon rows) of the lattice spanned by `gens`.
pub fn lattice_basis(gens: &[SparseVec]) -> Vec<SparseVec> {
    let mut ech = Echelon::new();
    for g in gens {
        ech.insert_plain(g.clone());
    }
    ech.sorted_pivots().into_iter().map(|p| p.0).collect()
}

/// A lattice with a fixed basis, supporting coordinate lookups.
#[derive(Clone, Debug)]
pub struct CoordLattice {
    basis: Vec<SparseVec>,
    ech: Echelon,
}

impl CoordLattice {
    /// `basis` must be linearly independent.
    pub fn new(basis: Vec<SparseVec>) -> Self {
        let mut ech = Echelon::new();
        for (i, b) in basis.iter().enumerate() {
            ech.insert(b.clone(), SparseVec::unit(i));
        }
        assert!(ech.zeros.is_empty(), "lattice basis is not independent");
        CoordLattice { basis, ech }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    /// Integer coordinates of `v` in the basis, if `v` is in the lattice.
    pub fn coordinates(&self, v: &SparseVec) -> Option<SparseVec> {
        let (res, aux) = self.ech.reduce(v);
        if res.is_empty() {
            Some(aux.neg())
        } else {
            None
        }
    }
}

/// Certificate that `A x = b` has no integer solution: `w A` is divisible by
/// `modulus` entrywise while `w b` is not (`modulus == 0` means `w A = 0`,
/// `w b != 0`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfeasibilityWitness {
    pub w: SparseVec,
    pub modulus: Int,
}

impl InfeasibilityWitness {
    /// Checks the witness against a system given by its rows.
    pub fn verify(&self, rows: &[SparseVec], rhs: &[Int]) -> bool {
        let mut wa = SparseVec::new();
        let mut wb = Int::ZERO;
        for (i, c) in self.w.iter() {
            wa = wa.add_scaled(&rows[*i], c);
            wb.add_mul(c, &rhs[*i]);
        }
        if self.modulus.is_zero() {
            wa.is_empty() && !wb.is_zero()
        } else {
            wa.iter().all(|(_, x)| self.modulus.divides(x)) && !self.modulus.divides(&wb)
        }
    }
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Solution(SparseVec),
    Infeasible(InfeasibilityWitness),
}

/// Column Hermite form `R U = [H | 0]` of the residual part of an
/// elimination. `U` is unimodular and only `ncols × ncols`, so nothing of
/// row dimension is ever tracked.
struct HermiteSystem {
    nrows: usize,
    ncols: usize,
    /// columns of `H`, dense, in echelon order
    h: Vec<Vec<Int>>,
    /// pivot row of each column of `H`
    piv: Vec<usize>,
    /// columns of `U`, dense
    u: Vec<Vec<Int>>,
}

fn axpy(y: &mut [Int], a: &Int, x: &[Int]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            yi.add_mul(a, xi);
        }
    }
}

impl HermiteSystem {
    fn new(rows: Vec<SparseVec>, ncols: usize) -> Self {
        let nrows = rows.len();
        let mut cols: Vec<Vec<Int>> = vec![vec![Int::ZERO; nrows]; ncols];
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter() {
                cols[*j][i] = v.clone();
            }
        }
        let mut u: Vec<Vec<Int>> = (0..ncols)
            .map(|j| {
                let mut e = vec![Int::ZERO; ncols];
                e[j] = Int::ONE;
                e
            })
            .collect();
        let mut piv = Vec::new();
        let mut k = 0;
        for i in 0..nrows {
            if k == ncols {
                break;
            }
            // Euclid on row i across the active columns k..
            loop {
                let best = (k..ncols)
                    .filter(|&j| !cols[j][i].is_zero())
                    .min_by(|&a, &b| cols[a][i].cmp_abs(&cols[b][i]));
                let Some(p) = best else { break };
                cols.swap(k, p);
                u.swap(k, p);
                let mut done = true;
                for j in k + 1..ncols {
                    if cols[j][i].is_zero() {
                        continue;
                    }
                    let q = -cols[j][i].div_floor(&cols[k][i]);
                    let (a, b) = cols.split_at_mut(j);
                    axpy(&mut b[0], &q, &a[k]);
                    let (a, b) = u.split_at_mut(j);
                    axpy(&mut b[0], &q, &a[k]);
                    if !cols[j][i].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if (k..ncols).all(|j| cols[j][i].is_zero()) {
                continue;
            }
            if cols[k][i].is_negative() {
                for x in cols[k].iter_mut().chain(u[k].iter_mut()) {
                    *x = -&*x;
                }
            }
            // reduce the earlier columns modulo the new pivot
            for l in 0..k {
                let q = -cols[l][i].div_floor(&cols[k][i]);
                let (a, b) = cols.split_at_mut(k);
                axpy(&mut a[l], &q, &b[0]);
                let (a, b) = u.split_at_mut(k);
                axpy(&mut a[l], &q, &b[0]);
            }
            piv.push(i);
            k += 1;
        }
        cols.truncate(k);
        HermiteSystem {
            nrows,
            ncols,
            h: cols,
            piv,
            u,
        }
    }

    fn rank(&self) -> usize {
        self.h.len()
    }

    fn kernel(&self) -> Vec<SparseVec> {
        self.u[self.rank()..]
            .iter()
            .map(|c| SparseVec::from_dense(c))
            .collect()
    }

    fn solve(&self, b: &[Int]) -> SolveOutcome {
        assert_eq!(b.len(), self.nrows);
        let mut rem = b.to_vec();
        let mut z = Vec::with_capacity(self.rank());
        for (k, &p) in self.piv.iter().enumerate() {
            match rem[p].div_exact(&self.h[k][p]) {
                Some(q) => {
                    axpy(&mut rem, &-&q, &self.h[k]);
                    z.push(q);
                }
                None => return SolveOutcome::Infeasible(self.divisibility_witness(k)),
            }
        }
        if let Some(i) = rem.iter().position(|x| !x.is_zero()) {
            return SolveOutcome::Infeasible(self.rank_witness(i));
        }
        let mut x = vec![Int::ZERO; self.ncols];
        for (k, zk) in z.iter().enumerate() {
            axpy(&mut x, zk, &self.u[k]);
        }
        SolveOutcome::Solution(SparseVec::from_dense(&x))
    }

    /// Rational `x` on the pivot rows with `x T = c`, `T` the pivot rows of `H`.
    fn left_solve(&self, c: &[BigRational]) -> Vec<BigRational> {
        let r = self.rank();
        let t = |k: usize, l: usize| BigRational::from_integer(self.h[l][self.piv[k]].to_big());
        let mut x = vec![BigRational::zero(); r];
        for l in (0..r).rev() {
            let mut acc = c[l].clone();
            for (k, xk) in x.iter().enumerate().skip(l + 1) {
                if !xk.is_zero() {
                    acc -= xk * t(k, l);
                }
            }
            x[l] = acc / t(l, l);
        }
        x
    }

    fn scaled(&self, x: &[BigRational], extra: Option<usize>) -> InfeasibilityWitness {
        let d = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let dr = BigRational::from_integer(d.clone());
        let mut pairs: Vec<(usize, Int)> = x
            .iter()
            .enumerate()
            .map(|(k, v)| (self.piv[k], Int::from_big((v * &dr).to_integer())))
            .collect();
        let modulus = match extra {
            Some(i) => {
                pairs.push((i, Int::from_big(d)));
                Int::ZERO
            }
            None => Int::from_big(d),
        };
        InfeasibilityWitness {
            w: SparseVec::from_pairs(pairs),
            modulus,
        }
    }

    /// `D (T^{-1})_k`: `w H = D e_k` while `w b` is not divisible by `D`.
    fn divisibility_witness(&self, k: usize) -> InfeasibilityWitness {
        let mut c = vec![BigRational::zero(); self.rank()];
        c[k] = BigRational::one();
        self.scaled(&self.left_solve(&c), None)
    }

    /// `D (e_i - H_i T^{-1})`: kills `H` and pairs non-trivially with `b`.
    fn rank_witness(&self, i: usize) -> InfeasibilityWitness {
        let hrow: Vec<Int> = self.h.iter().map(|col| col[i].clone()).collect();
        self.row_witness(&hrow, i)
    }

    /// `D (e_extra - x)` with `x T = hrow`, where `hrow` is a row of `R U`.
    fn row_witness(&self, hrow: &[Int], extra: usize) -> InfeasibilityWitness {
        let c: Vec<BigRational> = hrow
            .iter()
            .map(|v| -BigRational::from_integer(v.to_big()))
            .collect();
        self.scaled(&self.left_solve(&c), Some(extra))
    }

    /// `row · U`, truncated to the rank.
    fn transform_row(&self, row: &SparseVec) -> Vec<Int> {
        (0..self.rank())
            .map(|k| {
                let mut acc = Int::ZERO;
                for (j, v) in row.iter() {
                    acc.add_mul(v, &self.u[k][*j]);
                }
                acc
            })
            .collect()
    }
}

const SELECT_PRIME: u64 = (1 << 61) - 1;

fn mod_prime(v: &Int) -> u64 {
    use num_traits::ToPrimitive;
    let p = BigInt::from(SELECT_PRIME);
    v.to_big().mod_floor(&p).to_u64().unwrap()
}

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % SELECT_PRIME as u128) as u64
}

fn inv_mod(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, SELECT_PRIME - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        e >>= 1;
    }
    acc
}

/// Indices of rows that are independent modulo a large prime (hence over
/// `Q`), chosen greedily in order.
fn independent_rows_mod_p(rows: &[SparseVec], ncols: usize) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if basis.len() == ncols {
            break;
        }
        let mut v = vec![0u64; ncols];
        for (j, x) in r.iter() {
            v[*j] = mod_prime(x);
        }
        for (lead, b) in &basis {
            let f = v[*lead];
            if f != 0 {
                for (vj, bj) in v.iter_mut().zip(b) {
                    if *bj != 0 {
                        *vj = (*vj + SELECT_PRIME - mul_mod(f, *bj)) % SELECT_PRIME;
                    }
                }
            }
        }
        if let Some(lead) = v.iter().position(|&x| x != 0) {
            let inv = inv_mod(v[lead]);
            for x in v.iter_mut() {
                *x = mul_mod(*x, inv);
            }
            basis.push((lead, v));
            out.push(i);
        }
    }
    out
}

/// The residual block of an elimination. The Hermite form is computed on a
/// maximal independent subset of rows; the remaining rows are implied.
struct ResidualSystem {
    rows: Vec<SparseVec>,
    selected: Vec<usize>,
    herm: HermiteSystem,
}

impl ResidualSystem {
    fn new(rows: Vec<SparseVec>, ncols: usize) -> Self {
        let selected = independent_rows_mod_p(&rows, ncols);
        let herm = HermiteSystem::new(selected.iter().map(|&i| rows[i].clone()).collect(), ncols);
        let exact = herm.rank() == selected.len()
            && herm
                .kernel()
                .iter()
                .all(|k| rows.iter().all(|r| r.dot(k).is_zero()));
        if exact {
            return ResidualSystem {
                rows,
                selected,
                herm,
            };
        }
        let herm = HermiteSystem::new(rows.clone(), ncols);
        ResidualSystem {
            selected: (0..rows.len()).collect(),
            rows,
            herm,
        }
    }

    fn rank(&self) -> usize {
        self.herm.rank()
    }

    fn kernel(&self) -> Vec<SparseVec> {
        self.herm.kernel()
    }

    fn solve(&self, b: &[Int]) -> SolveOutcome {
        let bs: Vec<Int> = self.selected.iter().map(|&i| b[i].clone()).collect();
        let lift = |w: InfeasibilityWitness| InfeasibilityWitness {
            w: SparseVec::from_pairs(
                w.w.iter()
                    .map(|(a, v)| (self.selected[*a], v.clone()))
                    .collect(),
            ),
            modulus: w.modulus,
        };
        match self.herm.solve(&bs) {
            SolveOutcome::Infeasible(w) => SolveOutcome::Infeasible(lift(w)),
            SolveOutcome::Solution(y) => {
                let Some(i) = self.rows.iter().zip(b).position(|(r, bi)| r.dot(&y) != *bi) else {
                    return SolveOutcome::Solution(y);
                };
                let hrow = self.herm.transform_row(&self.rows[i]);
                let local = self.herm.row_witness(&hrow, self.herm.nrows);
                let w = SparseVec::from_pairs(
                    local
                        .w
                        .iter()
                        .map(|(a, v)| {
                            let row = if *a == self.herm.nrows {
                                i
                            } else {
                                self.selected[*a]
                            };
                            (row, v.clone())
                        })
                        .collect(),
                );
                SolveOutcome::Infeasible(InfeasibilityWitness {
                    w,
                    modulus: Int::ZERO,
                })
            }
        }
    }
}

/// A factored integer system `A x = b` for a fixed `A`.
///
/// Gauss-Jordan elimination on unit pivots comes first; it keeps entries
/// small on the sparse `0, ±1` systems met in practice. Whatever is left
/// over (rows with no unit entry) goes to a column Hermite form.
pub struct IntSystem {
    rows: Vec<SparseVec>,
    ncols: usize,
    reduced: Vec<SparseVec>,
    /// `(target, source, factor)`: `row[target] += factor * row[source]`
    ops: Vec<(u32, u32, Int)>,
    /// `(row, column, unit)` for each pivot
    pivots: Vec<(usize, usize, Int)>,
    residual_rows: Vec<usize>,
    residual_cols: Vec<usize>,
    res_rows: Vec<SparseVec>,
    /// residual too big for a Hermite form up front; solve modularly
    large: bool,
    residual: std::sync::OnceLock<ResidualSystem>,
    modular: std::sync::OnceLock<ModularSystem>,
}

/// Residual blocks above this many entries are solved by modular methods.
const RESIDUAL_LIMIT: usize = 4096;

impl IntSystem {
    /// Factors `A` (given by rows over `ncols` unknowns).
    pub fn new(rows: Vec<SparseVec>, ncols: usize) -> Self {
        use std::collections::HashSet;
        let m = rows.len();
        let mut cur = rows.clone();
        let mut col_rows: Vec<HashSet<u32>> = vec![HashSet::new(); ncols];
        for (i, r) in cur.iter().enumerate() {
            for (j, _) in r.iter() {
                col_rows[*j].insert(i as u32);
            }
        }
        let mut is_pivot_row = vec![false; m];
        let mut is_pivot_col = vec![false; ncols];
        let mut pivots = Vec::new();
        let mut ops = Vec::new();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| (cur[i].nnz(), i));
        loop {
            let mut progress = false;
            for &r in &order {
                if is_pivot_row[r] {
                    continue;
                }
                let best = cur[r]
                    .iter()
                    .filter(|(j, v)| v.is_unit() && !is_pivot_col[*j])
                    .min_by_key(|(j, _)| (col_rows[*j].len(), *j))
                    .map(|(j, v)| (*j, v.clone()));
                let Some((j, u)) = best else { continue };
                progress = true;
                is_pivot_row[r] = true;
                is_pivot_col[j] = true;
                pivots.push((r, j, u.clone()));
                let prow = cur[r].clone();
                let mut targets: Vec<u32> = col_rows[j]
                    .iter()
                    .copied()
                    .filter(|&k| k as usize != r)
                    .collect();
                targets.sort_unstable();
                for k in targets {
                    let k = k as usize;
                    let f = -(&cur[k].get(j) * &u);
                    let new = cur[k].add_scaled(&prow, &f);
                    for (c, _) in prow.iter() {
                        let before = !cur[k].get(*c).is_zero();
                        let after = !new.get(*c).is_zero();
                        if before && !after {
                            col_rows[*c].remove(&(k as u32));
                        } else if after && !before {
                            col_rows[*c].insert(k as u32);
                        }
                    }
                    cur[k] = new;
                    ops.push((k as u32, r as u32, f));
                }
            }
            if !progress {
                break;
            }
        }
        let residual_rows: Vec<usize> = (0..m).filter(|&i| !is_pivot_row[i]).collect();
        let mut residual_cols: Vec<usize> = residual_rows
            .iter()
            .flat_map(|&i| cur[i].iter().map(|(j, _)| *j))
            .collect();
        residual_cols.sort_unstable();
        residual_cols.dedup();
        let compact: std::collections::HashMap<usize, usize> = residual_cols
            .iter()
            .enumerate()
            .map(|(a, &j)| (j, a))
            .collect();
        let res_rows: Vec<SparseVec> = residual_rows
            .iter()
            .map(|&i| {
                SparseVec(
                    cur[i]
                        .iter()
                        .map(|(j, v)| (compact[j], v.clone()))
                        .collect(),
                )
            })
            .collect();
        let large = res_rows.len() * residual_cols.len() > RESIDUAL_LIMIT;
        let residual = std::sync::OnceLock::new();
        if !large {
            let _ = residual.set(ResidualSystem::new(res_rows.clone(), residual_cols.len()));
        }
        IntSystem {
            rows,
            ncols,
            reduced: cur,
            ops,
            pivots,
            residual_rows,
            residual_cols,
            res_rows,
            large,
            residual,
            modular: std::sync::OnceLock::new(),
        }
    }

    fn residual(&self) -> &ResidualSystem {
        self.residual
            .get_or_init(|| ResidualSystem::new(self.res_rows.clone(), self.residual_cols.len()))
    }

    pub fn rank(&self) -> usize {
        self.pivots.len() + self.residual().rank()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    /// Completes a choice of the non-pivot unknowns to a solution of the
    /// reduced pivot equations with right-hand side `b`.
    fn back_substitute(&self, free: SparseVec, b: &[Int]) -> SparseVec {
        let mut pairs: Vec<(usize, Int)> = free.iter().cloned().collect();
        for (r, j, u) in &self.pivots {
            let v = &b[*r] - &self.reduced[*r].dot(&free);
            pairs.push((*j, &v * u));
        }
        SparseVec::from_pairs(pairs)
    }

    /// Saturated basis of `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let zero = vec![Int::ZERO; self.rows.len()];
        let mut in_residual = vec![false; self.ncols];
        for &j in &self.residual_cols {
            in_residual[j] = true;
        }
        let mut is_pivot = vec![false; self.ncols];
        for (_, j, _) in &self.pivots {
            is_pivot[*j] = true;
        }
        let mut out = Vec::new();
        for j in 0..self.ncols {
            if !is_pivot[j] && !in_residual[j] {
                out.push(self.back_substitute(SparseVec::unit(j), &zero));
            }
        }
        for y in self.residual().kernel() {
            let free = SparseVec(
                y.iter()
                    .map(|(a, v)| (self.residual_cols[*a], v.clone()))
                    .collect(),
            );
            out.push(self.back_substitute(SparseVec::from_pairs(free.0), &zero));
        }
        out.sort();
        out
    }

    pub fn solve(&self, b: &[Int]) -> SolveOutcome {
        assert_eq!(b.len(), self.rows.len());
        let mut bb = b.to_vec();
        for (k, r, f) in &self.ops {
            let add = f * &bb[*r as usize];
            bb[*k as usize] += &add;
        }
        let rb: Vec<Int> = self.residual_rows.iter().map(|&i| bb[i].clone()).collect();
        let modular = if self.large {
            self.modular
                .get_or_init(|| ModularSystem::new(&self.res_rows, self.residual_cols.len()))
                .solve(&rb)
        } else {
            None
        };
        match modular.unwrap_or_else(|| self.residual().solve(&rb)) {
            SolveOutcome::Solution(y) => {
                let free = SparseVec::from_pairs(
                    y.iter()
                        .map(|(a, v)| (self.residual_cols[*a], v.clone()))
                        .collect(),
                );
                SolveOutcome::Solution(self.back_substitute(free, &bb))
            }
            SolveOutcome::Infeasible(w) => {
                // pull the witness back through the elimination steps
                let mut full = vec![Int::ZERO; self.rows.len()];
                for (a, v) in w.w.iter() {
                    full[self.residual_rows[*a]] = v.clone();
                }
                for (k, r, f) in self.ops.iter().rev() {
                    let wk = &full[*k as usize];
                    if !wk.is_zero() {
                        let add = f * wk;
                        full[*r as usize] += &add;
                    }
                }
                SolveOutcome::Infeasible(InfeasibilityWitness {
                    w: SparseVec::from_dense(&full),
                    modulus: w.modulus,
                })
            }
        }
    }
}

/// Solves `A x = b` once.
pub fn solve(rows: Vec<SparseVec>, ncols: usize, b: &[Int]) -> SolveOutcome {
    IntSystem::new(rows, ncols).solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[i64]) -> SparseVec {
        SparseVec::from_dense(&v.iter().map(|&x| Int::from(x)).collect::<Vec<_>>())
    }

    fn apply(rows: &[SparseVec], x: &SparseVec) -> Vec<Int> {
        rows.iter().map(|r| r.dot(x)).collect()
    }

    #[test]
    fn solves_bezout_equation() {
        // 2x + 3y = 1 has integer solutions even though no pivot divides 1
        let rows = vec![sv(&[2, 3])];
        match solve(rows.clone(), 2, &[Int::ONE]) {
            SolveOutcome::Solution(x) => assert_eq!(apply(&rows, &x), vec![Int::ONE]),
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    #[test]
    fn detects_divisibility_obstruction() {
        // 2x + 4y = 1 has no integer solution
        let rows = vec![sv(&[2, 4])];
        let b = vec![Int::ONE];
        match solve(rows.clone(), 2, &b) {
            SolveOutcome::Infeasible(w) => {
                assert_eq!(w.modulus, Int::from(2));
                assert!(w.verify(&rows, &b));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn detects_inconsistent_rows() {
        let rows = vec![sv(&[1, 1]), sv(&[2, 2])];
        let b = vec![Int::ONE, Int::from(3)];
        match solve(rows.clone(), 2, &b) {
            SolveOutcome::Infeasible(w) => {
                assert!(w.modulus.is_zero());
                assert!(w.verify(&rows, &b));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn kernel_is_saturated() {
        // D = [2 4], kernel spanned by (-2, 1), not by (-4, 2)
        let cols = vec![sv(&[2]), sv(&[4])];
        let k = kernel_from_columns(&cols);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(v.get(0).abs(), Int::from(2));
        assert_eq!(v.get(1).abs(), Int::ONE);
    }

    #[test]
    fn lattice_membership() {
        let l = CoordLattice::new(vec![sv(&[2, 0]), sv(&[1, 3])]);
        assert_eq!(l.coordinates(&sv(&[3, 3])), Some(sv(&[1, 1])));
        assert!(l.coordinates(&sv(&[1, 0])).is_none());
        let mut e = Echelon::new();
        e.insert_plain(sv(&[2, 0]));
        e.insert_plain(sv(&[1, 3]));
        assert!(e.contains(&sv(&[0, 6])));
        assert!(!e.contains(&sv(&[0, 1])));
    }
}
