//! Modular methods for integer linear systems.
//!
//! A rank profile modulo a word-size prime picks a nonsingular block `B`;
//! rational solutions come from p-adic lifting against `B`; random rational
//! solutions are combined by Bezout until the denominator is 1. When the
//! denominator refuses to drop, elimination over `Z/q^k` at each prime `q`
//! dividing it either finds an infeasibility certificate or proves that an
//! integer solution exists.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::int::Int;
use crate::linalg::{InfeasibilityWitness, SolveOutcome, SparseVec};

const PRIMES: [u64; 4] = [2147483647, 2147483629, 2147483587, 2147483579];

fn residue(v: &BigInt, m: u64) -> u64 {
    match v.to_i64() {
        Some(x) => x.rem_euclid(m as i64) as u64,
        None => v.mod_floor(&BigInt::from(m)).to_u64().unwrap(),
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

fn inv_prime(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Inverse of a unit modulo any `m`.
fn inv_unit(a: u64, m: u64) -> u64 {
    let e = BigInt::extended_gcd(&BigInt::from(a), &BigInt::from(m));
    debug_assert!(e.gcd.is_one());
    residue(&e.x, m)
}

type BigRows = Vec<Vec<(usize, BigInt)>>;

fn big_rows(rows: &[SparseVec]) -> BigRows {
    rows.iter()
        .map(|r| r.iter().map(|(j, v)| (*j, v.to_big())).collect())
        .collect()
}

/// Rows `I` and columns `J` with `A[I, J]` nonsingular modulo `p`, of size
/// the rank of `A` modulo `p`.
fn rank_profile(rows: &BigRows, ncols: usize, p: u64) -> (Vec<usize>, Vec<usize>) {
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut d = vec![0u64; ncols];
            for (j, v) in r {
                d[*j] = residue(v, p);
            }
            d
        })
        .collect();
    let mut perm: Vec<usize> = (0..a.len()).collect();
    let (mut is, mut js) = (Vec::new(), Vec::new());
    let mut rank = 0;
    for j in 0..ncols {
        if rank == a.len() {
            break;
        }
        let Some(k) = (rank..a.len()).find(|&k| a[k][j] != 0) else {
            continue;
        };
        a.swap(rank, k);
        perm.swap(rank, k);
        let inv = inv_prime(a[rank][j], p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            if row[j] == 0 {
                continue;
            }
            let f = p - mul_mod(row[j], inv, p);
            for c in j..ncols {
                if prow[c] != 0 {
                    row[c] = (row[c] + mul_mod(f, prow[c], p)) % p;
                }
            }
        }
        is.push(perm[rank]);
        js.push(j);
        rank += 1;
    }
    (is, js)
}

/// `P B = L U` modulo `p`, `L` unit lower triangular.
struct Lu {
    p: u64,
    n: usize,
    lu: Vec<Vec<u64>>,
    /// `perm[i]`: row of `B` moved to position `i`
    perm: Vec<usize>,
}

impl Lu {
    fn new(mut a: Vec<Vec<u64>>, p: u64) -> Option<Lu> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let piv = (k..n).find(|&i| a[i][k] != 0)?;
            a.swap(k, piv);
            perm.swap(k, piv);
            let inv = inv_prime(a[k][k], p);
            let (top, rest) = a.split_at_mut(k + 1);
            let prow = &top[k];
            for row in rest.iter_mut() {
                if row[k] == 0 {
                    continue;
                }
                let l = mul_mod(row[k], inv, p);
                row[k] = l;
                for c in k + 1..n {
                    if prow[c] != 0 {
                        row[c] = (row[c] + p - mul_mod(l, prow[c], p)) % p;
                    }
                }
            }
        }
        Some(Lu { p, n, lu: a, perm })
    }

    /// `B z = r`.
    fn solve(&self, r: &[u64]) -> Vec<u64> {
        let (p, n) = (self.p, self.n);
        let mut y: Vec<u64> = self.perm.iter().map(|&i| r[i]).collect();
        for i in 0..n {
            let mut acc = y[i];
            for (c, yc) in y.iter().enumerate().take(i) {
                acc = (acc + p - mul_mod(self.lu[i][c], *yc, p)) % p;
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for c in i + 1..n {
                acc = (acc + p - mul_mod(self.lu[i][c], y[c], p)) % p;
            }
            y[i] = mul_mod(acc, inv_prime(self.lu[i][i], p), p);
        }
        y
    }

    /// `B^T y = r`.
    fn solve_transposed(&self, r: &[u64]) -> Vec<u64> {
        let (p, n) = (self.p, self.n);
        // U^T t = r
        let mut t = r.to_vec();
        for i in 0..n {
            let mut acc = t[i];
            for c in 0..i {
                acc = (acc + p - mul_mod(self.lu[c][i], t[c], p)) % p;
            }
            t[i] = mul_mod(acc, inv_prime(self.lu[i][i], p), p);
        }
        // L^T s = t
        for i in (0..n).rev() {
            let mut acc = t[i];
            for c in i + 1..n {
                acc = (acc + p - mul_mod(self.lu[c][i], t[c], p)) % p;
            }
            t[i] = acc;
        }
        let mut y = vec![0u64; n];
        for (i, &row) in self.perm.iter().enumerate() {
            y[row] = t[i];
        }
        y
    }
}

/// `n/d` with `|n|, d <= sqrt(m/2)` and `n = a d (mod m)`.
fn rational_reconstruction(a: &BigInt, m: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || &t1.abs() > bound {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

fn mat_vec(rows: &BigRows, x: &[BigInt]) -> Vec<BigInt> {
    rows.iter()
        .map(|r| {
            let mut acc = BigInt::zero();
            for (j, v) in r {
                if !x[*j].is_zero() {
                    acc += v * &x[*j];
                }
            }
            acc
        })
        .collect()
}

/// Rational solution `num / den` of `B x = rhs` by p-adic lifting.
fn dixon(
    b: &BigRows,
    solve: impl Fn(&[u64]) -> Vec<u64>,
    p: u64,
    rhs: &[BigInt],
) -> Option<(Vec<BigInt>, BigInt)> {
    let n = b.len();
    if n == 0 {
        return Some((Vec::new(), BigInt::one()));
    }
    // Hadamard-type bound on numerators and denominator
    let mut col_norm = vec![BigInt::zero(); n];
    for r in b {
        for (j, v) in r {
            col_norm[*j] += v * v;
        }
    }
    let log_det: u64 = col_norm.iter().map(|c| c.bits() / 2 + 1).sum();
    let rhs_bits = rhs.iter().map(|v| v.bits()).max().unwrap_or(0) + n.ilog2() as u64 + 1;
    let cap_bits = 2 * log_det + rhs_bits + 64;
    let pb = BigInt::from(p);
    let mut r = rhs.to_vec();
    let mut x = vec![BigInt::zero(); n];
    let mut pk = BigInt::one();
    let mut next_check = 1u64;
    let mut k = 0u64;
    loop {
        let rm: Vec<u64> = r.iter().map(|v| residue(v, p)).collect();
        let z = solve(&rm);
        let zb: Vec<BigInt> = z.iter().map(|&v| BigInt::from(v)).collect();
        for (xi, zi) in x.iter_mut().zip(&zb) {
            if !zi.is_zero() {
                *xi += &pk * zi;
            }
        }
        let bz = mat_vec(b, &zb);
        for (ri, s) in r.iter_mut().zip(bz) {
            *ri = (&*ri - s) / &pb;
        }
        pk *= &pb;
        k += 1;
        if k == next_check || pk.bits() > cap_bits {
            next_check = k + k.div_ceil(2).max(1);
            if let Some(sol) = reconstruct(b, rhs, &x, &pk) {
                return Some(sol);
            }
            if pk.bits() > cap_bits {
                return None;
            }
        }
    }
}

fn reconstruct(
    b: &BigRows,
    rhs: &[BigInt],
    x: &[BigInt],
    m: &BigInt,
) -> Option<(Vec<BigInt>, BigInt)> {
    let bound = (m >> 1u32).sqrt();
    let mut den = BigInt::one();
    let mut num: Vec<BigInt> = Vec::with_capacity(x.len());
    for xi in x {
        let a = (xi * &den).mod_floor(m);
        let sym = if a > (m >> 1u32) { &a - m } else { a.clone() };
        if sym.abs() <= bound {
            num.push(sym);
            continue;
        }
        let (n, d) = rational_reconstruction(&a, m, &bound)?;
        for v in num.iter_mut() {
            *v *= &d;
        }
        num.push(n);
        den *= d;
        if den > bound {
            return None;
        }
    }
    let lhs = mat_vec(b, &num);
    if lhs.iter().zip(rhs).all(|(l, r)| *l == r * &den) {
        Some((num, den))
    } else {
        None
    }
}

fn small_factors(n: &BigInt) -> Option<Vec<(u64, u32)>> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut q = 2u64;
    while !n.is_one() {
        if q > 1 << 20 {
            return None;
        }
        let qb = BigInt::from(q);
        let mut e = 0;
        while (&n % &qb).is_zero() {
            n /= &qb;
            e += 1;
        }
        if e > 0 {
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    Some(out)
}

/// Elimination of `A x = b` over `Z/q^k` with pivots of least valuation. A
/// row of the transformed system whose right-hand side has smaller
/// valuation than its pivot yields a certificate.
fn local_witness(
    rows: &BigRows,
    ncols: usize,
    b: &[BigInt],
    q: u64,
    k: u32,
) -> Option<InfeasibilityWitness> {
    let modq = q.checked_pow(k)?;
    let val = |x: u64| -> u32 {
        if x == 0 {
            return k;
        }
        let (mut x, mut e) = (x, 0);
        while x % q == 0 {
            x /= q;
            e += 1;
        }
        e
    };
    let m = rows.len();
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut d = vec![0u64; ncols];
            for (j, v) in r {
                d[*j] = residue(v, modq);
            }
            d
        })
        .collect();
    let mut bb: Vec<u64> = b.iter().map(|v| residue(v, modq)).collect();
    let mut active: Vec<bool> = vec![true; m];
    let mut col_done = vec![false; ncols];
    let mut ops: Vec<(usize, usize, u64)> = Vec::new();
    let mut pivots: Vec<(usize, u32)> = Vec::new();
    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for i in (0..m).filter(|&i| active[i]) {
            for j in (0..ncols).filter(|&j| !col_done[j]) {
                let e = val(a[i][j]);
                if e < k && best.is_none_or(|b| e < b.0) {
                    best = Some((e, i, j));
                    if e == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((e, t, j)) = best else { break };
        let qe = q.pow(e);
        let u_inv = inv_unit(a[t][j] / qe, modq);
        active[t] = false;
        col_done[j] = true;
        pivots.push((t, e));
        let prow = a[t].clone();
        for i in (0..m).filter(|&i| active[i]) {
            if a[i][j] == 0 {
                continue;
            }
            let s = a[i][j] / qe;
            let f = (modq - mul_mod(s, u_inv, modq)) % modq;
            for c in 0..ncols {
                if prow[c] != 0 {
                    a[i][c] = (a[i][c] + mul_mod(f, prow[c], modq)) % modq;
                }
            }
            bb[i] = (bb[i] + mul_mod(f, bb[t], modq)) % modq;
            ops.push((i, t, f));
        }
    }
    let bad = pivots
        .iter()
        .find(|(t, e)| val(bb[*t]) < *e)
        .map(|(t, e)| (*t, q.pow(*e)))
        .or_else(|| (0..m).find(|&i| active[i] && bb[i] != 0).map(|i| (i, modq)))?;
    let (row, modulus) = bad;
    let mut w = vec![0u64; m];
    w[row] = 1;
    for (tgt, src, f) in ops.iter().rev() {
        if w[*tgt] != 0 {
            w[*src] = (w[*src] + mul_mod(*f, w[*tgt], modq)) % modq;
        }
    }
    Some(InfeasibilityWitness {
        w: SparseVec::from_pairs(
            w.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0)
                .map(|(i, v)| (i, Int::from(*v as i64)))
                .collect(),
        ),
        modulus: Int::from(modulus as i64),
    })
}

/// Per-prime data: the nonsingular block and its factorization.
struct Block {
    p: u64,
    rows: Vec<usize>,
    cols: Vec<usize>,
    free: Vec<usize>,
    b: BigRows,
    bt: BigRows,
    a_free: BigRows,
    lu: Lu,
}

impl Block {
    fn new(a: &BigRows, ncols: usize, p: u64) -> Option<Block> {
        let (rows, cols) = rank_profile(a, ncols, p);
        let mut col_pos = vec![usize::MAX; ncols];
        for (k, &j) in cols.iter().enumerate() {
            col_pos[j] = k;
        }
        let free: Vec<usize> = (0..ncols).filter(|&j| col_pos[j] == usize::MAX).collect();
        let mut free_pos = vec![usize::MAX; ncols];
        for (k, &j) in free.iter().enumerate() {
            free_pos[j] = k;
        }
        let rho = rows.len();
        let mut b: BigRows = vec![Vec::new(); rho];
        let mut bt: BigRows = vec![Vec::new(); rho];
        let mut a_free: BigRows = vec![Vec::new(); rho];
        let mut dense = vec![vec![0u64; rho]; rho];
        for (k, &i) in rows.iter().enumerate() {
            for (j, v) in &a[i] {
                if col_pos[*j] != usize::MAX {
                    let c = col_pos[*j];
                    b[k].push((c, v.clone()));
                    bt[c].push((k, v.clone()));
                    dense[k][c] = residue(v, p);
                } else {
                    a_free[k].push((free_pos[*j], v.clone()));
                }
            }
        }
        let lu = Lu::new(dense, p)?;
        Some(Block {
            p,
            rows,
            cols,
            free,
            b,
            bt,
            a_free,
            lu,
        })
    }

    /// Solution with the given free values, as `(numerators, denominator)`
    /// over all columns.
    fn particular(
        &self,
        b: &[BigInt],
        free_vals: &[BigInt],
        ncols: usize,
    ) -> Option<(Vec<BigInt>, BigInt)> {
        let af = mat_vec(&self.a_free, free_vals);
        let rhs: Vec<BigInt> = self.rows.iter().zip(af).map(|(&i, s)| &b[i] - s).collect();
        let (num, den) = dixon(&self.b, |r| self.lu.solve(r), self.p, &rhs)?;
        let mut full = vec![BigInt::zero(); ncols];
        for (k, &j) in self.cols.iter().enumerate() {
            full[j] = num[k].clone();
        }
        for (k, &j) in self.free.iter().enumerate() {
            full[j] = &free_vals[k] * &den;
        }
        Some((full, den))
    }
}

/// Integer systems `A x = b` solved by modular methods; the factorization
/// modulo the first prime is reused across right-hand sides.
pub struct ModularSystem {
    rows: BigRows,
    ncols: usize,
    block: Option<Block>,
}

enum Attempt {
    Done(SolveOutcome),
    Unlucky,
}

impl ModularSystem {
    pub fn new(rows: &[SparseVec], ncols: usize) -> Self {
        let rows = big_rows(rows);
        let block = Block::new(&rows, ncols, PRIMES[0]);
        ModularSystem { rows, ncols, block }
    }

    /// Exact answer, or `None` if every prime was unlucky or a denominator
    /// could not be factored.
    pub fn solve(&self, b: &[Int]) -> Option<SolveOutcome> {
        let bb: Vec<BigInt> = b.iter().map(|v| v.to_big()).collect();
        if let Some(block) = &self.block {
            if let Some(Attempt::Done(out)) = self.attempt(block, &bb) {
                return Some(out);
            }
        }
        for &p in &PRIMES[1..] {
            let block = Block::new(&self.rows, self.ncols, p)?;
            if let Some(Attempt::Done(out)) = self.attempt(&block, &bb) {
                return Some(out);
            }
        }
        None
    }

    fn residual_row(&self, num: &[BigInt], den: &BigInt, b: &[BigInt]) -> Option<usize> {
        let lhs = mat_vec(&self.rows, num);
        lhs.iter().zip(b).position(|(l, r)| *l != r * den)
    }

    fn attempt(&self, block: &Block, b: &[BigInt]) -> Option<Attempt> {
        let nfree = block.free.len();
        let zero = vec![BigInt::zero(); nfree];
        let Some((mut num, mut den)) = block.particular(b, &zero, self.ncols) else {
            return Some(Attempt::Unlucky);
        };
        if let Some(i) = self.residual_row(&num, &den, b) {
            // inconsistent over Q: express row i through the rows of the block
            let target: Vec<BigInt> = {
                let mut t = vec![BigInt::zero(); block.rows.len()];
                let mut col_pos = vec![usize::MAX; self.ncols];
                for (k, &j) in block.cols.iter().enumerate() {
                    col_pos[j] = k;
                }
                for (j, v) in &self.rows[i] {
                    if col_pos[*j] != usize::MAX {
                        t[col_pos[*j]] = v.clone();
                    }
                }
                t
            };
            let Some((y, dy)) = dixon(
                &block.bt,
                |r| block.lu.solve_transposed(r),
                block.p,
                &target,
            ) else {
                return Some(Attempt::Unlucky);
            };
            let mut pairs: Vec<(usize, Int)> = vec![(i, Int::from_big(dy))];
            for (k, &row) in block.rows.iter().enumerate() {
                pairs.push((row, Int::from_big(-&y[k])));
            }
            let w = InfeasibilityWitness {
                w: SparseVec::from_pairs(pairs),
                modulus: Int::ZERO,
            };
            return Some(self.checked(w, b));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ block.p);
        let mut stagnant = 0;
        let mut locally_solvable = false;
        for _ in 0..64 {
            if den.is_one() {
                break;
            }
            if stagnant >= 3 && !locally_solvable {
                for (q, e) in small_factors(&den)? {
                    if let Some(w) = local_witness(&self.rows, self.ncols, b, q, e + 1) {
                        return Some(self.checked(w, b));
                    }
                }
                locally_solvable = true;
            }
            let vals: Vec<BigInt> = (0..nfree)
                .map(|_| BigInt::from(rng.gen_range(0..1u64 << 16)))
                .collect();
            let Some((n2, d2)) = block.particular(b, &vals, self.ncols) else {
                return Some(Attempt::Unlucky);
            };
            let e = den.extended_gcd(&d2);
            if e.gcd < den {
                num = num
                    .iter()
                    .zip(&n2)
                    .map(|(a, c)| &e.x * a + &e.y * c)
                    .collect();
                den = e.gcd;
                stagnant = 0;
            } else {
                stagnant += 1;
            }
        }
        if !den.is_one() || self.residual_row(&num, &den, b).is_some() {
            return None;
        }
        Some(Attempt::Done(SolveOutcome::Solution(
            SparseVec::from_pairs(
                num.into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, Int::from_big(v)))
                    .collect(),
            ),
        )))
    }

    fn checked(&self, w: InfeasibilityWitness, b: &[BigInt]) -> Attempt {
        let rows: Vec<SparseVec> = self
            .rows
            .iter()
            .map(|r| {
                SparseVec::from_pairs(
                    r.iter()
                        .map(|(j, v)| (*j, Int::from_big(v.clone())))
                        .collect(),
                )
            })
            .collect();
        let rhs: Vec<Int> = b.iter().map(|v| Int::from_big(v.clone())).collect();
        if w.verify(&rows, &rhs) {
            Attempt::Done(SolveOutcome::Infeasible(w))
        } else {
            Attempt::Unlucky
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[i64]) -> SparseVec {
        SparseVec::from_dense(&v.iter().map(|&x| Int::from(x)).collect::<Vec<_>>())
    }

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    fn check(rows: &[SparseVec], b: &[Int], out: &SolveOutcome) -> bool {
        match out {
            SolveOutcome::Solution(x) => rows.iter().zip(b).all(|(r, bi)| r.dot(x) == *bi),
            SolveOutcome::Infeasible(w) => w.verify(rows, b),
        }
    }

    #[test]
    fn lu_solves_both_ways() {
        let p = PRIMES[0];
        let a = vec![vec![0, 2, 1], vec![3, 1, 0], vec![1, 1, 1]];
        let lu = Lu::new(a.clone(), p).unwrap();
        let z = lu.solve(&[5, 7, 11]);
        for i in 0..3 {
            let s = (0..3).fold(0, |acc, j| (acc + mul_mod(a[i][j], z[j], p)) % p);
            assert_eq!(s, [5, 7, 11][i]);
        }
        let y = lu.solve_transposed(&[5, 7, 11]);
        for j in 0..3 {
            let s = (0..3).fold(0, |acc, i| (acc + mul_mod(a[i][j], y[i], p)) % p);
            assert_eq!(s, [5, 7, 11][j]);
        }
    }

    #[test]
    fn bezout_needs_combination() {
        let rows = vec![sv(&[2, 3])];
        let b = ints(&[1]);
        let out = ModularSystem::new(&rows, 2).solve(&b).unwrap();
        assert!(matches!(out, SolveOutcome::Solution(_)));
        assert!(check(&rows, &b, &out));
    }

    #[test]
    fn parity_obstruction() {
        let rows = vec![sv(&[2, 4]), sv(&[0, 6])];
        let b = ints(&[1, 0]);
        let out = ModularSystem::new(&rows, 2).solve(&b).unwrap();
        assert!(matches!(out, SolveOutcome::Infeasible(_)));
        assert!(check(&rows, &b, &out));
    }

    #[test]
    fn rational_inconsistency() {
        let rows = vec![sv(&[1, 1]), sv(&[2, 2])];
        let b = ints(&[1, 3]);
        let out = ModularSystem::new(&rows, 2).solve(&b).unwrap();
        match &out {
            SolveOutcome::Infeasible(w) => assert!(w.modulus.is_zero()),
            _ => panic!("expected infeasible"),
        }
        assert!(check(&rows, &b, &out));
    }
}
