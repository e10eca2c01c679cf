//! Dense integer matrices and the Smith normal form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::int::Int;
use crate::linalg::SparseVec;

/// A dense row-major matrix of exact integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![Int::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::ONE;
        }
        m
    }

    pub fn from_rows<T: Into<Int> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v.clone().into();
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given sparse vectors.
    pub fn from_sparse_columns(rows: usize, cols: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter() {
                m[(*i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn sparse_column(&self, j: usize) -> SparseVec {
        SparseVec::from_pairs(
            (0..self.rows)
                .filter(|&i| !self[(i, j)].is_zero())
                .map(|i| (i, self[(i, j)].clone()))
                .collect(),
        )
    }

    pub fn sparse_row(&self, i: usize) -> SparseVec {
        SparseVec::from_dense(self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j].add_mul(a, b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Int::ZERO;
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_mul(a, b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul_sparse(&self, v: &SparseVec) -> SparseVec {
        let mut out = vec![Int::ZERO; self.rows];
        for (k, x) in v.iter() {
            for (i, o) in out.iter_mut().enumerate() {
                let a = &self[(i, *k)];
                if !a.is_zero() {
                    o.add_mul(a, x);
                }
            }
        }
        SparseVec::from_dense(&out)
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Columns `range` as a new matrix.
    pub fn columns(&self, range: std::ops::Range<usize>) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, range.len());
        for i in 0..self.rows {
            for (jj, j) in range.clone().enumerate() {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.data[src * self.cols + j].clone();
            if !s.is_zero() {
                self.data[dst * self.cols + j].add_mul(k, &s);
            }
        }
    }

    /// col[dst] += k * col[src]
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self.data[i * self.cols + src].clone();
            if !s.is_zero() {
                self.data[i * self.cols + dst].add_mul(k, &s);
            }
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    /// Replaces rows (a, b) by (s*a + t*b, u*a + v*b).
    fn combine_rows(&mut self, a: usize, b: usize, s: &Int, t: &Int, u: &Int, v: &Int) {
        for j in 0..self.cols {
            let x = self.data[a * self.cols + j].clone();
            let y = self.data[b * self.cols + j].clone();
            if x.is_zero() && y.is_zero() {
                continue;
            }
            self.data[a * self.cols + j] = &(s * &x) + &(t * &y);
            self.data[b * self.cols + j] = &(u * &x) + &(v * &y);
        }
    }

    fn combine_cols(&mut self, a: usize, b: usize, s: &Int, t: &Int, u: &Int, v: &Int) {
        for i in 0..self.rows {
            let x = self.data[i * self.cols + a].clone();
            let y = self.data[i * self.cols + b].clone();
            if x.is_zero() && y.is_zero() {
                continue;
            }
            self.data[i * self.cols + a] = &(s * &x) + &(t * &y);
            self.data[i * self.cols + b] = &(u * &x) + &(v * &y);
        }
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::ONE;
        }
        let mut a = self.clone();
        let mut sign = Int::ONE;
        let mut prev = Int::ONE;
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Int::ZERO,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[(i, j)] * &a[(k, k)]) - &(&a[(i, k)] * &a[(k, j)]);
                    a[(i, j)] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
            }
            prev = a[(k, k)].clone();
        }
        &sign * &a[(n - 1, n - 1)]
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            rows: usize,
            cols: usize,
            entries: &'a [Int],
        }
        Repr {
            rows: self.rows,
            cols: self.cols,
            entries: &self.data,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            entries: Vec<Int>,
        }
        let r = Repr::deserialize(d)?;
        if r.entries.len() != r.rows * r.cols {
            return Err(serde::de::Error::custom("entry count does not match shape"));
        }
        Ok(IntMatrix {
            rows: r.rows,
            cols: r.cols,
            data: r.entries,
        })
    }
}

/// Result of [`smith_normal_form`]: `u * a * v == s`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl Smith {
    /// The nonzero diagonal entries, in order.
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.rank).map(|i| self.s[(i, i)].clone()).collect()
    }
}

fn find_pivot(a: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..a.rows {
        for j in k..a.cols {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => x.cmp_abs(&a[b]) == std::cmp::Ordering::Less,
            };
            if better {
                best = Some((i, j));
                if x.is_unit() {
                    return best;
                }
            }
        }
    }
    best
}

/// Smith normal form with unimodular transforms.
///
/// Pivots are the smallest nonzero entry by absolute value in the remaining
/// block, ties broken by row-major position. The diagonal of `s` is
/// nonnegative and forms a divisibility chain.
pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut k = 0;
    while k < m.min(n) {
        let Some((pi, pj)) = find_pivot(&s, k) else {
            break;
        };
        s.swap_rows(k, pi);
        u.swap_rows(k, pi);
        s.swap_cols(k, pj);
        v.swap_cols(k, pj);
        loop {
            let mut dirty = false;
            // clear column k below the pivot
            for i in k + 1..m {
                if s[(i, k)].is_zero() {
                    continue;
                }
                let p = s[(k, k)].clone();
                let x = s[(i, k)].clone();
                if p.divides(&x) {
                    let q = -&x.div_floor(&p);
                    s.add_row_multiple(i, k, &q);
                    u.add_row_multiple(i, k, &q);
                } else {
                    let (g, c1, c2) = Int::extended_gcd(&p, &x);
                    let pg = p.div_floor(&g);
                    let xg = x.div_floor(&g);
                    let neg_xg = -&xg;
                    s.combine_rows(k, i, &c1, &c2, &neg_xg, &pg);
                    u.combine_rows(k, i, &c1, &c2, &neg_xg, &pg);
                }
            }
            // clear row k right of the pivot
            for j in k + 1..n {
                if s[(k, j)].is_zero() {
                    continue;
                }
                let p = s[(k, k)].clone();
                let x = s[(k, j)].clone();
                if p.divides(&x) {
                    let q = -&x.div_floor(&p);
                    s.add_col_multiple(j, k, &q);
                    v.add_col_multiple(j, k, &q);
                } else {
                    let (g, c1, c2) = Int::extended_gcd(&p, &x);
                    let pg = p.div_floor(&g);
                    let xg = x.div_floor(&g);
                    let neg_xg = -&xg;
                    s.combine_cols(k, j, &c1, &c2, &neg_xg, &pg);
                    v.combine_cols(k, j, &c1, &c2, &neg_xg, &pg);
                    dirty = true;
                }
            }
            if dirty && (k + 1..m).any(|i| !s[(i, k)].is_zero()) {
                continue;
            }
            // divisibility: the pivot must divide the remaining block
            let p = s[(k, k)].clone();
            let bad = (k + 1..m)
                .flat_map(|i| (k + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !p.divides(&s[(i, j)]));
            match bad {
                Some((i, _)) => {
                    let one = Int::ONE;
                    s.add_row_multiple(k, i, &one);
                    u.add_row_multiple(k, i, &one);
                }
                None => break,
            }
        }
        if s[(k, k)].is_negative() {
            s.negate_row(k);
            u.negate_row(k);
        }
        k += 1;
    }
    Smith { u, s, v, rank: k }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_two_by_two() {
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let r = smith_normal_form(&a);
        assert_eq!(r.diagonal(), vec![Int::from(2), Int::from(4)]);
        assert_eq!(r.u.mul(&a).mul(&r.v), r.s);
    }

    #[test]
    fn snf_identity_and_zero() {
        let i = IntMatrix::identity(3);
        let r = smith_normal_form(&i);
        assert_eq!(r.s, i);
        let z = IntMatrix::zeros(2, 3);
        let r = smith_normal_form(&z);
        assert_eq!(r.rank, 0);
        assert!(r.s.is_zero());
    }

    #[test]
    fn determinant_small() {
        let a = IntMatrix::from_rows(&[vec![2, 1, 0], vec![1, 3, 4], vec![0, 5, 6]]);
        // 2*(18-20) - 1*(6-0) = -10
        assert_eq!(a.determinant(), Int::from(-10));
    }
}
