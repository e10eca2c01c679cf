//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use bredon::permgroup::named::cyclic;
use bredon::permgroup::{GAction, PermGroup, Semidirect, Subgroup};
use bredon::posetred::FinPoset;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::ProptestConfig;
use proptest::test_runner::RngSeed;

pub fn fixed(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Fraction-free elimination on a small square matrix.
pub fn det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Every automorphism of a small group, by trying all bijections.
pub fn automorphisms(pi: &PermGroup) -> Vec<Vec<usize>> {
    fn extend(pi: &PermGroup, img: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let m = pi.order();
        if img.len() == m {
            let hom = (0..m).all(|a| (0..m).all(|b| img[pi.mul(a, b)] == pi.mul(img[a], img[b])));
            if hom {
                out.push(img.clone());
            }
            return;
        }
        for c in 0..m {
            if !used[c] {
                used[c] = true;
                img.push(c);
                extend(pi, img, used, out);
                img.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(pi, &mut Vec::new(), &mut vec![false; pi.order()], &mut out);
    out
}

fn order_of(a: &[usize]) -> usize {
    let id: Vec<usize> = (0..a.len()).collect();
    let mut p = a.to_vec();
    let mut k = 1;
    while p != id {
        p = (0..a.len()).map(|x| a[p[x]]).collect();
        k += 1;
    }
    k
}

/// `Z/n` acting on `pi` through the smallest automorphism of order `k`.
pub fn cyclic_action(pi: &PermGroup, n: usize, k: usize) -> (PermGroup, GAction) {
    let g = cyclic(n);
    let aut = automorphisms(pi)
        .into_iter()
        .filter(|a| order_of(a) == k)
        .min()
        .expect("automorphism of that order");
    let act = GAction::from_generator_images(&g, pi, &[aut]).unwrap();
    (g, act)
}

/// Subgroups of `π ⋊ G` of order `|G|` meeting `π` trivially.
pub fn complements(sd: &Semidirect, g_order: usize) -> Vec<Subgroup> {
    let pi = sd.pi_subgroup();
    sd.group
        .all_subgroups()
        .unwrap()
        .iter()
        .filter(|k| k.order() == g_order && k.members().iter().all(|&x| x == 0 || !pi.contains(x)))
        .cloned()
        .collect()
}

pub fn subconjugate(sd: &Semidirect, k: &Subgroup, h: &Subgroup) -> bool {
    (0..sd.group.order()).any(|x| sd.group.conjugate(k, x).is_subgroup_of(h))
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn brute_isomorphic(a: &FinPoset, b: &FinPoset) -> bool {
    a.len() == b.len()
        && permutations(a.len())
            .iter()
            .any(|s| (0..a.len()).all(|x| (0..a.len()).all(|y| a.leq(x, y) == b.leq(s[x], s[y]))))
}

/// A poset on `n` points (plus an optional bottom) with `i < j` whenever the
/// corresponding bit is set, closed transitively.
pub fn poset_from_bits(n: usize, bits: &[bool], bottom: bool) -> FinPoset {
    let mut less = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits[k % bits.len()] {
                less.push((i, j));
            }
            k += 1;
        }
    }
    let mut names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    if bottom {
        names.push("bottom".into());
        less.extend((0..n).map(|i| (n, i)));
    }
    FinPoset::from_relations(names, &less).unwrap()
}

/// Number of double cosets `HgK`, by union-find over the elements.
pub fn double_coset_count(g: &PermGroup, h: &Subgroup, k: &Subgroup) -> usize {
    let mut parent: Vec<usize> = (0..g.order()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for x in 0..g.order() {
        for &a in h.members() {
            for &b in k.members() {
                let y = g.mul(g.mul(a, x), b);
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
        }
    }
    (0..g.order())
        .filter(|&x| find(&mut parent, x) == x)
        .count()
}

/// Length of the longest strictly increasing chain starting at each element.
pub fn brute_depths(p: &FinPoset) -> Vec<usize> {
    fn go(p: &FinPoset, x: usize, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(d) = memo[x] {
            return d;
        }
        let d = (0..p.len())
            .filter(|&y| p.lt(x, y))
            .map(|y| 1 + go(p, y, memo))
            .max()
            .unwrap_or(0);
        memo[x] = Some(d);
        d
    }
    let mut memo = vec![None; p.len()];
    (0..p.len()).map(|x| go(p, x, &mut memo)).collect()
}

/// Maximal with exactly one lower cover, or of depth 1 with exactly one
/// element above.
pub fn brute_superfluous(p: &FinPoset, x: usize) -> bool {
    let n = p.len();
    let above: Vec<usize> = (0..n).filter(|&y| p.lt(x, y)).collect();
    if above.is_empty() {
        let covers = (0..n)
            .filter(|&y| p.lt(y, x) && !(0..n).any(|z| p.lt(y, z) && p.lt(z, x)))
            .count();
        covers == 1
    } else {
        above.len() == 1 && brute_depths(p)[x] == 1
    }
}

/// Repeatedly deletes the first superfluous element of the induced poset.
pub fn brute_reduction(p: &FinPoset) -> FinPoset {
    let mut cur = p.clone();
    while let Some(x) = (0..cur.len()).find(|&x| brute_superfluous(&cur, x)) {
        let keep: Vec<usize> = (0..cur.len()).filter(|&y| y != x).collect();
        cur = cur.induced(&keep);
    }
    cur
}
