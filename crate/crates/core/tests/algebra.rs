use std::sync::Arc;

use bredon::family::Family;
use bredon::orbitcat::orbit_category;
use bredon::permgroup::{named, PermGroup};
use bredon::zcat::bar::bar_cohomology;
use bredon::zcat::ext::{cohomology, ext_groups, ext_groups_with};
use bredon::zcat::resolution::CoverOrder;
use bredon::zcat::{AbGroupInvariants, CatModule, FinCategory};
use bredon::{smith_normal_form, Int, IntMatrix, SparseVec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

mod common;
use common::{det, fixed};

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors as ratios of successive gcds of k×k minors.
fn determinantal_factors(a: &[Vec<i64>]) -> Vec<BigInt> {
    let (m, n) = (a.len(), a[0].len());
    let mut out = Vec::new();
    let mut last = BigInt::one();
    for k in 1..=m.min(n) {
        let mut d = BigInt::zero();
        for rows in subsets(m, k) {
            for cols in subsets(n, k) {
                let minor = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| BigInt::from(a[i][j])).collect())
                    .collect();
                d = d.gcd(&det(minor));
            }
        }
        if d.is_zero() {
            break;
        }
        out.push(&d / &last);
        last = d;
    }
    out
}

fn det_int(m: &IntMatrix) -> BigInt {
    det(m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(Int::to_big).collect())
        .collect())
}

fn arb_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=6)
        .prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(-9i64..=9, n), m))
}

proptest! {
    #![proptest_config(fixed(200))]

    #[test]
    fn smith_is_unimodular(a in arb_matrix()) {
        let am = IntMatrix::from_rows(&a);
        let s = smith_normal_form(&am);
        prop_assert_eq!(s.u.mul(&am).mul(&s.v), s.s.clone());
        prop_assert!(det_int(&s.u).abs().is_one());
        prop_assert!(det_int(&s.v).abs().is_one());
        for i in 0..s.s.rows() {
            for j in 0..s.s.cols() {
                if i != j {
                    prop_assert!(s.s[(i, j)].is_zero());
                }
            }
        }
        let d = s.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[0].divides(&w[1]));
        }
        let got: Vec<BigInt> = d.iter().map(Int::to_big).collect();
        prop_assert_eq!(got, determinantal_factors(&a));
    }
}

fn family_cases() -> Vec<(String, Family)> {
    let mut out = Vec::new();
    for name in ["z2", "z4", "z2xz2", "s3", "z6"] {
        let g = Arc::new(named::by_name(name).unwrap());
        for f in bredon::family::all_families(&g).unwrap() {
            out.push((format!("{name} {}", bredon::dimension::family_label(&f)), f));
        }
    }
    out
}

proptest! {
    #![proptest_config(fixed(24))]

    #[test]
    fn ext_is_resolution_independent(pick in any::<prop::sample::Index>(), seed in any::<u64>(), k in prop::sample::select(vec![0i64, 2, 3])) {
        let cases = family_cases();
        let (label, f) = &cases[pick.index(cases.len())];
        let o = orbit_category(f, true).unwrap();
        let cat = o.cat().clone();
        let z = CatModule::constant(cat.clone());
        let m = if k == 0 { z.clone() } else { CatModule::constant_mod(cat.clone(), k) };
        let a = ext_groups_with(&z, &m, 3, CoverOrder::Canonical).unwrap();
        let b = ext_groups_with(&z, &m, 3, CoverOrder::Shuffled(seed)).unwrap();
        prop_assert_eq!(a, b, "{}", label);
    }
}

fn group_module(
    g: &PermGroup,
    sign: Option<&dyn Fn(usize) -> bool>,
    modulus: Option<i64>,
) -> CatModule {
    let cat = Arc::new(FinCategory::from_group(g));
    let rho: Vec<IntMatrix> = (0..g.order())
        .map(|x| {
            let v = match sign {
                Some(odd) if odd(x) => -1,
                _ => 1,
            };
            IntMatrix::from_rows(&[vec![v]])
        })
        .collect();
    let rels = match modulus {
        Some(k) => vec![SparseVec::from_pairs(vec![(0, Int::from(k))])],
        None => vec![],
    };
    CatModule::from_representation(cat, g, &rho, rels).unwrap()
}

fn list(values: &[&[i64]]) -> Vec<AbGroupInvariants> {
    values
        .iter()
        .map(|v| AbGroupInvariants::from_list(v))
        .collect()
}

#[test]
fn cyclic_group_cohomology() {
    for m in [2i64, 3, 4, 5, 6] {
        let g = named::cyclic(m as usize);
        let z = group_module(&g, None, None);
        let want = list(&[&[0], &[], &[m], &[], &[m]]);
        assert_eq!(cohomology(&z, 4).unwrap(), want, "Z/{m}");
        assert_eq!(bar_cohomology(&g, &z, 4).unwrap(), want, "Z/{m}");
    }
}

#[test]
fn resolution_agrees_with_bar_complex() {
    for name in ["z2xz2", "s3", "z4"] {
        let g = named::by_name(name).unwrap();
        let sign_of = |x: usize| {
            let p = g.element(x);
            p.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 1
        };
        let modules = [
            group_module(&g, None, None),
            group_module(&g, None, Some(2)),
            group_module(&g, Some(&sign_of), None),
        ];
        for m in &modules {
            let z = CatModule::constant(m.cat().clone());
            assert_eq!(
                ext_groups(&z, m, 3).unwrap(),
                bar_cohomology(&g, m, 3).unwrap(),
                "{name}"
            );
        }
    }
}

#[test]
fn cohomology_over_all_subgroups_is_concentrated() {
    // the orbit category of all subgroups has a terminal object
    for name in ["z4", "s3", "d4"] {
        let g = Arc::new(named::by_name(name).unwrap());
        let o = orbit_category(&Family::all(g).unwrap(), true).unwrap();
        let h = cohomology(&CatModule::constant(o.cat().clone()), 3).unwrap();
        assert_eq!(h, list(&[&[0], &[], &[], &[]]), "{name}");
    }
}
