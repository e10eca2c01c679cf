use std::sync::Arc;

use bredon::family::Family;
use bredon::permgroup::named;
use bredon::posetred::*;
use proptest::prelude::*;

mod common;
use common::{
    brute_depths, brute_isomorphic, brute_reduction, brute_superfluous, fixed, poset_from_bits,
};

fn brute_depth(p: &FinPoset, x: usize) -> usize {
    brute_depths(p)[x]
}

fn arb_poset(max: usize) -> impl Strategy<Value = FinPoset> {
    (
        1..=max,
        prop::collection::vec(any::<bool>(), 1..40),
        any::<bool>(),
    )
        .prop_map(|(n, bits, bottom)| poset_from_bits(n, &bits, bottom))
}

#[test]
fn depth_follows_longest_upward_chain() {
    let p = FinPoset::chain(4);
    assert_eq!(p.depths(), vec![3, 2, 1, 0]);
    let c = FinPoset::crown(2, 3);
    assert_eq!(c.depths(), vec![2, 1, 1, 0, 0, 0]);
}

#[test]
fn family_posets_match_brute_force() {
    for name in ["s3", "d4", "a4"] {
        let g = Arc::new(named::by_name(name).unwrap());
        let p = FinPoset::of_family(&Family::proper(g).unwrap());
        for x in 0..p.len() {
            assert_eq!(p.depth(x), brute_depth(&p, x), "{name}");
            assert_eq!(p.is_superfluous(x), brute_superfluous(&p, x), "{name}");
        }
    }
}

#[test]
fn crowns_with_bottom() {
    for m in 1..=3 {
        for n in 1..=3 {
            let r = reduce(&FinPoset::crown(m, n), Regime::First);
            assert_eq!(r.is_point(), m == 1 || n == 1, "crown {m}x{n}");
        }
    }
}

#[test]
fn crown_pins_cd_two() {
    let d = poset_cd(&FinPoset::crown(2, 2), 3).unwrap();
    let verdicts: Vec<bool> = d.iter().map(|d| d.le).collect();
    assert_eq!(verdicts, vec![false, false, true]);
}

#[test]
fn point_check_on_chains_and_small_crowns() {
    for n in 1..=5 {
        let r = point_check(&FinPoset::chain(n)).unwrap();
        assert!(r.agree && r.e_is_point && r.cd_le_1);
    }
    let r = point_check(&FinPoset::crown(3, 2)).unwrap();
    assert!(r.agree && !r.e_is_point && !r.cd_le_1);
}

#[test]
fn point_check_needs_an_initial_object() {
    let p = FinPoset::from_relations(vec!["a".into(), "b".into()], &[]).unwrap();
    assert!(point_check(&p).is_err());
}

#[test]
fn a5_crown_witness() {
    let g = named::alternating(5);
    let w = find_crown(&g).unwrap();
    let l = g.lattice().unwrap();
    let a = w.a_indices();
    let b = w.b_indices();
    assert!(a.iter().all(|&i| l.get(i).order() == 12));
    assert!(b.iter().all(|&i| l.get(i).order() == 3));
    assert!(check_crown(&g, &a, &b).unwrap().all());
    assert!(find_crown(&named::symmetric(4)).is_err());
}

#[test]
fn maximal_subgroups_of_a5() {
    let g = named::alternating(5);
    let l = g.lattice().unwrap();
    let mut orders: Vec<usize> = maximal_subgroups(&g)
        .unwrap()
        .iter()
        .map(|&i| l.get(i).order())
        .collect();
    orders.sort_unstable();
    orders.dedup();
    assert_eq!(orders, vec![6, 10, 12]);
}

proptest! {
    #![proptest_config(fixed(64))]

    #[test]
    fn superfluous_matches_definition(p in arb_poset(8)) {
        for x in 0..p.len() {
            prop_assert_eq!(p.depth(x), brute_depth(&p, x));
            prop_assert_eq!(p.is_superfluous(x), brute_superfluous(&p, x));
        }
    }

    #[test]
    fn reduction_is_order_independent(p in arb_poset(7), seeds in prop::array::uniform10(any::<u64>())) {
        let base = e_reduction(&p);
        prop_assert!(base.superfluous().is_empty());
        let mut regimes = vec![Regime::Last, Regime::DepthOneFirst];
        regimes.extend(seeds.iter().map(|&s| Regime::Random(s)));
        for r in regimes {
            let other = reduce(&p, r).poset;
            prop_assert!(brute_isomorphic(&base, &other), "{:?}", r);
            prop_assert!(base.is_isomorphic(&other).unwrap());
        }
    }

    #[test]
    fn reduction_matches_brute_force(p in arb_poset(8)) {
        prop_assert!(brute_isomorphic(&e_reduction(&p), &brute_reduction(&p)));
    }

    #[test]
    fn reduction_is_idempotent(p in arb_poset(8)) {
        let once = e_reduction(&p);
        let twice = e_reduction(&once);
        prop_assert_eq!(once.len(), twice.len());
    }

    #[test]
    fn canonical_form_agrees_with_brute_force(a in arb_poset(6), b in arb_poset(6)) {
        prop_assert_eq!(a.is_isomorphic(&b).unwrap(), brute_isomorphic(&a, &b));
    }

    #[test]
    fn relabelling_preserves_canonical_form(p in arb_poset(7), shift in 0usize..7) {
        let n = p.len();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let q = p.induced(&perm);
        prop_assert_eq!(p.canonical_form().unwrap(), q.canonical_form().unwrap());
    }
}
