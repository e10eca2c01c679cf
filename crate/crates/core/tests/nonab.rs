use bredon::nonab::*;
use bredon::permgroup::named::*;
use bredon::permgroup::{semidirect_product, GAction, PermGroup, Semidirect, Subgroup};
use proptest::prelude::*;

mod common;
use common::{complements, cyclic_action, fixed, subconjugate};

fn instances() -> Vec<(&'static str, PermGroup, PermGroup, GAction)> {
    let mut out = Vec::new();
    for (label, pi, n, k) in [
        ("z3 by z2 inverting", cyclic(3), 2, 2),
        ("z2 by z2 trivially", cyclic(2), 2, 1),
        ("z3 by z2 trivially", cyclic(3), 2, 1),
        ("z4 by z2 inverting", cyclic(4), 2, 2),
        ("v4 by z2 swapping", klein_four(), 2, 2),
        ("v4 by z3 rotating", klein_four(), 3, 3),
        ("z5 by z4", cyclic(5), 4, 4),
        ("s3 by z2 trivially", symmetric(3), 2, 1),
        ("s3 by z2 conjugating", symmetric(3), 2, 2),
        ("z2 by z4 trivially", cyclic(2), 4, 1),
    ] {
        let (g, act) = cyclic_action(&pi, n, k);
        out.push((label, pi, g, act));
    }
    out
}

fn conjugate_by_any(sd: &Semidirect, a: &Subgroup, b: &Subgroup, by: &[usize]) -> bool {
    by.iter()
        .any(|&x| sd.group.conjugate(a, x).members() == b.members())
}

#[test]
fn sym3_complements_are_conjugate() {
    let (g, act) = cyclic_action(&cyclic(3), 2, 2);
    let pi = cyclic(3);
    let cl = h1(&g, &g.whole(), &pi, &act).unwrap();
    assert_eq!(cl.class_count(), 1);
    let sd = semidirect_product(&pi, &g, &act).unwrap();
    assert_eq!(sd.group.order(), 6);
    assert!(!sd.group.is_abelian());
    let cs = complements(&sd, 2);
    assert_eq!(cs.len(), 3);
    let gs = sd.g_subgroup();
    for k in &cs {
        assert!(subconjugate(&sd, k, &gs));
    }
    assert!(
        subconjugate_iff_principal(&pi, &g, &act, &g.whole())
            .unwrap()
            .holds
    );
}

#[test]
fn klein_diagonal_is_not_subconjugate() {
    let (pi, g) = (cyclic(2), cyclic(2));
    let act = GAction::trivial(&g, &pi);
    let cl = h1(&g, &g.whole(), &pi, &act).unwrap();
    assert_eq!(cl.class_count(), 2);
    let sd = semidirect_product(&pi, &g, &act).unwrap();
    assert!(sd.group.is_abelian());
    let gs = sd.g_subgroup();
    let diagonal: Vec<Subgroup> = complements(&sd, 2)
        .into_iter()
        .filter(|k| k.members() != gs.members())
        .collect();
    assert_eq!(diagonal.len(), 1);
    let d = &diagonal[0];
    assert!(d.members().iter().all(|&x| {
        let (a, y) = sd.coords[x];
        (a == 0) == (y == 0)
    }));
    assert!(!subconjugate(&sd, d, &gs));
    let r = subconjugate_iff_principal(&pi, &g, &act, &g.whole()).unwrap();
    assert!(r.holds);
    assert_eq!(r.entries.iter().filter(|e| !e.subconjugate).count(), 1);
}

#[test]
fn cocycles_match_complements() {
    for (label, pi, g, act) in instances() {
        let cl = h1(&g, &g.whole(), &pi, &act).unwrap();
        let sd = semidirect_product(&pi, &g, &act).unwrap();
        let cs = complements(&sd, g.order());
        assert_eq!(cl.cocycles.len(), cs.len(), "{label}");
        // classes of complements under conjugation by pi
        let pi_elems = sd.pi_embed.clone();
        let mut reps: Vec<Subgroup> = Vec::new();
        for k in &cs {
            if !reps.iter().any(|r| conjugate_by_any(&sd, r, k, &pi_elems)) {
                reps.push(k.clone());
            }
        }
        assert_eq!(cl.class_count(), reps.len(), "{label}");
        for phi in &cl.cocycles {
            assert!(phi.is_cocycle(&g, &pi, &act), "{label}");
            let k = subgroup_from_cocycle(phi, &sd).unwrap();
            assert!(cs.iter().any(|c| c.members() == k.members()), "{label}");
            assert_eq!(&cocycle_from_complement(&k, &sd).unwrap(), phi, "{label}");
        }
    }
}

#[test]
fn principal_iff_subconjugate() {
    for (label, pi, g, act) in instances() {
        let sd = semidirect_product(&pi, &g, &act).unwrap();
        let gs = sd.g_subgroup();
        for h in g.all_subgroups().unwrap() {
            let r = subconjugate_iff_principal(&pi, &g, &act, h).unwrap();
            assert!(r.holds, "{label} H={}", h.order());
            let cl = h1(&g, h, &pi, &act).unwrap();
            for (i, phi) in cl.cocycles.iter().enumerate() {
                let k = subgroup_from_cocycle(phi, &sd).unwrap();
                assert_eq!(cl.is_principal(i), subconjugate(&sd, &k, &gs), "{label}");
            }
        }
    }
}

#[test]
fn h1_of_subgroups_of_g() {
    // restricting to the trivial subgroup leaves only the trivial cocycle
    for (_, pi, g, act) in instances() {
        let cl = h1(&g, &g.trivial_subgroup(), &pi, &act).unwrap();
        assert_eq!(cl.cocycles.len(), 1);
        assert_eq!(cl.class_count(), 1);
    }
}

proptest! {
    #![proptest_config(fixed(64))]

    #[test]
    fn twisting_round_trips(which in 0usize..10, pick in any::<prop::sample::Index>(), alpha in any::<prop::sample::Index>()) {
        let (_, pi, g, act) = instances().swap_remove(which);
        let cl = h1(&g, &g.whole(), &pi, &act).unwrap();
        let phi = &cl.cocycles[pick.index(cl.cocycles.len())];
        let a = alpha.index(pi.order());
        let twisted = phi.twist(a, &pi, &act);
        prop_assert!(twisted.is_cocycle(&g, &pi, &act));
        prop_assert_eq!(&twisted.twist(pi.inv(a), &pi, &act), phi);
        prop_assert!(equivalent(phi, &twisted, &pi, &act));
        let i = cl.cocycles.binary_search(&twisted).unwrap();
        let j = cl.cocycles.binary_search(phi).unwrap();
        prop_assert_eq!(cl.class_of(i), cl.class_of(j));
    }

    #[test]
    fn complement_round_trips(which in 0usize..10, pick in any::<prop::sample::Index>()) {
        let (_, pi, g, act) = instances().swap_remove(which);
        let sd = semidirect_product(&pi, &g, &act).unwrap();
        let cs = complements(&sd, g.order());
        let k = &cs[pick.index(cs.len())];
        let phi = cocycle_from_complement(k, &sd).unwrap();
        prop_assert!(phi.is_cocycle(&g, &pi, &act));
        let back = subgroup_from_cocycle(&phi, &sd).unwrap();
        prop_assert_eq!(back.members(), k.members());
    }
}
