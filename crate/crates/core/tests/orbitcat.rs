use std::sync::Arc;

use bredon::family::{all_families, Family};
use bredon::matrix::IntMatrix;
use bredon::orbitcat::*;
use bredon::permgroup::named::*;
use bredon::permgroup::{PermGroup, Subgroup};
use bredon::zcat::{AbGroupInvariants, CatModule, FinCategory};

fn first_of_order(g: &PermGroup, k: usize) -> Subgroup {
    g.all_subgroups()
        .unwrap()
        .iter()
        .find(|s| s.order() == k)
        .unwrap()
        .clone()
}

fn hom_sizes(o: &OrbitCategory) -> Vec<Vec<usize>> {
    let c = o.cat();
    (0..c.object_count())
        .map(|a| (0..c.object_count()).map(|b| c.hom(a, b).len()).collect())
        .collect()
}

#[test]
fn z2_all_subgroups() {
    let g = Arc::new(cyclic(2));
    let o = orbit_category(&Family::all(g).unwrap(), true).unwrap();
    assert_eq!(hom_sizes(&o), vec![vec![2, 1], vec![0, 1]]);
}

#[test]
fn trivial_family_recovers_the_group() {
    let g = Arc::new(symmetric(3));
    let o = orbit_category(&Family::trivial(g).unwrap(), true).unwrap();
    assert_eq!(o.object_count(), 1);
    assert_eq!(o.cat().morphism_count(), 6);
}

#[test]
fn a5_proper_skeleton() {
    let g = Arc::new(alternating(5));
    let o = orbit_category(&Family::proper(g).unwrap(), true).unwrap();
    let orders: Vec<usize> = (0..o.object_count())
        .map(|i| o.subgroup(i).order())
        .collect();
    assert_eq!(orders, vec![1, 2, 3, 4, 5, 6, 10, 12]);
}

#[test]
fn hom_sets_match_equivariant_maps() {
    for g in [
        cyclic(4),
        klein_four(),
        symmetric(3),
        dihedral(4),
        quaternion(),
        alternating(4),
    ] {
        let g = Arc::new(g);
        let o = orbit_category(&Family::all(g.clone()).unwrap(), false).unwrap();
        for a in 0..o.object_count() {
            for b in 0..o.object_count() {
                let want = count_equivariant_maps(&g, o.subgroup(a), o.subgroup(b));
                assert_eq!(o.cat().hom(a, b).len(), want);
            }
        }
    }
}

#[test]
fn skeleton_and_full_agree_on_hom_counts() {
    let g = Arc::new(symmetric(4));
    let f = Family::all(g.clone()).unwrap();
    let sk = orbit_category(&f, true).unwrap();
    let full = orbit_category(&f, false).unwrap();
    for a in 0..sk.object_count() {
        for b in 0..sk.object_count() {
            let (fa, fb) = (
                full.object_of(sk.label(a)).unwrap(),
                full.object_of(sk.label(b)).unwrap(),
            );
            assert_eq!(sk.cat().hom(a, b).len(), full.cat().hom(fa, fb).len());
        }
    }
}

#[test]
fn pointed_trivial_family() {
    let g = Arc::new(cyclic(4));
    let (p, eq) = pointed_orbit_category(&Family::trivial(g).unwrap()).unwrap();
    assert_eq!(p.objects.len(), 4);
    assert!(eq.is_equivalence());
    assert!(eq.preimages.iter().all(|x| *x == Some(0)));
}

#[test]
fn pointed_sym3_proper() {
    let g = Arc::new(symmetric(3));
    let (p, eq) = pointed_orbit_category(&Family::proper(g).unwrap()).unwrap();
    assert!(p.cat.is_thin());
    assert_eq!(eq.poset.len(), 5);
    assert!(eq.is_equivalence());
    // one isomorphism class of pairs per subgroup
    let mut seen: Vec<usize> = eq.preimages.iter().map(|x| x.unwrap()).collect();
    seen.sort_unstable();
    seen.dedup();
    assert_eq!(seen.len(), 5);
}

#[test]
fn restriction_preserves_constant() {
    let g = Arc::new(symmetric(3));
    let o = Arc::new(orbit_category(&Family::all(g.clone()).unwrap(), true).unwrap());
    let r = restriction(&o, &first_of_order(&g, 3)).unwrap();
    let z = restrict(&CatModule::constant(o.cat().clone()), &r).unwrap();
    assert!(z.same_presentation(&CatModule::constant(r.small.cat().clone())));
}

#[test]
fn restriction_to_whole_group_is_identity() {
    let g = Arc::new(dihedral(4));
    let o = Arc::new(orbit_category(&Family::all(g.clone()).unwrap(), true).unwrap());
    let r = restriction(&o, &g.whole()).unwrap();
    assert_eq!(r.functor.objects, (0..o.object_count()).collect::<Vec<_>>());
    assert_eq!(
        r.functor.morphisms,
        (0..o.cat().morphism_count()).collect::<Vec<_>>()
    );
}

#[test]
fn double_cosets_sym3() {
    let g = Arc::new(symmetric(3));
    let c2 = first_of_order(&g, 2);
    let f = Family::generated(g.clone(), std::slice::from_ref(&c2)).unwrap();
    let o = Arc::new(orbit_category(&f, true).unwrap());
    let r = restriction(&o, &c2).unwrap();
    let k = o
        .locate(g.lattice().unwrap().index_of(&c2).unwrap())
        .unwrap()
        .0;
    assert_eq!(
        double_coset_decomposition(&r, k).unwrap().summand_count(),
        2
    );
}

#[test]
fn double_cosets_over_trivial_subgroup() {
    let g = Arc::new(alternating(4));
    let o = Arc::new(orbit_category(&Family::all(g.clone()).unwrap(), true).unwrap());
    let r = restriction(&o, &g.trivial_subgroup()).unwrap();
    for k in 0..o.object_count() {
        let d = double_coset_decomposition(&r, k).unwrap();
        assert_eq!(d.summand_count(), g.order() / o.subgroup(k).order());
    }
}

#[test]
fn double_cosets_whole_group() {
    let g = Arc::new(quaternion());
    let o = Arc::new(orbit_category(&Family::all(g.clone()).unwrap(), true).unwrap());
    let r = restriction(&o, &g.whole()).unwrap();
    for k in 0..o.object_count() {
        let d = double_coset_decomposition(&r, k).unwrap();
        assert_eq!(d.summand_count(), 1);
        assert_eq!(
            d.forward.mats,
            (0..o.object_count())
                .map(|c| IntMatrix::identity(d.source.gens(c)))
                .collect::<Vec<_>>()
        );
    }
}

#[test]
fn double_cosets_every_triple_small_groups() {
    for g in [cyclic(4), symmetric(3), dihedral(4), alternating(4)] {
        let g = Arc::new(g);
        for fam in all_families(&g).unwrap() {
            let o = Arc::new(orbit_category(&fam, true).unwrap());
            for cls in g.lattice().unwrap().classes() {
                let h = g.lattice().unwrap().get(cls[0]).clone();
                let r = restriction(&o, &h).unwrap();
                for k in 0..o.object_count() {
                    let d = double_coset_decomposition(&r, k).unwrap();
                    assert_eq!(d.summand_count(), g.double_cosets(&h, o.subgroup(k)).len());
                }
            }
        }
    }
}

#[test]
fn coinduction_adjunction() {
    let g = Arc::new(symmetric(3));
    let c2 = first_of_order(&g, 2);
    let f = Family::generated(g.clone(), std::slice::from_ref(&c2)).unwrap();
    let o = Arc::new(orbit_category(&f, true).unwrap());
    let r = restriction(&o, &first_of_order(&g, 3)).unwrap();
    assert_eq!(r.small.object_count(), 1);
    for m in [
        CatModule::constant(r.small.cat().clone()),
        CatModule::constant_mod(r.small.cat().clone(), 4),
        CatModule::free(r.small.cat().clone(), 0),
    ] {
        assert!(verify_coinduction_adjunction(&m, &r).unwrap());
    }
    // value at G/1: H\G/1 has two double cosets
    let co = coinduce(&CatModule::constant(r.small.cat().clone()), &r).unwrap();
    assert_eq!(co.value(0), AbGroupInvariants::free(2));
}

#[test]
fn coinduction_from_whole_group() {
    let g = Arc::new(cyclic(4));
    let o = Arc::new(orbit_category(&Family::all(g.clone()).unwrap(), true).unwrap());
    let r = restriction(&o, &g.whole()).unwrap();
    let z = CatModule::constant(r.small.cat().clone());
    assert!(coinduce(&z, &r)
        .unwrap()
        .same_presentation(&CatModule::constant(o.cat().clone())));
}

#[test]
fn quotient_pushforward_z4() {
    let g = Arc::new(cyclic(4));
    let o = Arc::new(orbit_category(&Family::all(g.clone()).unwrap(), true).unwrap());
    let n = first_of_order(&g, 2);
    let q = quotient_functor(&o, &n).unwrap();
    let z = quotient_pushforward(&CatModule::constant(o.cat().clone()), &q).unwrap();
    assert!(z.same_presentation(&CatModule::constant(q.quotient.cat().clone())));
    assert!(matches!(
        pushforward_of_free(&q, 0).unwrap(),
        PushedFree::Zero
    ));
    match pushforward_of_free(&q, 1).unwrap() {
        PushedFree::Free { object, .. } => assert_eq!(q.quotient.subgroup(object).order(), 1),
        PushedFree::Zero => panic!("free at G/N should survive"),
    }
}

#[test]
fn quotient_requires_member() {
    let g = Arc::new(cyclic(4));
    let o = Arc::new(orbit_category(&Family::trivial(g.clone()).unwrap(), true).unwrap());
    assert!(quotient_functor(&o, &first_of_order(&g, 2)).is_err());
}

fn sign_module(q: &TrivialActionPair) -> CatModule {
    let qg = &q.quotient;
    let rho: Vec<IntMatrix> = (0..qg.order())
        .map(|x| {
            let s = if x == PermGroup::IDENTITY { 1 } else { -1 };
            IntMatrix::from_rows(&[vec![s]])
        })
        .collect();
    CatModule::from_representation(q.quotient_cat.clone(), qg, &rho, vec![]).unwrap()
}

#[test]
fn trivial_action_z6() {
    let g = Arc::new(z6());
    let n = first_of_order(&g, 3);
    let pair = trivial_action_pair(&g, &n).unwrap();
    let z = CatModule::constant(pair.quotient_cat.clone());
    assert!(pair
        .ind_f(&z)
        .unwrap()
        .same_presentation(&CatModule::constant(pair.orbit.cat().clone())));
    let sign = sign_module(&pair);
    let ind = pair.ind_f(&sign).unwrap();
    ind.validate().unwrap();
    let oc = pair.orbit.cat();
    for f in 0..oc.morphism_count() {
        let gamma = pair.orbit.coset(f);
        let want = if pair.proj[gamma] == PermGroup::IDENTITY {
            1
        } else {
            -1
        };
        assert_eq!(ind.map(f), &IntMatrix::from_rows(&[vec![want]]));
    }
    assert!(pair.res_f(&ind).unwrap().same_presentation(&sign));
}

#[test]
fn fixed_points() {
    let g = Arc::new(symmetric(3));
    let cat = Arc::new(FinCategory::from_group(&g));
    let o = orbit_category(&Family::all(g.clone()).unwrap(), true).unwrap();
    let z = CatModule::constant(cat.clone());
    let fz = fixed_point_coefficients(&z, &o).unwrap();
    assert!(fz.same_presentation(&CatModule::constant(o.cat().clone())));
    // regular representation: rho(g) e_x = e_{gx}
    let n = g.order();
    let rho: Vec<IntMatrix> = (0..n)
        .map(|x| {
            let mut m = IntMatrix::zeros(n, n);
            for y in 0..n {
                m[(g.mul(x, y), y)] = bredon::Int::ONE;
            }
            m
        })
        .collect();
    let reg = CatModule::from_representation(cat, &g, &rho, vec![]).unwrap();
    let fr = fixed_point_coefficients(&reg, &o).unwrap();
    for c in 0..o.object_count() {
        assert_eq!(fr.gens(c), n / o.subgroup(c).order());
    }
    assert_eq!(fr.gens(0), n);
}
