//! One line per acceptance criterion, each checked against an oracle that
//! does not share code with the computation it checks.

use std::sync::Arc;
use std::time::Instant;

use bredon::dimension::*;
use bredon::family::Family;
use bredon::nonab::{cocycle_from_complement, h1, subgroup_from_cocycle};
use bredon::orbitcat::{double_coset_decomposition, orbit_category, restriction};
use bredon::permgroup::named::{alternating, cyclic, klein_four, symmetric};
use bredon::permgroup::{semidirect_product, GAction, PermGroup, Subgroup};
use bredon::posetred::*;
use bredon::suites::{point_posets, shapiro_instances};
use bredon::zcat::bar::bar_cohomology;
use bredon::zcat::ext::ext_groups_with;
use bredon::zcat::resolution::CoverOrder;
use bredon::zcat::{AbGroupInvariants, CatModule, FinCategory, NatMap};
use bredon::{smith_normal_form, Int, IntMatrix};
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::*;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn class_reps(g: &PermGroup) -> Vec<Subgroup> {
    let l = g.lattice().unwrap();
    l.classes().iter().map(|c| l.get(c[0]).clone()).collect()
}

fn contains_whole(f: &Family) -> bool {
    f.subgroups().iter().any(|h| h.order() == f.group().order())
}

fn list(values: &[&[i64]]) -> Vec<AbGroupInvariants> {
    values
        .iter()
        .map(|v| AbGroupInvariants::from_list(v))
        .collect()
}

fn criterion_1() -> Outcome {
    let g = Arc::new(alternating(5));
    let f = Family::proper(g).map_err(err)?;
    let mut solver = CdSolver::new(&f).map_err(err)?;
    let o = solver.orbit().expect("orbit category").clone();
    check(o.object_count() == 8, || {
        format!("{} objects", o.object_count())
    })?;
    let d1 = solver.decide(1).map_err(err)?;
    let d2 = solver.decide(2).map_err(err)?;
    check(
        !d1.le && matches!(d1.certificate, Certificate::Obstruction(_)),
        || "cd <= 1 not refuted by an obstruction".into(),
    )?;
    check(
        d2.le && matches!(d2.certificate, Certificate::Splitting(_)),
        || "cd <= 2 lacks a splitting".into(),
    )?;
    check(
        solver.verify(&d1).map_err(err)? && solver.verify(&d2).map_err(err)?,
        || "certificate failed re-verification".into(),
    )?;
    let r = cd_report(&f, 3).map_err(err)?;
    check(r.value == Some(2), || format!("value {:?}", r.value))?;
    Ok("cd = 2, obstruction at 1, splitting at 2".into())
}

/// Criteria 2 and 3 share the sweep.
fn sweep() -> Result<Vec<(String, bool, Vec<bool>)>, String> {
    let mut out = Vec::new();
    for e in battery().map_err(err)? {
        for f in &e.families {
            let mut solver = CdSolver::new(f).map_err(err)?;
            let v: Vec<bool> = (0..=1)
                .map(|n| solver.decide(n).map(|d| d.le))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            out.push((
                format!("{} {}", e.name, family_label(f)),
                contains_whole(f),
                v,
            ));
        }
    }
    Ok(out)
}

fn criterion_2(rows: &[(String, bool, Vec<bool>)]) -> Outcome {
    let proper: Vec<_> = rows.iter().filter(|r| !r.1).collect();
    for (label, _, v) in &proper {
        check(!v[1], || format!("{label}: cd <= 1"))?;
    }
    check(proper.iter().any(|r| r.0.starts_with("a5")), || {
        "A5 not swept".into()
    })?;
    Ok(format!(
        "{} proper families, none with cd <= 1",
        proper.len()
    ))
}

fn criterion_3(rows: &[(String, bool, Vec<bool>)]) -> Outcome {
    for (label, whole, v) in rows {
        check(v[0] == *whole, || format!("{label}: cd <= 0 is {}", v[0]))?;
    }
    Ok(format!("{} families", rows.len()))
}

fn criterion_4() -> Outcome {
    let inst = shapiro_instances().map_err(err)?;
    let mut torsion = 0;
    for (name, f, h, c) in &inst {
        let r = verify_shapiro(f, h, c, 3).map_err(err)?;
        check(r.equal && r.subgroup_side.len() == 4, || {
            format!("{name} H={} M={}", h.order(), c.label())
        })?;
        if matches!(c, Coefficients::ConstantMod(_)) {
            torsion += 1;
        }
    }
    check(inst.len() >= 25 && torsion > 0, || {
        format!("{} instances", inst.len())
    })?;
    Ok(format!(
        "{} instances, {torsion} with torsion coefficients",
        inst.len()
    ))
}

fn criterion_5() -> Outcome {
    let g = Arc::new(cyclic(6));
    let n = class_reps(&g)
        .into_iter()
        .find(|s| s.order() == 3)
        .ok_or("no subgroup of order 3")?;
    let z2 = cyclic(2);
    let cat = Arc::new(FinCategory::from_group(&z2));
    let trivial = CatModule::constant(cat.clone());
    let rho: Vec<IntMatrix> = (0..2)
        .map(|x| IntMatrix::from_rows(&[vec![if x == 0 { 1i64 } else { -1 }]]))
        .collect();
    let sign = CatModule::from_representation(cat, &z2, &rho, Vec::new()).map_err(err)?;
    let expected = [
        (
            QuotientCoefficients::Trivial,
            &trivial,
            list(&[&[0], &[], &[2], &[], &[2]]),
        ),
        (
            QuotientCoefficients::Sign,
            &sign,
            list(&[&[], &[2], &[], &[2], &[]]),
        ),
    ];
    for (c, module, want) in expected {
        let bar = bar_cohomology(&z2, module, 4).map_err(err)?;
        check(bar == want, || format!("bar oracle gives {bar:?}"))?;
        let r = verify_trivial_action(&g, &n, &c, 4).map_err(err)?;
        check(r.bredon == want, || {
            format!("{}: {:?}", c.label(), r.bredon)
        })?;
    }
    Ok("Z,0,Z/2,0,Z/2 and 0,Z/2,0,Z/2,0".into())
}

fn criterion_6() -> Outcome {
    let mut count = 0;
    for e in battery()
        .map_err(err)?
        .iter()
        .filter(|e| e.group.order() <= 24)
    {
        let g = &e.group;
        for f in &e.families {
            let o = Arc::new(orbit_category(f, true).map_err(err)?);
            for h in class_reps(g) {
                let r = restriction(&o, &h).map_err(err)?;
                for k in 0..o.object_count() {
                    let d = double_coset_decomposition(&r, k).map_err(err)?;
                    let want = double_coset_count(g, &h, o.subgroup(k));
                    let there = d.forward.then(&d.backward);
                    let back = d.backward.then(&d.forward);
                    let inverse = there.equal_mod(&NatMap::identity(&d.source), &d.source)
                        && back.equal_mod(&NatMap::identity(&d.target), &d.target);
                    check(d.summand_count() == want && inverse, || {
                        format!("{} H={} K={}", e.name, h.order(), o.subgroup(k).order())
                    })?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} decompositions"))
}

fn criterion_7() -> Outcome {
    let (g, act) = cyclic_action(&cyclic(3), 2, 2);
    let pi = cyclic(3);
    let cl = h1(&g, &g.whole(), &pi, &act).map_err(err)?;
    let sd = semidirect_product(&pi, &g, &act).map_err(err)?;
    let cs = complements(&sd, 2);
    let gs = sd.g_subgroup();
    check(cl.class_count() == 1 && cs.len() == 3, || {
        format!(
            "Sym(3): {} classes, {} complements",
            cl.class_count(),
            cs.len()
        )
    })?;
    check(cs.iter().all(|k| subconjugate(&sd, k, &gs)), || {
        "a Sym(3) complement is not conjugate into 1 x G".into()
    })?;

    let (pi, g) = (cyclic(2), cyclic(2));
    let act = GAction::trivial(&g, &pi);
    let cl = h1(&g, &g.whole(), &pi, &act).map_err(err)?;
    let sd = semidirect_product(&pi, &g, &act).map_err(err)?;
    let gs = sd.g_subgroup();
    let diagonal: Vec<Subgroup> = complements(&sd, 2)
        .into_iter()
        .filter(|k| k.members() != gs.members())
        .collect();
    check(cl.class_count() == 2 && diagonal.len() == 1, || {
        format!("Z/2 x Z/2: {} classes", cl.class_count())
    })?;
    check(!subconjugate(&sd, &diagonal[0], &gs), || {
        "diagonal is subconjugate".into()
    })?;
    Ok("|H1| = 1 for Sym(3), |H1| = 2 for Z/2 x Z/2".into())
}

fn criterion_8() -> Outcome {
    let posets = point_posets().map_err(err)?;
    for (label, p) in &posets {
        let r = point_check(p).map_err(err)?;
        let point = brute_reduction(p).len() == 1;
        check(r.e_is_point == point, || {
            format!("{label}: reduction disagrees with brute force")
        })?;
        check(point == r.cd_le_1, || {
            format!("{label}: E point {point} vs cd <= 1 {}", r.cd_le_1)
        })?;
    }
    let crown: Vec<bool> = poset_cd(&FinPoset::crown(2, 2), 3)
        .map_err(err)?
        .iter()
        .map(|d| d.le)
        .collect();
    check(crown == [false, false, true], || {
        format!("crown verdicts {crown:?}")
    })?;
    Ok(format!(
        "{} posets agree; crown with bottom has cd = 2",
        posets.len()
    ))
}

fn criterion_9() -> Outcome {
    let g = Arc::new(alternating(5));
    let l = g.lattice().map_err(err)?;
    let w = find_crown(&g).map_err(err)?;
    let (a, b) = (w.a_indices(), w.b_indices());
    let a4_like = |i: usize| {
        let h = l.get(i);
        h.order() == 12 && (0..g.order()).all(|x| g.conjugate(h, x).order() == 12)
    };
    check(!a.is_empty() && a.iter().all(|&i| a4_like(i)), || {
        "A is not A4 conjugates".into()
    })?;
    check(
        !b.is_empty() && b.iter().all(|&i| l.get(i).order() == 3),
        || "B is not C3s".into(),
    )?;
    // each B lies in two members of A, each A contains two members of B
    let sub = |x: usize, y: usize| l.get(x).is_subgroup_of(l.get(y));
    check(
        b.iter()
            .all(|&y| a.iter().filter(|&&x| sub(y, x)).count() >= 2),
        || "B in two A".into(),
    )?;
    check(
        a.iter()
            .all(|&x| b.iter().filter(|&&y| sub(y, x)).count() >= 2),
        || "A has two B".into(),
    )?;
    check(check_crown(&g, &a, &b).map_err(err)?.all(), || {
        "conditions".into()
    })?;
    let r = verify_crown_survives(g.clone()).map_err(err)?;
    check(
        a.iter().chain(&b).all(|i| r.reduced.contains(i)) && r.reduced.len() > 1,
        || "E does not contain A and B".into(),
    )?;
    Ok(format!(
        "|A| = {}, |B| = {}, |E| = {}",
        a.len(),
        b.len(),
        r.reduced.len()
    ))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    for _ in 0..100 {
        let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let a: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let am = IntMatrix::from_rows(&a);
        let s = smith_normal_form(&am);
        let det_of = |x: &IntMatrix| {
            det(x
                .to_rows()
                .iter()
                .map(|r| r.iter().map(Int::to_big).collect())
                .collect())
        };
        check(s.u.mul(&am).mul(&s.v) == s.s, || {
            format!("U A V != S for {a:?}")
        })?;
        check(
            det_of(&s.u).abs().is_one() && det_of(&s.v).abs().is_one(),
            || format!("non-unimodular transform for {a:?}"),
        )?;
    }

    for name in ["z4", "z2xz2", "s3", "z6"] {
        let g = Arc::new(bredon::permgroup::named::by_name(name).unwrap());
        for f in bredon::family::all_families(&g).map_err(err)? {
            let o = orbit_category(&f, true).map_err(err)?;
            let z = CatModule::constant(o.cat().clone());
            let m = CatModule::constant_mod(o.cat().clone(), 2);
            let base = ext_groups_with(&z, &m, 3, CoverOrder::Canonical).map_err(err)?;
            let seed = rng.gen();
            let other = ext_groups_with(&z, &m, 3, CoverOrder::Shuffled(seed)).map_err(err)?;
            check(base == other, || {
                format!("{name}: Ext depends on the resolution")
            })?;
        }
    }

    for _ in 0..50 {
        let n = rng.gen_range(1..=7);
        let bits: Vec<bool> = (0..21).map(|_| rng.gen()).collect();
        let p = poset_from_bits(n, &bits, rng.gen());
        let base = e_reduction(&p);
        for _ in 0..10 {
            let other = reduce(&p, Regime::Random(rng.gen())).poset;
            check(brute_isomorphic(&base, &other), || {
                "E depends on the order".into()
            })?;
        }
    }

    for (pi, n, k) in [
        (cyclic(3), 2, 2),
        (klein_four(), 3, 3),
        (symmetric(3), 2, 2),
        (cyclic(5), 4, 4),
    ] {
        let (g, act) = cyclic_action(&pi, n, k);
        let sd = semidirect_product(&pi, &g, &act).map_err(err)?;
        let cl = h1(&g, &g.whole(), &pi, &act).map_err(err)?;
        for phi in &cl.cocycles {
            let k = subgroup_from_cocycle(phi, &sd).map_err(err)?;
            check(
                cocycle_from_complement(&k, &sd).map_err(err)? == *phi,
                || "round trip".into(),
            )?;
        }
        for k in complements(&sd, g.order()) {
            let phi = cocycle_from_complement(&k, &sd).map_err(err)?;
            let back = subgroup_from_cocycle(&phi, &sd).map_err(err)?;
            check(back.members() == k.members(), || "round trip".into())?;
        }
    }
    Ok("SNF, Ext, E-reduction and cocycle round trips with seed 0x5eed".into())
}

fn report(n: usize, start: Instant, r: Outcome) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match r {
        Ok(detail) => {
            println!("criterion {n}: PASS ({detail}; {secs:.1} s)");
            true
        }
        Err(why) => {
            println!("criterion {n}: FAIL ({why}; {secs:.1} s)");
            false
        }
    }
}

fn main() {
    let mut ok = true;
    let t = Instant::now();
    ok &= report(1, t, criterion_1());
    let t = Instant::now();
    let rows = sweep();
    let secs_sweep = t;
    match rows {
        Ok(rows) => {
            ok &= report(2, secs_sweep, criterion_2(&rows));
            ok &= report(3, Instant::now(), criterion_3(&rows));
        }
        Err(e) => {
            ok &= report(2, secs_sweep, Err(e.clone()));
            ok &= report(3, Instant::now(), Err(e));
        }
    }
    let checks: [(usize, fn() -> Outcome); 7] = [
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    for (n, f) in checks {
        let t = Instant::now();
        ok &= report(n, t, f());
    }
    if !ok {
        std::process::exit(1);
    }
}
