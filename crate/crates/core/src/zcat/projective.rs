//! Deciding projectivity of syzygies by solving for a retraction.
//!
//! `Syz_n` is projective iff `0 → Syz_{n+1} → F_n → Syz_n → 0` splits, iff
//! the inclusion `Syz_{n+1} → F_n` has a retraction `r`. A natural map out of
//! `F_n` is free to choose on generators, so the unknowns are `x_j = r(gen_j)
//! ∈ Syz_{n+1}(c_j)`. The constraints say `r` fixes the generators
//! `y_l = d_{n+1}(gen_l)` of `Syz_{n+1}`.

use serde::Serialize;

use crate::int::Int;
use crate::linalg::{transpose, InfeasibilityWitness, IntSystem, SolveOutcome, SparseVec};
use crate::matrix::IntMatrix;
use crate::zcat::module::{CatModule, NatMap};
use crate::zcat::resolution::{apply_map, map_columns, Ambient, CoverOrder, Resolution};
use crate::{Error, Result};

/// A retraction `r: F_n → Syz_{n+1}` given on generators. The section of
/// `F_n → Syz_n` is `d_n(x) ↦ x - r(x)`.
///
/// When `lift` is present the retraction has the form `r = id - σ d_n` for
/// the map `σ: F_{n-1} → F_n` with `σ(gen_j) = lift[j]`; then `d_n r = 0`
/// alone makes `r` a retraction onto `ker d_n`.
#[derive(Clone, Debug, Serialize)]
pub struct Splitting {
    pub stage: usize,
    pub retraction: Vec<SparseVec>,
    pub lift: Option<Vec<SparseVec>>,
}

impl Splitting {
    /// Images of the section on the generators `d_n(gen_j)` of `Syz_n`.
    pub fn section_on_generators(&self, res: &Resolution) -> Vec<SparseVec> {
        let f = &res.stage(self.stage).free;
        self.retraction
            .iter()
            .enumerate()
            .map(|(j, x)| f.generator(j).add_scaled(x, &Int::from(-1)))
            .collect()
    }
}

/// Proof that no retraction exists: an integer combination of the
/// constraints that is inconsistent.
#[derive(Clone, Debug, Serialize)]
pub struct Obstruction {
    pub stage: usize,
    pub equations: usize,
    pub unknowns: usize,
    pub witness: InfeasibilityWitness,
}

#[derive(Clone, Debug)]
pub enum SplitOutcome {
    Split(Splitting),
    Obstructed(Obstruction),
}

impl SplitOutcome {
    pub fn splits(&self) -> bool {
        matches!(self, SplitOutcome::Split(_))
    }
}

/// The linear system for a retraction at stage `n`. The unknowns are the
/// coordinates of each `x_j` in `F_n(c_j)`; the first block of equations
/// puts `x_j` in `Syz_{n+1}`, the second makes `r` fix every `y_l`.
pub struct RetractionSystem {
    pub rows: Vec<SparseVec>,
    pub rhs: Vec<Int>,
    pub ncols: usize,
    /// start of the unknowns of each `x_j`
    pub offsets: Vec<usize>,
}

pub fn retraction_system(res: &mut Resolution, n: usize) -> Result<RetractionSystem> {
    res.extend_to(n + 1)?;
    let st = res.stage(n);
    let fnm = &st.free;
    let amb = res.codomain(n);
    let next = res.stage(n + 1);
    let mut offsets = Vec::with_capacity(fnm.summands().len() + 1);
    let mut acc = 0;
    for &c in fnm.summands() {
        offsets.push(acc);
        acc += fnm.rank(c);
    }
    offsets.push(acc);
    let mut rows: Vec<Vec<(usize, Int)>> = Vec::new();
    let mut rhs = Vec::new();
    for (j, &c) in fnm.summands().iter().enumerate() {
        let base = rows.len();
        rows.resize(base + amb.rank(c), Vec::new());
        rhs.resize(rows.len(), Int::ZERO);
        for (idx, col) in map_columns(fnm, &st.images, amb, c).iter().enumerate() {
            for (i, v) in col.iter() {
                rows[base + i].push((offsets[j] + idx, v.clone()));
            }
        }
    }
    for (l, y) in next.images.iter().enumerate() {
        let e = next.free.summands()[l];
        let base = rows.len();
        rows.resize(base + fnm.rank(e), Vec::new());
        for (idx, coef) in y.iter() {
            let (j, phi) = fnm.decode(e, *idx);
            for t in 0..fnm.rank(fnm.summands()[j]) {
                for (i, v) in fnm.act(phi, &SparseVec::unit(t)).iter() {
                    rows[base + i].push((offsets[j] + t, v * coef));
                }
            }
        }
        rhs.extend(y.to_dense(fnm.rank(e)));
    }
    Ok(RetractionSystem {
        rows: rows.into_iter().map(SparseVec::from_pairs).collect(),
        rhs,
        ncols: acc,
        offsets,
    })
}

/// Decides whether `Syz_n` (with `Syz_0` the resolved module) is projective.
pub fn syzygy_splits(res: &mut Resolution, n: usize) -> Result<SplitOutcome> {
    let sys = retraction_system(res, n)?;
    let system = IntSystem::new(sys.rows.clone(), sys.ncols);
    match system.solve(&sys.rhs) {
        SolveOutcome::Solution(z) => {
            let retraction = sys
                .offsets
                .windows(2)
                .map(|w| z.slice(w[0]..w[1]))
                .collect();
            let s = Splitting {
                stage: n,
                retraction,
                lift: None,
            };
            if !verify_splitting(res, &s)? {
                return Err(Error::Internal(
                    "computed retraction fails verification".into(),
                ));
            }
            Ok(SplitOutcome::Split(s))
        }
        SolveOutcome::Infeasible(witness) => {
            if !witness.verify(&sys.rows, &sys.rhs) {
                return Err(Error::Internal(
                    "infeasibility witness fails verification".into(),
                ));
            }
            Ok(SplitOutcome::Obstructed(Obstruction {
                stage: n,
                equations: sys.rows.len(),
                unknowns: sys.ncols,
                witness,
            }))
        }
    }
}

/// Independent check: each `x_j` lies in `Syz_{n+1}` and `r` fixes every
/// generator of `Syz_{n+1}`, or, for a lifted splitting, `r = id - σ d_n`.
pub fn verify_splitting(res: &mut Resolution, s: &Splitting) -> Result<bool> {
    let n = s.stage;
    res.extend_to(n)?;
    let st = res.stage(n);
    let amb = res.codomain(n);
    if s.retraction.len() != st.free.summands().len() {
        return Ok(false);
    }
    for (j, x) in s.retraction.iter().enumerate() {
        if !apply_map(&st.free, &st.images, amb, st.free.summands()[j], x).is_empty() {
            return Ok(false);
        }
    }
    if let Some(lift) = &s.lift {
        if n == 0 || lift.len() != res.stage(n - 1).free.summands().len() {
            return Ok(false);
        }
        let prev = &res.stage(n - 1).free;
        return Ok(s.retraction.iter().enumerate().all(|(l, x)| {
            let e = st.free.summands()[l];
            let sd = apply_map(prev, lift, Ambient::Free(&st.free), e, &st.images[l]);
            *x == st.free.generator(l).add_scaled(&sd, &Int::from(-1))
        }));
    }
    res.extend_to(n + 1)?;
    let st = res.stage(n);
    let next = res.stage(n + 1);
    for (l, y) in next.images.iter().enumerate() {
        let e = next.free.summands()[l];
        if apply_map(&st.free, &s.retraction, Ambient::Free(&st.free), e, y) != *y {
            return Ok(false);
        }
    }
    Ok(true)
}

/// From a splitting at stage `n`, one at stage `n + 1`: lift each `r(gen_j)`
/// through `d_{n+1}` to get `σ`, and take `id - σ d_{n+1}`. For `y` in
/// `Syz_{n+1}`, `d σ y = r y = y`, so this is a retraction onto `Syz_{n+2}`.
pub fn lift_splitting(res: &mut Resolution, s: &Splitting) -> Result<Splitting> {
    let n = s.stage;
    res.extend_to(n + 1)?;
    let st = res.stage(n);
    let next = res.stage(n + 1);
    let mut systems: Vec<Option<IntSystem>> = (0..res.cat().object_count()).map(|_| None).collect();
    let mut lift = Vec::with_capacity(s.retraction.len());
    for (j, x) in s.retraction.iter().enumerate() {
        let c = st.free.summands()[j];
        let dim = st.free.rank(c);
        let sys = systems[c].get_or_insert_with(|| {
            let cols = map_columns(&next.free, &next.images, Ambient::Free(&st.free), c);
            IntSystem::new(transpose(&cols, dim), next.free.rank(c))
        });
        match sys.solve(&x.to_dense(dim)) {
            SolveOutcome::Solution(u) => lift.push(u),
            SolveOutcome::Infeasible(_) => {
                return Err(Error::Internal(
                    "retraction leaves the image of the next stage".into(),
                ))
            }
        }
    }
    let retraction = next
        .images
        .iter()
        .enumerate()
        .map(|(l, y)| {
            let e = next.free.summands()[l];
            let sd = apply_map(&st.free, &lift, Ambient::Free(&next.free), e, y);
            next.free.generator(l).add_scaled(&sd, &Int::from(-1))
        })
        .collect();
    let out = Splitting {
        stage: n + 1,
        retraction,
        lift: Some(lift),
    };
    if !verify_splitting(res, &out)? {
        return Err(Error::Internal(
            "lifted retraction fails verification".into(),
        ));
    }
    Ok(out)
}

/// Re-checks an obstruction against a freshly assembled system.
pub fn verify_obstruction(res: &mut Resolution, o: &Obstruction) -> Result<bool> {
    let sys = retraction_system(res, o.stage)?;
    Ok(o.witness.verify(&sys.rows, &sys.rhs))
}

/// Result of a projectivity test with its certificate.
#[derive(Clone, Debug)]
pub struct Projectivity {
    pub projective: bool,
    /// the free cover `F_0` and `p: F_0 → M`
    pub cover: CatModule,
    pub epi: NatMap,
    /// `s: M → F_0` with `p s = id`, when projective
    pub splitting: Option<NatMap>,
    pub obstruction: Option<Obstruction>,
}

/// Decides projectivity of a module with free values.
pub fn is_projective(m: &CatModule) -> Result<Projectivity> {
    let mut res = Resolution::new(m, CoverOrder::Canonical)?;
    let outcome = syzygy_splits(&mut res, 0)?;
    let cover = res.stage(0).free.to_module();
    let epi = res.differential(0);
    match outcome {
        SplitOutcome::Obstructed(o) => Ok(Projectivity {
            projective: false,
            cover,
            epi,
            splitting: None,
            obstruction: Some(o),
        }),
        SplitOutcome::Split(s) => {
            let st = res.stage(0);
            let cat = m.cat();
            let mut mats = Vec::with_capacity(cat.object_count());
            for c in 0..cat.object_count() {
                let cols = map_columns(&st.free, &st.images, Ambient::Module(m), c);
                let rows = transpose(&cols, m.gens(c));
                let sys = IntSystem::new(rows, st.free.rank(c));
                let mut out = Vec::with_capacity(m.gens(c));
                for i in 0..m.gens(c) {
                    let mut e = vec![Int::ZERO; m.gens(c)];
                    e[i] = Int::ONE;
                    let x = match sys.solve(&e) {
                        SolveOutcome::Solution(x) => x,
                        SolveOutcome::Infeasible(_) => {
                            return Err(Error::Internal("free cover is not surjective".into()))
                        }
                    };
                    let rx = apply_map(&st.free, &s.retraction, Ambient::Free(&st.free), c, &x);
                    out.push(x.add_scaled(&rx, &Int::from(-1)));
                }
                mats.push(IntMatrix::from_sparse_columns(st.free.rank(c), &out));
            }
            let sec = NatMap { mats };
            sec.check(m, &cover)?;
            if sec.then(&epi) != NatMap::identity(m) {
                return Err(Error::Internal("section is not a splitting".into()));
            }
            Ok(Projectivity {
                projective: true,
                cover,
                epi,
                splitting: Some(sec),
                obstruction: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named::cyclic;
    use crate::zcat::category::FinCategory;
    use crate::zcat::module::kernel;
    use std::sync::Arc;

    #[test]
    fn free_modules_are_projective() {
        let cat = Arc::new(FinCategory::from_group(&cyclic(3)));
        let p = CatModule::free(cat, 0);
        assert!(is_projective(&p).unwrap().projective);
    }

    #[test]
    fn augmentation_ideal_of_z2_is_not_projective() {
        let cat = Arc::new(FinCategory::from_group(&cyclic(2)));
        let z = CatModule::constant(cat);
        let pr = is_projective(&z).unwrap();
        assert!(!pr.projective);
        let (ideal, _) = kernel(&pr.cover, &z, &pr.epi).unwrap();
        assert_eq!(ideal.gens(0), 1);
        assert!(!is_projective(&ideal).unwrap().projective);
    }

    #[test]
    fn constant_over_terminal_is_projective() {
        let leq = vec![vec![true, true], vec![false, true]];
        let cat = Arc::new(FinCategory::from_poset(vec!["a".into(), "b".into()], &leq).unwrap());
        let pr = is_projective(&CatModule::constant(cat)).unwrap();
        assert!(pr.projective);
        assert!(pr.splitting.is_some());
    }
}
