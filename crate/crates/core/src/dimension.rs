//! Bounded cohomological dimension of a group relative to a family.
//!
//! `cd_F(Γ) ≤ n` is decided by asking whether the `n`-th syzygy of `Z̄` over
//! the skeletal orbit category is projective. Each answer carries a
//! certificate: a retraction when it is, an infeasibility witness when not.
//! The checks at the bottom of the module compare dimensions and cohomology
//! across restriction to subgroups, quotients and trivial actions.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::family::{all_families, Family};
use crate::int::Int;
use crate::matrix::IntMatrix;
use crate::orbitcat::{
    coinduce, orbit_category, pushforward_of_free, quotient_functor, restriction,
    trivial_action_pair, verify_coinduction_adjunction, OrbitCategory, PushedFree, Restriction,
    TrivialActionPair,
};
use crate::permgroup::{named, semidirect_product, GAction, PermGroup, Subgroup};
use crate::zcat::abgroup::AbGroupInvariants;
use crate::zcat::bar::bar_cohomology;
use crate::zcat::category::FinCategory;
use crate::zcat::ext::cohomology;
use crate::zcat::module::CatModule;
use crate::zcat::projective::{
    lift_splitting, syzygy_splits, verify_obstruction, verify_splitting, Obstruction, SplitOutcome,
    Splitting,
};
use crate::zcat::resolution::{CoverOrder, Resolution};
use crate::{Error, Result};

/// Default window for dimension reports.
pub const DEFAULT_N_MAX: usize = 3;

#[derive(Clone, Debug)]
pub enum Certificate {
    Splitting(Splitting),
    Obstruction(Obstruction),
}

/// The answer to `cd ≤ n` with its certificate.
#[derive(Clone, Debug)]
pub struct CdDecision {
    pub n: usize,
    pub le: bool,
    pub certificate: Certificate,
}

impl CdDecision {
    pub fn summary(&self) -> CertificateSummary {
        match &self.certificate {
            Certificate::Splitting(s) => CertificateSummary::Splitting {
                n: self.n,
                generators: s.retraction.len(),
                nonzeros: s.retraction.iter().map(|v| v.nnz()).sum(),
            },
            Certificate::Obstruction(o) => CertificateSummary::Obstruction {
                n: self.n,
                equations: o.equations,
                unknowns: o.unknowns,
                modulus: o.witness.modulus.clone(),
                support: o.witness.w.nnz(),
            },
        }
    }
}

/// Compact description of a certificate for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateSummary {
    Splitting {
        n: usize,
        generators: usize,
        nonzeros: usize,
    },
    Obstruction {
        n: usize,
        equations: usize,
        unknowns: usize,
        /// `0` when the witness kills every equation exactly
        modulus: Int,
        support: usize,
    },
}

/// Decides `cd_F(Γ) ≤ n` for increasing `n`, reusing one resolution.
/// Once `Syz_k` is known to be projective, later stages are split by
/// lifting that splitting instead of solving afresh.
pub struct CdSolver {
    orbit: Option<Arc<OrbitCategory>>,
    res: Resolution,
    split: Option<Splitting>,
}

impl CdSolver {
    pub fn new(family: &Family) -> Result<CdSolver> {
        CdSolver::with_order(family, CoverOrder::Canonical)
    }

    pub fn with_order(family: &Family, order: CoverOrder) -> Result<CdSolver> {
        let orbit = Arc::new(orbit_category(family, true)?);
        CdSolver::on(orbit, order)
    }

    pub fn on(orbit: Arc<OrbitCategory>, order: CoverOrder) -> Result<CdSolver> {
        let mut s = CdSolver::on_category(orbit.cat().clone(), order)?;
        s.orbit = Some(orbit);
        Ok(s)
    }

    /// Decides `cd(C) ≤ n` for an arbitrary finite category.
    pub fn on_category(cat: Arc<FinCategory>, order: CoverOrder) -> Result<CdSolver> {
        let z = CatModule::constant(cat);
        let res = Resolution::new(&z, order)?;
        Ok(CdSolver {
            orbit: None,
            res,
            split: None,
        })
    }

    pub fn orbit(&self) -> Option<&Arc<OrbitCategory>> {
        self.orbit.as_ref()
    }

    pub fn resolution(&mut self) -> &mut Resolution {
        &mut self.res
    }

    pub fn decide(&mut self, n: usize) -> Result<CdDecision> {
        if let Some(mut s) = self.split.clone().filter(|s| s.stage < n) {
            while s.stage < n {
                s = lift_splitting(&mut self.res, &s)?;
            }
            self.split = Some(s.clone());
            return Ok(CdDecision {
                n,
                le: true,
                certificate: Certificate::Splitting(s),
            });
        }
        Ok(match syzygy_splits(&mut self.res, n)? {
            SplitOutcome::Split(s) => {
                if self.split.as_ref().is_none_or(|t| t.stage > n) {
                    self.split = Some(s.clone());
                }
                CdDecision {
                    n,
                    le: true,
                    certificate: Certificate::Splitting(s),
                }
            }
            SplitOutcome::Obstructed(o) => CdDecision {
                n,
                le: false,
                certificate: Certificate::Obstruction(o),
            },
        })
    }

    /// Re-checks a certificate against the resolution it came from.
    pub fn verify(&mut self, d: &CdDecision) -> Result<bool> {
        match &d.certificate {
            Certificate::Splitting(s) => verify_splitting(&mut self.res, s),
            Certificate::Obstruction(o) => verify_obstruction(&mut self.res, o),
        }
    }
}

/// `cd_F(Γ) ≤ n`, with certificate.
pub fn cd_le(family: &Family, n: usize) -> Result<CdDecision> {
    CdSolver::new(family)?.decide(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub n: usize,
    pub le: bool,
}

/// Verdicts for `n = 0..=n_max`. `value` is set when the window pins the
/// dimension; `lower_bound` is the proven bound `cd ≥ lower_bound`.
#[derive(Clone, Debug, Serialize)]
pub struct CdReport {
    pub group: String,
    pub family: String,
    pub verdicts: Vec<Verdict>,
    pub value: Option<usize>,
    pub lower_bound: usize,
    pub certificates: Vec<CertificateSummary>,
    #[serde(skip)]
    pub decisions: Vec<CdDecision>,
}

impl CdReport {
    fn assemble(group: String, family: &Family, decisions: Vec<CdDecision>) -> Result<CdReport> {
        let verdicts: Vec<Verdict> = decisions
            .iter()
            .map(|d| Verdict { n: d.n, le: d.le })
            .collect();
        if verdicts.windows(2).any(|w| w[0].le && !w[1].le) {
            return Err(Error::Internal(
                "dimension verdicts are not monotone".into(),
            ));
        }
        if let Some(v) = verdicts.first() {
            if v.le == family.is_proper() {
                return Err(Error::Internal(
                    "cd = 0 verdict disagrees with membership of the group in the family".into(),
                ));
            }
        }
        let value = verdicts.iter().find(|v| v.le).map(|v| v.n);
        let lower_bound = verdicts
            .iter()
            .filter(|v| !v.le)
            .map(|v| v.n + 1)
            .max()
            .unwrap_or(0);
        Ok(CdReport {
            group,
            family: family_label(family),
            certificates: decisions.iter().map(CdDecision::summary).collect(),
            verdicts,
            value,
            lower_bound,
            decisions,
        })
    }

    /// `"> n_max"` style rendering of the result.
    pub fn display_value(&self) -> String {
        match self.value {
            Some(v) => v.to_string(),
            None => format!("> {}", self.verdicts.len().saturating_sub(1)),
        }
    }
}

/// Runs `cd ≤ n` for `n = 0..=n_max`.
pub fn cd_report(family: &Family, n_max: usize) -> Result<CdReport> {
    let mut solver = CdSolver::new(family)?;
    let decisions = (0..=n_max)
        .map(|n| solver.decide(n))
        .collect::<Result<Vec<_>>>()?;
    CdReport::assemble(group_label(family.group()), family, decisions)
}

/// `cd_G(π) = cd_{F⟨G⟩}(π ⋊ G)`.
pub fn equivariant_cd(
    pi: &PermGroup,
    g: &PermGroup,
    act: &GAction,
    n_max: usize,
) -> Result<CdReport> {
    let sd = semidirect_product(pi, g, act)?;
    let gs = sd.g_subgroup();
    let group = sd.group.clone();
    let family = Family::generated(group.clone(), &[gs])?;
    let mut report = cd_report(&family, n_max)?;
    report.group = format!("semidirect product of order {}", group.order());
    report.family = "subconjugates of G".into();
    Ok(report)
}

pub fn group_label(g: &PermGroup) -> String {
    format!("group of order {}", g.order())
}

/// `all`, `trivial`, `proper`, or the orders of the class representatives.
pub fn family_label(f: &Family) -> String {
    let g = f.group();
    let Ok(l) = g.lattice() else {
        return format!("{} subgroups", f.len());
    };
    if !f.is_proper() {
        "all".into()
    } else if f.len() == 1 {
        "trivial".into()
    } else if f.classes().len() + 1 == l.classes().len() {
        "proper".into()
    } else {
        let orders: Vec<usize> = f
            .classes()
            .iter()
            .map(|&c| l.get(l.class_rep(c)).order())
            .collect();
        format!("classes of orders {orders:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Indeterminate,
    Fail,
}

/// One family in a sweep over families.
#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    pub family: String,
    pub classes: Vec<usize>,
    pub size: usize,
    pub proper: bool,
    pub cd_le_0: Option<bool>,
    pub cd_le_1: Option<bool>,
    /// certificate for the verdict at `n = 1`
    pub certificate: Option<CertificateSummary>,
    pub status: Status,
    pub note: Option<String>,
}

/// For each family: `cd ≤ 0` holds exactly when the group is in the
/// family, and `cd ≤ 1` fails for every proper family.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub group: String,
    pub families: usize,
    pub proper_families: usize,
    pub entries: Vec<SweepEntry>,
    pub status: Status,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn sweep_entry(family: &Family) -> SweepEntry {
    let proper = family.is_proper();
    let mut entry = SweepEntry {
        family: family_label(family),
        classes: family.classes().to_vec(),
        size: family.len(),
        proper,
        cd_le_0: None,
        cd_le_1: None,
        certificate: None,
        status: Status::Fail,
        note: None,
    };
    let run = |entry: &mut SweepEntry| -> Result<()> {
        let mut solver = CdSolver::new(family)?;
        let d0 = solver.decide(0)?;
        entry.cd_le_0 = Some(d0.le);
        let d1 = solver.decide(1)?;
        entry.cd_le_1 = Some(d1.le);
        if !solver.verify(&d1)? {
            return Err(Error::Internal("certificate fails re-verification".into()));
        }
        entry.certificate = Some(d1.summary());
        Ok(())
    };
    match run(&mut entry) {
        Ok(()) => {
            let zero_ok = entry.cd_le_0 == Some(!proper);
            let one_ok = !proper || entry.cd_le_1 == Some(false);
            entry.status = if zero_ok && one_ok {
                Status::Pass
            } else {
                Status::Fail
            };
        }
        Err(e @ Error::Budget(_)) => {
            entry.status = Status::Indeterminate;
            entry.note = Some(e.to_string());
        }
        Err(e) => entry.note = Some(e.to_string()),
    }
    entry
}

/// Sweeps the given families of one group, in parallel.
pub fn theorem_sweep(group: &str, families: &[Family]) -> SweepReport {
    let entries: Vec<SweepEntry> = families.par_iter().map(sweep_entry).collect();
    let status = entries
        .iter()
        .map(|e| e.status)
        .max()
        .unwrap_or(Status::Pass);
    SweepReport {
        group: group.to_string(),
        families: entries.len(),
        proper_families: entries.iter().filter(|e| e.proper).count(),
        entries,
        status,
    }
}

/// The sweep over every family of the group.
pub fn verify_mainalg(g: &Arc<PermGroup>) -> Result<SweepReport> {
    let families = all_families(g)?;
    Ok(theorem_sweep(&group_label(g), &families))
}

/// A named group with the families it is checked against.
#[derive(Clone, Debug)]
pub struct BatteryEntry {
    pub name: &'static str,
    pub group: Arc<PermGroup>,
    pub families: Vec<Family>,
}

pub const BATTERY: &[&str] = &[
    "z2", "z3", "z4", "z2xz2", "z5", "z6", "s3", "d4", "q8", "a4", "d5", "s4", "a5",
];

/// The curated battery: every family for the small groups, the proper
/// family and the subgroups of an `A4` for `A5`.
pub fn battery() -> Result<Vec<BatteryEntry>> {
    BATTERY
        .iter()
        .map(|&name| {
            let group = Arc::new(named::by_name(name).expect("battery group"));
            let families = if name == "a5" {
                let a4 = group
                    .all_subgroups()?
                    .iter()
                    .find(|s| s.order() == 12)
                    .cloned()
                    .ok_or_else(|| Error::Internal("A5 has no subgroup of order 12".into()))?;
                vec![
                    Family::proper(group.clone())?,
                    Family::generated(group.clone(), &[a4])?,
                ]
            } else {
                all_families(&group)?
            };
            Ok(BatteryEntry {
                name,
                group,
                families,
            })
        })
        .collect()
}

/// `cd ≤ n` on one side implies `cd ≤ n` on the other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Implication {
    pub n: usize,
    pub premise: bool,
    pub conclusion: bool,
    pub holds: bool,
}

fn implications(
    big: &mut CdSolver,
    small: &mut CdSolver,
    n_max: usize,
) -> Result<Vec<Implication>> {
    (0..=n_max)
        .map(|n| {
            let premise = big.decide(n)?.le;
            let conclusion = small.decide(n)?.le;
            Ok(Implication {
                n,
                premise,
                conclusion,
                holds: !premise || conclusion,
            })
        })
        .collect()
}

/// Coefficient modules over the orbit category of a subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficients {
    Constant,
    /// constant `Z/k`
    ConstantMod(i64),
    /// the representable module at an object
    Free(usize),
}

impl Coefficients {
    pub fn build(&self, cat: &Arc<FinCategory>) -> Result<CatModule> {
        Ok(match *self {
            Coefficients::Constant => CatModule::constant(cat.clone()),
            Coefficients::ConstantMod(k) => CatModule::constant_mod(cat.clone(), k),
            Coefficients::Free(c) => {
                if c >= cat.object_count() {
                    return Err(Error::InvalidInput(format!("no object {c}")));
                }
                CatModule::free(cat.clone(), c)
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            Coefficients::Constant => "Z".into(),
            Coefficients::ConstantMod(k) => format!("Z/{k}"),
            Coefficients::Free(c) => format!("free at object {c}"),
        }
    }
}

/// Cohomology over `O_{H∩F}(H)` with `M` against cohomology over `O_F(Γ)`
/// with the co-induced module, plus the dimension inequality.
#[derive(Clone, Debug, Serialize)]
pub struct ShapiroReport {
    pub subgroup_order: usize,
    pub coefficients: String,
    pub subgroup_side: Vec<AbGroupInvariants>,
    pub group_side: Vec<AbGroupInvariants>,
    pub equal: bool,
    pub adjunction: bool,
    pub dimension: Vec<Implication>,
    pub holds: bool,
}

pub fn verify_shapiro(
    family: &Family,
    h: &Subgroup,
    coefficients: &Coefficients,
    n_max: usize,
) -> Result<ShapiroReport> {
    let big = Arc::new(orbit_category(family, true)?);
    let r = restriction(&big, h)?;
    let m = coefficients.build(r.small.cat())?;
    let mut report = verify_shapiro_module(&r, &m, n_max, true)?;
    report.coefficients = coefficients.label();
    Ok(report)
}

/// Shapiro comparison for an arbitrary module over the subgroup's orbit
/// category; the dimension check is optional.
pub fn verify_shapiro_module(
    r: &Restriction,
    m: &CatModule,
    n_max: usize,
    check_dimension: bool,
) -> Result<ShapiroReport> {
    let subgroup_side = cohomology(m, n_max)?;
    let co = coinduce(m, r)?;
    let group_side = cohomology(&co, n_max)?;
    let adjunction = verify_coinduction_adjunction(m, r)?;
    let dimension = if check_dimension {
        let mut big = CdSolver::on(r.big.clone(), CoverOrder::Canonical)?;
        let mut small = CdSolver::on(r.small.clone(), CoverOrder::Canonical)?;
        implications(&mut big, &mut small, n_max)?
    } else {
        Vec::new()
    };
    let equal = subgroup_side == group_side;
    Ok(ShapiroReport {
        subgroup_order: r.subgroup.order(),
        coefficients: "custom".into(),
        holds: equal && adjunction && dimension.iter().all(|i| i.holds),
        subgroup_side,
        group_side,
        equal,
        adjunction,
        dimension,
    })
}

/// Free summands of a resolution stage and what `p_*` makes of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StagePush {
    pub stage: usize,
    pub summands: usize,
    pub free: usize,
    pub zero: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientReport {
    pub quotient_order: usize,
    pub quotient_family_size: usize,
    pub dimension: Vec<Implication>,
    pub pushforward: Vec<StagePush>,
    pub exact: bool,
    pub holds: bool,
}

/// `cd_F(Γ) ≤ n ⇒ cd_{F_N}(Γ/N) ≤ n`, and `p_*` sends every computed stage
/// of the resolution of `Z̄` to a free module.
pub fn verify_quotient(family: &Family, n: &Subgroup, n_max: usize) -> Result<QuotientReport> {
    let big = Arc::new(orbit_category(family, true)?);
    let q = quotient_functor(&big, n)?;
    let mut bs = CdSolver::on(big.clone(), CoverOrder::Canonical)?;
    let mut qs = CdSolver::on(q.quotient.clone(), CoverOrder::Canonical)?;
    let dimension = implications(&mut bs, &mut qs, n_max)?;
    let mut pushed: Vec<Option<bool>> = vec![None; big.object_count()];
    let res = bs.resolution();
    let exact = res.verify_exactness().is_ok();
    let mut pushforward = Vec::new();
    for k in 0..res.len() {
        let summands = res.stage(k).free.summands().to_vec();
        let mut free = 0;
        for &c in &summands {
            let is_free = match pushed[c] {
                Some(b) => b,
                None => {
                    let b = matches!(pushforward_of_free(&q, c)?, PushedFree::Free { .. });
                    pushed[c] = Some(b);
                    b
                }
            };
            free += usize::from(is_free);
        }
        pushforward.push(StagePush {
            stage: k,
            summands: summands.len(),
            free,
            zero: summands.len() - free,
        });
    }
    Ok(QuotientReport {
        quotient_order: q.quotient.group().order(),
        quotient_family_size: q.quotient.family().len(),
        holds: exact && dimension.iter().all(|i| i.holds),
        dimension,
        pushforward,
        exact,
    })
}

/// Coefficients for the group `Γ/N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientCoefficients {
    /// `Z` with trivial action
    Trivial,
    /// `Z` on which an element acts by the sign of its permutation of the
    /// cosets of `N`
    Sign,
    /// `Z/k` with trivial action
    TrivialMod(i64),
}

impl QuotientCoefficients {
    pub fn build(&self, pair: &TrivialActionPair) -> Result<CatModule> {
        let cat = pair.quotient_cat.clone();
        Ok(match *self {
            QuotientCoefficients::Trivial => CatModule::constant(cat),
            QuotientCoefficients::TrivialMod(k) => CatModule::constant_mod(cat, k),
            QuotientCoefficients::Sign => {
                let q = &pair.quotient;
                let rho: Vec<IntMatrix> = q
                    .elements()
                    .iter()
                    .map(|p| {
                        let odd = p.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 1;
                        IntMatrix::from_rows(&[vec![if odd { -1i64 } else { 1 }]])
                    })
                    .collect();
                CatModule::from_representation(cat, q, &rho, Vec::new())?
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            QuotientCoefficients::Trivial => "Z".into(),
            QuotientCoefficients::Sign => "Z with sign action".into(),
            QuotientCoefficients::TrivialMod(k) => format!("Z/{k}"),
        }
    }
}

/// Bredon cohomology over the family of subgroups of `N` with coefficients
/// `ind_F P`, against `H^*(Γ/N; P)` from the bar complex.
#[derive(Clone, Debug, Serialize)]
pub struct TrivialActionReport {
    pub quotient_order: usize,
    pub coefficients: String,
    pub bredon: Vec<AbGroupInvariants>,
    pub bar: Vec<AbGroupInvariants>,
    pub equal: bool,
    pub round_trip: bool,
    pub holds: bool,
}

pub fn verify_trivial_action(
    g: &Arc<PermGroup>,
    n: &Subgroup,
    coefficients: &QuotientCoefficients,
    n_max: usize,
) -> Result<TrivialActionReport> {
    let pair = trivial_action_pair(g, n)?;
    let p = coefficients.build(&pair)?;
    let mut report = verify_trivial_action_module(&pair, &p, n_max)?;
    report.coefficients = coefficients.label();
    Ok(report)
}

pub fn verify_trivial_action_module(
    pair: &TrivialActionPair,
    p: &CatModule,
    n_max: usize,
) -> Result<TrivialActionReport> {
    let ind = pair.ind_f(p)?;
    let round_trip = pair.res_f(&ind)?.same_presentation(p);
    let bredon = cohomology(&ind, n_max)?;
    let bar = bar_cohomology(&pair.quotient, p, n_max)?;
    let equal = bredon == bar;
    Ok(TrivialActionReport {
        quotient_order: pair.quotient.order(),
        coefficients: "custom".into(),
        holds: equal && round_trip,
        bredon,
        bar,
        equal,
        round_trip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named::*;

    #[test]
    fn improper_family_has_dimension_zero() {
        let g = Arc::new(cyclic(3));
        let r = cd_report(&Family::all(g).unwrap(), 3).unwrap();
        assert_eq!(r.value, Some(0));
        assert!(r.verdicts.iter().all(|v| v.le));
    }

    #[test]
    fn z2_trivial_family_is_unbounded_in_window() {
        let g = Arc::new(cyclic(2));
        let r = cd_report(&Family::trivial(g).unwrap(), 3).unwrap();
        assert_eq!(r.value, None);
        assert_eq!(r.lower_bound, 4);
        assert_eq!(r.display_value(), "> 3");
    }

    #[test]
    fn certificates_reverify() {
        let g = Arc::new(symmetric(3));
        let f = Family::proper(g).unwrap();
        let mut s = CdSolver::new(&f).unwrap();
        for n in 0..3 {
            let d = s.decide(n).unwrap();
            assert!(s.verify(&d).unwrap());
        }
    }
}
