//! Reduction of finite posets by removing superfluous elements, the
//! resulting test for `cd ≤ 1`, and crown collections in the proper
//! subgroup poset of a non-abelian simple group.
//!
//! Depth counts upward: maximal elements have depth 0, and `x` has depth
//! `n` when the longest chain `x = x_n < … < x_0` has length `n`.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dimension::{CdDecision, CdSolver};
use crate::family::Family;
use crate::permgroup::{PermGroup, Subgroup};
use crate::zcat::category::FinCategory;
use crate::zcat::resolution::CoverOrder;
use crate::{Error, Result};

/// Canonical forms are only computed up to this many elements.
pub const MAX_CANONICAL: usize = 64;

/// Leaf bound for the canonical labelling search.
const MAX_LEAVES: usize = 1 << 18;

/// A finite partially ordered set; `leq[a][b]` iff `a ≤ b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinPoset {
    elements: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl FinPoset {
    pub fn new(elements: Vec<String>, leq: Vec<Vec<bool>>) -> Result<FinPoset> {
        let n = elements.len();
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(
                "order matrix does not match the elements".into(),
            ));
        }
        for a in 0..n {
            if !leq[a][a] {
                return Err(Error::InvalidInput("order is not reflexive".into()));
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(Error::InvalidInput("order is not antisymmetric".into()));
                }
                if leq[a][b] && (0..n).any(|c| leq[b][c] && !leq[a][c]) {
                    return Err(Error::InvalidInput("order is not transitive".into()));
                }
            }
        }
        Ok(FinPoset { elements, leq })
    }

    /// Builds the order generated by the given strict relations `a < b`.
    pub fn from_relations(elements: Vec<String>, less: &[(usize, usize)]) -> Result<FinPoset> {
        let n = elements.len();
        let mut leq = vec![vec![false; n]; n];
        for (a, row) in leq.iter_mut().enumerate() {
            row[a] = true;
        }
        for &(a, b) in less {
            if a >= n || b >= n {
                return Err(Error::InvalidInput("relation out of range".into()));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            for a in 0..n {
                if leq[a][k] {
                    for b in 0..n {
                        if leq[k][b] {
                            leq[a][b] = true;
                        }
                    }
                }
            }
        }
        FinPoset::new(elements, leq)
    }

    /// The chain `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> FinPoset {
        let names = (0..n).map(|i| i.to_string()).collect();
        let leq = (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect();
        FinPoset {
            elements: names,
            leq,
        }
    }

    /// A bottom element below `x_1, …, x_m`, each of which lies below every
    /// one of `y_1, …, y_n`.
    pub fn crown(m: usize, n: usize) -> FinPoset {
        let mut names = vec!["b".to_string()];
        names.extend((1..=m).map(|i| format!("x{i}")));
        names.extend((1..=n).map(|j| format!("y{j}")));
        let mut less: Vec<(usize, usize)> = (1..=m + n).map(|i| (0, i)).collect();
        for i in 1..=m {
            less.extend((m + 1..=m + n).map(|j| (i, j)));
        }
        FinPoset::from_relations(names, &less).expect("crown is a poset")
    }

    /// The members of a family ordered by inclusion, named by lattice index.
    pub fn of_family(family: &Family) -> FinPoset {
        let p = family.subgroup_poset();
        let l = family.group().lattice().expect("lattice available");
        FinPoset {
            elements: p
                .elements
                .iter()
                .map(|&i| format!("H{i}/{}", l.get(i).order()))
                .collect(),
            leq: p.leq,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    pub fn relation(&self) -> &[Vec<bool>] {
        &self.leq
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        (0..self.len()).all(|y| !self.lt(x, y))
    }

    /// Elements `y < x` with nothing strictly between.
    pub fn covers(&self, x: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| self.lt(y, x) && !(0..self.len()).any(|z| self.lt(y, z) && self.lt(z, x)))
            .collect()
    }

    /// Elements covering `x`.
    pub fn covered_by(&self, x: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| self.lt(x, y) && !(0..self.len()).any(|z| self.lt(x, z) && self.lt(z, y)))
            .collect()
    }

    pub fn depths(&self) -> Vec<usize> {
        let n = self.len();
        // larger elements have more elements below them
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| std::cmp::Reverse((0..n).filter(|&y| self.leq[y][x]).count()));
        let mut depth = vec![0; n];
        for &x in &order {
            depth[x] = (0..n)
                .filter(|&y| self.lt(x, y))
                .map(|y| depth[y] + 1)
                .max()
                .unwrap_or(0);
        }
        depth
    }

    pub fn depth(&self, x: usize) -> usize {
        self.depths()[x]
    }

    pub fn is_superfluous(&self, x: usize) -> bool {
        Live::new(self).is_superfluous(x)
    }

    pub fn superfluous(&self) -> Vec<usize> {
        Live::new(self).superfluous()
    }

    /// An element below every other element.
    pub fn initial_object(&self) -> Option<usize> {
        (0..self.len()).find(|&a| self.leq[a].iter().all(|&b| b))
    }

    pub fn terminal_object(&self) -> Option<usize> {
        (0..self.len()).find(|&a| self.leq.iter().all(|r| r[a]))
    }

    /// The subposet on `keep`, in the given order.
    pub fn induced(&self, keep: &[usize]) -> FinPoset {
        FinPoset {
            elements: keep.iter().map(|&i| self.elements[i].clone()).collect(),
            leq: keep
                .iter()
                .map(|&a| keep.iter().map(|&b| self.leq[a][b]).collect())
                .collect(),
        }
    }

    /// The poset as a category with one morphism `a → b` for `a ≤ b`.
    pub fn to_category(&self) -> FinCategory {
        FinCategory::from_poset(self.elements.clone(), &self.leq).expect("valid poset")
    }

    pub fn canonical_form(&self) -> Result<CanonicalForm> {
        canonical_form(self)
    }

    pub fn is_isomorphic(&self, other: &FinPoset) -> Result<bool> {
        if self.len() != other.len() {
            return Ok(false);
        }
        Ok(self.canonical_form()? == other.canonical_form()?)
    }
}

/// Superfluity bookkeeping on the elements still present.
struct Live<'a> {
    p: &'a FinPoset,
    /// `up[x]`: elements `≥ x`
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    alive: FixedBitSet,
}

impl<'a> Live<'a> {
    fn new(p: &'a FinPoset) -> Live<'a> {
        let n = p.len();
        let bits = |f: &dyn Fn(usize, usize) -> bool| -> Vec<FixedBitSet> {
            (0..n)
                .map(|x| {
                    let mut b = FixedBitSet::with_capacity(n);
                    b.extend((0..n).filter(|&y| f(x, y)));
                    b
                })
                .collect()
        };
        let up = bits(&|x, y| p.leq[x][y]);
        let down = bits(&|x, y| p.leq[y][x]);
        let mut alive = FixedBitSet::with_capacity(n);
        alive.insert_range(..);
        Live { p, up, down, alive }
    }

    fn strictly_above(&self, x: usize) -> FixedBitSet {
        let mut s = self.up[x].clone();
        s.intersect_with(&self.alive);
        s.set(x, false);
        s
    }

    fn is_maximal(&self, x: usize) -> bool {
        self.strictly_above(x).is_clear()
    }

    fn cover_count(&self, x: usize, limit: usize) -> usize {
        let mut count = 0;
        for y in self.down[x].ones() {
            if y == x || !self.alive[y] {
                continue;
            }
            let mut between = self.up[y].clone();
            between.intersect_with(&self.down[x]);
            between.intersect_with(&self.alive);
            if between.count_ones(..) == 2 {
                count += 1;
                if count >= limit {
                    break;
                }
            }
        }
        count
    }

    /// Depth 1 means everything strictly above is maximal.
    fn has_depth_one(&self, x: usize, maximal: &FixedBitSet) -> bool {
        let above = self.strictly_above(x);
        !above.is_clear() && above.is_subset(maximal)
    }

    fn maximal_set(&self) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.p.len());
        m.extend(self.alive.ones().filter(|&x| self.is_maximal(x)));
        m
    }

    fn classify(&self, x: usize, maximal: &FixedBitSet) -> Option<Kind> {
        if maximal[x] {
            (self.cover_count(x, 2) == 1).then_some(Kind::Maximal)
        } else if self.has_depth_one(x, maximal) && self.strictly_above(x).count_ones(..) == 1 {
            Some(Kind::DepthOne)
        } else {
            None
        }
    }

    fn is_superfluous(&self, x: usize) -> bool {
        self.classify(x, &self.maximal_set()).is_some()
    }

    fn superfluous(&self) -> Vec<usize> {
        self.superfluous_kinds()
            .into_iter()
            .map(|(x, _)| x)
            .collect()
    }

    fn superfluous_kinds(&self) -> Vec<(usize, Kind)> {
        let maximal = self.maximal_set();
        self.alive
            .ones()
            .filter_map(|x| self.classify(x, &maximal).map(|k| (x, k)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Maximal,
    DepthOne,
}

/// Which superfluous element to remove at each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "regime", content = "seed", rename_all = "snake_case")]
pub enum Regime {
    /// the lowest index
    First,
    /// the highest index
    Last,
    /// uniformly at random from a seeded generator
    Random(u64),
    /// depth-one elements first; a maximal element only when there is no
    /// superfluous element of depth 1
    DepthOneFirst,
}

#[derive(Clone, Debug, Serialize)]
pub struct Reduction {
    pub poset: FinPoset,
    /// indices into the input that survive
    pub kept: Vec<usize>,
    /// indices into the input, in removal order
    pub removed: Vec<usize>,
}

impl Reduction {
    pub fn is_point(&self) -> bool {
        self.kept.len() == 1
    }
}

/// Removes superfluous elements until none remain.
pub fn reduce(p: &FinPoset, regime: Regime) -> Reduction {
    let mut live = Live::new(p);
    let mut rng = match regime {
        Regime::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut removed = Vec::new();
    loop {
        let cands = live.superfluous_kinds();
        let pick = match regime {
            Regime::First => cands.first().map(|c| c.0),
            Regime::Last => cands.last().map(|c| c.0),
            Regime::Random(_) => cands.choose(rng.as_mut().expect("seeded")).map(|c| c.0),
            Regime::DepthOneFirst => cands
                .iter()
                .find(|c| c.1 == Kind::DepthOne)
                .or(cands.first())
                .map(|c| c.0),
        };
        let Some(x) = pick else { break };
        live.alive.set(x, false);
        removed.push(x);
    }
    let kept: Vec<usize> = live.alive.ones().collect();
    Reduction {
        poset: p.induced(&kept),
        kept,
        removed,
    }
}

/// `E(P)`: the poset left after removing superfluous elements, lowest
/// index first.
pub fn e_reduction(p: &FinPoset) -> FinPoset {
    reduce(p, Regime::First).poset
}

/// A labelling-independent description of a poset: the order matrix under a
/// canonical relabelling, packed row by row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CanonicalForm {
    pub size: usize,
    pub bits: Vec<u64>,
}

type Partition = Vec<Vec<usize>>;

/// Splits cells by how many elements of each cell lie above and below,
/// until stable. The cell order depends only on the isomorphism type.
fn refine(p: &FinPoset, mut cells: Partition) -> Partition {
    let n = p.len();
    loop {
        let mut cell_of = vec![0; n];
        for (c, cell) in cells.iter().enumerate() {
            for &x in cell {
                cell_of[x] = c;
            }
        }
        let signature = |x: usize| {
            let mut s = vec![0u32; 2 * cells.len()];
            for y in 0..n {
                if p.lt(y, x) {
                    s[2 * cell_of[y]] += 1;
                } else if p.lt(x, y) {
                    s[2 * cell_of[y] + 1] += 1;
                }
            }
            s
        };
        let mut next = Vec::with_capacity(cells.len());
        for cell in &cells {
            let mut keyed: Vec<(Vec<u32>, usize)> =
                cell.iter().map(|&x| (signature(x), x)).collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|k| k.1).collect());
                    start = i;
                }
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn pack(p: &FinPoset, order: &[usize]) -> Vec<u64> {
    let n = order.len();
    let mut bits = vec![0u64; (n * n).div_ceil(64)];
    for (i, &a) in order.iter().enumerate() {
        for (j, &b) in order.iter().enumerate() {
            if p.leq[a][b] {
                let k = i * n + j;
                bits[k / 64] |= 1 << (k % 64);
            }
        }
    }
    bits
}

/// Individualization and refinement: every branch individualizes one
/// element of the first non-singleton cell; the least packed matrix over
/// all leaves is the canonical form.
pub fn canonical_form(p: &FinPoset) -> Result<CanonicalForm> {
    if p.len() > MAX_CANONICAL {
        return Err(Error::Budget(format!(
            "canonical form limited to {MAX_CANONICAL} elements, got {}",
            p.len()
        )));
    }
    fn search(
        p: &FinPoset,
        cells: Partition,
        best: &mut Option<Vec<u64>>,
        leaves: &mut usize,
    ) -> Result<()> {
        let Some(c) = cells.iter().position(|cell| cell.len() > 1) else {
            *leaves += 1;
            if *leaves > MAX_LEAVES {
                return Err(Error::Budget("canonical labelling search too large".into()));
            }
            let order: Vec<usize> = cells.iter().map(|cell| cell[0]).collect();
            let m = pack(p, &order);
            if best.as_ref().is_none_or(|b| m < *b) {
                *best = Some(m);
            }
            return Ok(());
        };
        for &x in &cells[c] {
            let mut next = cells[..c].to_vec();
            next.push(vec![x]);
            next.push(cells[c].iter().copied().filter(|&y| y != x).collect());
            next.extend_from_slice(&cells[c + 1..]);
            search(p, refine(p, next), best, leaves)?;
        }
        Ok(())
    }
    let mut best = None;
    let mut leaves = 0;
    let start = if p.is_empty() {
        Vec::new()
    } else {
        refine(p, vec![(0..p.len()).collect()])
    };
    search(p, start, &mut best, &mut leaves)?;
    Ok(CanonicalForm {
        size: p.len(),
        bits: best.unwrap_or_default(),
    })
}

/// The two sides of the `cd ≤ 1` criterion for a poset with an initial
/// object.
#[derive(Clone, Debug, Serialize)]
pub struct PointCheck {
    pub size: usize,
    pub reduced_size: usize,
    pub reduced: Vec<String>,
    pub e_is_point: bool,
    pub cd_le_0: bool,
    pub cd_le_1: bool,
    pub agree: bool,
}

pub fn point_check(p: &FinPoset) -> Result<PointCheck> {
    if p.initial_object().is_none() {
        return Err(Error::Precondition("poset has no initial object".into()));
    }
    let red = reduce(p, Regime::First);
    let mut solver = poset_solver(p)?;
    let d0 = solver.decide(0)?;
    let d1 = solver.decide(1)?;
    let e_is_point = red.is_point();
    Ok(PointCheck {
        size: p.len(),
        reduced_size: red.kept.len(),
        reduced: red.poset.elements.clone(),
        e_is_point,
        cd_le_0: d0.le,
        cd_le_1: d1.le,
        agree: e_is_point == d1.le,
    })
}

pub fn poset_solver(p: &FinPoset) -> Result<CdSolver> {
    CdSolver::on_category(Arc::new(p.to_category()), CoverOrder::Canonical)
}

/// Decisions `cd(P) ≤ n` for `n = 0..=n_max`, stopping at the first yes.
pub fn poset_cd(p: &FinPoset, n_max: usize) -> Result<Vec<CdDecision>> {
    let mut solver = poset_solver(p)?;
    let mut out = Vec::new();
    for n in 0..=n_max {
        let d = solver.decide(n)?;
        let le = d.le;
        out.push(d);
        if le {
            break;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupRecord {
    pub lattice_index: usize,
    pub order: usize,
    pub members: Vec<usize>,
}

impl SubgroupRecord {
    fn new(g: &PermGroup, i: usize) -> SubgroupRecord {
        let s = g.lattice().expect("lattice available").get(i);
        SubgroupRecord {
            lattice_index: i,
            order: s.order(),
            members: s.members().to_vec(),
        }
    }
}

/// Collections `A` of maximal subgroups and `B` of intersections as built
/// from maximal subgroups `H`, `K` with `T = H ∩ K` normal in neither.
#[derive(Clone, Debug, Serialize)]
pub struct CrownWitness {
    pub h: SubgroupRecord,
    pub k: SubgroupRecord,
    pub t: SubgroupRecord,
    pub y1: usize,
    pub y2: usize,
    pub y1_images: Vec<usize>,
    pub y2_images: Vec<usize>,
    /// the starting pair was replaced to make `T` non-normal on both sides
    pub adjusted: bool,
    /// largest order of an intersection of two distinct maximal subgroups
    pub max_intersection: usize,
    pub a: Vec<SubgroupRecord>,
    pub b: Vec<SubgroupRecord>,
}

impl CrownWitness {
    pub fn a_indices(&self) -> Vec<usize> {
        self.a.iter().map(|r| r.lattice_index).collect()
    }

    pub fn b_indices(&self) -> Vec<usize> {
        self.b.iter().map(|r| r.lattice_index).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrownConditions {
    pub a_maximal: bool,
    pub b_in_two_a: bool,
    pub a_contains_two_b: bool,
    pub b_order_is_max_intersection: bool,
}

impl CrownConditions {
    pub fn all(&self) -> bool {
        self.a_maximal
            && self.b_in_two_a
            && self.a_contains_two_b
            && self.b_order_is_max_intersection
    }
}

fn intersect(g: &PermGroup, a: &Subgroup, b: &Subgroup) -> Subgroup {
    let m: Vec<usize> = a
        .members()
        .iter()
        .copied()
        .filter(|&x| b.contains(x))
        .collect();
    g.subgroup_from_members(&m)
        .expect("intersection is a subgroup")
}

fn conjugate_index(g: &PermGroup, i: usize, x: usize) -> usize {
    let l = g.lattice().expect("lattice available");
    l.conjugate_index(g, i, x)
}

/// Lattice indices of the maximal subgroups.
pub fn maximal_subgroups(g: &PermGroup) -> Result<Vec<usize>> {
    let l = g.lattice()?;
    let whole = l.len() - 1;
    Ok((0..whole)
        .filter(|&i| (0..whole).all(|j| j == i || !l.get(i).is_subgroup_of(l.get(j))))
        .collect())
}

/// Largest `|M ∩ M'|` over distinct maximal subgroups, with the pairs
/// attaining it in lexicographic order.
fn max_intersection_pairs(
    g: &PermGroup,
    maximal: &[usize],
) -> Result<(usize, Vec<(usize, usize)>)> {
    let l = g.lattice()?;
    let pairs: Vec<(usize, usize)> = maximal
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| maximal[i + 1..].iter().map(move |&b| (a, b)))
        .collect();
    let sizes: Vec<usize> = pairs
        .par_iter()
        .map(|&(a, b)| {
            l.get(a)
                .members()
                .iter()
                .filter(|&&x| l.get(b).contains(x))
                .count()
        })
        .collect();
    let best = sizes.iter().copied().max().unwrap_or(0);
    Ok((
        best,
        pairs
            .into_iter()
            .zip(sizes)
            .filter(|p| p.1 == best)
            .map(|p| p.0)
            .collect(),
    ))
}

/// Independent check of the four crown conditions.
pub fn check_crown(g: &PermGroup, a: &[usize], b: &[usize]) -> Result<CrownConditions> {
    let l = g.lattice()?;
    let maximal = maximal_subgroups(g)?;
    let (best, _) = max_intersection_pairs(g, &maximal)?;
    let below = |x: usize, y: usize| l.get(x).is_subgroup_of(l.get(y));
    Ok(CrownConditions {
        a_maximal: !a.is_empty() && a.iter().all(|x| maximal.contains(x)),
        b_in_two_a: !b.is_empty()
            && b.iter()
                .all(|&y| a.iter().filter(|&&x| below(y, x)).count() >= 2),
        a_contains_two_b: a
            .iter()
            .all(|&x| b.iter().filter(|&&y| below(y, x)).count() >= 2),
        b_order_is_max_intersection: b.iter().all(|&y| l.get(y).order() == best),
    })
}

pub fn find_crown(g: &PermGroup) -> Result<CrownWitness> {
    if !g.is_nonabelian_simple() {
        return Err(Error::Precondition(
            "crown search needs a non-abelian simple group".into(),
        ));
    }
    let l = g.lattice()?;
    let maximal = maximal_subgroups(g)?;
    let (best, pairs) = max_intersection_pairs(g, &maximal)?;
    if best <= 1 {
        return Err(Error::Internal(
            "maximal subgroups intersect trivially".into(),
        ));
    }
    let (h1, h2) = pairs[0];
    let t0 = intersect(g, l.get(h1), l.get(h2));
    let normal_in = |t: &Subgroup, h: usize| {
        l.get(h)
            .members()
            .iter()
            .all(|&x| t.members().iter().all(|&s| t.contains(g.conj(x, s))))
    };
    let outside = |a: usize, b: usize| {
        l.get(a)
            .members()
            .iter()
            .copied()
            .find(|&x| !l.get(b).contains(x))
            .expect("distinct maximal subgroups")
    };
    let (h, k, adjusted) = match (normal_in(&t0, h1), normal_in(&t0, h2)) {
        (false, false) => (h1, h2, false),
        (true, false) => (h2, conjugate_index(g, h2, outside(h1, h2)), true),
        (false, true) => (h1, conjugate_index(g, h1, outside(h2, h1)), true),
        (true, true) => {
            return Err(Error::Internal(
                "intersection is normal in both maximal subgroups".into(),
            ))
        }
    };
    let t = intersect(g, l.get(h), l.get(k));
    if t.order() != best || normal_in(&t, h) || normal_in(&t, k) {
        return Err(Error::Internal(
            "adjusted pair does not meet in a non-normal maximal intersection".into(),
        ));
    }
    let ti = l
        .index_of(&t)
        .ok_or_else(|| Error::Internal("intersection missing from lattice".into()))?;
    let moves_t = |y: usize| conjugate_index(g, ti, y) != ti;
    let y1 = l
        .get(k)
        .members()
        .iter()
        .copied()
        .find(|&y| moves_t(y))
        .ok_or_else(|| Error::Internal("T is normal in K".into()))?;
    let y2 = l
        .get(h)
        .members()
        .iter()
        .copied()
        .find(|&y| moves_t(y))
        .ok_or_else(|| Error::Internal("T is normal in H".into()))?;
    let z = g.mul(y1, y2);
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut zn = PermGroup::IDENTITY;
    for _ in 0..g.element_order(z) {
        let zy = g.mul(zn, y1);
        a.push(conjugate_index(g, k, zn));
        a.push(conjugate_index(g, h, zy));
        b.push(conjugate_index(g, ti, zn));
        b.push(conjugate_index(g, ti, zy));
        zn = g.mul(z, zn);
    }
    for v in [&mut a, &mut b] {
        v.sort_unstable();
        v.dedup();
    }
    let conditions = check_crown(g, &a, &b)?;
    if !conditions.all() {
        return Err(Error::Internal(format!(
            "crown conditions fail: {conditions:?}"
        )));
    }
    let rec = |i: usize| SubgroupRecord::new(g, i);
    Ok(CrownWitness {
        h: rec(h),
        k: rec(k),
        t: rec(ti),
        y1,
        y2,
        y1_images: g.element(y1).images(),
        y2_images: g.element(y2).images(),
        adjusted,
        max_intersection: best,
        a: a.iter().map(|&i| rec(i)).collect(),
        b: b.iter().map(|&i| rec(i)).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RegimeOutcome {
    pub regime: Regime,
    pub reduced_size: usize,
    pub contains_a: bool,
    pub contains_b: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrownReport {
    pub group_order: usize,
    pub witness: CrownWitness,
    pub conditions: CrownConditions,
    pub poset_size: usize,
    /// lattice indices surviving the reduction
    pub reduced: Vec<usize>,
    pub regimes: Vec<RegimeOutcome>,
    pub e_is_point: bool,
    /// `cd(A_P(G)) ≤ 1` decided directly, when the poset is small enough
    pub direct_cd_le_1: Option<bool>,
    pub poset_cd_at_least_2: bool,
    pub proper_cd_at_least_2: bool,
    pub holds: bool,
}

/// Posets above this size skip the direct `cd ≤ 1` computation.
const DIRECT_LIMIT: usize = 64;

pub fn verify_crown_survives(g: Arc<PermGroup>) -> Result<CrownReport> {
    let witness = find_crown(&g)?;
    let conditions = check_crown(&g, &witness.a_indices(), &witness.b_indices())?;
    let family = Family::proper(g.clone())?;
    let poset = FinPoset::of_family(&family);
    let members = family.members().to_vec();
    let regimes: Vec<RegimeOutcome> = [Regime::First, Regime::DepthOneFirst]
        .into_iter()
        .map(|regime| {
            let red = reduce(&poset, regime);
            let kept: Vec<usize> = red.kept.iter().map(|&i| members[i]).collect();
            RegimeOutcome {
                regime,
                reduced_size: kept.len(),
                contains_a: witness.a.iter().all(|r| kept.contains(&r.lattice_index)),
                contains_b: witness.b.iter().all(|r| kept.contains(&r.lattice_index)),
            }
        })
        .collect();
    let reduced: Vec<usize> = reduce(&poset, Regime::First)
        .kept
        .iter()
        .map(|&i| members[i])
        .collect();
    let e_is_point = reduced.len() == 1;
    let direct_cd_le_1 = if poset.len() <= DIRECT_LIMIT {
        Some(poset_solver(&poset)?.decide(1)?.le)
    } else {
        None
    };
    let survives = regimes.iter().all(|r| r.contains_a && r.contains_b);
    let poset_cd_at_least_2 = survives && !e_is_point;
    let holds = conditions.all() && poset_cd_at_least_2 && direct_cd_le_1 != Some(true);
    Ok(CrownReport {
        group_order: g.order(),
        witness,
        conditions,
        poset_size: poset.len(),
        reduced,
        regimes,
        e_is_point,
        direct_cd_le_1,
        poset_cd_at_least_2,
        proper_cd_at_least_2: poset_cd_at_least_2,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_basics() {
        let c = FinPoset::chain(3);
        assert_eq!(c.depths(), vec![2, 1, 0]);
        assert_eq!(c.covers(2), vec![1]);
        assert!(c.is_superfluous(2));
        assert_eq!(e_reduction(&c).len(), 1);
    }

    #[test]
    fn crown_has_nothing_superfluous() {
        let c = FinPoset::crown(2, 2);
        assert!(c.superfluous().is_empty());
        assert_eq!(e_reduction(&c), c);
    }

    #[test]
    fn point_is_fixed() {
        let p = FinPoset::chain(1);
        assert!(!p.is_superfluous(0));
        assert_eq!(e_reduction(&p), p);
    }

    #[test]
    fn relabelled_crown_is_isomorphic() {
        let c = FinPoset::crown(2, 3);
        let perm = [3, 0, 5, 1, 4, 2];
        let d = c.induced(&perm);
        assert!(c.is_isomorphic(&d).unwrap());
        assert!(!c.is_isomorphic(&FinPoset::crown(3, 2)).unwrap());
    }
}
