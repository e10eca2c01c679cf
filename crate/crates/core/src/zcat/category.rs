//! Finite categories with tabulated composition.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::permgroup::PermGroup;
use crate::{Error, Result};

/// A finite category. Morphisms are numbered `0..morphism_count()`;
/// `compose(f, g)` is `g ∘ f` for `f: a → b`, `g: b → c`.
#[derive(Clone, Debug)]
pub struct FinCategory {
    objects: Vec<String>,
    src: Vec<usize>,
    tgt: Vec<usize>,
    hom: Vec<Vec<Vec<usize>>>,
    pos: Vec<usize>,
    out: Vec<Vec<usize>>,
    out_pos: Vec<usize>,
    comp: Vec<Vec<u32>>,
    identity: Vec<usize>,
}

impl FinCategory {
    /// Builds and validates a category. `morphisms[m] = (source, target)`;
    /// `compose(f, g)` must return the id of `g ∘ f`.
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<(usize, usize)>,
        identity: Vec<usize>,
        compose: impl Fn(usize, usize) -> usize,
    ) -> Result<FinCategory> {
        let n = objects.len();
        if identity.len() != n {
            return Err(Error::InvalidInput(
                "one identity per object required".into(),
            ));
        }
        let mut hom = vec![vec![Vec::new(); n]; n];
        let mut pos = vec![0; morphisms.len()];
        let mut out = vec![Vec::new(); n];
        let mut out_pos = vec![0; morphisms.len()];
        for (m, &(a, b)) in morphisms.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!(
                    "morphism {m} has a bad endpoint"
                )));
            }
            pos[m] = hom[a][b].len();
            hom[a][b].push(m);
            out_pos[m] = out[a].len();
            out[a].push(m);
        }
        let (src, tgt): (Vec<usize>, Vec<usize>) = morphisms.iter().copied().unzip();
        for (c, &i) in identity.iter().enumerate() {
            if i >= morphisms.len() || src[i] != c || tgt[i] != c {
                return Err(Error::InvalidInput(format!("bad identity at object {c}")));
            }
        }
        let mut comp = Vec::with_capacity(morphisms.len());
        for f in 0..morphisms.len() {
            let b = tgt[f];
            let mut row = Vec::with_capacity(out[b].len());
            for &g in &out[b] {
                let h = compose(f, g);
                if h >= morphisms.len() || src[h] != src[f] || tgt[h] != tgt[g] {
                    return Err(Error::InvalidInput(format!(
                        "composite of {f} and {g} has the wrong type"
                    )));
                }
                row.push(h as u32);
            }
            comp.push(row);
        }
        let cat = FinCategory {
            objects,
            src,
            tgt,
            hom,
            pos,
            out,
            out_pos,
            comp,
            identity,
        };
        cat.validate()?;
        Ok(cat)
    }

    /// Exhaustive check of unit and associativity laws.
    pub fn validate(&self) -> Result<()> {
        for f in 0..self.morphism_count() {
            if self.compose(self.identity[self.src[f]], f) != f
                || self.compose(f, self.identity[self.tgt[f]]) != f
            {
                return Err(Error::InvalidInput(format!("identity law fails at {f}")));
            }
            for &g in &self.out[self.tgt[f]] {
                let gf = self.compose(f, g);
                for &h in &self.out[self.tgt[g]] {
                    if self.compose(gf, h) != self.compose(f, self.compose(g, h)) {
                        return Err(Error::InvalidInput(format!(
                            "associativity fails at ({f}, {g}, {h})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The one-object category of a group; morphisms are group elements and
    /// `g ∘ f` is the product `g f`.
    pub fn from_group(g: &PermGroup) -> FinCategory {
        let n = g.order();
        FinCategory::new(
            vec!["*".into()],
            vec![(0, 0); n],
            vec![PermGroup::IDENTITY],
            |f, h| g.mul(h, f),
        )
        .expect("group category")
    }

    /// The category of a finite poset: one morphism `a → b` iff `a ≤ b`.
    pub fn from_poset(names: Vec<String>, leq: &[Vec<bool>]) -> Result<FinCategory> {
        let n = leq.len();
        let mut morphisms = Vec::new();
        let mut id_of = HashMap::new();
        for (a, row) in leq.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput("order matrix must be square".into()));
            }
            for (b, &le) in row.iter().enumerate() {
                if le {
                    id_of.insert((a, b), morphisms.len());
                    morphisms.push((a, b));
                }
            }
        }
        let mut identity = Vec::with_capacity(n);
        for a in 0..n {
            identity.push(
                *id_of
                    .get(&(a, a))
                    .ok_or_else(|| Error::InvalidInput("order relation is not reflexive".into()))?,
            );
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(Error::InvalidInput(
                        "order relation is not antisymmetric".into(),
                    ));
                }
            }
        }
        for &(a, b) in &morphisms {
            for c in 0..n {
                if leq[b][c] && !leq[a][c] {
                    return Err(Error::InvalidInput(
                        "order relation is not transitive".into(),
                    ));
                }
            }
        }
        let ends = morphisms.clone();
        FinCategory::new(names, morphisms, identity, |f, g| {
            id_of[&(ends[f].0, ends[g].1)]
        })
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_name(&self, c: usize) -> &str {
        &self.objects[c]
    }

    pub fn morphism_count(&self) -> usize {
        self.src.len()
    }

    pub fn src(&self, f: usize) -> usize {
        self.src[f]
    }

    pub fn tgt(&self, f: usize) -> usize {
        self.tgt[f]
    }

    /// Morphisms `a → b` in increasing id order.
    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.hom[a][b]
    }

    /// Position of `f` within `hom(src f, tgt f)`.
    pub fn hom_pos(&self, f: usize) -> usize {
        self.pos[f]
    }

    /// Morphisms with source `a`.
    pub fn out(&self, a: usize) -> &[usize] {
        &self.out[a]
    }

    pub fn identity(&self, c: usize) -> usize {
        self.identity[c]
    }

    /// `g ∘ f`
    pub fn compose(&self, f: usize, g: usize) -> usize {
        debug_assert_eq!(self.tgt[f], self.src[g]);
        self.comp[f][self.out_pos[g]] as usize
    }

    /// Number of objects `d` with some morphism `d → c`.
    pub fn in_degree(&self, c: usize) -> usize {
        (0..self.object_count())
            .filter(|&d| !self.hom[d][c].is_empty())
            .count()
    }

    /// Whether any two objects have at most one morphism between them.
    pub fn is_thin(&self) -> bool {
        self.hom.iter().all(|r| r.iter().all(|h| h.len() <= 1))
    }

    /// A terminal object, if one exists.
    pub fn terminal_object(&self) -> Option<usize> {
        (0..self.object_count())
            .find(|&t| (0..self.object_count()).all(|d| self.hom[d][t].len() == 1))
    }

    /// Whether the underlying graph is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.object_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if !seen[b] && (!self.hom[a][b].is_empty() || !self.hom[b][a].is_empty()) {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Whether `a` and `b` are isomorphic.
    pub fn isomorphic(&self, a: usize, b: usize) -> bool {
        self.hom[a][b].iter().any(|&f| {
            self.hom[b][a].iter().any(|&g| {
                self.compose(f, g) == self.identity[a] && self.compose(g, f) == self.identity[b]
            })
        })
    }

    /// Composition triples `(f, g, g∘f)` for export.
    pub fn export(&self) -> CategoryExport {
        let mut compositions = Vec::new();
        for f in 0..self.morphism_count() {
            for &g in &self.out[self.tgt[f]] {
                compositions.push([f, g, self.compose(f, g)]);
            }
        }
        CategoryExport {
            objects: self.objects.clone(),
            morphisms: (0..self.morphism_count())
                .map(|m| [self.src[m], self.tgt[m]])
                .collect(),
            identities: self.identity.clone(),
            compositions,
        }
    }
}

/// A functor between finite categories, tabulated on objects and morphisms.
#[derive(Clone, Debug)]
pub struct Functor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub objects: Vec<usize>,
    pub morphisms: Vec<usize>,
}

impl Functor {
    /// Builds a functor, checking endpoints, identities and composition.
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        objects: Vec<usize>,
        morphisms: Vec<usize>,
    ) -> Result<Functor> {
        if objects.len() != source.object_count() || morphisms.len() != source.morphism_count() {
            return Err(Error::InvalidInput(
                "functor data has the wrong shape".into(),
            ));
        }
        for f in 0..source.morphism_count() {
            let m = morphisms[f];
            if m >= target.morphism_count()
                || target.src(m) != objects[source.src(f)]
                || target.tgt(m) != objects[source.tgt(f)]
            {
                return Err(Error::InvalidInput(format!(
                    "functor moves endpoints of {f}"
                )));
            }
            for &g in source.out(source.tgt(f)) {
                if morphisms[source.compose(f, g)] != target.compose(m, morphisms[g]) {
                    return Err(Error::InvalidInput(format!(
                        "functor does not preserve the composite of {f} and {g}"
                    )));
                }
            }
        }
        for c in 0..source.object_count() {
            if morphisms[source.identity(c)] != target.identity(objects[c]) {
                return Err(Error::InvalidInput(format!(
                    "functor moves the identity of {c}"
                )));
            }
        }
        Ok(Functor {
            source,
            target,
            objects,
            morphisms,
        })
    }

    /// Whether the functor is bijective on every hom-set.
    pub fn is_fully_faithful(&self) -> bool {
        let s = &self.source;
        (0..s.object_count()).all(|a| {
            (0..s.object_count()).all(|b| {
                let mut img: Vec<usize> = s.hom(a, b).iter().map(|&f| self.morphisms[f]).collect();
                img.sort_unstable();
                img.dedup();
                img.len() == s.hom(a, b).len()
                    && img.len() == self.target.hom(self.objects[a], self.objects[b]).len()
            })
        })
    }

    /// For each target object, a source object whose image is isomorphic to
    /// it, if any.
    pub fn essential_preimages(&self) -> Vec<Option<usize>> {
        let t = &self.target;
        (0..t.object_count())
            .map(|x| (0..self.source.object_count()).find(|&a| t.isomorphic(self.objects[a], x)))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CategoryExport {
    pub objects: Vec<String>,
    pub morphisms: Vec<[usize; 2]>,
    pub identities: Vec<usize>,
    pub compositions: Vec<[usize; 3]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::named::cyclic;

    #[test]
    fn group_category_composes_by_product() {
        let g = cyclic(3);
        let c = FinCategory::from_group(&g);
        assert_eq!(c.hom(0, 0).len(), 3);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(c.compose(a, b), g.mul(b, a));
            }
        }
    }

    #[test]
    fn chain_poset() {
        let leq = vec![
            vec![true, true, true],
            vec![false, true, true],
            vec![false, false, true],
        ];
        let c = FinCategory::from_poset(vec!["0".into(), "1".into(), "2".into()], &leq).unwrap();
        assert!(c.is_thin());
        assert_eq!(c.terminal_object(), Some(2));
        assert_eq!(c.morphism_count(), 6);
    }

    #[test]
    fn rejects_non_transitive_relation() {
        let leq = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ];
        assert!(FinCategory::from_poset(vec!["a".into(), "b".into(), "c".into()], &leq).is_err());
    }
}
