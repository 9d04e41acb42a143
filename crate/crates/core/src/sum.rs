//! Rational linear combinations of canonical diagrams, truncated at a degree cap.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::diagram::{canon_id, diagram, DiagId, Diagram, Skeleton};
use crate::linalg::{fmt_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSum {
    pub skeleton: Skeleton,
    pub directed: bool,
    pub cap: usize,
    terms: BTreeMap<DiagId, Q>,
}

impl FormalSum {
    pub fn zero(skeleton: Skeleton, directed: bool, cap: usize) -> Self {
        FormalSum { skeleton, directed, cap, terms: BTreeMap::new() }
    }

    /// The empty diagram.
    pub fn one(skeleton: Skeleton, directed: bool, cap: usize) -> Self {
        let d = if directed { Diagram::empty_directed(skeleton.clone()) } else { Diagram::empty(skeleton.clone()) };
        let mut s = Self::zero(skeleton, directed, cap);
        s.add_raw(&d, &Q::one());
        s
    }

    pub fn from_raw(d: &Diagram, c: Q, cap: usize) -> Self {
        let mut s = Self::zero(d.skeleton.clone(), d.is_directed(), cap);
        s.add_raw(d, &c);
        s
    }

    pub fn from_id(id: DiagId, c: Q, cap: usize) -> Self {
        let d = diagram(id);
        let mut s = Self::zero(d.skeleton.clone(), d.is_directed(), cap);
        s.add_id(id, &c);
        s
    }

    pub fn like(&self) -> Self {
        Self::zero(self.skeleton.clone(), self.directed, self.cap)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        let t = std::mem::take(&mut self.terms);
        self.terms = t.into_iter().filter(|(id, _)| diagram(*id).degree() <= cap).collect();
        self
    }

    pub fn add_id(&mut self, id: DiagId, c: &Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(id).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&id);
        }
    }

    /// Adds `c` times a raw diagram, canonicalizing it; terms above the cap are dropped.
    pub fn add_raw(&mut self, d: &Diagram, c: &Q) {
        debug_assert_eq!(d.skeleton, self.skeleton, "skeleton mismatch");
        debug_assert_eq!(d.is_directed(), self.directed, "direction mismatch");
        if c.is_zero() || d.degree() > self.cap {
            return;
        }
        if let Some((id, s)) = canon_id(d) {
            if s > 0 {
                self.add_id(id, c);
            } else {
                self.add_id(id, &-c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (DiagId, &Q)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, id: DiagId) -> Q {
        self.terms.get(&id).cloned().unwrap_or_else(Q::zero)
    }

    /// Terms ordered by diagram, for deterministic output.
    pub fn sorted_terms(&self) -> Vec<(DiagId, Q)> {
        let mut v: Vec<(DiagId, Q)> = self.terms.iter().map(|(k, c)| (*k, c.clone())).collect();
        v.sort_by_key(|a| diagram(a.0));
        v
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|id| diagram(*id).degree()).max()
    }

    pub fn degree_part(&self, k: usize) -> Self {
        let mut s = self.like();
        for (id, c) in &self.terms {
            if diagram(*id).degree() == k {
                s.terms.insert(*id, c.clone());
            }
        }
        s
    }

    /// Coefficient of the empty diagram.
    pub fn constant(&self) -> Q {
        for (id, c) in &self.terms {
            if diagram(*id).n_ports() == 0 {
                return c.clone();
            }
        }
        Q::zero()
    }

    pub fn scale(&self, k: &Q) -> Self {
        let mut s = self.like();
        if !k.is_zero() {
            s.terms = self.terms.iter().map(|(id, c)| (*id, c * k)).collect();
        }
        s
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn add(&self, o: &Self) -> Self {
        self.axpy(&Q::one(), o)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.axpy(&-Q::one(), o)
    }

    pub fn axpy(&self, k: &Q, o: &Self) -> Self {
        assert_eq!(self.skeleton, o.skeleton, "adding sums on different skeletons");
        let mut s = self.clone();
        s.cap = self.cap.min(o.cap);
        for (id, c) in &o.terms {
            if diagram(*id).degree() <= s.cap {
                s.add_id(*id, &(c * k));
            }
        }
        if s.cap < self.cap {
            let c = s.cap;
            s = s.with_cap(c);
        }
        s
    }

    /// Applies a linear map given on diagrams; the map returns raw diagrams with coefficients.
    pub fn map<F>(&self, target: Skeleton, directed: bool, cap: usize, f: F) -> Self
    where
        F: Fn(&Diagram) -> Vec<(Diagram, Q)> + Sync,
    {
        let items: Vec<(DiagId, Q)> = self.terms.iter().map(|(k, v)| (*k, v.clone())).collect();
        let parts: Vec<Vec<(DiagId, Q)>> = items
            .par_iter()
            .map(|(id, c)| {
                let d = diagram(*id);
                let mut out = Vec::new();
                for (e, k) in f(&d) {
                    if e.degree() > cap || k.is_zero() {
                        continue;
                    }
                    debug_assert_eq!(e.skeleton, target);
                    if let Some((eid, s)) = canon_id(&e) {
                        let v = &k * c;
                        out.push((eid, if s > 0 { v } else { -v }));
                    }
                }
                out
            })
            .collect();
        let mut s = FormalSum::zero(target, directed, cap);
        for p in parts {
            for (id, c) in p {
                s.add_id(id, &c);
            }
        }
        s
    }

    /// Like `map`, but the image is already a formal sum per diagram.
    pub fn map_sums<F>(&self, target: Skeleton, directed: bool, cap: usize, f: F) -> Self
    where
        F: Fn(&Diagram) -> FormalSum + Sync,
    {
        let items: Vec<(DiagId, Q)> = self.terms.iter().map(|(k, v)| (*k, v.clone())).collect();
        let parts: Vec<FormalSum> = items.par_iter().map(|(id, c)| f(&diagram(*id)).scale(c)).collect();
        let mut s = FormalSum::zero(target, directed, cap);
        for p in parts {
            for (id, c) in p.terms {
                if diagram(id).degree() <= cap {
                    s.add_id(id, &c);
                }
            }
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, c) in self.sorted_terms() {
            out.push_str(&format!("coeff {}\n", fmt_q(&c)));
            out.push_str(&diagram(id).to_text(1));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
