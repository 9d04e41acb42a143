//! Exact rational arithmetic and sparse row echelon elimination.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseVec {
    entries: Vec<(u32, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    /// Builds a vector from arbitrary (column, value) pairs, summing repeats and dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (u32, Q)>>(pairs: I) -> Self {
        let mut m: BTreeMap<u32, Q> = BTreeMap::new();
        for (c, v) in pairs {
            *m.entry(c).or_insert_with(Q::zero) += v;
        }
        Self::from_map(m)
    }

    pub fn from_map(m: BTreeMap<u32, Q>) -> Self {
        SparseVec { entries: m.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn from_dense(xs: &[Q]) -> Self {
        Self::from_pairs(xs.iter().cloned().enumerate().map(|(i, v)| (i as u32, v)))
    }

    pub fn entries(&self) -> &[(u32, Q)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, c: u32) -> Q {
        match self.entries.binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn lead(&self) -> Option<u32> {
        self.entries.first().map(|e| e.0)
    }

    pub fn scale(&self, k: &Q) -> SparseVec {
        if k.is_zero() {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|(c, v)| (*c, v * k)).collect() }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&Q::one(), other)
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&-Q::one(), other)
    }

    /// self + k * other
    pub fn axpy(&self, k: &Q, other: &SparseVec) -> SparseVec {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, &b[j].1 * k));
                j += 1;
            } else {
                let v = &a[i].1 + &b[j].1 * k;
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }
}

/// Row echelon basis: each row's leading column is its pivot with entry 1,
/// and no row has a nonzero entry in another row's pivot column.
#[derive(Clone, Debug, Default)]
pub struct RowEchelonBasis {
    rows: Vec<SparseVec>,
    pivot_row: HashMap<u32, usize>,
}

impl RowEchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, c: u32) -> bool {
        self.pivot_row.contains_key(&c)
    }

    pub fn pivots(&self) -> Vec<u32> {
        let mut p: Vec<u32> = self.pivot_row.keys().copied().collect();
        p.sort_unstable();
        p
    }

    /// Rows sorted by pivot column.
    pub fn rows(&self) -> Vec<&SparseVec> {
        let mut r: Vec<&SparseVec> = self.rows.iter().collect();
        r.sort_by_key(|v| v.lead());
        r
    }

    /// Residual of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        if self.rows.is_empty() {
            return v.clone();
        }
        let mut work: BTreeMap<u32, Q> = v.entries.iter().cloned().collect();
        let mut cursor: Option<u32> = None;
        loop {
            let next = match cursor {
                None => work.iter().find(|(c, _)| self.pivot_row.contains_key(c)),
                Some(c0) => {
                    work.range((std::ops::Bound::Excluded(c0), std::ops::Bound::Unbounded)).find(|(c, _)| self.pivot_row.contains_key(c))
                }
            };
            let (c, k) = match next {
                Some((c, k)) => (*c, k.clone()),
                None => break,
            };
            let row = &self.rows[self.pivot_row[&c]];
            for (rc, rv) in &row.entries {
                let e = work.entry(*rc).or_insert_with(Q::zero);
                *e -= &k * rv;
                if e.is_zero() {
                    work.remove(rc);
                }
            }
            cursor = Some(c);
        }
        SparseVec::from_map(work)
    }

    /// Reduces `v`; a nonzero residual is normalized and added as a new row.
    /// Returns the residual (normalized when it was inserted).
    pub fn insert(&mut self, v: &SparseVec) -> SparseVec {
        let r = self.reduce(v);
        let Some((p, lead)) = r.entries.first().cloned() else {
            return r;
        };
        let r = r.scale(&lead.recip());
        let idx = self.rows.len();
        // keep the other rows clean in the new pivot column
        for row in self.rows.iter_mut() {
            let k = row.get(p);
            if !k.is_zero() {
                *row = row.axpy(&-k, &r);
            }
        }
        self.rows.push(r.clone());
        self.pivot_row.insert(p, idx);
        r
    }

    /// Inserts many rows, returning the number that increased the rank.
    pub fn extend<'a, I: IntoIterator<Item = &'a SparseVec>>(&mut self, vs: I) -> usize {
        let before = self.rank();
        for v in vs {
            self.insert(v);
        }
        self.rank() - before
    }
}

/// Batch elimination: much faster than repeated `insert` because rows are only
/// reduced against earlier pivots (echelon), then back-substituted once.
pub fn echelon_from_rows(rows: Vec<SparseVec>) -> RowEchelonBasis {
    let mut by_pivot: HashMap<u32, SparseVec> = HashMap::new();
    for v in rows {
        let mut cur = v;
        loop {
            let Some((p, lead)) = cur.entries.first().cloned() else { break };
            match by_pivot.get(&p) {
                Some(row) => cur = cur.axpy(&-lead, row),
                None => {
                    by_pivot.insert(p, cur.scale(&lead.recip()));
                    break;
                }
            }
        }
    }
    let mut pivots: Vec<u32> = by_pivot.keys().copied().collect();
    pivots.sort_unstable();
    // back-substitute from the last pivot upward
    let mut done: HashMap<u32, SparseVec> = HashMap::new();
    for &p in pivots.iter().rev() {
        let row = by_pivot.remove(&p).unwrap();
        let mut work: BTreeMap<u32, Q> = row.entries.into_iter().collect();
        let cols: Vec<u32> = work.keys().copied().filter(|c| *c != p && done.contains_key(c)).collect();
        for c in cols {
            let k = match work.get(&c) {
                Some(k) => k.clone(),
                None => continue,
            };
            for (rc, rv) in &done[&c].entries {
                let e = work.entry(*rc).or_insert_with(Q::zero);
                *e -= &k * rv;
                if e.is_zero() {
                    work.remove(rc);
                }
            }
        }
        done.insert(p, SparseVec::from_map(work));
    }
    let mut basis = RowEchelonBasis::new();
    for p in pivots {
        basis.pivot_row.insert(p, basis.rows.len());
        basis.rows.push(done.remove(&p).unwrap());
    }
    basis
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent linear system")]
pub struct Inconsistent;

/// Solves `A x = b` where `a[i]` is row i over variable columns and `b[i]` its right side.
/// Free variables are set to zero.
pub fn solve_affine(a: &[SparseVec], b: &SparseVec) -> Result<SparseVec, Inconsistent> {
    const AUG: u32 = u32::MAX;
    let rows: Vec<SparseVec> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let rhs = b.get(i as u32);
            let mut e = r.entries.clone();
            if !rhs.is_zero() {
                e.push((AUG, rhs));
            }
            SparseVec { entries: e }
        })
        .collect();
    let basis = echelon_from_rows(rows);
    if basis.is_pivot(AUG) {
        return Err(Inconsistent);
    }
    // rows are fully reduced: each pivot variable equals the right side minus free terms, free = 0
    Ok(SparseVec::from_pairs(basis.rows.iter().map(|r| (r.lead().unwrap(), r.get(AUG)))))
}

/// Dense Gaussian elimination rank, used as an independent check.
pub fn dense_rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let ncols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    for r in m.iter_mut() {
        r.resize(ncols, Q::zero());
    }
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, piv);
        let inv = m[rank][col].recip();
        for x in m[rank].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][col].is_zero() {
                let k = m[i][col].clone();
                let pr = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(pr.iter()) {
                    *x -= &k * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> SparseVec {
        SparseVec::from_dense(&xs.iter().map(|&x| qi(x)).collect::<Vec<_>>())
    }

    #[test]
    fn insert_single() {
        let mut b = RowEchelonBasis::new();
        let r = b.insert(&v(&[1, 0, 0]));
        assert_eq!(b.rank(), 1);
        assert_eq!(r, v(&[1, 0, 0]));
    }

    #[test]
    fn dependent_residual_is_zero() {
        let mut b = RowEchelonBasis::new();
        b.insert(&v(&[2, 4]));
        assert!(b.insert(&v(&[1, 2])).is_zero());
        assert_eq!(b.rank(), 1);
    }

    #[test]
    fn solve_identity() {
        let a = vec![v(&[1, 0]), v(&[0, 1])];
        let b = SparseVec::from_dense(&[qi(3), q(1, 2)]);
        assert_eq!(solve_affine(&a, &b).unwrap(), b);
    }

    #[test]
    fn solve_free_zeroed() {
        let a = vec![v(&[1, 1])];
        let x = solve_affine(&a, &v(&[1])).unwrap();
        assert_eq!(x, v(&[1, 0]));
    }

    #[test]
    fn solve_inconsistent() {
        let a = vec![v(&[1, 0]), v(&[1, 0])];
        assert_eq!(solve_affine(&a, &v(&[1, 2])), Err(Inconsistent));
    }

    fn small_q() -> impl Strategy<Value = Q> {
        (-5i64..6, 1i64..4).prop_map(|(n, d)| q(n, d))
    }

    fn big_q() -> impl Strategy<Value = Q> {
        (proptest::collection::vec(any::<u64>(), 4), any::<bool>(), 1u64..u64::MAX).prop_map(|(limbs, neg, d)| {
            let mut n = BigInt::from(0);
            for l in limbs {
                n = (n << 64) + BigInt::from(l);
            }
            if neg {
                n = -n;
            }
            Q::new(n, BigInt::from(d))
        })
    }

    proptest! {
        #[test]
        fn rank_matches_dense(rows in proptest::collection::vec(proptest::collection::vec(small_q(), 5), 0..7)) {
            let mut b = RowEchelonBasis::new();
            for r in &rows {
                b.insert(&SparseVec::from_dense(r));
            }
            prop_assert_eq!(b.rank(), dense_rank(&rows));
            let batch = echelon_from_rows(rows.iter().map(|r| SparseVec::from_dense(r)).collect());
            prop_assert_eq!(batch.rank(), dense_rank(&rows));
        }

        #[test]
        fn reduce_idempotent(rows in proptest::collection::vec(proptest::collection::vec(small_q(), 4), 0..5),
                             x in proptest::collection::vec(small_q(), 4)) {
            let b = echelon_from_rows(rows.iter().map(|r| SparseVec::from_dense(r)).collect());
            let r1 = b.reduce(&SparseVec::from_dense(&x));
            prop_assert_eq!(b.reduce(&r1), r1.clone());
            let mut inc = RowEchelonBasis::new();
            for r in &rows {
                inc.insert(&SparseVec::from_dense(r));
            }
            prop_assert_eq!(inc.reduce(&SparseVec::from_dense(&x)), r1);
        }

        #[test]
        fn exact_add_sub(a in big_q(), b in big_q()) {
            prop_assert_eq!((a.clone() + &b) - &b, a);
        }
    }
}
