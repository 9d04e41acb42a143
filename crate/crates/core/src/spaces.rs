//! Relation sets and quotient spaces of diagrams, built by enumeration and elimination.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{
    canon_id, diagram, enumerate_chord_diagrams, enumerate_diagrams, enumerate_undirected, Comp, DiagId, Diagram, GuardExceeded, Skeleton,
};
use crate::linalg::{echelon_from_rows, qi, RowEchelonBasis, SparseVec, Q};
use crate::ops;
use crate::sum::FormalSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelSet {
    /// AS + IHX + STU on undirected diagrams.
    A,
    /// 4T on chord diagrams.
    Achord,
    /// NS + AS + IHX + STU on directed diagrams.
    Aarrow,
    /// Aarrow restricted to diagrams whose legs are all incoming.
    AarrowPlus,
    /// Aarrow restricted to diagrams whose legs are all outgoing.
    AarrowMinus,
    /// Aarrow restricted per strand: `Plus` strands carry only incoming legs, `Minus` strands
    /// only outgoing ones. A⃗₊⊠A⃗₋ is `Sided([Plus, Minus])`.
    Sided(Vec<Option<Side>>),
    /// Aarrow plus, on each flagged interval, the rightmost-leg relation:
    /// `Plus` kills an incoming rightmost leg, `Minus` an outgoing one.
    Verma(Vec<Option<Side>>),
    /// 6T on directed chord diagrams.
    PolyakChord,
    /// Directed relations among acyclic diagrams.
    PolyakAcyclic,
}

impl RelSet {
    pub fn directed(&self) -> bool {
        !matches!(self, RelSet::A | RelSet::Achord)
    }

    pub fn m_plus() -> Self {
        RelSet::Verma(vec![Some(Side::Plus)])
    }

    pub fn m_minus() -> Self {
        RelSet::Verma(vec![Some(Side::Minus)])
    }
}

impl fmt::Display for RelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelSet::A => write!(f, "A"),
            RelSet::Achord => write!(f, "Achord"),
            RelSet::Aarrow => write!(f, "Aarrow"),
            RelSet::AarrowPlus => write!(f, "AarrowPlus"),
            RelSet::AarrowMinus => write!(f, "AarrowMinus"),
            RelSet::Verma(v) if v.len() == 1 && v[0] == Some(Side::Plus) => write!(f, "MPlus"),
            RelSet::Verma(v) if v.len() == 1 && v[0] == Some(Side::Minus) => write!(f, "MMinus"),
            RelSet::Verma(v) => write!(f, "Verma[{}]", flag_text(v)),
            RelSet::Sided(v) => write!(f, "Sided[{}]", flag_text(v)),
            RelSet::PolyakChord => write!(f, "PolyakChord"),
            RelSet::PolyakAcyclic => write!(f, "PolyakAcyclic"),
        }
    }
}

fn flag_text(v: &[Option<Side>]) -> String {
    v.iter()
        .map(|x| match x {
            Some(Side::Plus) => '+',
            Some(Side::Minus) => '-',
            None => '.',
        })
        .collect()
}

impl FromStr for RelSet {
    type Err = SpaceError;
    fn from_str(s: &str) -> Result<Self, SpaceError> {
        Ok(match s {
            "A" => RelSet::A,
            "Achord" => RelSet::Achord,
            "Aarrow" => RelSet::Aarrow,
            "AarrowPlus" => RelSet::AarrowPlus,
            "AarrowMinus" => RelSet::AarrowMinus,
            "MPlus" => RelSet::m_plus(),
            "MMinus" => RelSet::m_minus(),
            "PolyakChord" => RelSet::PolyakChord,
            "PolyakAcyclic" => RelSet::PolyakAcyclic,
            _ => return Err(SpaceError::Unsupported(format!("unknown relation set `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error(transparent)]
    Guard(#[from] GuardExceeded),
    #[error("diagram outside the enumerated set of {0}")]
    Stale(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("a body component has no leg; it cannot be rewritten into chords")]
    NotBoundaryConnected,
}

/// Which diagrams should end up as basis (non-pivot) columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preference {
    /// Diagrams with fewer internal vertices form the basis.
    FewInternal,
    /// On Verma skeletons: diagrams whose legs are outgoing on `Plus` strands and incoming on
    /// `Minus` strands form the basis, ordered by ascending leg count.
    VermaTop,
}

pub type Relation = Vec<(Diagram, Q)>;

fn in_set(rs: &RelSet, d: &Diagram) -> bool {
    match rs {
        RelSet::AarrowPlus => (0..d.n_legs()).all(|l| d.is_head(l)),
        RelSet::AarrowMinus => (0..d.n_legs()).all(|l| !d.is_head(l)),
        RelSet::PolyakChord => d.n_internal() == 0,
        RelSet::PolyakAcyclic => !d.has_directed_cycle(),
        RelSet::Sided(flags) => flags.iter().enumerate().all(|(c, f)| match f {
            Some(Side::Plus) => d.comps[c].iter().all(|&l| d.is_head(l as usize)),
            Some(Side::Minus) => d.comps[c].iter().all(|&l| !d.is_head(l as usize)),
            None => true,
        }),
        _ => true,
    }
}

/// The diagrams spanning the space before relations.
pub fn enumerate_for(s: &Skeleton, m: usize, rs: &RelSet, boundary_connected: bool, limit: usize) -> Result<Vec<DiagId>, SpaceError> {
    if let RelSet::Verma(flags) | RelSet::Sided(flags) = rs {
        if flags.len() != s.len() || s.0.iter().zip(flags).any(|(c, f)| f.is_some() && *c != Comp::Interval) {
            return Err(SpaceError::Unsupported(format!("Verma flags {rs} do not fit skeleton {s}")));
        }
    }
    let ids = match rs {
        RelSet::A => enumerate_undirected(s, m, boundary_connected, limit)?,
        RelSet::Achord => enumerate_chord_diagrams(s, m),
        RelSet::PolyakChord => {
            let und = enumerate_chord_diagrams(s, m);
            let mut v: Vec<DiagId> =
                und.iter().flat_map(|&id| crate::diagram::all_directions(&diagram(id))).filter_map(|d| canon_id(&d).map(|x| x.0)).collect();
            v.sort_unstable();
            v.dedup();
            crate::diagram::sort_ids(&mut v);
            v
        }
        _ => {
            let all = enumerate_diagrams(s, m, true, boundary_connected, limit)?;
            all.into_iter().filter(|&id| in_set(rs, &diagram(id))).collect()
        }
    };
    Ok(ids)
}

fn stu_relations(d: &Diagram) -> Vec<Relation> {
    let mut out = Vec::new();
    let lc = d.leg_comp();
    for leg in 0..d.n_legs() {
        if !d.skeleton.0[lc[leg]].is_line() {
            continue;
        }
        let Some((t, u)) = ops::stu_expand(d, leg) else { continue };
        let mut rel: Relation = vec![(d.clone(), Q::one())];
        if d.is_directed() {
            rel.push((ops::flip_arc(d, leg), Q::one()));
        }
        rel.push((t, -Q::one()));
        rel.push((u, Q::one()));
        out.push(rel);
    }
    out
}

fn ihx_relations(d: &Diagram) -> Vec<Relation> {
    let mut out = Vec::new();
    let l = d.n_legs();
    for p in l..d.n_ports() {
        let q = d.partner[p] as usize;
        if q < p {
            continue;
        }
        if let Some(terms) = ops::ihx_terms(d, p) {
            out.push(terms.into_iter().map(|t| (t, Q::one())).collect());
        }
    }
    out
}

fn four_t_relations(s: &Skeleton, m: usize) -> Vec<Relation> {
    // expand every Y diagram (one internal vertex, three legs) at two of its legs
    if m == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let ys = crate::diagram::enumerate_with_internal(s, m, 1);
    for id in ys {
        let y = diagram(id);
        let legs: Vec<usize> = (0..y.n_legs()).filter(|&l| ops::leg_vertex(&y, l).is_some()).collect();
        if legs.len() != 3 {
            continue;
        }
        let exp: Vec<(Diagram, Diagram)> = legs.iter().map(|&l| ops::stu_expand(&y, l).unwrap()).collect();
        for k in 1..3 {
            let (t0, u0) = exp[0].clone();
            let (tk, uk) = exp[k].clone();
            out.push(vec![(t0, Q::one()), (u0, -Q::one()), (tk, -Q::one()), (uk, Q::one())]);
        }
    }
    out
}

/// Directed chord r^{ij}: head at marker i, tail at marker j.
fn six_t_relations(s: &Skeleton, m: usize) -> Vec<Relation> {
    if m < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let base: Vec<DiagId> = enumerate_for(s, m - 2, &RelSet::PolyakChord, true, usize::MAX).unwrap_or_default();
    const MK: u32 = 1000;
    for id in base {
        let d = diagram(id);
        let p = d.parts();
        // insert markers MK, MK+1, MK+2 one at a time into every slot of every component
        let mut layouts: Vec<Vec<Vec<u32>>> = vec![p.comps.clone()];
        for mk in 0..3u32 {
            let mut next = Vec::new();
            for lay in &layouts {
                for c in 0..lay.len() {
                    if !s.0[c].is_line() {
                        continue;
                    }
                    for pos in 0..=lay[c].len() {
                        let mut l2 = lay.clone();
                        l2[c].insert(pos, MK + mk);
                        next.push(l2);
                    }
                }
            }
            layouts = next;
        }
        let terms: [(usize, usize, usize, usize, i64); 6] =
            [(0, 1, 0, 2, 1), (0, 2, 0, 1, -1), (0, 1, 1, 2, 1), (1, 2, 0, 1, -1), (0, 2, 1, 2, 1), (1, 2, 0, 2, -1)];
        for lay in layouts {
            let mut rel = Vec::new();
            for &(h1, t1, h2, t2, sg) in &terms {
                let mut q = p.clone();
                let n = 2000u32;
                // first factor endpoints precede second factor endpoints inside each marker
                let mut seqs: Vec<Vec<u32>> = vec![Vec::new(); 3];
                seqs[h1].push(n);
                seqs[t1].push(n + 1);
                seqs[h2].push(n + 2);
                seqs[t2].push(n + 3);
                q.comps = lay
                    .iter()
                    .map(|c| {
                        c.iter().flat_map(|&h| if (MK..MK + 3).contains(&h) { seqs[(h - MK) as usize].clone() } else { vec![h] }).collect()
                    })
                    .collect();
                q.edges.push((n + 1, n));
                q.edges.push((n + 3, n + 2));
                rel.push((q.build().expect("6T"), qi(sg)));
            }
            out.push(rel);
        }
    }
    out
}

fn verma_relations(d: &Diagram, flags: &[Option<Side>]) -> Vec<Relation> {
    let mut out = Vec::new();
    for (c, f) in flags.iter().enumerate() {
        let Some(side) = f else { continue };
        let Some(&last) = d.comps[c].last() else { continue };
        let incoming = d.is_head(last as usize);
        if (incoming && *side == Side::Plus) || (!incoming && *side == Side::Minus) {
            out.push(vec![(d.clone(), Q::one())]);
        }
    }
    out
}

/// All relation instances of degree `m`, as raw signed combinations.
pub fn generate_relations(
    s: &Skeleton,
    m: usize,
    rs: &RelSet,
    boundary_connected: bool,
    limit: usize,
) -> Result<Vec<Relation>, SpaceError> {
    match rs {
        RelSet::Achord => return Ok(four_t_relations(s, m)),
        RelSet::PolyakChord => return Ok(six_t_relations(s, m)),
        _ => {}
    }
    let ids = if matches!(rs, RelSet::A) {
        enumerate_undirected(s, m, boundary_connected, limit)?
    } else {
        enumerate_diagrams(s, m, true, boundary_connected, limit)?
    };
    let rels: Vec<Vec<Relation>> = ids
        .par_iter()
        .map(|&id| {
            let d = diagram(id);
            let mut out = Vec::new();
            if d.violates_ns() {
                out.push(vec![(d.as_ref().clone(), Q::one())]);
            }
            out.extend(stu_relations(&d));
            out.extend(ihx_relations(&d));
            if let RelSet::Verma(flags) = rs {
                out.extend(verma_relations(&d, flags));
            }
            out
        })
        .collect();
    let mut out: Vec<Relation> = rels.into_iter().flatten().collect();
    if rs.directed() {
        // sink/source terms vanish by NS; strip them from the remaining relations
        for r in out.iter_mut() {
            if r.len() > 1 {
                r.retain(|(d, _)| !d.violates_ns());
            }
        }
        out.retain(|r| !r.is_empty());
    }
    if matches!(rs, RelSet::AarrowPlus | RelSet::AarrowMinus | RelSet::PolyakAcyclic | RelSet::Sided(_)) {
        out.retain(|r| r.iter().all(|(d, _)| in_set(rs, d)));
    }
    Ok(out)
}

/// A relation as a map from canonical ids to coefficients.
pub fn canon_relation(r: &Relation) -> BTreeMap<DiagId, Q> {
    let mut m: BTreeMap<DiagId, Q> = BTreeMap::new();
    for (d, c) in r {
        if let Some((id, s)) = canon_id(d) {
            let e = m.entry(id).or_insert_with(Q::zero);
            if s > 0 {
                *e += c
            } else {
                *e -= c
            }
        }
    }
    m.retain(|_, v| !v.is_zero());
    m
}

pub struct DegreeBlock {
    pub degree: usize,
    /// Column order: column `k` is diagram `cols[k]`.
    pub cols: Vec<DiagId>,
    pub col_of: HashMap<DiagId, u32>,
    pub echelon: RowEchelonBasis,
    /// Basis diagrams (non-pivot columns) in column order.
    pub basis: Vec<DiagId>,
    pub relation_count: usize,
}

pub struct QuotientSpace {
    pub skeleton: Skeleton,
    pub cap: usize,
    pub rs: RelSet,
    pub boundary_connected: bool,
    pub preference: Preference,
    pub limit: usize,
    blocks: Mutex<Vec<Option<Arc<DegreeBlock>>>>,
}

pub const DEFAULT_LIMIT: usize = 200_000;

static DIAGRAM_LIMIT: AtomicUsize = AtomicUsize::new(DEFAULT_LIMIT);

/// The per-degree diagram guard used by spaces created after this call.
pub fn set_diagram_limit(limit: usize) {
    DIAGRAM_LIMIT.store(limit.max(1), Ordering::Relaxed);
}

pub fn diagram_limit() -> usize {
    DIAGRAM_LIMIT.load(Ordering::Relaxed)
}

fn verma_top(d: &Diagram, flags: &[Option<Side>]) -> bool {
    flags.iter().enumerate().all(|(c, f)| match f {
        Some(Side::Plus) => d.comps[c].iter().all(|&l| !d.is_head(l as usize)),
        Some(Side::Minus) => d.comps[c].iter().all(|&l| d.is_head(l as usize)),
        None => true,
    })
}

impl QuotientSpace {
    pub fn new(skeleton: Skeleton, cap: usize, rs: RelSet) -> Self {
        let pref = if matches!(rs, RelSet::Verma(_)) { Preference::VermaTop } else { Preference::FewInternal };
        Self::with_options(skeleton, cap, rs, true, pref, diagram_limit())
    }

    pub fn with_options(
        skeleton: Skeleton,
        cap: usize,
        rs: RelSet,
        boundary_connected: bool,
        preference: Preference,
        limit: usize,
    ) -> Self {
        QuotientSpace { skeleton, cap, rs, boundary_connected, preference, limit, blocks: Mutex::new(vec![None; cap + 1]) }
    }

    fn sort_key(&self, d: &Diagram) -> (u8, i64) {
        match (&self.preference, &self.rs) {
            (Preference::VermaTop, RelSet::Verma(flags)) => (u8::from(verma_top(d, flags)), -(d.n_legs() as i64)),
            _ => (0, -(d.n_internal() as i64)),
        }
    }

    pub fn block(&self, m: usize) -> Result<Arc<DegreeBlock>, SpaceError> {
        if m > self.cap {
            return Err(SpaceError::Unsupported(format!("degree {m} above cap {}", self.cap)));
        }
        if let Some(b) = self.blocks.lock().unwrap()[m].clone() {
            return Ok(b);
        }
        let b = Arc::new(self.build_block(m)?);
        self.blocks.lock().unwrap()[m] = Some(b.clone());
        Ok(b)
    }

    fn build_block(&self, m: usize) -> Result<DegreeBlock, SpaceError> {
        let mut cols = enumerate_for(&self.skeleton, m, &self.rs, self.boundary_connected, self.limit)?;
        // pivots are taken leftmost, so the diagrams to eliminate come first
        let keys: HashMap<DiagId, (u8, i64)> = cols.iter().map(|&id| (id, self.sort_key(&diagram(id)))).collect();
        cols.sort_by(|a, b| keys[a].cmp(&keys[b]).then_with(|| diagram(*a).cmp(&diagram(*b))));
        let col_of: HashMap<DiagId, u32> = cols.iter().enumerate().map(|(k, &id)| (id, k as u32)).collect();
        let rels = generate_relations(&self.skeleton, m, &self.rs, self.boundary_connected, self.limit)?;
        let rows: Vec<SparseVec> = rels
            .par_iter()
            .filter_map(|r| {
                let cm = canon_relation(r);
                if cm.is_empty() {
                    return None;
                }
                let mut pairs = Vec::with_capacity(cm.len());
                for (id, c) in cm {
                    pairs.push((*col_of.get(&id)?, c));
                }
                Some(SparseVec::from_pairs(pairs))
            })
            .collect();
        let relation_count = rows.len();
        let mut rows = rows;
        rows.sort_by(|a, b| a.lead().cmp(&b.lead()).then(a.len().cmp(&b.len())));
        let echelon = echelon_from_rows(rows);
        let basis = cols.iter().enumerate().filter(|(k, _)| !echelon.is_pivot(*k as u32)).map(|(_, &id)| id).collect();
        Ok(DegreeBlock { degree: m, cols, col_of, echelon, basis, relation_count })
    }

    pub fn dim(&self, m: usize) -> Result<usize, SpaceError> {
        Ok(self.block(m)?.basis.len())
    }

    /// Coordinates of the class of `v` over the basis diagrams, all degrees up to the cap.
    pub fn reduce(&self, v: &FormalSum) -> Result<Vec<(DiagId, Q)>, SpaceError> {
        if v.skeleton != self.skeleton {
            return Err(SpaceError::Unsupported(format!("sum on {} reduced in space on {}", v.skeleton, self.skeleton)));
        }
        let mut by_deg: BTreeMap<usize, Vec<(DiagId, Q)>> = BTreeMap::new();
        for (id, c) in v.terms() {
            let d = diagram(id);
            if d.degree() > self.cap {
                continue;
            }
            by_deg.entry(d.degree()).or_default().push((id, c.clone()));
        }
        let mut out = Vec::new();
        for (m, terms) in by_deg {
            let b = self.block(m)?;
            let mut pairs = Vec::with_capacity(terms.len());
            for (id, c) in terms {
                let col = b.col_of.get(&id).ok_or_else(|| SpaceError::Stale(format!("{} {} degree {m}", self.rs, self.skeleton)))?;
                pairs.push((*col, c));
            }
            let r = b.echelon.reduce(&SparseVec::from_pairs(pairs));
            out.extend(r.entries().iter().map(|(c, x)| (b.cols[*c as usize], x.clone())));
        }
        Ok(out)
    }

    /// The class of `v` as a formal sum over basis diagrams.
    pub fn normal_form(&self, v: &FormalSum) -> Result<FormalSum, SpaceError> {
        let mut s = FormalSum::zero(self.skeleton.clone(), self.rs.directed(), self.cap.min(v.cap));
        for (id, c) in self.reduce(v)? {
            s.add_id(id, &c);
        }
        Ok(s)
    }

    pub fn is_zero(&self, v: &FormalSum) -> Result<bool, SpaceError> {
        Ok(self.reduce(v)?.is_empty())
    }

    pub fn equal(&self, a: &FormalSum, b: &FormalSum) -> Result<bool, SpaceError> {
        self.is_zero(&a.sub(b))
    }
}

/// Shared quotient spaces, keyed by skeleton and relation set; degrees are built on demand.
pub fn space(skeleton: &Skeleton, rs: &RelSet, cap: usize) -> Arc<QuotientSpace> {
    type Key = (Skeleton, RelSet);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<QuotientSpace>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (skeleton.clone(), rs.clone());
    let mut g = cache.lock().unwrap();
    if let Some(q) = g.get(&key) {
        if q.cap >= cap {
            return q.clone();
        }
    }
    let q = Arc::new(QuotientSpace::new(skeleton.clone(), cap, rs.clone()));
    g.insert(key, q.clone());
    q
}

/// Rewrites every internal vertex away by STU; the result consists of chord diagrams.
pub fn stu_to_chords(v: &FormalSum) -> Result<FormalSum, SpaceError> {
    if !v.skeleton.is_one_dimensional() {
        return Err(SpaceError::Unsupported("stu_to_chords needs a one-dimensional skeleton".into()));
    }
    let mut memo: HashMap<DiagId, FormalSum> = HashMap::new();
    let mut out = v.like();
    for (id, c) in v.terms() {
        out = out.axpy(c, &chords_of(id, v, &mut memo)?);
    }
    Ok(out)
}

fn chords_of(id: DiagId, proto: &FormalSum, memo: &mut HashMap<DiagId, FormalSum>) -> Result<FormalSum, SpaceError> {
    if let Some(s) = memo.get(&id) {
        return Ok(s.clone());
    }
    let d = diagram(id);
    let res = if d.n_internal() == 0 {
        FormalSum::from_id(id, Q::one(), proto.cap)
    } else {
        if !d.is_boundary_connected() {
            return Err(SpaceError::NotBoundaryConnected);
        }
        let leg = (0..d.n_legs()).find(|&l| ops::leg_vertex(&d, l).is_some()).ok_or(SpaceError::NotBoundaryConnected)?;
        let (t, u) = ops::stu_expand(&d, leg).unwrap();
        let mut acc = proto.like();
        for (e, k) in [(t, Q::one()), (u, -Q::one())] {
            if let Some((eid, s)) = canon_id(&e) {
                let sub = chords_of(eid, proto, memo)?;
                acc = acc.axpy(&(if s > 0 { k } else { -k }), &sub);
            }
        }
        acc
    };
    memo.insert(id, res.clone());
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_dims_small() {
        let q = QuotientSpace::new(Skeleton::circle(), 3, RelSet::A);
        let dims: Vec<usize> = (0..=3).map(|m| q.dim(m).unwrap()).collect();
        assert_eq!(dims, vec![1, 1, 2, 3]);
        let c = QuotientSpace::new(Skeleton::circle(), 3, RelSet::Achord);
        let dims: Vec<usize> = (0..=3).map(|m| c.dim(m).unwrap()).collect();
        assert_eq!(dims, vec![1, 1, 2, 3]);
    }

    #[test]
    fn relations_reduce_to_zero() {
        for rs in [RelSet::A, RelSet::Aarrow] {
            let s = Skeleton::intervals(1);
            let q = QuotientSpace::new(s.clone(), 2, rs.clone());
            for m in 0..=2 {
                for r in generate_relations(&s, m, &rs, true, DEFAULT_LIMIT).unwrap() {
                    let mut f = FormalSum::zero(s.clone(), rs.directed(), 2);
                    for (d, c) in &r {
                        f.add_raw(d, c);
                    }
                    assert!(q.is_zero(&f).unwrap());
                }
            }
        }
    }
}
