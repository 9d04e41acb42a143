//! Horizontal chord diagrams on n strands, the infinitesimal braid relations, and a
//! degree-by-degree rational solver for even associators with `R = exp(t12 / 2)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{Parts, Skeleton};
use crate::linalg::{echelon_from_rows, fmt_q, parse_q, q, qi, solve_affine, RowEchelonBasis, SparseVec, Q};
use crate::sum::FormalSum;

/// A chord between strands `i < j` (0-based).
pub type Gen = (u8, u8);
pub type Word = Vec<Gen>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HorError {
    #[error("strand counts differ: {0} and {1}")]
    Strands(usize, usize),
    #[error("element is not a perturbation of the identity")]
    NotUnipotent,
    #[error("associator equations are inconsistent at degree {0}")]
    Inconsistent(usize),
    #[error("post-check failed: {0}")]
    PostCheck(String),
    #[error("degree cap {0} exceeds the guard {1}")]
    Guard(usize, usize),
    #[error("line {0}: {1}")]
    Parse(usize, String),
}

fn chord(i: usize, j: usize) -> Gen {
    assert!(i != j, "chord needs two distinct strands");
    (i.min(j) as u8, i.max(j) as u8)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorElement {
    pub n: usize,
    pub cap: usize,
    pub terms: BTreeMap<Word, Q>,
}

impl HorElement {
    pub fn zero(n: usize, cap: usize) -> Self {
        HorElement { n, cap, terms: BTreeMap::new() }
    }

    pub fn one(n: usize, cap: usize) -> Self {
        Self::word(n, cap, Vec::new(), Q::one())
    }

    pub fn word(n: usize, cap: usize, w: Word, c: Q) -> Self {
        let mut x = Self::zero(n, cap);
        x.add_term(w, c);
        x
    }

    /// The generator `t^{ij}` (0-based strands).
    pub fn t(n: usize, cap: usize, i: usize, j: usize) -> Self {
        Self::word(n, cap, vec![chord(i, j)], Q::one())
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() || w.len() > self.cap {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        s.cap = s.cap.min(o.cap);
        s.terms.retain(|w, _| w.len() <= s.cap);
        for (w, c) in &o.terms {
            s.add_term(w.clone(), c.clone());
        }
        s
    }

    pub fn scale(&self, k: &Q) -> Self {
        let mut s = Self::zero(self.n, self.cap);
        for (w, c) in &self.terms {
            s.add_term(w.clone(), c * k);
        }
        s
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "strand counts differ");
        let mut s = Self::zero(self.n, self.cap.min(o.cap));
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                if a.len() + b.len() <= s.cap {
                    s.add_term([a.as_slice(), b.as_slice()].concat(), ca * cb);
                }
            }
        }
        s
    }

    pub fn constant(&self) -> Q {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Q::zero)
    }

    pub fn degree_part(&self, d: usize) -> Self {
        let mut s = Self::zero(self.n, self.cap);
        for (w, c) in &self.terms {
            if w.len() == d {
                s.add_term(w.clone(), c.clone());
            }
        }
        s
    }

    pub fn with_cap(&self, cap: usize) -> Self {
        let mut s = Self::zero(self.n, cap);
        for (w, c) in &self.terms {
            s.add_term(w.clone(), c.clone());
        }
        s
    }

    /// Places strand k of `self` at strand `slots[k]` of an `n`-strand element.
    pub fn relabel(&self, slots: &[usize], n: usize) -> Self {
        assert_eq!(slots.len(), self.n);
        let mut s = Self::zero(n, self.cap);
        for (w, c) in &self.terms {
            s.add_term(w.iter().map(|&(a, b)| chord(slots[a as usize], slots[b as usize])).collect(), c.clone());
        }
        s
    }

    /// Cabling of strand `k` (0-based) into strands `k, k+1`.
    pub fn delta(&self, k: usize) -> Self {
        let mut s = Self::zero(self.n + 1, self.cap);
        let sh = |i: u8| -> Vec<usize> {
            let i = i as usize;
            match i.cmp(&k) {
                std::cmp::Ordering::Less => vec![i],
                std::cmp::Ordering::Equal => vec![k, k + 1],
                std::cmp::Ordering::Greater => vec![i + 1],
            }
        };
        for (w, c) in &self.terms {
            let mut words: Vec<Word> = vec![Vec::new()];
            for &(a, b) in w {
                let mut next = Vec::new();
                for x in sh(a) {
                    for y in sh(b) {
                        for p in &words {
                            let mut v = p.clone();
                            v.push(chord(x, y));
                            next.push(v);
                        }
                    }
                }
                words = next;
            }
            for v in words {
                s.add_term(v, c.clone());
            }
        }
        s
    }

    /// Removal of strand `k`: words touching it vanish.
    pub fn epsilon(&self, k: usize) -> Self {
        let mut s = Self::zero(self.n - 1, self.cap);
        let sh = |i: u8| if (i as usize) > k { i - 1 } else { i };
        for (w, c) in &self.terms {
            if w.iter().any(|&(a, b)| a as usize == k || b as usize == k) {
                continue;
            }
            s.add_term(w.iter().map(|&(a, b)| (sh(a), sh(b))).collect(), c.clone());
        }
        s
    }

    fn unipotent_part(&self) -> Result<Self, HorError> {
        if self.constant() != Q::one() {
            return Err(HorError::NotUnipotent);
        }
        Ok(self.sub(&Self::one(self.n, self.cap)))
    }

    pub fn exp(&self) -> Result<Self, HorError> {
        if !self.constant().is_zero() {
            return Err(HorError::NotUnipotent);
        }
        let mut out = Self::one(self.n, self.cap);
        let mut p = Self::one(self.n, self.cap);
        for k in 1..=self.cap {
            p = p.mul(self).scale(&q(1, k as i64));
            out = out.add(&p);
        }
        Ok(out)
    }

    pub fn log(&self) -> Result<Self, HorError> {
        let y = self.unipotent_part()?;
        let mut out = Self::zero(self.n, self.cap);
        let mut p = Self::one(self.n, self.cap);
        for k in 1..=self.cap {
            p = p.mul(&y);
            let sgn = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(&p.scale(&q(sgn, k as i64)));
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Self, HorError> {
        let y = self.unipotent_part()?.scale(&-Q::one());
        let mut out = Self::one(self.n, self.cap);
        let mut p = Self::one(self.n, self.cap);
        for _ in 1..=self.cap {
            p = p.mul(&y);
            out = out.add(&p);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut lines = Vec::new();
        for (w, c) in &self.terms {
            lines.push(format!("{}\t{}\t{}", w.len(), word_text(w), fmt_q(c)));
        }
        lines.join("\n")
    }
}

pub fn word_text(w: &[Gen]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|(a, b)| format!("t{}{}", a + 1, b + 1)).collect::<Vec<_>>().join(" ")
}

fn parse_word(s: &str) -> Option<Word> {
    if s == "1" {
        return Some(Vec::new());
    }
    s.split_whitespace()
        .map(|t| {
            let d: Vec<u32> = t.strip_prefix('t')?.chars().map(|c| c.to_digit(10)).collect::<Option<_>>()?;
            match d.as_slice() {
                [a, b] if a != b && *a > 0 && *b > 0 => Some(chord(*a as usize - 1, *b as usize - 1)),
                _ => None,
            }
        })
        .collect()
}

/// Parses the table written by [`HorElement::to_text`] (`degree<TAB>word<TAB>coeff`).
pub fn parse_hor(text: &str, n: usize, cap: usize) -> Result<HorElement, HorError> {
    let mut x = HorElement::zero(n, cap);
    for (ln, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split('\t').collect();
        let err = |m: &str| HorError::Parse(ln + 1, m.to_string());
        if f.len() != 3 {
            return Err(err("expected degree, word and coefficient separated by tabs"));
        }
        let w = parse_word(f[1]).ok_or_else(|| err("bad word"))?;
        if w.iter().any(|&(_, b)| b as usize >= n) {
            return Err(err("strand out of range"));
        }
        if f[0].parse::<usize>().ok() != Some(w.len()) {
            return Err(err("degree does not match word length"));
        }
        x.add_term(w, parse_q(f[2]).ok_or_else(|| err("bad coefficient"))?);
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// The quotient by the infinitesimal braid relations

pub struct HorBlock {
    pub n: usize,
    pub degree: usize,
    gens: Vec<Gen>,
    echelon: RowEchelonBasis,
    /// Basis words (non-pivot columns), in column order.
    pub basis: Vec<Word>,
    basis_index: HashMap<u32, usize>,
}

fn generators(n: usize) -> Vec<Gen> {
    let mut g = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            g.push((i as u8, j as u8));
        }
    }
    g
}

/// Degree-2 relators: `[t^{ij}, t^{kl}]` for disjoint pairs and `[t^{jk}, t^{ij} + t^{ik}]`.
pub fn relators(n: usize) -> Vec<Vec<(Word, Q)>> {
    let gens = generators(n);
    let comm = |a: Vec<(Gen, Q)>, b: Vec<(Gen, Q)>| -> Vec<(Word, Q)> {
        let mut out = Vec::new();
        for (x, cx) in &a {
            for (y, cy) in &b {
                out.push((vec![*x, *y], cx * cy));
                out.push((vec![*y, *x], -(cx * cy)));
            }
        }
        out
    };
    let mut rels = Vec::new();
    for (a, &(i, j)) in gens.iter().enumerate() {
        for &(k, l) in &gens[a + 1..] {
            if i != k && i != l && j != k && j != l {
                rels.push(comm(vec![((i, j), Q::one())], vec![((k, l), Q::one())]));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in j + 1..n {
                if i == j || i == k {
                    continue;
                }
                rels.push(comm(vec![(chord(j, k), Q::one())], vec![(chord(i, j), Q::one()), (chord(i, k), Q::one())]));
            }
        }
    }
    rels
}

impl HorBlock {
    fn col(&self, w: &[Gen]) -> u32 {
        let m = self.gens.len() as u32;
        w.iter().fold(0u32, |acc, g| acc * m + self.gens.iter().position(|x| x == g).unwrap() as u32)
    }

    fn word_of(&self, mut c: u32) -> Word {
        let m = self.gens.len() as u32;
        let mut w = vec![(0, 0); self.degree];
        for k in (0..self.degree).rev() {
            w[k] = self.gens[(c % m) as usize];
            c /= m;
        }
        w
    }

    fn build(n: usize, d: usize) -> Self {
        let gens = generators(n);
        let m = gens.len();
        let rels = relators(n);
        let mut blk = HorBlock { n, degree: d, gens, echelon: RowEchelonBasis::new(), basis: Vec::new(), basis_index: HashMap::new() };
        let mut rows: Vec<SparseVec> = Vec::new();
        if d >= 2 {
            let total = m.pow(d as u32 - 2);
            for split in 0..=d - 2 {
                let chunk: Vec<SparseVec> = (0..total as u32)
                    .into_par_iter()
                    .flat_map_iter(|ctx| {
                        let outer = blk_word(&blk.gens, ctx, d - 2);
                        let (pre, post) = outer.split_at(split);
                        rels.iter()
                            .map(|r| {
                                SparseVec::from_pairs(r.iter().map(|(w, c)| {
                                    let full = [pre, w.as_slice(), post].concat();
                                    (blk.col(&full), c.clone())
                                }))
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect();
                rows.extend(chunk);
            }
        }
        rows.retain(|r| !r.is_zero());
        blk.echelon = echelon_from_rows(rows);
        let ncols = m.pow(d as u32) as u32;
        for c in 0..ncols {
            if !blk.echelon.is_pivot(c) {
                blk.basis_index.insert(c, blk.basis.len());
                blk.basis.push(blk.word_of(c));
            }
        }
        blk
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates over `basis` of a homogeneous degree-`degree` part.
    pub fn coords(&self, x: &HorElement) -> SparseVec {
        let v = SparseVec::from_pairs(x.terms.iter().filter(|(w, _)| w.len() == self.degree).map(|(w, c)| (self.col(w), c.clone())));
        let r = self.echelon.reduce(&v);
        SparseVec::from_pairs(r.entries().iter().map(|(c, x)| (self.basis_index[c] as u32, x.clone())))
    }
}

fn blk_word(gens: &[Gen], mut c: u32, len: usize) -> Word {
    let m = gens.len() as u32;
    let mut w = vec![(0, 0); len];
    for k in (0..len).rev() {
        w[k] = gens[(c % m) as usize];
        c /= m;
    }
    w
}

/// Shared quotient blocks of the horizontal algebra on `n` strands.
pub fn hor_block(n: usize, d: usize) -> Arc<HorBlock> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<HorBlock>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&(n, d)) {
        return b.clone();
    }
    let b = Arc::new(HorBlock::build(n, d));
    cache.lock().unwrap().insert((n, d), b.clone());
    b
}

/// Coordinates per degree in the quotient bases.
pub fn reduce_hor(x: &HorElement) -> Vec<(usize, SparseVec)> {
    let maxd = x.terms.keys().map(|w| w.len()).max().unwrap_or(0);
    (0..=maxd)
        .filter_map(|d| {
            let c = hor_block(x.n, d).coords(x);
            (!c.is_zero()).then_some((d, c))
        })
        .collect()
}

pub fn hor_is_zero(x: &HorElement) -> bool {
    reduce_hor(x).is_empty()
}

/// The normal form: each degree rewritten over the basis words.
pub fn hor_normal_form(x: &HorElement) -> HorElement {
    let mut s = HorElement::zero(x.n, x.cap);
    for (d, c) in reduce_hor(x) {
        let b = hor_block(x.n, d);
        for (i, v) in c.entries() {
            s.add_term(b.basis[*i as usize].clone(), v.clone());
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Associator equations

pub fn r_kz_hor(cap: usize) -> HorElement {
    HorElement::t(2, cap, 0, 1).scale(&q(1, 2)).exp().unwrap()
}

fn perm3(x: &HorElement, s: [usize; 3]) -> HorElement {
    x.relabel(&[s[0] - 1, s[1] - 1, s[2] - 1], 3)
}

fn prod(xs: &[&HorElement]) -> HorElement {
    let mut it = xs.iter();
    let first = (*it.next().unwrap()).clone();
    it.fold(first, |a, b| a.mul(b))
}

/// `Δ_3(Φ) Δ_1(Φ) − Φ^{234} Δ_2(Φ) Φ^{123}` on four strands.
pub fn pentagon_residual(phi: &HorElement) -> HorElement {
    let lhs = phi.delta(2).mul(&phi.delta(0));
    let rhs = prod(&[&phi.relabel(&[1, 2, 3], 4), &phi.delta(1), &phi.relabel(&[0, 1, 2], 4)]);
    lhs.sub(&rhs)
}

/// The two hexagon residuals on three strands.
pub fn hexagon_residuals(phi: &HorElement, r: &HorElement) -> Result<(HorElement, HorElement), HorError> {
    let r12 = r.relabel(&[0, 1], 3);
    let r13 = r.relabel(&[0, 2], 3);
    let r23 = r.relabel(&[1, 2], 3);
    let h1 = r.delta(1).sub(&prod(&[&perm3(phi, [2, 3, 1]).inverse()?, &r13, &perm3(phi, [2, 1, 3]), &r12, &phi.inverse()?]));
    let h2 = r.delta(0).sub(&prod(&[&perm3(phi, [3, 1, 2]), &r13, &perm3(phi, [1, 3, 2]).inverse()?, &r23, phi]));
    Ok((h1, h2))
}

pub fn qqybe_residual(phi: &HorElement, r: &HorElement) -> Result<HorElement, HorError> {
    let r12 = r.relabel(&[0, 1], 3);
    let r13 = r.relabel(&[0, 2], 3);
    let r23 = r.relabel(&[1, 2], 3);
    let lhs = prod(&[&r12, &perm3(phi, [3, 1, 2]), &r13, &perm3(phi, [1, 3, 2]).inverse()?, &r23, phi]);
    let rhs = prod(&[&perm3(phi, [3, 2, 1]), &r23, &perm3(phi, [2, 3, 1]).inverse()?, &r13, &perm3(phi, [2, 1, 3]), &r12]);
    Ok(lhs.sub(&rhs))
}

/// `Φ^{-1} − Φ^{321}`.
pub fn inverse_symmetry_residual(phi: &HorElement) -> Result<HorElement, HorError> {
    Ok(phi.inverse()?.sub(&perm3(phi, [3, 2, 1])))
}

#[derive(Clone, Debug)]
pub struct Associator {
    pub phi: HorElement,
    pub r: HorElement,
    pub cap: usize,
}

pub const ASSOC_GUARD: usize = 4;

/// Words of length `d` in `t12` and `t23`; they span a free subalgebra complementary to the
/// central element `t12 + t13 + t23`.
fn ab_words(d: usize) -> Vec<Word> {
    (0..1u32 << d).map(|m| (0..d).map(|k| if m >> (d - 1 - k) & 1 == 0 { (0, 1) } else { (1, 2) }).collect()).collect()
}

/// Solves for an even rational associator through `cap`, degree by degree.
/// At each even degree the unknown part is a combination of words in `t12` and `t23`, fixed by
/// the pentagon, both hexagons and `Φ^{-1} = Φ^{321}` with free coordinates set to zero.
/// Odd degrees are zero.
pub fn solve_associator(cap: usize, guard: usize) -> Result<Associator, HorError> {
    if cap > guard {
        return Err(HorError::Guard(cap, guard));
    }
    let r = r_kz_hor(cap);
    let mut phi = HorElement::one(3, cap);
    for d in 1..=cap {
        let blk3 = hor_block(3, d);
        let blk4 = hor_block(4, d);
        // constant part: residuals of the current truncation at degree d
        let cur = phi.with_cap(d);
        let rd = r.with_cap(d);
        let (h1, h2) = hexagon_residuals(&cur, &rd)?;
        let consts =
            [blk4.coords(&pentagon_residual(&cur)), blk3.coords(&h1), blk3.coords(&h2), blk3.coords(&inverse_symmetry_residual(&cur)?)];
        if d % 2 == 1 {
            if consts.iter().any(|c| !c.is_zero()) {
                return Err(HorError::Inconsistent(d));
            }
            continue;
        }
        // linear parts, one column per basis word of the unknown
        let lin = |x: &HorElement| -> [SparseVec; 4] {
            let pent = x.delta(2).add(&x.delta(0)).sub(&x.relabel(&[1, 2, 3], 4)).sub(&x.delta(1)).sub(&x.relabel(&[0, 1, 2], 4));
            let hex1 = perm3(x, [2, 3, 1]).sub(&perm3(x, [2, 1, 3])).add(x);
            let hex2 = perm3(x, [1, 3, 2]).sub(&perm3(x, [3, 1, 2])).sub(x);
            let sym = x.scale(&qi(-1)).sub(&perm3(x, [3, 2, 1]));
            [blk4.coords(&pent), blk3.coords(&hex1), blk3.coords(&hex2), blk3.coords(&sym)]
        };
        let unknowns = ab_words(d);
        let cols: Vec<[SparseVec; 4]> = unknowns.iter().map(|w| lin(&HorElement::word(3, d, w.clone(), Q::one()))).collect();
        let mut rows: Vec<SparseVec> = Vec::new();
        let mut rhs: Vec<(u32, Q)> = Vec::new();
        for (e, cst) in consts.iter().enumerate() {
            let width = if e == 0 { blk4.dim() } else { blk3.dim() };
            for comp in 0..width as u32 {
                let row = SparseVec::from_pairs(cols.iter().enumerate().map(|(v, c)| (v as u32, c[e].get(comp))));
                let b = -cst.get(comp);
                if row.is_zero() && b.is_zero() {
                    continue;
                }
                rhs.push((rows.len() as u32, b));
                rows.push(row);
            }
        }
        let sol = solve_affine(&rows, &SparseVec::from_pairs(rhs)).map_err(|_| HorError::Inconsistent(d))?;
        for (v, c) in sol.entries() {
            phi.add_term(unknowns[*v as usize].clone(), c.clone());
        }
    }
    let a = Associator { phi, r, cap };
    a.verify()?;
    Ok(a)
}

impl Associator {
    /// Pentagon, hexagons, QQYBE, non-degeneracy and inverse symmetry, all exact through the cap.
    pub fn verify(&self) -> Result<(), HorError> {
        let fail = |m: &str| Err(HorError::PostCheck(m.into()));
        if !hor_is_zero(&pentagon_residual(&self.phi)) {
            return fail("pentagon");
        }
        let (h1, h2) = hexagon_residuals(&self.phi, &self.r)?;
        if !hor_is_zero(&h1) || !hor_is_zero(&h2) {
            return fail("hexagon");
        }
        if !hor_is_zero(&qqybe_residual(&self.phi, &self.r)?) {
            return fail("quasi Yang-Baxter");
        }
        for k in 0..3 {
            if self.phi.epsilon(k) != HorElement::one(2, self.cap) {
                return fail("non-degeneracy");
            }
        }
        if !hor_is_zero(&inverse_symmetry_residual(&self.phi)?) {
            return fail("inverse symmetry");
        }
        Ok(())
    }

    /// Reads a table written by [`Associator::to_text`] and re-verifies it at `cap`.
    pub fn from_text(text: &str, cap: usize) -> Result<Self, HorError> {
        let a = Associator { phi: parse_hor(text, 3, cap)?, r: r_kz_hor(cap), cap };
        a.verify()?;
        Ok(a)
    }

    pub fn to_text(&self) -> String {
        let nf = hor_normal_form(&self.phi);
        format!("# associator on 3 strands, cap {}\n# degree\tword\tcoefficient\n{}\n", self.cap, nf.to_text())
    }
}

/// Chord diagram on `n` intervals: the word's chords stacked bottom to top.
pub fn embed_hor(x: &HorElement) -> FormalSum {
    let mut s = FormalSum::zero(Skeleton::intervals(x.n), false, x.cap);
    for (w, c) in &x.terms {
        let mut p = Parts::new(Skeleton::intervals(x.n), false);
        for (k, &(a, b)) in w.iter().enumerate() {
            let (u, v) = (2 * k as u32, 2 * k as u32 + 1);
            p.comps[a as usize].push(u);
            p.comps[b as usize].push(v);
            p.edges.push((u, v));
        }
        s.add_raw(&p.build().expect("horizontal chord diagram"), c);
    }
    s
}
