//! Metrized Lie algebras, Manin triples, and the evaluation of diagrams into tensor
//! powers of enveloping algebras.
//!
//! Chords carry the inverse metric, internal vertices carry `([e_a, e_b], e_c)` in their
//! cyclic order, and the legs along each strand multiply in order. For Manin triples the
//! head end of an arc carries a `g+` index and the tail end the dual `g-` index.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::diagram::{Comp, Diagram};
use crate::linalg::{fmt_q, parse_q, q, qi, Q};
use crate::maps;
use crate::sum::FormalSum;

pub type Matrix = Vec<Vec<Q>>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("bracket is not antisymmetric at ({0}, {1})")]
    Antisymmetry(usize, usize),
    #[error("Jacobi identity fails at ({0}, {1}, {2})")]
    Jacobi(usize, usize, usize),
    #[error("metric is not symmetric at ({0}, {1})")]
    MetricSymmetry(usize, usize),
    #[error("metric is not invariant at ({0}, {1}, {2})")]
    Invariance(usize, usize, usize),
    #[error("metric is singular")]
    Singular,
    #[error("cobracket is not antisymmetric at {0}")]
    CoAntisymmetry(usize),
    #[error("cocycle identity fails at ({0}, {1}, {2})")]
    Cocycle(usize, usize, usize),
    #[error("representation `{0}` does not respect the bracket at ({1}, {2})")]
    Rep(String, usize, usize),
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("{0}")]
    Shape(String),
}

/// Structure constants: `bracket[i][j]` lists `(k, c)` with `[e_i, e_j] = Σ c e_k`.
pub type Bracket = Vec<Vec<Vec<(usize, Q)>>>;

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub names: Vec<String>,
    pub bracket: Bracket,
    pub metric: Matrix,
    pub inv_metric: Matrix,
    /// `f[a][b][c] = ([e_a, e_b], e_c)`.
    f: Vec<Q>,
    pub reps: BTreeMap<String, Vec<Matrix>>,
}

fn dense_bracket(n: usize, pairs: &[(usize, usize, usize, Q)]) -> Result<Bracket, LieError> {
    let mut dense: Vec<Vec<Vec<Q>>> = vec![vec![vec![Q::zero(); n]; n]; n];
    let mut given = vec![vec![false; n]; n];
    for (i, j, k, c) in pairs {
        dense[*i][*j][*k] += c;
        given[*i][*j] = true;
    }
    for i in 0..n {
        for j in 0..n {
            if given[i][j] && given[j][i] {
                if (0..n).any(|k| dense[i][j][k] != -dense[j][i][k].clone()) {
                    return Err(LieError::Antisymmetry(i, j));
                }
            } else if given[i][j] {
                for k in 0..n {
                    dense[j][i][k] = -dense[i][j][k].clone();
                }
            }
        }
        if (0..n).any(|k| !dense[i][i][k].is_zero()) {
            return Err(LieError::Antisymmetry(i, i));
        }
    }
    Ok(dense
        .into_iter()
        .map(|row| row.into_iter().map(|v| v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()).collect())
        .collect())
}

pub fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let k = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x -= &k * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Q::zero(); m]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

impl LieAlgebra {
    /// Validates antisymmetry, Jacobi, metric symmetry, invariance and non-degeneracy.
    pub fn new(names: Vec<String>, bracket: Bracket, metric: Matrix) -> Result<Self, LieError> {
        let n = names.len();
        if bracket.len() != n || metric.len() != n || metric.iter().any(|r| r.len() != n) {
            return Err(LieError::Shape(format!("structure data does not match dimension {n}")));
        }
        let br = |i: usize, j: usize| -> Vec<Q> {
            let mut v = vec![Q::zero(); n];
            for (k, c) in &bracket[i][j] {
                v[*k] += c;
            }
            v
        };
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (br(i, j), br(j, i));
                if a.iter().zip(&b).any(|(x, y)| *x != -y.clone()) {
                    return Err(LieError::Antisymmetry(i, j));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    // [[i,j],k] + [[j,k],i] + [[k,i],j]
                    let mut s = vec![Q::zero(); n];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (x, cx) in &bracket[a][b] {
                            for (y, cy) in &bracket[*x][c] {
                                s[*y] += cx * cy;
                            }
                        }
                    }
                    if s.iter().any(|x| !x.is_zero()) {
                        return Err(LieError::Jacobi(i, j, k));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if metric[i][j] != metric[j][i] {
                    return Err(LieError::MetricSymmetry(i, j));
                }
            }
        }
        let mut f = vec![Q::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                for (k, c) in &bracket[a][b] {
                    for cc in 0..n {
                        if !metric[*k][cc].is_zero() {
                            f[(a * n + b) * n + cc] += c * &metric[*k][cc];
                        }
                    }
                }
            }
        }
        // invariance: ([x,y],z) = (x,[y,z]) is equivalent to cyclic symmetry of f
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if f[(a * n + b) * n + c] != f[(b * n + c) * n + a] {
                        return Err(LieError::Invariance(a, b, c));
                    }
                }
            }
        }
        let inv_metric = invert(&metric).ok_or(LieError::Singular)?;
        Ok(LieAlgebra { names, bracket, metric, inv_metric, f, reps: BTreeMap::new() })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn f(&self, a: usize, b: usize, c: usize) -> &Q {
        let n = self.dim();
        &self.f[(a * n + b) * n + c]
    }

    /// Adds a representation after checking the bracket relations.
    pub fn add_rep(&mut self, name: &str, mats: Vec<Matrix>) -> Result<(), LieError> {
        let n = self.dim();
        if mats.len() != n {
            return Err(LieError::Shape(format!("representation `{name}` needs {n} matrices")));
        }
        let d = mats[0].len();
        for i in 0..n {
            for j in 0..n {
                let ab = mat_mul(&mats[i], &mats[j]);
                let ba = mat_mul(&mats[j], &mats[i]);
                let mut rhs = vec![vec![Q::zero(); d]; d];
                for (k, c) in &self.bracket[i][j] {
                    for r in 0..d {
                        for s in 0..d {
                            rhs[r][s] += c * &mats[*k][r][s];
                        }
                    }
                }
                for r in 0..d {
                    for s in 0..d {
                        if &ab[r][s] - &ba[r][s] != rhs[r][s] {
                            return Err(LieError::Rep(name.into(), i, j));
                        }
                    }
                }
            }
        }
        self.reps.insert(name.into(), mats);
        Ok(())
    }

    /// sl2 with basis (e, f, h), metric (x, y) = Tr(xy) and the fundamental representation `fund`.
    pub fn sl2() -> Self {
        let pairs = vec![(0, 1, 2, qi(1)), (2, 0, 0, qi(2)), (2, 1, 1, qi(-2))];
        let br = dense_bracket(3, &pairs).unwrap();
        let z = Q::zero;
        let metric = vec![vec![z(), qi(1), z()], vec![qi(1), z(), z()], vec![z(), z(), qi(2)]];
        let mut g = LieAlgebra::new(vec!["e".into(), "f".into(), "h".into()], br, metric).unwrap();
        let m = |a: i64, b: i64, c: i64, d: i64| vec![vec![qi(a), qi(b)], vec![qi(c), qi(d)]];
        g.add_rep("fund", vec![m(0, 1, 0, 0), m(0, 0, 1, 0), m(1, 0, 0, -1)]).unwrap();
        g
    }
}

/// A Lie bialgebra: bracket plus cobracket `δ(x_i) = Σ c x_j ⊗ x_k`.
#[derive(Clone, Debug)]
pub struct LieBialgebra {
    pub names: Vec<String>,
    pub bracket: Bracket,
    pub cobracket: Vec<Vec<(usize, usize, Q)>>,
}

#[derive(Clone, Debug)]
pub struct ManinTriple {
    pub g: LieAlgebra,
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    /// `dual[k]` is the `g-` basis vector paired with `plus[k]` (pairing 1).
    pub dual: Vec<usize>,
    /// Optional projection onto another Lie algebra, as images of basis vectors.
    pub projection: Option<(LieAlgebra, Vec<Vec<(usize, Q)>>)>,
}

/// The double `a ⊕ a*` of a Lie bialgebra, with basis `x_1..x_n, ξ^1..ξ^n`.
pub fn build_double(a: &LieBialgebra) -> Result<ManinTriple, LieError> {
    let n = a.names.len();
    let dc = |i: usize| -> Vec<Vec<Q>> {
        let mut m = vec![vec![Q::zero(); n]; n];
        for (j, k, c) in &a.cobracket[i] {
            m[*j][*k] += c;
        }
        m
    };
    for i in 0..n {
        let m = dc(i);
        for j in 0..n {
            for k in 0..n {
                if m[j][k] != -m[k][j].clone() {
                    return Err(LieError::CoAntisymmetry(i));
                }
            }
        }
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for (k, c) in &a.bracket[i][j] {
                pairs.push((i, j, *k, c.clone()));
            }
        }
    }
    // [ξ^i, ξ^j] = Σ_k δ_k^{ij} ξ^k
    for k in 0..n {
        let m = dc(k);
        for i in 0..n {
            for j in 0..n {
                if !m[i][j].is_zero() {
                    pairs.push((n + i, n + j, n + k, m[i][j].clone()));
                }
            }
        }
    }
    // [x_i, ξ^j] = Σ_k c_{ki}^j ξ^k + Σ_k δ_i^{jk} x_k
    for i in 0..n {
        let m = dc(i);
        for j in 0..n {
            for k in 0..n {
                for (t, c) in &a.bracket[k][i] {
                    if *t == j {
                        pairs.push((i, n + j, n + k, c.clone()));
                    }
                }
                if !m[j][k].is_zero() {
                    pairs.push((i, n + j, k, m[j][k].clone()));
                }
            }
        }
    }
    let mut full: Vec<(usize, usize, usize, Q)> = Vec::new();
    let mut acc: BTreeMap<(usize, usize, usize), Q> = BTreeMap::new();
    for (i, j, k, c) in pairs {
        *acc.entry((i, j, k)).or_insert_with(Q::zero) += c;
    }
    for ((i, j, k), c) in acc {
        if i > j {
            continue;
        }
        full.push((i, j, k, c.clone()));
        full.push((j, i, k, -c));
    }
    let br = dense_bracket(2 * n, &full)?;
    let mut metric = vec![vec![Q::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        metric[i][n + i] = Q::one();
        metric[n + i][i] = Q::one();
    }
    let mut names = a.names.clone();
    names.extend(a.names.iter().map(|s| format!("{s}*")));
    let g = match LieAlgebra::new(names, br, metric) {
        Ok(g) => g,
        Err(LieError::Jacobi(i, j, k)) => return Err(LieError::Cocycle(i, j, k)),
        Err(e) => return Err(e),
    };
    Ok(ManinTriple { g, plus: (0..n).collect(), minus: (n..2 * n).collect(), dual: (n..2 * n).collect(), projection: None })
}

impl ManinTriple {
    /// The positive Borel subalgebra of sl2 as a Lie bialgebra: `[k, e] = 2e`, `δ(e) = ½ e ∧ k`.
    pub fn sl2_borel() -> LieBialgebra {
        let br = dense_bracket(2, &[(1, 0, 0, qi(2))]).unwrap();
        LieBialgebra { names: vec!["e".into(), "k".into()], bracket: br, cobracket: vec![vec![(0, 1, q(1, 2)), (1, 0, q(-1, 2))], vec![]] }
    }

    /// The double of the Borel of sl2 with its projection onto sl2: e ↦ e, k ↦ h, e* ↦ f, k* ↦ h/4.
    /// The fundamental representation of sl2 is pulled back as `fund`.
    pub fn sl2_double() -> Self {
        let mut mt = build_double(&Self::sl2_borel()).expect("Borel double");
        let sl2 = LieAlgebra::sl2();
        let proj = vec![vec![(0, qi(1))], vec![(2, qi(1))], vec![(1, qi(1))], vec![(2, q(1, 4))]];
        let fund = &sl2.reps["fund"];
        let mats: Vec<Matrix> = proj
            .iter()
            .map(|img| {
                let mut m = vec![vec![Q::zero(); 2]; 2];
                for (k, c) in img {
                    for r in 0..2 {
                        for s in 0..2 {
                            m[r][s] += c * &fund[*k][r][s];
                        }
                    }
                }
                m
            })
            .collect();
        mt.g.add_rep("fund", mats).expect("pulled back representation");
        mt.projection = Some((sl2, proj));
        mt
    }

    pub fn is_plus(&self, i: usize) -> bool {
        self.plus.contains(&i)
    }
}

// ---------------------------------------------------------------------------
// Enveloping algebra tensors

/// Words on each strand, keyed together with the ħ-degree.
pub type Key = (u32, Vec<Vec<u8>>);

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UEnvTensor {
    pub strands: usize,
    pub terms: BTreeMap<Key, Q>,
}

impl UEnvTensor {
    pub fn zero(strands: usize) -> Self {
        UEnvTensor { strands, terms: BTreeMap::new() }
    }

    pub fn unit(strands: usize) -> Self {
        let mut t = Self::zero(strands);
        t.terms.insert((0, vec![Vec::new(); strands]), Q::one());
        t
    }

    pub fn add_term(&mut self, k: Key, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (k, c) in &o.terms {
            s.add_term(k.clone(), c.clone());
        }
        s
    }

    pub fn scale(&self, x: &Q) -> Self {
        let mut s = Self::zero(self.strands);
        for (k, c) in &self.terms {
            s.add_term(k.clone(), c * x);
        }
        s
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Forgets the ħ-grading.
    pub fn flatten(&self) -> Self {
        let mut s = Self::zero(self.strands);
        for ((_, w), c) in &self.terms {
            s.add_term((0, w.clone()), c.clone());
        }
        s
    }

    pub fn display(&self, g: &LieAlgebra) -> String {
        let mut out = Vec::new();
        for ((h, ws), c) in &self.terms {
            let strands: Vec<String> =
                ws.iter()
                    .map(|w| {
                        if w.is_empty() {
                            "1".into()
                        } else {
                            w.iter().map(|&i| g.names[i as usize].clone()).collect::<Vec<_>>().join(" ")
                        }
                    })
                    .collect();
            out.push(format!("{}\thbar^{}\t{}", fmt_q(c), h, strands.join(" ⊗ ")));
        }
        out.join("\n")
    }
}

/// PBW normal ordering (ascending basis index) by the straightening rewrite, memoized.
pub struct Pbw<'a> {
    g: &'a LieAlgebra,
    memo: HashMap<Vec<u8>, Vec<(Vec<u8>, Q)>>,
}

impl<'a> Pbw<'a> {
    pub fn new(g: &'a LieAlgebra) -> Self {
        Pbw { g, memo: HashMap::new() }
    }

    pub fn normalize(&mut self, w: &[u8]) -> Vec<(Vec<u8>, Q)> {
        if let Some(r) = self.memo.get(w) {
            return r.clone();
        }
        let res = match (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
            None => vec![(w.to_vec(), Q::one())],
            Some(i) => {
                let mut acc: BTreeMap<Vec<u8>, Q> = BTreeMap::new();
                let mut sw = w.to_vec();
                sw.swap(i, i + 1);
                for (x, c) in self.normalize(&sw) {
                    *acc.entry(x).or_insert_with(Q::zero) += c;
                }
                for (k, c) in self.g.bracket[w[i] as usize][w[i + 1] as usize].clone() {
                    let mut v = w[..i].to_vec();
                    v.push(k as u8);
                    v.extend_from_slice(&w[i + 2..]);
                    for (x, d) in self.normalize(&v) {
                        *acc.entry(x).or_insert_with(Q::zero) += &c * d;
                    }
                }
                acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
            }
        };
        self.memo.insert(w.to_vec(), res.clone());
        res
    }

    pub fn normalize_tensor(&mut self, t: &UEnvTensor) -> UEnvTensor {
        let mut out = UEnvTensor::zero(t.strands);
        for ((h, ws), c) in &t.terms {
            let mut partial: Vec<(Vec<Vec<u8>>, Q)> = vec![(Vec::new(), c.clone())];
            for w in ws {
                let nf = self.normalize(w);
                let mut next = Vec::new();
                for (pre, pc) in &partial {
                    for (x, xc) in &nf {
                        let mut v = pre.clone();
                        v.push(x.clone());
                        next.push((v, pc * xc));
                    }
                }
                partial = next;
            }
            for (ws2, c2) in partial {
                out.add_term((*h, ws2), c2);
            }
        }
        out
    }

    /// Strand-wise product `a · b`, normalized.
    pub fn mul(&mut self, a: &UEnvTensor, b: &UEnvTensor) -> UEnvTensor {
        let mut raw = UEnvTensor::zero(a.strands);
        for ((ha, wa), ca) in &a.terms {
            for ((hb, wb), cb) in &b.terms {
                let ws = wa.iter().zip(wb).map(|(x, y)| [x.as_slice(), y.as_slice()].concat()).collect();
                raw.add_term((ha + hb, ws), ca * cb);
            }
        }
        self.normalize_tensor(&raw)
    }
}

/// Coproduct on strand `m`: each letter goes to one of the two copies.
pub fn coproduct(t: &UEnvTensor, m: usize) -> UEnvTensor {
    let mut out = UEnvTensor::zero(t.strands + 1);
    for ((h, ws), c) in &t.terms {
        let w = &ws[m];
        for mask in 0u64..(1u64 << w.len()) {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (i, &x) in w.iter().enumerate() {
                if mask >> i & 1 == 0 {
                    a.push(x)
                } else {
                    b.push(x)
                }
            }
            let mut nw = ws.clone();
            nw[m] = a;
            nw.insert(m + 1, b);
            out.add_term((*h, nw), c.clone());
        }
    }
    out
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("evaluation needs intervals or circles, found {0}")]
    Skeleton(String),
    #[error("directed diagram evaluated without a Manin triple")]
    Directed,
    #[error("representation `{0}` missing")]
    NoRep(String),
    #[error("{0} representations given for {1} strands")]
    RepCount(usize, usize),
}

/// Arcs as (port, port, candidate index pairs with weights).
fn arc_choices(d: &Diagram, g: &LieAlgebra, mt: Option<&ManinTriple>) -> Vec<(usize, usize, Vec<(u8, u8, Q)>)> {
    let n = g.dim();
    let mut out = Vec::new();
    for p in 0..d.n_ports() {
        let qp = d.partner[p] as usize;
        let (a, b) = match mt {
            // store arcs as (head, tail)
            Some(_) => {
                if !d.is_head(p) {
                    continue;
                }
                (p, qp)
            }
            None => {
                if qp < p {
                    continue;
                }
                (p, qp)
            }
        };
        let mut ch = Vec::new();
        match mt {
            Some(m) => {
                for (k, &i) in m.plus.iter().enumerate() {
                    ch.push((i as u8, m.dual[k] as u8, Q::one()));
                }
            }
            None => {
                for i in 0..n {
                    for j in 0..n {
                        if !g.inv_metric[i][j].is_zero() {
                            ch.push((i as u8, j as u8, g.inv_metric[i][j].clone()));
                        }
                    }
                }
            }
        }
        out.push((a, b, ch));
    }
    out
}

fn contract(d: &Diagram, g: &LieAlgebra, mt: Option<&ManinTriple>) -> Vec<(Vec<Vec<u8>>, Q)> {
    let arcs = arc_choices(d, g, mt);
    let np = d.n_ports();
    let l = d.n_legs();
    // order arcs so that vertices complete early
    let mut order: Vec<usize> = Vec::new();
    let mut used = vec![false; arcs.len()];
    let port_arc: HashMap<usize, usize> = arcs.iter().enumerate().flat_map(|(k, a)| [(a.0, k), (a.1, k)]).collect();
    for j in 0..d.n_internal() {
        for p in d.vertex_ports(j) {
            let k = port_arc[&p];
            if !used[k] {
                used[k] = true;
                order.push(k);
            }
        }
    }
    for k in 0..arcs.len() {
        if !used[k] {
            order.push(k);
        }
    }
    // vertex completion checks after each arc
    let mut pos_of = vec![0usize; arcs.len()];
    for (i, &k) in order.iter().enumerate() {
        pos_of[k] = i;
    }
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    for j in 0..d.n_internal() {
        let last = d.vertex_ports(j).iter().map(|p| pos_of[port_arc[p]]).max().unwrap();
        checks[last].push(j);
    }
    let mut idx = vec![0u8; np];
    let mut out: HashMap<Vec<Vec<u8>>, Q> = HashMap::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        w: Q,
        order: &[usize],
        arcs: &[(usize, usize, Vec<(u8, u8, Q)>)],
        checks: &[Vec<usize>],
        idx: &mut [u8],
        d: &Diagram,
        g: &LieAlgebra,
        l: usize,
        out: &mut HashMap<Vec<Vec<u8>>, Q>,
    ) {
        if i == order.len() {
            let ws: Vec<Vec<u8>> = d.comps.iter().map(|c| c.iter().map(|&p| idx[p as usize]).collect()).collect();
            let e = out.entry(ws).or_insert_with(Q::zero);
            *e += w;
            let _ = l;
            return;
        }
        let (a, b, ch) = &arcs[order[i]];
        for (x, y, c) in ch {
            idx[*a] = *x;
            idx[*b] = *y;
            let mut wt = &w * c;
            for &j in &checks[i] {
                let [p1, p2, p3] = d.vertex_ports(j);
                wt *= g.f(idx[p1] as usize, idx[p2] as usize, idx[p3] as usize);
                if wt.is_zero() {
                    break;
                }
            }
            if !wt.is_zero() {
                rec(i + 1, wt, order, arcs, checks, idx, d, g, l, out);
            }
        }
    }
    rec(0, Q::one(), &order, &arcs, &checks, &mut idx, d, g, l, &mut out);
    out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn eval_sum(v: &FormalSum, g: &LieAlgebra, mt: Option<&ManinTriple>) -> Result<UEnvTensor, EvalError> {
    if v.directed && mt.is_none() {
        return Err(EvalError::Directed);
    }
    if v.skeleton.0.iter().any(|c| matches!(c, Comp::Color(_))) {
        // colors evaluate through symmetrization
        let mut w = v.clone();
        for (m, c) in v.skeleton.0.iter().enumerate() {
            if matches!(c, Comp::Color(_)) {
                w = maps::chi(&w, m).map_err(|e| EvalError::Skeleton(e.to_string()))?;
            }
        }
        return eval_sum(&w, g, mt);
    }
    let mut raw = UEnvTensor::zero(v.skeleton.len());
    for (id, c) in v.terms() {
        let d = crate::diagram::diagram(id);
        let deg = d.degree() as u32;
        for (ws, k) in contract(&d, g, mt) {
            raw.add_term((deg, ws), c * &k);
        }
    }
    Ok(Pbw::new(g).normalize_tensor(&raw))
}

/// T_g of a formal sum of undirected diagrams, PBW-normalized and ħ-graded.
/// Circles are cut at their canonical starting leg; such results are only meaningful under a trace.
pub fn tg_eval(v: &FormalSum, g: &LieAlgebra) -> Result<UEnvTensor, EvalError> {
    eval_sum(v, g, None)
}

/// The Manin-triple evaluation of directed diagrams.
pub fn tar_eval(v: &FormalSum, mt: &ManinTriple) -> Result<UEnvTensor, EvalError> {
    eval_sum(v, &mt.g, Some(mt))
}

/// Pushes a tensor through a linear map of generators into another Lie algebra, normalized there.
pub fn project(t: &UEnvTensor, target: &LieAlgebra, images: &[Vec<(usize, Q)>]) -> UEnvTensor {
    let mut raw = UEnvTensor::zero(t.strands);
    for ((h, ws), c) in &t.terms {
        let mut partial: Vec<(Vec<Vec<u8>>, Q)> = vec![(Vec::new(), c.clone())];
        for w in ws {
            let mut words: Vec<(Vec<u8>, Q)> = vec![(Vec::new(), Q::one())];
            for &x in w {
                let mut next = Vec::new();
                for (pre, pc) in &words {
                    for (k, kc) in &images[x as usize] {
                        let mut v = pre.clone();
                        v.push(*k as u8);
                        next.push((v, pc * kc));
                    }
                }
                words = next;
            }
            let mut next = Vec::new();
            for (pre, pc) in &partial {
                for (x, xc) in &words {
                    let mut v = pre.clone();
                    v.push(x.clone());
                    next.push((v, pc * xc));
                }
            }
            partial = next;
        }
        for (ws2, c2) in partial {
            raw.add_term((*h, ws2), c2);
        }
    }
    Pbw::new(target).normalize_tensor(&raw)
}

/// Traces over representations, one per strand, as a power series in ħ (index = degree).
pub fn trace_on_rep(t: &UEnvTensor, g: &LieAlgebra, reps: &[&str]) -> Result<Vec<Q>, EvalError> {
    if reps.len() != t.strands {
        return Err(EvalError::RepCount(reps.len(), t.strands));
    }
    let mats: Vec<&Vec<Matrix>> =
        reps.iter().map(|r| g.reps.get(*r).ok_or_else(|| EvalError::NoRep(r.to_string()))).collect::<Result<_, _>>()?;
    let mut series: Vec<Q> = Vec::new();
    for ((h, ws), c) in &t.terms {
        let mut val = c.clone();
        for (w, m) in ws.iter().zip(&mats) {
            let dim = m[0].len();
            let mut acc = identity(dim);
            for &x in w {
                acc = mat_mul(&acc, &m[x as usize]);
            }
            let tr: Q = (0..dim).map(|i| acc[i][i].clone()).fold(Q::zero(), |a, b| a + b);
            val *= tr;
        }
        let h = *h as usize;
        if series.len() <= h {
            series.resize(h + 1, Q::zero());
        }
        series[h] += val;
    }
    Ok(series)
}

// ---------------------------------------------------------------------------
// File format

pub enum LieFile {
    Metrized(LieAlgebra),
    Bialgebra(LieBialgebra, BTreeMap<String, Vec<Matrix>>),
}

impl fmt::Debug for LieFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieFile::Metrized(g) => write!(f, "Metrized({:?})", g.names),
            LieFile::Bialgebra(a, _) => write!(f, "Bialgebra({:?})", a.names),
        }
    }
}

/// Parses `dim n`, `names ...`, `bracket i j -> k c`, `metric i j c`, `cobracket i -> j k c`
/// and `rep <name> i row col c`. Indices are 1-based.
pub fn parse_lie(text: &str) -> Result<LieFile, LieError> {
    let mut n: Option<usize> = None;
    let mut names: Option<Vec<String>> = None;
    let mut brackets = Vec::new();
    let mut metric_entries = Vec::new();
    let mut cob: Vec<(usize, usize, usize, Q)> = Vec::new();
    let mut reps: BTreeMap<String, Vec<(usize, usize, usize, Q)>> = BTreeMap::new();
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let t = line.split('#').next().unwrap().trim();
        if t.is_empty() {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        let err = |m: &str| LieError::Parse(ln, m.to_string());
        let dim = n.ok_or_else(|| err("`dim` must come first"));
        let idx = |s: &str| -> Result<usize, LieError> {
            let i: usize = s.parse().map_err(|_| err(&format!("bad index `{s}`")))?;
            let n = dim.clone()?;
            if i == 0 || i > n {
                return Err(err(&format!("index {i} out of range 1..{n}")));
            }
            Ok(i - 1)
        };
        let rat = |s: &str| parse_q(s).ok_or_else(|| err(&format!("bad rational `{s}`")));
        match toks[0] {
            "dim" if toks.len() == 2 => n = Some(toks[1].parse().map_err(|_| err("bad dimension"))?),
            "names" => names = Some(toks[1..].iter().map(|s| s.to_string()).collect()),
            "bracket" if toks.len() == 6 && toks[3] == "->" => brackets.push((idx(toks[1])?, idx(toks[2])?, idx(toks[4])?, rat(toks[5])?)),
            "metric" if toks.len() == 4 => metric_entries.push((idx(toks[1])?, idx(toks[2])?, rat(toks[3])?)),
            "cobracket" if toks.len() == 6 && toks[2] == "->" => cob.push((idx(toks[1])?, idx(toks[3])?, idx(toks[4])?, rat(toks[5])?)),
            "rep" if toks.len() == 6 => {
                let i = idx(toks[2])?;
                let r: usize = toks[3].parse().map_err(|_| err("bad row"))?;
                let c: usize = toks[4].parse().map_err(|_| err("bad column"))?;
                if r == 0 || c == 0 {
                    return Err(err("rows and columns are 1-based"));
                }
                reps.entry(toks[1].to_string()).or_default().push((i, r - 1, c - 1, rat(toks[5])?));
            }
            _ => return Err(err(&format!("unrecognized line `{t}`"))),
        }
    }
    let n = n.ok_or(LieError::Parse(0, "missing `dim`".into()))?;
    let names = names.unwrap_or_else(|| (1..=n).map(|i| format!("x{i}")).collect());
    if names.len() != n {
        return Err(LieError::Parse(0, format!("{} names for dimension {n}", names.len())));
    }
    let br = dense_bracket(n, &brackets)?;
    let rep_mats: BTreeMap<String, Vec<Matrix>> = reps
        .into_iter()
        .map(|(name, es)| {
            let d = es.iter().map(|e| e.1.max(e.2) + 1).max().unwrap_or(0);
            let mut mats = vec![vec![vec![Q::zero(); d]; d]; n];
            for (i, r, c, x) in es {
                mats[i][r][c] += x;
            }
            (name, mats)
        })
        .collect();
    if !cob.is_empty() {
        let mut cobracket = vec![Vec::new(); n];
        for (i, j, k, c) in cob {
            cobracket[i].push((j, k, c));
        }
        return Ok(LieFile::Bialgebra(LieBialgebra { names, bracket: br, cobracket }, rep_mats));
    }
    let mut metric = vec![vec![Q::zero(); n]; n];
    let mut set = vec![vec![false; n]; n];
    for (i, j, c) in metric_entries {
        metric[i][j] = c.clone();
        set[i][j] = true;
        if !set[j][i] {
            metric[j][i] = c;
        }
    }
    let mut g = LieAlgebra::new(names, br, metric)?;
    for (name, mats) in rep_mats {
        g.add_rep(&name, mats)?;
    }
    Ok(LieFile::Metrized(g))
}

/// The built-in sl2 in the file format.
pub fn sl2_text() -> String {
    let g = LieAlgebra::sl2();
    let mut s = String::from("dim 3\nnames e f h\n");
    for i in 0..3 {
        for j in i + 1..3 {
            for (k, c) in &g.bracket[i][j] {
                s.push_str(&format!("bracket {} {} -> {} {}\n", i + 1, j + 1, k + 1, fmt_q(c)));
            }
        }
    }
    for i in 0..3 {
        for j in i..3 {
            if !g.metric[i][j].is_zero() {
                s.push_str(&format!("metric {} {} {}\n", i + 1, j + 1, fmt_q(&g.metric[i][j])));
            }
        }
    }
    for (i, m) in g.reps["fund"].iter().enumerate() {
        for (r, row) in m.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    s.push_str(&format!("rep fund {} {} {} {}\n", i + 1, r + 1, c + 1, fmt_q(x)));
                }
            }
        }
    }
    s
}
