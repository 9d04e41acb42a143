//! Structure maps between diagram spaces and the named elements.
//!
//! Products put the legs of the left factor before those of the right factor along each
//! strand. All maps act on formal sums and drop terms above the cap.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::diagram::{all_directions, canon_id, diagram, Comp, DiagId, Diagram, Parts, Skeleton};
use crate::linalg::{q, qi, Q};
use crate::ops;
use crate::sum::FormalSum;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("component {0} does not exist")]
    NoComponent(usize),
    #[error("components {0} and {1} cannot be glued: {2}")]
    TypeMismatch(usize, usize, String),
    #[error("{0}")]
    Skeleton(String),
    #[error("not a perturbation of the identity (degree-0 part must be the unit)")]
    NotUnipotent,
    #[error("invalid slot map {0:?} into {1} strands")]
    BadSlots(Vec<usize>, usize),
}

fn check_comp(s: &Skeleton, m: usize) -> Result<(), MapError> {
    if m >= s.len() {
        Err(MapError::NoComponent(m))
    } else {
        Ok(())
    }
}

fn single(d: Diagram) -> Vec<(Diagram, Q)> {
    vec![(d, Q::one())]
}

/// Stacks `e` after `d` on every component (intervals concatenate, colors merge).
pub fn mul_raw(d: &Diagram, e: &Diagram) -> Diagram {
    let n = d.skeleton.len();
    let mut u = ops::disjoint_union(d, e);
    for i in (0..n).rev() {
        u = ops::glue_comps(&u, i, n + i);
    }
    u
}

/// The algebra product: `a` first, then `b`, along each component.
pub fn mul(a: &FormalSum, b: &FormalSum) -> Result<FormalSum, MapError> {
    if a.skeleton != b.skeleton || a.directed != b.directed {
        return Err(MapError::Skeleton(format!("product of sums on {} and {}", a.skeleton, b.skeleton)));
    }
    if a.skeleton.0.contains(&Comp::Circle) {
        return Err(MapError::Skeleton("no stacking product on circle components".into()));
    }
    let cap = a.cap.min(b.cap);
    let bt: Vec<(DiagId, Q)> = b.terms().map(|(k, v)| (k, v.clone())).collect();
    let bt = &bt;
    Ok(a.map(a.skeleton.clone(), a.directed, cap, move |d| {
        let mut out = Vec::new();
        for (id, c) in bt.iter() {
            let e = diagram(*id);
            if d.degree() + e.degree() <= cap {
                out.push((mul_raw(d, &e), c.clone()));
            }
        }
        out
    }))
}

/// Product of several sums, left to right.
pub fn mul_all(xs: &[&FormalSum]) -> Result<FormalSum, MapError> {
    let mut acc = xs[0].clone();
    for x in &xs[1..] {
        acc = mul(&acc, x)?;
    }
    Ok(acc)
}

pub fn commutator(a: &FormalSum, b: &FormalSum) -> Result<FormalSum, MapError> {
    Ok(mul(a, b)?.sub(&mul(b, a)?))
}

/// Tensor product: the skeleton of `b` is appended after that of `a`.
pub fn tensor(a: &FormalSum, b: &FormalSum) -> FormalSum {
    let mut sk = a.skeleton.0.clone();
    sk.extend(b.skeleton.0.iter().cloned());
    let target = Skeleton(sk);
    let cap = a.cap.min(b.cap);
    let bt: Vec<(DiagId, Q)> = b.terms().map(|(k, v)| (k, v.clone())).collect();
    let bt = &bt;
    a.map(target, a.directed, cap, move |d| bt.iter().map(|(id, c)| (ops::disjoint_union(d, &diagram(*id)), c.clone())).collect())
}

/// Glues component `m2` onto the end of component `m1`; the merged component replaces `m1`.
pub fn product(v: &FormalSum, m1: usize, m2: usize) -> Result<FormalSum, MapError> {
    check_comp(&v.skeleton, m1)?;
    check_comp(&v.skeleton, m2)?;
    let (a, b) = (&v.skeleton.0[m1], &v.skeleton.0[m2]);
    let ok = m1 != m2 && matches!((a, b), (Comp::Interval, Comp::Interval) | (Comp::Color(_), Comp::Color(_)));
    if !ok {
        return Err(MapError::TypeMismatch(m1, m2, format!("{} and {}", a.token(), b.token())));
    }
    let mut sk = v.skeleton.0.clone();
    sk.remove(m2);
    Ok(v.map(Skeleton(sk), v.directed, v.cap, |d| single(ops::glue_comps(d, m1, m2))))
}

/// Cabling of component `m`: the sum over all ways of distributing its legs over two copies.
pub fn cabling(v: &FormalSum, m: usize) -> Result<FormalSum, MapError> {
    check_comp(&v.skeleton, m)?;
    let mut sk = v.skeleton.0.clone();
    sk.insert(m + 1, sk[m].clone());
    Ok(v.map(Skeleton(sk), v.directed, v.cap, |d| ops::cable_comp(d, m).into_iter().map(|e| (e, Q::one())).collect()))
}

/// Counit on component `m`: diagrams with a leg on it die, the rest lose the component.
pub fn counit(v: &FormalSum, m: usize) -> Result<FormalSum, MapError> {
    check_comp(&v.skeleton, m)?;
    let mut sk = v.skeleton.0.clone();
    sk.remove(m);
    Ok(v.map(Skeleton(sk), v.directed, v.cap, |d| ops::remove_comp(d, m).map(single).unwrap_or_default()))
}

/// Antipode on component `m`: reverse it and multiply by (-1)^legs.
pub fn antipode(v: &FormalSum, m: usize) -> Result<FormalSum, MapError> {
    check_comp(&v.skeleton, m)?;
    Ok(v.map(v.skeleton.clone(), v.directed, v.cap, |d| {
        let (e, s) = ops::reverse_comp(d, m);
        vec![(e, qi(s as i64))]
    }))
}

/// Closes interval `m` into a circle.
pub fn trace(v: &FormalSum, m: usize) -> Result<FormalSum, MapError> {
    check_comp(&v.skeleton, m)?;
    if v.skeleton.0[m] != Comp::Interval {
        return Err(MapError::Skeleton(format!("trace needs an interval at component {}", m + 1)));
    }
    let mut sk = v.skeleton.0.clone();
    sk[m] = Comp::Circle;
    Ok(v.map(Skeleton(sk), v.directed, v.cap, |d| single(ops::close_comp(d, m))))
}

/// Inserts a bare component of kind `c` at position `m`.
pub fn insert_bare(v: &FormalSum, m: usize, c: Comp) -> FormalSum {
    let mut sk = v.skeleton.0.clone();
    sk.insert(m, c.clone());
    v.map(Skeleton(sk), v.directed, v.cap, |d| single(ops::insert_comp(d, m, c.clone())))
}

/// Reorders components: component `i` of the result is component `perm[i]` of `v`.
pub fn permute_components(v: &FormalSum, perm: &[usize]) -> FormalSum {
    let sk = Skeleton(perm.iter().map(|&i| v.skeleton.0[i].clone()).collect());
    v.map(sk, v.directed, v.cap, |d| single(ops::permute_comps(d, perm)))
}

/// Concatenates components: component `g` of the result carries the listed components of `v`
/// in order, closed into a circle when its kind is `Comp::Circle`.
pub fn regroup(v: &FormalSum, groups: &[(Vec<usize>, Comp)]) -> Result<FormalSum, MapError> {
    let n = v.skeleton.len();
    let mut seen = vec![false; n];
    for (g, _) in groups {
        for &i in g {
            if i >= n || seen[i] {
                return Err(MapError::BadSlots(g.clone(), n));
            }
            seen[i] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(MapError::Skeleton("regroup must use every component once".into()));
    }
    let sk = Skeleton(groups.iter().map(|(_, c)| c.clone()).collect());
    Ok(v.map(sk, v.directed, v.cap, |d| single(ops::regroup_comps(d, groups))))
}

/// A factor in a contraction: a strand of the tensor being contracted or an extra element on
/// one interval.
#[derive(Clone, Copy, Debug)]
pub enum Piece<'a> {
    Strand(usize),
    Elem(&'a FormalSum),
}

/// Multiplies tensor components and extra elements along new intervals: output `g` is the
/// product, left to right, of the pieces listed in `outputs[g]`. Every strand is used once.
pub fn contract(v: &FormalSum, outputs: &[Vec<Piece>]) -> Result<FormalSum, MapError> {
    let mut x = v.clone();
    let mut groups = Vec::with_capacity(outputs.len());
    for out in outputs {
        let mut g = Vec::with_capacity(out.len());
        for piece in out {
            match piece {
                Piece::Strand(i) => g.push(*i),
                Piece::Elem(e) => {
                    if e.skeleton != Skeleton::intervals(1) || e.directed != v.directed {
                        return Err(MapError::Skeleton(format!("contraction factor on {}", e.skeleton)));
                    }
                    g.push(x.skeleton.len());
                    x = tensor(&x, e);
                }
            }
        }
        groups.push((g, Comp::Interval));
    }
    regroup(&x, &groups)
}

/// `X^{k_1 ... k_p}`: component `j` of `v` becomes strand `slots[j]` (0-based) of `n` intervals.
pub fn relabel(v: &FormalSum, slots: &[usize], n: usize) -> Result<FormalSum, MapError> {
    let mut seen = vec![false; n];
    for &k in slots {
        if k >= n || seen[k] {
            return Err(MapError::BadSlots(slots.to_vec(), n));
        }
        seen[k] = true;
    }
    if slots.len() != v.skeleton.len() || v.skeleton.0.iter().any(|c| *c != Comp::Interval) {
        return Err(MapError::BadSlots(slots.to_vec(), n));
    }
    let p = slots.len();
    let mut w = v.clone();
    for _ in p..n {
        w = insert_bare(&w, w.skeleton.len(), Comp::Interval);
    }
    // source position of each target strand
    let mut perm = vec![usize::MAX; n];
    for (j, &k) in slots.iter().enumerate() {
        perm[k] = j;
    }
    let mut next = p;
    for x in perm.iter_mut() {
        if *x == usize::MAX {
            *x = next;
            next += 1;
        }
    }
    Ok(permute_components(&w, &perm))
}

/// Δ^{(n)}: `n` parallel copies of interval `m` (n = 0 is the counit, n = 1 the identity).
pub fn iterated_coproduct(v: &FormalSum, m: usize, n: usize) -> Result<FormalSum, MapError> {
    if n == 0 {
        return counit(v, m);
    }
    let mut w = v.clone();
    for k in 1..n {
        w = cabling(&w, m + k - 1)?;
    }
    Ok(w)
}

/// ι: the sum over all directions of the arcs.
pub fn iota(v: &FormalSum) -> FormalSum {
    assert!(!v.directed, "iota takes undirected sums");
    v.map(v.skeleton.clone(), true, v.cap, |d| all_directions(d).into_iter().map(|e| (e, Q::one())).collect())
}

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(Q::one(), |a, k| a * qi(k))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// χ on color component `m`: the average over all orderings of its legs along a new interval.
pub fn chi(v: &FormalSum, m: usize) -> Result<FormalSum, MapError> {
    check_comp(&v.skeleton, m)?;
    if !matches!(v.skeleton.0[m], Comp::Color(_)) {
        return Err(MapError::Skeleton(format!("chi needs a color at component {}", m + 1)));
    }
    let mut sk = v.skeleton.0.clone();
    sk[m] = Comp::Interval;
    Ok(v.map(Skeleton(sk), v.directed, v.cap, |d| {
        let k = d.comps[m].len();
        let w = factorial(k).recip();
        let base = ops::recolor_comp(d, m, Comp::Interval);
        permutations(k).into_iter().map(|p| (ops::reorder_legs(&base, m, &p), w.clone())).collect()
    }))
}

/// Action of the adjacent transposition `u_i` (0-based: swaps positions `i`, `i+1`) on component `m`.
pub fn swap_legs(d: &Diagram, m: usize, i: usize) -> Diagram {
    let k = d.comps[m].len();
    let mut order: Vec<usize> = (0..k).collect();
    order.swap(i, i + 1);
    ops::reorder_legs(d, m, &order)
}

/// The `s_i` gluing operator: joins legs `i`, `i+1` of component `m` through a new vertex
/// (both directions of the new leg for directed diagrams).
pub fn join_legs(d: &Diagram, m: usize, i: usize) -> Vec<(Diagram, Q)> {
    ops::join_adjacent_legs(d, m, i).into_iter().map(|e| (e, Q::one())).collect()
}

/// `pi D` for a word `u_{i_1} ... u_{i_q}` (letters 0-based), applied right to left.
pub fn apply_word(d: &Diagram, m: usize, word: &[usize]) -> Diagram {
    let mut e = d.clone();
    for &i in word.iter().rev() {
        e = swap_legs(&e, m, i);
    }
    e
}

/// Γ_D(u_{i_1} ... u_{i_q}) = Σ_p s_{i_p} u_{i_{p+1}} ... u_{i_q} D, on component `m`.
pub fn gamma_d(d: &Diagram, m: usize, word: &[usize], cap: usize) -> FormalSum {
    let mut out = FormalSum::zero(d.skeleton.clone(), d.is_directed(), cap);
    for p in 0..word.len() {
        let e = apply_word(d, m, &word[p + 1..]);
        for (f, c) in join_legs(&e, m, word[p]) {
            out.add_raw(&f, &c);
        }
    }
    out
}

/// The permutation action of a word on a formal sum.
pub fn permutation_action(v: &FormalSum, m: usize, word: &[usize]) -> FormalSum {
    v.map(v.skeleton.clone(), v.directed, v.cap, |d| {
        if word.iter().any(|&i| i + 1 >= d.comps[m].len()) {
            return Vec::new();
        }
        single(apply_word(d, m, word))
    })
}

/// Glues the legs of `d` (on a single interval) onto the legs of `c` on its second interval,
/// in order; the result lives on the first interval of `c`. Directed legs must meet legs of
/// the opposite direction; incompatible pairs give zero. Arcs of `c` with both ends on its
/// second interval would close up into vertex-free loops and are not supported.
pub fn glue_raw(c: &Diagram, d: &Diagram) -> Option<Diagram> {
    if c.skeleton != Skeleton::intervals(2) || d.skeleton != Skeleton::intervals(1) || c.is_directed() != d.is_directed() {
        return None;
    }
    let (cu, du) = (&c.comps[1], &d.comps[0]);
    if cu.len() != du.len() {
        return None;
    }
    if c.is_directed() && cu.iter().zip(du).any(|(&a, &b)| c.is_head(a as usize) == d.is_head(b as usize)) {
        return None;
    }
    let off = c.n_ports();
    let n = off + d.n_ports();
    let partner = |x: usize| -> usize {
        if x < off {
            c.partner[x] as usize
        } else {
            d.partner[x - off] as usize + off
        }
    };
    let is_head = |x: usize| -> bool {
        if x < off {
            c.is_head(x)
        } else {
            d.is_head(x - off)
        }
    };
    let mut through = vec![usize::MAX; n];
    for (&a, &b) in cu.iter().zip(du) {
        through[a as usize] = b as usize + off;
        through[b as usize + off] = a as usize;
    }
    let mut p = Parts::new(Skeleton::intervals(1), c.is_directed());
    p.comps = vec![c.comps[0].iter().map(|&x| x as u32).collect()];
    for j in 0..c.n_internal() {
        p.verts.push(c.vertex_ports(j).map(|x| x as u32));
    }
    for j in 0..d.n_internal() {
        p.verts.push(d.vertex_ports(j).map(|x| (x + off) as u32));
    }
    let mut done = vec![false; n];
    for x in 0..n {
        if done[x] || through[x] != usize::MAX {
            continue;
        }
        let mut y = partner(x);
        while through[y] != usize::MAX {
            done[y] = true;
            done[through[y]] = true;
            y = partner(through[y]);
        }
        done[x] = true;
        done[y] = true;
        p.edges.push(if is_head(x) { (y as u32, x as u32) } else { (x as u32, y as u32) });
    }
    if !done.iter().all(|&b| b) {
        return None;
    }
    Some(p.build().expect("glue"))
}

/// Linear extension of `glue_raw`.
pub fn glue(c: &FormalSum, d: &FormalSum) -> FormalSum {
    let dt: Vec<(DiagId, Q)> = d.terms().map(|(k, v)| (k, v.clone())).collect();
    let dt = &dt;
    c.map(Skeleton::intervals(1), c.directed, c.cap.min(d.cap), move |cd| {
        dt.iter().filter_map(|(id, k)| glue_raw(cd, &diagram(*id)).map(|e| (e, k.clone()))).collect()
    })
}

// ---------------------------------------------------------------------------
// Inverse of χ

type SigmaKey = (DiagId, usize, String);

fn sigma_cache() -> &'static Mutex<HashMap<SigmaKey, FormalSum>> {
    static C: OnceLock<Mutex<HashMap<SigmaKey, FormalSum>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The coset word moving the leg at position `last` to position `j`: u_j u_{j+1} ... u_{last-1}.
fn coset_word(j: usize, last: usize) -> Vec<usize> {
    (j..last).collect()
}

/// (1/k!) Σ_π Γ_D(π) for the legs of component `m`, as a sum over diagrams with one leg fewer.
/// The permutations are enumerated as cosets of the stabilizer of the last position, which
/// gives the words of the recursion P_j = (1/j) Σ_i c_i P_{j-1}.
fn averaged_gamma(d: &Diagram, m: usize, cap: usize) -> FormalSum {
    let k = d.comps[m].len();
    let zero = FormalSum::zero(d.skeleton.clone(), d.is_directed(), cap);
    let mut avg = FormalSum::from_raw(d, Q::one(), cap);
    let mut g = zero.clone();
    for j in 2..=k {
        let w = qi(j as i64).recip();
        let mut next_avg = zero.clone();
        for (id, c) in avg.terms() {
            let e = diagram(id);
            for i in 0..j {
                let word = coset_word(i, j - 1);
                g = g.axpy(&(c * &w), &gamma_d(&e, m, &word, cap));
                next_avg.add_raw(&apply_word(&e, m, &word), &(c * &w));
            }
        }
        avg = next_avg;
    }
    g
}

/// σ on interval component `m`, producing a sum with that component turned into color `color`.
pub fn sigma(v: &FormalSum, m: usize, color: &str) -> Result<FormalSum, MapError> {
    check_comp(&v.skeleton, m)?;
    if v.skeleton.0[m] != Comp::Interval {
        return Err(MapError::Skeleton(format!("sigma needs an interval at component {}", m + 1)));
    }
    let mut sk = v.skeleton.0.clone();
    sk[m] = Comp::Color(color.to_string());
    let target = Skeleton(sk);
    let mut out = FormalSum::zero(target, v.directed, v.cap);
    for (id, c) in v.terms() {
        out = out.axpy(c, &sigma_id(id, m, color, v.cap));
    }
    Ok(out)
}

fn sigma_id(id: DiagId, m: usize, color: &str, cap: usize) -> FormalSum {
    let key = (id, m, color.to_string());
    if let Some(s) = sigma_cache().lock().unwrap().get(&key) {
        if s.cap >= cap {
            return s.clone().with_cap(cap);
        }
    }
    let d = diagram(id);
    let mut sk = d.skeleton.0.clone();
    sk[m] = Comp::Color(color.to_string());
    let mut out = FormalSum::zero(Skeleton(sk), d.is_directed(), cap);
    out.add_raw(&ops::recolor_comp(&d, m, Comp::Color(color.to_string())), &Q::one());
    if d.comps[m].len() > 1 {
        let g = averaged_gamma(&d, m, cap);
        for (gid, c) in g.terms() {
            out = out.axpy(c, &sigma_id(gid, m, color, cap));
        }
    }
    sigma_cache().lock().unwrap().insert(key, out.clone());
    out
}

// ---------------------------------------------------------------------------
// Power series

/// exp(x) for x without degree-0 part.
pub fn exp(x: &FormalSum) -> Result<FormalSum, MapError> {
    if !x.degree_part(0).is_zero() {
        return Err(MapError::NotUnipotent);
    }
    let one = FormalSum::one(x.skeleton.clone(), x.directed, x.cap);
    let mut acc = one.clone();
    let mut pw = one;
    for k in 1..=x.cap {
        pw = mul(&pw, x)?.scale(&qi(k as i64).recip());
        if pw.is_zero() {
            break;
        }
        acc = acc.add(&pw);
    }
    Ok(acc)
}

fn unipotent_part(x: &FormalSum) -> Result<FormalSum, MapError> {
    let one = FormalSum::one(x.skeleton.clone(), x.directed, x.cap);
    let n = x.sub(&one);
    if !n.degree_part(0).is_zero() {
        return Err(MapError::NotUnipotent);
    }
    Ok(n)
}

/// log(1 + n) = Σ (-1)^{k+1} n^k / k.
pub fn log(x: &FormalSum) -> Result<FormalSum, MapError> {
    let n = unipotent_part(x)?;
    let mut acc = x.like();
    let mut pw = FormalSum::one(x.skeleton.clone(), x.directed, x.cap);
    for k in 1..=x.cap {
        pw = mul(&pw, &n)?;
        if pw.is_zero() {
            break;
        }
        let c = q(if k % 2 == 1 { 1 } else { -1 }, k as i64);
        acc = acc.axpy(&c, &pw);
    }
    Ok(acc)
}

/// (1 + n)^{-1} = Σ (-n)^k.
pub fn inverse(x: &FormalSum) -> Result<FormalSum, MapError> {
    let n = unipotent_part(x)?.neg();
    let mut acc = FormalSum::one(x.skeleton.clone(), x.directed, x.cap);
    let mut pw = acc.clone();
    for _ in 1..=x.cap {
        pw = mul(&pw, &n)?;
        if pw.is_zero() {
            break;
        }
        acc = acc.add(&pw);
    }
    Ok(acc)
}

/// The unipotent square root exp(log(x)/2).
pub fn sqrt(x: &FormalSum) -> Result<FormalSum, MapError> {
    exp(&log(x)?.scale(&q(1, 2)))
}

/// Multiplicative power of a unipotent element by a rational exponent.
pub fn power(x: &FormalSum, t: &Q) -> Result<FormalSum, MapError> {
    exp(&log(x)?.scale(t))
}

// ---------------------------------------------------------------------------
// Named elements

pub const DEFAULT_COLOR: &str = "x";

fn chord_between(s: Skeleton, directed: bool, a: (usize, usize), b: (usize, usize)) -> Diagram {
    // a and b are (component, position); heads at b for directed chords
    let mut p = Parts::new(s, directed);
    let (ha, hb) = (0u32, 1u32);
    let mut slots: Vec<Vec<(usize, u32)>> = vec![Vec::new(); p.comps.len()];
    slots[a.0].push((a.1, ha));
    slots[b.0].push((b.1, hb));
    for (c, v) in slots.iter_mut().enumerate() {
        v.sort();
        p.comps[c] = v.iter().map(|x| x.1).collect();
    }
    p.edges.push((ha, hb));
    p.build().expect("chord")
}

/// Ω: one chord between two intervals.
pub fn omega(cap: usize) -> FormalSum {
    FormalSum::from_raw(&chord_between(Skeleton::intervals(2), false, (0, 0), (1, 0)), Q::one(), cap)
}

/// C: one chord on an interval.
pub fn casimir(cap: usize) -> FormalSum {
    FormalSum::from_raw(&chord_between(Skeleton::intervals(1), false, (0, 0), (0, 1)), Q::one(), cap)
}

/// R = exp(Ω/2).
pub fn r_kz(cap: usize) -> FormalSum {
    exp(&omega(cap).scale(&q(1, 2))).expect("unipotent")
}

/// The directed chord between two intervals with its head on the first strand.
pub fn left_arrow(cap: usize) -> FormalSum {
    FormalSum::from_raw(&chord_between(Skeleton::intervals(2), true, (1, 0), (0, 0)), Q::one(), cap)
}

/// The directed chord between two intervals with its head on the second strand.
pub fn right_arrow(cap: usize) -> FormalSum {
    FormalSum::from_raw(&chord_between(Skeleton::intervals(2), true, (0, 0), (1, 0)), Q::one(), cap)
}

/// The diagrammatic r-matrix: the left arrow, head on strand 1, tail on strand 2.
pub fn r_arrow(cap: usize) -> FormalSum {
    left_arrow(cap)
}

/// Directed chord on one interval whose head comes first.
pub fn left_half_circ(cap: usize) -> FormalSum {
    FormalSum::from_raw(&chord_between(Skeleton::intervals(1), true, (0, 1), (0, 0)), Q::one(), cap)
}

/// Directed chord on one interval whose tail comes first.
pub fn right_half_circ(cap: usize) -> FormalSum {
    FormalSum::from_raw(&chord_between(Skeleton::intervals(1), true, (0, 0), (0, 1)), Q::one(), cap)
}

/// A tadpole on one interval: a leg into (`incoming`) or out of a vertex carrying a directed loop.
/// The loop runs from the third to the second port in the vertex's cyclic order (leg port first).
pub fn tadpole(incoming: bool, cap: usize) -> FormalSum {
    let mut p = Parts::new(Skeleton::intervals(1), true);
    p.comps[0] = vec![0];
    p.verts.push([1, 2, 3]);
    p.edges.push(if incoming { (1, 0) } else { (0, 1) });
    p.edges.push((3, 2));
    FormalSum::from_raw(&p.build().expect("tadpole"), Q::one(), cap)
}

/// ϱ = ½ (left half circle − right half circle).
pub fn rho(cap: usize) -> FormalSum {
    left_half_circ(cap).sub(&right_half_circ(cap)).scale(&q(1, 2))
}

/// The wheel with `n` spokes on a color: a cycle of `n` vertices each carrying one leg.
pub fn wheel_raw(n: usize, color: &str) -> Diagram {
    let mut p = Parts::new(Skeleton::color(color), false);
    let n32 = n as u32;
    p.comps[0] = (0..n32).collect();
    for j in 0..n32 {
        let b = n32 + 3 * j;
        p.verts.push([b, b + 1, b + 2]);
        p.edges.push((j, b));
        let next = n32 + 3 * ((j + 1) % n32);
        p.edges.push((b + 2, next + 1));
    }
    p.build().expect("wheel")
}

pub fn wheel(n: usize, cap: usize) -> FormalSum {
    FormalSum::from_raw(&wheel_raw(n, DEFAULT_COLOR), Q::one(), cap)
}

/// Named elements by their command-line token.
pub fn named(token: &str, cap: usize) -> Option<FormalSum> {
    Some(match token {
        "Omega" => omega(cap),
        "C" => casimir(cap),
        "R" => r_kz(cap),
        "rho" => rho(cap),
        "rarrow" => r_arrow(cap),
        "wheel2" => wheel(2, cap),
        "wheel4" => wheel(4, cap),
        _ => return None,
    })
}

/// The canonical id of a raw diagram, panicking on AS-zero diagrams.
pub fn id_of(d: &Diagram) -> (DiagId, i32) {
    canon_id(d).expect("diagram vanishes by antisymmetry")
}

pub fn is_zero_coeff(x: &Q) -> bool {
    x.is_zero()
}
