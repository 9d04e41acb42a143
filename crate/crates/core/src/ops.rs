//! Local surgery on raw diagrams: STU and IHX rewrites, skeleton gluing and splitting.

use crate::diagram::{Comp, Diagram, Parts, Skeleton};

fn fresh(p: &Parts) -> u32 {
    let mut m = 0;
    for c in &p.comps {
        for &h in c {
            m = m.max(h + 1);
        }
    }
    for v in &p.verts {
        for &h in v {
            m = m.max(h + 1);
        }
    }
    m
}

fn rename(p: &mut Parts, from: u32, to: u32) {
    for e in p.edges.iter_mut() {
        if e.0 == from {
            e.0 = to;
        }
        if e.1 == from {
            e.1 = to;
        }
    }
}

/// The vertex ports of `leg`'s neighbour in cyclic order starting at the port facing the leg,
/// or `None` when the leg ends on another leg.
pub fn leg_vertex(d: &Diagram, leg: usize) -> Option<(usize, [usize; 3])> {
    let p = d.partner[leg] as usize;
    let v = d.vertex_of(p)?;
    let ports = d.vertex_ports(v);
    let k = ports.iter().position(|&x| x == p).unwrap();
    Some((v, [ports[k], ports[(k + 1) % 3], ports[(k + 2) % 3]]))
}

/// STU at a leg attached to an internal vertex with cyclic order (p, x, y):
/// S = T - U, where T carries two adjacent legs joined to the far ends of x and y (in that
/// order along the skeleton) and U has them swapped. Directions of the outer arcs are kept.
pub fn stu_expand(d: &Diagram, leg: usize) -> Option<(Diagram, Diagram)> {
    let (v, [p, x, y]) = leg_vertex(d, leg)?;
    let base = d.parts();
    let mk = |first: bool| -> Diagram {
        let mut q = base.clone();
        let n = fresh(&q);
        let (nx, ny) = (n, n + 1);
        q.verts.remove(v);
        q.edges.retain(|&(a, b)| !((a as usize == leg && b as usize == p) || (b as usize == leg && a as usize == p)));
        rename(&mut q, x as u32, nx);
        rename(&mut q, y as u32, ny);
        for c in q.comps.iter_mut() {
            if let Some(i) = c.iter().position(|&h| h as usize == leg) {
                c.splice(i..=i, if first { [nx, ny] } else { [ny, nx] });
            }
        }
        q.build().expect("stu rewrite")
    };
    Some((mk(true), mk(false)))
}

/// The leg arc of `leg` with its direction reversed.
pub fn flip_arc(d: &Diagram, port: usize) -> Diagram {
    let mut e = d.clone();
    if let Some(h) = e.heads.as_mut() {
        let q = d.partner[port] as usize;
        *h ^= (1 << port) | (1 << q);
    }
    e
}

/// The three IHX terms at an internal edge joining distinct vertices u = (e, a, b) and
/// v = (f, c, d): T(a,b|c,d), T(a,c|d,b), T(a,d|b,c), summing to zero. For directed
/// diagrams each term is returned in both directions of the middle edge.
pub fn ihx_terms(d: &Diagram, port: usize) -> Option<Vec<Diagram>> {
    let u = d.vertex_of(port)?;
    let q = d.partner[port] as usize;
    let w = d.vertex_of(q)?;
    if u == w {
        return None;
    }
    let rot = |v: usize, s: usize| {
        let ports = d.vertex_ports(v);
        let k = ports.iter().position(|&x| x == s).unwrap();
        [ports[(k + 1) % 3], ports[(k + 2) % 3]]
    };
    let [a, b] = rot(u, port);
    let [c, dd] = rot(w, q);
    let base = d.parts();
    let n = fresh(&base);
    let mut out = Vec::new();
    for (x1, x2, y1, y2) in [(a, b, c, dd), (a, c, dd, b), (a, dd, b, c)] {
        let mut pp = base.clone();
        let (iu, iw) = (u.max(w), u.min(w));
        pp.verts.remove(iu);
        pp.verts.remove(iw);
        pp.edges.retain(|&(s, t)| !((s as usize == port && t as usize == q) || (s as usize == q && t as usize == port)));
        pp.verts.push([n, x1 as u32, x2 as u32]);
        pp.verts.push([n + 1, y1 as u32, y2 as u32]);
        if d.is_directed() {
            for dir in [true, false] {
                let mut r = pp.clone();
                r.edges.push(if dir { (n, n + 1) } else { (n + 1, n) });
                out.push(r.build().expect("ihx rewrite"));
            }
        } else {
            pp.edges.push((n, n + 1));
            out.push(pp.build().expect("ihx rewrite"));
        }
    }
    Some(out)
}

/// Disjoint union; the skeleton of `b` follows that of `a`.
pub fn disjoint_union(a: &Diagram, b: &Diagram) -> Diagram {
    assert_eq!(a.is_directed(), b.is_directed());
    let off = a.n_ports() as u32;
    let pa = a.parts();
    let pb = b.parts();
    let mut skel = a.skeleton.0.clone();
    skel.extend(b.skeleton.0.iter().cloned());
    let mut p = Parts::new(Skeleton(skel), a.is_directed());
    p.comps = pa.comps;
    p.comps.extend(pb.comps.into_iter().map(|c| c.into_iter().map(|h| h + off).collect()));
    p.verts = pa.verts;
    p.verts.extend(pb.verts.into_iter().map(|v| v.map(|h| h + off)));
    p.edges = pa.edges;
    p.edges.extend(pb.edges.into_iter().map(|(x, y)| (x + off, y + off)));
    p.build().expect("union")
}

/// Reorders skeleton components: component `i` of the result is component `perm[i]` of `d`.
pub fn permute_comps(d: &Diagram, perm: &[usize]) -> Diagram {
    let mut p = d.parts();
    p.skeleton = Skeleton(perm.iter().map(|&i| d.skeleton.0[i].clone()).collect());
    let comps = std::mem::take(&mut p.comps);
    p.comps = perm.iter().map(|&i| comps[i].clone()).collect();
    p.build().expect("permute")
}

/// Glues component `j` after component `i` (both intervals, or both colors); the merged
/// component takes the place of `i`.
pub fn glue_comps(d: &Diagram, i: usize, j: usize) -> Diagram {
    assert_ne!(i, j);
    let mut p = d.parts();
    let tail = p.comps[j].clone();
    p.comps[i].extend(tail);
    p.comps.remove(j);
    p.skeleton.0.remove(j);
    p.build().expect("glue")
}

/// Closes interval `i` into a circle.
pub fn close_comp(d: &Diagram, i: usize) -> Diagram {
    let mut e = d.clone();
    e.skeleton.0[i] = Comp::Circle;
    e
}

/// Reverses the orientation of component `i`; returns the sign (-1)^legs.
pub fn reverse_comp(d: &Diagram, i: usize) -> (Diagram, i32) {
    let mut p = d.parts();
    p.comps[i].reverse();
    let s = if p.comps[i].len().is_multiple_of(2) { 1 } else { -1 };
    (p.build().expect("reverse"), s)
}

/// Removes an empty component; `None` if legs end on it.
pub fn remove_comp(d: &Diagram, i: usize) -> Option<Diagram> {
    if !d.comps[i].is_empty() {
        return None;
    }
    let mut p = d.parts();
    p.comps.remove(i);
    p.skeleton.0.remove(i);
    Some(p.build().expect("remove"))
}

/// Inserts an empty component of the given kind at position `i`.
pub fn insert_comp(d: &Diagram, i: usize, c: Comp) -> Diagram {
    let mut p = d.parts();
    p.comps.insert(i, Vec::new());
    p.skeleton.0.insert(i, c);
    p.build().expect("insert")
}

/// All 2^k ways of distributing the legs on component `i` over two copies of it,
/// placed at positions `i` and `i + 1`.
pub fn cable_comp(d: &Diagram, i: usize) -> Vec<Diagram> {
    let p = d.parts();
    let legs = p.comps[i].clone();
    let k = legs.len();
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0u64..(1u64 << k) {
        let mut q = p.clone();
        let (a, b): (Vec<u32>, Vec<u32>) = {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for (t, &h) in legs.iter().enumerate() {
                if mask >> t & 1 == 0 {
                    a.push(h)
                } else {
                    b.push(h)
                }
            }
            (a, b)
        };
        q.comps[i] = a;
        q.comps.insert(i + 1, b);
        let c = q.skeleton.0[i].clone();
        q.skeleton.0.insert(i + 1, c);
        out.push(q.build().expect("cable"));
    }
    out
}

/// Replaces component `i` by a component of another kind keeping the leg order.
pub fn recolor_comp(d: &Diagram, i: usize, c: Comp) -> Diagram {
    let mut e = d.clone();
    e.skeleton.0[i] = c;
    e
}

/// Reorders the legs on component `i`: new position `k` holds old position `order[k]`.
pub fn reorder_legs(d: &Diagram, i: usize, order: &[usize]) -> Diagram {
    let mut p = d.parts();
    let old = p.comps[i].clone();
    p.comps[i] = order.iter().map(|&k| old[k]).collect();
    p.build().expect("reorder")
}

/// Joins the legs at positions `k`, `k+1` of component `i` into an internal vertex with a new
/// leg at that position; cyclic order (new leg, arc of leg k, arc of leg k+1). This is the S
/// diagram whose STU expansion is (d) - (d with the two legs swapped). Directed input yields
/// both directions of the new leg.
pub fn join_adjacent_legs(d: &Diagram, i: usize, k: usize) -> Vec<Diagram> {
    let mut p = d.parts();
    let (l1, l2) = (p.comps[i][k], p.comps[i][k + 1]);
    let n = fresh(&p);
    // the two legs become ports of the new vertex; a fresh leg replaces them
    p.comps[i].splice(k..=k + 1, [n]);
    p.verts.push([n + 1, l1, l2]);
    if d.is_directed() {
        let mut a = p.clone();
        a.edges.push((n, n + 1));
        let mut b = p;
        b.edges.push((n + 1, n));
        vec![a.build().expect("join"), b.build().expect("join")]
    } else {
        p.edges.push((n, n + 1));
        vec![p.build().expect("join")]
    }
}

/// Concatenates components: component `g` of the result carries the legs of the listed
/// components of `d` in order, with the given kind. Every component must be listed once.
pub fn regroup_comps(d: &Diagram, groups: &[(Vec<usize>, Comp)]) -> Diagram {
    let mut p = d.parts();
    let old = std::mem::take(&mut p.comps);
    p.comps = groups.iter().map(|(g, _)| g.iter().flat_map(|&i| old[i].iter().copied()).collect()).collect();
    p.skeleton = Skeleton(groups.iter().map(|(_, c)| c.clone()).collect());
    p.build().expect("regroup")
}
