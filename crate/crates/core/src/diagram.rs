//! Jacobi diagrams on skeletons, in a port model.
//!
//! A diagram with `L` legs and `t` internal vertices has `L + 3t` ports.
//! Ports `0..L` are legs; ports `L+3j .. L+3j+3` belong to internal vertex `j`
//! and are listed in the vertex's cyclic order. `partner` pairs ports into arcs.
//! Directed diagrams record, per port, whether it is the head end of its arc.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Comp {
    Interval,
    Circle,
    Color(String),
}

impl Comp {
    pub fn is_line(&self) -> bool {
        !matches!(self, Comp::Color(_))
    }

    pub fn token(&self) -> String {
        match self {
            Comp::Interval => "I".into(),
            Comp::Circle => "O".into(),
            Comp::Color(n) => format!("*{n}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Skeleton(pub Vec<Comp>);

impl Skeleton {
    pub fn intervals(n: usize) -> Self {
        Skeleton(vec![Comp::Interval; n])
    }

    pub fn circle() -> Self {
        Skeleton(vec![Comp::Circle])
    }

    pub fn color(name: &str) -> Self {
        Skeleton(vec![Comp::Color(name.to_string())])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.0.iter().all(Comp::is_line)
    }

    /// Parses tokens such as `I O *x`, `III`, `I,*` or the arrows `↑ ○ ∗`.
    pub fn parse(s: &str) -> Result<Self, DiagramError> {
        let mut comps = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            if let Some(name) = tok.strip_prefix('*').or_else(|| tok.strip_prefix('∗')) {
                comps.push(Comp::Color(name.to_string()));
                continue;
            }
            for ch in tok.chars() {
                match ch {
                    'I' | '↑' | 'u' => comps.push(Comp::Interval),
                    'O' | '○' => comps.push(Comp::Circle),
                    _ => return Err(DiagramError::Parse(0, format!("bad skeleton token `{tok}`"))),
                }
            }
        }
        Ok(Skeleton(comps))
    }

    pub fn tokens(&self) -> String {
        self.0.iter().map(Comp::token).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        let s: Vec<String> = self.0.iter().map(Comp::token).collect();
        write!(f, "{}", s.join(""))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed diagram: {0}")]
    Structure(String),
    #[error("line {0}: {1}")]
    Parse(usize, String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    pub skeleton: Skeleton,
    /// Leg ports on each component, in order along intervals and circles.
    pub comps: Vec<Vec<u16>>,
    pub partner: Vec<u16>,
    /// Bit `p` set when port `p` is the head of its arc. `None` for undirected.
    pub heads: Option<u64>,
}

/// Name-based description used for building and editing diagrams.
/// Half-edge names are arbitrary; legs are named by their single half-edge.
#[derive(Clone, Debug, Default)]
pub struct Parts {
    pub skeleton: Skeleton,
    pub comps: Vec<Vec<u32>>,
    pub verts: Vec<[u32; 3]>,
    /// For directed diagrams each pair is (tail, head).
    pub edges: Vec<(u32, u32)>,
    pub directed: bool,
}

impl Parts {
    pub fn new(skeleton: Skeleton, directed: bool) -> Self {
        let n = skeleton.len();
        Parts { skeleton, comps: vec![Vec::new(); n], verts: Vec::new(), edges: Vec::new(), directed }
    }

    pub fn build(&self) -> Result<Diagram, DiagramError> {
        let mut index: HashMap<u32, u16> = HashMap::new();
        let mut next = 0u16;
        let mut comps = Vec::with_capacity(self.comps.len());
        if self.comps.len() != self.skeleton.len() {
            return Err(DiagramError::Structure("component count mismatch".into()));
        }
        for c in &self.comps {
            let mut v = Vec::with_capacity(c.len());
            for h in c {
                if index.insert(*h, next).is_some() {
                    return Err(DiagramError::Structure(format!("half-edge {h} used twice")));
                }
                v.push(next);
                next += 1;
            }
            comps.push(v);
        }
        for vt in &self.verts {
            for h in vt {
                if index.insert(*h, next).is_some() {
                    return Err(DiagramError::Structure(format!("half-edge {h} used twice")));
                }
                next += 1;
            }
        }
        let n = next as usize;
        if n > 64 {
            return Err(DiagramError::Structure("too many ports".into()));
        }
        let mut partner = vec![u16::MAX; n];
        let mut heads = 0u64;
        for &(a, b) in &self.edges {
            let (Some(&pa), Some(&pb)) = (index.get(&a), index.get(&b)) else {
                return Err(DiagramError::Structure(format!("edge {a}-{b} names an unknown half-edge")));
            };
            if pa == pb || partner[pa as usize] != u16::MAX || partner[pb as usize] != u16::MAX {
                return Err(DiagramError::Structure(format!("half-edge in edge {a}-{b} has wrong valence")));
            }
            partner[pa as usize] = pb;
            partner[pb as usize] = pa;
            heads |= 1 << pb;
        }
        if partner.contains(&u16::MAX) {
            return Err(DiagramError::Structure("unmatched half-edge".into()));
        }
        Ok(Diagram { skeleton: self.skeleton.clone(), comps, partner, heads: if self.directed { Some(heads) } else { None } })
    }
}

impl Diagram {
    pub fn empty(skeleton: Skeleton) -> Self {
        let n = skeleton.len();
        Diagram { skeleton, comps: vec![Vec::new(); n], partner: Vec::new(), heads: None }
    }

    pub fn empty_directed(skeleton: Skeleton) -> Self {
        let mut d = Self::empty(skeleton);
        d.heads = Some(0);
        d
    }

    pub fn n_legs(&self) -> usize {
        self.comps.iter().map(|c| c.len()).sum()
    }

    pub fn n_ports(&self) -> usize {
        self.partner.len()
    }

    pub fn n_internal(&self) -> usize {
        (self.n_ports() - self.n_legs()) / 3
    }

    pub fn degree(&self) -> usize {
        (self.n_legs() + self.n_internal()) / 2
    }

    pub fn is_directed(&self) -> bool {
        self.heads.is_some()
    }

    pub fn is_head(&self, p: usize) -> bool {
        self.heads.map(|h| h >> p & 1 == 1).unwrap_or(false)
    }

    pub fn vertex_of(&self, p: usize) -> Option<usize> {
        let l = self.n_legs();
        (p >= l).then(|| (p - l) / 3)
    }

    pub fn vertex_ports(&self, j: usize) -> [usize; 3] {
        let b = self.n_legs() + 3 * j;
        [b, b + 1, b + 2]
    }

    /// Component index of each leg.
    pub fn leg_comp(&self) -> Vec<usize> {
        let mut out = vec![0; self.n_legs()];
        for (ci, c) in self.comps.iter().enumerate() {
            for &l in c {
                out[l as usize] = ci;
            }
        }
        out
    }

    pub fn legs_on(&self, comp: usize) -> usize {
        self.comps[comp].len()
    }

    /// Name-based description, with half-edge names equal to port numbers.
    pub fn parts(&self) -> Parts {
        let l = self.n_legs();
        let mut edges = Vec::new();
        for p in 0..self.n_ports() {
            let q = self.partner[p] as usize;
            if self.is_directed() {
                if self.is_head(q) {
                    edges.push((p as u32, q as u32));
                }
            } else if p < q {
                edges.push((p as u32, q as u32));
            }
        }
        Parts {
            skeleton: self.skeleton.clone(),
            comps: self.comps.iter().map(|c| c.iter().map(|&x| x as u32).collect()).collect(),
            verts: (0..self.n_internal())
                .map(|j| {
                    let b = (l + 3 * j) as u32;
                    [b, b + 1, b + 2]
                })
                .collect(),
            edges,
            directed: self.is_directed(),
        }
    }

    /// True when every connected piece of the body reaches a leg.
    pub fn is_boundary_connected(&self) -> bool {
        let l = self.n_legs();
        let t = self.n_internal();
        let mut seen = vec![false; t];
        let mut stack: Vec<usize> = Vec::new();
        for p in 0..l {
            if let Some(v) = self.vertex_of(self.partner[p] as usize) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        while let Some(v) = stack.pop() {
            for p in self.vertex_ports(v) {
                if let Some(w) = self.vertex_of(self.partner[p] as usize) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// A directed diagram has a sink or a source among its internal vertices.
    pub fn violates_ns(&self) -> bool {
        if !self.is_directed() {
            return false;
        }
        (0..self.n_internal()).any(|j| {
            let hs = self.vertex_ports(j).iter().filter(|&&p| self.is_head(p)).count();
            hs == 0 || hs == 3
        })
    }

    /// A directed diagram whose body contains a directed cycle.
    pub fn has_directed_cycle(&self) -> bool {
        let t = self.n_internal();
        // out-neighbours among internal vertices
        let mut adj = vec![Vec::new(); t];
        for j in 0..t {
            for p in self.vertex_ports(j) {
                let q = self.partner[p] as usize;
                if self.is_head(q) {
                    if let Some(w) = self.vertex_of(q) {
                        adj[j].push(w);
                    }
                }
            }
        }
        let mut state = vec![0u8; t];
        fn dfs(v: usize, adj: &[Vec<usize>], state: &mut [u8]) -> bool {
            state[v] = 1;
            for &w in &adj[v] {
                if state[w] == 1 || (state[w] == 0 && dfs(w, adj, state)) {
                    return true;
                }
            }
            state[v] = 2;
            false
        }
        (0..t).any(|v| state[v] == 0 && dfs(v, &adj, &mut state))
    }

    /// Number of legs on `comp` whose arc points into the skeleton.
    pub fn incoming_legs(&self, comp: usize) -> usize {
        self.comps[comp].iter().filter(|&&l| self.is_head(l as usize)).count()
    }

    pub fn forget_directions(&self) -> Diagram {
        let mut d = self.clone();
        d.heads = None;
        d
    }

    pub fn to_text(&self, sign: i32) -> String {
        let mut s = String::new();
        s.push_str("skeleton");
        for c in &self.skeleton.0 {
            s.push(' ');
            s.push_str(&c.token());
        }
        s.push('\n');
        let name = |p: usize| -> String {
            match self.vertex_of(p) {
                None => format!("e{}", p + 1),
                Some(j) => format!("v{}{}", j + 1, ["a", "b", "c"][(p - self.n_legs()) % 3]),
            }
        };
        for (ci, c) in self.comps.iter().enumerate() {
            for (k, &l) in c.iter().enumerate() {
                match self.skeleton.0[ci] {
                    Comp::Color(_) => s.push_str(&format!("ext e{} {}\n", l + 1, ci + 1)),
                    _ => s.push_str(&format!("ext e{} {} {}\n", l + 1, ci + 1, k + 1)),
                }
            }
        }
        for j in 0..self.n_internal() {
            let [a, b, c] = self.vertex_ports(j);
            s.push_str(&format!("int v{} {} {} {}\n", j + 1, name(a), name(b), name(c)));
        }
        for (a, b) in self.parts().edges {
            if self.is_directed() {
                s.push_str(&format!("edge {} {} ->\n", name(a as usize), name(b as usize)));
            } else {
                s.push_str(&format!("edge {} {}\n", name(a as usize), name(b as usize)));
            }
        }
        s.push_str(if sign < 0 { "sign -1\n" } else { "sign +1\n" });
        s
    }
}

/// Parses records of the text format, each terminated by a blank line or end of input.
pub fn parse_diagrams(text: &str) -> Result<Vec<(Diagram, i32)>, DiagramError> {
    let mut out = Vec::new();
    let mut cur: Option<(usize, Vec<(usize, String)>)> = None;
    let lines: Vec<&str> = text.lines().collect();
    for (i, line) in lines.iter().enumerate() {
        let t = line.trim();
        if t.starts_with('#') {
            continue;
        }
        if t.is_empty() {
            if let Some((_, rec)) = cur.take() {
                out.push(parse_record(&rec)?);
            }
            continue;
        }
        cur.get_or_insert_with(|| (i, Vec::new())).1.push((i + 1, t.to_string()));
    }
    if let Some((_, rec)) = cur.take() {
        out.push(parse_record(&rec)?);
    }
    Ok(out)
}

fn parse_record(rec: &[(usize, String)]) -> Result<(Diagram, i32), DiagramError> {
    let (l0, first) = &rec[0];
    let sk = first.strip_prefix("skeleton").ok_or_else(|| DiagramError::Parse(*l0, "record must start with `skeleton`".into()))?;
    let skeleton = Skeleton(
        sk.split_whitespace()
            .map(|t| match t {
                "I" => Ok(Comp::Interval),
                "O" => Ok(Comp::Circle),
                _ if t.starts_with('*') => Ok(Comp::Color(t[1..].to_string())),
                _ => Err(DiagramError::Parse(*l0, format!("bad skeleton token `{t}`"))),
            })
            .collect::<Result<_, _>>()?,
    );
    let directed = rec.iter().any(|(_, l)| l.starts_with("edge") && l.ends_with("->"));
    let mut names: HashMap<String, u32> = HashMap::new();
    let mut intern = |s: &str| -> u32 {
        let n = names.len() as u32;
        *names.entry(s.to_string()).or_insert(n)
    };
    let mut placed: Vec<Vec<(usize, u32)>> = vec![Vec::new(); skeleton.len()];
    let mut parts = Parts::new(skeleton.clone(), directed);
    let mut sign = 1;
    for (ln, line) in &rec[1..] {
        let f: Vec<&str> = line.split_whitespace().collect();
        let err = |m: &str| DiagramError::Parse(*ln, m.to_string());
        match f[0] {
            "ext" => {
                if f.len() < 3 {
                    return Err(err("ext needs a vertex and a component"));
                }
                let c: usize = f[2].parse().map_err(|_| err("bad component index"))?;
                if c == 0 || c > skeleton.len() {
                    return Err(err("component index out of range"));
                }
                let pos: usize = match f.get(3) {
                    Some(p) => p.parse().map_err(|_| err("bad position"))?,
                    None => placed[c - 1].len() + 1,
                };
                let h = intern(f[1]);
                placed[c - 1].push((pos, h));
            }
            "int" => {
                if f.len() != 5 {
                    return Err(err("int needs a vertex and three half-edges"));
                }
                parts.verts.push([intern(f[2]), intern(f[3]), intern(f[4])]);
            }
            "edge" => {
                if f.len() < 3 {
                    return Err(err("edge needs two half-edges"));
                }
                parts.edges.push((intern(f[1]), intern(f[2])));
            }
            "sign" => {
                sign = match f.get(1) {
                    Some(&"+1") | Some(&"1") => 1,
                    Some(&"-1") => -1,
                    _ => return Err(err("sign must be +1 or -1")),
                }
            }
            other => return Err(err(&format!("unknown record line `{other}`"))),
        }
    }
    for (c, mut v) in placed.into_iter().enumerate() {
        v.sort();
        for (k, (p, _)) in v.iter().enumerate() {
            if *p != k + 1 && skeleton.0[c].is_line() {
                return Err(DiagramError::Parse(rec[0].0, format!("positions on component {} have gaps", c + 1)));
            }
        }
        parts.comps[c] = v.into_iter().map(|x| x.1).collect();
    }
    let d = parts.build().map_err(|e| DiagramError::Parse(rec[0].0, e.to_string()))?;
    Ok((d, sign))
}

// ---------------------------------------------------------------------------
// Canonical forms

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonicalForm {
    Zero,
    Diagram(Diagram, i32),
}

struct Ctx<'a> {
    d: &'a Diagram,
    n: usize,
    l: usize,
    mates: Vec<[u16; 2]>,
    succ: Vec<u16>,
    pred: Vec<u16>,
}

struct Best {
    code: Option<(Vec<u16>, u64)>,
    sign: i32,
    conflict: bool,
    labels: Vec<u32>,
}

fn rank_normalize(keys: &[u64]) -> (Vec<u32>, usize) {
    let mut sorted: Vec<u64> = keys.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let out = keys.iter().map(|k| sorted.binary_search(k).unwrap() as u32).collect();
    (out, sorted.len())
}

impl<'a> Ctx<'a> {
    fn new(d: &'a Diagram) -> Self {
        let n = d.n_ports();
        let l = d.n_legs();
        let mut mates = vec![[u16::MAX; 2]; n];
        for j in 0..d.n_internal() {
            let [a, b, c] = d.vertex_ports(j);
            mates[a] = [b as u16, c as u16];
            mates[b] = [a as u16, c as u16];
            mates[c] = [a as u16, b as u16];
        }
        let mut succ = vec![u16::MAX; n];
        let mut pred = vec![u16::MAX; n];
        for (ci, c) in d.comps.iter().enumerate() {
            if d.skeleton.0[ci] == Comp::Circle && !c.is_empty() {
                for k in 0..c.len() {
                    let nx = c[(k + 1) % c.len()];
                    succ[c[k] as usize] = nx;
                    pred[nx as usize] = c[k];
                }
            }
        }
        Ctx { d, n, l, mates, succ, pred }
    }

    fn initial(&self) -> Vec<u32> {
        let mut keys = vec![0u64; self.n];
        for (ci, c) in self.d.comps.iter().enumerate() {
            for (k, &p) in c.iter().enumerate() {
                let kind = match self.d.skeleton.0[ci] {
                    Comp::Interval => (0u64, ci as u64, k as u64 + 1),
                    Comp::Circle => (1, ci as u64, 0),
                    Comp::Color(_) => (2, ci as u64, 0),
                };
                keys[p as usize] = (kind.0 << 40) | (kind.1 << 24) | (kind.2 << 8);
            }
        }
        for p in self.l..self.n {
            keys[p] = 3u64 << 40;
        }
        for p in 0..self.n {
            if self.d.is_head(p) {
                keys[p] |= 1;
            }
        }
        rank_normalize(&keys).0
    }

    fn refine(&self, mut col: Vec<u32>) -> Vec<u32> {
        let mut cells = {
            let mut c = col.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let mut sigs: Vec<(u32, u32, u32, u32, u32, u32, usize)> = Vec::with_capacity(self.n);
            for p in 0..self.n {
                let m = self.mates[p];
                let (a, b) = if m[0] == u16::MAX {
                    (u32::MAX, u32::MAX)
                } else {
                    let (x, y) = (col[m[0] as usize], col[m[1] as usize]);
                    (x.min(y), x.max(y))
                };
                let s = if self.succ[p] == u16::MAX { u32::MAX } else { col[self.succ[p] as usize] };
                let pr = if self.pred[p] == u16::MAX { u32::MAX } else { col[self.pred[p] as usize] };
                sigs.push((col[p], col[self.d.partner[p] as usize], a, b, s, pr, p));
            }
            let mut order: Vec<usize> = (0..self.n).collect();
            order.sort_by(|&x, &y| {
                let (sx, sy) = (&sigs[x], &sigs[y]);
                (sx.0, sx.1, sx.2, sx.3, sx.4, sx.5).cmp(&(sy.0, sy.1, sy.2, sy.3, sy.4, sy.5))
            });
            let mut newc = vec![0u32; self.n];
            let mut k = 0u32;
            for i in 0..self.n {
                if i > 0 {
                    let (a, b) = (&sigs[order[i - 1]], &sigs[order[i]]);
                    if (a.0, a.1, a.2, a.3, a.4, a.5) != (b.0, b.1, b.2, b.3, b.4, b.5) {
                        k += 1;
                    }
                }
                newc[order[i]] = k;
            }
            let nc = if self.n == 0 { 0 } else { k as usize + 1 };
            col = newc;
            if nc == cells {
                return col;
            }
            cells = nc;
        }
    }

    /// Canonical code of a discrete labeling, with the orientation sign.
    fn leaf(&self, lab: &[u32]) -> (Vec<u16>, u64, i32, Vec<u32>) {
        let d = self.d;
        let mut newp = vec![0u16; self.n];
        let mut next = 0u16;
        for (ci, c) in d.comps.iter().enumerate() {
            let mut seq: Vec<u16> = c.clone();
            match d.skeleton.0[ci] {
                Comp::Interval => {}
                Comp::Circle => {
                    if let Some(k) = (0..seq.len()).min_by_key(|&k| lab[seq[k] as usize]) {
                        seq.rotate_left(k);
                    }
                }
                Comp::Color(_) => seq.sort_by_key(|&p| lab[p as usize]),
            }
            for p in seq {
                newp[p as usize] = next;
                next += 1;
            }
        }
        let t = d.n_internal();
        let mut verts: Vec<(u32, usize)> = (0..t).map(|j| (d.vertex_ports(j).iter().map(|&p| lab[p]).min().unwrap(), j)).collect();
        verts.sort_unstable();
        let mut sign = 1;
        for (_, j) in verts {
            let ports = d.vertex_ports(j);
            let mut sorted = ports;
            sorted.sort_by_key(|&p| lab[p]);
            for p in sorted {
                newp[p] = next;
                next += 1;
            }
            // cyclic order preserved iff the labels are a rotation of ascending
            let r: Vec<u32> = ports.iter().map(|&p| lab[p]).collect();
            let ascending_rotation = (r[0] < r[1] && r[1] < r[2]) || (r[1] < r[2] && r[2] < r[0]) || (r[2] < r[0] && r[0] < r[1]);
            if !ascending_rotation {
                sign = -sign;
            }
        }
        let mut code = vec![0u16; self.n];
        let mut heads = 0u64;
        for p in 0..self.n {
            code[newp[p] as usize] = newp[d.partner[p] as usize];
            if d.is_head(p) {
                heads |= 1 << newp[p];
            }
        }
        (code, heads, sign, newp.iter().map(|&x| x as u32).collect())
    }

    fn search(&self, col: Vec<u32>, best: &mut Best) {
        let col = self.refine(col);
        let mut counts = vec![0u32; self.n];
        for &c in &col {
            counts[c as usize] += 1;
        }
        let target = (0..self.n).find(|&c| counts[c] > 1);
        let Some(tc) = target else {
            let (code, heads, sign, newp) = self.leaf(&col);
            let key = (code, heads);
            match &best.code {
                Some(b) if key > *b => {}
                Some(b) if key == *b => {
                    if sign != best.sign {
                        best.conflict = true;
                    }
                }
                _ => {
                    best.code = Some(key);
                    best.sign = sign;
                    best.conflict = false;
                    best.labels = newp;
                }
            }
            return;
        };
        let cell: Vec<usize> = (0..self.n).filter(|&p| col[p] as usize == tc).collect();
        for &p in &cell {
            let keys: Vec<u64> = (0..self.n).map(|q| 2 * col[q] as u64 + u64::from(col[q] as usize == tc && q != p)).collect();
            let (c2, _) = rank_normalize(&keys);
            self.search(c2, best);
        }
    }
}

pub fn canonicalize(d: &Diagram) -> CanonicalForm {
    let ctx = Ctx::new(d);
    let mut best = Best { code: None, sign: 1, conflict: false, labels: Vec::new() };
    ctx.search(ctx.initial(), &mut best);
    if best.conflict {
        return CanonicalForm::Zero;
    }
    let Some((code, heads)) = best.code else {
        return CanonicalForm::Diagram(d.clone(), 1);
    };
    let mut comps = Vec::with_capacity(d.comps.len());
    let mut next = 0u16;
    for c in &d.comps {
        comps.push((next..next + c.len() as u16).collect());
        next += c.len() as u16;
    }
    CanonicalForm::Diagram(Diagram { skeleton: d.skeleton.clone(), comps, partner: code, heads: d.heads.map(|_| heads) }, best.sign)
}

// ---------------------------------------------------------------------------
// Intern table

pub type DiagId = u32;

#[derive(Default)]
struct Interner {
    ids: HashMap<Arc<Diagram>, DiagId>,
    diagrams: Vec<Arc<Diagram>>,
}

fn interner() -> &'static RwLock<Interner> {
    static I: OnceLock<RwLock<Interner>> = OnceLock::new();
    I.get_or_init(|| RwLock::new(Interner::default()))
}

/// Interns a diagram that is already canonical.
pub fn intern(d: Diagram) -> DiagId {
    if let Some(&id) = interner().read().unwrap().ids.get(&d) {
        return id;
    }
    let mut w = interner().write().unwrap();
    if let Some(&id) = w.ids.get(&d) {
        return id;
    }
    let id = w.diagrams.len() as DiagId;
    let a = Arc::new(d);
    w.diagrams.push(a.clone());
    w.ids.insert(a, id);
    id
}

pub fn diagram(id: DiagId) -> Arc<Diagram> {
    interner().read().unwrap().diagrams[id as usize].clone()
}

const SHARDS: usize = 32;
type Cache = Mutex<HashMap<Diagram, Option<(DiagId, i32)>>>;

fn cache() -> &'static Vec<Cache> {
    static C: OnceLock<Vec<Cache>> = OnceLock::new();
    C.get_or_init(|| (0..SHARDS).map(|_| Mutex::new(HashMap::new())).collect())
}

/// Canonicalizes and interns; `None` for self-negating diagrams.
pub fn canon_id(d: &Diagram) -> Option<(DiagId, i32)> {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    d.hash(&mut h);
    let shard = &cache()[(h.finish() as usize) % SHARDS];
    if let Some(r) = shard.lock().unwrap().get(d) {
        return *r;
    }
    let r = match canonicalize(d) {
        CanonicalForm::Zero => None,
        CanonicalForm::Diagram(c, s) => Some((intern(c), s)),
    };
    let mut g = shard.lock().unwrap();
    if g.len() > 2_000_000 {
        g.clear();
    }
    g.insert(d.clone(), r);
    r
}

// ---------------------------------------------------------------------------
// Enumeration

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("resource guard: more than {limit} diagrams on {skeleton} in degree {degree}")]
pub struct GuardExceeded {
    pub limit: usize,
    pub skeleton: String,
    pub degree: usize,
}

fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
    if cur.len() + 1 == parts {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for k in 0..=total {
        cur.push(k);
        compositions(total - k, parts, out, cur);
        cur.pop();
    }
}

/// Calls `f` on every port-labelled graph of degree `m` on `s` with `t` internal vertices,
/// generated by matching the smallest open port first. Each isomorphism class appears at least once.
fn for_each_graph(s: &Skeleton, m: usize, only_t: Option<usize>, closed_ok: bool, f: &mut dyn FnMut(&Diagram) -> bool) -> bool {
    for t in 0..=2 * m {
        if only_t.is_some_and(|x| x != t) {
            continue;
        }
        let l = 2 * m - t;
        if s.is_empty() && l > 0 {
            continue;
        }
        let mut dists = Vec::new();
        if s.is_empty() {
            dists.push(Vec::new());
        } else {
            compositions(l, s.len(), &mut dists, &mut Vec::new());
        }
        for dist in dists {
            let mut comps = Vec::new();
            let mut next = 0u16;
            for &k in &dist {
                comps.push((next..next + k as u16).collect::<Vec<u16>>());
                next += k as u16;
            }
            let mut d = Diagram { skeleton: s.clone(), comps, partner: vec![u16::MAX; l + 3 * t], heads: None };
            if !graph_rec(&mut d, l, t, 0, closed_ok, f) {
                return false;
            }
        }
    }
    true
}

fn graph_rec(d: &mut Diagram, l: usize, t: usize, created: usize, closed_ok: bool, f: &mut dyn FnMut(&Diagram) -> bool) -> bool {
    let n = l + 3 * created;
    let p = (0..n).find(|&p| d.partner[p] == u16::MAX);
    let Some(p) = p else {
        if created == t {
            return f(d);
        } else if closed_ok {
            return graph_rec(d, l, t, created + 1, closed_ok, f);
        }
        return true;
    };
    for q in p + 1..n {
        if d.partner[q] == u16::MAX {
            d.partner[p] = q as u16;
            d.partner[q] = p as u16;
            let ok = graph_rec(d, l, t, created, closed_ok, f);
            d.partner[p] = u16::MAX;
            d.partner[q] = u16::MAX;
            if !ok {
                return false;
            }
        }
    }
    if created < t {
        let v0 = l + 3 * created;
        d.partner[p] = v0 as u16;
        d.partner[v0] = p as u16;
        let ok = graph_rec(d, l, t, created + 1, closed_ok, f);
        d.partner[p] = u16::MAX;
        d.partner[v0] = u16::MAX;
        if !ok {
            return false;
        }
    }
    true
}

/// Orientation-free isomorphism key (the minimal code over all labelings).
pub fn shape_key(d: &Diagram) -> (Vec<u16>, u64) {
    let ctx = Ctx::new(d);
    let mut best = Best { code: None, sign: 1, conflict: false, labels: Vec::new() };
    ctx.search(ctx.initial(), &mut best);
    let (mut code, heads) = best.code.unwrap_or_default();
    // legs per component are part of the shape
    code.push(u16::MAX);
    code.extend(d.comps.iter().map(|c| c.len() as u16));
    (code, heads)
}

/// All undirected canonical diagrams of degree exactly `m` (Zero classes dropped).
pub fn enumerate_undirected(s: &Skeleton, m: usize, boundary_connected: bool, limit: usize) -> Result<Vec<DiagId>, GuardExceeded> {
    let mut found = BTreeSet::new();
    let ok = for_each_graph(s, m, None, !boundary_connected, &mut |d| {
        if let Some((id, _)) = canon_id(d) {
            found.insert(id);
        }
        found.len() <= limit
    });
    if !ok {
        return Err(GuardExceeded { limit, skeleton: s.to_string(), degree: m });
    }
    let mut v: Vec<DiagId> = found.into_iter().collect();
    sort_ids(&mut v);
    Ok(v)
}

/// All 2^arcs directed versions of an undirected diagram.
pub fn all_directions(d: &Diagram) -> Vec<Diagram> {
    let arcs: Vec<(usize, usize)> = (0..d.n_ports())
        .filter_map(|p| {
            let q = d.partner[p] as usize;
            (p < q).then_some((p, q))
        })
        .collect();
    let mut out = Vec::with_capacity(1 << arcs.len());
    for mask in 0u64..(1u64 << arcs.len()) {
        let mut h = 0u64;
        for (i, &(p, q)) in arcs.iter().enumerate() {
            h |= 1 << if mask >> i & 1 == 1 { p } else { q };
        }
        let mut dd = d.clone();
        dd.heads = Some(h);
        out.push(dd);
    }
    out
}

pub fn enumerate_diagrams(
    s: &Skeleton,
    m: usize,
    directed: bool,
    boundary_connected: bool,
    limit: usize,
) -> Result<Vec<DiagId>, GuardExceeded> {
    if !directed {
        return enumerate_undirected(s, m, boundary_connected, limit);
    }
    // undirected shapes that vanish by AS can still carry nonzero directed versions,
    // so shapes are deduplicated without reference to orientation
    let mut shapes: HashMap<(Vec<u16>, u64), Diagram> = HashMap::new();
    let ok = for_each_graph(s, m, None, !boundary_connected, &mut |d| {
        shapes.entry(shape_key(d)).or_insert_with(|| d.clone());
        shapes.len() <= limit
    });
    if !ok {
        return Err(GuardExceeded { limit, skeleton: s.to_string(), degree: m });
    }
    let mut found = BTreeSet::new();
    for d in shapes.values() {
        for dd in all_directions(d) {
            if let Some((c, _)) = canon_id(&dd) {
                found.insert(c);
            }
        }
        if found.len() > limit.saturating_mul(64) {
            return Err(GuardExceeded { limit, skeleton: s.to_string(), degree: m });
        }
    }
    let mut v: Vec<DiagId> = found.into_iter().collect();
    sort_ids(&mut v);
    Ok(v)
}

pub fn enumerate_chord_diagrams(s: &Skeleton, m: usize) -> Vec<DiagId> {
    assert!(s.is_one_dimensional(), "chord diagrams need a one-dimensional skeleton");
    let mut found = BTreeSet::new();
    for_each_graph(s, m, Some(0), false, &mut |d| {
        if let Some((id, _)) = canon_id(d) {
            found.insert(id);
        }
        true
    });
    let mut v: Vec<DiagId> = found.into_iter().collect();
    sort_ids(&mut v);
    v
}

/// Undirected boundary-connected diagrams of degree `m` with exactly `t` internal vertices.
pub fn enumerate_with_internal(s: &Skeleton, m: usize, t: usize) -> Vec<DiagId> {
    let mut found = BTreeSet::new();
    for_each_graph(s, m, Some(t), false, &mut |d| {
        if let Some((id, _)) = canon_id(d) {
            found.insert(id);
        }
        true
    });
    let mut v: Vec<DiagId> = found.into_iter().collect();
    sort_ids(&mut v);
    v
}

/// Deterministic ordering of diagram ids, independent of interning order.
pub fn sort_ids(v: &mut [DiagId]) {
    v.sort_by_key(|a| diagram(*a));
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn chord_on_up() -> Diagram {
        let mut p = Parts::new(Skeleton::intervals(1), false);
        p.comps[0] = vec![10, 11];
        p.edges.push((10, 11));
        p.build().unwrap()
    }

    fn tadpole(directed: bool, leg_in: bool) -> Diagram {
        let mut p = Parts::new(Skeleton::intervals(1), directed);
        p.comps[0] = vec![0];
        p.verts.push([1, 2, 3]);
        if leg_in {
            p.edges.push((1, 0));
        } else {
            p.edges.push((0, 1));
        }
        p.edges.push((2, 3));
        p.build().unwrap()
    }

    #[test]
    fn chord_canonical() {
        let d = chord_on_up();
        match canonicalize(&d) {
            CanonicalForm::Diagram(c, s) => {
                assert_eq!(s, 1);
                assert_eq!(canonicalize(&c), CanonicalForm::Diagram(c.clone(), 1));
            }
            CanonicalForm::Zero => panic!(),
        }
    }

    #[test]
    fn undirected_tadpole_is_zero() {
        assert_eq!(canonicalize(&tadpole(false, true)), CanonicalForm::Zero);
    }

    #[test]
    fn directed_tadpole_is_nonzero() {
        assert_ne!(canonicalize(&tadpole(true, true)), CanonicalForm::Zero);
        assert_ne!(canonicalize(&tadpole(true, false)), CanonicalForm::Zero);
    }

    fn y_diagram(order: [u32; 3]) -> Diagram {
        let mut p = Parts::new(Skeleton::intervals(1), false);
        p.comps[0] = vec![0, 1, 2];
        p.verts.push([10 + order[0], 10 + order[1], 10 + order[2]]);
        for i in 0..3 {
            p.edges.push((i, 10 + i));
        }
        p.build().unwrap()
    }

    #[test]
    fn as_pair_opposite_signs() {
        let (a, b) = (canonicalize(&y_diagram([0, 1, 2])), canonicalize(&y_diagram([0, 2, 1])));
        match (a, b) {
            (CanonicalForm::Diagram(x, s), CanonicalForm::Diagram(y, t)) => {
                assert_eq!(x, y);
                assert_eq!(s, -t);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn chord_counts() {
        // crossing and non-crossing: nested and disjoint pairs are rotations of each other
        assert_eq!(enumerate_chord_diagrams(&Skeleton::circle(), 2).len(), 2);
        assert_eq!(enumerate_chord_diagrams(&Skeleton::intervals(1), 2).len(), 3);
        assert_eq!(enumerate_chord_diagrams(&Skeleton::intervals(1), 1).len(), 1);
        assert_eq!(enumerate_chord_diagrams(&Skeleton::circle(), 0).len(), 1);
    }

    #[test]
    fn small_enumerations() {
        let up = Skeleton::intervals(1);
        assert_eq!(enumerate_diagrams(&up, 1, false, true, 1000).unwrap().len(), 1);
        // the theta graph joins the chord once closed components are allowed
        assert_eq!(enumerate_diagrams(&up, 1, false, false, 1000).unwrap().len(), 2);
        assert_eq!(enumerate_diagrams(&Skeleton::color(""), 1, false, true, 1000).unwrap().len(), 1);
        // both chord directions and both tadpole leg directions
        assert_eq!(enumerate_diagrams(&up, 1, true, true, 1000).unwrap().len(), 4);
    }

    #[test]
    fn text_roundtrip() {
        let d = y_diagram([0, 1, 2]);
        let CanonicalForm::Diagram(c, _) = canonicalize(&d) else { panic!() };
        let txt = c.to_text(-1);
        let parsed = parse_diagrams(&txt).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].1, -1);
        assert_eq!(canonicalize(&parsed[0].0), CanonicalForm::Diagram(c, 1));
        let dt = tadpole(true, true);
        let txt = dt.to_text(1);
        assert_eq!(canonicalize(&parse_diagrams(&txt).unwrap()[0].0), canonicalize(&dt));
    }
}
