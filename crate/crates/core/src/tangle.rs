//! Parenthesized framed tangles as words in the associativity, braiding and creation and
//! annihilation generators; decorated skeletons and their composition; the invariant Z_H of a
//! quasitriangular quasi-Hopf structure on a diagram algebra, and twisting.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagram::{enumerate_chord_diagrams, Comp, Skeleton};
use crate::horizontal::{embed_hor, Associator};
use crate::linalg::q;
use crate::maps::{self, contract, MapError, Piece};
use crate::spaces::{space, RelSet, SpaceError};
use crate::sum::FormalSum;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TangleError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("generator {0} has domain {1} but the previous target is {2}")]
    NotComposable(usize, String, String),
    #[error("cannot stack: target {0} differs from domain {1}")]
    Mismatch(String, String),
    #[error("degenerate twist: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arrow {
    Up,
    Down,
}

impl Arrow {
    pub fn letter(self) -> char {
        match self {
            Arrow::Up => 'u',
            Arrow::Down => 'd',
        }
    }
}

pub fn arrows_text(w: &[Arrow]) -> String {
    if w.is_empty() {
        "e".into()
    } else {
        w.iter().map(|a| a.letter()).collect()
    }
}

/// A fully parenthesized word over {↑, ↓}, possibly with one star slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Paren {
    Empty,
    Leaf(Arrow),
    Star,
    Pair(Box<Paren>, Box<Paren>),
}

impl Paren {
    pub fn up() -> Paren {
        Paren::Leaf(Arrow::Up)
    }

    pub fn down() -> Paren {
        Paren::Leaf(Arrow::Down)
    }

    /// The product of two words; an empty factor is dropped together with its parentheses.
    pub fn pair(a: Paren, b: Paren) -> Paren {
        match (a, b) {
            (Paren::Empty, b) => b,
            (a, Paren::Empty) => a,
            (a, b) => Paren::Pair(Box::new(a), Box::new(b)),
        }
    }

    pub fn parse(s: &str) -> Result<Paren, String> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() || chars == ['e'] || chars == ['(', ')'] {
            return Ok(Paren::Empty);
        }
        let mut pos = 0;
        let p = parse_term(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(format!("trailing input in `{s}`"));
        }
        Ok(p)
    }

    pub fn arrows(&self) -> Vec<Arrow> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<Arrow>) {
        match self {
            Paren::Leaf(a) => out.push(*a),
            Paren::Pair(a, b) => {
                a.collect(out);
                b.collect(out);
            }
            _ => {}
        }
    }

    pub fn len(&self) -> usize {
        self.arrows().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stars(&self) -> usize {
        match self {
            Paren::Star => 1,
            Paren::Pair(a, b) => a.stars() + b.stars(),
            _ => 0,
        }
    }

    /// Arrows to the left and to the right of the star.
    pub fn star_offsets(&self) -> (usize, usize) {
        fn walk(p: &Paren, seen: &mut bool, left: &mut usize, right: &mut usize) {
            match p {
                Paren::Star => *seen = true,
                Paren::Leaf(_) => {
                    if *seen {
                        *right += 1
                    } else {
                        *left += 1
                    }
                }
                Paren::Pair(a, b) => {
                    walk(a, seen, left, right);
                    walk(b, seen, left, right);
                }
                Paren::Empty => {}
            }
        }
        let (mut seen, mut l, mut r) = (false, 0, 0);
        walk(self, &mut seen, &mut l, &mut r);
        (l, r)
    }

    /// W/{⋆ → A}.
    pub fn substitute(&self, a: &Paren) -> Paren {
        match self {
            Paren::Star => a.clone(),
            Paren::Pair(x, y) => Paren::pair(x.substitute(a), y.substitute(a)),
            other => other.clone(),
        }
    }
}

fn parse_term(c: &[char], pos: &mut usize) -> Result<Paren, String> {
    let Some(&ch) = c.get(*pos) else {
        return Err("unexpected end of word".into());
    };
    *pos += 1;
    match ch {
        'u' | '↑' => Ok(Paren::up()),
        'd' | '↓' => Ok(Paren::down()),
        'e' => Ok(Paren::Empty),
        '*' | '⋆' => {
            if c.get(*pos) == Some(&'?') {
                *pos += 1;
            }
            Ok(Paren::Star)
        }
        '(' => {
            let a = parse_term(c, pos)?;
            if a == Paren::Star && c.get(*pos) == Some(&')') {
                *pos += 1;
                return Ok(Paren::Star);
            }
            let b = parse_term(c, pos)?;
            if c.get(*pos) != Some(&')') {
                return Err("parentheses must enclose exactly two factors".into());
            }
            *pos += 1;
            Ok(Paren::pair(a, b))
        }
        other => Err(format!("unexpected character `{other}`")),
    }
}

impl fmt::Display for Paren {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Paren::Empty => write!(f, "e"),
            Paren::Leaf(a) => write!(f, "{}", a.letter()),
            Paren::Star => write!(f, "*"),
            Paren::Pair(a, b) => write!(f, "({a}{b})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenKind {
    /// Identity on the object W.
    Id,
    Ra,
    La,
    Ov,
    Un,
    Cp,
    Cn,
    Ap,
    An,
}

impl GenKind {
    pub fn name(self) -> &'static str {
        match self {
            GenKind::Id => "id",
            GenKind::Ra => "ra",
            GenKind::La => "la",
            GenKind::Ov => "ov",
            GenKind::Un => "un",
            GenKind::Cp => "cp",
            GenKind::Cn => "cn",
            GenKind::Ap => "ap",
            GenKind::An => "an",
        }
    }

    fn from_name(s: &str) -> Option<GenKind> {
        Some(match s {
            "id" => GenKind::Id,
            "ra" => GenKind::Ra,
            "la" => GenKind::La,
            "ov" => GenKind::Ov,
            "un" => GenKind::Un,
            "cp" => GenKind::Cp,
            "cn" => GenKind::Cn,
            "ap" => GenKind::Ap,
            "an" => GenKind::An,
            _ => return None,
        })
    }

    fn bundles(self) -> usize {
        match self {
            GenKind::Ra | GenKind::La => 3,
            GenKind::Ov | GenKind::Un => 2,
            _ => 0,
        }
    }
}

/// One generator application: a context W (with a star, or the object itself for `id`) and
/// the bundles A, B, C it acts on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub kind: GenKind,
    pub w: Paren,
    pub a: Paren,
    pub b: Paren,
    pub c: Paren,
}

fn down_up() -> Paren {
    Paren::pair(Paren::down(), Paren::up())
}

fn up_down() -> Paren {
    Paren::pair(Paren::up(), Paren::down())
}

impl Generator {
    pub fn new(kind: GenKind, w: Paren, a: Paren, b: Paren, c: Paren) -> Self {
        Generator { kind, w, a, b, c }
    }

    pub fn domain(&self) -> Paren {
        let (a, b, c) = (self.a.clone(), self.b.clone(), self.c.clone());
        let inner = match self.kind {
            GenKind::Id => return self.w.clone(),
            GenKind::Ra => Paren::pair(Paren::pair(a, b), c),
            GenKind::La => Paren::pair(a, Paren::pair(b, c)),
            GenKind::Ov | GenKind::Un => Paren::pair(a, b),
            GenKind::Cp | GenKind::Cn => Paren::Empty,
            GenKind::Ap => down_up(),
            GenKind::An => up_down(),
        };
        self.w.substitute(&inner)
    }

    pub fn target(&self) -> Paren {
        let (a, b, c) = (self.a.clone(), self.b.clone(), self.c.clone());
        let inner = match self.kind {
            GenKind::Id => return self.w.clone(),
            GenKind::Ra => Paren::pair(a, Paren::pair(b, c)),
            GenKind::La => Paren::pair(Paren::pair(a, b), c),
            GenKind::Ov | GenKind::Un => Paren::pair(b, a),
            GenKind::Cp => down_up(),
            GenKind::Cn => up_down(),
            GenKind::Ap | GenKind::An => Paren::Empty,
        };
        self.w.substitute(&inner)
    }

    pub fn to_line(&self) -> String {
        let mut s = format!("{} W={}", self.kind.name(), self.w);
        let names = ["A", "B", "C"];
        let vals = [&self.a, &self.b, &self.c];
        for k in 0..self.kind.bundles() {
            s.push_str(&format!(" {}={}", names[k], vals[k]));
        }
        s
    }

    pub fn parse_line(line: &str, lineno: usize) -> Result<Generator, TangleError> {
        let err = |m: String| TangleError::Parse(lineno, m);
        let mut it = line.split_whitespace();
        let kw = it.next().ok_or_else(|| err("empty line".into()))?;
        let kind = GenKind::from_name(kw).ok_or_else(|| err(format!("unknown generator `{kw}`")))?;
        let mut w = None;
        let mut abc: [Option<Paren>; 3] = [None, None, None];
        for tok in it {
            let (k, v) = tok.split_once('=').ok_or_else(|| err(format!("expected key=value, found `{tok}`")))?;
            let p = Paren::parse(v).map_err(&err)?;
            match k {
                "W" => w = Some(p),
                "A" => abc[0] = Some(p),
                "B" => abc[1] = Some(p),
                "C" => abc[2] = Some(p),
                _ => return Err(err(format!("unknown key `{k}`"))),
            }
        }
        let w = w.unwrap_or(if kind == GenKind::Id { Paren::Empty } else { Paren::Star });
        let stars = w.stars();
        if kind == GenKind::Id && stars != 0 {
            return Err(err("the identity takes an object without a star".into()));
        }
        if kind != GenKind::Id && stars != 1 {
            return Err(err(format!("context must contain exactly one star, found {stars}")));
        }
        let need = kind.bundles();
        let mut vals = Vec::new();
        for (i, v) in abc.into_iter().enumerate() {
            match (i < need, v) {
                (true, Some(p)) => {
                    if p.stars() != 0 {
                        return Err(err("bundles cannot contain a star".into()));
                    }
                    vals.push(p)
                }
                (true, None) => return Err(err(format!("{} needs bundle {}", kw, ["A", "B", "C"][i]))),
                (false, Some(_)) => return Err(err(format!("{} takes {} bundles", kw, need))),
                (false, None) => vals.push(Paren::Empty),
            }
        }
        let c = vals.pop().unwrap();
        let b = vals.pop().unwrap();
        let a = vals.pop().unwrap();
        Ok(Generator { kind, w, a, b, c })
    }
}

/// A composable sequence of generators, bottom to top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangleWord {
    pub gens: Vec<Generator>,
}

impl TangleWord {
    pub fn new(gens: Vec<Generator>) -> Result<Self, TangleError> {
        let t = TangleWord { gens };
        t.check()?;
        Ok(t)
    }

    pub fn parse(text: &str) -> Result<Self, TangleError> {
        let mut gens = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            gens.push(Generator::parse_line(line, i + 1)?);
        }
        if gens.is_empty() {
            return Err(TangleError::Parse(0, "no generators".into()));
        }
        TangleWord::new(gens)
    }

    pub fn check(&self) -> Result<(), TangleError> {
        for (i, w) in self.gens.windows(2).enumerate() {
            let (t, d) = (w[0].target(), w[1].domain());
            if t != d {
                return Err(TangleError::NotComposable(i + 2, d.to_string(), t.to_string()));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Paren {
        self.gens.first().map(|g| g.domain()).unwrap_or(Paren::Empty)
    }

    pub fn target(&self) -> Paren {
        self.gens.last().map(|g| g.target()).unwrap_or(Paren::Empty)
    }

    pub fn to_text(&self) -> String {
        self.gens.iter().map(|g| g.to_line() + "\n").collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Bottom(usize),
    Top(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strand {
    Arc { tail: End, head: End },
    Circle,
}

fn arc(a: Arrow, bottom: usize, top: usize) -> Strand {
    match a {
        Arrow::Up => Strand::Arc { tail: End::Bottom(bottom), head: End::Top(top) },
        Arrow::Down => Strand::Arc { tail: End::Top(top), head: End::Bottom(bottom) },
    }
}

/// A morphism of decorated skeletons: endpoint data of each component and the decorating sum,
/// whose skeleton lists the components in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decorated {
    pub domain: Vec<Arrow>,
    pub target: Vec<Arrow>,
    pub strands: Vec<Strand>,
    pub deco: FormalSum,
}

impl Decorated {
    pub fn identity(w: &[Arrow], directed: bool, cap: usize) -> Self {
        Decorated {
            domain: w.to_vec(),
            target: w.to_vec(),
            strands: w.iter().enumerate().map(|(i, &a)| arc(a, i, i)).collect(),
            deco: FormalSum::one(Skeleton::intervals(w.len()), directed, cap),
        }
    }

    /// Stacks `upper` on top of `self`; glued intervals multiply tail to head, closed loops
    /// become circles, and components are ordered by their smallest order tag.
    pub fn compose(&self, upper: &Decorated) -> Result<Decorated, TangleError> {
        if self.target != upper.domain {
            return Err(TangleError::Mismatch(arrows_text(&self.target), arrows_text(&upper.domain)));
        }
        let k1 = self.strands.len();
        let all: Vec<Strand> = self.strands.iter().chain(upper.strands.iter()).copied().collect();
        let lower = |i: usize| i < k1;
        let find_tail = |want: End, in_lower: bool| {
            (0..all.len()).find(|&j| lower(j) == in_lower && matches!(all[j], Strand::Arc { tail, .. } if tail == want))
        };
        let next = |i: usize| -> Option<usize> {
            let Strand::Arc { head, .. } = all[i] else { return None };
            match (lower(i), head) {
                (true, End::Top(p)) => find_tail(End::Bottom(p), false),
                (false, End::Bottom(p)) => find_tail(End::Top(p), true),
                _ => None,
            }
        };
        let external_tail = |i: usize| match all[i] {
            Strand::Arc { tail: End::Bottom(_), .. } => lower(i),
            Strand::Arc { tail: End::Top(_), .. } => !lower(i),
            Strand::Circle => false,
        };
        let mut visited = vec![false; all.len()];
        let mut groups: Vec<(usize, Vec<usize>, Strand)> = Vec::new();
        for i in 0..all.len() {
            if !external_tail(i) {
                continue;
            }
            let mut chain = vec![i];
            visited[i] = true;
            let mut cur = i;
            while let Some(n) = next(cur) {
                chain.push(n);
                visited[n] = true;
                cur = n;
            }
            let Strand::Arc { tail, .. } = all[i] else { unreachable!() };
            let Strand::Arc { head, .. } = all[cur] else { unreachable!() };
            let tag = *chain.iter().min().unwrap();
            groups.push((tag, chain, Strand::Arc { tail, head }));
        }
        for i in 0..all.len() {
            if visited[i] {
                continue;
            }
            visited[i] = true;
            if all[i] == Strand::Circle {
                groups.push((i, vec![i], Strand::Circle));
                continue;
            }
            let mut chain = vec![i];
            let mut cur = i;
            loop {
                let n = next(cur).expect("closed loop");
                if n == i {
                    break;
                }
                chain.push(n);
                visited[n] = true;
                cur = n;
            }
            groups.push((i, chain, Strand::Circle));
        }
        groups.sort_by_key(|g| g.0);
        let deco = maps::tensor(&self.deco, &upper.deco);
        let layout: Vec<(Vec<usize>, Comp)> =
            groups.iter().map(|(_, ch, s)| (ch.clone(), if *s == Strand::Circle { Comp::Circle } else { Comp::Interval })).collect();
        let deco = maps::regroup(&deco, &layout)?;
        Ok(Decorated {
            domain: self.domain.clone(),
            target: upper.target.clone(),
            strands: groups.into_iter().map(|g| g.2).collect(),
            deco,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# domain {} target {}\n", arrows_text(&self.domain), arrows_text(&self.target));
        for (i, st) in self.strands.iter().enumerate() {
            let e = |x: &End| match x {
                End::Bottom(p) => format!("bottom{}", p + 1),
                End::Top(p) => format!("top{}", p + 1),
            };
            match st {
                Strand::Arc { tail, head } => s.push_str(&format!("# component {}: interval {} -> {}\n", i + 1, e(tail), e(head))),
                Strand::Circle => s.push_str(&format!("# component {}: circle\n", i + 1)),
            }
        }
        s
    }
}

/// Equality of two sums modulo the relations of their ambient space: 4T for chord diagrams,
/// AS/IHX/STU for undirected Jacobi diagrams, the directed relations otherwise.
pub fn equal_mod(a: &FormalSum, b: &FormalSum) -> Result<bool, TangleError> {
    if a.skeleton != b.skeleton || a.directed != b.directed {
        return Ok(false);
    }
    let diff = a.sub(b);
    if diff.is_zero() {
        return Ok(true);
    }
    let cap = a.cap.min(b.cap);
    let chords = diff.terms().all(|(id, _)| crate::diagram::diagram(id).n_internal() == 0);
    let rs = if a.directed {
        RelSet::Aarrow
    } else if chords {
        RelSet::Achord
    } else {
        RelSet::A
    };
    Ok(space(&a.skeleton, &rs, cap).is_zero(&diff.with_cap(cap))?)
}

/// Same skeleton with the same endpoint data, and decorations equal modulo relations.
pub fn same_morphism(x: &Decorated, y: &Decorated) -> Result<bool, TangleError> {
    if x.domain != y.domain || x.target != y.target || x.strands != y.strands {
        return Ok(false);
    }
    equal_mod(&x.deco, &y.deco)
}

/// A quasitriangular quasi-Hopf structure on a diagram algebra, truncated at `cap`. The
/// coproduct is cabling conjugated by the accumulated twist, if any.
#[derive(Clone, Debug)]
pub struct QuasiHopf {
    pub name: String,
    pub directed: bool,
    pub cap: usize,
    pub phi: FormalSum,
    pub r: FormalSum,
    pub alpha: FormalSum,
    pub beta: FormalSum,
    pub v: FormalSum,
    /// F and F⁻¹ with Δ(x) = F·cab(x)·F⁻¹.
    pub twist: Option<(FormalSum, FormalSum)>,
    pub u: FormalSum,
    pub phi_inv: FormalSum,
    pub r_inv: FormalSum,
    cn_deco: FormalSum,
    ap_deco: FormalSum,
}

impl QuasiHopf {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        phi: FormalSum,
        r: FormalSum,
        alpha: FormalSum,
        beta: FormalSum,
        v: FormalSum,
        twist: Option<(FormalSum, FormalSum)>,
    ) -> Result<Self, TangleError> {
        let cap = phi.cap;
        let directed = phi.directed;
        let phi_inv = maps::inverse(&phi)?;
        let r_inv = maps::inverse(&r)?;
        let mut h = QuasiHopf {
            name: name.to_string(),
            directed,
            cap,
            phi,
            r,
            alpha,
            beta,
            v,
            twist,
            u: FormalSum::zero(Skeleton::intervals(1), directed, cap),
            phi_inv,
            r_inv,
            cn_deco: FormalSum::zero(Skeleton::intervals(1), directed, cap),
            ap_deco: FormalSum::zero(Skeleton::intervals(1), directed, cap),
        };
        h.u = h.u_element()?;
        let v_inv = maps::inverse(&h.v)?;
        let u_inv = maps::inverse(&h.u)?;
        h.cn_deco = maps::mul_all(&[&maps::antipode(&h.alpha, 0)?, &h.u, &v_inv])?;
        h.ap_deco = maps::mul_all(&[&u_inv, &h.v, &maps::antipode(&h.beta, 0)?])?;
        Ok(h)
    }

    /// A_KZ: Φ from the associator, R = exp(Ω/2), α = ν, β = 1, v = exp(−C/2).
    pub fn akz(assoc: &Associator, cap: usize) -> Result<Self, TangleError> {
        let phi = embed_hor(&assoc.phi.with_cap(cap)).with_cap(cap);
        let r = maps::r_kz(cap);
        let alpha = nu(&phi)?;
        let beta = FormalSum::one(Skeleton::intervals(1), false, cap);
        let v = maps::exp(&maps::casimir(cap).scale(&q(-1, 2)))?;
        QuasiHopf::new("akz", phi, r, alpha, beta, v, None)
    }

    /// The directed structure ι(A_KZ).
    pub fn aarkz(assoc: &Associator, cap: usize) -> Result<Self, TangleError> {
        let a = QuasiHopf::akz(assoc, cap)?;
        QuasiHopf::new("aarkz", maps::iota(&a.phi), maps::iota(&a.r), maps::iota(&a.alpha), maps::iota(&a.beta), maps::iota(&a.v), None)
    }

    pub fn one(&self, n: usize) -> FormalSum {
        FormalSum::one(Skeleton::intervals(n), self.directed, self.cap)
    }

    pub fn coproduct(&self, x: &FormalSum, m: usize) -> Result<FormalSum, TangleError> {
        let y = maps::cabling(x, m)?;
        match &self.twist {
            None => Ok(y),
            Some((f, fi)) => {
                let n = y.skeleton.len();
                let fl = maps::relabel(f, &[m, m + 1], n)?;
                let fr = maps::relabel(fi, &[m, m + 1], n)?;
                Ok(maps::mul_all(&[&fl, &y, &fr])?)
            }
        }
    }

    /// Δ⁰_W on strand `m`: iterated coproduct along the parenthesization, ε for the empty word.
    pub fn delta0_w(&self, x: &FormalSum, m: usize, w: &Paren) -> Result<FormalSum, TangleError> {
        match w {
            Paren::Empty => Ok(maps::counit(x, m)?),
            Paren::Leaf(_) => Ok(x.clone()),
            Paren::Star => Err(TangleError::Parse(0, "star inside a bundle".into())),
            Paren::Pair(a, b) => {
                let y = self.coproduct(x, m)?;
                let y = self.delta0_w(&y, m + 1, b)?;
                self.delta0_w(&y, m, a)
            }
        }
    }

    /// Δ_W = S_W Δ⁰_W on strand `m`.
    pub fn delta_w(&self, x: &FormalSum, m: usize, w: &Paren) -> Result<FormalSum, TangleError> {
        let y = self.delta0_w(x, m, w)?;
        s_w(&y, m, &w.arrows())
    }

    /// (Δ_{W_1} ⊗ … ⊗ Δ_{W_k})(x) for a k-strand `x`.
    pub fn delta_bundles(&self, x: &FormalSum, ws: &[&Paren]) -> Result<FormalSum, TangleError> {
        let mut y = x.clone();
        for (m, w) in ws.iter().enumerate().rev() {
            y = self.delta_w(&y, m, w)?;
        }
        Ok(y)
    }

    /// u = S(Ȳ_i β S(Z̄_i)) S(t_j) α s_j X̄_i with Φ⁻¹ = X̄⊗Ȳ⊗Z̄ and R = s⊗t.
    pub fn u_element(&self) -> Result<FormalSum, TangleError> {
        let x = maps::tensor(&self.phi_inv, &self.r);
        let x = maps::antipode(&x, 2)?;
        use Piece::*;
        let x = contract(&x, &[vec![Strand(1), Elem(&self.beta), Strand(2)], vec![Strand(0)], vec![Strand(3)], vec![Strand(4)]])?;
        let x = maps::antipode(&maps::antipode(&x, 0)?, 3)?;
        Ok(contract(&x, &[vec![Strand(0), Strand(3), Elem(&self.alpha), Strand(2), Strand(1)]])?)
    }

    /// The decorating tensor of a generator on its bundle strands, before padding.
    fn core_value(&self, g: &Generator) -> Result<FormalSum, TangleError> {
        Ok(match g.kind {
            GenKind::Id => self.one(0),
            GenKind::Ra => self.delta_bundles(&self.phi_inv, &[&g.a, &g.b, &g.c])?,
            GenKind::La => self.delta_bundles(&self.phi, &[&g.a, &g.b, &g.c])?,
            GenKind::Ov => {
                let r21 = maps::relabel(&self.r, &[1, 0], 2)?;
                self.delta_bundles(&r21, &[&g.a, &g.b])?
            }
            GenKind::Un => self.delta_bundles(&self.r_inv, &[&g.a, &g.b])?,
            GenKind::Cp => self.alpha.clone(),
            GenKind::Cn => self.cn_deco.clone(),
            GenKind::Ap => self.ap_deco.clone(),
            GenKind::An => self.beta.clone(),
        })
    }

    /// Z of a single generator.
    pub fn generator_value(&self, g: &Generator) -> Result<Decorated, TangleError> {
        let dom = g.domain().arrows();
        let tgt = g.target().arrows();
        if g.kind == GenKind::Id {
            return Ok(Decorated::identity(&dom, self.directed, self.cap));
        }
        let (n1, n2) = g.w.star_offsets();
        let core = self.core_value(g)?;
        let k = core.skeleton.len();
        let slots: Vec<usize> = (n1..n1 + k).collect();
        let deco = maps::relabel(&core, &slots, n1 + k + n2)?;
        let mut strands: Vec<Strand> = (0..n1).map(|i| arc(dom[i], i, i)).collect();
        let (da, db) = (dom.len() - n1 - n2, tgt.len() - n1 - n2);
        match g.kind {
            GenKind::Ra | GenKind::La => strands.extend((n1..n1 + da).map(|i| arc(dom[i], i, i))),
            GenKind::Ov | GenKind::Un => {
                let (la, lb) = (g.a.len(), g.b.len());
                strands.extend((0..la).map(|j| arc(dom[n1 + j], n1 + j, n1 + lb + j)));
                strands.extend((0..lb).map(|j| arc(dom[n1 + la + j], n1 + la + j, n1 + j)));
            }
            GenKind::Cp => strands.push(Strand::Arc { tail: End::Top(n1), head: End::Top(n1 + 1) }),
            GenKind::Cn => strands.push(Strand::Arc { tail: End::Top(n1 + 1), head: End::Top(n1) }),
            GenKind::Ap => strands.push(Strand::Arc { tail: End::Bottom(n1 + 1), head: End::Bottom(n1) }),
            GenKind::An => strands.push(Strand::Arc { tail: End::Bottom(n1), head: End::Bottom(n1 + 1) }),
            GenKind::Id => unreachable!(),
        }
        strands.extend((0..n2).map(|j| arc(dom[n1 + da + j], n1 + da + j, n1 + db + j)));
        Ok(Decorated { domain: dom, target: tgt, strands, deco })
    }

    /// The twisted structure H_F; the ribbon element is kept.
    pub fn twisted(&self, f: &FormalSum) -> Result<QuasiHopf, TangleError> {
        let one1 = self.one(1);
        for m in 0..2 {
            if !equal_mod(&maps::counit(f, m)?, &one1)? {
                return Err(TangleError::Degenerate(format!("counit on strand {} is not 1", m + 1)));
            }
        }
        let fi = maps::inverse(f)?;
        let f23 = maps::relabel(f, &[1, 2], 3)?;
        let fi12 = maps::relabel(&fi, &[0, 1], 3)?;
        let d2f = self.coproduct(f, 1)?;
        let d1fi = self.coproduct(&fi, 0)?;
        let phi = maps::mul_all(&[&f23, &d2f, &self.phi, &d1fi, &fi12])?;
        let f21 = maps::relabel(f, &[1, 0], 2)?;
        let r = maps::mul_all(&[&f21, &self.r, &fi])?;
        use Piece::*;
        let alpha = contract(&maps::antipode(&fi, 0)?, &[vec![Strand(0), Elem(&self.alpha), Strand(1)]])?;
        let beta = contract(&maps::antipode(f, 1)?, &[vec![Strand(0), Elem(&self.beta), Strand(1)]])?;
        let twist = match &self.twist {
            None => (f.clone(), fi),
            Some((g, gi)) => (maps::mul(f, g)?, maps::mul(gi, &fi)?),
        };
        QuasiHopf::new(&format!("{}_F", self.name), phi, r, alpha, beta, self.v.clone(), Some(twist))
    }

    /// F⁰_W for the twist `f` relative to this structure's coproduct.
    pub fn f0_w(&self, f: &FormalSum, w: &Paren) -> Result<FormalSum, TangleError> {
        match w {
            Paren::Empty => Ok(self.one(0)),
            Paren::Leaf(_) => Ok(self.one(1)),
            Paren::Star => Err(TangleError::Parse(0, "star inside a bundle".into())),
            Paren::Pair(a, b) => {
                let outer = maps::tensor(&self.f0_w(f, a)?, &self.f0_w(f, b)?);
                let inner = self.delta0_bundles(f, &[a, b])?;
                Ok(maps::mul(&outer, &inner)?)
            }
        }
    }

    /// G⁰_W = (Δ⁰_{W_1} ⊗ Δ⁰_{W_2})(F⁻¹)(G⁰_{W_1} ⊗ G⁰_{W_2}).
    pub fn g0_w(&self, fi: &FormalSum, w: &Paren) -> Result<FormalSum, TangleError> {
        match w {
            Paren::Empty => Ok(self.one(0)),
            Paren::Leaf(_) => Ok(self.one(1)),
            Paren::Star => Err(TangleError::Parse(0, "star inside a bundle".into())),
            Paren::Pair(a, b) => {
                let outer = maps::tensor(&self.g0_w(fi, a)?, &self.g0_w(fi, b)?);
                let inner = self.delta0_bundles(fi, &[a, b])?;
                Ok(maps::mul(&inner, &outer)?)
            }
        }
    }

    fn delta0_bundles(&self, x: &FormalSum, ws: &[&Paren]) -> Result<FormalSum, TangleError> {
        let mut y = x.clone();
        for (m, w) in ws.iter().enumerate().rev() {
            y = self.delta0_w(&y, m, w)?;
        }
        Ok(y)
    }

    /// The identity morphism on W decorated by F_W (or by G_W when `inverse`).
    pub fn twist_morphism(&self, f: &FormalSum, w: &Paren, inverse: bool) -> Result<Decorated, TangleError> {
        let arrows = w.arrows();
        let x = if inverse { self.g0_w(&maps::inverse(f)?, w)? } else { self.f0_w(f, w)? };
        let mut d = Decorated::identity(&arrows, self.directed, self.cap);
        d.deco = s_w(&x, 0, &arrows)?;
        Ok(d)
    }

    /// Checks of the structure identities modulo relations.
    pub fn checks(&self) -> Result<Vec<(String, bool)>, TangleError> {
        let mut out = Vec::new();
        let phi = &self.phi;
        let rel = |s: &[usize]| maps::relabel(phi, s, 3);
        let rel4 = |s: &[usize]| maps::relabel(phi, s, 4);
        let lhs = maps::mul(&self.coproduct(phi, 2)?, &self.coproduct(phi, 0)?)?;
        let rhs = maps::mul_all(&[&rel4(&[1, 2, 3])?, &self.coproduct(phi, 1)?, &rel4(&[0, 1, 2])?])?;
        out.push(("pentagon".to_string(), equal_mod(&lhs, &rhs)?));
        let r = &self.r;
        let r12 = maps::relabel(r, &[0, 1], 3)?;
        let r13 = maps::relabel(r, &[0, 2], 3)?;
        let r23 = maps::relabel(r, &[1, 2], 3)?;
        let inv = |x: &FormalSum| maps::inverse(x);
        let h1 = maps::mul_all(&[&inv(&rel(&[1, 2, 0])?)?, &r13, &rel(&[1, 0, 2])?, &r12, &self.phi_inv])?;
        out.push(("hexagon1".to_string(), equal_mod(&self.coproduct(r, 1)?, &h1)?));
        let h2 = maps::mul_all(&[&rel(&[2, 0, 1])?, &r13, &inv(&rel(&[0, 2, 1])?)?, &r23, phi])?;
        out.push(("hexagon2".to_string(), equal_mod(&self.coproduct(r, 0)?, &h2)?));
        let mut nd = true;
        for m in 0..3 {
            nd &= equal_mod(&maps::counit(phi, m)?, &self.one(2))?;
        }
        for m in 0..2 {
            nd &= equal_mod(&maps::counit(r, m)?, &self.one(1))?;
        }
        out.push(("non-degenerate".to_string(), nd));
        use Piece::*;
        let a1 = contract(&maps::antipode(phi, 1)?, &[vec![Strand(0), Elem(&self.beta), Strand(1), Elem(&self.alpha), Strand(2)]])?;
        out.push(("antipode-phi".to_string(), equal_mod(&a1, &self.one(1))?));
        let a2 = contract(
            &maps::antipode(&maps::antipode(&self.phi_inv, 0)?, 2)?,
            &[vec![Strand(0), Elem(&self.alpha), Strand(1), Elem(&self.beta), Strand(2)]],
        )?;
        out.push(("antipode-phi-inverse".to_string(), equal_mod(&a2, &self.one(1))?));
        let v2 = maps::mul(&self.v, &self.v)?;
        let usu = maps::mul(&self.u, &maps::antipode(&self.u, 0)?)?;
        out.push(("v^2 = uS(u)".to_string(), equal_mod(&v2, &usu)?));
        let r21 = maps::relabel(r, &[1, 0], 2)?;
        let vv = maps::tensor(&self.v, &self.v);
        let dv = maps::mul(&vv, &maps::inverse(&maps::mul(&r21, r)?)?)?;
        out.push(("delta(v)".to_string(), equal_mod(&self.coproduct(&self.v, 0)?, &dv)?));
        Ok(out)
    }
}

/// S_W on strands `m..m+|w|`.
pub fn s_w(x: &FormalSum, m: usize, w: &[Arrow]) -> Result<FormalSum, TangleError> {
    let mut y = x.clone();
    for (k, a) in w.iter().enumerate() {
        if *a == Arrow::Down {
            y = maps::antipode(&y, m + k)?;
        }
    }
    Ok(y)
}

/// ν = (X_i S(Y_i) Z_i)⁻¹.
pub fn nu(phi: &FormalSum) -> Result<FormalSum, TangleError> {
    use Piece::*;
    let x = contract(&maps::antipode(phi, 1)?, &[vec![Strand(0), Strand(1), Strand(2)]])?;
    Ok(maps::inverse(&x)?)
}

/// Z_H of a tangle word.
pub fn z_eval(t: &TangleWord, h: &QuasiHopf) -> Result<Decorated, TangleError> {
    t.check()?;
    let mut acc = Decorated::identity(&t.domain().arrows(), h.directed, h.cap);
    for g in &t.gens {
        acc = acc.compose(&h.generator_value(g)?)?;
    }
    Ok(acc)
}

/// Z_F(T) compared with 𝓕_U⁻¹ Z(T) 𝓕_D: returns both sides.
pub fn lm_twist_sides(t: &TangleWord, h: &QuasiHopf, f: &FormalSum) -> Result<(Decorated, Decorated), TangleError> {
    let hf = h.twisted(f)?;
    let lhs = z_eval(t, &hf)?;
    let bottom = h.twist_morphism(f, &t.domain(), false)?;
    let top = h.twist_morphism(f, &t.target(), true)?;
    let rhs = bottom.compose(&z_eval(t, h)?)?.compose(&top)?;
    Ok((lhs, rhs))
}

/// A random symmetric non-degenerate twist F = 1 + f + f²¹ with f a combination of chord
/// diagrams of degree 1..=2 touching both strands.
pub fn random_symmetric_twist(seed: u64, cap: usize, directed: bool) -> FormalSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = Skeleton::intervals(2);
    let mut f = FormalSum::zero(s.clone(), false, cap);
    for m in 1..=cap.min(2) {
        for id in enumerate_chord_diagrams(&s, m) {
            let d = crate::diagram::diagram(id);
            if d.legs_on(0) == 0 || d.legs_on(1) == 0 {
                continue;
            }
            let c: i64 = rng.gen_range(-3..=3);
            f.add_id(id, &q(c, rng.gen_range(1..=4)));
        }
    }
    let f21 = maps::relabel(&f, &[1, 0], 2).expect("two strands");
    let big = FormalSum::one(s, false, cap).add(&f).add(&f21);
    if directed {
        maps::iota(&big)
    } else {
        big
    }
}

/// Built-in tangle words.
pub mod words {
    use super::*;

    pub const UNKNOT: &str = include_str!("../../../data/tangles/unknot.tng");
    pub const UNKNOT_ALT: &str = include_str!("../../../data/tangles/unknot_alt.tng");
    pub const CURL: &str = include_str!("../../../data/tangles/curl.tng");
    pub const CURL_INVERSE: &str = include_str!("../../../data/tangles/curl_inverse.tng");
    pub const HOPF: &str = include_str!("../../../data/tangles/hopf.tng");
    pub const TREFOIL_RIGHT: &str = include_str!("../../../data/tangles/trefoil_right.tng");
    pub const TREFOIL_LEFT: &str = include_str!("../../../data/tangles/trefoil_left.tng");
    pub const JBRAID: &str = include_str!("../../../data/tangles/jbraid.tng");

    pub const ALL: [(&str, &str); 8] = [
        ("unknot", UNKNOT),
        ("unknot_alt", UNKNOT_ALT),
        ("curl", CURL),
        ("curl_inverse", CURL_INVERSE),
        ("hopf", HOPF),
        ("trefoil_right", TREFOIL_RIGHT),
        ("trefoil_left", TREFOIL_LEFT),
        ("jbraid", JBRAID),
    ];

    pub fn named(name: &str) -> Option<TangleWord> {
        ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| TangleWord::parse(t).expect("built-in word"))
    }
}

/// One instance of a defining relation: two words with the same domain and target.
#[derive(Clone, Debug)]
pub struct RelationInstance {
    pub name: String,
    pub lhs: TangleWord,
    pub rhs: TangleWord,
}

fn inst(name: &str, lhs: &str, rhs: &str) -> RelationInstance {
    let p = |s: &str| TangleWord::parse(&s.replace(';', "\n")).unwrap_or_else(|e| panic!("{name}: {e}"));
    RelationInstance { name: name.to_string(), lhs: p(lhs), rhs: p(rhs) }
}

/// The relations (R1)–(R10) instantiated on small contexts, with ↑ bundles and ↓ variants.
pub fn relation_instances() -> Vec<RelationInstance> {
    vec![
        inst("R1 ra A=e", "ra A=e B=u C=u", "id W=(uu)"),
        inst("R1 la C=e", "la A=u B=d C=e", "id W=(ud)"),
        inst("R2 ra la", "ra A=u B=u C=u; la A=u B=u C=u", "id W=((uu)u)"),
        inst("R2 la ra", "la A=u B=u C=u; ra A=u B=u C=u", "id W=(u(uu))"),
        inst("R2 ra la down", "ra A=d B=u C=d; la A=d B=u C=d", "id W=((du)d)"),
        inst("R3 pentagon", "ra A=(uu) B=u C=u; ra A=u B=u C=(uu)", "ra W=(*u) A=u B=u C=u; ra A=u B=(uu) C=u; ra W=(u*) A=u B=u C=u"),
        inst("R3 pentagon down", "ra A=(uu) B=u C=d; ra A=u B=u C=(ud)", "ra W=(*d) A=u B=u C=u; ra A=u B=(uu) C=d; ra W=(u*) A=u B=u C=d"),
        inst("R4 braidings", "ov W=(*(uu)) A=u B=u; ov W=((uu)*) A=u B=u", "ov W=((uu)*) A=u B=u; ov W=(*(uu)) A=u B=u"),
        inst("R4 creation", "cp W=(*(uu)); ov W=((du)*) A=u B=u", "ov A=u B=u; cp W=(*(uu))"),
        inst("R5 braiding inside associator", "ov W=(u(*u)) A=u B=u; la A=u B=(uu) C=u", "la A=u B=(uu) C=u; ov W=((u*)u) A=u B=u"),
        inst("R5 creation inside associator", "cn W=(u(*u)); la A=u B=(ud) C=u", "la A=u B=e C=u; cn W=((u*)u)"),
        inst("R5 braiding inside braiding", "ov W=(u*) A=u B=u; ov A=u B=(uu)", "ov A=u B=(uu); ov W=(*u) A=u B=u"),
        inst("R5 associator inside braiding", "la W=(u*) A=u B=u C=u; un A=u B=((uu)u)", "un A=u B=(u(uu)); la W=(*u) A=u B=u C=u"),
        inst("R6 ov A=e", "ov A=e B=u", "id W=u"),
        inst("R6 un B=e", "un A=d B=e", "id W=d"),
        inst("R7 ov un", "ov A=u B=u; un A=u B=u", "id W=(uu)"),
        inst("R7 un ov down", "un A=u B=d; ov A=d B=u", "id W=(ud)"),
        inst("R8 hexagon over", "ov A=(uu) B=u", "ra A=u B=u C=u; ov W=(u*) A=u B=u; la A=u B=u C=u; ov W=(*u) A=u B=u; ra A=u B=u C=u"),
        inst(
            "R8 hexagon over second",
            "ov A=u B=(uu)",
            "la A=u B=u C=u; ov W=(*u) A=u B=u; ra A=u B=u C=u; ov W=(u*) A=u B=u; la A=u B=u C=u",
        ),
        inst(
            "R8 hexagon under down",
            "un A=(ud) B=u",
            "ra A=u B=d C=u; un W=(u*) A=d B=u; la A=u B=u C=d; un W=(*d) A=u B=u; ra A=u B=u C=d",
        ),
        inst("R9 zigzag up right", "cp W=(u*); la A=u B=d C=u; an W=(*u)", "id W=u"),
        inst("R9 zigzag up left", "cn W=(*u); ra A=u B=d C=u; ap W=(u*)", "id W=u"),
        inst("R9 zigzag down right", "cn W=(d*); la A=d B=u C=d; ap W=(*d)", "id W=d"),
        inst("R9 zigzag down left", "cp W=(*d); ra A=d B=u C=d; an W=(d*)", "id W=d"),
        inst(
            "R10 double loop",
            "cn; ov A=u B=d; cn W=((du)*); un W=((du)*) A=u B=d; ra A=d B=u C=(du); la W=(d*) A=u B=d C=u; an W=(d(*u))",
            "cp",
        ),
    ]
}

/// Evaluates both sides of every relation instance; each entry is (name, equal).
pub fn relation_suite(h: &QuasiHopf) -> Result<Vec<(String, bool)>, TangleError> {
    let mut out = Vec::new();
    for r in relation_instances() {
        let a = z_eval(&r.lhs, h)?;
        let b = z_eval(&r.rhs, h)?;
        out.push((r.name.clone(), same_morphism(&a, &b)?));
    }
    Ok(out)
}

/// Tr on the single component of a closed one-component result, as a sum on ○.
pub fn knot_value(d: &Decorated) -> Option<&FormalSum> {
    (d.domain.is_empty() && d.target.is_empty() && d.strands == [Strand::Circle]).then_some(&d.deco)
}

/// The element 1 + ω₂/48 − ω₄/5760 + ω₂⊔ω₂/4608 on one color, truncated at `cap`.
pub fn wheels_unknot(cap: usize) -> FormalSum {
    let w2 = maps::wheel(2, cap);
    let w4 = maps::wheel(4, cap);
    let two = maps::mul(&w2, &w2).expect("color product");
    let one = FormalSum::one(w2.skeleton.clone(), false, cap);
    one.axpy(&q(1, 48), &w2).axpy(&q(-1, 5760), &w4).axpy(&q(1, 4608), &two)
}
