//! Named verification suites, one per acceptance property, shared by the command line and the
//! acceptance runner.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagram::{diagram, enumerate_diagrams, Comp, Diagram, Skeleton};
use crate::ek;
use crate::horizontal::{
    hexagon_residuals, hor_is_zero, inverse_symmetry_residual, pentagon_residual, qqybe_residual, solve_associator, Associator, HorElement,
    ASSOC_GUARD,
};
use crate::lie::{project, tar_eval, tg_eval, LieAlgebra, ManinTriple, UEnvTensor};
use crate::linalg::{q, qi, Q};
use crate::maps;
use crate::spaces::{diagram_limit, generate_relations, space, RelSet};
use crate::sum::FormalSum;
use crate::tangle::{
    equal_mod, knot_value, lm_twist_sides, random_symmetric_twist, relation_suite, same_morphism, wheels_unknot, words, z_eval, QuasiHopf,
    TangleWord,
};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

/// One named check with a short data summary.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    /// Reported data that is computed but never asserted.
    pub observations: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let detail = c.detail.trim().replace('\n', "; ").replace('\t', " ");
            s.push_str(&format!("{}\t{}\t{}\t{}\n", self.suite, if c.passed { "PASS" } else { "FAIL" }, c.name, detail));
        }
        for o in &self.observations {
            s.push_str(&format!("{}\tNOTE\t{}\n", self.suite, o));
        }
        s
    }
}

/// Suite names in acceptance order, with the criterion each one covers.
pub const SUITES: [(&str, usize); 14] = [
    ("dims", 1),
    ("pbw", 2),
    ("gamma", 3),
    ("iota", 4),
    ("lie", 5),
    ("assoc", 6),
    ("kz", 7),
    ("tangle", 8),
    ("wheels", 9),
    ("twist", 10),
    ("ek", 11),
    ("ek-degree2", 12),
    ("unknot", 12),
    ("polyak", 13),
];

/// The suites run by `all`: every criterion once.
pub fn acceptance_suites() -> Vec<&'static str> {
    SUITES.iter().filter(|(n, _)| *n != "ek-degree2").map(|(n, _)| *n).collect()
}

pub fn run_suite(name: &str) -> Result<SuiteReport, VerifyError> {
    let mut r = Report { checks: Vec::new(), observations: Vec::new() };
    match name {
        "dims" => dims(&mut r),
        "pbw" => pbw(&mut r),
        "gamma" => gamma(&mut r),
        "iota" => iota(&mut r),
        "lie" => lie(&mut r),
        "assoc" => assoc_suite(&mut r),
        "kz" => kz(&mut r),
        "tangle" => tangle(&mut r),
        "wheels" => wheels(&mut r),
        "twist" => twist(&mut r),
        "ek" => ek_suite(&mut r),
        "ek-degree2" => ek_degree2(&mut r),
        "unknot" => unknot(&mut r),
        "polyak" => polyak(&mut r),
        _ => return Err(VerifyError::UnknownSuite(name.to_string())),
    }
    Ok(SuiteReport { suite: name.to_string(), checks: r.checks, observations: r.observations })
}

type Outcome = Result<(bool, String), String>;

struct Report {
    checks: Vec<Check>,
    observations: Vec<String>,
}

impl Report {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Outcome) {
        let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn assoc(cap: usize) -> Result<Associator, String> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Associator>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(a) = cache.lock().unwrap().get(&cap) {
        return Ok(a.clone());
    }
    let a = solve_associator(cap, ASSOC_GUARD).map_err(err)?;
    cache.lock().unwrap().insert(cap, a.clone());
    Ok(a)
}

fn akz(cap: usize) -> Result<QuasiHopf, String> {
    QuasiHopf::akz(&assoc(cap)?, cap).map_err(err)
}

fn basis_sums(s: &Skeleton, m: usize, directed: bool, cap: usize) -> Result<Vec<FormalSum>, String> {
    Ok(enumerate_diagrams(s, m, directed, true, diagram_limit())
        .map_err(err)?
        .into_iter()
        .map(|id| FormalSum::from_id(id, Q::one(), cap))
        .collect())
}

fn relation_sum(r: &[(Diagram, Q)], cap: usize) -> FormalSum {
    let mut s = FormalSum::zero(r[0].0.skeleton.clone(), r[0].0.is_directed(), cap);
    for (d, c) in r {
        s.add_raw(d, c);
    }
    s
}

fn relation_sums(s: &Skeleton, m: usize, rs: &RelSet, cap: usize) -> Result<Vec<FormalSum>, String> {
    Ok(generate_relations(s, m, rs, true, diagram_limit()).map_err(err)?.iter().map(|r| relation_sum(r, cap)).collect())
}

fn list(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn dims(r: &mut Report) {
    r.check("dim A(O) via Jacobi diagrams and via chord diagrams with 4T", || {
        let jac = space(&Skeleton::circle(), &RelSet::A, 4);
        let chords = space(&Skeleton::circle(), &RelSet::Achord, 4);
        let a = (0..=4).map(|m| jac.dim(m)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        let b = (0..=4).map(|m| chords.dim(m)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        Ok((a == b && a == [1, 1, 2, 3, 6], format!("jacobi {} chord {}", list(&a), list(&b))))
    });
}

fn pbw_round_trip(r: &mut Report, directed: bool, cap: usize) {
    let rs = if directed { RelSet::Aarrow } else { RelSet::A };
    let label = if directed { "directed" } else { "undirected" };
    let b = Skeleton::color(maps::DEFAULT_COLOR);
    let a = Skeleton::intervals(1);
    r.check(&format!("sigma chi = id on B, {label}, degree <= {cap}"), || {
        let qb = space(&b, &rs, cap);
        let mut n = 0;
        for m in 0..=cap {
            for x in basis_sums(&b, m, directed, cap)? {
                let y = maps::sigma(&maps::chi(&x, 0).map_err(err)?, 0, maps::DEFAULT_COLOR).map_err(err)?;
                if !qb.equal(&x, &y).map_err(err)? {
                    return Ok((false, format!("fails in degree {m}")));
                }
                n += 1;
            }
        }
        Ok((true, format!("{n} diagrams")))
    });
    r.check(&format!("chi sigma = id on A, {label}, degree <= {cap}"), || {
        let qa = space(&a, &rs, cap);
        let mut n = 0;
        for m in 0..=cap {
            for x in basis_sums(&a, m, directed, cap)? {
                let y = maps::chi(&maps::sigma(&x, 0, maps::DEFAULT_COLOR).map_err(err)?, 0).map_err(err)?;
                if !qa.equal(&x, &y).map_err(err)? {
                    return Ok((false, format!("fails in degree {m}")));
                }
                n += 1;
            }
        }
        Ok((true, format!("{n} diagrams")))
    });
}

fn pbw(r: &mut Report) {
    pbw_round_trip(r, false, 3);
    pbw_round_trip(r, true, 2);
}

fn gamma(r: &mut Report) {
    let cap = 3;
    let up = Skeleton::intervals(1);
    let ds: Vec<Diagram> = match (1..=cap).map(|m| enumerate_diagrams(&up, m, false, true, diagram_limit())).collect::<Result<Vec<_>, _>>()
    {
        Ok(v) => v.into_iter().flatten().map(|id| (*diagram(id)).clone()).filter(|d| d.n_legs() >= 2).collect(),
        Err(e) => {
            r.check("enumerate diagrams", || Err(err(e)));
            return;
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let instances: Vec<(Diagram, Vec<usize>, Vec<usize>)> = (0..100)
        .map(|_| {
            let d = ds[rng.gen_range(0..ds.len())].clone();
            let legs = d.comps[0].len();
            let word = |rng: &mut ChaCha8Rng| -> Vec<usize> { (0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..legs - 1)).collect() };
            let w1 = word(&mut rng);
            let w2 = word(&mut rng);
            (d, w1, w2)
        })
        .collect();
    r.check("cocycle identity on 100 random instances, degree <= 3", || {
        for (d, w1, w2) in &instances {
            let w: Vec<usize> = w1.iter().chain(w2).copied().collect();
            let lhs = maps::gamma_d(d, 0, &w, cap);
            let moved = maps::apply_word(d, 0, w2);
            let rhs = maps::gamma_d(&moved, 0, w1, cap).add(&maps::gamma_d(d, 0, w2, cap));
            if lhs != rhs {
                return Ok((false, format!("fails on {}", d.to_text(1).replace('\n', " "))));
            }
        }
        Ok((true, "100 instances".into()))
    });
    r.check("telescoping identity on 100 random instances, degree <= 3", || {
        let sp = space(&up, &RelSet::A, cap);
        for (d, w1, w2) in &instances {
            let w: Vec<usize> = w1.iter().chain(w2).copied().collect();
            let lhs = FormalSum::from_raw(d, Q::one(), cap).sub(&FormalSum::from_raw(&maps::apply_word(d, 0, &w), Q::one(), cap));
            if !sp.equal(&lhs, &maps::gamma_d(d, 0, &w, cap)).map_err(err)? {
                return Ok((false, format!("fails on {}", d.to_text(1).replace('\n', " "))));
            }
        }
        Ok((true, "100 instances".into()))
    });
}

fn leg_commutator(x: &FormalSum, arrow: &FormalSum) -> Result<FormalSum, String> {
    let ext = maps::tensor(x, &FormalSum::one(Skeleton::intervals(1), true, x.cap));
    let c = maps::mul(arrow, &ext).map_err(err)?.sub(&maps::mul(&ext, arrow).map_err(err)?);
    maps::sigma(&c, 1, "s").map_err(err)
}

fn iota(r: &mut Report) {
    r.check("iota kills every A-relation instance, degree <= 3", || {
        let mut n = 0;
        for s in [Skeleton::intervals(1), Skeleton::circle()] {
            let target = space(&s, &RelSet::Aarrow, 3);
            for m in 1..=3 {
                for v in relation_sums(&s, m, &RelSet::A, 3)? {
                    if !target.is_zero(&maps::iota(&v)).map_err(err)? {
                        return Ok((false, format!("survives on {} in degree {m}", s.tokens())));
                    }
                    n += 1;
                }
            }
        }
        Ok((n > 0, format!("{n} instances")))
    });
    r.check("iota images are invariant, degree <= 2", || {
        let cap = 3;
        let star = Skeleton(vec![Comp::Interval, Comp::Color("s".into())]);
        let target = space(&star, &RelSet::Aarrow, cap);
        let mut n = 0;
        for m in 0..=2 {
            for x in basis_sums(&Skeleton::intervals(1), m, false, cap)? {
                let ix = maps::iota(&x);
                for arrow in [maps::left_arrow(cap), maps::right_arrow(cap)] {
                    if !target.is_zero(&leg_commutator(&ix, &arrow)?).map_err(err)? {
                        return Ok((false, format!("not invariant in degree {m}")));
                    }
                }
                n += 1;
            }
        }
        Ok((true, format!("{n} diagrams")))
    });
}

fn sl2_classical_r(g: &LieAlgebra) -> UEnvTensor {
    let idx = |name: &str| g.names.iter().position(|n| n == name).expect("sl2 basis name") as u8;
    let mut t = UEnvTensor::zero(2);
    t.add_term((1, vec![vec![idx("e")], vec![idx("f")]]), qi(1));
    t.add_term((1, vec![vec![idx("h")], vec![idx("h")]]), q(1, 4));
    t
}

fn lie(r: &mut Report) {
    let g = LieAlgebra::sl2();
    let mt = ManinTriple::sl2_double();
    r.check("T_sl2 of every relation instance vanishes, degree <= 2", || {
        let mut n = 0;
        for s in [Skeleton::intervals(1), Skeleton::intervals(2)] {
            for m in 1..=2 {
                for v in relation_sums(&s, m, &RelSet::A, 2)? {
                    if !tg_eval(&v, &g).map_err(err)?.is_zero() {
                        return Ok((false, format!("nonzero on {} in degree {m}", s.tokens())));
                    }
                    n += 1;
                }
            }
        }
        Ok((n > 0, format!("{n} instances")))
    });
    r.check("tar_eval(iota D) = tg_eval(D) on 20 random diagrams, degree <= 2", || {
        let mut pool = Vec::new();
        for s in [Skeleton::intervals(1), Skeleton::intervals(2)] {
            for m in 0..=2 {
                pool.extend(basis_sums(&s, m, false, 2)?);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let v = &pool[rng.gen_range(0..pool.len())];
            if tar_eval(&maps::iota(v), &mt).map_err(err)? != tg_eval(v, &mt.g).map_err(err)? {
                return Ok((false, v.to_text()));
            }
        }
        Ok((true, format!("20 samples from {}", pool.len())))
    });
    r.check("tar_eval(r_arrow) projects to e(x)f + 1/4 h(x)h", || {
        let (sl2, proj) = mt.projection.clone().ok_or("double without projection")?;
        let t = project(&tar_eval(&maps::r_arrow(1), &mt).map_err(err)?, &sl2, &proj);
        let expect = sl2_classical_r(&sl2);
        Ok((t == expect, t.display(&sl2)))
    });
}

fn assoc_suite(r: &mut Report) {
    let a = match assoc(4) {
        Ok(a) => a,
        Err(e) => {
            r.check("solve associator through degree 4", || Err(e));
            return;
        }
    };
    r.check("solve associator through degree 4", || Ok((true, a.phi.to_text().lines().count().to_string() + " terms")));
    r.check("pentagon residual", || Ok((hor_is_zero(&pentagon_residual(&a.phi)), String::new())));
    r.check("hexagon residuals", || {
        let (h1, h2) = hexagon_residuals(&a.phi, &a.r).map_err(err)?;
        Ok((hor_is_zero(&h1) && hor_is_zero(&h2), String::new()))
    });
    r.check("qqybe residual", || Ok((hor_is_zero(&qqybe_residual(&a.phi, &a.r).map_err(err)?), String::new())));
    r.check("counit on each strand is 1", || Ok(((0..3).all(|k| a.phi.epsilon(k) == HorElement::one(2, 4)), String::new())));
    r.check("inverse equals reversed associator", || Ok((hor_is_zero(&inverse_symmetry_residual(&a.phi).map_err(err)?), String::new())));
}

fn kz(r: &mut Report) {
    r.check("u = exp(-C/2) through degree 3", || {
        let h = akz(3)?;
        let u = maps::exp(&maps::casimir(3).scale(&q(-1, 2))).map_err(err)?;
        Ok((equal_mod(&h.u, &u).map_err(err)?, String::new()))
    });
    r.check("coproduct of C = 1(x)C + C(x)1 + 2 Omega", || {
        let c = maps::casimir(3);
        let one = FormalSum::one(Skeleton::intervals(1), false, 3);
        let expect = maps::tensor(&one, &c).add(&maps::tensor(&c, &one)).add(&maps::omega(3).scale(&qi(2)));
        Ok((maps::cabling(&c, 0).map_err(err)? == expect, String::new()))
    });
    r.check("Omega is central on two strands, degree <= 2", || {
        let sp = space(&Skeleton::intervals(2), &RelSet::A, 3);
        let om = maps::omega(3);
        let mut n = 0;
        for m in 0..=2 {
            for x in basis_sums(&Skeleton::intervals(2), m, false, 3)? {
                if !sp.is_zero(&maps::commutator(&om, &x).map_err(err)?).map_err(err)? {
                    return Ok((false, format!("fails in degree {m}")));
                }
                n += 1;
            }
        }
        Ok((true, format!("{n} diagrams")))
    });
}

fn parsed(text: &str) -> Result<TangleWord, String> {
    TangleWord::parse(text).map_err(err)
}

fn tangle(r: &mut Report) {
    let h = match akz(3) {
        Ok(h) => h,
        Err(e) => {
            r.check("build A_KZ at cap 3", || Err(e));
            return;
        }
    };
    match relation_suite(&h) {
        Ok(rows) => {
            for (name, ok) in rows {
                r.check(&format!("relation {name}"), || Ok((ok, String::new())));
            }
        }
        Err(e) => r.check("relation suite", || Err(err(e))),
    }
    r.check("curl evaluates to v", || {
        let curl = z_eval(&parsed(words::CURL)?, &h).map_err(err)?;
        Ok((equal_mod(&curl.deco, &h.v).map_err(err)?, String::new()))
    });
    r.check("both unknot presentations agree", || {
        let a = z_eval(&parsed(words::UNKNOT)?, &h).map_err(err)?;
        let b = z_eval(&parsed(words::UNKNOT_ALT)?, &h).map_err(err)?;
        Ok((same_morphism(&a, &b).map_err(err)?, String::new()))
    });
}

fn wheels(r: &mut Report) {
    r.check("Z_K(unknot) = chi(1 + w2/48 - w4/5760 + w2 w2/4608) through degree 4", || {
        let h = akz(4)?;
        let z = z_eval(&parsed(words::UNKNOT)?, &h).map_err(err)?;
        let k = knot_value(&z).ok_or("unknot is not a closed knot")?;
        let w = maps::trace(&maps::chi(&wheels_unknot(4), 0).map_err(err)?, 0).map_err(err)?;
        let sp = space(&Skeleton::circle(), &RelSet::A, 4);
        Ok((sp.equal(k, &w).map_err(err)?, String::new()))
    });
}

fn twist(r: &mut Report) {
    let setup = || -> Result<(QuasiHopf, FormalSum, QuasiHopf), String> {
        let h = akz(3)?;
        let f = random_symmetric_twist(7, 3, false);
        let hf = h.twisted(&f).map_err(err)?;
        Ok((h, f, hf))
    };
    let (h, f, hf) = match setup() {
        Ok(x) => x,
        Err(e) => {
            r.check("twist A_KZ by a random symmetric F", || Err(e));
            return;
        }
    };
    for name in ["unknot", "hopf"] {
        r.check(&format!("Z({name}) unchanged by the twist"), || {
            let t = words::named(name).ok_or("missing word")?;
            let a = z_eval(&t, &h).map_err(err)?;
            let b = z_eval(&t, &hf).map_err(err)?;
            Ok((same_morphism(&a, &b).map_err(err)?, String::new()))
        });
    }
    for g in ["ra A=u B=u C=u", "la A=u B=u C=u", "ov A=u B=u", "un A=u B=u", "cp", "cn", "ap", "an"] {
        r.check(&format!("conjugation formula on `{g}`"), || {
            let (lhs, rhs) = lm_twist_sides(&parsed(g)?, &h, &f).map_err(err)?;
            Ok((same_morphism(&lhs, &rhs).map_err(err)?, String::new()))
        });
    }
}

fn ek_suite(r: &mut Report) {
    let run = || -> Result<ek::EkReport, String> { ek::ek_pipeline(&assoc(2)?, 2).map_err(err) };
    let rep = match run() {
        Ok(rep) => rep,
        Err(e) => {
            r.check("EK pipeline at cap 2", || Err(e));
            return;
        }
    };
    r.check("J = 1 + 1/2 left arrow through degree 1", || {
        let one = FormalSum::one(Skeleton::intervals(2), true, 1);
        let expect = one.add(&maps::left_arrow(1).scale(&q(1, 2)));
        let j1 = rep.j.j.degree_part(0).add(&rep.j.j.degree_part(1)).with_cap(1);
        Ok((equal_mod(&j1, &expect).map_err(err)?, String::new()))
    });
    r.check("coassociativity residual vanishes", || Ok((rep.residual_terms == 0, format!("{} terms", rep.residual_terms))));
    r.check("twisted associator is trivial", || Ok((rep.phi_trivial, String::new())));
    r.check("R_EK = 1 + left arrow through degree 1", || Ok((rep.r_expansion, String::new())));
    r.check("R_EK satisfies QYBE", || Ok((rep.qybe_terms == 0, format!("{} terms", rep.qybe_terms))));
    r.check("v_EK = exp(-(lhc + rhc)/2)", || Ok((rep.ribbon, String::new())));
}

fn ek_degree2(r: &mut Report) {
    r.check("Tr(rho^2/2) = Tr(iota chi(w2/48))", || {
        let res = ek::exercise_residual().map_err(err)?;
        Ok((res.is_zero(), format!("{} residual terms", res.len())))
    });
}

fn series_text(v: &[Q]) -> String {
    v.iter().map(Q::to_string).collect::<Vec<_>>().join(",")
}

fn unknot(r: &mut Report) {
    ek_degree2(r);
    let run = || -> Result<ek::ConjectureReport, String> {
        let a = assoc(4)?;
        let a2 = assoc(2)?;
        let rep = ek::ek_pipeline(&a2, 2).map_err(err)?;
        ek::conjecture_suite(&a, &rep.aek, 4).map_err(err)
    };
    match run() {
        Ok(c) => {
            let expected = [qi(2), qi(0), q(1, 4), qi(0), q(1, 192)];
            r.check("Tr_fund T_sl2(Z_EK(unknot)) = 2 + h^2/4 + h^4/192 through h^4", || {
                Ok((c.sl2_series.len() >= 5 && c.sl2_series[..5] == expected, series_text(&c.sl2_series)))
            });
            r.observations.extend(conjecture_observations(&c));
        }
        Err(e) => r.check("unknot conjecture report", || Err(e)),
    }
}

/// Report lines for the parts of the unknot conjecture that are computed but not asserted.
pub fn conjecture_observations(c: &ek::ConjectureReport) -> Vec<String> {
    let mut out = vec![
        format!("cap {}", c.cap),
        format!("Z_EK(unknot) = iota Z_K(unknot): {}", c.zek_is_iota_zk),
        format!("Z_EK(unknot) = Tr(beta S(alpha) u v^-1): {}", c.closed_form),
        format!("beta alpha = 1: {}", c.alpha_beta_inverse),
        format!("u = exp(rho) v diagrammatically: {}", c.u_diagrammatic),
        format!("u = exp(rho) v under T_sl2: {}", c.u_lie),
        format!("Z_EK(unknot) = Tr(exp(rho)) diagrammatically: {}", c.unknot_diagrammatic),
        format!("sl2 series {} expected {}", series_text(&c.sl2_series), series_text(&c.sl2_expected)),
    ];
    for (k, v) in &c.odd_traces {
        out.push(format!("Tr(rho^{k}) terms in normal form: {}", v.len()));
    }
    for (k, ok) in &c.exp_symmetry {
        out.push(format!("Tr(exp(rho)) = Tr(exp(-rho)) in degree {k}: {ok}"));
    }
    out
}

fn polyak(r: &mut Report) {
    let p = match ek::polyak_maps(3) {
        Ok(p) => p,
        Err(e) => {
            r.check("Polyak maps at cap 3", || Err(err(e)));
            return;
        }
    };
    r.check("every 6T instance dies under i", || {
        Ok((p.six_t_instances > 0 && p.six_t_killed == p.six_t_instances, format!("{}/{}", p.six_t_killed, p.six_t_instances)))
    });
    r.check("every 4T instance dies under iota", || {
        Ok((p.four_t_instances > 0 && p.four_t_killed == p.four_t_instances, format!("{}/{}", p.four_t_killed, p.four_t_instances)))
    });
    r.check("tadpole outside Im(j) in degree 1, with certificate", || {
        let cert = p.certificate.as_ref().ok_or("no certificate")?;
        let arrow = space(&Skeleton::intervals(1), &RelSet::Aarrow, 1);
        let apply = |v: &FormalSum| -> Result<Q, String> {
            let red = arrow.reduce(v).map_err(err)?;
            Ok(cert
                .iter()
                .map(|(id, c)| red.iter().find(|(x, _)| x == id).map(|p| &p.1 * c).unwrap_or_else(Q::zero))
                .fold(Q::zero(), |a, b| a + b))
        };
        let on_tadpole = apply(&p.tadpole)?;
        let mut on_image = true;
        for v in &p.j_image {
            on_image &= apply(v)?.is_zero();
        }
        Ok((on_tadpole.is_one() && on_image, format!("functional of {} terms, {} image vectors", cert.len(), p.j_image.len())))
    });
}
