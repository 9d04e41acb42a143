//! Acceptance battery: one PASS/FAIL line per criterion, exact arithmetic throughout.

use std::process::ExitCode;

use jacobi::diagram::Skeleton;
use jacobi::ek::{conjecture_suite, ek_pipeline};
use jacobi::horizontal::{solve_associator, ASSOC_GUARD};
use jacobi::linalg::{q, Q};
use jacobi::maps;
use jacobi::spaces::{space, RelSet};
use jacobi::sum::FormalSum;
use jacobi::tangle::{knot_value, words, z_eval, QuasiHopf, TangleWord};
use jacobi::verify::run_suite;
use num_bigint::BigInt;
use num_traits::{One, Zero};

type Extra = fn() -> Result<(bool, String), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// dim A(○) in degrees 0..=4, compared with the tabulated 1, 1, 2, 3, 6.
fn circle_dims() -> Result<(bool, String), String> {
    let expect = [1usize, 1, 2, 3, 6];
    let mut got = Vec::new();
    for rs in [RelSet::A, RelSet::Achord] {
        let sp = space(&Skeleton::circle(), &rs, 4);
        got.push((0..=4).map(|m| sp.dim(m)).collect::<Result<Vec<_>, _>>().map_err(err)?);
    }
    Ok((got.iter().all(|d| d[..] == expect), format!("{got:?}")))
}

/// χ⁻¹Z_K(unknot) against the closed coefficients 1/48, −1/5760 and 1/4608.
fn wheels_literal() -> Result<(bool, String), String> {
    let cap = 4;
    let assoc = solve_associator(cap, ASSOC_GUARD).map_err(err)?;
    let h = QuasiHopf::akz(&assoc, cap).map_err(err)?;
    let z = z_eval(&TangleWord::parse(words::UNKNOT).map_err(err)?, &h).map_err(err)?;
    let k = knot_value(&z).ok_or("not a knot")?;
    let w2 = maps::wheel(2, cap);
    let w4 = maps::wheel(4, cap);
    let w22 = maps::mul(&w2, &w2).map_err(err)?;
    let mut b = FormalSum::one(w2.skeleton.clone(), false, cap);
    b = b.add(&w2.scale(&q(1, 48))).add(&w4.scale(&q(-1, 5760))).add(&w22.scale(&q(1, 4608)));
    let expect = maps::trace(&maps::chi(&b, 0).map_err(err)?, 0).map_err(err)?;
    let ok = space(&Skeleton::circle(), &RelSet::A, cap).equal(k, &expect).map_err(err)?;
    Ok((ok, String::new()))
}

/// Coefficients of e^{x/2} + e^{−x/2} through x⁴, from the factorial formula.
fn exp_half_series(n: usize) -> Vec<Q> {
    let mut out = Vec::new();
    let mut fact = BigInt::one();
    for k in 0..=n {
        if k > 0 {
            fact *= BigInt::from(k);
        }
        if k % 2 == 1 {
            out.push(Q::zero());
        } else {
            out.push(Q::new(BigInt::from(2), BigInt::from(2u32).pow(k as u32) * &fact));
        }
    }
    out
}

fn sl2_series_literal() -> Result<(bool, String), String> {
    let expect = exp_half_series(4);
    let big = solve_associator(4, ASSOC_GUARD).map_err(err)?;
    let small = solve_associator(2, ASSOC_GUARD).map_err(err)?;
    let rep = ek_pipeline(&small, 2).map_err(err)?;
    let c = conjecture_suite(&big, &rep.aek, 4).map_err(err)?;
    let got = &c.sl2_series[..c.sl2_series.len().min(5)];
    let text = got.iter().map(Q::to_string).collect::<Vec<_>>().join(",");
    Ok((got == expect.as_slice(), text))
}

fn criteria() -> Vec<(usize, &'static str, Vec<&'static str>, Option<Extra>)> {
    vec![
        (1, "quotient dimensions of A(O)", vec!["dims"], Some(circle_dims)),
        (2, "PBW isomorphisms", vec!["pbw"], None),
        (3, "Gamma_D cocycle and telescoping", vec!["gamma"], None),
        (4, "iota well-defined and invariant", vec!["iota"], None),
        (5, "Lie evaluation", vec!["lie"], None),
        (6, "rational associator", vec!["assoc"], None),
        (7, "KZ structure", vec!["kz"], None),
        (8, "tangle invariant soundness", vec!["tangle"], None),
        (9, "wheels formula for the unknot", vec!["wheels"], Some(wheels_literal)),
        (10, "twist invariance", vec!["twist"], None),
        (11, "EK pipeline at cap 2", vec!["ek"], None),
        (12, "unknot conjecture, verifiable parts", vec!["ek-degree2", "unknot"], Some(sl2_series_literal)),
        (13, "Polyak comparison", vec!["polyak"], None),
    ]
}

fn main() -> ExitCode {
    let mut failed = 0;
    for (k, title, suites, extra) in criteria() {
        let mut ok = true;
        let mut notes = Vec::new();
        for s in suites {
            let r = run_suite(s).expect("known suite");
            ok &= r.passed();
            for c in r.checks.iter().filter(|c| !c.passed) {
                notes.push(format!("{s}: {} ({})", c.name, c.detail));
            }
        }
        if let Some(f) = extra {
            let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
            ok &= pass;
            if !pass {
                notes.push(format!("literal oracle: {detail}"));
            }
        }
        println!("criterion {k:>2} {}: {title}", if ok { "PASS" } else { "FAIL" });
        for n in notes {
            println!("    {n}");
        }
        if !ok {
            failed += 1;
        }
    }
    println!("{} of 13 criteria passed", 13 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
