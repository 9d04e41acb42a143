//! Twisting A_KZ leaves link invariants unchanged, while open tangles change by conjugation.

use jacobi::diagram::Skeleton;
use jacobi::horizontal::{solve_associator, ASSOC_GUARD};
use jacobi::linalg::q;
use jacobi::maps;
use jacobi::sum::FormalSum;
use jacobi::tangle::{lm_twist_sides, random_symmetric_twist, same_morphism, words, z_eval, QuasiHopf, TangleWord};

fn main() {
    let h = QuasiHopf::akz(&solve_associator(3, ASSOC_GUARD).unwrap(), 3).unwrap();
    let f = random_symmetric_twist(7, 3, false);
    let hf = h.twisted(&f).unwrap();
    for name in ["unknot", "hopf", "trefoil_right"] {
        let t = words::named(name).unwrap();
        let same = same_morphism(&z_eval(&t, &h).unwrap(), &z_eval(&t, &hf).unwrap()).unwrap();
        println!("{name}: invariant under a symmetric twist: {same}");
    }

    // F = 1 + ½ (C⊗1)Ω is not symmetric, so R changes and a single crossing changes too
    let h2 = QuasiHopf::akz(&solve_associator(2, ASSOC_GUARD).unwrap(), 2).unwrap();
    let c1 = maps::tensor(&maps::casimir(2), &FormalSum::one(Skeleton::intervals(1), false, 2));
    let g = h2.one(2).add(&maps::mul(&c1, &maps::omega(2)).unwrap().scale(&q(1, 2)));
    let hg = h2.twisted(&g).unwrap();
    let open = TangleWord::parse("ov A=u B=u").unwrap();
    let plain = same_morphism(&z_eval(&open, &h2).unwrap(), &z_eval(&open, &hg).unwrap()).unwrap();
    let (lhs, rhs) = lm_twist_sides(&open, &h2, &g).unwrap();
    println!("crossing: equal as is: {plain}, equal after conjugation: {}", same_morphism(&lhs, &rhs).unwrap());
}
