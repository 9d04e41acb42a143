//! The Kontsevich-type invariant of the unknot, Hopf link and trefoil from A_KZ, and the
//! wheels formula for the unknot in degree ≤ 4.

use jacobi::diagram::Skeleton;
use jacobi::horizontal::{solve_associator, ASSOC_GUARD};
use jacobi::maps;
use jacobi::spaces::{space, RelSet};
use jacobi::tangle::{knot_value, wheels_unknot, words, z_eval, QuasiHopf};

fn main() {
    let cap = 4;
    let h = QuasiHopf::akz(&solve_associator(cap, ASSOC_GUARD).unwrap(), cap).unwrap();
    let z = z_eval(&words::named("unknot").unwrap(), &h).unwrap();
    let k = knot_value(&z).unwrap();
    let circle = space(&Skeleton::circle(), &RelSet::A, cap);
    let wheels = maps::trace(&maps::chi(&wheels_unknot(cap), 0).unwrap(), 0).unwrap();
    println!("unknot matches the wheels formula: {}", circle.equal(k, &wheels).unwrap());

    let h2 = QuasiHopf::akz(&solve_associator(2, ASSOC_GUARD).unwrap(), 2).unwrap();
    for name in ["hopf", "trefoil_right"] {
        let z = z_eval(&words::named(name).unwrap(), &h2).unwrap();
        let sp = space(&z.deco.skeleton, &RelSet::A, 2);
        println!("== {name}\n{}{}", z.to_text(), sp.normal_form(&z.deco).unwrap().to_text());
    }
}
