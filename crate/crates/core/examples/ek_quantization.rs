//! The diagrammatic Etingof-Kazhdan twist at directed cap 2: J, R_EK and the unknot report.

use jacobi::diagram::Skeleton;
use jacobi::ek::{conjecture_suite, ek_pipeline};
use jacobi::horizontal::{solve_associator, ASSOC_GUARD};
use jacobi::spaces::{space, RelSet};
use jacobi::verify::conjecture_observations;

fn main() {
    let rep = ek_pipeline(&solve_associator(2, ASSOC_GUARD).unwrap(), 2).unwrap();
    let two = space(&Skeleton::intervals(2), &RelSet::Aarrow, 2);
    println!("== J\n{}", two.normal_form(&rep.j.j).unwrap().to_text());
    println!("== R_EK\n{}", two.normal_form(&rep.aek.r).unwrap().to_text());
    println!("coassociativity residual terms: {}", rep.residual_terms);
    println!("QYBE residual terms: {}", rep.qybe_terms);
    println!("all structure checks: {}", rep.passed());
    let c = conjecture_suite(&solve_associator(4, ASSOC_GUARD).unwrap(), &rep.aek, 4).unwrap();
    for line in conjecture_observations(&c) {
        println!("{line}");
    }
}
