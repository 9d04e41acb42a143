//! sl₂ weight systems: the Casimir on the fundamental representation and the classical
//! r-matrix as the image of the directed strut.

use jacobi::lie::{project, tar_eval, tg_eval, trace_on_rep, LieAlgebra, ManinTriple};
use jacobi::maps;

fn main() {
    let g = LieAlgebra::sl2();
    let c = tg_eval(&maps::casimir(1), &g).unwrap();
    println!("T(C) = {}", c.display(&g));
    println!("Tr_fund T(C) by degree: {:?}", trace_on_rep(&c, &g, &["fund"]).unwrap().iter().map(|x| x.to_string()).collect::<Vec<_>>());

    let mt = ManinTriple::sl2_double();
    let (sl2, proj) = mt.projection.clone().unwrap();
    let r = project(&tar_eval(&maps::r_arrow(1), &mt).unwrap(), &sl2, &proj);
    println!("projected r:\n{}", r.display(&sl2));
}
