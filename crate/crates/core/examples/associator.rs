//! Solve for an even rational associator and check it against every defining identity.

use jacobi::horizontal::{solve_associator, ASSOC_GUARD};

fn main() {
    let cap = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    let a = solve_associator(cap, ASSOC_GUARD).unwrap();
    print!("{}", a.to_text());
    match a.verify() {
        Ok(()) => println!("# pentagon, hexagons, QQYBE, counit and inverse symmetry hold"),
        Err(e) => println!("# verification failed: {e}"),
    }
}
