//! Dimensions of quotient spaces of Jacobi diagrams on a few skeleta.

use jacobi::diagram::Skeleton;
use jacobi::spaces::{space, RelSet};

fn main() {
    let cases =
        [("O", RelSet::A, 4), ("O", RelSet::Achord, 4), ("I I", RelSet::A, 3), ("I", RelSet::Aarrow, 2), ("I I", RelSet::Aarrow, 2)];
    println!("skeleton\trelations\tdims");
    for (sk, rs, cap) in cases {
        let sp = space(&Skeleton::parse(sk).unwrap(), &rs, cap);
        let dims: Vec<String> = (0..=cap).map(|m| sp.dim(m).unwrap().to_string()).collect();
        println!("{sk}\t{rs}\t{}", dims.join(","));
    }
}
