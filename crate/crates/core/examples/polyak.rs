//! Polyak's arrow diagrams against directed Jacobi diagrams: 6T and 4T images vanish and the
//! tadpole is separated from the image of j by an explicit functional.

use jacobi::ek::polyak_maps;

fn main() {
    let p = polyak_maps(3).unwrap();
    println!("6T instances killed: {}/{}", p.six_t_killed, p.six_t_instances);
    println!("4T instances killed: {}/{}", p.four_t_killed, p.four_t_instances);
    println!("degree-1 image of j has {} generators", p.j_image.len());
    match p.certificate {
        Some(cert) => println!("tadpole outside Im(j); separating functional has {} nonzero coordinates", cert.len()),
        None => println!("no certificate: the tadpole lies in Im(j)"),
    }
}
