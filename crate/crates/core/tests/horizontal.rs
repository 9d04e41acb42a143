use jacobi::horizontal::*;
use jacobi::linalg::{dense_rank, q, Q};
use jacobi::maps::{omega, r_kz};
use num_traits::{One, Zero};

#[test]
fn quotient_dimensions() {
    let dims: Vec<usize> = (0..=4).map(|d| hor_block(3, d).dim()).collect();
    assert_eq!(dims, vec![1, 3, 7, 15, 31]);
    assert!((0..=4).all(|d| hor_block(2, d).dim() == 1));
}

#[test]
fn degree_two_dimension_against_dense_oracle() {
    // all 9 words of length 2 on three strands, relations written out by hand
    let gens = ["12", "13", "23"];
    let idx = |a: &str, b: &str| 3 * gens.iter().position(|g| *g == a).unwrap() + gens.iter().position(|g| *g == b).unwrap();
    let comm = |a: &str, b: &[&str]| {
        let mut row = vec![Q::zero(); 9];
        for x in b {
            row[idx(a, x)] += Q::one();
            row[idx(x, a)] -= Q::one();
        }
        row
    };
    let rows = vec![comm("23", &["12", "13"]), comm("13", &["12", "23"]), comm("12", &["13", "23"])];
    assert_eq!(9 - dense_rank(&rows), hor_block(3, 2).dim());
}

#[test]
fn trivial_associator_residuals() {
    let one = HorElement::one(3, 2);
    assert!(hor_is_zero(&pentagon_residual(&one)));
    let (h1, h2) = hexagon_residuals(&one, &r_kz_hor(2)).unwrap();
    assert!(h1.degree_part(1).is_zero() && h2.degree_part(1).is_zero());
    assert!(!hor_is_zero(&h1.degree_part(2)));
}

#[test]
fn solved_associator() {
    let a = solve_associator(4, ASSOC_GUARD).unwrap();
    assert_eq!(a.phi.constant(), Q::one());
    assert!(a.phi.degree_part(1).is_zero());
    assert!(a.phi.degree_part(3).is_zero());
    // degree 2 is a multiple of [t12, t23]
    let t12 = HorElement::t(3, 4, 0, 1);
    let t23 = HorElement::t(3, 4, 1, 2);
    let c = t12.mul(&t23).sub(&t23.mul(&t12));
    let two = a.phi.degree_part(2);
    let k = q(1, 24);
    assert!(hor_is_zero(&two.sub(&c.scale(&k))), "{}", hor_normal_form(&two).to_text());
}

#[test]
fn embedding() {
    assert_eq!(embed_hor(&HorElement::t(2, 3, 0, 1)), omega(3));
    assert_eq!(embed_hor(&r_kz_hor(3)), r_kz(3));
}

#[test]
fn text_round_trip() {
    let a = solve_associator(4, ASSOC_GUARD).unwrap();
    let nf = hor_normal_form(&a.phi);
    assert_eq!(parse_hor(&nf.to_text(), 3, 4).unwrap(), nf);
}

#[test]
fn solved_associator_satisfies_all_identities() {
    let a = solve_associator(4, ASSOC_GUARD).unwrap();
    assert!(hor_is_zero(&pentagon_residual(&a.phi)));
    let (h1, h2) = hexagon_residuals(&a.phi, &a.r).unwrap();
    assert!(hor_is_zero(&h1) && hor_is_zero(&h2));
    assert!(hor_is_zero(&qqybe_residual(&a.phi, &a.r).unwrap()));
    for k in 0..3 {
        assert_eq!(a.phi.epsilon(k), HorElement::one(2, 4));
    }
    assert!(hor_is_zero(&inverse_symmetry_residual(&a.phi).unwrap()));
    a.verify().unwrap();
}
