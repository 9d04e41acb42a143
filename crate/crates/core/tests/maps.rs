use jacobi::diagram::{enumerate_diagrams, Comp, Skeleton};
use jacobi::linalg::{q, qi, Q};
use jacobi::maps::*;
use jacobi::spaces::{space, RelSet};
use jacobi::sum::FormalSum;
use num_traits::One;

fn basis_sums(s: &Skeleton, m: usize, directed: bool, cap: usize) -> Vec<FormalSum> {
    enumerate_diagrams(s, m, directed, true, 100_000).unwrap().into_iter().map(|id| FormalSum::from_id(id, Q::one(), cap)).collect()
}

#[test]
fn coproduct_of_casimir() {
    let c = casimir(3);
    let d = cabling(&c, 0).unwrap();
    let one = FormalSum::one(Skeleton::intervals(1), false, 3);
    let expect = tensor(&one, &c).add(&tensor(&c, &one)).add(&omega(3).scale(&qi(2)));
    assert_eq!(d, expect);
}

#[test]
fn two_rho_from_r_arrow() {
    let r = r_arrow(2);
    let mu = product(&r, 0, 1).unwrap();
    let mu_t = product(&permute_components(&r, &[1, 0]), 0, 1).unwrap();
    assert_eq!(mu.sub(&mu_t), rho(2).scale(&qi(2)));
}

#[test]
fn rho_equals_half_tadpole_sum() {
    let sp = space(&Skeleton::intervals(1), &RelSet::Aarrow, 1);
    let t = tadpole(true, 1).add(&tadpole(false, 1)).scale(&q(1, 2));
    assert!(sp.equal(&rho(1), &t).unwrap());
    assert!(!sp.is_zero(&rho(1)).unwrap());
}

#[test]
fn iota_of_omega() {
    assert_eq!(iota(&omega(1)), left_arrow(1).add(&right_arrow(1)));
}

#[test]
fn sigma_of_casimir_is_two_legged_strut() {
    let s = sigma(&casimir(2), 0, DEFAULT_COLOR).unwrap();
    assert_eq!(s.len(), 1);
    let (id, c) = s.terms().next().unwrap();
    assert_eq!(*c, Q::one());
    let d = jacobi::diagram::diagram(id);
    assert_eq!(d.skeleton, Skeleton::color(DEFAULT_COLOR));
    assert_eq!(d.n_legs(), 2);
}

#[test]
fn pbw_round_trips_undirected() {
    let cap = 3;
    let b = Skeleton::color(DEFAULT_COLOR);
    let a = Skeleton::intervals(1);
    let qb = space(&b, &RelSet::A, cap);
    let qa = space(&a, &RelSet::A, cap);
    for m in 0..=cap {
        for x in basis_sums(&b, m, false, cap) {
            let y = sigma(&chi(&x, 0).unwrap(), 0, DEFAULT_COLOR).unwrap();
            assert!(qb.equal(&x, &y).unwrap());
        }
        for x in basis_sums(&a, m, false, cap) {
            let y = chi(&sigma(&x, 0, DEFAULT_COLOR).unwrap(), 0).unwrap();
            assert!(qa.equal(&x, &y).unwrap());
        }
    }
}

#[test]
fn glue_identity_and_transposition() {
    let d = basis_sums(&Skeleton::intervals(1), 2, false, 2);
    for x in d {
        let k = jacobi::diagram::diagram(x.terms().next().unwrap().0).n_legs();
        // e on k strands: k vertical chords
        let mut p = jacobi::diagram::Parts::new(Skeleton::intervals(2), false);
        for i in 0..k as u32 {
            p.comps[0].push(2 * i);
            p.comps[1].push(2 * i + 1);
            p.edges.push((2 * i, 2 * i + 1));
        }
        let e = FormalSum::from_raw(&p.build().unwrap(), Q::one(), 8);
        assert_eq!(glue(&e, &x), x);
    }
}

#[test]
fn antipode_identity() {
    let cap = 3;
    let s = Skeleton::intervals(1);
    let qa = space(&s, &RelSet::A, cap);
    for m in 0..=cap {
        for x in basis_sums(&s, m, false, cap) {
            let dx = cabling(&x, 0).unwrap();
            let lhs = product(&antipode(&dx, 0).unwrap(), 0, 1).unwrap();
            let eps = counit(&x, 0).unwrap();
            let rhs = insert_bare(&eps, 0, Comp::Interval);
            assert!(qa.equal(&lhs, &rhs).unwrap(), "degree {m}");
        }
    }
}

#[test]
fn exp_log_inverse() {
    let x = omega(3).scale(&q(1, 2));
    let e = exp(&x).unwrap();
    assert_eq!(log(&e).unwrap(), x);
    let one = FormalSum::one(Skeleton::intervals(2), false, 3);
    assert_eq!(mul(&e, &inverse(&e).unwrap()).unwrap(), one);
    let r = sqrt(&e).unwrap();
    assert_eq!(mul(&r, &r).unwrap(), e);
}
