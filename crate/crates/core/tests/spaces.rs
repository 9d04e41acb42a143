use jacobi::diagram::{diagram, enumerate_diagrams, Comp, Skeleton};
use jacobi::linalg::Q;
use jacobi::maps::*;
use jacobi::spaces::{generate_relations, space, QuotientSpace, RelSet, DEFAULT_LIMIT};
use jacobi::sum::FormalSum;
use num_traits::One;
use proptest::prelude::*;

fn sums(s: &Skeleton, m: usize, directed: bool, cap: usize) -> Vec<FormalSum> {
    enumerate_diagrams(s, m, directed, true, DEFAULT_LIMIT).unwrap().into_iter().map(|id| FormalSum::from_id(id, Q::one(), cap)).collect()
}

fn relation_sum(r: &[(jacobi::diagram::Diagram, Q)], cap: usize) -> FormalSum {
    let mut s = FormalSum::zero(r[0].0.skeleton.clone(), r[0].0.is_directed(), cap);
    for (d, c) in r {
        s.add_raw(d, c);
    }
    s
}

#[test]
fn circle_dimensions_two_ways() {
    let jacobi = space(&Skeleton::circle(), &RelSet::A, 4);
    let chords = space(&Skeleton::circle(), &RelSet::Achord, 4);
    let a: Vec<usize> = (0..=4).map(|m| jacobi.dim(m).unwrap()).collect();
    let b: Vec<usize> = (0..=4).map(|m| chords.dim(m).unwrap()).collect();
    assert_eq!(a, b);
    assert_eq!(a, vec![1, 1, 2, 3, 6]);
}

#[test]
fn pbw_round_trips_directed() {
    let cap = 2;
    let b = Skeleton::color(DEFAULT_COLOR);
    let a = Skeleton::intervals(1);
    let qb = space(&b, &RelSet::Aarrow, cap);
    let qa = space(&a, &RelSet::Aarrow, cap);
    for m in 0..=cap {
        for x in sums(&b, m, true, cap) {
            let y = sigma(&chi(&x, 0).unwrap(), 0, DEFAULT_COLOR).unwrap();
            assert!(qb.equal(&x, &y).unwrap());
        }
        for x in sums(&a, m, true, cap) {
            let y = chi(&sigma(&x, 0, DEFAULT_COLOR).unwrap(), 0).unwrap();
            assert!(qa.equal(&x, &y).unwrap());
        }
    }
}

#[test]
fn iota_kills_relations() {
    let up = Skeleton::intervals(1);
    let target = space(&up, &RelSet::Aarrow, 3);
    let mut count = 0;
    for m in 1..=3 {
        for r in generate_relations(&up, m, &RelSet::A, true, DEFAULT_LIMIT).unwrap() {
            assert!(target.is_zero(&iota(&relation_sum(&r, 3))).unwrap(), "degree {m}");
            count += 1;
        }
    }
    assert!(count > 0);
}

fn leg_commutator(x: &FormalSum, arrow: &FormalSum) -> FormalSum {
    let ext = tensor(x, &FormalSum::one(Skeleton::intervals(1), true, x.cap));
    let c = mul(arrow, &ext).unwrap().sub(&mul(&ext, arrow).unwrap());
    sigma(&c, 1, "s").unwrap()
}

#[test]
fn iota_images_are_invariant() {
    let cap = 3;
    let star = Skeleton(vec![Comp::Interval, Comp::Color("s".into())]);
    let target = space(&star, &RelSet::Aarrow, cap);
    for m in 0..=2 {
        for x in sums(&Skeleton::intervals(1), m, false, cap) {
            let ix = iota(&x);
            for arrow in [left_arrow(cap), right_arrow(cap)] {
                assert!(target.is_zero(&leg_commutator(&ix, &arrow)).unwrap());
            }
        }
    }
    // the half sum of positive roots is not invariant
    let rho = rho(cap);
    assert!(!target.is_zero(&leg_commutator(&rho, &left_arrow(cap))).unwrap());
}

#[test]
fn omega_is_central_on_two_strands() {
    let cap = 3;
    let sp = space(&Skeleton::intervals(2), &RelSet::A, cap);
    let om = omega(cap);
    for m in 0..=2 {
        for x in sums(&Skeleton::intervals(2), m, false, cap) {
            assert!(sp.is_zero(&commutator(&om, &x).unwrap()).unwrap());
        }
    }
}

fn diagrams_with_legs(cap: usize) -> Vec<jacobi::diagram::DiagId> {
    (1..=cap)
        .flat_map(|m| enumerate_diagrams(&Skeleton::intervals(1), m, false, true, DEFAULT_LIMIT).unwrap())
        .filter(|&id| diagram(id).n_legs() >= 2)
        .collect()
}

fn pick_word(legs: usize, raw: &[usize]) -> Vec<usize> {
    raw.iter().map(|x| x % (legs - 1)).collect()
}

fn a_space() -> std::sync::Arc<QuotientSpace> {
    space(&Skeleton::intervals(1), &RelSet::A, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_cocycle(k in 0usize..1000, w1 in proptest::collection::vec(0usize..8, 0..5), w2 in proptest::collection::vec(0usize..8, 0..5)) {
        let ds = diagrams_with_legs(3);
        let d = diagram(ds[k % ds.len()]);
        let legs = d.comps[0].len();
        let (w1, w2) = (pick_word(legs, &w1), pick_word(legs, &w2));
        let w: Vec<usize> = w1.iter().chain(&w2).copied().collect();
        let lhs = gamma_d(&d, 0, &w, 3);
        let moved = apply_word(&d, 0, &w2);
        let rhs = gamma_d(&moved, 0, &w1, 3).add(&gamma_d(&d, 0, &w2, 3));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_telescopes(k in 0usize..1000, w in proptest::collection::vec(0usize..8, 0..6)) {
        let ds = diagrams_with_legs(3);
        let d = diagram(ds[k % ds.len()]);
        let w = pick_word(d.comps[0].len(), &w);
        let lhs = FormalSum::from_raw(&d, Q::one(), 3).sub(&FormalSum::from_raw(&apply_word(&d, 0, &w), Q::one(), 3));
        prop_assert!(a_space().equal(&lhs, &gamma_d(&d, 0, &w, 3)).unwrap());
    }

    #[test]
    fn iota_commutes_with_cabling(k in 0usize..1000) {
        let ds: Vec<FormalSum> = (0..=2).flat_map(|m| sums(&Skeleton::intervals(1), m, false, 2)).collect();
        let x = &ds[k % ds.len()];
        let sp = space(&Skeleton::intervals(2), &RelSet::Aarrow, 2);
        prop_assert!(sp.equal(&cabling(&iota(x), 0).unwrap(), &iota(&cabling(x, 0).unwrap())).unwrap());
    }

    #[test]
    fn antipode_is_an_anti_automorphism(a in 0usize..1000, b in 0usize..1000) {
        let ds: Vec<FormalSum> = (0..=2).flat_map(|m| sums(&Skeleton::intervals(1), m, false, 3)).collect();
        let (x, y) = (&ds[a % ds.len()], &ds[b % ds.len()]);
        let lhs = antipode(&mul(x, y).unwrap(), 0).unwrap();
        let rhs = mul(&antipode(y, 0).unwrap(), &antipode(x, 0).unwrap()).unwrap();
        prop_assert!(a_space().equal(&lhs, &rhs).unwrap());
    }
}
