use jacobi::diagram::Skeleton;
use jacobi::ek::*;
use jacobi::horizontal::{solve_associator, Associator, ASSOC_GUARD};
use jacobi::linalg::{dense_rank, q, qi, solve_affine, SparseVec, Q};
use jacobi::maps;
use jacobi::spaces::{enumerate_for, space, RelSet, Side, DEFAULT_LIMIT};
use jacobi::sum::FormalSum;
use jacobi::tangle::equal_mod;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assoc(cap: usize) -> Associator {
    solve_associator(cap, ASSOC_GUARD).unwrap()
}

fn basis(rs: RelSet, strands: usize, m: usize, cap: usize) -> Vec<FormalSum> {
    let sp = space(&Skeleton::intervals(strands), &rs, cap);
    sp.block(m).unwrap().basis.iter().map(|&id| FormalSum::from_id(id, Q::one(), cap)).collect()
}

#[test]
fn verma_quotients_match_one_sided_spaces() {
    for side in [Side::Plus, Side::Minus] {
        let pq = PbwInverse::new(side, 2);
        let one_sided = if side == Side::Plus { RelSet::AarrowPlus } else { RelSet::AarrowMinus };
        for m in 0..=2 {
            assert_eq!(pq.verma.dim(m).unwrap(), pq.arrow.dim(m).unwrap(), "{side:?} degree {m}");
            for e in basis(one_sided.clone(), 1, m, 2) {
                let back = pq.q(&pq.p(&e).unwrap()).unwrap();
                assert!(pq.arrow.equal(&back, &e).unwrap());
            }
            for b in basis(RelSet::Verma(vec![Some(if side == Side::Plus { Side::Minus } else { Side::Plus })]), 1, m, 2) {
                assert!(pq.verma.equal(&pq.p(&pq.q(&b).unwrap()).unwrap(), &b).unwrap());
            }
        }
    }
}

#[test]
fn verma_relations_kill_rightmost_legs() {
    // a diagram whose topmost leg is outgoing vanishes in M₋, one with an incoming top leg in M₊
    let right = maps::right_half_circ(2);
    let left = maps::left_half_circ(2);
    let m_minus = RelSet::m_minus();
    let m_plus = RelSet::m_plus();
    let up = Skeleton::intervals(1);
    let fully_in = maps::tadpole(true, 1);
    assert!(!space(&up, &m_minus, 2).is_zero(&fully_in).unwrap());
    assert!(space(&up, &m_plus, 2).is_zero(&fully_in).unwrap());
    assert!(space(&up, &m_minus, 2).is_zero(&maps::tadpole(false, 1)).unwrap());
    // the half circles differ by top-level terms in exactly one of the quotients
    assert!(!space(&up, &m_minus, 2).equal(&left, &right).unwrap() || !space(&up, &m_plus, 2).equal(&left, &right).unwrap());
}

#[test]
fn phi_is_inverted_by_peeling() {
    let f = FilteredMap::phi(1, 2);
    let one = FormalSum::one(Skeleton::intervals(1), true, 2);
    assert_eq!(f.apply(&one).unwrap(), FormalSum::one(Skeleton::intervals(2), true, 2));
    for m in 0..=2 {
        let (src, tgt, cols) = f.matrix(m).unwrap();
        assert_eq!(src.len(), tgt.len(), "degree {m}");
        let dense: Vec<Vec<Q>> = (0..tgt.len()).map(|r| cols.iter().map(|c| c.get(r as u32)).collect()).collect();
        assert_eq!(dense_rank(&dense), src.len());
        let rows: Vec<SparseVec> = dense.iter().map(|r| SparseVec::from_dense(r)).collect();
        for (k, &t) in tgt.iter().enumerate() {
            // peeling against the matrix inverse
            let pre = f.inverse(&FormalSum::from_id(t, Q::one(), 2)).unwrap();
            let coords = f.source.reduce(&pre).unwrap();
            let x = solve_affine(&rows, &SparseVec::from_pairs([(k as u32, Q::one())])).unwrap();
            for (j, &s) in src.iter().enumerate() {
                let c = coords.iter().find(|(id, _)| *id == s).map(|p| p.1.clone()).unwrap_or_else(Q::zero);
                assert_eq!(c, x.get(j as u32));
            }
        }
        for e in basis(RelSet::Aarrow, 1, m, 2) {
            let back = f.inverse(&f.apply(&e).unwrap()).unwrap();
            assert!(f.source.equal(&back, &e).unwrap());
        }
    }
}

#[test]
fn phi_is_a_module_map() {
    let f = FilteredMap::phi(1, 2);
    let b1 = basis(RelSet::Aarrow, 1, 1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let mut d = FormalSum::one(Skeleton::intervals(1), true, 2);
        let mut e = FormalSum::one(Skeleton::intervals(1), true, 2);
        for x in &b1 {
            d = d.axpy(&qi(rng.gen_range(-3..=3)), x);
            e = e.axpy(&qi(rng.gen_range(-3..=3)), x);
        }
        let lhs = f.apply(&maps::mul(&d, &e).unwrap()).unwrap();
        let rhs = maps::mul(&maps::cabling(&d, 0).unwrap(), &f.apply(&e).unwrap()).unwrap();
        assert!(f.target.equal(&lhs, &rhs).unwrap());
    }
}

#[test]
fn plus_minus_product_is_bijective() {
    let cap = 2;
    let target = space(&Skeleton::intervals(1), &RelSet::Aarrow, cap);
    let sided = RelSet::Sided(vec![Some(Side::Plus), Some(Side::Minus)]);
    for m in 0..=cap {
        let b = target.block(m).unwrap();
        let mut rows = Vec::new();
        for x in basis(sided.clone(), 2, m, cap) {
            let red = target.reduce(&maps::product(&x, 0, 1).unwrap()).unwrap();
            let mut row = vec![Q::zero(); b.basis.len()];
            for (id, c) in red {
                row[b.basis.iter().position(|&z| z == id).unwrap()] = c;
            }
            rows.push(row);
        }
        assert_eq!(rows.len(), b.basis.len(), "degree {m}");
        assert_eq!(dense_rank(&rows), b.basis.len());
    }
}

#[test]
fn twist_j_low_degree_expansion() {
    let j = compute_j(&assoc(2), 2).unwrap();
    assert_eq!(j.j.degree_part(0), FormalSum::one(Skeleton::intervals(2), true, 2).degree_part(0));
    let half_left = maps::left_arrow(2).scale(&q(1, 2));
    assert!(equal_mod(&j.j.degree_part(1), &half_left.degree_part(1)).unwrap());
    let prod = maps::mul(&j.j, &j.j_inv).unwrap();
    assert!(equal_mod(&prod, &FormalSum::one(Skeleton::intervals(2), true, 2)).unwrap());
}

#[test]
fn ek_structure_at_cap_two() {
    let a = assoc(2);
    let rep = ek_pipeline(&a, 2).unwrap();
    assert_eq!(rep.residual_terms, 0);
    assert!(rep.phi_trivial);
    assert!(rep.r_expansion);
    assert_eq!(rep.qybe_terms, 0);
    assert!(rep.ribbon);
    for (name, ok) in rep.aek.checks().unwrap() {
        assert!(ok, "{name}");
    }
}

#[test]
fn exercise_and_sl2_unknot_series() {
    assert_eq!(sl2_unknot_series(4), vec![qi(2), qi(0), q(1, 4), qi(0), q(1, 192)]);
    assert!(exercise_residual().unwrap().is_zero());
    let a = assoc(4);
    let rep = ek_pipeline(&a, 2).unwrap();
    let c = conjecture_suite(&a, &rep.aek, 4).unwrap();
    assert!(c.zek_is_iota_zk);
    assert!(c.closed_form);
    assert!(c.alpha_beta_inverse);
    assert!(c.u_lie);
    assert_eq!(c.sl2_series, c.sl2_expected);
    assert_eq!(c.odd_traces.len(), 1);
}

#[test]
fn polyak_comparison() {
    let p = polyak_maps(3).unwrap();
    assert!(p.six_t_instances > 0);
    assert_eq!(p.six_t_killed, p.six_t_instances);
    assert_eq!(p.four_t_killed, p.four_t_instances);
    let cert = p.certificate.expect("tadpole outside the image of j");
    let arrow = space(&Skeleton::intervals(1), &RelSet::Aarrow, 1);
    let apply = |v: &FormalSum| -> Q {
        let red = arrow.reduce(v).unwrap();
        cert.iter().map(|(id, c)| red.iter().find(|(x, _)| x == id).map(|p| &p.1 * c).unwrap_or_else(Q::zero)).fold(Q::zero(), |a, b| a + b)
    };
    assert_eq!(apply(&p.tadpole), Q::one());
    let acyclic = enumerate_for(&Skeleton::intervals(1), 1, &RelSet::PolyakAcyclic, true, DEFAULT_LIMIT).unwrap();
    assert_eq!(acyclic.len(), p.j_image.len());
    for id in acyclic {
        assert!(apply(&FormalSum::from_id(id, Q::one(), 1)).is_zero());
    }
}
