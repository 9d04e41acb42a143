use jacobi::diagram::{enumerate_diagrams, Skeleton};
use jacobi::lie::*;
use jacobi::linalg::{q, qi, Q};
use jacobi::maps::{casimir, iota, r_arrow, rho};
use jacobi::spaces::{generate_relations, RelSet, DEFAULT_LIMIT};
use jacobi::sum::FormalSum;
use num_traits::{One, Zero};

fn relation_sum(r: &[(jacobi::diagram::Diagram, Q)], cap: usize) -> FormalSum {
    let mut s = FormalSum::zero(r[0].0.skeleton.clone(), r[0].0.is_directed(), cap);
    for (d, c) in r {
        s.add_raw(d, c);
    }
    s
}

#[test]
fn sl2_relations_evaluate_to_zero() {
    let g = LieAlgebra::sl2();
    for s in [Skeleton::intervals(1), Skeleton::intervals(2)] {
        for m in 1..=2 {
            for r in generate_relations(&s, m, &RelSet::A, true, DEFAULT_LIMIT).unwrap() {
                let v = relation_sum(&r, 2);
                assert!(tg_eval(&v, &g).unwrap().is_zero(), "{} degree {m}", s.tokens());
            }
        }
    }
}

#[test]
fn directed_relations_evaluate_to_zero_on_double() {
    let mt = ManinTriple::sl2_double();
    for m in 1..=2 {
        for r in generate_relations(&Skeleton::intervals(1), m, &RelSet::Aarrow, true, DEFAULT_LIMIT).unwrap() {
            let v = relation_sum(&r, 2);
            assert!(tar_eval(&v, &mt).unwrap().is_zero());
        }
    }
}

#[test]
fn iota_commutes_with_evaluation() {
    let mt = ManinTriple::sl2_double();
    for s in [Skeleton::intervals(1), Skeleton::intervals(2)] {
        for m in 0..=2 {
            for id in enumerate_diagrams(&s, m, false, true, DEFAULT_LIMIT).unwrap() {
                let v = FormalSum::from_id(id, Q::one(), 2);
                assert_eq!(tar_eval(&iota(&v), &mt).unwrap(), tg_eval(&v, &mt.g).unwrap());
            }
        }
    }
}

#[test]
fn r_arrow_projects_to_classical_r_matrix() {
    let mt = ManinTriple::sl2_double();
    let (sl2, proj) = mt.projection.clone().unwrap();
    let t = project(&tar_eval(&r_arrow(1), &mt).unwrap(), &sl2, &proj);
    // e⊗f + ¼ h⊗h with e = 0, f = 1, h = 2
    let mut expect = UEnvTensor::zero(2);
    expect.add_term((1, vec![vec![0], vec![1]]), qi(1));
    expect.add_term((1, vec![vec![2], vec![2]]), q(1, 4));
    assert_eq!(t, expect);
}

#[test]
fn rho_evaluates_to_half_h() {
    let mt = ManinTriple::sl2_double();
    let (sl2, proj) = mt.projection.clone().unwrap();
    let t = project(&tar_eval(&rho(1), &mt).unwrap(), &sl2, &proj);
    let mut expect = UEnvTensor::zero(1);
    expect.add_term((1, vec![vec![2]]), q(1, 2));
    assert_eq!(t, expect);
}

#[test]
fn casimir_acts_as_scalar_on_fundamental() {
    let g = LieAlgebra::sl2();
    let t = tg_eval(&casimir(1), &g).unwrap();
    // ef + fe + ½h² = 3/2 · id on C², trace 3
    let tr = trace_on_rep(&t, &g, &["fund"]).unwrap();
    assert_eq!(tr, vec![Q::zero(), qi(3)]);
}

#[test]
fn pbw_normal_form_straightens() {
    let g = LieAlgebra::sl2();
    let mut p = Pbw::new(&g);
    // f e = e f − h
    let nf = p.normalize(&[1, 0]);
    assert_eq!(nf, vec![(vec![0, 1], qi(1)), (vec![2], qi(-1))]);
}

#[test]
fn lie_file_round_trip_and_rejections() {
    match parse_lie(&sl2_text()).unwrap() {
        LieFile::Metrized(g) => {
            assert_eq!(g.dim(), 3);
            assert!(g.reps.contains_key("fund"));
        }
        other => panic!("unexpected {other:?}"),
    }
    let bad_jacobi = "dim 3\nbracket 1 2 -> 1 1\nbracket 1 3 -> 3 1\nbracket 2 3 -> 1 1\nmetric 1 1 1\nmetric 2 2 1\nmetric 3 3 1\n";
    assert!(matches!(parse_lie(bad_jacobi), Err(LieError::Jacobi(..)) | Err(LieError::Invariance(..))));
    let singular = "dim 1\nmetric 1 1 0\n";
    assert!(matches!(parse_lie(singular), Err(LieError::Singular)));
    assert!(matches!(parse_lie("dim 2\nfrobnicate\n"), Err(LieError::Parse(2, _))));
}

#[test]
fn double_of_two_dimensional_bialgebra() {
    // [x, y] = y, δ(x) = 0, δ(y) = y ∧ x
    let text = "dim 2\nnames x y\nbracket 1 2 -> 2 1\ncobracket 2 -> 2 1 1\ncobracket 2 -> 1 2 -1\n";
    let LieFile::Bialgebra(a, _) = parse_lie(text).unwrap() else { panic!("expected a bialgebra") };
    let mt = build_double(&a).unwrap();
    assert_eq!(mt.g.dim(), 4);
    for &i in &mt.plus {
        for &j in &mt.plus {
            assert!(mt.g.metric[i][j].is_zero());
        }
    }
    // a cobracket violating the cocycle condition is rejected
    let bad =
        "dim 3\nnames e f h\nbracket 1 2 -> 3 1\nbracket 3 1 -> 1 2\nbracket 3 2 -> 2 -2\ncobracket 1 -> 1 3 1\ncobracket 1 -> 3 1 -1\n";
    let LieFile::Bialgebra(b, _) = parse_lie(bad).unwrap() else { panic!("expected a bialgebra") };
    assert!(matches!(build_double(&b), Err(LieError::Cocycle(..))));
}
