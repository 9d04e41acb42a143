use jacobi::diagram::Skeleton;
use jacobi::horizontal::{solve_associator, ASSOC_GUARD};
use jacobi::linalg::q;
use jacobi::maps;
use jacobi::spaces::{space, RelSet};
use jacobi::sum::FormalSum;
use jacobi::tangle::*;

fn akz(cap: usize) -> QuasiHopf {
    let assoc = solve_associator(cap, ASSOC_GUARD).unwrap();
    QuasiHopf::akz(&assoc, cap).unwrap()
}

fn word(text: &str) -> TangleWord {
    TangleWord::parse(&text.replace(';', "\n")).unwrap()
}

#[test]
fn paren_strings_and_substitution() {
    let w = Paren::parse("((ud)(*((uu)d)))").unwrap();
    assert_eq!(w.star_offsets(), (2, 3));
    assert_eq!(w.substitute(&Paren::Empty).to_string(), "((ud)((uu)d))");
    assert_eq!(w.substitute(&Paren::parse("(du)").unwrap()).to_string(), "((ud)((du)((uu)d)))");
    assert_eq!(Paren::parse("*").unwrap().substitute(&Paren::Empty), Paren::Empty);
    assert!(Paren::parse("(u)").is_err());
    assert_eq!(Paren::parse("((*?)u)").unwrap(), Paren::parse("(*u)").unwrap());
    assert!(Paren::parse("(uuu)").is_err());
}

#[test]
fn word_parsing_and_composability() {
    let t = TangleWord::parse(words::HOPF).unwrap();
    assert_eq!(t.domain(), Paren::Empty);
    assert_eq!(t.target(), Paren::Empty);
    assert_eq!(TangleWord::parse(&t.to_text()).unwrap(), t);
    assert!(matches!(TangleWord::parse("cn\ncn\n"), Err(TangleError::NotComposable(2, _, _))));
    assert!(matches!(TangleWord::parse("ov A=u\n"), Err(TangleError::Parse(1, _))));
    assert!(matches!(TangleWord::parse("cp W=(uu)\n"), Err(TangleError::Parse(1, _))));
    for (name, text) in words::ALL {
        assert!(TangleWord::parse(text).is_ok(), "{name}");
    }
}

#[test]
fn delta_w_examples() {
    let h = akz(2);
    let c = maps::casimir(2);
    // Δ_{(↑(↓↑))} = S₂Δ₂Δ
    let w = Paren::parse("(u(du))").unwrap();
    let direct = maps::antipode(&maps::cabling(&maps::cabling(&c, 0).unwrap(), 1).unwrap(), 1).unwrap();
    assert!(equal_mod(&h.delta_w(&c, 0, &w).unwrap(), &direct).unwrap());
    // Δ_∅ = ε and Δ_W(1) = 1
    assert!(h.delta_w(&c, 0, &Paren::Empty).unwrap().is_zero());
    let one = FormalSum::one(Skeleton::intervals(1), false, 2);
    assert_eq!(h.delta_w(&one, 0, &w).unwrap(), FormalSum::one(Skeleton::intervals(3), false, 2));
}

#[test]
fn identity_word_is_unit() {
    let h = akz(2);
    let z = z_eval(&word("id W=u"), &h).unwrap();
    assert_eq!(z.deco, FormalSum::one(Skeleton::intervals(1), false, 2));
}

#[test]
fn akz_structure_identities() {
    let h = akz(3);
    for (name, ok) in h.checks().unwrap() {
        assert!(ok, "{name}");
    }
    let u = maps::exp(&maps::casimir(3).scale(&q(-1, 2))).unwrap();
    assert!(equal_mod(&h.u, &u).unwrap());
}

#[test]
fn unknot_presentations_curl_and_over_crossing() {
    let h = akz(3);
    let a = z_eval(&TangleWord::parse(words::UNKNOT).unwrap(), &h).unwrap();
    let b = z_eval(&TangleWord::parse(words::UNKNOT_ALT).unwrap(), &h).unwrap();
    assert!(same_morphism(&a, &b).unwrap());
    let curl = z_eval(&TangleWord::parse(words::CURL).unwrap(), &h).unwrap();
    assert!(equal_mod(&curl.deco, &h.v).unwrap());
    let inv = z_eval(&TangleWord::parse(words::CURL_INVERSE).unwrap(), &h).unwrap();
    assert!(equal_mod(&inv.deco, &maps::inverse(&h.v).unwrap()).unwrap());
    // ov with A = (↑↑), B = ↑: 1 + ½ t13 + ½ t23 in degree ≤ 1
    let z = z_eval(&word("ov A=(uu) B=u"), &akz(1)).unwrap();
    let om = maps::omega(1).scale(&q(1, 2));
    let expect = FormalSum::one(Skeleton::intervals(3), false, 1)
        .add(&maps::relabel(&om, &[0, 2], 3).unwrap())
        .add(&maps::relabel(&om, &[1, 2], 3).unwrap());
    assert!(equal_mod(&z.deco, &expect).unwrap());
}

#[test]
fn relation_suite_on_akz() {
    let h = akz(3);
    for (name, ok) in relation_suite(&h).unwrap() {
        assert!(ok, "{name}");
    }
}

#[test]
fn wheels_formula_for_unknot() {
    let h = akz(4);
    let z = z_eval(&TangleWord::parse(words::UNKNOT).unwrap(), &h).unwrap();
    let k = knot_value(&z).unwrap();
    let w = maps::trace(&maps::chi(&wheels_unknot(4), 0).unwrap(), 0).unwrap();
    let sp = space(&Skeleton::circle(), &RelSet::A, 4);
    assert!(sp.equal(k, &w).unwrap());
}

fn fundamental_generators() -> Vec<TangleWord> {
    ["ra A=u B=u C=u", "la A=u B=u C=u", "ov A=u B=u", "un A=u B=u", "cp", "cn", "ap", "an"].iter().map(|s| word(s)).collect()
}

#[test]
fn trivial_twist_changes_nothing() {
    let h = akz(2);
    let one = FormalSum::one(Skeleton::intervals(2), false, 2);
    let hf = h.twisted(&one).unwrap();
    assert!(equal_mod(&hf.phi, &h.phi).unwrap());
    assert!(equal_mod(&hf.r, &h.r).unwrap());
    assert!(equal_mod(&hf.alpha, &h.alpha).unwrap());
    assert!(equal_mod(&hf.beta, &h.beta).unwrap());
}

#[test]
fn symmetric_twist_keeps_r_and_link_values() {
    let h = akz(3);
    let f = random_symmetric_twist(7, 3, false);
    let hf = h.twisted(&f).unwrap();
    assert!(equal_mod(&hf.r, &h.r).unwrap());
    for (name, ok) in hf.checks().unwrap() {
        assert!(ok, "twisted {name}");
    }
    for name in ["unknot", "hopf", "trefoil_right"] {
        let t = words::named(name).unwrap();
        let a = z_eval(&t, &h).unwrap();
        let b = z_eval(&t, &hf).unwrap();
        assert!(same_morphism(&a, &b).unwrap(), "{name}");
    }
}

#[test]
fn degenerate_twist_is_rejected() {
    let h = akz(2);
    let f = FormalSum::one(Skeleton::intervals(2), false, 2).add(&maps::relabel(&maps::casimir(2), &[0], 2).unwrap());
    assert!(matches!(h.twisted(&f), Err(TangleError::Degenerate(_))));
}

#[test]
fn twist_conjugates_generators() {
    let h = akz(3);
    let f = random_symmetric_twist(11, 3, false);
    for t in fundamental_generators() {
        let (lhs, rhs) = lm_twist_sides(&t, &h, &f).unwrap();
        assert!(same_morphism(&lhs, &rhs).unwrap(), "{}", t.to_text());
    }
}

#[test]
fn twist_conjugates_generators_nonsymmetric() {
    // F = 1 + ½ (C⊗1)Ω is not symmetric, so R_F ≠ R
    let h = akz(2);
    let c1 = maps::tensor(&maps::casimir(2), &FormalSum::one(Skeleton::intervals(1), false, 2));
    let f = h.one(2).add(&maps::mul(&c1, &maps::omega(2)).unwrap().scale(&q(1, 2)));
    let hf = h.twisted(&f).unwrap();
    assert!(!equal_mod(&hf.r, &h.r).unwrap());
    for (name, ok) in hf.checks().unwrap() {
        assert!(ok, "twisted {name}");
    }
    for t in fundamental_generators().into_iter().chain([word("ov A=u B=d"), word("la A=d B=u C=u")]) {
        let (lhs, rhs) = lm_twist_sides(&t, &h, &f).unwrap();
        assert!(same_morphism(&lhs, &rhs).unwrap(), "{}", t.to_text());
    }
    let u = z_eval(&words::named("unknot").unwrap(), &h).unwrap();
    let uf = z_eval(&words::named("unknot").unwrap(), &hf).unwrap();
    assert!(same_morphism(&u, &uf).unwrap());
}

#[test]
fn generalized_twisted_coproduct() {
    let h = akz(2);
    let mut f = random_symmetric_twist(5, 2, false);
    f = f.add(&maps::omega(2).scale(&q(-1, 2)));
    let hf = h.twisted(&f).unwrap();
    let x = maps::casimir(2).add(&maps::casimir(2).scale(&q(1, 2)));
    let fi = maps::inverse(&f).unwrap();
    for w in ["(uu)", "((uu)u)", "(u(du))"] {
        let w = Paren::parse(w).unwrap();
        let lhs = hf.delta0_w(&x, 0, &w).unwrap();
        let rhs = maps::mul_all(&[&h.f0_w(&f, &w).unwrap(), &h.delta0_w(&x, 0, &w).unwrap(), &h.g0_w(&fi, &w).unwrap()]).unwrap();
        assert!(equal_mod(&lhs, &rhs).unwrap(), "{w}");
    }
}

#[test]
fn u_element_identities() {
    let h = akz(3);
    // S(α)u = S(t_i) α s_i
    let lhs = maps::mul(&maps::antipode(&h.alpha, 0).unwrap(), &h.u).unwrap();
    let rhs = maps::contract(
        &maps::antipode(&h.r, 1).unwrap(),
        &[vec![maps::Piece::Strand(1), maps::Piece::Elem(&h.alpha), maps::Piece::Strand(0)]],
    )
    .unwrap();
    assert!(equal_mod(&lhs, &rhs).unwrap());
    // S²(x) = u x u⁻¹ on the directed structure
    let assoc = solve_associator(2, ASSOC_GUARD).unwrap();
    let d = QuasiHopf::aarkz(&assoc, 2).unwrap();
    let x =
        maps::left_half_circ(2).add(&maps::tadpole(true, 2)).add(&maps::mul(&maps::left_half_circ(2), &maps::right_half_circ(2)).unwrap());
    let s2 = maps::antipode(&maps::antipode(&x, 0).unwrap(), 0).unwrap();
    let conj = maps::mul_all(&[&d.u, &x, &maps::inverse(&d.u).unwrap()]).unwrap();
    assert!(equal_mod(&s2, &conj).unwrap());
}
