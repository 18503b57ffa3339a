use itercurve::descent::{
    basis_sign, check_s_unit_hypothesis, galois_sigma, is_invariant, parity_component,
    pullback_word, theta, P1Comb, P1Letter,
};
use itercurve::exactfield::{Cyc, Level};
use itercurve::words::{
    alphabet, enumerate_admissible, is_admissible, parse_word, shuffle, CurveLetter, CurveWord,
};
use itercurve::Curve;
use proptest::prelude::*;

fn letter(l: Level, s: &str) -> P1Letter {
    P1Letter::parse(s, l).unwrap()
}

fn theta_of(curve: Curve, i: u8) -> P1Comb {
    theta(CurveLetter::new(curve, i).unwrap())
}

#[test]
fn theta_examples() {
    let l = Level::N4;
    let i = Cyc::xi(l);
    let iinv = i.inv().unwrap();
    let t2 = theta_of(Curve::G, 2);
    assert_eq!(t2.len(), 2);
    assert_eq!(t2.terms()[&vec![letter(l, "i")]], iinv);
    assert_eq!(t2.terms()[&vec![letter(l, "-i")]], -&iinv);
    let t3 = theta_of(Curve::G, 3);
    assert_eq!(t3, P1Comb::single(vec![P1Letter::zero(l)], Cyc::one(l)));
    let t6 = theta_of(Curve::H, 6);
    assert_eq!(
        t6,
        P1Comb::single(vec![P1Letter::one(Level::N6)], Cyc::int(Level::N6, -1))
    );
    // ω4 ↦ (1/√-3)(e_{ξ3} - e_{ξ3^-1})
    let t4 = theta_of(Curve::H, 4);
    let c = Cyc::sqrt_minus3().inv().unwrap();
    assert_eq!(t4.terms()[&vec![letter(Level::N6, "z3")]], c);
    assert_eq!(t4.terms()[&vec![letter(Level::N6, "z3c")]], -&c);
}

#[test]
fn pullback_examples() {
    let l = Level::N4;
    let p = pullback_word(&parse_word("1,0", Curve::G).unwrap()).unwrap();
    assert_eq!(p.len(), 9);
    assert_eq!(
        p.terms()[&vec![P1Letter::one(l), P1Letter::zero(l)]],
        Cyc::int(l, -2)
    );
    assert_eq!(
        pullback_word(&parse_word("2", Curve::G).unwrap())
            .unwrap()
            .len(),
        2
    );
    assert!(pullback_word(&parse_word("0,2", Curve::G).unwrap()).is_err());
}

#[test]
fn pullback_support_bound() {
    for w in enumerate_admissible(Curve::G, 4).unwrap() {
        let count = |i: u8| w.indices().iter().filter(|&&x| x == i).count() as u32;
        let bound = 3usize.pow(count(0) + count(1)) * 2usize.pow(count(2));
        let p = pullback_word(&w).unwrap();
        assert!(p.len() <= bound, "{w}");
        for t in p.terms().keys() {
            assert!(!t[0].is_zero() && !t.last().unwrap().is_one(), "{w}");
        }
    }
}

#[test]
fn galois_examples() {
    let l = Level::N4;
    let i = Cyc::xi(l);
    let x = P1Comb::single(vec![letter(l, "i")], i.inv().unwrap());
    assert_eq!(
        galois_sigma(&x),
        P1Comb::single(vec![letter(l, "-i")], i.clone())
    );
    let e0 = P1Comb::single(vec![P1Letter::zero(l)], Cyc::one(l));
    assert_eq!(galois_sigma(&e0), e0);
    assert!(is_invariant(&theta_of(Curve::G, 2)));
    assert!(!is_invariant(&P1Comb::single(
        vec![letter(l, "i")],
        Cyc::one(l)
    )));
}

#[test]
fn pullbacks_are_invariant_exhaustively() {
    for (curve, kmax) in [(Curve::G, 5), (Curve::H, 5)] {
        for k in 1..=kmax {
            for w in enumerate_admissible(curve, k).unwrap() {
                let p = pullback_word(&w).unwrap();
                assert!(is_invariant(&p), "{curve}:{w}");
                assert_eq!(galois_sigma(&galois_sigma(&p)), p);
            }
        }
    }
}

#[test]
fn parity_examples() {
    assert_eq!(
        parity_component(&parse_word("2,3", Curve::G).unwrap()).unwrap(),
        1
    );
    assert_eq!(
        parity_component(&parse_word("1,0", Curve::G).unwrap()).unwrap(),
        0
    );
    assert_eq!(
        parity_component(&parse_word("4,4,0", Curve::H).unwrap()).unwrap(),
        0
    );
}

#[test]
fn parity_support_exhaustive() {
    for (curve, kmax) in [(Curve::G, 4), (Curve::H, 3)] {
        let (p, gen) = match curve {
            Curve::G => (2, Cyc::xi(Level::N4)),
            Curve::H => (4, Cyc::sqrt_minus3()),
        };
        for k in 1..=kmax {
            for w in enumerate_admissible(curve, k).unwrap() {
                let n = w.indices().iter().filter(|&&x| x == p).count();
                assert_eq!(parity_component(&w).unwrap() as usize, n % 2);
                let g = gen.pow(-(n as i64)).unwrap();
                for c in pullback_word(&w).unwrap().terms().values() {
                    assert!(c.is_rational_multiple_of(&g), "{curve}:{w} coefficient {c}");
                }
            }
        }
    }
}

#[test]
fn basis_signs() {
    assert_eq!(basis_sign(2, Curve::G).unwrap(), -1);
    assert_eq!(basis_sign(3, Curve::G).unwrap(), 1);
    assert_eq!(basis_sign(1, Curve::H).unwrap(), 1);
    for k in 1..=8 {
        let expect = if k % 2 == 1 { 1 } else { -1 };
        assert_eq!(basis_sign(k, Curve::G).unwrap(), expect);
        assert_eq!(basis_sign(k, Curve::H).unwrap(), expect);
    }
    assert!(basis_sign(0, Curve::G).is_err());
}

#[test]
fn s_unit_hypothesis() {
    assert_eq!(check_s_unit_hypothesis(Curve::G).unwrap(), 64);
    assert_eq!(check_s_unit_hypothesis(Curve::H).unwrap(), 125);
}

fn admissible(curve: Curve, max: usize) -> impl Strategy<Value = CurveWord> {
    let a = alphabet(curve).to_vec();
    prop::collection::vec(prop::sample::select(a), 1..=max)
        .prop_map(move |l| CurveWord::new(curve, l).unwrap())
        .prop_filter("admissible", is_admissible)
}

fn curve() -> impl Strategy<Value = Curve> {
    prop_oneof![Just(Curve::G), Just(Curve::H)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pullback_commutes_with_shuffle((u, v) in curve().prop_flat_map(|c| (admissible(c, 3), admissible(c, 2)))) {
        let level = u.curve().level();
        let mut lhs = P1Comb::zero(level);
        for (t, c) in shuffle(&u, &v).unwrap().terms() {
            lhs = lhs.add(&pullback_word(t).unwrap().scale(&Cyc::from_rat(level, c.clone())));
        }
        let rhs = pullback_word(&u).unwrap().shuffle(&pullback_word(&v).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}
