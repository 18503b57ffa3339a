mod common;

use itercurve::numkernel::{
    bernoulli, const_eval, constant, dirichlet_l_chi3, hurwitz_zeta, zeta, ApproxR, Constant,
    Context,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn ctx(p: u32) -> Context {
    Context::new(p).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn precision_below_ten_is_rejected() {
    assert!(Context::new(9).is_err());
    assert!(Context::new(10).is_ok());
}

#[test]
fn constants_match_independent_series() {
    for p in [15, 30, 100, 300] {
        let c = ctx(p);
        let pi = const_eval("pi", &c).unwrap();
        assert!(c.meets(&pi));
        assert!(common::contains(&pi, common::pi), "pi at P={p}");
        assert!(
            common::contains(&const_eval("log2", &c).unwrap(), common::log2),
            "log2 at P={p}"
        );
        assert!(
            common::contains(&const_eval("log3", &c).unwrap(), common::log3),
            "log3 at P={p}"
        );
        assert!(
            common::contains(&const_eval("catalan", &c).unwrap(), common::catalan),
            "catalan at P={p}"
        );
    }
}

#[test]
fn constant_examples() {
    assert_eq!(
        const_eval("pi", &ctx(30)).unwrap().to_decimal(30),
        "3.141592653589793238462643383280"
    );
    assert_eq!(
        const_eval("log2", &ctx(15)).unwrap().to_decimal(15),
        "0.693147180559945"
    );
    assert_eq!(
        const_eval("catalan", &ctx(15)).unwrap().to_decimal(15),
        "0.915965594177219"
    );
    assert!(const_eval("e", &ctx(15)).is_err());
    assert_eq!("log3".parse::<Constant>().unwrap(), Constant::Log3);
}

#[test]
fn zeta_examples() {
    let c = ctx(20);
    assert_eq!(
        zeta(2, &c).unwrap().to_decimal(20),
        "1.64493406684822643647"
    );
    assert_eq!(
        zeta(3, &ctx(15)).unwrap().to_decimal(15),
        "1.202056903159594"
    );
    assert!(zeta(1, &c).is_err());
    for p in [12, 50, 200] {
        let c = ctx(p);
        let pi = const_eval("pi", &c).unwrap();
        let diff = &zeta(2, &c).unwrap() - &(&pi * &pi).div_int(6);
        assert!(diff.contains_zero());
    }
}

#[test]
fn zeta_agrees_with_direct_sums() {
    let c = ctx(16);
    for s in 3..=10 {
        let z = zeta(s, &c).unwrap().to_f64();
        assert!((z - common::zeta_f64(s as i32)).abs() < 1e-14, "zeta({s})");
    }
}

/// Akiyama–Tanigawa; returns `B_n` with `B_1 = +1/2`.
fn bernoulli_at(n: usize) -> BigRational {
    let mut a: Vec<BigRational> = (0..=n).map(|m| q(1, m as i64 + 1)).collect();
    for m in 0..=n {
        a[m] = q(1, m as i64 + 1);
        for j in (1..=m).rev() {
            a[j - 1] = (&a[j - 1] - &a[j]) * BigRational::from_integer(BigInt::from(j));
        }
    }
    a[0].clone()
}

#[test]
fn bernoulli_numbers() {
    assert_eq!(bernoulli(0), BigRational::one());
    assert_eq!(bernoulli(1), q(-1, 2));
    assert_eq!(bernoulli(2), q(1, 6));
    assert_eq!(bernoulli(12), q(-691, 2730));
    assert!(bernoulli(7).is_zero());
    for n in 2..=30 {
        assert_eq!(bernoulli(n), bernoulli_at(n), "B_{n}");
    }
}

#[test]
fn even_zeta_from_bernoulli() {
    let c = ctx(60);
    let pi = const_eval("pi", &c).unwrap();
    for k in 1..=6u32 {
        // ζ(2k) = (-1)^{k+1} B_{2k} (2π)^{2k} / (2 (2k)!)
        let mut fact = BigInt::one();
        for i in 1..=2 * k {
            fact *= i;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let coeff = bernoulli_at(2 * k as usize)
            * BigRational::new(BigInt::from(sign) << (2 * k), fact * 2);
        let rhs = pi.pow(2 * k).mul_rational(&coeff);
        assert!(
            (&zeta(2 * k, &c).unwrap() - &rhs).contains_zero(),
            "zeta({})",
            2 * k
        );
    }
}

#[test]
fn hurwitz_examples() {
    let c = ctx(40);
    let z2 = zeta(2, &c).unwrap();
    assert!((&hurwitz_zeta(2, &q(1, 1), &c).unwrap() - &z2).contains_zero());
    assert!((&hurwitz_zeta(2, &q(1, 2), &c).unwrap() - &z2.mul_int(3)).contains_zero());
    let h = hurwitz_zeta(2, &q(1, 3), &ctx(15)).unwrap();
    assert_eq!(h.to_decimal(14), "10.09559712542709");
    assert!(hurwitz_zeta(2, &q(0, 1), &c).is_err());
    assert!(hurwitz_zeta(2, &q(3, 2), &c).is_err());
}

#[test]
fn l_chi3_examples() {
    let l2 = dirichlet_l_chi3(2, &ctx(12)).unwrap().to_f64();
    assert!((l2 - 0.781302412897).abs() < 1e-12);
    let (sum, tail) = common::l_chi3_f64(4, 10_000);
    let l4 = dirichlet_l_chi3(4, &ctx(12)).unwrap().to_f64();
    assert!((l4 - sum).abs() <= tail + 1e-15);
    assert!((l4 - 0.940025680877).abs() < 1e-12);
    for s in 2..=10 {
        let l = dirichlet_l_chi3(s, &ctx(20)).unwrap().to_f64();
        assert!(l > 0.0 && l < 1.0);
    }
}

#[test]
fn l_chi3_agrees_with_character_sum() {
    let c = ctx(20);
    for s in [2, 3, 4] {
        let (sum, tail) = common::l_chi3_f64(s, 1_000_000);
        let l = dirichlet_l_chi3(s as u32, &c).unwrap().to_f64();
        assert!((l - sum).abs() <= tail + 1e-14, "L({s})");
    }
}

#[test]
fn decimal_and_error_rendering() {
    let x = ApproxR::from_rational(&q(-1, 8), 64);
    assert_eq!(x.to_decimal(4), "-0.1250");
    assert_eq!(ApproxR::from_int(3, 20).to_decimal(0), "3");
    assert_eq!(ApproxR::zero(30).err_string(), "0");
    let pi = constant(Constant::Pi, ctx(50).bits());
    assert!(pi.err_log10() < -50.0);
}

#[derive(Clone, Debug)]
enum Expr {
    Const(Constant),
    Zeta(u32),
    Int(i64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    DivInt(Box<Expr>, i64),
}

fn eval(e: &Expr, c: &Context) -> ApproxR {
    match e {
        Expr::Const(k) => constant(*k, c.bits()),
        Expr::Zeta(s) => zeta(*s, c).unwrap(),
        Expr::Int(n) => ApproxR::from_int(*n, c.bits()),
        Expr::Add(a, b) => &eval(a, c) + &eval(b, c),
        Expr::Sub(a, b) => &eval(a, c) - &eval(b, c),
        Expr::Mul(a, b) => &eval(a, c) * &eval(b, c),
        Expr::DivInt(a, n) => eval(a, c).div_int(*n),
    }
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        prop_oneof![
            Just(Constant::Pi),
            Just(Constant::Log2),
            Just(Constant::Log3),
            Just(Constant::Catalan)
        ]
        .prop_map(Expr::Const),
        (2u32..6).prop_map(Expr::Zeta),
        (-50i64..50).prop_map(Expr::Int),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner, prop_oneof![1i64..20, -20i64..-1])
                .prop_map(|(a, n)| Expr::DivInt(Box::new(a), n)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balls_at_two_precisions_overlap(e in expr(), p in 12u32..40) {
        let lo = eval(&e, &ctx(p));
        let hi = eval(&e, &ctx(2 * p));
        prop_assert!(lo.overlaps(&hi));
    }

    #[test]
    fn rational_balls_contain_their_value(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = ApproxR::from_rational(&q(n, d), 80);
        let back = ApproxR::from_int(n, 80).div_int(d);
        prop_assert!(x.overlaps(&back));
    }
}
