mod common;

use itercurve::descent::P1Letter;
use itercurve::eval::{
    clear_cache, closed_form_special, coeff_c, eval_curve_direct, eval_curve_word, eval_p1_full,
    eval_p1_half, explicit_form_g_even, explicit_form_g_odd, explicit_form_h_even,
    explicit_form_h_odd, mlv, polylog, ttilde, ttilde_word,
};
use itercurve::exactfield::{rat, rat_int, Cyc, Level};
use itercurve::numkernel::{dirichlet_l_chi3, zeta, ApproxC, ApproxR, Context};
use itercurve::words::{alphabet, enumerate_admissible, parse_word, CurveLetter};
use itercurve::Curve;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

fn ctx(p: u32) -> Context {
    Context::new(p).unwrap()
}

fn word(curve: Curve, s: &str) -> itercurve::words::CurveWord {
    parse_word(s, curve).unwrap()
}

fn letters(l: Level, s: &str) -> Vec<P1Letter> {
    s.split(',')
        .map(|t| P1Letter::parse(t, l).unwrap())
        .collect()
}

fn curve_value(curve: Curve, s: &str, p: u32) -> ApproxR {
    eval_curve_word(&word(curve, s), &ctx(p)).unwrap()
}

#[test]
fn series_coefficients() {
    let l = |c, i| CurveLetter::new(c, i).unwrap();
    assert_eq!(coeff_c(3, l(Curve::G, 2)), rat(1, 2));
    assert_eq!(coeff_c(0, l(Curve::G, 3)), rat_int(1));
    assert_eq!(coeff_c(3, l(Curve::H, 6)), rat(11, 16));
    assert_eq!(coeff_c(0, l(Curve::H, 0)), rat_int(1));
    assert_eq!(coeff_c(5, l(Curve::G, 1)), rat_int(1));
    assert_eq!(coeff_c(4, l(Curve::G, 2)), rat_int(0));
}

/// The one-forms as functions of `x`: `ω = f(x) dx`.
fn form(curve: Curve, i: u8, x: f64) -> f64 {
    let r = (1.0 - 0.75 * x * x).sqrt();
    match (curve, i) {
        (_, 0) => 1.0 / x,
        (_, 1) => 1.0 / (1.0 - x),
        (Curve::G, 2) => 1.0 / (1.0 - x * x).sqrt(),
        (Curve::G, 3) => 1.0 / (x * (1.0 - x * x).sqrt()),
        (Curve::H, 4) => 0.5 / r,
        (Curve::H, 5) => 0.5 / (x * r),
        (Curve::H, 6) => 0.5 / ((1.0 - x) * r),
        _ => unreachable!(),
    }
}

#[test]
fn coefficients_generate_the_forms() {
    let x = 0.3f64;
    let n = 80u64;
    // every |c(n, ω)| <= 2, so the tail is below 2 x^N / (1 - x)
    let tail = 2.0 * x.powi(n as i32 - 1) / (1.0 - x);
    for curve in [Curve::G, Curve::H] {
        for &i in alphabet(curve) {
            let l = CurveLetter::new(curve, i).unwrap();
            let sum: f64 = (0..n)
                .map(|k| coeff_c(k, l).to_f64().unwrap() * x.powi(k as i32 - 1))
                .sum();
            let f = form(curve, i, x);
            assert!(
                (sum - f).abs() <= tail + 1e-14 * f.abs(),
                "{curve} ω{i}: {sum} vs {f}"
            );
        }
    }
}

#[test]
fn half_path_examples() {
    let c = ctx(40);
    let l = Level::N4;
    let v = eval_p1_half(&letters(l, "-1"), &c).unwrap();
    // log(3/2) = 2 atanh(1/5)
    assert!(common::contains(&v.real(), |b| common::atanh_inv(5, b) * 2));
    assert!(v.imag().contains_zero());
    let v = eval_p1_half(&letters(l, "1"), &c).unwrap();
    assert!(common::contains(&v.real(), |b| -common::log2(b)));
    let v = eval_p1_half(&[], &c).unwrap();
    assert!((&v.real() - &ApproxR::from_int(1, v.bits())).contains_zero());
    assert!(eval_p1_half(&letters(l, "0"), &c).is_err());
}

#[test]
fn full_path_examples() {
    let c = ctx(50);
    let l = Level::N4;
    let v = eval_p1_full(&letters(l, "-1"), &c).unwrap();
    assert!(common::contains(&v.real(), common::log2));
    let v = eval_p1_full(&letters(l, "1,0"), &c).unwrap();
    let z2 = zeta(2, &c).unwrap();
    assert!((&v.real() + &z2).contains_zero());
    // I(0; -i, 0; 1) = -Li_2(i) = π²/48 - i G
    let v = eval_p1_full(&letters(l, "-i,0"), &c).unwrap();
    assert!(common::contains(&v.real(), |b| {
        let p = common::pi(b);
        ((&p * &p) >> b) / 48
    }));
    assert!(common::contains(&v.imag(), |b| -common::catalan(b)));
    assert!(eval_p1_full(&letters(l, "0,-1"), &c).is_err());
    assert!(eval_p1_full(&letters(l, "-1,1"), &c).is_err());
}

#[test]
fn curve_word_examples() {
    let p = 60;
    assert!((&curve_value(Curve::G, "1,0", p) - &zeta(2, &ctx(p)).unwrap()).contains_zero());
    let v = curve_value(Curve::G, "2,0", p);
    assert!(common::contains(&v, |b| (common::pi(b) * common::log2(b)) >> (b + 1)));
    assert_eq!(v.to_decimal(13), "1.0887930451518");
    assert!(common::contains(
        &curve_value(Curve::G, "2", p),
        |b| common::pi(b) >> 1
    ));
    assert!(eval_curve_word(&word(Curve::H, "0,0"), &ctx(p)).is_err());
}

#[test]
fn every_low_weight_word_is_real_and_meets_precision() {
    let c = ctx(30);
    for curve in [Curve::G, Curve::H] {
        for k in 1..=3 {
            for w in enumerate_admissible(curve, k).unwrap() {
                let v = eval_curve_word(&w, &c).unwrap();
                assert!(c.meets(&v), "{curve}:{w}");
            }
        }
    }
}

#[test]
fn multiple_l_values() {
    let c = ctx(40);
    let l = Level::N4;
    let one = Cyc::one(l);
    let m1 = Cyc::int(l, -1);
    let z2 = zeta(2, &c).unwrap();
    assert!((&mlv(&[2], std::slice::from_ref(&one), &c).unwrap().real() - &z2).contains_zero());
    let v = mlv(&[2], std::slice::from_ref(&m1), &c).unwrap().real();
    assert!((&v + &z2.div_int(2)).contains_zero());
    let v = mlv(&[1], &[m1], &c).unwrap().real();
    assert!(common::contains(&v, |b| -common::log2(b)));
    assert!(mlv(&[1], &[one], &c).is_err());
    // ζ(1, 2) = ζ(3)
    let v = mlv(&[1, 2], &[Cyc::one(l), Cyc::one(l)], &c)
        .unwrap()
        .real();
    assert!((&v - &zeta(3, &c).unwrap()).contains_zero());
}

#[test]
fn t_tilde_values() {
    let p = 60;
    let c = ctx(p);
    assert!(common::contains(
        &ttilde(&[2], &c).unwrap(),
        |b| common::catalan(b) * 2
    ));
    assert!(common::contains(&ttilde(&[3], &c).unwrap(), |b| {
        let pi = common::pi(b);
        ((((&pi * &pi) >> b) * &pi) >> b) / 16
    }));
    assert_eq!(ttilde_word(&[1, 2]).unwrap().to_string(), "2,2,3");
    let exact = ttilde(&[1, 2], &c).unwrap().to_f64();
    let est = eval_curve_direct(&ttilde_word(&[1, 2]).unwrap(), 100_000, &c).unwrap();
    assert!(!est.rigorous());
    assert!(
        (exact - est.value).abs() <= est.err,
        "{exact} vs {} ± {}",
        est.value,
        est.err
    );
}

#[test]
fn direct_series() {
    let c = ctx(20);
    let est = eval_curve_direct(&word(Curve::G, "1,0"), 100_000, &c).unwrap();
    assert!((est.value - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-4);
    for s in ["4,0", "2,3", "4,4,0", "2,1,0", "4,6,0"] {
        let curve = if s.contains('4') { Curve::H } else { Curve::G };
        let w = word(curve, s);
        let est = eval_curve_direct(&w, 100_000, &c).unwrap();
        let exact = eval_curve_word(&w, &c).unwrap().to_f64();
        assert!(
            (exact - est.value).abs() <= est.err,
            "{s}: {exact} vs {} ± {}",
            est.value,
            est.err
        );
    }
    assert!(eval_curve_direct(&word(Curve::G, "1,0"), 5, &c).is_err());
    assert!(eval_curve_direct(&word(Curve::G, "0,2"), 1000, &c).is_err());
}

#[test]
fn closed_forms_for_special_words() {
    let p = 60;
    let c = ctx(p);
    let tol = 50;
    let check = |curve, s: &str, cf: &itercurve::eval::ClosedForm| {
        let d = &curve_value(curve, s, p) - &cf.eval(&c);
        assert!(d.abs_le_pow10(tol), "{curve}:{s}");
    };
    check(
        Curve::G,
        "2,0",
        &closed_form_special(Curve::G, 1, 2).unwrap(),
    );
    check(
        Curve::G,
        "2,2,0",
        &closed_form_special(Curve::G, 2, 3).unwrap(),
    );
    check(Curve::G, "2,2,0", &explicit_form_g_odd(1));
    check(Curve::G, "2,2,2,0", &explicit_form_g_even(2));
    check(Curve::G, "2,2,2,2,0", &explicit_form_g_odd(2));
    check(Curve::H, "4,0", &explicit_form_h_even(1));
    check(Curve::H, "4,4,0", &explicit_form_h_odd(1));
    check(Curve::H, "4,4,4,0", &explicit_form_h_even(2));
    // -(7/16) ζ(3) + (π²/8) log 2
    let z3 = common::zeta_f64(3);
    let expect = -7.0 / 16.0 * z3 + std::f64::consts::PI.powi(2) / 8.0 * std::f64::consts::LN_2;
    assert!((curve_value(Curve::G, "2,2,0", 30).to_f64() - expect).abs() < 1e-14);
    assert!((expect - 0.32923616).abs() < 1e-8);
    let inner = closed_form_special(Curve::G, 1, 3).unwrap();
    assert!(!inner.has_log2());
    check(Curve::G, "2,0,2", &inner);
    assert!(closed_form_special(Curve::G, 0, 3).is_err());
    assert!(closed_form_special(Curve::G, 3, 3).is_err());
}

#[test]
fn closed_form_recursion_matches_evaluator() {
    let p = 40;
    let c = ctx(p);
    for (curve, phi) in [(Curve::G, 2u8), (Curve::H, 4u8)] {
        for k in 2..=6u32 {
            for j in 1..k {
                let cf = closed_form_special(curve, j, k).unwrap();
                assert!(cf.is_homogeneous(k));
                let mut l = vec![phi; j as usize];
                l.push(0);
                l.extend(std::iter::repeat_n(phi, (k - j - 1) as usize));
                let w = itercurve::words::CurveWord::new(curve, l).unwrap();
                let d = &eval_curve_word(&w, &c).unwrap() - &cf.eval(&c);
                assert!(d.abs_le_pow10(p as i64 - 10), "{curve}:{w}");
            }
        }
    }
}

#[test]
fn symmetric_powers() {
    let p = 60;
    let c = ctx(p);
    for (curve, phi) in [(Curve::G, 2u8), (Curve::H, 4u8)] {
        let base = eval_curve_word(
            &itercurve::words::CurveWord::new(curve, vec![phi]).unwrap(),
            &c,
        )
        .unwrap();
        let mut fact = BigInt::from(1);
        for k in 1..=6u32 {
            fact *= k;
            let w = itercurve::words::CurveWord::new(curve, vec![phi; k as usize]).unwrap();
            let d = &eval_curve_word(&w, &c).unwrap() - &base.pow(k).div_int(fact.clone());
            assert!(d.abs_le_pow10(p as i64 - 10), "{curve} k={k}");
        }
    }
}

fn small(z: &ApproxC, p: u32) -> bool {
    z.abs_le_pow10(p as i64 - 10)
}

#[test]
fn polylog_parity_identities() {
    let p = 40;
    let c = ctx(p);
    let l4 = Level::N4;
    let l6 = Level::N6;
    let i = Cyc::xi(l4);
    let z6 = Cyc::xi(l6);
    for j in 2..=8usize {
        let bits = c.bits();
        let z = zeta(j as u32, &c).unwrap();
        let two = |e: i64| {
            rat(1, 1)
                * if e >= 0 {
                    rat_int(1 << e)
                } else {
                    rat(1, 1 << -e)
                }
        };
        let sum = &polylog(j, &i, &c).unwrap() + &polylog(j, &-&i, &c).unwrap();
        let rhs = z.mul_rational(&(two(1 - j as i64) * (two(1 - j as i64) - rat_int(1))));
        assert!(small(&(&sum - &ApproxC::from_real(&rhs)), p), "i, j={j}");

        let sum =
            &polylog(j, &Cyc::one(l4), &c).unwrap() + &polylog(j, &Cyc::int(l4, -1), &c).unwrap();
        let rhs = z.mul_rational(&two(1 - j as i64));
        assert!(small(&(&sum - &ApproxC::from_real(&rhs)), p), "1, j={j}");

        let sum = &polylog(j, &z6, &c).unwrap() + &polylog(j, &-&z6, &c).unwrap();
        let three = rat(1, 3i64.pow(j as u32 - 1));
        let re = z.mul_rational(&(two(-(j as i64)) * (three - rat_int(1))));
        let l = dirichlet_l_chi3(j as u32, &c).unwrap();
        let im = (&l * &ApproxR::sqrt_int(3, bits)).mul_rational(&two(-(j as i64)));
        assert!(
            small(&(&sum - &ApproxC::from_re_im(&re, &im)), p),
            "xi6, j={j}"
        );
    }
}

#[test]
fn cache_does_not_change_values() {
    let c = ctx(30);
    let w = word(Curve::H, "4,5,0");
    let a = eval_curve_word(&w, &c).unwrap();
    clear_cache();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let w = w.clone();
            std::thread::spawn(move || eval_curve_word(&w, &c).unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), a);
    }
}
