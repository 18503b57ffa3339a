//! Independent fixed-point oracles.  Values are integers scaled by `2^b`.
#![allow(dead_code)]

use itercurve::numkernel::ApproxR;
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn one(b: u32) -> BigInt {
    BigInt::one() << b
}

/// `atan(1/n)`.
pub fn atan_inv(n: u64, b: u32) -> BigInt {
    let n2 = BigInt::from(n * n);
    let mut t = one(b) / n;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !t.is_zero() {
        let term = &t / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        t /= &n2;
        k += 1;
    }
    sum
}

/// `atanh(x)` for a fixed-point `0 <= x < 1`.
pub fn atanh_fixed(x: &BigInt, b: u32) -> BigInt {
    let x2 = (x * x) >> b;
    let mut t = x.clone();
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !t.is_zero() {
        sum += &t / (2 * k + 1);
        t = (&t * &x2) >> b;
        k += 1;
    }
    sum
}

pub fn atanh_inv(n: u64, b: u32) -> BigInt {
    atanh_fixed(&(one(b) / n), b)
}

/// Størmer: `π/4 = 44 atan(1/57) + 7 atan(1/239) - 12 atan(1/682) + 24 atan(1/12943)`.
pub fn pi(b: u32) -> BigInt {
    let s = atan_inv(57, b) * 44 + atan_inv(239, b) * 7 - atan_inv(682, b) * 12
        + atan_inv(12943, b) * 24;
    s * 4
}

/// `log 2 = 2 atanh(1/3)`.
pub fn log2(b: u32) -> BigInt {
    atanh_inv(3, b) * 2
}

/// `log 3 = log 2 + 2 atanh(1/5)`.
pub fn log3(b: u32) -> BigInt {
    log2(b) + atanh_inv(5, b) * 2
}

pub fn sqrt_int(n: u64, b: u32) -> BigInt {
    (BigInt::from(n) << (2 * b)).sqrt()
}

/// `G = Σ (-1)^k/(2k+1)²` by Cohen–Villegas–Zagier acceleration, in exact
/// rationals; the error is below `2/T_n(3)`.
pub fn catalan(b: u32) -> BigInt {
    let n = (b as u64 * 10 / 25) + 10;
    let (mut t0, mut t1) = (BigInt::one(), BigInt::from(3));
    for _ in 1..n {
        let t2 = &t1 * 6 - &t0;
        t0 = std::mem::replace(&mut t1, t2);
    }
    let d = BigRational::from_integer(t1);
    let mut bk = BigRational::from_integer(BigInt::from(-1));
    let mut c = -d.clone();
    let mut s = BigRational::zero();
    for k in 0..n {
        c = &bk - &c;
        s += &c / BigRational::from_integer(BigInt::from((2 * k + 1) * (2 * k + 1)));
        let (ki, ni) = (k as i64, n as i64);
        bk *= BigRational::new(
            BigInt::from(2 * (ki + ni) * (ki - ni)),
            BigInt::from((2 * ki + 1) * (ki + 1)),
        );
    }
    let g = s / d;
    (g.numer() << b) / g.denom()
}

/// Whether the ball `x` contains the oracle value, with 2 ulps of slack for
/// the oracle's own truncation.
pub fn contains(x: &ApproxR, oracle: impl Fn(u32) -> BigInt) -> bool {
    let extra = 32;
    let o = oracle(x.bits() + extra);
    let o = (o + (BigInt::one() << (extra - 1))) >> extra;
    let diff = (x.mid() - o).abs();
    diff <= BigInt::from_biguint(Sign::Plus, x.rad().clone()) + 2
}

/// `x` rendered as f64.
pub fn fixed_to_f64(x: &BigInt, b: u32) -> f64 {
    let s = x.bits().saturating_sub(60) as u32;
    let m: i64 = (x >> s).try_into().unwrap();
    m as f64 * 2f64.powi(s as i32 - b as i32)
}

/// `ζ(s)` in f64: direct sum plus Euler–Maclaurin tail, good to ~1e-15.
pub fn zeta_f64(s: i32) -> f64 {
    let n = 1000usize;
    let mut sum = 0.0;
    for k in (1..n).rev() {
        sum += (k as f64).powi(-s);
    }
    let nf = n as f64;
    let sf = s as f64;
    sum + nf.powf(1.0 - sf) / (sf - 1.0) + 0.5 * nf.powi(-s) + sf * nf.powi(-s - 1) / 12.0
        - sf * (sf + 1.0) * (sf + 2.0) * nf.powi(-s - 3) / 720.0
}

/// `Σ χ_{-3}(n)/n^s` over `n <= 3m`, paired so the tail is below `1/(3m)^s`.
pub fn l_chi3_f64(s: i32, m: usize) -> (f64, f64) {
    let mut sum = 0.0;
    for j in (0..m).rev() {
        let a = (3 * j + 1) as f64;
        let b = (3 * j + 2) as f64;
        sum += a.powi(-s) - b.powi(-s);
    }
    (sum, ((3 * m) as f64).powi(-s))
}

pub const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932_384_110_774;
