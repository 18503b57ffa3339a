//! Fixed-point ball arithmetic and the classical constants.
//!
//! A real ball is stored as an integer midpoint `mid` and an integer radius
//! `rad` at a binary scale `bits`: it stands for every real within
//! `rad * 2^-bits` of `mid * 2^-bits`.  Every operation returns a ball that
//! contains the exact result whenever the inputs contain theirs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;
const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// Working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Context {
    precision_digits: u32,
    guard_digits: u32,
}

impl Context {
    pub const DEFAULT_GUARD: u32 = 10;

    pub fn new(precision_digits: u32) -> Result<Context> {
        Context::with_guard(precision_digits, Self::DEFAULT_GUARD)
    }

    pub fn with_guard(precision_digits: u32, guard_digits: u32) -> Result<Context> {
        if precision_digits < 10 {
            return Err(Error::Invalid(format!(
                "precision must be at least 10 digits, got {precision_digits}"
            )));
        }
        Ok(Context {
            precision_digits,
            guard_digits,
        })
    }

    pub fn precision_digits(&self) -> u32 {
        self.precision_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    /// Binary scale used for all fixed-point values at this precision.
    pub fn bits(&self) -> u32 {
        ((self.precision_digits + self.guard_digits) as f64 * LOG2_10).ceil() as u32 + 8
    }

    /// Same guard, twice the target digits.
    pub fn doubled(&self) -> Context {
        Context {
            precision_digits: 2 * self.precision_digits,
            guard_digits: self.guard_digits,
        }
    }

    /// Whether `x` meets the target `|err| <= 10^-P`.
    pub fn meets(&self, x: &ApproxR) -> bool {
        x.err_le_pow10(self.precision_digits as i64)
    }

    pub fn meets_c(&self, z: &ApproxC) -> bool {
        z.real().err_le_pow10(self.precision_digits as i64)
    }

    pub(crate) fn require(&self, x: ApproxR, what: &str) -> Result<ApproxR> {
        if self.meets(&x) {
            Ok(x)
        } else {
            Err(Error::Precision(format!(
                "{what}: error {} exceeds 1e-{}",
                x.err_string(),
                self.precision_digits
            )))
        }
    }
}

pub(crate) fn round_shift(x: &BigInt, d: u32) -> BigInt {
    if d == 0 {
        return x.clone();
    }
    (x + (BigInt::one() << (d - 1))) >> d
}

pub(crate) fn ceil_shift(x: &BigUint, d: u32) -> BigUint {
    if d == 0 {
        return x.clone();
    }
    (x + ((BigUint::one() << d) - 1u32)) >> d
}

/// Nearest integer to `a / b`.
pub(crate) fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (a, b) = if b.is_negative() {
        (-a, -b)
    } else {
        (a.clone(), b.clone())
    };
    let num: BigInt = a * 2 + &b;
    let den: BigInt = b * 2;
    num.div_floor(&den)
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    a.div_ceil(b)
}

/// A real ball at a fixed binary scale.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ApproxR {
    mid: BigInt,
    rad: BigUint,
    bits: u32,
}

impl ApproxR {
    pub fn from_parts(mid: BigInt, rad: BigUint, bits: u32) -> ApproxR {
        ApproxR { mid, rad, bits }
    }

    pub fn zero(bits: u32) -> ApproxR {
        ApproxR {
            mid: BigInt::zero(),
            rad: BigUint::zero(),
            bits,
        }
    }

    pub fn from_int<T: Into<BigInt>>(n: T, bits: u32) -> ApproxR {
        ApproxR {
            mid: n.into() << bits,
            rad: BigUint::zero(),
            bits,
        }
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> ApproxR {
        let num = q.numer() << bits;
        let (quo, rem) = num.div_rem(q.denom());
        if rem.is_zero() {
            ApproxR {
                mid: quo,
                rad: BigUint::zero(),
                bits,
            }
        } else {
            ApproxR {
                mid: div_round(&num, q.denom()),
                rad: BigUint::one(),
                bits,
            }
        }
    }

    /// Nearest ball to an `f64`; the radius covers only the conversion.
    pub fn from_f64(x: f64, bits: u32) -> ApproxR {
        let q = BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        ApproxR::from_rational(&q, bits)
    }

    /// `sqrt(n)` for a non-negative integer.
    pub fn sqrt_int(n: u64, bits: u32) -> ApproxR {
        let scaled = BigUint::from(n) << (2 * bits);
        let r = scaled.sqrt();
        let exact = &r * &r == scaled;
        ApproxR {
            mid: BigInt::from(r),
            rad: if exact {
                BigUint::zero()
            } else {
                BigUint::one()
            },
            bits,
        }
    }

    pub fn mid(&self) -> &BigInt {
        &self.mid
    }

    pub fn rad(&self) -> &BigUint {
        &self.rad
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Re-express at another scale; coarsening rounds and widens the radius.
    pub fn rescale(&self, bits: u32) -> ApproxR {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let d = bits - self.bits;
                ApproxR {
                    mid: &self.mid << d,
                    rad: &self.rad << d,
                    bits,
                }
            }
            Ordering::Less => {
                let d = self.bits - bits;
                let mid = round_shift(&self.mid, d);
                let exact = (&mid << d) == self.mid;
                let mut rad = ceil_shift(&self.rad, d);
                if !exact {
                    rad += 1u32;
                }
                ApproxR { mid, rad, bits }
            }
        }
    }

    fn align(a: &ApproxR, b: &ApproxR) -> (ApproxR, ApproxR) {
        let bits = a.bits.max(b.bits);
        (a.rescale(bits), b.rescale(bits))
    }

    /// Widen the radius by `extra` units of `2^-bits`.
    pub fn widen(&self, extra: &BigUint) -> ApproxR {
        ApproxR {
            mid: self.mid.clone(),
            rad: &self.rad + extra,
            bits: self.bits,
        }
    }

    pub fn mul_int<T: Into<BigInt>>(&self, n: T) -> ApproxR {
        let n: BigInt = n.into();
        ApproxR {
            mid: &self.mid * &n,
            rad: &self.rad * n.magnitude(),
            bits: self.bits,
        }
    }

    pub fn div_int<T: Into<BigInt>>(&self, n: T) -> ApproxR {
        let n: BigInt = n.into();
        assert!(!n.is_zero(), "division by zero");
        let (q, r) = self.mid.div_rem(&n);
        let (mid, inexact) = if r.is_zero() {
            (q, false)
        } else {
            (div_round(&self.mid, &n), true)
        };
        let mut rad = ceil_div(&self.rad, n.magnitude());
        if inexact {
            rad += 1u32;
        }
        ApproxR {
            mid,
            rad,
            bits: self.bits,
        }
    }

    pub fn mul_rational(&self, q: &BigRational) -> ApproxR {
        self.mul_int(q.numer().clone()).div_int(q.denom().clone())
    }

    /// Multiply by `2^e` (exact for `e >= 0`).
    pub fn mul_pow2(&self, e: i32) -> ApproxR {
        if e >= 0 {
            ApproxR {
                mid: &self.mid << e as u32,
                rad: &self.rad << e as u32,
                bits: self.bits,
            }
        } else {
            let d = (-e) as u32;
            ApproxR {
                mid: self.mid.clone(),
                rad: self.rad.clone(),
                bits: self.bits + d,
            }
            .rescale(self.bits)
        }
    }

    pub fn pow(&self, n: u32) -> ApproxR {
        let mut acc = ApproxR::from_int(1, self.bits);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn abs_mid(&self) -> BigUint {
        self.mid.magnitude().clone()
    }

    pub fn to_f64(&self) -> f64 {
        let b = self.mid.bits();
        if b > 1000 {
            let s = (b - 900) as u32;
            let m = (&self.mid >> s).to_f64().unwrap_or(0.0);
            return m * 2f64.powi(s as i32 - self.bits as i32);
        }
        let m = self.mid.to_f64().unwrap_or(0.0);
        let mut v = m;
        let mut e = self.bits as i32;
        while e > 1000 {
            v *= 2f64.powi(-1000);
            e -= 1000;
        }
        v * 2f64.powi(-e)
    }

    /// `log10` of the error radius, `-inf` for exact values.
    pub fn err_log10(&self) -> f64 {
        log10_scaled(&self.rad, self.bits)
    }

    /// `rad * 2^-bits <= 10^-e`.
    pub fn err_le_pow10(&self, e: i64) -> bool {
        le_pow10(&self.rad, self.bits, e)
    }

    /// `|x| <= 10^-e` holds for every point of the ball.
    pub fn abs_le_pow10(&self, e: i64) -> bool {
        le_pow10(&(self.mid.magnitude() + &self.rad), self.bits, e)
    }

    /// Upper bound on `|x|` as a float.
    pub fn abs_upper_f64(&self) -> f64 {
        10f64.powf(log10_scaled(&(self.mid.magnitude() + &self.rad), self.bits))
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.magnitude() <= &self.rad
    }

    /// Whether the two balls overlap, i.e. `self - other` contains zero.
    pub fn overlaps(&self, other: &ApproxR) -> bool {
        (self - other).contains_zero()
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scaled = div_round(
            &(&self.mid * BigInt::from(10u32).pow(digits)),
            &(BigInt::one() << self.bits),
        );
        format_fixed(&scaled, digits)
    }

    /// Error bound rendered as `m.me-E`, rounded upwards.
    pub fn err_string(&self) -> String {
        err_string(&self.rad, self.bits)
    }
}

fn format_fixed(scaled: &BigInt, digits: u32) -> String {
    let neg = scaled.is_negative();
    let s = scaled.magnitude().to_str_radix(10);
    let d = digits as usize;
    let s = if s.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - s.len()), s)
    } else {
        s
    };
    let (ip, fp) = s.split_at(s.len() - d);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(ip);
    if d > 0 {
        out.push('.');
        out.push_str(fp);
    }
    out
}

fn log10_scaled(x: &BigUint, bits: u32) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let b = x.bits();
    let (m, s) = if b > 60 {
        ((x >> (b - 60)).to_f64().unwrap(), b - 60)
    } else {
        (x.to_f64().unwrap(), 0)
    };
    m.log10() + (s as f64 - bits as f64) * LOG10_2
}

fn le_pow10(x: &BigUint, bits: u32, e: i64) -> bool {
    let one = BigUint::one() << bits;
    if e >= 0 {
        x * BigUint::from(10u32).pow(e as u32) <= one
    } else {
        *x <= one * BigUint::from(10u32).pow((-e) as u32)
    }
}

fn err_string(rad: &BigUint, bits: u32) -> String {
    if rad.is_zero() {
        return "0".to_string();
    }
    let l = log10_scaled(rad, bits);
    let mut e = l.floor();
    let mut m = (10f64.powf(l - e) * 10.0 - 1e-9).ceil() / 10.0;
    if m >= 10.0 {
        m /= 10.0;
        e += 1.0;
    }
    format!("{m:.1}e{}", e as i64)
}

impl fmt::Display for ApproxR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.bits as f64 * LOG10_2).floor() as u32;
        write!(
            f,
            "{} +/- {}",
            self.to_decimal(digits.min(60)),
            self.err_string()
        )
    }
}

impl<'a> Add<&'a ApproxR> for &'a ApproxR {
    type Output = ApproxR;
    fn add(self, o: &ApproxR) -> ApproxR {
        if self.bits == o.bits {
            return ApproxR {
                mid: &self.mid + &o.mid,
                rad: &self.rad + &o.rad,
                bits: self.bits,
            };
        }
        let (a, b) = ApproxR::align(self, o);
        &a + &b
    }
}

impl<'a> Sub<&'a ApproxR> for &'a ApproxR {
    type Output = ApproxR;
    fn sub(self, o: &ApproxR) -> ApproxR {
        if self.bits == o.bits {
            return ApproxR {
                mid: &self.mid - &o.mid,
                rad: &self.rad + &o.rad,
                bits: self.bits,
            };
        }
        let (a, b) = ApproxR::align(self, o);
        &a - &b
    }
}

impl Neg for &ApproxR {
    type Output = ApproxR;
    fn neg(self) -> ApproxR {
        ApproxR {
            mid: -&self.mid,
            rad: self.rad.clone(),
            bits: self.bits,
        }
    }
}

impl<'a> Mul<&'a ApproxR> for &'a ApproxR {
    type Output = ApproxR;
    fn mul(self, o: &ApproxR) -> ApproxR {
        if self.bits != o.bits {
            let (a, b) = ApproxR::align(self, o);
            return &a * &b;
        }
        let bits = self.bits;
        let prod = &self.mid * &o.mid;
        let mid = round_shift(&prod, bits);
        let exact = (&mid << bits) == prod;
        let spread =
            self.mid.magnitude() * &o.rad + o.mid.magnitude() * &self.rad + &self.rad * &o.rad;
        let mut rad = ceil_shift(&spread, bits);
        if !exact {
            rad += 1u32;
        }
        ApproxR { mid, rad, bits }
    }
}

macro_rules! owned_binops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_binops!(ApproxR);
owned_binops!(ApproxC);

/// A complex ball: rectangular midpoint, radius bounding the modulus of the
/// error.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ApproxC {
    re: BigInt,
    im: BigInt,
    rad: BigUint,
    bits: u32,
}

impl ApproxC {
    pub fn from_parts(re: BigInt, im: BigInt, rad: BigUint, bits: u32) -> ApproxC {
        ApproxC { re, im, rad, bits }
    }

    pub fn zero(bits: u32) -> ApproxC {
        ApproxC {
            re: BigInt::zero(),
            im: BigInt::zero(),
            rad: BigUint::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> ApproxC {
        ApproxC {
            re: BigInt::one() << bits,
            im: BigInt::zero(),
            rad: BigUint::zero(),
            bits,
        }
    }

    pub fn from_real(x: &ApproxR) -> ApproxC {
        ApproxC {
            re: x.mid.clone(),
            im: BigInt::zero(),
            rad: x.rad.clone(),
            bits: x.bits,
        }
    }

    /// `x + i y`; the radius is the sum of the component radii.
    pub fn from_re_im(x: &ApproxR, y: &ApproxR) -> ApproxC {
        let (x, y) = ApproxR::align(x, y);
        ApproxC {
            re: x.mid,
            im: y.mid,
            rad: x.rad + y.rad,
            bits: x.bits,
        }
    }

    pub fn re_mid(&self) -> &BigInt {
        &self.re
    }

    pub fn im_mid(&self) -> &BigInt {
        &self.im
    }

    pub fn rad(&self) -> &BigUint {
        &self.rad
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn real(&self) -> ApproxR {
        ApproxR {
            mid: self.re.clone(),
            rad: self.rad.clone(),
            bits: self.bits,
        }
    }

    pub fn imag(&self) -> ApproxR {
        ApproxR {
            mid: self.im.clone(),
            rad: self.rad.clone(),
            bits: self.bits,
        }
    }

    pub fn rescale(&self, bits: u32) -> ApproxC {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let d = bits - self.bits;
                ApproxC {
                    re: &self.re << d,
                    im: &self.im << d,
                    rad: &self.rad << d,
                    bits,
                }
            }
            Ordering::Less => {
                let d = self.bits - bits;
                ApproxC {
                    re: round_shift(&self.re, d),
                    im: round_shift(&self.im, d),
                    rad: ceil_shift(&self.rad, d) + 1u32,
                    bits,
                }
            }
        }
    }

    fn align(a: &ApproxC, b: &ApproxC) -> (ApproxC, ApproxC) {
        let bits = a.bits.max(b.bits);
        (a.rescale(bits), b.rescale(bits))
    }

    /// Upper bound on `|mid|` in units of `2^-bits`.
    fn mid_modulus_upper(&self) -> BigUint {
        let sq = self.re.magnitude().pow(2) + self.im.magnitude().pow(2);
        sq.sqrt() + 1u32
    }

    pub fn conj(&self) -> ApproxC {
        ApproxC {
            re: self.re.clone(),
            im: -&self.im,
            rad: self.rad.clone(),
            bits: self.bits,
        }
    }

    /// Multiply by `i`.
    pub fn mul_i(&self) -> ApproxC {
        ApproxC {
            re: -&self.im,
            im: self.re.clone(),
            rad: self.rad.clone(),
            bits: self.bits,
        }
    }

    pub fn mul_int<T: Into<BigInt>>(&self, n: T) -> ApproxC {
        let n: BigInt = n.into();
        ApproxC {
            re: &self.re * &n,
            im: &self.im * &n,
            rad: &self.rad * n.magnitude(),
            bits: self.bits,
        }
    }

    pub fn div_int<T: Into<BigInt>>(&self, n: T) -> ApproxC {
        let n: BigInt = n.into();
        assert!(!n.is_zero(), "division by zero");
        ApproxC {
            re: div_round(&self.re, &n),
            im: div_round(&self.im, &n),
            rad: ceil_div(&self.rad, n.magnitude()) + 1u32,
            bits: self.bits,
        }
    }

    pub fn mul_rational(&self, q: &BigRational) -> ApproxC {
        if q.is_integer() {
            return self.mul_int(q.numer().clone());
        }
        self.mul_int(q.numer().clone()).div_int(q.denom().clone())
    }

    pub fn mul_real(&self, x: &ApproxR) -> ApproxC {
        self * &ApproxC::from_real(x)
    }

    /// Multiply by `2^e`.
    pub fn mul_pow2(&self, e: i32) -> ApproxC {
        if e >= 0 {
            let e = e as u32;
            ApproxC {
                re: &self.re << e,
                im: &self.im << e,
                rad: &self.rad << e,
                bits: self.bits,
            }
        } else {
            let d = (-e) as u32;
            ApproxC {
                re: self.re.clone(),
                im: self.im.clone(),
                rad: self.rad.clone(),
                bits: self.bits + d,
            }
            .rescale(self.bits)
        }
    }

    pub fn widen(&self, extra: &BigUint) -> ApproxC {
        ApproxC {
            re: self.re.clone(),
            im: self.im.clone(),
            rad: &self.rad + extra,
            bits: self.bits,
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.mid_modulus_lower() <= self.rad
    }

    fn mid_modulus_lower(&self) -> BigUint {
        (self.re.magnitude().pow(2) + self.im.magnitude().pow(2)).sqrt()
    }

    /// `|z| <= 10^-e` for every point of the ball.
    pub fn abs_le_pow10(&self, e: i64) -> bool {
        le_pow10(&(self.mid_modulus_upper() + &self.rad), self.bits, e)
    }

    pub fn err_le_pow10(&self, e: i64) -> bool {
        le_pow10(&self.rad, self.bits, e)
    }

    pub fn err_log10(&self) -> f64 {
        log10_scaled(&self.rad, self.bits)
    }

    /// Upper bound on `|z|` as a float.
    pub fn abs_upper_f64(&self) -> f64 {
        10f64.powf(log10_scaled(
            &(self.mid_modulus_upper() + &self.rad),
            self.bits,
        ))
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.real().to_f64(), self.imag().to_f64())
    }

    pub fn err_string(&self) -> String {
        err_string(&self.rad, self.bits)
    }
}

impl fmt::Display for ApproxC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.bits as f64 * LOG10_2).floor() as u32).min(60);
        write!(
            f,
            "{} + {}i +/- {}",
            self.real().to_decimal(digits),
            self.imag().to_decimal(digits),
            self.err_string()
        )
    }
}

impl<'a> Add<&'a ApproxC> for &'a ApproxC {
    type Output = ApproxC;
    fn add(self, o: &ApproxC) -> ApproxC {
        if self.bits != o.bits {
            let (a, b) = ApproxC::align(self, o);
            return &a + &b;
        }
        ApproxC {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
            rad: &self.rad + &o.rad,
            bits: self.bits,
        }
    }
}

impl<'a> Sub<&'a ApproxC> for &'a ApproxC {
    type Output = ApproxC;
    fn sub(self, o: &ApproxC) -> ApproxC {
        if self.bits != o.bits {
            let (a, b) = ApproxC::align(self, o);
            return &a - &b;
        }
        ApproxC {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
            rad: &self.rad + &o.rad,
            bits: self.bits,
        }
    }
}

impl Neg for &ApproxC {
    type Output = ApproxC;
    fn neg(self) -> ApproxC {
        ApproxC {
            re: -&self.re,
            im: -&self.im,
            rad: self.rad.clone(),
            bits: self.bits,
        }
    }
}

impl<'a> Mul<&'a ApproxC> for &'a ApproxC {
    type Output = ApproxC;
    fn mul(self, o: &ApproxC) -> ApproxC {
        if self.bits != o.bits {
            let (a, b) = ApproxC::align(self, o);
            return &a * &b;
        }
        let bits = self.bits;
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        let spread = self.mid_modulus_upper() * &o.rad
            + o.mid_modulus_upper() * &self.rad
            + &self.rad * &o.rad;
        // rounding each component by at most half a unit moves the modulus by < 1
        ApproxC {
            re: round_shift(&re, bits),
            im: round_shift(&im, bits),
            rad: ceil_shift(&spread, bits) + 1u32,
            bits,
        }
    }
}

/// Named constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    Log2,
    Log3,
    Catalan,
}

impl FromStr for Constant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Constant> {
        match s {
            "pi" => Ok(Constant::Pi),
            "log2" => Ok(Constant::Log2),
            "log3" => Ok(Constant::Log3),
            "catalan" => Ok(Constant::Catalan),
            other => Err(Error::Invalid(format!("unknown constant {other:?}"))),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constant::Pi => "pi",
            Constant::Log2 => "log2",
            Constant::Log3 => "log3",
            Constant::Catalan => "catalan",
        })
    }
}

const GUARD_BITS: u32 = 32;

pub fn const_eval(name: &str, ctx: &Context) -> Result<ApproxR> {
    let c: Constant = name.parse()?;
    Ok(constant(c, ctx.bits()))
}

/// The constant at binary scale `bits`, with radius of a few units.
pub fn constant(c: Constant, bits: u32) -> ApproxR {
    match c {
        Constant::Pi => pi(bits),
        Constant::Log2 => log2(bits),
        Constant::Log3 => log3(bits),
        Constant::Catalan => catalan(bits),
    }
}

/// `sum_{k>=0} (+-1)^k q^-k / (2k+1)` at scale `wb`.
fn odd_series(q: u64, alternating: bool, wb: u32) -> ApproxR {
    let q = BigInt::from(q);
    let mut p: BigInt = BigInt::one() << wb;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !p.is_zero() {
        let t = &p / (2 * k + 1);
        if alternating && k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        p /= &q;
        k += 1;
    }
    // each power carries < 2 units of truncation, each term < 3; the tail is
    // below 2 units (alternating) or a geometric sum of terms below 2 units
    ApproxR {
        mid: sum,
        rad: BigUint::from(3 * k + 6),
        bits: wb,
    }
}

fn pi(bits: u32) -> ApproxR {
    let wb = bits + GUARD_BITS;
    let a = odd_series(25, true, wb).div_int(5).mul_int(16);
    let b = odd_series(239 * 239, true, wb).div_int(239).mul_int(4);
    (&a - &b).rescale(bits)
}

fn atanh_inv(n: u64, wb: u32) -> ApproxR {
    odd_series(n * n, false, wb).div_int(n)
}

fn log2_wb(wb: u32) -> ApproxR {
    let a = atanh_inv(26, wb).mul_int(18);
    let b = atanh_inv(4801, wb).mul_int(2);
    let c = atanh_inv(8749, wb).mul_int(8);
    &(&a - &b) + &c
}

fn log2(bits: u32) -> ApproxR {
    log2_wb(bits + GUARD_BITS).rescale(bits)
}

fn log3(bits: u32) -> ApproxR {
    let wb = bits + GUARD_BITS;
    (&log2_wb(wb) + &atanh_inv(5, wb).mul_int(2)).rescale(bits)
}

fn catalan(bits: u32) -> ApproxR {
    let wb = bits + GUARD_BITS;
    // log(2+sqrt3) = 2 atanh(1/sqrt3) = (2/sqrt3) sum 3^-k/(2k+1)
    let s3 = ApproxR::sqrt_int(3, wb);
    let l = (&odd_series(3, false, wb) * &s3).mul_int(2).div_int(3);
    let first = (&pi(wb) * &l).div_int(8);
    // sum (n!)^2/((2n)!(2n+1)^2)
    let mut a: BigInt = BigInt::one() << wb;
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    while !a.is_zero() {
        sum += &a / ((2 * n + 1) * (2 * n + 1));
        a = a * (n + 1) / (2 * (2 * n + 1));
        n += 1;
    }
    let s = ApproxR {
        mid: sum,
        rad: BigUint::from(3 * n + 4),
        bits: wb,
    };
    (&first + &s.mul_int(3).div_int(8)).rescale(bits)
}

fn bernoulli_store() -> &'static RwLock<Vec<BigRational>> {
    static STORE: OnceLock<RwLock<Vec<BigRational>>> = OnceLock::new();
    STORE.get_or_init(|| RwLock::new(Vec::new()))
}

/// `B_2, B_4, ..., B_{2n}` as exact rationals.
pub fn bernoulli_even(n: usize) -> Vec<BigRational> {
    {
        let store = bernoulli_store().read().unwrap();
        if store.len() >= n {
            return store[..n].to_vec();
        }
    }
    let m = n.max(16).next_power_of_two();
    let out = bernoulli_even_uncached(m);
    let mut store = bernoulli_store().write().unwrap();
    if store.len() < out.len() {
        *store = out.clone();
    }
    out[..n].to_vec()
}

/// Tangent numbers followed by `B_{2k} = (-1)^(k-1) 2k T_k / (4^k (4^k - 1))`.
fn bernoulli_even_uncached(n: usize) -> Vec<BigRational> {
    if n == 0 {
        return Vec::new();
    }
    let mut t = vec![BigInt::zero(); n + 1];
    t[1] = BigInt::one();
    for k in 2..=n {
        t[k] = &t[k - 1] * (k - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
        }
    }
    (1..=n)
        .map(|k| {
            let four_k = BigInt::one() << (2 * k);
            let den = &four_k * (&four_k - 1);
            let num = &t[k] * (2 * k);
            let b = BigRational::new(num, den);
            if k % 2 == 0 {
                -b
            } else {
                b
            }
        })
        .collect()
}

/// Bernoulli number `B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> BigRational {
    match n {
        0 => BigRational::one(),
        1 => BigRational::new(BigInt::from(-1), BigInt::from(2)),
        n if n % 2 == 1 => BigRational::zero(),
        n => bernoulli_even(n / 2)[n / 2 - 1].clone(),
    }
}

pub fn zeta(s: u32, ctx: &Context) -> Result<ApproxR> {
    if s < 2 {
        return Err(Error::Invalid(format!("zeta needs s >= 2, got {s}")));
    }
    Ok(hurwitz_bits(s, &BigRational::one(), ctx.bits()))
}

pub fn hurwitz_zeta(s: u32, a: &BigRational, ctx: &Context) -> Result<ApproxR> {
    if s < 2 {
        return Err(Error::Invalid(format!(
            "Hurwitz zeta needs s >= 2, got {s}"
        )));
    }
    if !a.is_positive() || *a > BigRational::one() {
        return Err(Error::Invalid(format!(
            "Hurwitz zeta needs 0 < a <= 1, got {a}"
        )));
    }
    Ok(hurwitz_bits(s, a, ctx.bits()))
}

pub fn dirichlet_l_chi3(s: u32, ctx: &Context) -> Result<ApproxR> {
    if s < 2 {
        return Err(Error::Invalid(format!(
            "L(s, chi_-3) needs s >= 2, got {s}"
        )));
    }
    Ok(l_chi3_bits(s, ctx.bits()))
}

pub(crate) fn zeta_bits(s: u32, bits: u32) -> ApproxR {
    hurwitz_bits(s, &BigRational::one(), bits)
}

pub(crate) fn l_chi3_bits(s: u32, bits: u32) -> ApproxR {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
    let wb = bits + (s as f64 * 1.6).ceil() as u32 + 8;
    let d = &hurwitz_bits(s, &third, wb) - &hurwitz_bits(s, &two_thirds, wb);
    d.div_int(BigInt::from(3).pow(s)).rescale(bits)
}

/// Euler-Maclaurin for `zeta(s, a)` with `a = p/q`.
///
/// `sum_{k>=0} (k+a)^-s = sum_{k<N} (k+a)^-s + x^(1-s)/(s-1) + x^-s/2
///   + sum_{j=1}^{M} B_{2j}/(2j)! (s)_{2j-1} x^(-s-2j+1) + R`, `x = N + a`,
/// with `|R|` at most the magnitude of the last included correction.
fn hurwitz_bits(s: u32, a: &BigRational, bits: u32) -> ApproxR {
    let wb = bits + GUARD_BITS;
    let p = a.numer().clone();
    let q = a.denom().clone();
    let mut n_terms = (bits as u64 / 7 + 10) as usize;
    loop {
        if let Some(v) = hurwitz_try(s, &p, &q, n_terms, wb) {
            return v.rescale(bits);
        }
        n_terms *= 2;
    }
}

fn hurwitz_try(s: u32, p: &BigInt, q: &BigInt, n: usize, wb: u32) -> Option<ApproxR> {
    let one = BigInt::one() << wb;
    let qs = q.pow(s);
    let num = &qs * &one;
    let mut sum = BigInt::zero();
    for k in 0..n {
        let den = (q * BigInt::from(k) + p).pow(s);
        sum += div_round(&num, &den);
    }
    let mut rad = BigUint::from(n);

    let x = BigRational::new(q * BigInt::from(n) + p, q.clone());
    let to_fixed = |r: &BigRational| div_round(&(r.numer() * &one), r.denom());
    let xs = x.pow(s as i32);
    let tail = x.clone() / (xs.clone() * BigInt::from(s - 1)) + (xs.recip() / BigInt::from(2));
    sum += to_fixed(&tail);
    rad += 1u32;

    let bern = bernoulli_even(4 * n + 8);
    let x2 = &x * &x;
    // r = (s)_{2j-1} / (2j)! * x^(-s-2j+1)
    let mut r = BigRational::from_integer(BigInt::from(s)) / BigInt::from(2) / (xs * &x);
    let mut prev_mag: Option<BigUint> = None;
    for j in 1..=(4 * n + 8) {
        if j > 1 {
            let jj = j as u64;
            let f = BigInt::from((s as u64 + 2 * jj - 3) * (s as u64 + 2 * jj - 2));
            r = r * f / BigInt::from((2 * jj - 1) * (2 * jj)) / &x2;
        }
        let term = &bern[j - 1] * &r;
        let t = to_fixed(&term);
        let mag = t.magnitude().clone();
        if let Some(pm) = &prev_mag {
            if &mag > pm {
                return None;
            }
        }
        sum += &t;
        rad += 1u32;
        if mag <= BigUint::one() {
            rad += &mag + 1u32;
            return Some(ApproxR {
                mid: sum,
                rad,
                bits: wb,
            });
        }
        prev_mag = Some(mag);
    }
    None
}
