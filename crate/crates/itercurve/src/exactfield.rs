//! Exact arithmetic in `Q(ξ4)` and `Q(ξ6)`.
//!
//! `Q(ξ3) = Q(√-3)` lives inside `Q(ξ6)` via `ξ3 = ξ6^2` and
//! `√-3 = 2ξ6 - 1`.
//!
//! The S-unit test looks only at norms.  This is enough because `Z[ξ4]` and
//! `Z[ξ6]` are principal ideal domains: writing `x = α/β` with `β` the least
//! positive integer clearing denominators, the ideal `(x)` is supported on
//! primes above `S` exactly when the norms of `α` and `β` are.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::numkernel::{ApproxC, ApproxR};
use crate::{Curve, Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    N4,
    N6,
}

impl Level {
    pub fn order(self) -> u32 {
        match self {
            Level::N4 => 4,
            Level::N6 => 6,
        }
    }

    pub fn from_order(n: u32) -> Result<Level> {
        match n {
            4 => Ok(Level::N4),
            6 => Ok(Level::N6),
            other => Err(Error::Invalid(format!("unsupported level {other}"))),
        }
    }
}

/// `a + b ξ_N`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cyc {
    level: Level,
    a: Rat,
    b: Rat,
}

impl Cyc {
    pub fn new(level: Level, a: Rat, b: Rat) -> Cyc {
        Cyc { level, a, b }
    }

    pub fn from_rat(level: Level, a: Rat) -> Cyc {
        Cyc {
            level,
            a,
            b: Rat::zero(),
        }
    }

    pub fn int(level: Level, n: i64) -> Cyc {
        Cyc::from_rat(level, rat_int(n))
    }

    pub fn zero(level: Level) -> Cyc {
        Cyc::int(level, 0)
    }

    pub fn one(level: Level) -> Cyc {
        Cyc::int(level, 1)
    }

    /// The generator `ξ_N`.
    pub fn xi(level: Level) -> Cyc {
        Cyc {
            level,
            a: Rat::zero(),
            b: Rat::one(),
        }
    }

    /// `ξ_N^e` for any integer `e`.
    pub fn root_of_unity(level: Level, e: i64) -> Cyc {
        let n = level.order() as i64;
        let e = e.rem_euclid(n);
        let mut x = Cyc::one(level);
        let xi = Cyc::xi(level);
        for _ in 0..e {
            x = &x * &xi;
        }
        x
    }

    /// `√-3 = 2ξ6 - 1`.
    pub fn sqrt_minus3() -> Cyc {
        Cyc {
            level: Level::N6,
            a: rat_int(-1),
            b: rat_int(2),
        }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Whether `self ∈ Q·g`.
    pub fn is_rational_multiple_of(&self, g: &Cyc) -> bool {
        if self.is_zero() {
            return true;
        }
        match self.div(g) {
            Ok(q) => q.is_rational(),
            Err(_) => false,
        }
    }

    fn check(&self, o: &Cyc) -> Result<()> {
        if self.level != o.level {
            Err(Error::Invalid(format!(
                "level mismatch: {:?} vs {:?}",
                self.level, o.level
            )))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, o: &Cyc) -> Result<Cyc> {
        self.check(o)?;
        Ok(Cyc {
            level: self.level,
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        })
    }

    pub fn try_mul(&self, o: &Cyc) -> Result<Cyc> {
        self.check(o)?;
        let ac = &self.a * &o.a;
        let bd = &self.b * &o.b;
        let cross = &self.a * &o.b + &self.b * &o.a;
        Ok(match self.level {
            // ξ4^2 = -1
            Level::N4 => Cyc {
                level: self.level,
                a: ac - bd,
                b: cross,
            },
            // ξ6^2 = ξ6 - 1
            Level::N6 => Cyc {
                level: self.level,
                a: ac - &bd,
                b: cross + bd,
            },
        })
    }

    /// The nontrivial automorphism `ξ ↦ ξ^-1`.
    pub fn conj(&self) -> Cyc {
        match self.level {
            Level::N4 => Cyc {
                level: self.level,
                a: self.a.clone(),
                b: -&self.b,
            },
            Level::N6 => Cyc {
                level: self.level,
                a: &self.a + &self.b,
                b: -&self.b,
            },
        }
    }

    pub fn norm(&self) -> Rat {
        match self.level {
            Level::N4 => &self.a * &self.a + &self.b * &self.b,
            Level::N6 => &self.a * &self.a + &self.a * &self.b + &self.b * &self.b,
        }
    }

    pub fn inv(&self) -> Result<Cyc> {
        if self.is_zero() {
            return Err(Error::Invalid("inverse of zero".into()));
        }
        let n = self.norm();
        let c = self.conj();
        Ok(Cyc {
            level: self.level,
            a: &c.a / &n,
            b: &c.b / &n,
        })
    }

    pub fn div(&self, o: &Cyc) -> Result<Cyc> {
        self.check(o)?;
        self.try_mul(&o.inv()?)
    }

    pub fn scale(&self, r: &Rat) -> Cyc {
        Cyc {
            level: self.level,
            a: &self.a * r,
            b: &self.b * r,
        }
    }

    pub fn pow(&self, e: i64) -> Result<Cyc> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Cyc::one(self.level);
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Whether `|x| >= 1` in the complex embedding.
    pub fn modulus_at_least_one(&self) -> bool {
        self.norm() >= Rat::one()
    }

    /// Complex embedding with `ξ_N = exp(2πi/N)`.
    pub fn to_approx(&self, bits: u32) -> ApproxC {
        match self.level {
            Level::N4 => ApproxC::from_re_im(
                &ApproxR::from_rational(&self.a, bits),
                &ApproxR::from_rational(&self.b, bits),
            ),
            Level::N6 => {
                let half = rat(1, 2);
                let re = ApproxR::from_rational(&(&self.a + &self.b * &half), bits);
                let im = ApproxR::sqrt_int(3, bits).mul_rational(&(&self.b * &half));
                ApproxC::from_re_im(&re, &im)
            }
        }
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        match self.level {
            Level::N4 => num_complex::Complex64::new(a, b),
            Level::N6 => num_complex::Complex64::new(a + b / 2.0, b * 3f64.sqrt() / 2.0),
        }
    }
}

impl<'a> Add<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn add(self, o: &Cyc) -> Cyc {
        self.try_add(o).expect("level mismatch")
    }
}

impl<'a> Sub<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn sub(self, o: &Cyc) -> Cyc {
        self.try_add(&-o).expect("level mismatch")
    }
}

impl<'a> Mul<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn mul(self, o: &Cyc) -> Cyc {
        self.try_mul(o).expect("level mismatch")
    }
}

impl Neg for &Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc {
            level: self.level,
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl Add for Cyc {
    type Output = Cyc;
    fn add(self, o: Cyc) -> Cyc {
        &self + &o
    }
}

impl Sub for Cyc {
    type Output = Cyc;
    fn sub(self, o: Cyc) -> Cyc {
        &self - &o
    }
}

impl Mul for Cyc {
    type Output = Cyc;
    fn mul(self, o: Cyc) -> Cyc {
        &self * &o
    }
}

impl Neg for Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        -&self
    }
}

/// Canonical text: `a+b*z4`, `a-b*z6`, with reduced rationals.
impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = match self.level {
            Level::N4 => "z4",
            Level::N6 => "z6",
        };
        if self.b.is_negative() {
            write!(f, "{}-{}*{}", self.a, -&self.b, z)
        } else {
            write!(f, "{}+{}*{}", self.a, self.b, z)
        }
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("bad rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(n))
    }
}

impl FromStr for Cyc {
    type Err = Error;

    /// Accepts the canonical form, or a lone rational followed by an
    /// optional `*z4` / `*z6` term.
    fn from_str(s: &str) -> Result<Cyc> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let level = if t.ends_with("*z4") {
            Some(Level::N4)
        } else if t.ends_with("*z6") {
            Some(Level::N6)
        } else {
            None
        };
        let Some(level) = level else {
            return Err(Error::Invalid(format!(
                "cyclotomic literal needs a *z4 or *z6 term: {s:?}"
            )));
        };
        let body = &t[..t.len() - 3];
        // split at the last sign that is not at the start and not after '/'
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/' {
                split = Some(i);
                break;
            }
        }
        let (a, b) = match split {
            Some(i) => {
                let a = parse_rat(&body[..i])?;
                let bs = &body[i..];
                let b = parse_rat(bs.strip_prefix('+').unwrap_or(bs))?;
                (a, b)
            }
            None => (Rat::zero(), parse_rat(body)?),
        };
        Ok(Cyc { level, a, b })
    }
}

/// The weight-one regularized value: `exp(I(a; b; c))`.
pub fn tilde_i(a: &Cyc, b: &Cyc, c: &Cyc) -> Result<Cyc> {
    let level = a.level;
    match (a == b, b == c) {
        (false, false) => (c - b).div(&(a - b)),
        (true, false) => Ok(c - b),
        (false, true) => (a - b).inv(),
        (true, true) => Ok(Cyc::one(level)),
    }
}

fn supported_on(n: &BigInt, primes: &[u64]) -> bool {
    let mut n = n.abs();
    if n.is_zero() {
        return false;
    }
    for &p in primes {
        let p = BigInt::from(p);
        while (&n % &p).is_zero() {
            n /= &p;
        }
    }
    n.is_one()
}

/// Whether `x` is an S-unit, `S = {2}` for g and `{2, 3}` for h.
pub fn s_unit_check(x: &Cyc, curve: Curve) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::Invalid("S-unit test of zero".into()));
    }
    let primes: &[u64] = match curve {
        Curve::G => &[2],
        Curve::H => &[2, 3],
    };
    let d = x.a.denom().lcm(x.b.denom());
    let alpha = x.scale(&Rat::from_integer(d.clone()));
    let beta = Cyc::from_rat(x.level, Rat::from_integer(d));
    let na = alpha.norm();
    let nb = beta.norm();
    Ok(na.is_integer()
        && nb.is_integer()
        && supported_on(na.numer(), primes)
        && supported_on(nb.numer(), primes))
}
