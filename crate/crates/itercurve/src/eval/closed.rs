//! Exact closed forms over the constants `π, log 2, log 3, √3, ζ(odd)` and
//! `L(even, χ_-3)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exactfield::{rat, rat_int, Rat};
use crate::numkernel::{constant, l_chi3_bits, zeta_bits, ApproxR, Constant, Context};
use crate::{Curve, Error, Result};

/// A product of basic constants; `sqrt3` is the exponent of `√3` modulo 2.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub pi: u32,
    pub log2: u32,
    pub log3: u32,
    pub sqrt3: bool,
    pub zeta: BTreeMap<u32, u32>,
    pub lchi: BTreeMap<u32, u32>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn pi(e: u32) -> Monomial {
        Monomial {
            pi: e,
            ..Monomial::default()
        }
    }

    pub fn weight(&self) -> u32 {
        self.pi
            + self.log2
            + self.log3
            + self.zeta.iter().map(|(s, e)| s * e).sum::<u32>()
            + self.lchi.iter().map(|(s, e)| s * e).sum::<u32>()
    }

    fn with_zeta(mut self, s: u32) -> Monomial {
        *self.zeta.entry(s).or_insert(0) += 1;
        self
    }

    fn with_lchi(mut self, s: u32) -> Monomial {
        *self.lchi.entry(s).or_insert(0) += 1;
        self
    }

    /// Product; the returned rational absorbs `√3 · √3 = 3`.
    fn mul(&self, o: &Monomial) -> (Monomial, Rat) {
        let mut m = Monomial {
            pi: self.pi + o.pi,
            log2: self.log2 + o.log2,
            log3: self.log3 + o.log3,
            sqrt3: self.sqrt3 ^ o.sqrt3,
            zeta: self.zeta.clone(),
            lchi: self.lchi.clone(),
        };
        for (s, e) in &o.zeta {
            *m.zeta.entry(*s).or_insert(0) += e;
        }
        for (s, e) in &o.lchi {
            *m.lchi.entry(*s).or_insert(0) += e;
        }
        let c = if self.sqrt3 && o.sqrt3 {
            rat_int(3)
        } else {
            Rat::one()
        };
        (m, c)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let pw = |name: &str, e: u32| {
            if e == 1 {
                name.to_string()
            } else {
                format!("{name}^{e}")
            }
        };
        if self.sqrt3 {
            parts.push("sqrt3".to_string());
        }
        if self.pi > 0 {
            parts.push(pw("pi", self.pi));
        }
        if self.log2 > 0 {
            parts.push(pw("log2", self.log2));
        }
        if self.log3 > 0 {
            parts.push(pw("log3", self.log3));
        }
        for (s, e) in &self.zeta {
            parts.push(pw(&format!("zeta({s})"), *e));
        }
        for (s, e) in &self.lchi {
            parts.push(pw(&format!("L({s},chi3)"), *e));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// `Q`-linear combination of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosedForm {
    terms: BTreeMap<Monomial, Rat>,
}

impl ClosedForm {
    pub fn zero() -> ClosedForm {
        ClosedForm::default()
    }

    pub fn term(c: Rat, m: Monomial) -> ClosedForm {
        let mut f = ClosedForm::zero();
        f.add_term(m, c);
        f
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        let e = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rat> {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Whether any monomial involves `log 2`.
    pub fn has_log2(&self) -> bool {
        self.terms.keys().any(|m| m.log2 > 0)
    }

    /// Whether every monomial has weight `k`.
    pub fn is_homogeneous(&self, k: u32) -> bool {
        self.terms.keys().all(|m| m.weight() == k)
    }

    pub fn add(&self, o: &ClosedForm) -> ClosedForm {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &ClosedForm) -> ClosedForm {
        self.add(&o.scale(&rat_int(-1)))
    }

    pub fn scale(&self, r: &Rat) -> ClosedForm {
        let mut out = ClosedForm::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * r);
        }
        out
    }

    pub fn mul(&self, o: &ClosedForm) -> ClosedForm {
        let mut out = ClosedForm::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let (m, c) = m1.mul(m2);
                out.add_term(m, c * c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, ctx: &Context) -> ApproxR {
        let bits = ctx.bits() + 16;
        let pi = constant(Constant::Pi, bits);
        let l2 = constant(Constant::Log2, bits);
        let l3 = constant(Constant::Log3, bits);
        let s3 = ApproxR::sqrt_int(3, bits);
        let mut acc = ApproxR::zero(bits);
        for (m, c) in &self.terms {
            let mut v = ApproxR::from_int(1, bits);
            v = &v * &pi.pow(m.pi);
            v = &v * &l2.pow(m.log2);
            v = &v * &l3.pow(m.log3);
            if m.sqrt3 {
                v = &v * &s3;
            }
            for (s, e) in &m.zeta {
                v = &v * &zeta_bits(*s, bits).pow(*e);
            }
            for (s, e) in &m.lchi {
                v = &v * &l_chi3_bits(*s, bits).pow(*e);
            }
            acc = &acc + &v.mul_rational(c);
        }
        acc.rescale(ctx.bits())
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            write!(f, "({})*{}", c.abs(), m)?;
        }
        Ok(())
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * b)
}

fn inv_fact(n: u32) -> Rat {
    Rat::new(BigInt::one(), factorial(n))
}

fn pow2(e: i32) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::one() << e as u32)
    } else {
        Rat::new(BigInt::one(), BigInt::one() << (-e) as u32)
    }
}

fn pow3(e: i32) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::from(3).pow(e as u32))
    } else {
        Rat::new(BigInt::one(), BigInt::from(3).pow((-e) as u32))
    }
}

fn sign(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        Rat::one()
    } else {
        rat_int(-1)
    }
}

/// `3^(-n/2)` as a rational times an optional `√3`.
fn inv_sqrt3(n: u32) -> (Rat, bool) {
    if n.is_multiple_of(2) {
        (pow3(-(n as i32) / 2), false)
    } else {
        (pow3(-((n as i32 + 1) / 2)), true)
    }
}

fn mono(pi: u32, sqrt3: bool) -> Monomial {
    Monomial {
        pi,
        sqrt3,
        ..Monomial::default()
    }
}

/// `I_g(ω2^{k-1} ω0)`.
pub fn g_trailing(k: u32) -> ClosedForm {
    let mut f = ClosedForm::zero();
    for j in (3..=k).step_by(2) {
        let c = -sign(((j - 1) / 2) as i64)
            * inv_fact(k - j)
            * pow2(-((k - j) as i32))
            * pow2(1 - j as i32)
            * (pow2(1 - j as i32) - Rat::one());
        f.add_term(mono(k - j, false).with_zeta(j), c);
    }
    let mut m = mono(k - 1, false);
    m.log2 = 1;
    f.add_term(m, inv_fact(k - 1) * pow2(-(k as i32 - 1)));
    if k % 2 == 1 {
        f.add_term(
            Monomial::one().with_zeta(k),
            sign(((k - 1) / 2) as i64) * pow2(1 - k as i32),
        );
    }
    f
}

/// `I_h(ω4^{k-1} ω0)`.
pub fn h_trailing(k: u32) -> ClosedForm {
    let mut f = ClosedForm::zero();
    let (r1, s1) = inv_sqrt3(k - 1);
    let mut m = mono(k - 1, s1);
    m.log3 = 1;
    f.add_term(m, &r1 * inv_fact(k - 1) * pow3(-(k as i32 - 1)) * rat(1, 2));
    if k % 2 == 1 {
        f.add_term(
            mono(0, s1).with_zeta(k),
            sign(((k - 1) / 2) as i64) * &r1 * pow2(1 - k as i32),
        );
    }
    let (r2, s2) = inv_sqrt3(k - 2);
    for j in (2..=k).step_by(2) {
        let c = &r2
            * sign(((j - 2) / 2) as i64)
            * inv_fact(k - j)
            * pow3(-((k - j) as i32))
            * pow2(-(j as i32));
        f.add_term(mono(k - j, s2).with_lchi(j), c);
    }
    for j in (3..=k).step_by(2) {
        let c = -(&r1
            * sign(((j - 1) / 2) as i64)
            * inv_fact(k - j)
            * pow3(-((k - j) as i32))
            * pow2(-(j as i32))
            * (pow3(1 - j as i32) - Rat::one()));
        f.add_term(mono(k - j, s1).with_zeta(j), c);
    }
    f
}

/// `(π/√3)^n` as rational, monomial.
fn pi_over_sqrt3(n: u32) -> (Rat, Monomial) {
    let (r, s) = inv_sqrt3(n);
    (r, mono(n, s))
}

/// `I_g(ω2^{2m-1} ω0)` written with the `ζ(2l+1) π^{2m-2l-1}` sum.
pub fn explicit_form_g_even(m: u32) -> ClosedForm {
    let mut f = ClosedForm::zero();
    for l in 1..m {
        let c = -pow2(1 - 2 * m as i32)
            * sign(l as i64)
            * inv_fact(2 * m - 2 * l - 1)
            * (pow2(-2 * l as i32) - Rat::one());
        f.add_term(mono(2 * m - 2 * l - 1, false).with_zeta(2 * l + 1), c);
    }
    let mut mm = mono(2 * m - 1, false);
    mm.log2 = 1;
    f.add_term(mm, inv_fact(2 * m - 1) * pow2(1 - 2 * m as i32));
    f
}

/// `I_g(ω2^{2m} ω0)`.
pub fn explicit_form_g_odd(m: u32) -> ClosedForm {
    let mut f = ClosedForm::zero();
    for l in 1..m {
        let c = -pow2(-2 * m as i32)
            * sign(l as i64)
            * inv_fact(2 * m - 2 * l)
            * (pow2(-2 * l as i32) - Rat::one());
        f.add_term(mono(2 * m - 2 * l, false).with_zeta(2 * l + 1), c);
    }
    f.add_term(
        Monomial::one().with_zeta(2 * m + 1),
        sign(m as i64) * pow2(-2 * m as i32) * (rat_int(2) - pow2(-2 * m as i32)),
    );
    let mut mm = mono(2 * m, false);
    mm.log2 = 1;
    f.add_term(mm, inv_fact(2 * m) * pow2(-2 * m as i32));
    f
}

/// `I_h(ω4^{2m-1} ω0)`; the `log 3` term carries `(π/3)^{2m-1}`.
pub fn explicit_form_h_even(m: u32) -> ClosedForm {
    let mut f = ClosedForm::zero();
    let (r, s) = inv_sqrt3(2 * m - 1);
    let mut mm = mono(2 * m - 1, s);
    mm.log3 = 1;
    f.add_term(
        mm,
        r * inv_fact(2 * m - 1) * pow3(1 - 2 * m as i32) * rat(1, 2),
    );
    for l in 1..=m {
        let (q, mo) = pi_over_sqrt3(2 * m - 2 * l);
        let c = pow3(1 - 2 * m as i32)
            * sign(1 - l as i64)
            * inv_fact(2 * m - 2 * l)
            * q
            * pow3(l as i32)
            * pow2(-2 * l as i32);
        f.add_term(mo.with_lchi(2 * l), c);
    }
    for l in 1..m {
        let (q, mo) = pi_over_sqrt3(2 * m - 2 * l - 1);
        let c = -(pow3(1 - 2 * m as i32)
            * sign(l as i64)
            * inv_fact(2 * m - 2 * l - 1)
            * q
            * pow3(l as i32)
            * pow2(-2 * l as i32 - 1)
            * (pow3(-2 * l as i32) - Rat::one()));
        f.add_term(mo.with_zeta(2 * l + 1), c);
    }
    f
}

/// `I_h(ω4^{2m} ω0)`.
pub fn explicit_form_h_odd(m: u32) -> ClosedForm {
    let mut f = ClosedForm::zero();
    let mut mm = mono(2 * m, false);
    mm.log3 = 1;
    f.add_term(
        mm,
        pow3(-(m as i32)) * inv_fact(2 * m) * pow3(-2 * m as i32) * rat(1, 2),
    );
    f.add_term(
        Monomial::one().with_zeta(2 * m + 1),
        sign(m as i64) * Rat::new(BigInt::one(), BigInt::from(12).pow(m)),
    );
    for l in 1..=m {
        let (q, mo) = pi_over_sqrt3(2 * m - 2 * l + 1);
        let c = pow3(-2 * m as i32)
            * sign(1 - l as i64)
            * inv_fact(2 * m - 2 * l + 1)
            * q
            * pow3(l as i32)
            * pow2(-2 * l as i32);
        f.add_term(mo.with_lchi(2 * l), c);
    }
    for l in 1..=m {
        let (q, mo) = pi_over_sqrt3(2 * m - 2 * l);
        let c = -(pow3(-2 * m as i32)
            * sign(l as i64)
            * inv_fact(2 * m - 2 * l)
            * q
            * pow3(l as i32)
            * pow2(-2 * l as i32 - 1)
            * (pow3(-2 * l as i32) - Rat::one()));
        f.add_term(mo.with_zeta(2 * l + 1), c);
    }
    f
}

/// `I_g(ω2) = π/2`, `I_h(ω4) = π/(3√3) = √3 π / 9`.
fn phi_value(curve: Curve) -> ClosedForm {
    match curve {
        Curve::G => ClosedForm::term(rat(1, 2), mono(1, false)),
        Curve::H => ClosedForm::term(rat(1, 9), mono(1, true)),
    }
}

/// Closed form of `I_f(φ^j ω0 φ^{k-j-1})` with `φ = ω2` (g) or `ω4` (h).
///
/// The trailing case `j = k-1` is explicit; the others follow from
/// `I(φ) I(φ^j ω0 φ^{k-j-2}) = (j+1) I(φ^{j+1} ω0 φ^{k-j-2}) + (k-j-1) I(φ^j ω0 φ^{k-j-1})`.
pub fn closed_form_special(curve: Curve, j: u32, k: u32) -> Result<ClosedForm> {
    if k < 2 || j < 1 || j > k - 1 {
        return Err(Error::Invalid(format!(
            "closed form needs k >= 2 and 1 <= j <= k-1 (j = 0 starts with ω0), got j={j}, k={k}"
        )));
    }
    Ok(special_rec(curve, j, k))
}

fn special_rec(curve: Curve, j: u32, k: u32) -> ClosedForm {
    if j == k - 1 {
        return match curve {
            Curve::G => g_trailing(k),
            Curve::H => h_trailing(k),
        };
    }
    let lower = special_rec(curve, j, k - 1).mul(&phi_value(curve));
    let upper = special_rec(curve, j + 1, k).scale(&rat_int(j as i64 + 1));
    lower
        .sub(&upper)
        .scale(&Rat::new(BigInt::one(), BigInt::from(k - j - 1)))
}
