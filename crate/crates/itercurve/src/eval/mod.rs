//! Numerical evaluation of iterated integrals.
//!
//! A `P^1` integral `I(0; a1..ak; 1)` is split at `1/2`:
//!
//! `I(0; a; 1) = Σ_s I(0; a1..as; 1/2) · (-1)^(k-s) · I(0; 1-ak, ..., 1-a(s+1); 1/2)`
//!
//! and each half is a power series in `1/2` whose coefficients are bounded by
//! one, because every nonzero letter has modulus at least one.

mod closed;
mod direct;

pub use closed::{
    closed_form_special, explicit_form_g_even, explicit_form_g_odd, explicit_form_h_even,
    explicit_form_h_odd, g_trailing, h_trailing, ClosedForm, Monomial,
};
pub use direct::{coeff_c, coeff_c_f64, eval_curve_direct, Estimate};

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::descent::{pullback_word, P1Comb, P1Letter};
use crate::exactfield::{Cyc, Level};
use crate::numkernel::{round_shift, ApproxC, ApproxR, Context};
use crate::words::{is_admissible, CurveWord};
use crate::{Curve, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Half,
    Full,
}

type Key = (Kind, Vec<P1Letter>, u32);

/// Process-wide value cache.  Values are deterministic functions of the key,
/// so concurrent writers of the same key are harmless.
fn cache() -> &'static RwLock<HashMap<Key, ApproxC>> {
    static C: OnceLock<RwLock<HashMap<Key, ApproxC>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached(key: Key, f: impl FnOnce() -> Result<ApproxC>) -> Result<ApproxC> {
    if let Some(v) = cache().read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = f()?;
    cache().write().unwrap().insert(key, v.clone());
    Ok(v)
}

/// Drop every cached value.
pub fn clear_cache() {
    cache().write().unwrap().clear();
}

pub fn cache_len() -> usize {
    cache().read().unwrap().len()
}

fn ceil_log2(x: u64) -> u32 {
    64 - x.max(1).leading_zeros()
}

fn check_letter(a: &P1Letter) -> Result<()> {
    if !a.is_zero() && !a.value().modulus_at_least_one() {
        return Err(Error::Invalid(format!("letter {a} has modulus below one")));
    }
    Ok(())
}

/// `I(0; a1..am; 1/2)`.
pub fn eval_p1_half(letters: &[P1Letter], ctx: &Context) -> Result<ApproxC> {
    half(letters, ctx.bits())
}

fn half(letters: &[P1Letter], bits: u32) -> Result<ApproxC> {
    if letters.is_empty() {
        return Ok(ApproxC::one(bits));
    }
    if letters[0].is_zero() {
        return Err(Error::Invalid("first letter of a half word is 0".into()));
    }
    for a in letters {
        check_letter(a)?;
    }
    cached((Kind::Half, letters.to_vec(), bits), || {
        Ok(half_series(letters, bits))
    })
}

/// Accumulator recurrence for the half-path series.
///
/// With `S_0 = δ_{n,0}`, a zero letter gives `S_j[n] = S_{j-1}[n]/n`, and a
/// letter `a` gives `T[n] = a^-1 (T[n-1] + S_{j-1}[n-1])`, `S_j[n] = -T[n]/n`.
/// The value is `Σ_n S_m[n] 2^-n`.  Exactly `|S_j[n]| <= 1` and `|T[n]| <= n`,
/// so the truncation after `n` terms costs at most `2^-n`, and a rounding of
/// one unit per operation plus the error `δ` of `a^-1` adds at most
/// `δ n/2 + 4` units per level (the growth factor `(1 + δ 2^-w)^n` is absorbed
/// by doubling).
fn half_series(letters: &[P1Letter], bits: u32) -> ApproxC {
    let m = letters.len() as u64;
    let w = bits + 24 + ceil_log2(m * bits as u64);
    let n = w as usize + 2;
    let one = BigInt::from(1u32) << w;
    let zero = || (BigInt::zero(), BigInt::zero());
    let mut s: Vec<(BigInt, BigInt)> = (0..=n).map(|_| zero()).collect();
    s[0].0 = one;
    let mut budget: u64 = 0;
    for a in letters {
        let mut next: Vec<(BigInt, BigInt)> = (0..=n).map(|_| zero()).collect();
        if a.is_zero() {
            for i in 1..=n {
                next[i] = (&s[i].0 / i, &s[i].1 / i);
            }
            budget += 2;
        } else {
            let inv = a.value().inv().expect("nonzero letter").to_approx(w);
            let delta = inv.rad().to_u64().unwrap_or(u64::MAX / 4) + 1;
            let (ar, ai) = (inv.re_mid().clone(), inv.im_mid().clone());
            let (mut tr, mut ti) = zero();
            for i in 1..=n {
                let ur = &tr + &s[i - 1].0;
                let ui = &ti + &s[i - 1].1;
                tr = (&ar * &ur - &ai * &ui) >> w;
                ti = (&ar * &ui + &ai * &ur) >> w;
                next[i] = (-(&tr / i), -(&ti / i));
            }
            budget += delta * (n as u64) / 2 + 4;
        }
        s = next;
    }
    let mut re = BigInt::zero();
    let mut im = BigInt::zero();
    for (i, (r, c)) in s.iter().enumerate().skip(1) {
        re += r << (n - i);
        im += c << (n - i);
    }
    let rad = BigUint::from(2 * budget + 4);
    ApproxC::from_parts(
        round_shift(&re, n as u32),
        round_shift(&im, n as u32),
        rad,
        w,
    )
    .rescale(bits)
}

/// `I(0; a1..ak; 1)` along the straight path.
pub fn eval_p1_full(letters: &[P1Letter], ctx: &Context) -> Result<ApproxC> {
    full(letters, ctx.bits())
}

pub(crate) fn full(letters: &[P1Letter], bits: u32) -> Result<ApproxC> {
    let k = letters.len();
    let level = letters.first().map(|l| l.level()).unwrap_or(Level::N4);
    if k == 0 {
        return Ok(ApproxC::one(bits));
    }
    if letters[0].is_zero() {
        return Err(Error::Invalid(
            "first letter is 0: the integral diverges".into(),
        ));
    }
    if letters[k - 1].is_one() {
        return Err(Error::Invalid(
            "last letter is 1: the integral diverges".into(),
        ));
    }
    for a in letters {
        if a.level() != level {
            return Err(Error::Invalid("letters of mixed level".into()));
        }
        check_letter(a)?;
        check_letter(&a.flip())?;
    }
    cached((Kind::Full, letters.to_vec(), bits), || {
        let b2 = bits + 8 + ceil_log2(k as u64 + 1);
        let mut acc = ApproxC::zero(b2);
        for s in 0..=k {
            let left = half(&letters[..s], b2)?;
            let right: Vec<P1Letter> = letters[s..].iter().rev().map(P1Letter::flip).collect();
            let right = half(&right, b2)?;
            let t = &left * &right;
            acc = if (k - s).is_multiple_of(2) {
                &acc + &t
            } else {
                &acc - &t
            };
        }
        Ok(acc.rescale(bits))
    })
}

/// Evaluate a `Cyc`-linear combination of `P^1` words.
pub fn eval_p1_comb(x: &P1Comb, ctx: &Context) -> Result<ApproxC> {
    comb(x, ctx.bits())
}

fn comb(x: &P1Comb, bits: u32) -> Result<ApproxC> {
    let b2 = bits + 4 + ceil_log2(x.len() as u64 + 1);
    let mut acc = ApproxC::zero(b2);
    for (w, c) in x.terms() {
        let v = full(w, b2)?;
        acc = &acc + &(&c.to_approx(b2) * &v);
    }
    Ok(acc.rescale(bits))
}

/// Real part of a value known to be real, after checking the imaginary
/// part vanishes within the error bound.
pub(crate) fn real_part(z: &ApproxC, what: &str) -> Result<ApproxR> {
    if !z.imag().contains_zero() {
        return Err(Error::Precision(format!(
            "{what}: imaginary residual {} exceeds the error bound {}",
            z.imag().to_decimal(20),
            z.err_string()
        )));
    }
    Ok(z.real())
}

/// `I_f(η1 ⋯ ηk)` via the pullback.
pub fn eval_curve_word(w: &CurveWord, ctx: &Context) -> Result<ApproxR> {
    if !is_admissible(w) {
        return Err(Error::Invalid(format!(
            "word {w} is not admissible for curve {}",
            w.curve()
        )));
    }
    let pb = pullback_word(w)?;
    let z = comb(&pb, ctx.bits())?;
    let x = real_part(&z, &format!("I_{}({w})", w.curve()))?;
    ctx.require(x, &format!("I_{}({w})", w.curve()))
}

/// `Li_k(z) = -I(0; 1/z, 0^{k-1}; 1)` for `|z| <= 1` with `1/z` a valid
/// letter.
pub fn polylog(k: usize, z: &Cyc, ctx: &Context) -> Result<ApproxC> {
    if k == 0 {
        return Err(Error::Invalid("polylog weight must be positive".into()));
    }
    let mut letters = vec![P1Letter::new(z.inv()?)];
    letters.extend(std::iter::repeat_n(P1Letter::zero(z.level()), k - 1));
    Ok(-&eval_p1_full(&letters, ctx)?)
}

/// The multiple L-value `(-1)^d I(0; α1^-1, 0^{k1-1}, ..., αd^-1, 0^{kd-1}; 1)`.
pub fn mlv(ks: &[usize], alphas: &[Cyc], ctx: &Context) -> Result<ApproxC> {
    if ks.is_empty() || ks.len() != alphas.len() {
        return Err(Error::Invalid(
            "index and root lists must be nonempty and of equal length".into(),
        ));
    }
    let level = alphas[0].level();
    let n = level.order() as i64;
    let mut letters = Vec::new();
    for (&k, a) in ks.iter().zip(alphas) {
        if k == 0 {
            return Err(Error::Invalid("indices must be positive".into()));
        }
        if a.level() != level || !a.pow(n)?.is_one() {
            return Err(Error::Invalid(format!(
                "{a} is not a root of unity of level {n}"
            )));
        }
        letters.push(P1Letter::new(a.inv()?));
        letters.extend(std::iter::repeat_n(P1Letter::zero(level), k - 1));
    }
    if *ks.last().unwrap() == 1 && alphas.last().unwrap().is_one() {
        return Err(Error::Invalid("(k_d, α_d) = (1, 1) diverges".into()));
    }
    let v = eval_p1_full(&letters, ctx)?;
    Ok(if ks.len().is_multiple_of(2) { v } else { -&v })
}

/// The curve word `ω2 ω3^{k1-1} ⋯ ω2 ω3^{kd-1}` of g.
pub fn ttilde_word(ks: &[usize]) -> Result<CurveWord> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::Invalid(
            "T̃ indices must be positive and nonempty".into(),
        ));
    }
    let mut letters = Vec::new();
    for &k in ks {
        letters.push(2);
        letters.extend(std::iter::repeat_n(3, k - 1));
    }
    CurveWord::new(Curve::G, letters)
}

/// Kaneko-Tsumura `T̃(k1, ..., kd)`.
pub fn ttilde(ks: &[usize], ctx: &Context) -> Result<ApproxR> {
    eval_curve_word(&ttilde_word(ks)?, ctx)
}
