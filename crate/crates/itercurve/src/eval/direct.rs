//! Direct evaluation of curve words from the power-series expansion of the
//! one-forms, `ω_s = Σ_n c(n, ω_s) x^{n-1} dx`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::exactfield::{rat, Rat};
use crate::numkernel::Context;
use crate::words::{is_admissible, CurveLetter, CurveWord};
use crate::{Curve, Error, Result};

/// A value with a heuristic (not rigorous) error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl Estimate {
    pub fn rigorous(&self) -> bool {
        false
    }
}

fn central_binomial(m: u64) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..m {
        c = c * (2 * m - i) / (i + 1);
    }
    c
}

/// `(3/16)^m C(2m, m)`.
fn h_kernel(m: u64) -> Rat {
    Rat::new(
        central_binomial(m) * BigInt::from(3u32).pow(m as u32),
        BigInt::from(16u32).pow(m as u32),
    )
}

/// Series coefficient `c(n, ω_s)`.
pub fn coeff_c(n: u64, l: CurveLetter) -> Rat {
    let half = rat(1, 2);
    match (l.curve(), l.index()) {
        (_, 0) => {
            if n == 0 {
                Rat::one()
            } else {
                Rat::zero()
            }
        }
        (_, 1) => {
            if n == 0 {
                Rat::zero()
            } else {
                Rat::one()
            }
        }
        (Curve::G, 2) => {
            if n % 2 == 1 {
                let m = (n - 1) / 2;
                Rat::new(central_binomial(m), BigInt::one() << (2 * m))
            } else {
                Rat::zero()
            }
        }
        (Curve::G, 3) => {
            if n.is_multiple_of(2) {
                let m = n / 2;
                Rat::new(central_binomial(m), BigInt::one() << (2 * m))
            } else {
                Rat::zero()
            }
        }
        (Curve::H, 4) => {
            if n % 2 == 1 {
                h_kernel((n - 1) / 2) * half
            } else {
                Rat::zero()
            }
        }
        (Curve::H, 5) => {
            if n.is_multiple_of(2) {
                h_kernel(n / 2) * half
            } else {
                Rat::zero()
            }
        }
        (Curve::H, 6) => {
            if n == 0 {
                return Rat::zero();
            }
            let top = (n - 1) / 2;
            (0..=top).map(h_kernel).fold(Rat::zero(), |a, b| a + b) * half
        }
        _ => unreachable!("letter validated at construction"),
    }
}

/// `c(n, ω_s)` for `n = 0..=len-1` in floating point.
pub fn coeff_c_f64(len: usize, l: CurveLetter) -> Vec<f64> {
    // b_m = C(2m, m) / 4^m
    let mut b = vec![0.0f64; len / 2 + 2];
    b[0] = 1.0;
    for m in 1..b.len() {
        b[m] = b[m - 1] * (2 * m - 1) as f64 / (2 * m) as f64;
    }
    let mut out = vec![0.0; len];
    match (l.curve(), l.index()) {
        (_, 0) => out[0] = 1.0,
        (_, 1) => out.iter_mut().skip(1).for_each(|x| *x = 1.0),
        (Curve::G, 2) => (0..len)
            .filter(|n| n % 2 == 1)
            .for_each(|n| out[n] = b[(n - 1) / 2]),
        (Curve::G, 3) => (0..len)
            .filter(|n| n % 2 == 0)
            .for_each(|n| out[n] = b[n / 2]),
        (Curve::H, 4) | (Curve::H, 5) | (Curve::H, 6) => {
            let mut k = vec![0.0f64; b.len()];
            let mut p = 0.5;
            for m in 0..b.len() {
                k[m] = p * b[m];
                p *= 0.75;
            }
            match l.index() {
                4 => (0..len)
                    .filter(|n| n % 2 == 1)
                    .for_each(|n| out[n] = k[(n - 1) / 2]),
                5 => (0..len)
                    .filter(|n| n % 2 == 0)
                    .for_each(|n| out[n] = k[n / 2]),
                _ => {
                    let mut acc = 0.0;
                    for n in 1..len {
                        if (n - 1) % 2 == 0 {
                            acc += k[(n - 1) / 2];
                        }
                        out[n] = acc;
                    }
                }
            }
        }
        _ => unreachable!("letter validated at construction"),
    }
    out
}

struct Convolver {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    size: usize,
}

impl Convolver {
    fn new(len: usize) -> Convolver {
        let size = (2 * len).next_power_of_two();
        let mut planner = FftPlanner::new();
        Convolver {
            fwd: planner.plan_fft_forward(size),
            inv: planner.plan_fft_inverse(size),
            size,
        }
    }

    /// First `a.len()` entries of the linear convolution of `a` and `b`.
    fn conv(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let pad = |v: &[f64]| {
            let mut buf: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
            buf.resize(self.size, Complex::new(0.0, 0.0));
            buf
        };
        let mut fa = pad(a);
        let mut fb = pad(b);
        self.fwd.process(&mut fa);
        self.fwd.process(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= y;
        }
        self.inv.process(&mut fa);
        let scale = 1.0 / self.size as f64;
        fa.iter().take(a.len()).map(|z| z.re * scale).collect()
    }
}

/// Partial sum of the iterated series over `n_k <= n_terms`,
/// `Σ Π_j c(n_j - n_{j-1}, η_j) / n_j`, by a dynamic program over the last
/// index.  The error is a heuristic: the larger of
/// `max_{N/2 <= n <= N} |V(N) - V(n)|` and a geometric extrapolation of the
/// tail from the blocks `(N/4, N/2]` and `(N/2, N]`, plus a rounding allowance.
pub fn eval_curve_direct(w: &CurveWord, n_terms: usize, _ctx: &Context) -> Result<Estimate> {
    if !is_admissible(w) {
        return Err(Error::Invalid(format!(
            "word {w} is not admissible for curve {}",
            w.curve()
        )));
    }
    if n_terms < 10 {
        return Err(Error::Invalid("at least 10 terms are required".into()));
    }
    let len = n_terms + 1;
    let conv = Convolver::new(len);
    let mut s = vec![0.0f64; len];
    s[0] = 1.0;
    for l in w.letters() {
        let mut next = vec![0.0f64; len];
        match l.index() {
            0 => {
                for n in 1..len {
                    next[n] = s[n] / n as f64;
                }
            }
            1 => {
                let mut acc = 0.0;
                for n in 1..len {
                    acc += s[n - 1];
                    next[n] = acc / n as f64;
                }
            }
            _ => {
                let c = coeff_c_f64(len, l);
                let y = conv.conv(&s, &c);
                for n in 1..len {
                    next[n] = y[n] / n as f64;
                }
            }
        }
        s = next;
    }
    let mut partial = vec![0.0f64; len];
    let mut acc = 0.0;
    for n in 1..len {
        acc += s[n];
        partial[n] = acc;
    }
    let v = partial[len - 1];
    let block = partial[n_terms / 2..]
        .iter()
        .map(|p| (v - p).abs())
        .fold(0.0, f64::max);
    // geometric extrapolation of the tail from the last two dyadic blocks
    let d2 = v - partial[n_terms / 2];
    let d1 = partial[n_terms / 2] - partial[n_terms / 4];
    let r = if d1 != 0.0 { d2 / d1 } else { 0.0 };
    let tail = if r > 0.0 {
        d2.abs() * r.min(0.95) / (1.0 - r.min(0.95))
    } else {
        0.0
    };
    let scale = partial.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let rounding = 8.0 * len as f64 * f64::EPSILON * scale.max(1.0);
    Ok(Estimate {
        value: v,
        err: block.max(1.25 * tail) + rounding,
    })
}
