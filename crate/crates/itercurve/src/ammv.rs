//! Alternating multiple mixed values
//!
//! `M^ε_σ(k) = Σ_{0<n_1<⋯<n_d} Π_j (1 + ε_j (-1)^{n_j}) σ_j^{(2n_j+1-ε_j)/4} / n_j^{k_j}`
//!
//! and their expression as level-4 iterated integrals.

use std::fmt;

use crate::descent::{P1Comb, P1Letter};
use crate::eval::{eval_p1_comb, Estimate};
use crate::exactfield::{Cyc, Level};
use crate::numkernel::{ApproxR, Context};
use crate::{Error, Result};

/// An index `(k, ε, σ)`; construction enforces convergence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmmvIndex {
    k: Vec<u32>,
    eps: Vec<i8>,
    sigma: Vec<i8>,
}

impl AmmvIndex {
    /// Convergent when `k_d >= 2`, or `k_d = 1` with `σ_d = -1`.
    pub fn new(k: Vec<u32>, eps: Vec<i8>, sigma: Vec<i8>) -> Result<AmmvIndex> {
        if k.is_empty() || k.len() != eps.len() || k.len() != sigma.len() {
            return Err(Error::Invalid(
                "k, ε and σ must be nonempty and of equal length".into(),
            ));
        }
        if k.contains(&0) {
            return Err(Error::Invalid("indices k_j must be positive".into()));
        }
        if eps.iter().chain(&sigma).any(|&s| s != 1 && s != -1) {
            return Err(Error::Invalid("signs must be ±1".into()));
        }
        let d = k.len() - 1;
        if k[d] == 1 && sigma[d] == 1 {
            return Err(Error::Invalid(format!(
                "divergent index: k_d = 1 requires σ_d = -1 (got ε_d = {}, σ_d = 1)",
                eps[d]
            )));
        }
        Ok(AmmvIndex { k, eps, sigma })
    }

    /// Parses `"1,2"`, `"+,-"`, `"-,+"`.
    pub fn parse(k: &str, eps: &str, sigma: &str) -> Result<AmmvIndex> {
        let ks = k
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Invalid(format!("bad index {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        AmmvIndex::new(ks, parse_signs(eps)?, parse_signs(sigma)?)
    }

    pub fn k(&self) -> &[u32] {
        &self.k
    }

    pub fn eps(&self) -> &[i8] {
        &self.eps
    }

    pub fn sigma(&self) -> &[i8] {
        &self.sigma
    }

    pub fn depth(&self) -> usize {
        self.k.len()
    }

    pub fn weight(&self) -> u32 {
        self.k.iter().sum()
    }
}

fn parse_signs(s: &str) -> Result<Vec<i8>> {
    s.split(',')
        .map(|t| match t.trim() {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(Error::Invalid(format!("bad sign {other:?}"))),
        })
        .collect()
}

impl fmt::Display for AmmvIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |v: &[i8]| {
            v.iter()
                .map(|&s| if s > 0 { "+" } else { "-" })
                .collect::<Vec<_>>()
                .join(",")
        };
        let ks = self
            .k
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(",");
        write!(
            f,
            "M[k=({ks}); eps=({}); sigma=({})]",
            sign(&self.eps),
            sign(&self.sigma)
        )
    }
}

/// All convergent indices of total weight `k`.
pub fn convergent_indices(k: u32) -> Vec<AmmvIndex> {
    fn compositions(k: u32) -> Vec<Vec<u32>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for first in 1..=k {
            for mut rest in compositions(k - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let signs = |d: usize, m: usize| {
        (0..d)
            .map(|j| if (m >> j) & 1 == 0 { 1 } else { -1 })
            .collect::<Vec<i8>>()
    };
    let mut out = Vec::new();
    for ks in compositions(k) {
        let d = ks.len();
        for e in 0..1usize << d {
            for s in 0..1usize << d {
                if let Ok(idx) = AmmvIndex::new(ks.clone(), signs(d, e), signs(d, s)) {
                    out.push(idx);
                }
            }
        }
    }
    out
}

/// Truncated nested sum over `n_d <= n_terms` in floating point.  The error
/// is a heuristic: the larger of twice the largest change of the partial sums
/// over the last half of the range and a tail estimate for the outermost sum
/// (`Σ_{n>N} 2C/n^{k_d}`, or `2C/N` for the alternating `k_d = 1` case, with
/// `C` the largest inner partial sum), plus an allowance for rounding.
pub fn ammv_series(idx: &AmmvIndex, n_terms: usize) -> Result<Estimate> {
    if n_terms < 1000 {
        return Err(Error::Invalid("at least 1000 terms are required".into()));
    }
    let len = n_terms + 1;
    // prev[n] = sum over chains with last index at most n
    let mut prev = vec![1.0f64; len];
    let mut partial = vec![0.0f64; len];
    let mut inner_max = 1.0f64;
    for j in 0..idx.depth() {
        let (k, e, s) = (idx.k[j] as i32, idx.eps[j] as i32, idx.sigma[j]);
        if j > 0 {
            inner_max = prev.iter().fold(0.0, |m, x| m.max(x.abs()));
        }
        let mut acc = 0.0;
        for n in 1..len {
            let parity = if n % 2 == 0 { 1 } else { -1 };
            let f = 1 + e * parity;
            if f != 0 {
                let exp = (2 * n as i64 + 1 - e as i64) / 4;
                let sig = if s < 0 && exp % 2 == 1 { -1.0 } else { 1.0 };
                let inner = if j == 0 { 1.0 } else { prev[n - 1] };
                acc += f as f64 * sig / (n as f64).powi(k) * inner;
            }
            partial[n] = acc;
        }
        prev = partial.clone();
    }
    let v = partial[n_terms];
    let block = partial[n_terms / 2..]
        .iter()
        .map(|p| (v - p).abs())
        .fold(0.0, f64::max);
    let kd = *idx.k.last().unwrap() as i32;
    let n = n_terms as f64;
    let tail = if kd >= 2 {
        2.0 * inner_max / ((kd - 1) as f64 * n.powi(kd - 1))
    } else {
        2.0 * inner_max / n
    };
    let rounding = 4.0 * n * idx.depth() as f64 * f64::EPSILON * inner_max.max(v.abs());
    Ok(Estimate {
        value: v,
        err: (2.0 * block).max(tail) + rounding,
    })
}

/// The one-form attached to `(σ, ε)` as a combination of `e_a = dλ/(λ-a)`.
fn form(sigma: i8, eps: i8) -> P1Comb {
    let l = Level::N4;
    let one = Cyc::one(l);
    let i = Cyc::xi(l);
    let neg = |c: &Cyc| c.scale(&crate::exactfield::rat_int(-1));
    let mut f = P1Comb::zero(l);
    let mut add = |a: Cyc, c: Cyc| f.add_term(vec![P1Letter::new(a)], c);
    match (sigma, eps) {
        (1, -1) => {
            add(one.clone(), neg(&one));
            add(neg(&one), one.clone());
        }
        (1, 1) => {
            add(one.clone(), neg(&one));
            add(neg(&one), neg(&one));
        }
        (-1, -1) => {
            add(i.clone(), i.clone());
            add(neg(&i), neg(&i));
        }
        _ => {
            add(i.clone(), neg(&one));
            add(neg(&i), neg(&one));
        }
    }
    f
}

/// `ω^{ε_j, ε_{j-1}}_σ`, with the sign flip for `(σ, ε_j, ε_{j-1}) = (-1, 1, -1)`.
fn form2(sigma: i8, eps: i8, eps_prev: i8) -> P1Comb {
    let f = form(sigma, eps * eps_prev);
    if (sigma, eps, eps_prev) == (-1, 1, -1) {
        f.scale(&Cyc::int(Level::N4, -1))
    } else {
        f
    }
}

/// The level-4 combination of words whose iterated integral on `[0, 1]` is
/// `M^ε_σ(k)`.
pub fn ammv_word(idx: &AmmvIndex) -> Result<P1Comb> {
    let l = Level::N4;
    let zero = P1Comb::single(vec![P1Letter::zero(l)], Cyc::one(l));
    let d = idx.depth();
    let mut out = P1Comb::unit(l);
    for j in 0..d {
        let sigma: i8 = idx.sigma[j..].iter().product();
        let f = if j == 0 {
            form(sigma, idx.eps[0])
        } else {
            form2(sigma, idx.eps[j], idx.eps[j - 1])
        };
        out = out.concat(&f);
        for _ in 1..idx.k[j] {
            out = out.concat(&zero);
        }
    }
    for w in out.terms().keys() {
        if w.first().is_some_and(P1Letter::is_zero) || w.last().is_some_and(P1Letter::is_one) {
            return Err(Error::Verification(format!(
                "{idx} expands to a divergent word"
            )));
        }
    }
    Ok(out)
}

/// `M^ε_σ(k)` through its iterated-integral representation.
pub fn ammv_eval(idx: &AmmvIndex, ctx: &Context) -> Result<ApproxR> {
    let z = eval_p1_comb(&ammv_word(idx)?, ctx)?;
    let what = idx.to_string();
    let x = crate::eval::real_part(&z, &what)?;
    ctx.require(x, &what)
}

/// The bound `dim_Q AMMV^{(k)} <= 2^k`.
pub fn ammv_dim_bound(k: u32) -> u128 {
    1u128 << k
}
