//! Integer relations among computed values, exact shuffle identities,
//! dimension generating series and the dimension tables.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::descent::parity_component;
use crate::eval::{eval_curve_word, polylog};
use crate::exactfield::{rat, rat_int, Cyc, Level, Rat};
use crate::numkernel::{
    bernoulli, constant, dirichlet_l_chi3, zeta, ApproxC, ApproxR, Constant, Context,
};
use crate::words::{enumerate_admissible, parity_letter, shuffle, CurveWord, WordComb};
use crate::{Curve, Error, Result};

/// Tunable PSLQ parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PslqParams {
    pub gamma: f64,
    pub max_iter: u64,
    /// A relation is detected when `|y_i| < 10^(-threshold·P)`.
    pub threshold: f64,
    /// Give up once every relation is known to exceed this norm.
    pub max_norm: f64,
}

impl Default for PslqParams {
    fn default() -> PslqParams {
        PslqParams {
            gamma: 2.0 / 3f64.sqrt(),
            max_iter: 1_000_000,
            threshold: 0.6,
            max_norm: 1e6,
        }
    }
}

/// A detected integer relation `Σ r_i x_i ≈ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationReport {
    pub coeffs: Vec<BigInt>,
    /// `Σ r_i x_i` at the detection precision.
    pub residual: ApproxR,
    /// Whether the relation was re-verified at doubled precision.
    pub confirmed: bool,
    /// Lower bound on relation norms established before detection.
    pub norm_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PslqOutcome {
    Relation(RelationReport),
    /// No relation of Euclidean norm below `norm_bound` exists.
    NoRelation {
        norm_bound: f64,
        iterations: u64,
    },
}

impl PslqOutcome {
    pub fn relation(&self) -> Option<&RelationReport> {
        match self {
            PslqOutcome::Relation(r) => Some(r),
            PslqOutcome::NoRelation { .. } => None,
        }
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn round_fixed(x: &BigInt, prec: u32) -> BigInt {
    ((x + (BigInt::one() << (prec - 1))) >> prec) << prec
}

fn sqrt_fixed(x: &BigInt, prec: u32) -> BigInt {
    if x.is_negative() {
        return BigInt::zero();
    }
    (x << prec).sqrt()
}

fn pow10_fixed(e: f64, prec: u32) -> BigInt {
    // 10^-e · 2^prec, via an integer power of ten
    let e = e.ceil() as u32;
    (BigInt::one() << prec) / BigInt::from(10u32).pow(e)
}

fn norm_bound_of(h: &[Vec<BigInt>], n: usize, prec: u32) -> f64 {
    let max = (1..n)
        .filter(|&j| j < h[j].len())
        .map(|j| h[j][j].abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    if max.is_zero() {
        return f64::INFINITY;
    }
    let q: BigInt = (BigInt::one() << (2 * prec)) / max;
    (q >> prec).to_f64().unwrap_or(f64::INFINITY)
}

/// Fixed-point PSLQ (Ferguson-Bailey-Arno) on values known to `ctx`.
pub fn pslq(xs: &[ApproxR], ctx: &Context, params: &PslqParams) -> Result<PslqOutcome> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::Invalid("PSLQ needs at least two values".into()));
    }
    for x in xs {
        if !ctx.meets(x) {
            return Err(Error::Precision(format!(
                "input error {} exceeds 1e-{}",
                x.err_string(),
                ctx.precision_digits()
            )));
        }
    }
    let p = ctx.precision_digits() as f64;
    let prec = (p * std::f64::consts::LOG2_10).ceil() as u32 + 60;
    let tol = pow10_fixed(params.threshold * p, prec);
    // 1-based indexing mirrors the textbook description
    let mut x = vec![BigInt::zero(); n + 1];
    for (i, v) in xs.iter().enumerate() {
        x[i + 1] = v.rescale(prec).mid().clone();
    }
    let minx = x[1..].iter().map(|v| v.abs()).min().unwrap();
    if minx.is_zero() {
        return Err(Error::Invalid("PSLQ input contains zero".into()));
    }
    if minx < &tol / 100 {
        return Err(Error::Invalid(
            "PSLQ input below the detection threshold".into(),
        ));
    }
    let one = BigInt::one() << prec;
    let g = BigInt::from((params.gamma * 2f64.powi(52)) as u64) << (prec - 52);
    let mut gpow = vec![one.clone(); n + 1];
    for i in 1..=n {
        gpow[i] = (&gpow[i - 1] * &g) >> prec;
    }
    let mut a = vec![vec![BigInt::zero(); n + 1]; n + 1];
    let mut b = a.clone();
    let mut h = a.clone();
    for i in 1..=n {
        a[i][i] = one.clone();
        b[i][i] = one.clone();
    }
    let mut s = vec![BigInt::zero(); n + 1];
    for k in 1..=n {
        let t: BigInt = (k..=n).map(|j| (&x[j] * &x[j]) >> prec).sum();
        s[k] = sqrt_fixed(&t, prec);
    }
    let t = s[1].clone();
    let mut y = x.clone();
    for k in 1..=n {
        y[k] = floor_div(&(&x[k] << prec), &t);
        s[k] = floor_div(&(&s[k] << prec), &t);
    }
    for i in 1..=n {
        if i < n {
            h[i][i] = if s[i].is_zero() {
                BigInt::zero()
            } else {
                floor_div(&(&s[i + 1] << prec), &s[i])
            };
        }
        for j in 1..i {
            let sjj1 = &s[j] * &s[j + 1];
            h[i][j] = if sjj1.is_zero() {
                BigInt::zero()
            } else {
                floor_div(&((-(&y[i] * &y[j])) << prec), &sjj1)
            };
        }
    }
    let reduce = |i: usize,
                  j: usize,
                  y: &mut Vec<BigInt>,
                  a: &mut Vec<Vec<BigInt>>,
                  b: &mut Vec<Vec<BigInt>>,
                  h: &mut Vec<Vec<BigInt>>|
     -> bool {
        if h[j][j].is_zero() {
            return false;
        }
        let t = round_fixed(&floor_div(&(&h[i][j] << prec), &h[j][j]), prec);
        if t.is_zero() {
            return true;
        }
        y[j] = &y[j] + ((&t * &y[i]) >> prec);
        for k in 1..=j {
            h[i][k] = &h[i][k] - ((&t * &h[j][k]) >> prec);
        }
        for k in 1..=n {
            a[i][k] = &a[i][k] - ((&t * &a[j][k]) >> prec);
            b[k][j] = &b[k][j] + ((&t * &b[k][i]) >> prec);
        }
        true
    };
    for i in 2..=n {
        for j in (1..i).rev() {
            reduce(i, j, &mut y, &mut a, &mut b, &mut h);
        }
    }
    let mut iterations = 0u64;
    let mut norm_bound = norm_bound_of(&h, n, prec);
    while iterations < params.max_iter {
        iterations += 1;
        let mut m = 1;
        let mut szmax = BigInt::from(-1);
        for i in 1..n {
            let sz = (&gpow[i] * h[i][i].abs()) >> prec;
            if sz > szmax {
                m = i;
                szmax = sz;
            }
        }
        y.swap(m, m + 1);
        h.swap(m, m + 1);
        a.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m + 2 <= n {
            let t0 = sqrt_fixed(
                &((&h[m][m] * &h[m][m] + &h[m][m + 1] * &h[m][m + 1]) >> prec),
                prec,
            );
            if t0.is_zero() {
                break;
            }
            let t1 = floor_div(&(&h[m][m] << prec), &t0);
            let t2 = floor_div(&(&h[m][m + 1] << prec), &t0);
            for i in m..=n {
                let t3 = h[i][m].clone();
                let t4 = h[i][m + 1].clone();
                h[i][m] = (&t1 * &t3 + &t2 * &t4) >> prec;
                h[i][m + 1] = (-(&t2 * &t3) + &t1 * &t4) >> prec;
            }
        }
        for i in m + 1..=n {
            for j in (1..=(i - 1).min(m + 1)).rev() {
                if !reduce(i, j, &mut y, &mut a, &mut b, &mut h) {
                    break;
                }
            }
        }
        for i in 1..=n {
            if y[i].abs() < tol {
                let mut vec: Vec<BigInt> = (1..=n)
                    .map(|j| round_fixed(&b[j][i], prec) >> prec)
                    .collect();
                if vec
                    .iter()
                    .find(|v| !v.is_zero())
                    .is_some_and(|v| v.is_negative())
                {
                    vec.iter_mut().for_each(|v| *v = -&*v);
                }
                let norm = vec
                    .iter()
                    .map(|v| v.to_f64().unwrap_or(f64::INFINITY).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if norm > 0.0 && norm <= params.max_norm {
                    let residual = combine(&vec, xs);
                    return Ok(PslqOutcome::Relation(RelationReport {
                        coeffs: vec,
                        residual,
                        confirmed: false,
                        norm_bound,
                    }));
                }
            }
        }
        norm_bound = norm_bound.max(norm_bound_of(&h, n, prec));
        if norm_bound >= params.max_norm {
            break;
        }
    }
    Ok(PslqOutcome::NoRelation {
        norm_bound,
        iterations,
    })
}

/// `Σ r_i x_i`.
pub fn combine(coeffs: &[BigInt], xs: &[ApproxR]) -> ApproxR {
    let bits = xs.iter().map(ApproxR::bits).max().unwrap_or(64);
    xs.iter()
        .zip(coeffs)
        .fold(ApproxR::zero(bits), |acc, (x, c)| {
            &acc + &x.mul_int(c.clone())
        })
}

/// Heuristic rank of the `Q`-span of `values`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankEstimate {
    pub rank: usize,
    /// Indices of the values kept as independent.
    pub basis: Vec<usize>,
    /// Confirmed relations, expressed over all input indices.
    pub relations: Vec<RelationReport>,
}

/// Greedy rank estimate: each value is tested against the current independent
/// set with PSLQ at `ctx`; a relation involving it must be confirmed by the
/// values at doubled precision, `values_2p`, with residual at most
/// `10^(-2·threshold·P)`.
pub fn rank_estimate(
    values: &[ApproxR],
    values_2p: &[ApproxR],
    ctx: &Context,
    params: &PslqParams,
) -> Result<RankEstimate> {
    if values.len() != values_2p.len() {
        return Err(Error::Invalid(
            "value lists at P and 2P differ in length".into(),
        ));
    }
    let confirm_exp = (2.0 * params.threshold * ctx.precision_digits() as f64).ceil() as i64;
    let mut basis: Vec<usize> = Vec::new();
    let mut relations = Vec::new();
    for (i, v) in values.iter().enumerate() {
        if v.contains_zero() {
            return Err(Error::Precision(format!(
                "value #{i} cannot be separated from zero"
            )));
        }
        if basis.is_empty() {
            basis.push(i);
            continue;
        }
        let idx: Vec<usize> = basis.iter().copied().chain([i]).collect();
        let xs: Vec<ApproxR> = idx.iter().map(|&j| values[j].clone()).collect();
        match pslq(&xs, ctx, params)? {
            PslqOutcome::NoRelation { .. } => basis.push(i),
            PslqOutcome::Relation(mut r) => {
                let xs2: Vec<ApproxR> = idx.iter().map(|&j| values_2p[j].clone()).collect();
                let res2 = combine(&r.coeffs, &xs2);
                if !res2.abs_le_pow10(confirm_exp) {
                    return Err(Error::Verification(format!(
                        "relation {:?} for value #{i} not confirmed at doubled precision (residual {})",
                        r.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        res2.to_decimal(20)
                    )));
                }
                if r.coeffs.last().unwrap().is_zero() {
                    return Err(Error::Verification(format!(
                        "relation among values kept as independent found while testing #{i}"
                    )));
                }
                r.confirmed = true;
                r.residual = res2;
                let mut full = vec![BigInt::zero(); values.len()];
                for (c, &j) in r.coeffs.iter().zip(&idx) {
                    full[j] = c.clone();
                }
                r.coeffs = full;
                relations.push(r);
            }
        }
    }
    Ok(RankEstimate {
        rank: basis.len(),
        basis,
        relations,
    })
}

/// `I(u) I(v) = I(u ⧢ v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShuffleIdentity {
    pub u: CurveWord,
    pub v: CurveWord,
    pub rhs: WordComb,
}

impl ShuffleIdentity {
    /// `I(u) I(v) - Σ c_w I(w)`.
    pub fn residual(&self, ctx: &Context) -> Result<ApproxR> {
        let wide = Context::with_guard(ctx.precision_digits(), ctx.guard_digits() + 10)?;
        let mut acc = &eval_curve_word(&self.u, &wide)? * &eval_curve_word(&self.v, &wide)?;
        for (w, c) in self.rhs.terms() {
            acc = &acc - &eval_curve_word(w, &wide)?.mul_rational(c);
        }
        Ok(acc)
    }
}

impl fmt::Display for ShuffleIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I({})·I({}) =", self.u, self.v)?;
        for (w, c) in self.rhs.terms() {
            write!(f, " + {c}·I({w})")?;
        }
        Ok(())
    }
}

/// The shuffle identities of weight `k`, one per unordered pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ShuffleRelations {
    pub identities: Vec<ShuffleIdentity>,
    /// Exact `Q`-rank of the identities, with each product `I(u)I(v)` a
    /// formal symbol.
    pub rank: usize,
}

pub fn shuffle_relations(curve: Curve, k: usize) -> Result<ShuffleRelations> {
    if k < 2 {
        return Err(Error::Invalid(
            "shuffle relations need weight at least 2".into(),
        ));
    }
    let mut identities = Vec::new();
    let by_weight: Vec<Vec<CurveWord>> = (0..k)
        .map(|j| {
            if j == 0 {
                Ok(Vec::new())
            } else {
                enumerate_admissible(curve, j)
            }
        })
        .collect::<Result<_>>()?;
    for j in 1..=k / 2 {
        for (a, u) in by_weight[j].iter().enumerate() {
            for (b, v) in by_weight[k - j].iter().enumerate() {
                if 2 * j == k && b < a {
                    continue;
                }
                identities.push(ShuffleIdentity {
                    u: u.clone(),
                    v: v.clone(),
                    rhs: shuffle(u, v)?,
                });
            }
        }
    }
    let rank = identity_rank(&identities);
    Ok(ShuffleRelations { identities, rank })
}

fn identity_rank(ids: &[ShuffleIdentity]) -> usize {
    let words: Vec<CurveWord> = ids
        .iter()
        .flat_map(|id| id.rhs.terms().keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut pairs: Vec<(CurveWord, CurveWord)> =
        ids.iter().map(|id| (id.u.clone(), id.v.clone())).collect();
    pairs.sort();
    pairs.dedup();
    // shuffle multiplicities are integers
    let rows: Vec<Vec<BigInt>> = ids
        .iter()
        .map(|id| {
            let mut row = vec![BigInt::zero(); pairs.len() + words.len()];
            row[pairs.binary_search(&(id.u.clone(), id.v.clone())).unwrap()] = BigInt::one();
            for (w, c) in id.rhs.terms() {
                row[pairs.len() + words.binary_search(w).unwrap()] = -c.to_integer();
            }
            row
        })
        .collect();
    bareiss_rank(rows)
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for cc in c + 1..cols {
                let v = (&m[rank][c] * &m[r][cc] - &m[r][c] * &m[rank][cc]) / &prev;
                m[r][cc] = v;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// `I(φ^k) - I(φ)^k / k!` with `φ = ω2` (g) or `ω4` (h).
pub fn phi_power_residual(curve: Curve, k: usize, ctx: &Context) -> Result<ApproxR> {
    let phi = parity_letter(curve);
    let wide = Context::with_guard(ctx.precision_digits(), ctx.guard_digits() + 10)?;
    let one = eval_curve_word(&CurveWord::new(curve, vec![phi])?, &wide)?;
    let kth = eval_curve_word(&CurveWord::new(curve, vec![phi; k])?, &wide)?;
    let fact: BigInt = (1..=k as u64).fold(BigInt::one(), |a, b| a * b);
    Ok(&kth - &one.pow(k as u32).div_int(fact))
}

/// Which dimension series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesId {
    Dg,
    Dh,
    Dg0,
    Dg1,
    Dh0,
    Dh1,
    MzvD,
    /// `A(t) = (1-t²) / ((1-t²)(1 - dim_R t) - r2 t² - (r1+r2) t³)`.
    Afr {
        r1: u32,
        r2: u32,
        dim_r: u32,
    },
    /// `A(t) / (1 - t)`.
    Hfr {
        r1: u32,
        r2: u32,
        dim_r: u32,
    },
}

impl FromStr for SeriesId {
    type Err = Error;

    fn from_str(s: &str) -> Result<SeriesId> {
        let fr = |body: &str| -> Result<(u32, u32, u32)> {
            let v: Vec<u32> = body
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Invalid(format!("bad series parameter {x:?}")))
                })
                .collect::<Result<_>>()?;
            match v.as_slice() {
                [a, b, c] => Ok((*a, *b, *c)),
                _ => Err(Error::Invalid("expected (r1,r2,dimR)".into())),
            }
        };
        let s = s.trim();
        Ok(match s {
            "D_g" => SeriesId::Dg,
            "D_h" => SeriesId::Dh,
            "D_g0" => SeriesId::Dg0,
            "D_g1" => SeriesId::Dg1,
            "D_h0" => SeriesId::Dh0,
            "D_h1" => SeriesId::Dh1,
            "mzv_d" => SeriesId::MzvD,
            _ => {
                let inner = |p: &str| s.strip_prefix(p).and_then(|r| r.strip_suffix(')'));
                if let Some(b) = inner("A_FR(") {
                    let (r1, r2, dim_r) = fr(b)?;
                    SeriesId::Afr { r1, r2, dim_r }
                } else if let Some(b) = inner("H_FR(") {
                    let (r1, r2, dim_r) = fr(b)?;
                    SeriesId::Hfr { r1, r2, dim_r }
                } else {
                    return Err(Error::Invalid(format!("unknown series id {s:?}")));
                }
            }
        })
    }
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Taylor coefficients of `num/den` up to `t^kmax`; `den[0] = 1`.
fn rational_series(num: &[i64], den: &[i64], kmax: usize) -> Vec<BigInt> {
    let mut c: Vec<BigInt> = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let mut v = BigInt::from(*num.get(k).unwrap_or(&0));
        for j in 1..den.len().min(k + 1) {
            v -= &c[k - j] * den[j];
        }
        c.push(v);
    }
    c
}

/// Coefficients `t^0..t^kmax` of a dimension series.
pub fn dim_series(which: SeriesId, kmax: usize) -> Vec<BigInt> {
    let dh_den = [1, -2, -3, 4, -1];
    let fr_den = |r1: u32, r2: u32, d: u32| {
        let mut den = poly_mul(&[1, 0, -1], &[1, -(d as i64)]);
        den.resize(4, 0);
        den[2] -= r2 as i64;
        den[3] -= (r1 + r2) as i64;
        den
    };
    match which {
        SeriesId::Dg => rational_series(&[1], &[1, -2], kmax),
        SeriesId::Dh => rational_series(&[1], &[1, -3, 1], kmax),
        SeriesId::Dg0 => rational_series(&[1, -1], &[1, -2], kmax),
        SeriesId::Dg1 => rational_series(&[0, 1], &[1, -2], kmax),
        SeriesId::Dh0 => rational_series(&[1, -1], &dh_den, kmax),
        SeriesId::Dh1 => rational_series(&[0, 2, -1], &dh_den, kmax),
        SeriesId::MzvD => rational_series(&[1], &[1, 0, -1, -1], kmax),
        SeriesId::Afr { r1, r2, dim_r } => {
            rational_series(&[1, 0, -1], &fr_den(r1, r2, dim_r), kmax)
        }
        SeriesId::Hfr { r1, r2, dim_r } => rational_series(
            &[1, 0, -1],
            &poly_mul(&fr_den(r1, r2, dim_r), &[1, -1]),
            kmax,
        ),
    }
}

/// One checked polylogarithm identity.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityResidual {
    pub name: String,
    pub k: usize,
    pub residual: ApproxC,
    pub pass: bool,
}

fn li(k: usize, z: &Cyc, ctx: &Context) -> Result<ApproxC> {
    polylog(k, z, ctx)
}

/// `B_k(x)` for rational `x`.
fn bernoulli_poly(k: usize, x: &Rat) -> Rat {
    let mut binom = BigInt::one();
    let mut s = Rat::zero();
    for j in 0..=k {
        let mut xp = Rat::one();
        for _ in 0..k - j {
            xp *= x;
        }
        s += Rat::from_integer(binom.clone()) * bernoulli(j) * xp;
        binom = binom * (k - j) / (j + 1);
    }
    s
}

/// `Li_k(e^{2πix}) + (-1)^k Li_k(e^{-2πix}) + (2πi)^k B_k(x)/k!`.
fn inversion(k: usize, level: Level, e: i64, ctx: &Context) -> Result<ApproxC> {
    let n = level.order() as i64;
    let bits = ctx.bits() + 16;
    let z = Cyc::root_of_unity(level, e);
    let zi = Cyc::root_of_unity(level, -e);
    let lhs = &li(k, &z, ctx)?
        + &(if k.is_multiple_of(2) {
            li(k, &zi, ctx)?
        } else {
            -&li(k, &zi, ctx)?
        });
    let x = rat(e.rem_euclid(n), n);
    let fact: BigInt = (1..=k as u64).fold(BigInt::one(), |a, b| a * b);
    let c = bernoulli_poly(k, &x) / Rat::from_integer(fact);
    let mag = constant(Constant::Pi, bits)
        .mul_int(2)
        .pow(k as u32)
        .mul_rational(&c);
    // i^k
    let term = match k % 4 {
        0 => ApproxC::from_real(&mag),
        1 => ApproxC::from_re_im(&ApproxR::zero(bits), &mag),
        2 => ApproxC::from_real(&(-&mag)),
        _ => ApproxC::from_re_im(&ApproxR::zero(bits), &(-&mag)),
    };
    Ok(&lhs + &term)
}

/// Distribution, inversion and character identities among `Li_k` at roots of
/// unity of level 4 or 6, for `2 <= k <= kmax`.  Each residual must vanish
/// to `10^-(P-10)`.
pub fn verify_distribution(
    kmax: usize,
    level: Level,
    ctx: &Context,
) -> Result<Vec<IdentityResidual>> {
    if kmax < 2 {
        return Err(Error::Invalid("kmax must be at least 2".into()));
    }
    let wide = Context::with_guard(ctx.precision_digits(), ctx.guard_digits() + 10)?;
    let tol = ctx.precision_digits() as i64 - 10;
    let root = |e: i64| Cyc::root_of_unity(level, e);
    let mut out = Vec::new();
    let mut push = |name: &str, k: usize, residual: ApproxC| {
        let pass = residual.abs_le_pow10(tol);
        out.push(IdentityResidual {
            name: name.to_string(),
            k,
            residual,
            pass,
        });
    };
    for k in 2..=kmax {
        let pk = |m: u64| BigInt::from(m).pow(k as u32 - 1);
        match level {
            Level::N4 => {
                // Li_k(z²) = 2^{k-1}(Li_k(z) + Li_k(-z)), z = ξ4
                let lhs = li(k, &root(2), &wide)?;
                let rhs = (&li(k, &root(1), &wide)? + &li(k, &root(3), &wide)?).mul_int(pk(2));
                push("Li_k(-1) = 2^(k-1) (Li_k(i) + Li_k(-i))", k, &lhs - &rhs);
                // Li_k(z²) at z = -1
                let lhs = li(k, &root(0), &wide)?;
                let rhs = (&li(k, &root(0), &wide)? + &li(k, &root(2), &wide)?).mul_int(pk(2));
                push("Li_k(1) = 2^(k-1) (Li_k(1) + Li_k(-1))", k, &lhs - &rhs);
                push("inversion at i", k, inversion(k, level, 1, &wide)?);
                push("inversion at -1", k, inversion(k, level, 2, &wide)?);
                // Re Li_k(i) = -2^{-k}(1 - 2^{1-k}) ζ(k)
                let z = zeta(k as u32, &wide)?;
                let c = -(rat(1, 1) - rat(2, 1) / Rat::from_integer(BigInt::one() << k))
                    / Rat::from_integer(BigInt::one() << k);
                let re = &li(k, &root(1), &wide)?.real() - &z.mul_rational(&c);
                push(
                    "Re Li_k(i) = -2^-k (1 - 2^(1-k)) zeta(k)",
                    k,
                    ApproxC::from_real(&re),
                );
            }
            Level::N6 => {
                // Li_k(z³) = 3^{k-1} Σ_{ω³=1} Li_k(zω), z = ξ6
                let lhs = li(k, &root(3), &wide)?;
                let rhs = (&(&li(k, &root(1), &wide)? + &li(k, &root(3), &wide)?)
                    + &li(k, &root(5), &wide)?)
                    .mul_int(pk(3));
                push(
                    "Li_k(-1) = 3^(k-1) (Li_k(xi6) + Li_k(-1) + Li_k(xi6^5))",
                    k,
                    &lhs - &rhs,
                );
                // Li_k(z²) = 2^{k-1}(Li_k(z) + Li_k(-z)), z = ξ6
                let lhs = li(k, &root(2), &wide)?;
                let rhs = (&li(k, &root(1), &wide)? + &li(k, &root(4), &wide)?).mul_int(pk(2));
                push(
                    "Li_k(xi3) = 2^(k-1) (Li_k(xi6) + Li_k(-xi6))",
                    k,
                    &lhs - &rhs,
                );
                push("inversion at xi6", k, inversion(k, level, 1, &wide)?);
                push("inversion at xi3", k, inversion(k, level, 2, &wide)?);
                // Li_k(ξ3) = ½(3^{1-k} - 1) ζ(k) + i (√3/2) L(k, χ_-3)
                let bits = wide.bits();
                let z = zeta(k as u32, &wide)?;
                let l = dirichlet_l_chi3(k as u32, &wide)?;
                let c = (Rat::new(BigInt::from(3), BigInt::from(3).pow(k as u32)) - rat_int(1))
                    * rat(1, 2);
                let expect = ApproxC::from_re_im(
                    &z.mul_rational(&c),
                    &(&l * &ApproxR::sqrt_int(3, bits)).div_int(2),
                );
                push(
                    "Li_k(xi3) = (3^(1-k) - 1)/2 zeta(k) + i sqrt3/2 L(k)",
                    k,
                    &li(k, &root(2), &wide)? - &expect,
                );
            }
        }
    }
    Ok(out)
}

/// Values `I_f(w)` for all admissible words of weight `k`, in enumeration
/// order, evaluated on a pool of threads.
pub fn evaluate_weight(curve: Curve, k: usize, ctx: &Context) -> Result<Vec<(CurveWord, ApproxR)>> {
    let words = enumerate_admissible(curve, k)?;
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(words.len().max(1));
    let chunk = words.len().div_ceil(threads.max(1)).max(1);
    let results: Vec<Result<Vec<ApproxR>>> = std::thread::scope(|s| {
        let handles: Vec<_> = words
            .chunks(chunk)
            .map(|c| {
                s.spawn(move || {
                    c.iter()
                        .map(|w| eval_curve_word(w, ctx))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation thread panicked"))
            .collect()
    });
    let mut values = Vec::with_capacity(words.len());
    for r in results {
        values.extend(r?);
    }
    Ok(words.into_iter().zip(values).collect())
}

/// Rows of the reference tables, `k = 0..=5`.
pub struct ReferenceRows {
    pub count_b: [u64; 6],
    pub d: [u64; 6],
    pub d0: [u64; 6],
    pub d1: [u64; 6],
    pub rank: [u64; 6],
    pub rank0: [u64; 6],
    pub rank1: [u64; 6],
}

pub fn reference_rows(curve: Curve) -> ReferenceRows {
    match curve {
        Curve::G => ReferenceRows {
            count_b: [1, 1, 6, 24, 96, 384],
            d: [1, 2, 4, 8, 16, 32],
            d0: [1, 1, 2, 4, 8, 16],
            d1: [0, 1, 2, 4, 8, 16],
            rank: [1, 1, 3, 7, 15, 31],
            rank0: [1, 0, 1, 3, 7, 15],
            rank1: [0, 1, 2, 4, 8, 16],
        },
        Curve::H => ReferenceRows {
            count_b: [1, 1, 9, 45, 225, 1125],
            d: [1, 3, 8, 21, 55, 144],
            d0: [1, 1, 5, 9, 30, 68],
            d1: [0, 2, 3, 12, 25, 76],
            rank: [1, 1, 5, 15, 46, 105],
            rank0: [1, 0, 3, 8, 25, 53],
            rank1: [0, 1, 2, 7, 21, 52],
        },
    }
}

/// One weight of a dimension table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimRow {
    pub k: usize,
    /// `#B^{(k)}`; the empty word for `k = 0`.
    pub count_b: usize,
    pub d: u64,
    pub d0: u64,
    pub d1: u64,
    pub rank: usize,
    pub rank_parity0: usize,
    pub rank_parity1: usize,
    pub relations_found: usize,
    /// Agreement of the three rank columns with the reference rows.
    pub matches_reference: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimTable {
    pub curve: Curve,
    pub precision: u32,
    pub rows: Vec<DimRow>,
}

impl DimTable {
    /// Tables built from PSLQ are experimental.
    pub fn status(&self) -> &'static str {
        "experimental"
    }
}

/// Largest weight computed by default: 4 for g, 3 for h.
pub fn default_max_weight(curve: Curve) -> usize {
    match curve {
        Curve::G => 4,
        Curve::H => 3,
    }
}

/// Rebuild the dimension table for weights `0..=kmax`.
pub fn reproduce_dim_table(
    curve: Curve,
    kmax: usize,
    ctx: &Context,
    params: &PslqParams,
    allow_large: bool,
) -> Result<DimTable> {
    if kmax > default_max_weight(curve) && !allow_large {
        return Err(Error::Invalid(format!(
            "weight {kmax} exceeds the default cap {} for curve {curve}",
            default_max_weight(curve)
        )));
    }
    let as_u64 = |v: &BigInt| v.to_u64().unwrap_or(u64::MAX);
    let (sd, s0, s1) = match curve {
        Curve::G => (SeriesId::Dg, SeriesId::Dg0, SeriesId::Dg1),
        Curve::H => (SeriesId::Dh, SeriesId::Dh0, SeriesId::Dh1),
    };
    let (d, d0, d1) = (
        dim_series(sd, kmax),
        dim_series(s0, kmax),
        dim_series(s1, kmax),
    );
    let reference = reference_rows(curve);
    let ctx2 = ctx.doubled();
    let mut rows = Vec::new();
    for k in 0..=kmax {
        let (count_b, rank, r0, r1, found) = if k == 0 {
            (1, 1, 1, 0, 0)
        } else {
            let lo = evaluate_weight(curve, k, ctx)?;
            let hi = evaluate_weight(curve, k, &ctx2)?;
            let parity: Vec<u8> = lo
                .iter()
                .map(|(w, _)| parity_component(w))
                .collect::<Result<_>>()?;
            let vlo: Vec<ApproxR> = lo.iter().map(|(_, v)| v.clone()).collect();
            let vhi: Vec<ApproxR> = hi.iter().map(|(_, v)| v.clone()).collect();
            let all = rank_estimate(&vlo, &vhi, ctx, params)?;
            let sub = |p: u8| -> Result<usize> {
                let pick: Vec<usize> = (0..vlo.len()).filter(|&i| parity[i] == p).collect();
                if pick.is_empty() {
                    return Ok(0);
                }
                let a: Vec<ApproxR> = pick.iter().map(|&i| vlo[i].clone()).collect();
                let b: Vec<ApproxR> = pick.iter().map(|&i| vhi[i].clone()).collect();
                Ok(rank_estimate(&a, &b, ctx, params)?.rank)
            };
            (vlo.len(), all.rank, sub(0)?, sub(1)?, all.relations.len())
        };
        let matches_reference = k < 6
            && rank as u64 == reference.rank[k]
            && r0 as u64 == reference.rank0[k]
            && r1 as u64 == reference.rank1[k];
        rows.push(DimRow {
            k,
            count_b,
            d: as_u64(&d[k]),
            d0: as_u64(&d0[k]),
            d1: as_u64(&d1[k]),
            rank,
            rank_parity0: r0,
            rank_parity1: r1,
            relations_found: found,
            matches_reference,
        });
    }
    Ok(DimTable {
        curve,
        precision: ctx.precision_digits(),
        rows,
    })
}
