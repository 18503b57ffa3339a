//! Low-precision quadrature of iterated integrals along straight and arc
//! paths.  Used as an independent check of the series evaluator.
//!
//! Each segment is split into panels graded dyadically toward both ends (down
//! to `2^-60` of the segment), so logarithmic endpoint singularities are
//! resolved without an inset.  On each panel the inner integrals are
//! propagated with a Gauss-Legendre indefinite-integration matrix.  The error
//! estimate is the difference between two quadrature orders; it is not a
//! proven bound.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::descent::{pullback_word, P1Letter};
use crate::eval::polylog;
use crate::exactfield::{rat_int, Cyc};
use crate::numkernel::Context;
use crate::words::{is_admissible, CurveWord};
use crate::{Error, Result};

const GRADE: i32 = 60;
const HIGH: usize = 24;
const LOW: usize = 16;

/// One piece of a path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    /// `p + t (q - p)`.
    Line { p: Complex64, q: Complex64 },
    /// `center + r e^{i(θ0 + t (θ1 - θ0))}`.
    Arc {
        center: Complex64,
        r: f64,
        theta0: f64,
        theta1: f64,
    },
}

impl Segment {
    fn point(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { p, q } => p + (q - p) * t,
            Segment::Arc {
                center,
                r,
                theta0,
                theta1,
            } => center + Complex64::from_polar(r, theta0 + t * (theta1 - theta0)),
        }
    }

    fn derivative(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { p, q } => q - p,
            Segment::Arc {
                center,
                theta0,
                theta1,
                ..
            } => (self.point(t) - center) * Complex64::new(0.0, theta1 - theta0),
        }
    }

    /// Point at parameter `s`, measured from the end when `from_end`.  Near
    /// the end this keeps full relative accuracy in `1 - t`.
    fn point_at(&self, s: f64, from_end: bool) -> Complex64 {
        if !from_end {
            return self.point(s);
        }
        match *self {
            Segment::Line { p, q } => q + (p - q) * s,
            Segment::Arc {
                center,
                r,
                theta0,
                theta1,
            } => center + Complex64::from_polar(r, theta1 - s * (theta1 - theta0)),
        }
    }

    /// `point_at(s, from_end) - a`, computed relative to the nearer endpoint so
    /// that it does not cancel when `a` is that endpoint.
    fn offset(&self, s: f64, from_end: bool, a: Complex64) -> Complex64 {
        match *self {
            Segment::Line { p, q } if from_end => (q - a) + (p - q) * s,
            Segment::Line { p, q } => (p - a) + (q - p) * s,
            Segment::Arc {
                center,
                r,
                theta0,
                theta1,
            } => {
                let (anchor, delta) = if from_end {
                    (theta1, s * (theta0 - theta1))
                } else {
                    (theta0, s * (theta1 - theta0))
                };
                // e^{iδ} - 1 = 2i sin(δ/2) e^{iδ/2}
                let step = Complex64::new(0.0, 2.0 * (delta / 2.0).sin())
                    * Complex64::from_polar(1.0, delta / 2.0);
                (center + Complex64::from_polar(r, anchor) - a)
                    + Complex64::from_polar(r, anchor) * step
            }
        }
    }

    /// `d point / ds` for the parametrization of `point_at`.
    fn derivative_at(&self, s: f64, from_end: bool) -> Complex64 {
        match *self {
            Segment::Line { p, q } if from_end => p - q,
            Segment::Arc {
                center,
                theta0,
                theta1,
                ..
            } if from_end => {
                (self.point_at(s, true) - center) * Complex64::new(0.0, theta0 - theta1)
            }
            _ => self.derivative(s),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { p, q } => Segment::Line { p: q, q: p },
            Segment::Arc {
                center,
                r,
                theta0,
                theta1,
            } => Segment::Arc {
                center,
                r,
                theta0: theta1,
                theta1: theta0,
            },
        }
    }

    /// Distance from `a` to the segment.
    fn distance(&self, a: Complex64) -> f64 {
        match *self {
            Segment::Line { p, q } => {
                let d = q - p;
                let t = (((a - p) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                (self.point(t) - a).norm()
            }
            Segment::Arc {
                center,
                r,
                theta0,
                theta1,
            } => {
                let rel = a - center;
                let (lo, hi) = if theta0 <= theta1 {
                    (theta0, theta1)
                } else {
                    (theta1, theta0)
                };
                let mut best = (self.start() - a).norm().min((self.end() - a).norm());
                if rel.norm() > 0.0 {
                    let mut phi = rel.arg();
                    while phi < lo {
                        phi += 2.0 * PI;
                    }
                    if phi <= hi {
                        best = best.min((rel.norm() - r).abs());
                    }
                } else {
                    best = best.min(r);
                }
                best
            }
        }
    }
}

/// A piecewise path with matching endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    segments: Vec<Segment>,
}

impl PathSpec {
    pub fn new(segments: Vec<Segment>) -> Result<PathSpec> {
        if segments.is_empty() {
            return Err(Error::Invalid("a path needs at least one segment".into()));
        }
        for w in segments.windows(2) {
            if (w[0].end() - w[1].start()).norm() > 1e-12 {
                return Err(Error::Invalid("consecutive segments do not meet".into()));
            }
        }
        Ok(PathSpec { segments })
    }

    /// The straight path from `p` to `q`.
    pub fn chord(p: Complex64, q: Complex64) -> PathSpec {
        PathSpec {
            segments: vec![Segment::Line { p, q }],
        }
    }

    /// The arc `C_p(q1, q2)` around `p`, turning by `arg((q2-p)/(q1-p))`.
    pub fn arc(p: Complex64, q1: Complex64, q2: Complex64) -> Result<PathSpec> {
        let r = (q1 - p).norm();
        if r == 0.0 || ((q2 - p).norm() - r).abs() > 1e-12 * r.max(1.0) {
            return Err(Error::Invalid(
                "arc endpoints must be equidistant from the center".into(),
            ));
        }
        let theta0 = (q1 - p).arg();
        let theta1 = theta0 + ((q2 - p) / (q1 - p)).arg();
        Ok(PathSpec {
            segments: vec![Segment::Arc {
                center: p,
                r,
                theta0,
                theta1,
            }],
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> Complex64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Complex64 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn reversed(&self) -> PathSpec {
        PathSpec {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    pub fn then(&self, o: &PathSpec) -> Result<PathSpec> {
        let mut s = self.segments.clone();
        s.extend(o.segments.iter().copied());
        PathSpec::new(s)
    }
}

/// An oracle value with its order-difference error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub err: f64,
}

/// Gauss-Legendre rule on `[-1, 1]` with its indefinite-integration matrix
/// `s[i][j]`, so that `∫_{-1}^{x_i} p = Σ_j s[i][j] p(x_j)` for `deg p < n`.
struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
    s: Vec<Vec<f64>>,
}

/// `P_0..P_{n}` at `x`.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0; n + 1];
    if n >= 1 {
        p[1] = x;
    }
    for k in 2..=n {
        p[k] = ((2 * k - 1) as f64 * x * p[k - 1] - (k - 1) as f64 * p[k - 2]) / k as f64;
    }
    p
}

impl Rule {
    fn new(n: usize) -> Rule {
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let p = legendre_all(n, z);
                let dp = n as f64 * (z * p[n] - p[n - 1]) / (z * z - 1.0);
                let dz = p[n] / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let p = legendre_all(n, z);
            let dp = n as f64 * (z * p[n] - p[n - 1]) / (z * z - 1.0);
            x[n - 1 - i] = z;
            w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        let pj: Vec<Vec<f64>> = x.iter().map(|&t| legendre_all(n, t)).collect();
        let mut s = vec![vec![0.0; n]; n];
        for i in 0..n {
            let p = &pj[i];
            // ∫_{-1}^{x} P_0 = x + 1, ∫_{-1}^{x} P_m = (P_{m+1} - P_{m-1}) / (2m + 1)
            let mut q = vec![0.0; n];
            q[0] = x[i] + 1.0;
            for m in 1..n {
                q[m] = (p[m + 1] - p[m - 1]) / (2 * m + 1) as f64;
            }
            for j in 0..n {
                s[i][j] = (0..n)
                    .map(|m| (2 * m + 1) as f64 / 2.0 * w[j] * pj[j][m] * q[m])
                    .sum();
            }
        }
        Rule { x, w, s }
    }
}

/// Panels `(a, b, from_end)` in path order, graded toward both ends.  On the
/// second half the parameter is the distance from the end, decreasing.
fn panels() -> Vec<(f64, f64, bool)> {
    let mut b = vec![0.0];
    for e in (2..=GRADE).rev() {
        b.push(2f64.powi(-e));
    }
    b.extend([0.375, 0.5]);
    let mut out: Vec<(f64, f64, bool)> = b.windows(2).map(|w| (w[0], w[1], false)).collect();
    out.extend(b.windows(2).rev().map(|w| (w[1], w[0], true)));
    out
}

/// Iterated integral of `dz/(z - a_j)` along `path` with a given rule.
fn iterated_with(path: &PathSpec, poles: &[Complex64], rule: &Rule) -> Complex64 {
    let n = rule.x.len();
    // running values of the partial iterated integrals at the current point
    let mut acc = vec![Complex64::new(0.0, 0.0); poles.len() + 1];
    acc[0] = Complex64::new(1.0, 0.0);
    for seg in &path.segments {
        for &(a, b, end) in &panels() {
            let h = (b - a) / 2.0;
            let mut vals: Vec<Vec<Complex64>> = Vec::with_capacity(poles.len() + 1);
            vals.push(vec![Complex64::new(1.0, 0.0); n]);
            let f: Vec<Vec<Complex64>> = poles
                .iter()
                .map(|&pole| {
                    rule.x
                        .iter()
                        .map(|&x| {
                            let t = a + h * (x + 1.0);
                            seg.derivative_at(t, end) / seg.offset(t, end, pole) * h
                        })
                        .collect()
                })
                .collect();
            let mut next = acc.clone();
            for (l, fl) in f.iter().enumerate() {
                let g: Vec<Complex64> = (0..n).map(|j| vals[l][j] * fl[j]).collect();
                let v: Vec<Complex64> = (0..n)
                    .map(|i| acc[l + 1] + (0..n).map(|j| g[j] * rule.s[i][j]).sum::<Complex64>())
                    .collect();
                next[l + 1] = acc[l + 1] + (0..n).map(|j| g[j] * rule.w[j]).sum::<Complex64>();
                vals.push(v);
            }
            acc = next;
        }
    }
    acc[poles.len()]
}

fn check_poles(path: &PathSpec, poles: &[Complex64]) -> Result<()> {
    if poles.len() > 4 {
        return Err(Error::Invalid(
            "the quadrature oracle handles weight at most 4".into(),
        ));
    }
    for &a in poles {
        for seg in &path.segments {
            let endpoint = (seg.start() - a).norm() < 1e-14 || (seg.end() - a).norm() < 1e-14;
            if !endpoint && seg.distance(a) < 1e-9 {
                return Err(Error::Invalid(format!("pole {a} lies on the path")));
            }
        }
    }
    if let Some(&first) = poles.first() {
        if (path.start() - first).norm() < 1e-14 {
            return Err(Error::Invalid(
                "first pole at the start point: the integral diverges".into(),
            ));
        }
    }
    if let Some(&last) = poles.last() {
        if (path.end() - last).norm() < 1e-14 {
            return Err(Error::Invalid(
                "last pole at the end point: the integral diverges".into(),
            ));
        }
    }
    Ok(())
}

/// `I_γ(p; a_1, ..., a_k; q)` for the forms `dz/(z - a_j)`.
pub fn quad_iterated(path: &PathSpec, poles: &[Complex64]) -> Result<QuadResult> {
    check_poles(path, poles)?;
    let hi = iterated_with(path, poles, &Rule::new(HIGH));
    let lo = iterated_with(path, poles, &Rule::new(LOW));
    Ok(QuadResult {
        value: hi,
        err: (hi - lo).norm(),
    })
}

/// `quad_iterated` on `P^1` letters.
pub fn quad_p1(path: &PathSpec, letters: &[P1Letter]) -> Result<QuadResult> {
    let poles: Vec<Complex64> = letters.iter().map(|l| l.value().to_c64()).collect();
    quad_iterated(path, &poles)
}

/// `∫_γ f(z) dz` for a function with at most integrable endpoint singularities.
pub fn quad_path(path: &PathSpec, f: impl Fn(Complex64) -> Complex64) -> QuadResult {
    let run = |rule: &Rule| {
        let mut s = Complex64::new(0.0, 0.0);
        for seg in &path.segments {
            for &(a, b, end) in &panels() {
                let h = (b - a) / 2.0;
                for (x, w) in rule.x.iter().zip(&rule.w) {
                    let t = a + h * (x + 1.0);
                    s += f(seg.point_at(t, end)) * seg.derivative_at(t, end) * (h * w);
                }
            }
        }
        s
    };
    let hi = run(&Rule::new(HIGH));
    let lo = run(&Rule::new(LOW));
    QuadResult {
        value: hi,
        err: (hi - lo).norm(),
    }
}

/// `I_f(w)` by quadrature of its pullback along `[0, 1]`.
pub fn quad_curve_word(w: &CurveWord) -> Result<QuadResult> {
    if !is_admissible(w) {
        return Err(Error::Invalid(format!(
            "word {w} is not admissible for curve {}",
            w.curve()
        )));
    }
    let path = PathSpec::chord(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (word, c) in pullback_word(w)?.terms() {
        let q = quad_p1(&path, word)?;
        let c = c.to_c64();
        value += c * q.value;
        err += c.norm() * q.err;
    }
    Ok(QuadResult { value, err })
}

/// Residuals of the two arc identities on `γ = C_0(1, z0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcLemma {
    /// `|∫_γ log(1-z)/z dz - (-Li_2(z0) + (π i/2) log z0 + π²/6)|`.
    pub residual1: f64,
    /// `|∫_γ log(1+z)/z dz - (-Li_2(-z0) - π²/12)|`.
    pub residual2: f64,
    /// Residual of the first identity without the `(π i/2) log z0` term.
    pub residual1_without_log: f64,
    /// Quadrature error estimate.
    pub quad_err: f64,
}

/// Checks the two arc identities.  `log(1±z)` is `∓∫ dz1/(1∓z1)` along the
/// chord from 0 to `z`, i.e. the principal branch on the arc.
pub fn verify_arc_lemma(z0: &Cyc, ctx: &Context) -> Result<ArcLemma> {
    if z0.norm() != rat_int(1) {
        return Err(Error::Invalid(format!("{z0} is not on the unit circle")));
    }
    let zc = z0.to_c64();
    if zc.re < -1e-15 {
        return Err(Error::Invalid(format!(
            "arg({z0}) lies outside [-π/2, π/2]"
        )));
    }
    let li2 = |z: &Cyc| -> Result<Complex64> { Ok(polylog(2, z, ctx)?.to_c64()) };
    let i = Complex64::new(0.0, 1.0);
    let log_z0 = i * zc.arg();
    let base1 = -li2(z0)? + PI * PI / 6.0;
    let rhs1 = base1 + i * PI / 2.0 * log_z0;
    let rhs2 = -li2(&z0.scale(&rat_int(-1)))? - PI * PI / 12.0;
    let (lhs1, lhs2, quad_err) = if z0.is_one() {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0)
    } else {
        let gamma = PathSpec::arc(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), zc)?;
        let a = quad_path(&gamma, |z| (1.0 - z).ln() / z);
        let b = quad_path(&gamma, |z| (1.0 + z).ln() / z);
        (a.value, b.value, a.err.max(b.err))
    };
    Ok(ArcLemma {
        residual1: (lhs1 - rhs1).norm(),
        residual2: (lhs2 - rhs2).norm(),
        residual1_without_log: (lhs1 - base1).norm(),
        quad_err,
    })
}
