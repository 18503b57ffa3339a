//! Pullback of curve words to `P^1` words with cyclotomic coefficients,
//! the Galois action on them, and parity bookkeeping.

use std::collections::BTreeMap;
use std::fmt;

use crate::exactfield::{parse_rat, rat, s_unit_check, tilde_i, Cyc, Level, Rat};
use crate::words::{is_admissible, shuffle_seq, CurveLetter, CurveWord};
use crate::{Curve, Error, Result};

/// A point of `P^1` given exactly.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct P1Letter(Cyc);

impl P1Letter {
    pub fn new(c: Cyc) -> P1Letter {
        P1Letter(c)
    }

    pub fn zero(level: Level) -> P1Letter {
        P1Letter(Cyc::zero(level))
    }

    pub fn one(level: Level) -> P1Letter {
        P1Letter(Cyc::one(level))
    }

    pub fn value(&self) -> &Cyc {
        &self.0
    }

    pub fn level(&self) -> Level {
        self.0.level()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `1 - a`.
    pub fn flip(&self) -> P1Letter {
        P1Letter(&Cyc::one(self.level()) - &self.0)
    }

    pub fn conj(&self) -> P1Letter {
        P1Letter(self.0.conj())
    }

    fn named(level: Level) -> Vec<(&'static str, Cyc)> {
        match level {
            Level::N4 => vec![("i", Cyc::xi(Level::N4)), ("-i", -&Cyc::xi(Level::N4))],
            Level::N6 => vec![
                ("z3", Cyc::root_of_unity(Level::N6, 2)),
                ("z3c", Cyc::root_of_unity(Level::N6, 4)),
            ],
        }
    }

    /// Parse a letter name (`0`, `1`, `-2`, `i`, `-i`, `z3`, `z3c`) or a
    /// canonical cyclotomic literal.
    pub fn parse(s: &str, level: Level) -> Result<P1Letter> {
        let s = s.trim();
        for (name, c) in P1Letter::named(level) {
            if s == name {
                return Ok(P1Letter(c));
            }
        }
        if s.contains('z') {
            let c: Cyc = s.parse()?;
            if c.level() != level {
                return Err(Error::Invalid(format!("letter {s:?} has the wrong level")));
            }
            return Ok(P1Letter(c));
        }
        Ok(P1Letter(Cyc::from_rat(level, parse_rat(s)?)))
    }
}

impl fmt::Display for P1Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_rational() {
            return write!(f, "{}", self.0.a());
        }
        for (name, c) in P1Letter::named(self.level()) {
            if c == self.0 {
                return f.write_str(name);
            }
        }
        write!(f, "{}", self.0)
    }
}

pub type P1Word = Vec<P1Letter>;

/// A `Cyc`-linear combination of `P^1` words, all at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Comb {
    level: Level,
    terms: BTreeMap<P1Word, Cyc>,
}

impl P1Comb {
    pub fn zero(level: Level) -> P1Comb {
        P1Comb {
            level,
            terms: BTreeMap::new(),
        }
    }

    /// The empty word with coefficient one.
    pub fn unit(level: Level) -> P1Comb {
        let mut c = P1Comb::zero(level);
        c.add_term(Vec::new(), Cyc::one(level));
        c
    }

    pub fn single(word: P1Word, coeff: Cyc) -> P1Comb {
        let mut c = P1Comb::zero(coeff.level());
        c.add_term(word, coeff);
        c
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn terms(&self) -> &BTreeMap<P1Word, Cyc> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: P1Word, coeff: Cyc) {
        assert_eq!(coeff.level(), self.level, "level mismatch");
        let e = self
            .terms
            .entry(word.clone())
            .or_insert_with(|| Cyc::zero(self.level));
        *e = &*e + &coeff;
        if e.is_zero() {
            self.terms.remove(&word);
        }
    }

    pub fn add(&self, o: &P1Comb) -> P1Comb {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Cyc) -> P1Comb {
        let mut out = P1Comb::zero(self.level);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    /// Word concatenation, extended bilinearly.
    pub fn concat(&self, o: &P1Comb) -> P1Comb {
        let mut out = P1Comb::zero(self.level);
        for (u, cu) in &self.terms {
            for (v, cv) in &o.terms {
                let mut w = u.clone();
                w.extend(v.iter().cloned());
                out.add_term(w, cu * cv);
            }
        }
        out
    }

    /// Shuffle product, extended bilinearly.
    pub fn shuffle(&self, o: &P1Comb) -> P1Comb {
        let mut out = P1Comb::zero(self.level);
        for (u, cu) in &self.terms {
            for (v, cv) in &o.terms {
                let c = cu * cv;
                for (w, m) in shuffle_seq(u, v) {
                    out.add_term(w, c.scale(&Rat::from_integer((m as i64).into())));
                }
            }
        }
        out
    }
}

impl fmt::Display for P1Comb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let ls: Vec<String> = w.iter().map(|l| l.to_string()).collect();
            write!(f, "({})*I({})", c, ls.join(","))?;
        }
        Ok(())
    }
}

fn letter(c: Cyc) -> P1Letter {
    P1Letter(c)
}

/// The substitution θ on one curve letter.
pub fn theta(l: CurveLetter) -> P1Comb {
    let curve = l.curve();
    let level = curve.level();
    let int = |n: i64| Cyc::int(level, n);
    let e0 = letter(Cyc::zero(level));
    let e1 = letter(Cyc::one(level));
    let mut out = P1Comb::zero(level);
    match curve {
        Curve::G => {
            let xi = Cyc::xi(level);
            let xinv = -&xi;
            let ei = letter(xi.clone());
            let emi = letter(xinv.clone());
            match l.index() {
                0 => {
                    out.add_term(vec![e0], int(1));
                    out.add_term(vec![ei], int(-1));
                    out.add_term(vec![emi], int(-1));
                }
                1 => {
                    out.add_term(vec![e1], int(-2));
                    out.add_term(vec![ei], int(1));
                    out.add_term(vec![emi], int(1));
                }
                2 => {
                    out.add_term(vec![ei], xinv.clone());
                    out.add_term(vec![emi], -&xinv);
                }
                3 => out.add_term(vec![e0], int(1)),
                _ => unreachable!(),
            }
        }
        Curve::H => {
            let z3 = letter(Cyc::root_of_unity(level, 2));
            let z3c = letter(Cyc::root_of_unity(level, 4));
            let em2 = letter(int(-2));
            match l.index() {
                0 => {
                    out.add_term(vec![e0], int(1));
                    out.add_term(vec![em2], int(1));
                    out.add_term(vec![z3], int(-1));
                    out.add_term(vec![z3c], int(-1));
                }
                1 => {
                    out.add_term(vec![e1], int(-1));
                    out.add_term(vec![z3], int(1));
                    out.add_term(vec![z3c], int(1));
                }
                4 => {
                    let s = Cyc::sqrt_minus3().inv().expect("nonzero");
                    out.add_term(vec![z3], s.clone());
                    out.add_term(vec![z3c], -&s);
                }
                5 => {
                    let half = Cyc::from_rat(level, rat(1, 2));
                    out.add_term(vec![e0], half.clone());
                    out.add_term(vec![em2], -&half);
                }
                6 => out.add_term(vec![e1], int(-1)),
                _ => unreachable!(),
            }
        }
    }
    out
}

/// Expand `θ(η1) ⋯ θ(ηk)`.
pub fn pullback_word(w: &CurveWord) -> Result<P1Comb> {
    if !is_admissible(w) {
        return Err(Error::Invalid(format!(
            "word {w} is not admissible for curve {}",
            w.curve()
        )));
    }
    let out = pullback_unchecked(w);
    for word in out.terms.keys() {
        let bad_first = word.first().is_some_and(|l| l.is_zero());
        let bad_last = word.last().is_some_and(|l| l.is_one());
        if bad_first || bad_last {
            return Err(Error::Verification(format!(
                "pullback of {w} produced a divergent term"
            )));
        }
    }
    Ok(out)
}

/// Letter-wise substitution without admissibility checks.
pub fn pullback_unchecked(w: &CurveWord) -> P1Comb {
    let level = w.curve().level();
    w.letters()
        .fold(P1Comb::unit(level), |acc, l| acc.concat(&theta(l)))
}

/// The nontrivial Galois automorphism on letters and coefficients.
pub fn galois_sigma(x: &P1Comb) -> P1Comb {
    let mut out = P1Comb::zero(x.level);
    for (w, c) in &x.terms {
        out.add_term(w.iter().map(P1Letter::conj).collect(), c.conj());
    }
    out
}

pub fn is_invariant(x: &P1Comb) -> bool {
    galois_sigma(x) == *x
}

/// Parity of the number of ω2 (g) or ω4 (h) letters, after checking that
/// every pullback coefficient lies on the matching line `Q·ξ4^-n` or
/// `Q·(√-3)^-n`.
pub fn parity_component(w: &CurveWord) -> Result<u8> {
    let pb = pullback_word(w)?;
    let n = w.parity_count() as i64;
    let gen = match w.curve() {
        Curve::G => Cyc::xi(Level::N4).pow(-n)?,
        Curve::H => Cyc::sqrt_minus3().pow(-n)?,
    };
    for c in pb.terms.values() {
        if !c.is_rational_multiple_of(&gen) {
            return Err(Error::Verification(format!(
                "coefficient {c} of the pullback of {w} is off the line spanned by {gen}"
            )));
        }
    }
    Ok((n % 2) as u8)
}

/// `I(0; ζ, 0^{k-1}; 1) - (-1)^k I(0; ζ^-1, 0^{k-1}; 1)` with `ζ = ξ4`
/// (g) or `ξ3` (h).
pub fn basis_element(k: usize, curve: Curve) -> P1Comb {
    let level = curve.level();
    let zeta = match curve {
        Curve::G => Cyc::xi(level),
        Curve::H => Cyc::root_of_unity(level, 2),
    };
    let zinv = zeta.inv().expect("root of unity");
    let tail = vec![P1Letter::zero(level); k.saturating_sub(1)];
    let mut a = vec![P1Letter(zeta)];
    a.extend(tail.iter().cloned());
    let mut b = vec![P1Letter(zinv)];
    b.extend(tail);
    let mut out = P1Comb::zero(level);
    out.add_term(a, Cyc::one(level));
    out.add_term(b, Cyc::int(level, if k.is_multiple_of(2) { -1 } else { 1 }));
    out
}

/// Sign `s` with `σ(u_k) = s·u_k`.
pub fn basis_sign(k: usize, curve: Curve) -> Result<i32> {
    if k < 1 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    let u = basis_element(k, curve);
    let s = galois_sigma(&u);
    if s == u {
        Ok(1)
    } else if s == u.scale(&Cyc::int(curve.level(), -1)) {
        Ok(-1)
    } else {
        Err(Error::Verification(format!(
            "σ does not act by a sign on the weight {k} basis element"
        )))
    }
}

/// The `P^1` letter set of a curve together with the endpoints 0 and 1.
pub fn letter_universe(curve: Curve) -> Vec<Cyc> {
    let level = curve.level();
    let mut v = vec![Cyc::zero(level), Cyc::one(level)];
    match curve {
        Curve::G => {
            v.push(Cyc::xi(level));
            v.push(-&Cyc::xi(level));
        }
        Curve::H => {
            v.push(Cyc::int(level, -2));
            v.push(Cyc::root_of_unity(level, 2));
            v.push(Cyc::root_of_unity(level, 4));
        }
    }
    v
}

/// Checks `Ĩ(a, b, c)` is an S-unit for every triple from the letter set;
/// returns the number of triples checked.
pub fn check_s_unit_hypothesis(curve: Curve) -> Result<usize> {
    let u = letter_universe(curve);
    let mut n = 0;
    for a in &u {
        for b in &u {
            for c in &u {
                let t = tilde_i(a, b, c)?;
                if !s_unit_check(&t, curve)? {
                    return Err(Error::Verification(format!(
                        "Ĩ({a}, {b}, {c}) = {t} is not an S-unit"
                    )));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}
