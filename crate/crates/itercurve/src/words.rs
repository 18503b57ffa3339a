//! Curve alphabets, admissible words and the shuffle product.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::exactfield::Rat;
use crate::{Curve, Error, Result};

/// Letter indices of each curve's alphabet.
pub fn alphabet(curve: Curve) -> &'static [u8] {
    match curve {
        Curve::G => &[0, 1, 2, 3],
        Curve::H => &[0, 1, 4, 5, 6],
    }
}

/// Letters barred from the first and the last position.
fn forbidden(curve: Curve) -> (&'static [u8], &'static [u8]) {
    match curve {
        Curve::G => (&[0, 3], &[1]),
        Curve::H => (&[0, 5], &[1, 6]),
    }
}

/// The letter whose powers carry the parity grading: ω2 for g, ω4 for h.
pub fn parity_letter(curve: Curve) -> u8 {
    match curve {
        Curve::G => 2,
        Curve::H => 4,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveLetter {
    curve: Curve,
    index: u8,
}

impl CurveLetter {
    pub fn new(curve: Curve, index: u8) -> Result<CurveLetter> {
        if alphabet(curve).contains(&index) {
            Ok(CurveLetter { curve, index })
        } else {
            Err(Error::Invalid(format!(
                "ω{index} is not a letter of curve {curve}"
            )))
        }
    }

    pub fn curve(&self) -> Curve {
        self.curve
    }

    pub fn index(&self) -> u8 {
        self.index
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveWord {
    curve: Curve,
    letters: Vec<u8>,
}

impl CurveWord {
    pub fn new(curve: Curve, letters: Vec<u8>) -> Result<CurveWord> {
        for &l in &letters {
            CurveLetter::new(curve, l)?;
        }
        Ok(CurveWord { curve, letters })
    }

    pub fn empty(curve: Curve) -> CurveWord {
        CurveWord {
            curve,
            letters: Vec::new(),
        }
    }

    pub fn curve(&self) -> Curve {
        self.curve
    }

    pub fn indices(&self) -> &[u8] {
        &self.letters
    }

    pub fn letters(&self) -> impl Iterator<Item = CurveLetter> + '_ {
        self.letters.iter().map(move |&index| CurveLetter {
            curve: self.curve,
            index,
        })
    }

    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn concat(&self, o: &CurveWord) -> Result<CurveWord> {
        if self.curve != o.curve {
            return Err(Error::Invalid("curve mismatch".into()));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&o.letters);
        Ok(CurveWord {
            curve: self.curve,
            letters,
        })
    }

    /// Number of ω2 (g) or ω4 (h) letters.
    pub fn parity_count(&self) -> usize {
        let p = parity_letter(self.curve);
        self.letters.iter().filter(|&&l| l == p).count()
    }
}

/// Canonical printing: comma-separated indices.
impl fmt::Display for CurveWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

pub fn parse_word(text: &str, curve: Curve) -> Result<CurveWord> {
    let mut letters = Vec::new();
    for tok in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let idx: u8 = tok
            .parse()
            .map_err(|_| Error::Invalid(format!("bad letter token {tok:?}")))?;
        letters.push(idx);
    }
    CurveWord::new(curve, letters)
}

pub fn is_admissible(w: &CurveWord) -> bool {
    let (first, last) = forbidden(w.curve);
    match (w.letters.first(), w.letters.last()) {
        (Some(f), Some(l)) => !first.contains(f) && !last.contains(l),
        _ => false,
    }
}

/// Admissible words of weight `k`, in lexicographic order of indices.
pub fn enumerate_admissible(curve: Curve, k: usize) -> Result<Vec<CurveWord>> {
    if k < 1 {
        return Err(Error::Invalid("weight must be at least 1".into()));
    }
    let alpha = alphabet(curve);
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let w = CurveWord {
            curve,
            letters: idx.iter().map(|&i| alpha[i]).collect(),
        };
        if is_admissible(&w) {
            out.push(w);
        }
        let mut p = k;
        loop {
            if p == 0 {
                return Ok(out);
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < alpha.len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// All interleavings of `u` and `v` with multiplicity.
pub fn shuffle_seq<T: Clone + Ord>(u: &[T], v: &[T]) -> BTreeMap<Vec<T>, u64> {
    let mut out = BTreeMap::new();
    let mut buf = Vec::with_capacity(u.len() + v.len());
    fn rec<T: Clone + Ord>(u: &[T], v: &[T], buf: &mut Vec<T>, out: &mut BTreeMap<Vec<T>, u64>) {
        if u.is_empty() || v.is_empty() {
            let mut w = buf.clone();
            w.extend_from_slice(u);
            w.extend_from_slice(v);
            *out.entry(w).or_insert(0) += 1;
            return;
        }
        buf.push(u[0].clone());
        rec(&u[1..], v, buf, out);
        buf.pop();
        buf.push(v[0].clone());
        rec(u, &v[1..], buf, out);
        buf.pop();
    }
    rec(u, v, &mut buf, &mut out);
    out
}

/// Formal `Q`-linear combination of words of one curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordComb {
    curve: Curve,
    terms: BTreeMap<CurveWord, Rat>,
}

impl WordComb {
    pub fn zero(curve: Curve) -> WordComb {
        WordComb {
            curve,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_word(w: CurveWord) -> WordComb {
        let mut c = WordComb::zero(w.curve);
        c.add_term(w, Rat::one());
        c
    }

    pub fn curve(&self) -> Curve {
        self.curve
    }

    pub fn add_term(&mut self, w: CurveWord, c: Rat) {
        assert_eq!(w.curve, self.curve, "curve mismatch");
        let e = self.terms.entry(w.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> &BTreeMap<CurveWord, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of coefficients.
    pub fn mass(&self) -> Rat {
        self.terms.values().fold(Rat::zero(), |a, b| a + b)
    }

    pub fn add(&self, o: &WordComb) -> Result<WordComb> {
        if self.curve != o.curve {
            return Err(Error::Invalid("curve mismatch".into()));
        }
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, r: &Rat) -> WordComb {
        let mut out = WordComb::zero(self.curve);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * r);
        }
        out
    }

    /// Bilinear extension of the shuffle product.
    pub fn shuffle(&self, o: &WordComb) -> Result<WordComb> {
        if self.curve != o.curve {
            return Err(Error::Invalid("curve mismatch".into()));
        }
        let mut out = WordComb::zero(self.curve);
        for (u, cu) in &self.terms {
            for (v, cv) in &o.terms {
                let c = cu * cv;
                for (w, m) in shuffle_seq(&u.letters, &v.letters) {
                    out.add_term(
                        CurveWord {
                            curve: self.curve,
                            letters: w,
                        },
                        &c * Rat::from_integer(m.into()),
                    );
                }
            }
        }
        Ok(out)
    }
}

pub fn shuffle(u: &CurveWord, v: &CurveWord) -> Result<WordComb> {
    WordComb::from_word(u.clone()).shuffle(&WordComb::from_word(v.clone()))
}
