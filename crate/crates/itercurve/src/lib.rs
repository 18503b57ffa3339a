//! Arbitrary-precision evaluation of iterated integrals on the curves
//! `X_g` and `X_h`, together with the algebra needed to check identities
//! among them: exact cyclotomic arithmetic, the pullback to `P^1`, a
//! quadrature oracle, PSLQ relation detection and alternating multiple
//! mixed values.

pub mod ammv;
pub mod descent;
pub mod eval;
pub mod exactfield;
pub mod numkernel;
pub mod oracle;
pub mod relations;
pub mod words;

use std::fmt;

/// The two curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Curve {
    G,
    H,
}

impl Curve {
    /// Level of the coefficient field: `Q(ξ4)` for g, `Q(ξ6)` for h.
    pub fn level(self) -> exactfield::Level {
        match self {
            Curve::G => exactfield::Level::N4,
            Curve::H => exactfield::Level::N6,
        }
    }

    pub fn parse(s: &str) -> Result<Curve> {
        match s.trim() {
            "g" | "G" => Ok(Curve::G),
            "h" | "H" => Ok(Curve::H),
            other => Err(Error::Invalid(format!("unknown curve {other:?}"))),
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Curve::G => "g",
            Curve::H => "h",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Malformed or out-of-domain input.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// The requested precision could not be reached.
    #[error("precision failure: {0}")]
    Precision(String),
    /// A numerical identity or internal consistency check failed.
    #[error("verification failure: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
