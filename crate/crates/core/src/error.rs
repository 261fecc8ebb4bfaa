use thiserror::Error;

use crate::arith::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot embed Q(zeta_{from}) into Q(zeta_{to}): {from} does not divide {to}")]
    Embedding { from: u32, to: u32 },

    #[error("geometric factor does not converge in the region |y| > 1 (q^{qexp} y^{yexp})")]
    Divergent { qexp: String, yexp: String },

    #[error("query (q^{q}, y^{y}) lies outside the series window")]
    OutsideWindow { q: String, y: String },

    #[error("window is empty after {0}")]
    EmptyWindow(&'static str),

    #[error("{0}")]
    Precondition(String),

    #[error("coefficient mismatch at q^{q} y^{y}: expected {expected}, found {found}")]
    Consistency {
        q: String,
        y: String,
        expected: String,
        found: String,
    },

    #[error("residue depends on the y-floor: {first} at floor {floor1} vs {second} at floor {floor2}")]
    Stabilisation {
        floor1: String,
        floor2: String,
        first: String,
        second: String,
    },

    #[error("residue is not constant: q^{q} contributes {value}")]
    NonConstant { q: String, value: String },

    #[error("enumeration exceeds the state budget of {0}")]
    Budget(u64),

    #[error("unknown lambency {0}")]
    UnknownLambency(String),

    #[error("lambency {lambency} has no class {class}")]
    UnknownClass { lambency: String, class: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn outside(q: &impl ToString, y: &impl ToString) -> Self {
        Error::OutsideWindow {
            q: q.to_string(),
            y: y.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Parses `p`, `p/q` or `-p/q`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))
}
