//! Exact rationals and extended valuations.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact rational number used for every valuation in the crate.
pub type Q = Ratio<i64>;

pub fn q(num: i64, den: i64) -> Q {
    Ratio::new(num, den)
}

/// Formats a rational as `num/den`, always with an explicit denominator.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `a`, `-a`, or `a/b` into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: i64 = num
        .parse()
        .map_err(|_| Error::parse(format!("bad rational numerator in {s:?}")))?;
    let den: i64 = den
        .parse()
        .map_err(|_| Error::parse(format!("bad rational denominator in {s:?}")))?;
    if den == 0 {
        return Err(Error::parse(format!("zero denominator in {s:?}")));
    }
    if num == i64::MIN || den == i64::MIN {
        return Err(Error::parse(format!("rational out of range in {s:?}")));
    }
    Ok(Ratio::new(num, den))
}

/// A valuation on the extended line `{-inf} ∪ Q ∪ {+inf}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Val {
    NegInf,
    Finite(Q),
    PosInf,
}

impl Val {
    pub fn finite(self) -> Option<Q> {
        match self {
            Val::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Val::Finite(_))
    }

    /// Negation swaps the infinities.
    pub fn neg(self) -> Val {
        match self {
            Val::NegInf => Val::PosInf,
            Val::Finite(x) => Val::Finite(-x),
            Val::PosInf => Val::NegInf,
        }
    }
}

impl From<Q> for Val {
    fn from(x: Q) -> Self {
        Val::Finite(x)
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        use Val::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::NegInf => f.write_str("-inf"),
            Val::PosInf => f.write_str("inf"),
            Val::Finite(x) => f.write_str(&fmt_q(x)),
        }
    }
}

impl FromStr for Val {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(Val::PosInf),
            "-inf" => Ok(Val::NegInf),
            other => parse_q(other).map(Val::Finite),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_of_extended_line() {
        let mut v = vec![Val::PosInf, Val::Finite(q(1, 2)), Val::NegInf, Val::Finite(q(-3, 1))];
        v.sort();
        assert_eq!(v, vec![Val::NegInf, Val::Finite(q(-3, 1)), Val::Finite(q(1, 2)), Val::PosInf]);
    }

    #[test]
    fn text_form() {
        assert_eq!(Val::Finite(q(2, 4)).to_string(), "1/2");
        assert_eq!(Val::Finite(q(3, 1)).to_string(), "3/1");
        assert_eq!("-inf".parse::<Val>().unwrap(), Val::NegInf);
        assert_eq!(" 3/12 ".parse::<Val>().unwrap(), Val::Finite(q(1, 4)));
        assert!("1/0".parse::<Val>().is_err());
        assert!("x".parse::<Val>().is_err());
    }
}
