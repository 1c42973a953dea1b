//! Text form of points `τ`: `inf`, or a finite sum of `c*pi^a` terms with an
//! optional `O(pi^k)` tail.
//!
//! Coefficients are integers, or residue-field elements written in `g`
//! (`g`, `g^3`, `(2*g+1)`), which stand for their Teichmüller lifts.

use crate::error::{Error, Result};
use crate::localfield::{LocalElement, LocalField};
use crate::strata::TauPoint;

/// Parses a τ expression over `field`.
pub fn parse_tau(field: &LocalField, text: &str) -> Result<TauPoint> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::parse("empty tau expression"));
    }
    if s == "inf" {
        return Ok(TauPoint::Infinity(field.clone()));
    }
    Parser { s: s.as_bytes(), pos: 0, field }.series().map(TauPoint::Finite)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    field: &'a LocalField,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> Error {
        let rest = String::from_utf8_lossy(&self.s[self.pos..]);
        Error::parse(format!("{what} at offset {} (remaining {rest:?})", self.pos))
    }

    fn series(&mut self) -> Result<LocalElement> {
        let mut acc = self.field.zero();
        let mut cap: Option<i64> = None;
        let mut first = true;
        while self.pos < self.s.len() {
            let negative = if self.eat("+") {
                false
            } else if self.eat("-") {
                true
            } else if first {
                false
            } else {
                return Err(self.err("expected '+' or '-'"));
            };
            first = false;
            if self.eat("O(") {
                if cap.is_some() {
                    return Err(self.err("more than one O-term"));
                }
                if negative {
                    return Err(self.err("O-term cannot be negated"));
                }
                if !self.eat("pi^") {
                    return Err(self.err("expected pi^k inside O(...)"));
                }
                cap = Some(self.exponent()?);
                if !self.eat(")") {
                    return Err(self.err("expected ')'"));
                }
                continue;
            }
            if cap.is_some() {
                return Err(self.err("terms after the O-term"));
            }
            let t = self.term()?;
            acc = if negative { acc.try_sub(&t)? } else { acc.try_add(&t)? };
        }
        if first {
            return Err(self.err("empty expression"));
        }
        Ok(match cap {
            Some(k) => acc.truncate_to(k),
            None => acc,
        })
    }

    fn term(&mut self) -> Result<LocalElement> {
        if self.peek() == Some(b'p') {
            return self.pi_power();
        }
        let c = self.coefficient()?;
        if self.eat("*") {
            let pi = self.pi_power()?;
            Ok(c.try_mul(&pi)?)
        } else {
            Ok(c)
        }
    }

    fn pi_power(&mut self) -> Result<LocalElement> {
        if !self.eat("pi") {
            return Err(self.err("expected 'pi'"));
        }
        let a = if self.eat("^") { self.exponent()? } else { 1 };
        Ok(self.field.pi_pow(a))
    }

    fn coefficient(&mut self) -> Result<LocalElement> {
        let k = self.field.residue_field();
        match self.peek() {
            Some(b'g') => {
                self.pos += 1;
                let e = if self.eat("^") { self.exponent()? } else { 1 };
                self.field.teichmuller(&k.generator().pow(e))
            }
            Some(b'(') => {
                let close = self.s[self.pos..]
                    .iter()
                    .position(|&b| b == b')')
                    .ok_or_else(|| self.err("unclosed '('"))?;
                let inner = std::str::from_utf8(&self.s[self.pos + 1..self.pos + close])
                    .map_err(|_| self.err("invalid UTF-8"))?;
                let c = k.parse_element(inner)?;
                self.pos += close + 1;
                self.field.teichmuller(&c)
            }
            Some(b'0'..=b'9') => Ok(self.field.from_int(self.integer()?)),
            _ => Err(self.err("expected a coefficient")),
        }
    }

    /// `k`, `-k`, or `(-k)`.
    fn exponent(&mut self) -> Result<i64> {
        if self.eat("(") {
            let v = self.signed()?;
            if !self.eat(")") {
                return Err(self.err("expected ')'"));
            }
            Ok(v)
        } else {
            self.signed()
        }
    }

    fn signed(&mut self) -> Result<i64> {
        let neg = self.eat("-");
        let v = self.integer()?;
        Ok(if neg { -v } else { v })
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        // bounded so that later powers of pi stay far from overflow
        digits
            .parse::<i64>()
            .ok()
            .filter(|v| *v <= 1 << 40)
            .ok_or_else(|| Error::parse(format!("integer {digits} out of range")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{make_field, TowerKind};
    use crate::rational::{q, Val};

    fn f() -> LocalField {
        make_field(3, 2, TowerKind::EisensteinRootOfP { e: 4 }, 8).unwrap()
    }

    #[test]
    fn simple_forms() {
        let f = f();
        assert!(parse_tau(&f, "inf").unwrap().is_infinity());
        let pi = parse_tau(&f, "pi").unwrap();
        assert_eq!(pi.as_finite().unwrap(), &f.uniformizer());
        let z = parse_tau(&f, "0").unwrap();
        assert_eq!(z.ord().unwrap(), Val::PosInf);
        let x = parse_tau(&f, " 2*pi^2 - pi^3 + O(pi^9)").unwrap();
        assert_eq!(x.ord().unwrap(), Val::Finite(q(1, 2)));
        assert_eq!(x.as_finite().unwrap().pi_precision(), 9);
        let neg = parse_tau(&f, "pi^(-1)").unwrap();
        assert_eq!(neg.ord().unwrap(), Val::Finite(q(-1, 4)));
    }

    #[test]
    fn residue_coefficients_are_teichmuller_lifts() {
        let f = f();
        let k = f.residue_field();
        let g = parse_tau(&f, "g*pi").unwrap();
        let expect = f.teichmuller(&k.generator()).unwrap() * f.uniformizer();
        assert_eq!(g.as_finite().unwrap(), &expect);
        let g2 = parse_tau(&f, "g^2").unwrap();
        let poly = parse_tau(&f, "(2*g+1)").unwrap();
        assert_eq!(g2.as_finite().unwrap(), poly.as_finite().unwrap());
    }

    #[test]
    fn rejects_garbage() {
        let f = f();
        for bad in ["", "pi^", "2*", "pi pi", "O(pi^2)+pi", "(g", "x", "2**pi", "-O(pi^3)", "99999999999999999999"] {
            assert!(matches!(parse_tau(&f, bad), Err(Error::Parse(_))), "{bad:?}");
        }
    }

    #[test]
    fn bare_big_oh_is_uncertified() {
        let f = f();
        let t = parse_tau(&f, "O(pi^3)").unwrap();
        assert!(matches!(t.ord(), Err(Error::PrecisionLoss(_))));
    }
}
