//! Text format for bracket polynomials.
//!
//! Terms are separated by `+`/`-`; each term is a product of brackets like
//! `[1,4,6,7][2,3,4,5]` with an optional integer or `num/den` coefficient
//! prefix. Printing orders terms by descending tableaux order and round-trips
//! exactly.

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::q_to_string;
use crate::{Q, Z};

use super::{Bracket, BracketPoly, Tableau};

pub fn format_poly(poly: &BracketPoly) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (t, c)) in poly.terms().rev().enumerate() {
        let mag = c.abs();
        if i == 0 {
            if c.is_negative() {
                out.push_str("- ");
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if !mag.is_one() || t.degree() == 0 {
            out.push_str(&q_to_string(&mag));
        }
        if t.degree() > 0 {
            out.push_str(&t.to_string());
        }
    }
    out
}

pub fn parse_poly(input: &str) -> Result<BracketPoly> {
    let mut p = Parser {
        chars: input.chars().peekable(),
    };
    p.poly()
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl Parser<'_> {
    fn poly(&mut self) -> Result<BracketPoly> {
        let mut poly = BracketPoly::zero();
        self.skip_ws();
        if self.chars.peek().is_none() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        // a bare "0" denotes the zero polynomial
        let mut probe = self.chars.clone();
        if probe.next() == Some('0') {
            let rest: String = probe.collect();
            if rest.trim().is_empty() {
                return Ok(poly);
            }
        }
        let mut first = true;
        loop {
            self.skip_ws();
            let sign = match self.chars.peek() {
                Some('+') => {
                    self.chars.next();
                    1
                }
                Some('-') => {
                    self.chars.next();
                    -1
                }
                None if !first => break,
                None => return Err(Error::Parse("empty polynomial".into())),
                _ if first => 1,
                Some(c) => return Err(Error::Parse(format!("expected + or -, found {c:?}"))),
            };
            first = false;
            let (coeff, tableau) = self.term()?;
            poly.add_term(tableau, coeff * crate::q(sign));
            self.skip_ws();
            if self.chars.peek().is_none() {
                break;
            }
        }
        Ok(poly)
    }

    fn term(&mut self) -> Result<(Q, Tableau)> {
        self.skip_ws();
        let coeff = if matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            let n = self.integer()?;
            if self.chars.peek() == Some(&'/') {
                self.chars.next();
                let d = self.integer()?;
                if d.is_zero() {
                    return Err(Error::Parse("zero denominator".into()));
                }
                Q::new(n, d)
            } else {
                Q::from_integer(n)
            }
        } else {
            Q::one()
        };
        self.skip_ws();
        let mut rows = Vec::new();
        let mut sign = 1i8;
        while self.chars.peek() == Some(&'[') {
            let tuple = self.bracket_tuple()?;
            let (s, b) = Bracket::normalize(&tuple);
            if s == 0 {
                return Err(Error::Parse(format!("repeated index in bracket {tuple:?}")));
            }
            sign *= s;
            rows.push(b.unwrap());
            self.skip_ws();
        }
        if rows.is_empty() && coeff.is_one() {
            return Err(Error::Parse(
                "term with neither coefficient nor brackets".into(),
            ));
        }
        Ok((coeff * crate::q(sign as i64), Tableau::new(rows)))
    }

    fn bracket_tuple(&mut self) -> Result<Vec<u32>> {
        assert_eq!(self.chars.next(), Some('['));
        let mut tuple = Vec::new();
        loop {
            self.skip_ws();
            let n = self.integer()?;
            let n = u32::try_from(n.clone())
                .map_err(|_| Error::Parse(format!("bracket index {n} out of range")))?;
            if n == 0 {
                return Err(Error::Parse("bracket index 0".into()));
            }
            tuple.push(n);
            self.skip_ws();
            match self.chars.next() {
                Some(',') => continue,
                Some(']') => break,
                other => {
                    return Err(Error::Parse(format!(
                        "expected , or ] in bracket, found {other:?}"
                    )))
                }
            }
        }
        if tuple.is_empty() {
            return Err(Error::Parse("empty bracket".into()));
        }
        Ok(tuple)
    }

    fn integer(&mut self) -> Result<Z> {
        let mut digits = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            digits.push(self.chars.next().unwrap());
        }
        if digits.is_empty() {
            return Err(Error::Parse("expected an integer".into()));
        }
        digits
            .parse::<Z>()
            .map_err(|e| Error::Parse(format!("bad integer {digits:?}: {e}")))
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.chars.next();
        }
    }
}
