//! Ordinal notations below epsilon-zero in Cantor normal form.
//!
//! An ordinal is a finite list of `(exponent, coefficient)` pairs with strictly
//! decreasing exponents and positive coefficients; the empty list is zero.
//! Because the normal form is unique, structural equality is ordinal equality.
//!
//! The textual shorthand accepted by [`Ordinal::from_str`] is
//!
//! ```text
//! sum   := term ('+' term)*
//! term  := power ('*' nat)? | nat
//! power := ('w' | 'ω') ('^' exp)?
//! exp   := nat | power | '(' sum ')'
//! ```
//!
//! so `"w^2*3+w+5"`, `"w^w"`, `"w^(w+1)"` and `"0"` all parse. Sums that are
//! not already in normal form are normalized with ordinal addition.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "Vec<(Ordinal, u64)>", try_from = "Vec<(Ordinal, u64)>")]
pub struct Ordinal {
    terms: Vec<(Ordinal, u64)>,
}

/// Shape of an ordinal as seen by a transfinite recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Zero,
    Successor(Ordinal),
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal { terms: vec![(Ordinal::zero(), n)] }
        }
    }

    pub fn one() -> Self {
        Ordinal::finite(1)
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// `ω^exponent`.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Ordinal { terms: vec![(exponent, 1)] }
    }

    /// Builds a notation from raw terms, rejecting anything not in normal form.
    pub fn from_terms(terms: Vec<(Ordinal, u64)>) -> Result<Self> {
        for w in terms.windows(2) {
            if compare(&w[0].0, &w[1].0) != Ordering::Greater {
                return Err(Error::Parse("exponents must strictly decrease".into()));
            }
        }
        if terms.iter().any(|(_, c)| *c == 0) {
            return Err(Error::Parse("coefficients must be positive".into()));
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.as_finite().is_some()
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn successor(&self) -> Self {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((e, c)) if e.is_zero() => *c += 1,
            _ => terms.push((Ordinal::zero(), 1)),
        }
        Ordinal { terms }
    }

    pub fn classify(&self) -> Kind {
        match self.terms.last() {
            None => Kind::Zero,
            Some((e, c)) if e.is_zero() => {
                let mut terms = self.terms.clone();
                if *c == 1 {
                    terms.pop();
                } else {
                    terms.last_mut().unwrap().1 -= 1;
                }
                Kind::Successor(Ordinal { terms })
            }
            Some(_) => Kind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.classify() == Kind::Limit
    }

    pub fn predecessor(&self) -> Option<Ordinal> {
        match self.classify() {
            Kind::Successor(p) => Some(p),
            _ => None,
        }
    }

    /// The `n`-th member (`n >= 1`) of the canonical increasing sequence
    /// converging to a limit ordinal.
    ///
    /// For `γ + ω^(δ+1)` this is `γ + ω^δ·n`; for `γ + ω^λ` with `λ` a limit it
    /// is `γ + ω^(λ[n])`.
    pub fn fundamental_sequence(&self, n: u64) -> Result<Ordinal> {
        if !self.is_limit() {
            return Err(Error::NotLimit(self.clone()));
        }
        if n == 0 {
            return Err(Error::Precondition("fundamental sequence index starts at 1".into()));
        }
        let mut terms = self.terms.clone();
        let (exp, coeff) = terms.pop().expect("limit ordinals are nonzero");
        if coeff > 1 {
            terms.push((exp.clone(), coeff - 1));
        }
        match exp.classify() {
            Kind::Successor(delta) => push_term(&mut terms, delta, n),
            Kind::Limit => push_term(&mut terms, exp.fundamental_sequence(n)?, 1),
            Kind::Zero => unreachable!("exponent zero means successor"),
        }
        Ok(Ordinal { terms })
    }

    /// Ordinal addition `self + other`.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some((lead, _)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(Ordinal, u64)> = self
            .terms
            .iter()
            .take_while(|(e, _)| compare(e, lead) != Ordering::Less)
            .cloned()
            .collect();
        let mut rest = other.terms.iter();
        if let Some((e, c)) = terms.last_mut() {
            if e == lead {
                *c += other.terms[0].1;
                rest.next();
            }
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }
}

fn push_term(terms: &mut Vec<(Ordinal, u64)>, exp: Ordinal, coeff: u64) {
    match terms.last_mut() {
        Some((e, c)) if *e == exp => *c += coeff,
        _ => terms.push((exp, coeff)),
    }
}

/// Lexicographic comparison of normal forms: leading exponent first, then
/// coefficient, then the remaining terms.
pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    for ((ea, ca), (eb, cb)) in a.terms.iter().zip(&b.terms) {
        match compare(ea, eb).then(ca.cmp(cb)) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    a.terms.len().cmp(&b.terms.len())
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl From<Ordinal> for Vec<(Ordinal, u64)> {
    fn from(o: Ordinal) -> Self {
        o.terms
    }
}

impl TryFrom<Vec<(Ordinal, u64)>> for Ordinal {
    type Error = Error;
    fn try_from(terms: Vec<(Ordinal, u64)>) -> Result<Self> {
        Ordinal::from_terms(terms)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            write!(f, "w")?;
            if let Some(k) = e.as_finite() {
                if k != 1 {
                    write!(f, "^{k}")?;
                }
            } else if e.terms.len() == 1 && e.terms[0].1 == 1 {
                write!(f, "^{e}")?;
            } else {
                write!(f, "^({e})")?;
            }
            if *c != 1 {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { chars: &chars, pos: 0, src: s };
        let o = p.sum()?;
        if p.pos != chars.len() {
            return Err(p.error("trailing input"));
        }
        Ok(o)
    }
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in ordinal {:?}", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Ordinal> {
        let mut acc = self.term()?;
        while self.eat('+') {
            let t = self.term()?;
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::finite(self.nat()?)),
            Some('w') | Some('ω') => {
                let base = self.power()?;
                if self.eat('*') {
                    let k = self.nat()?;
                    if k == 0 {
                        return Ok(Ordinal::zero());
                    }
                    let (e, _) = base.terms[0].clone();
                    Ok(Ordinal { terms: vec![(e, k)] })
                } else {
                    Ok(base)
                }
            }
            _ => Err(self.error("expected a term")),
        }
    }

    fn power(&mut self) -> Result<Ordinal> {
        if !(self.eat('w') || self.eat('ω')) {
            return Err(self.error("expected 'w'"));
        }
        if !self.eat('^') {
            return Ok(Ordinal::omega());
        }
        let exp = match self.peek() {
            Some(c) if c.is_ascii_digit() => Ordinal::finite(self.nat()?),
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                e
            }
            Some('w') | Some('ω') => self.power()?,
            _ => return Err(self.error("expected exponent")),
        };
        Ok(Ordinal::omega_pow(exp))
    }

    fn nat(&mut self) -> Result<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| self.error("expected a natural number"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&o("0"), &o("0")), Ordering::Equal);
        assert_eq!(compare(&o("w"), &o("3")), Ordering::Greater);
        assert_eq!(compare(&o("w*2+1"), &o("w*2")), Ordering::Greater);
    }

    #[test]
    fn successor_examples() {
        assert_eq!(o("0").successor(), o("1"));
        assert_eq!(o("w").successor(), o("w+1"));
        assert_eq!(o("w^2+w").successor(), o("w^2+w+1"));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(o("5").classify(), Kind::Successor(o("4")));
        assert_eq!(o("w").classify(), Kind::Limit);
        assert_eq!(o("w^2*3").classify(), Kind::Limit);
        assert_eq!(o("0").classify(), Kind::Zero);
        assert_eq!(o("w+1").classify(), Kind::Successor(o("w")));
    }

    #[test]
    fn fundamental_sequence_examples() {
        assert_eq!(o("w").fundamental_sequence(3).unwrap(), o("3"));
        assert_eq!(o("w^2").fundamental_sequence(2).unwrap(), o("w*2"));
        assert_eq!(o("w^w").fundamental_sequence(2).unwrap(), o("w^2"));
        assert_eq!(o("w*2").fundamental_sequence(4).unwrap(), o("w+4"));
        assert_eq!(o("w^2*2").fundamental_sequence(1).unwrap(), o("w^2+w"));
        assert_eq!(o("w^(w+1)").fundamental_sequence(2).unwrap(), o("w^w*2"));
    }

    #[test]
    fn fundamental_sequence_rejects_non_limits() {
        assert!(matches!(o("5").fundamental_sequence(1), Err(Error::NotLimit(_))));
        assert!(o("0").fundamental_sequence(1).is_err());
        assert!(o("w").fundamental_sequence(0).is_err());
    }

    #[test]
    fn parse_normalizes_and_displays() {
        assert_eq!(o("3+w"), o("w"));
        assert_eq!(o("w+w"), o("w*2"));
        assert_eq!(o("ω^2*3 + ω + 5").to_string(), "w^2*3+w+5");
        assert_eq!(o("w^w^2").to_string(), "w^w^2");
        assert_eq!(o("w^(w+1)").to_string(), "w^(w+1)");
        assert_eq!(o("w^(w*2)").to_string(), "w^(w*2)");
        assert!("w^".parse::<Ordinal>().is_err());
        assert!("w+".parse::<Ordinal>().is_err());
        assert!("x".parse::<Ordinal>().is_err());
    }

    #[test]
    fn json_is_nested_pairs() {
        assert_eq!(serde_json::to_string(&o("0")).unwrap(), "[]");
        assert_eq!(serde_json::to_string(&o("w+2")).unwrap(), "[[[[[],1]],1],[[],2]]");
        let back: Ordinal = serde_json::from_str("[[[[[],1]],1],[[],2]]").unwrap();
        assert_eq!(back, o("w+2"));
        assert!(serde_json::from_str::<Ordinal>("[[[],1],[[],2]]").is_err());
    }
}
