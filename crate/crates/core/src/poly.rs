//! Univariate polynomials with rational coefficients, used to decide
//! "for all but finitely many n" statements about rule-defined sequences.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// Coefficients in ascending order of degree; trailing zeros are trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl From<Vec<Rational>> for Poly {
    fn from(coeffs: Vec<Rational>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<Rational> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rational::from_int(c)).collect())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_at(&self, n: u64) -> Rational {
        self.eval(&Rational::from_int(n as i64))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
        Poly::new((0..len).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(out)
    }

    /// `n ↦ p(n + 1)`.
    pub fn shift_one(&self) -> Poly {
        // Horner in the shifted variable
        let x_plus_one = Poly::from_ints(&[1, 1]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::new(Vec::new()), |acc, c| acc.mul(&x_plus_one).add(&Poly::constant(c.clone())))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Rational::from_int(i as i64))
                .collect(),
        )
    }

    /// Cauchy bound: every real root has absolute value below the result.
    /// Zero and constant polynomials get bound 0.
    pub fn root_bound(&self) -> Rational {
        match self.degree() {
            None | Some(0) => Rational::zero(),
            Some(d) => {
                let lead = self.coeffs[d].abs();
                let m = self.coeffs[..d].iter().fold(Rational::zero(), |m, c| m.max(c.abs()));
                Rational::one() + m / lead
            }
        }
    }

    /// Sign of `p(n)` for all sufficiently large `n`: -1, 0 or 1.
    pub fn eventual_sign(&self) -> i8 {
        let l = self.lead();
        if l.is_positive() {
            1
        } else if l.is_negative() {
            -1
        } else {
            0
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}·n"),
                _ => format!("{c}·n^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// A rational function `p(n) / q(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatFn {
    pub p: Poly,
    pub q: Poly,
}

impl RatFn {
    pub fn new(p: Poly, q: Poly) -> Self {
        assert!(!q.is_zero(), "zero denominator polynomial");
        RatFn { p, q }
    }

    /// `c / n`-style helper: `num / (n + shift)`.
    pub fn reciprocal(num: i64, shift: i64) -> Self {
        RatFn::new(Poly::from_ints(&[num]), Poly::from_ints(&[shift, 1]))
    }

    pub fn eval_at(&self, n: u64) -> Option<Rational> {
        let q = self.q.eval_at(n);
        if q.is_zero() {
            None
        } else {
            Some(self.p.eval_at(n) / q)
        }
    }

    /// `lim_{n→∞} p(n)/q(n)`, or `None` when it diverges.
    pub fn limit(&self) -> Option<Rational> {
        match (self.p.degree(), self.q.degree()) {
            (None, _) => Some(Rational::zero()),
            (Some(a), Some(b)) if a < b => Some(Rational::zero()),
            (Some(a), Some(b)) if a == b => Some(self.p.lead() / self.q.lead()),
            _ => None,
        }
    }

    /// `u + v·r`, as a single rational function.
    pub fn affine(&self, u: &Rational, v: &Rational) -> RatFn {
        RatFn { p: self.q.scale(u).add(&self.p.scale(v)), q: self.q.clone() }
    }

    /// Numerator of `r(n+1) − r(n)` over the positive-or-negative denominator
    /// `q(n)·q(n+1)`; returned as `(numerator, denominator)`.
    pub fn forward_difference(&self) -> (Poly, Poly) {
        let p1 = self.p.shift_one();
        let q1 = self.q.shift_one();
        (p1.mul(&self.q).sub(&self.p.mul(&q1)), self.q.mul(&q1))
    }
}

/// Smallest integer `N >= 1` beyond which none of `polys` changes sign
/// (every real root is below `N`).
pub fn sign_stable_from(polys: &[&Poly]) -> u64 {
    let b = polys.iter().fold(Rational::zero(), |m, p| m.max(p.root_bound()));
    let c = b.ceil_int();
    let n: u64 = c.try_into().unwrap_or(u64::MAX);
    n.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_shift() {
        let p = Poly::from_ints(&[1, -3, 2]); // 2n² − 3n + 1
        assert_eq!(p.eval_at(3), Rational::from_int(10));
        assert_eq!(p.shift_one().eval_at(2), p.eval_at(3));
        assert_eq!(p.derivative(), Poly::from_ints(&[-3, 4]));
    }

    #[test]
    fn cauchy_bound_covers_roots() {
        let p = Poly::from_ints(&[-6, 1, 1]); // roots 2, −3
        assert!(p.root_bound() > Rational::from_int(3));
        assert_eq!(sign_stable_from(&[&p]), 7);
    }

    #[test]
    fn limits_by_degree() {
        assert_eq!(RatFn::reciprocal(1, 0).limit(), Some(Rational::zero()));
        let r = RatFn::new(Poly::from_ints(&[1, 2]), Poly::from_ints(&[0, 3]));
        assert_eq!(r.limit(), Some(Rational::new(2, 3)));
        assert_eq!(RatFn::new(Poly::from_ints(&[0, 1]), Poly::from_ints(&[1])).limit(), None);
    }

    #[test]
    fn difference_of_reciprocal_is_negative() {
        let (num, den) = RatFn::reciprocal(1, 0).forward_difference();
        assert_eq!(num.eventual_sign(), -1);
        assert_eq!(den.eventual_sign(), 1);
    }
}
