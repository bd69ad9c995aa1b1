//! Rule-represented sequences `(x_n)_{n>=1}`: finitely many explicit terms
//! followed by a tail rule with exact closed form.

use serde::{Deserialize, Serialize};

use super::basis::z_seq;
use super::element::Element;
use super::space::SpaceDescriptor;
use crate::error::{Error, Result};
use crate::poly::RatFn;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TailRule {
    /// `x_n = c`.
    Constant { value: Element },
    /// `x_n = shift + scale · z_{n + offset}`.
    ZTail {
        offset: u64,
        #[serde(default = "Rational::one")]
        scale: Rational,
        #[serde(default)]
        shift: Option<Element>,
    },
    /// `x_n = shift + (p(n)/q(n)) · direction`.
    Formula {
        coeff: RatFn,
        direction: Element,
        #[serde(default)]
        shift: Option<Element>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct SequenceSpec {
    space: SpaceDescriptor,
    explicit: Vec<Element>,
    tail: TailRule,
}

#[derive(Deserialize)]
struct RawSpec {
    space: SpaceDescriptor,
    #[serde(default)]
    explicit: Vec<Element>,
    tail: TailRule,
}

impl TryFrom<RawSpec> for SequenceSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        SequenceSpec::new(raw.space, raw.explicit, raw.tail)
    }
}

impl SequenceSpec {
    pub fn new(space: SpaceDescriptor, explicit: Vec<Element>, tail: TailRule) -> Result<Self> {
        let check = |e: &Element| {
            if e.space() == &space {
                Ok(())
            } else {
                Err(Error::SpaceMismatch { left: space.to_string(), right: e.space().to_string() })
            }
        };
        explicit.iter().try_for_each(check)?;
        match &tail {
            TailRule::Constant { value } => check(value)?,
            TailRule::ZTail { shift, .. } => shift.iter().try_for_each(check)?,
            TailRule::Formula { coeff, direction, shift } => {
                check(direction)?;
                shift.iter().try_for_each(check)?;
                let from = explicit.len() as u64 + 1;
                let upto = crate::poly::sign_stable_from(&[&coeff.q]).max(from);
                if let Some(n) = (from..=upto).find(|&n| coeff.q.eval_at(n).is_zero()) {
                    return Err(Error::Schema(format!("formula denominator vanishes at n = {n}")));
                }
            }
        }
        Ok(SequenceSpec { space, explicit, tail })
    }

    /// `x_n = z_n` in `space`.
    pub fn z(space: &SpaceDescriptor) -> Self {
        SequenceSpec {
            space: space.clone(),
            explicit: Vec::new(),
            tail: TailRule::ZTail { offset: 0, scale: Rational::one(), shift: None },
        }
    }

    pub fn constant(value: Element) -> Self {
        SequenceSpec { space: value.space().clone(), explicit: Vec::new(), tail: TailRule::Constant { value } }
    }

    /// `x_n = shift + r(n) · direction`.
    pub fn formula(direction: Element, coeff: RatFn, shift: Option<Element>) -> Result<Self> {
        SequenceSpec::new(direction.space().clone(), Vec::new(), TailRule::Formula { coeff, direction, shift })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn explicit(&self) -> &[Element] {
        &self.explicit
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// Index of the first tail-rule term.
    pub fn tail_start(&self) -> usize {
        self.explicit.len() + 1
    }

    fn shift_or_zero(&self, shift: &Option<Element>) -> Element {
        shift.clone().unwrap_or_else(|| Element::zero(&self.space))
    }

    /// The `n`-th term (`n >= 1`).
    pub fn term(&self, n: usize) -> Element {
        assert!(n >= 1, "sequences are indexed from 1");
        if let Some(e) = self.explicit.get(n - 1) {
            return e.clone();
        }
        match &self.tail {
            TailRule::Constant { value } => value.clone(),
            TailRule::ZTail { offset, scale, shift } => {
                let z = z_seq(&self.space, n + *offset as usize).scale(scale);
                self.shift_or_zero(shift).add(&z).expect("validated space")
            }
            TailRule::Formula { coeff, direction, shift } => {
                let c = coeff.eval_at(n as u64).expect("denominator validated nonzero");
                self.shift_or_zero(shift).add(&direction.scale(&c)).expect("validated space")
            }
        }
    }

    /// Coordinatewise limit of the terms, for sequences carried by the base
    /// space. For a decreasing sequence this is the coordinatewise infimum,
    /// so `y <= x_n` for every `n` exactly when `y` is below it.
    pub fn coordinatewise_limit(&self) -> Option<Element> {
        if self.space.carrier() != &SpaceDescriptor::Base {
            return None;
        }
        match &self.tail {
            TailRule::Constant { value } => Some(value.clone()),
            // every coordinate of z_n is eventually 0
            TailRule::ZTail { shift, .. } => Some(self.shift_or_zero(shift)),
            TailRule::Formula { coeff, direction, shift } => {
                let base = self.shift_or_zero(shift);
                match coeff.limit() {
                    Some(l) => Some(base.add(&direction.scale(&l)).expect("validated space")),
                    None if direction.is_zero() => Some(base),
                    None => None,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    #[test]
    fn z_spec_terms() {
        let s = SequenceSpec::z(&SpaceDescriptor::Base);
        assert_eq!(s.term(3), z_seq(&SpaceDescriptor::Base, 3));
    }

    #[test]
    fn formula_terms_and_validation() {
        let u = z_seq(&SpaceDescriptor::Base, 1);
        let s = SequenceSpec::formula(u.clone(), RatFn::reciprocal(1, 0), None).unwrap();
        assert_eq!(s.term(4), u.scale(&Rational::new(1, 4)));
        let bad = RatFn::new(Poly::from_ints(&[1]), Poly::from_ints(&[-3, 1]));
        assert!(SequenceSpec::formula(u, bad, None).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = SequenceSpec::z(&SpaceDescriptor::Base);
        let j = serde_json::to_string(&s).unwrap();
        let back: SequenceSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back);
    }
}
