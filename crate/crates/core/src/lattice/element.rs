use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::space::SpaceDescriptor;
use super::tail::TailExpr;
use super::vector::{binary, unary, BinOp, UnOp, Vector};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Tail components sampled by [`Element::norm_bounds`] when no budget is given.
pub const DEFAULT_SAMPLE_BUDGET: usize = 8;

/// A vector tagged with the lattice it lives in.
///
/// Successor stages share the vector space of the stage below, so the payload
/// is always represented in the carrier (Base or Limit) representation; the
/// descriptor decides which norm applies.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawElement")]
pub struct Element {
    space: SpaceDescriptor,
    #[serde(rename = "payload")]
    vector: Vector,
}

#[derive(Deserialize)]
struct RawElement {
    space: SpaceDescriptor,
    payload: Vector,
}

impl TryFrom<RawElement> for Element {
    type Error = Error;

    fn try_from(raw: RawElement) -> Result<Self> {
        Element::new(raw.space, raw.payload)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormBound {
    pub lower: Rational,
    pub upper: Rational,
}

impl NormBound {
    pub fn exact(v: Rational) -> Self {
        NormBound { lower: v.clone(), upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lower <= v && v <= &self.upper
    }
}

impl fmt::Display for NormBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

/// Three-valued order verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    True,
    False,
    /// Components `1..=m` agree with `<=`; nothing is known beyond `m`.
    UnknownBeyond(usize),
}

impl Order {
    pub fn is_true(self) -> bool {
        self == Order::True
    }

    fn and(self, other: Order) -> Order {
        match (self, other) {
            (Order::False, _) | (_, Order::False) => Order::False,
            (Order::UnknownBeyond(a), Order::UnknownBeyond(b)) => Order::UnknownBeyond(a.min(b)),
            (Order::UnknownBeyond(a), Order::True) | (Order::True, Order::UnknownBeyond(a)) => {
                Order::UnknownBeyond(a)
            }
            (Order::True, Order::True) => Order::True,
        }
    }
}

impl Element {
    pub fn new(space: SpaceDescriptor, vector: Vector) -> Result<Self> {
        if !vector.fits(&space) {
            return Err(Error::Schema(format!("payload does not match the carrier of {space}")));
        }
        if let Vector::Lim(l) = &vector {
            for (i, c) in l.explicit.iter().enumerate() {
                Element::new(space.carrier().child(i + 1), c.clone())?;
            }
        }
        Ok(Element { space, vector })
    }

    /// Unchecked constructor for payloads built by this crate.
    pub fn from_parts(space: SpaceDescriptor, vector: Vector) -> Self {
        debug_assert!(vector.fits(&space));
        Element { space, vector }
    }

    pub fn zero(space: &SpaceDescriptor) -> Self {
        Element { space: space.clone(), vector: Vector::zero(space) }
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn vector(&self) -> &Vector {
        &self.vector
    }

    pub fn into_vector(self) -> Vector {
        self.vector
    }

    /// The same vector viewed in another stage over the same carrier
    /// (successor renormings keep the underlying vector space).
    pub fn in_space(&self, space: &SpaceDescriptor) -> Result<Element> {
        if space.carrier() != self.space.carrier() {
            return Err(self.mismatch(space));
        }
        Ok(Element { space: space.clone(), vector: self.vector.clone() })
    }

    /// View in the next successor stage.
    pub fn lift(&self) -> Element {
        Element { space: self.space.succ(), vector: self.vector.clone() }
    }

    fn mismatch(&self, other: &SpaceDescriptor) -> Error {
        Error::SpaceMismatch { left: self.space.to_string(), right: other.to_string() }
    }

    fn same_space(&self, other: &Element) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(self.mismatch(&other.space))
        }
    }

    fn bin(&self, op: BinOp, other: &Element) -> Result<Element> {
        self.same_space(other)?;
        Ok(Element { space: self.space.clone(), vector: binary(&self.space, op, &self.vector, &other.vector) })
    }

    fn un(&self, op: UnOp) -> Element {
        Element { space: self.space.clone(), vector: unary(&self.space, &op, &self.vector) }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.bin(BinOp::Add, other)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.bin(BinOp::Add, &other.scale(&-Rational::one()))
    }

    pub fn join(&self, other: &Element) -> Result<Element> {
        self.bin(BinOp::Join, other)
    }

    pub fn meet(&self, other: &Element) -> Result<Element> {
        self.bin(BinOp::Meet, other)
    }

    pub fn scale(&self, c: &Rational) -> Element {
        self.un(UnOp::Scale(c.clone()))
    }

    pub fn abs(&self) -> Element {
        self.un(UnOp::Abs)
    }

    pub fn pos_part(&self) -> Element {
        self.un(UnOp::Pos)
    }

    pub fn phi(&self) -> Rational {
        phi_of(&self.vector)
    }

    pub fn norm_bounds(&self, sample_budget: usize) -> NormBound {
        let (lower, upper) = bounds_of(&self.space, &self.vector, sample_budget.max(1));
        NormBound { lower, upper }
    }

    /// Exact norm, or [`Error::Uncertifiable`] when the bounds do not meet.
    pub fn norm(&self) -> Result<Rational> {
        let b = self.norm_bounds(DEFAULT_SAMPLE_BUDGET);
        if b.is_exact() {
            Ok(b.lower)
        } else {
            Err(Error::Uncertifiable { lower: b.lower.to_string(), upper: b.upper.to_string() })
        }
    }

    pub fn leq(&self, other: &Element) -> Result<Order> {
        self.same_space(other)?;
        Ok(leq_of(&self.space, &self.vector, &other.vector, DEFAULT_SAMPLE_BUDGET))
    }

    /// `self > 0`, i.e. `0 <= self` and `self != 0`.
    pub fn is_strictly_positive(&self) -> Order {
        if self.is_zero() {
            return Order::False;
        }
        leq_of(&self.space, &Vector::zero(&self.space), &self.vector, DEFAULT_SAMPLE_BUDGET)
    }

    pub fn is_zero(&self) -> bool {
        match &self.vector {
            Vector::Seq(s) => s.is_zero(),
            Vector::Lim(l) => {
                l.tail == TailExpr::Zero
                    && l.explicit.iter().enumerate().all(|(i, v)| {
                        Element::from_parts(self.space.carrier().child(i + 1), v.clone()).is_zero()
                    })
            }
        }
    }

    /// Membership in the unit sphere of the positive cone on which the
    /// functional is 1.
    #[allow(non_snake_case)]
    pub fn in_sphere_S(&self) -> bool {
        let one = Rational::one();
        self.phi() == one
            && self.is_strictly_positive().is_true()
            && self.norm_bounds(DEFAULT_SAMPLE_BUDGET) == NormBound::exact(one)
    }

    /// Short stable content hash (hex) of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("elements always serialize");
        Sha256::digest(&json).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.vector {
            Vector::Seq(s) => write!(f, "{}{s:?}", self.space),
            Vector::Lim(l) => write!(f, "{}{{explicit: {}, tail: {:?}}}", self.space, l.explicit.len(), l.tail),
        }
    }
}

fn phi_of(v: &Vector) -> Rational {
    match v {
        Vector::Seq(s) => s.tail().clone(),
        Vector::Lim(l) => l.tail.phi(),
    }
}

fn bounds_of(space: &SpaceDescriptor, v: &Vector, budget: usize) -> (Rational, Rational) {
    match space {
        SpaceDescriptor::Base => {
            let s = v.as_seq().expect("base payload");
            let n = (s.sup_abs() * Rational::new(1, 3)).max(s.tail().abs());
            (n.clone(), n)
        }
        SpaceDescriptor::Succ { inner, .. } => {
            let (lo, hi) = bounds_of(inner, v, budget);
            let p = phi_of(v).abs();
            let seventh = Rational::new(1, 7);
            ((lo * &seventh).max(p.clone()), (hi * seventh).max(p))
        }
        SpaceDescriptor::Limit { .. } => {
            let l = v.as_lim().expect("limit payload");
            let nested = (budget / 2).max(1);
            let mut lo = Rational::zero();
            let mut hi = Rational::zero();
            for (i, c) in l.explicit.iter().enumerate() {
                let (a, b) = bounds_of(&space.child(i + 1), c, nested);
                lo = lo.max(a);
                hi = hi.max(b);
            }
            if l.tail != TailExpr::Zero {
                let k = l.explicit.len();
                for m in k + 1..=k + budget {
                    let c = l.tail.materialize(space, m);
                    lo = lo.max(bounds_of(&space.child(m), &c, nested).0);
                }
                hi = hi.max(l.tail.upper());
            }
            // a sampled component can be tighter than the symbolic bound
            let hi = hi.max(lo.clone());
            (lo, hi)
        }
    }
}

fn leq_of(space: &SpaceDescriptor, a: &Vector, b: &Vector, budget: usize) -> Order {
    let space = space.carrier();
    match (a, b) {
        (Vector::Seq(x), Vector::Seq(y)) => {
            if x.leq(y) {
                Order::True
            } else {
                Order::False
            }
        }
        (Vector::Lim(x), Vector::Lim(y)) => {
            let k = x.explicit.len().max(y.explicit.len());
            let mut verdict = Order::True;
            for m in 1..=k {
                let c = leq_of(&space.child(m), &x.component(space, m), &y.component(space, m), budget);
                verdict = verdict.and(match c {
                    Order::UnknownBeyond(_) => Order::UnknownBeyond(m - 1),
                    o => o,
                });
                if verdict == Order::False {
                    return verdict;
                }
            }
            if TailExpr::known_leq(&x.tail, &y.tail) {
                return verdict;
            }
            for m in k + 1..=k + budget {
                let c = leq_of(&space.child(m), &x.tail.materialize(space, m), &y.tail.materialize(space, m), budget);
                if c == Order::False {
                    return Order::False;
                }
                if let Order::UnknownBeyond(_) = c {
                    return verdict.and(Order::UnknownBeyond(m - 1));
                }
            }
            verdict.and(Order::UnknownBeyond(k + budget))
        }
        _ => panic!("vector representations disagree within one space"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::basis::z_seq;
    use crate::lattice::vector::Seq;
    use crate::ordinal::Ordinal;

    fn base(prefix: &[i64], tail: i64) -> Element {
        Element::from_parts(
            SpaceDescriptor::Base,
            Vector::Seq(Seq::new(prefix.iter().map(|&p| Rational::from_int(p)).collect(), Rational::from_int(tail))),
        )
    }

    #[test]
    fn base_norm_formula() {
        assert_eq!(base(&[], 1).norm().unwrap(), Rational::one());
        assert_eq!(base(&[3], 0).norm().unwrap(), Rational::one());
        assert_eq!(base(&[3], 0).lift().norm().unwrap(), Rational::new(1, 7));
    }

    #[test]
    fn z_terms_are_in_the_sphere() {
        let w = SpaceDescriptor::for_stage(&Ordinal::omega()).unwrap();
        for space in [SpaceDescriptor::Base, SpaceDescriptor::Base.succ(), w.clone(), w.succ()] {
            for n in 1..5 {
                let z = z_seq(&space, n);
                assert!(z.in_sphere_S(), "{z:?}");
                assert_eq!(z_seq(&space, n + 1).leq(&z).unwrap(), Order::True);
            }
        }
        assert!(!Element::zero(&SpaceDescriptor::Base).in_sphere_S());
        assert!(!z_seq(&SpaceDescriptor::Base, 1).scale(&Rational::from_int(2)).in_sphere_S());
    }

    #[test]
    fn limit_difference_bounds() {
        let w = SpaceDescriptor::for_stage(&Ordinal::omega()).unwrap();
        let d = z_seq(&w, 1).sub(&z_seq(&w, 2)).unwrap();
        assert_eq!(d.norm().unwrap(), Rational::new(1, 3));
        let d = z_seq(&w, 1).sub(&z_seq(&w, 2).scale(&Rational::from_int(2))).unwrap();
        let b = d.norm_bounds(8);
        assert_eq!(b.upper, Rational::from_int(3));
        assert!(b.lower.is_positive());
        assert!(d.norm().is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let x = base(&[-1, 2], 0).scale(&Rational::new(2, 3));
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains("\"payload\""));
        let y: Element = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.digest(), y.digest());
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let x = base(&[], 1);
        assert!(matches!(x.add(&x.lift()), Err(Error::SpaceMismatch { .. })));
    }
}
