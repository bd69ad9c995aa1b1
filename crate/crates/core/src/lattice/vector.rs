//! Vector payloads and the space-directed lattice/linear operations on them.

use serde::{Deserialize, Serialize};

use super::space::SpaceDescriptor;
use super::tail::TailExpr;
use crate::rational::Rational;

/// An eventually constant rational sequence `(p_1, …, p_K, t, t, …)`.
///
/// Kept normalized: the last prefix entry never equals the tail, so equal
/// sequences have equal representations.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seq {
    prefix: Vec<Rational>,
    tail: Rational,
}

impl Seq {
    pub fn new(mut prefix: Vec<Rational>, tail: Rational) -> Self {
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        Seq { prefix, tail }
    }

    pub fn constant(t: Rational) -> Self {
        Seq { prefix: Vec::new(), tail: t }
    }

    pub fn prefix(&self) -> &[Rational] {
        &self.prefix
    }

    pub fn tail(&self) -> &Rational {
        &self.tail
    }

    /// 1-based coordinate access.
    pub fn get(&self, j: usize) -> &Rational {
        assert!(j >= 1, "coordinates are 1-based");
        self.prefix.get(j - 1).unwrap_or(&self.tail)
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> Seq {
        Seq::new(self.prefix.iter().map(&f).collect(), f(&self.tail))
    }

    pub fn zip(&self, other: &Seq, f: impl Fn(&Rational, &Rational) -> Rational) -> Seq {
        let len = self.prefix.len().max(other.prefix.len());
        let prefix = (1..=len).map(|j| f(self.get(j), other.get(j))).collect();
        Seq::new(prefix, f(&self.tail, &other.tail))
    }

    pub fn sup_abs(&self) -> Rational {
        self.prefix.iter().fold(self.tail.abs(), |m, x| m.max(x.abs()))
    }

    /// Coordinatewise `self <= other`.
    pub fn leq(&self, other: &Seq) -> bool {
        let len = self.prefix.len().max(other.prefix.len());
        self.tail <= other.tail && (1..=len).all(|j| self.get(j) <= other.get(j))
    }

    pub fn is_zero(&self) -> bool {
        self.prefix.is_empty() && self.tail.is_zero()
    }
}

impl std::fmt::Debug for Seq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for p in &self.prefix {
            write!(f, "{p}, ")?;
        }
        write!(f, "{}…)", self.tail)
    }
}

/// Components `1..=K` stored explicitly; the tail expression supplies every
/// component beyond `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LimVector {
    pub explicit: Vec<Vector>,
    pub tail: TailExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vector {
    Seq(Seq),
    Lim(LimVector),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BinOp {
    Add,
    Join,
    Meet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum UnOp {
    Scale(Rational),
    Pos,
    Abs,
}

impl Vector {
    pub fn zero(space: &SpaceDescriptor) -> Vector {
        match space.carrier() {
            SpaceDescriptor::Limit { .. } => {
                Vector::Lim(LimVector { explicit: Vec::new(), tail: TailExpr::Zero })
            }
            _ => Vector::Seq(Seq::constant(Rational::zero())),
        }
    }

    pub fn as_seq(&self) -> Option<&Seq> {
        match self {
            Vector::Seq(s) => Some(s),
            Vector::Lim(_) => None,
        }
    }

    pub fn as_lim(&self) -> Option<&LimVector> {
        match self {
            Vector::Lim(l) => Some(l),
            Vector::Seq(_) => None,
        }
    }

    /// True when the representation matches the carrier of `space`.
    pub fn fits(&self, space: &SpaceDescriptor) -> bool {
        matches!(
            (space.carrier(), self),
            (SpaceDescriptor::Base, Vector::Seq(_)) | (SpaceDescriptor::Limit { .. }, Vector::Lim(_))
        )
    }
}

impl LimVector {
    /// Component `m` (1-based) as a vector of the `m`-th child space.
    pub fn component(&self, space: &SpaceDescriptor, m: usize) -> Vector {
        match self.explicit.get(m - 1) {
            Some(v) => v.clone(),
            None => self.tail.materialize(space, m),
        }
    }
}

pub(crate) fn binary(space: &SpaceDescriptor, op: BinOp, a: &Vector, b: &Vector) -> Vector {
    let space = space.carrier();
    match (a, b) {
        (Vector::Seq(x), Vector::Seq(y)) => Vector::Seq(match op {
            BinOp::Add => x.zip(y, |s, t| s + t),
            BinOp::Join => x.zip(y, |s, t| s.clone().max(t.clone())),
            BinOp::Meet => x.zip(y, |s, t| s.clone().min(t.clone())),
        }),
        (Vector::Lim(x), Vector::Lim(y)) => {
            let k = x.explicit.len().max(y.explicit.len());
            let explicit = (1..=k)
                .map(|m| {
                    let child = space.child(m);
                    binary(&child, op, &x.component(space, m), &y.component(space, m))
                })
                .collect();
            let tail = match op {
                BinOp::Add => TailExpr::sum(x.tail.clone(), y.tail.clone()),
                BinOp::Join => TailExpr::join(x.tail.clone(), y.tail.clone()),
                BinOp::Meet => TailExpr::meet(x.tail.clone(), y.tail.clone()),
            };
            Vector::Lim(LimVector { explicit, tail })
        }
        _ => panic!("vector representations disagree within one space"),
    }
}

pub(crate) fn unary(space: &SpaceDescriptor, op: &UnOp, a: &Vector) -> Vector {
    let space = space.carrier();
    match a {
        Vector::Seq(x) => Vector::Seq(match op {
            UnOp::Scale(c) => x.map(|t| c * t),
            UnOp::Pos => x.map(Rational::pos_part),
            UnOp::Abs => x.map(Rational::abs),
        }),
        Vector::Lim(x) => {
            let explicit = x
                .explicit
                .iter()
                .enumerate()
                .map(|(i, v)| unary(&space.child(i + 1), op, v))
                .collect();
            let tail = match op {
                UnOp::Scale(c) => TailExpr::scale(c.clone(), x.tail.clone()),
                UnOp::Pos => TailExpr::pos(x.tail.clone()),
                UnOp::Abs => TailExpr::abs(x.tail.clone()),
            };
            Vector::Lim(LimVector { explicit, tail })
        }
    }
}
