//! Symbolic tails of limit-stage vectors.
//!
//! A [`TailExpr`] describes component `m` of a limit-stage vector for every
//! `m` at once. Its leaves are the three generator families of a limit stage:
//! zero, the canonical decreasing sequence `z_k`, and the node labels of woven
//! witness branches. Everything else is a lattice-linear combination.

use serde::{Deserialize, Serialize};

use super::basis::z_vector;
use super::space::SpaceDescriptor;
use super::vector::{binary, unary, BinOp, UnOp, Vector};
use crate::ordinal::Ordinal;
use crate::rational::Rational;
use crate::trees::{branch_component, NodeKey};

/// A woven witness node: component `m >= start` is the label of the image of
/// `node` (a node of the stage-`λ_start` witness tree) in the stage-`λ_m`
/// witness tree; components below `start` are zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchRef {
    pub stage: Ordinal,
    pub start: usize,
    pub node: NodeKey,
}

impl BranchRef {
    /// Position of this label in its string (1-based).
    pub fn position(&self) -> usize {
        self.node.depth()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailExpr {
    Zero,
    ZSeq(u64),
    Branch(BranchRef),
    Scale(Rational, Box<TailExpr>),
    Sum(Box<TailExpr>, Box<TailExpr>),
    Join(Box<TailExpr>, Box<TailExpr>),
    Meet(Box<TailExpr>, Box<TailExpr>),
    Pos(Box<TailExpr>),
    Abs(Box<TailExpr>),
}

impl TailExpr {
    /// Sums are kept as linear combinations of distinct atoms, so that
    /// `e − e` collapses to `Zero`.
    pub fn sum(a: TailExpr, b: TailExpr) -> TailExpr {
        let mut terms: Vec<(Rational, TailExpr)> = Vec::new();
        for (c, atom) in a.linear_terms(Rational::one()).into_iter().chain(b.linear_terms(Rational::one())) {
            match terms.iter_mut().find(|(_, t)| *t == atom) {
                Some((d, _)) => *d = d.clone() + c,
                None => terms.push((c, atom)),
            }
        }
        terms
            .into_iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, t)| TailExpr::scale(c, t))
            .reduce(|x, y| TailExpr::Sum(Box::new(x), Box::new(y)))
            .unwrap_or(TailExpr::Zero)
    }

    fn linear_terms(self, c: Rational) -> Vec<(Rational, TailExpr)> {
        match self {
            TailExpr::Zero => Vec::new(),
            TailExpr::Scale(d, e) => e.linear_terms(c * d),
            TailExpr::Sum(x, y) => {
                let mut v = x.linear_terms(c.clone());
                v.extend(y.linear_terms(c));
                v
            }
            atom => vec![(c, atom)],
        }
    }

    pub fn scale(c: Rational, e: TailExpr) -> TailExpr {
        if c.is_zero() || e == TailExpr::Zero {
            return TailExpr::Zero;
        }
        if c == Rational::one() {
            return e;
        }
        match e {
            TailExpr::Scale(d, inner) => TailExpr::scale(c * d, *inner),
            e => TailExpr::Scale(c, Box::new(e)),
        }
    }

    pub fn join(a: TailExpr, b: TailExpr) -> TailExpr {
        if a == b {
            return a;
        }
        match (a, b) {
            (TailExpr::Zero, b) if b.is_positive() => b,
            (a, TailExpr::Zero) if a.is_positive() => a,
            (a, b) => TailExpr::Join(Box::new(a), Box::new(b)),
        }
    }

    pub fn meet(a: TailExpr, b: TailExpr) -> TailExpr {
        if a == b {
            return a;
        }
        match (a, b) {
            (TailExpr::Zero, b) | (b, TailExpr::Zero) if b.is_positive() => TailExpr::Zero,
            (a, b) => TailExpr::Meet(Box::new(a), Box::new(b)),
        }
    }

    pub fn pos(e: TailExpr) -> TailExpr {
        if e.is_positive() {
            e
        } else if TailExpr::scale(-Rational::one(), e.clone()).is_positive() {
            TailExpr::Zero
        } else {
            TailExpr::Pos(Box::new(e))
        }
    }

    pub fn abs(e: TailExpr) -> TailExpr {
        if e.is_positive() {
            e
        } else {
            match e {
                TailExpr::Abs(_) => e,
                TailExpr::Scale(c, inner) => TailExpr::scale(c.abs(), TailExpr::abs(*inner)),
                e => TailExpr::Abs(Box::new(e)),
            }
        }
    }

    /// Syntactic positivity: every materialized component is `>= 0`.
    pub fn is_positive(&self) -> bool {
        match self {
            TailExpr::Zero | TailExpr::ZSeq(_) | TailExpr::Branch(_) => true,
            TailExpr::Pos(_) | TailExpr::Abs(_) => true,
            TailExpr::Scale(c, e) => !c.is_negative() && e.is_positive(),
            TailExpr::Sum(a, b) | TailExpr::Meet(a, b) => a.is_positive() && b.is_positive(),
            TailExpr::Join(a, b) => a.is_positive() || b.is_positive(),
        }
    }

    /// Component `m` as a vector of the `m`-th child of the limit `space`.
    pub fn materialize(&self, space: &SpaceDescriptor, m: usize) -> Vector {
        let space = space.carrier();
        let child = space.child(m);
        match self {
            TailExpr::Zero => Vector::zero(&child),
            TailExpr::ZSeq(k) => z_vector(&child, *k as usize),
            TailExpr::Branch(b) => branch_component(b, m)
                .unwrap_or_else(|e| panic!("woven branch {b:?} has no component {m}: {e}")),
            TailExpr::Scale(c, e) => unary(&child, &UnOp::Scale(c.clone()), &e.materialize(space, m)),
            TailExpr::Pos(e) => unary(&child, &UnOp::Pos, &e.materialize(space, m)),
            TailExpr::Abs(e) => unary(&child, &UnOp::Abs, &e.materialize(space, m)),
            TailExpr::Sum(a, b) => {
                binary(&child, BinOp::Add, &a.materialize(space, m), &b.materialize(space, m))
            }
            TailExpr::Join(a, b) => {
                binary(&child, BinOp::Join, &a.materialize(space, m), &b.materialize(space, m))
            }
            TailExpr::Meet(a, b) => {
                binary(&child, BinOp::Meet, &a.materialize(space, m), &b.materialize(space, m))
            }
        }
    }

    /// The eventual value of the component functionals along the tail.
    ///
    /// Every generator has an eventually constant functional value (0 for
    /// zero, 1 for z-vectors and branch labels, which lie on the unit sphere),
    /// and the functional is a lattice homomorphism, so the limit is computed
    /// exactly by structural recursion.
    pub fn phi(&self) -> Rational {
        match self {
            TailExpr::Zero => Rational::zero(),
            TailExpr::ZSeq(_) | TailExpr::Branch(_) => Rational::one(),
            TailExpr::Scale(c, e) => c * &e.phi(),
            TailExpr::Sum(a, b) => a.phi() + b.phi(),
            TailExpr::Join(a, b) => a.phi().max(b.phi()),
            TailExpr::Meet(a, b) => a.phi().min(b.phi()),
            TailExpr::Pos(e) => e.phi().pos_part(),
            TailExpr::Abs(e) => e.phi().abs(),
        }
    }

    /// A bound on `sup_m ‖component m‖` derived only from the stored family
    /// facts plus the triangle and lattice inequalities:
    ///
    /// * `‖z_k‖ = 1` and `‖y‖ = 1` for every branch label `y`;
    /// * `‖y_{i+1} − y_i‖ <= 3^-i` for consecutive labels of one woven branch;
    /// * `‖(y_i − z_n)^+‖ <= 3^-i` for a label at position `i`;
    /// * `‖a + b‖, ‖a ∨ b‖, ‖a ∧ b‖ <= ‖a‖ + ‖b‖` and `‖a^+‖ <= ‖a‖`.
    pub fn upper(&self) -> Rational {
        if let Some(b) = self.fact_bound() {
            return b;
        }
        match self {
            TailExpr::Zero => Rational::zero(),
            TailExpr::ZSeq(_) | TailExpr::Branch(_) => Rational::one(),
            TailExpr::Scale(c, e) => c.abs() * e.upper(),
            TailExpr::Sum(a, b) | TailExpr::Join(a, b) | TailExpr::Meet(a, b) => a.upper() + b.upper(),
            TailExpr::Pos(e) | TailExpr::Abs(e) => e.upper(),
        }
    }

    /// Name and bound of the family fact matching this expression, if any.
    pub fn fact(&self) -> Option<(&'static str, Rational)> {
        match self {
            TailExpr::Pos(inner) => {
                if let TailExpr::Sum(a, b) = inner.as_ref() {
                    if let (TailExpr::Branch(y), TailExpr::Scale(c, z)) = (a.as_ref(), b.as_ref()) {
                        if *c == -Rational::one() && matches!(z.as_ref(), TailExpr::ZSeq(_)) {
                            return Some(("label-below-z", Rational::inv_pow(3, y.position() as u32)));
                        }
                    }
                }
                inner.z_difference()
            }
            TailExpr::Abs(inner) => inner.fact(),
            TailExpr::Sum(a, b) => {
                if let Some(f) = self.z_difference() {
                    return Some(f);
                }
                let (TailExpr::Branch(p), TailExpr::Scale(c, q)) = (a.as_ref(), b.as_ref()) else {
                    return None;
                };
                let TailExpr::Branch(q) = q.as_ref() else { return None };
                if *c != -Rational::one() || p.stage != q.stage || p.start != q.start {
                    return None;
                }
                let (short, long) = if p.position() < q.position() { (p, q) } else { (q, p) };
                let i = short.position();
                if i >= 1 && long.position() == i + 1 && long.node.prefix(i) == short.node {
                    Some(("consecutive-labels", Rational::inv_pow(3, i as u32)))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// `z_a − z_b` is an indicator-like vector with functional value 0 whose
    /// norm is 1/3 in the base space and shrinks or is a supremum of such
    /// values higher up, so its positive part and modulus stay below 1/3.
    fn z_difference(&self) -> Option<(&'static str, Rational)> {
        let TailExpr::Sum(a, b) = self else { return None };
        match (a.as_ref(), b.as_ref()) {
            (TailExpr::ZSeq(_), TailExpr::Scale(c, z)) | (TailExpr::Scale(c, z), TailExpr::ZSeq(_))
                if *c == -Rational::one() && matches!(z.as_ref(), TailExpr::ZSeq(_)) =>
            {
                Some(("z-difference", Rational::new(1, 3)))
            }
            _ => None,
        }
    }

    fn fact_bound(&self) -> Option<Rational> {
        self.fact().map(|(_, b)| b)
    }

    /// Order facts between tails that hold in every component.
    pub fn known_leq(a: &TailExpr, b: &TailExpr) -> bool {
        if a == b {
            return true;
        }
        match (a, b) {
            (TailExpr::Zero, b) => b.is_positive(),
            (TailExpr::ZSeq(k), TailExpr::ZSeq(j)) => k >= j,
            (a, TailExpr::Join(x, y)) => TailExpr::known_leq(a, x) || TailExpr::known_leq(a, y),
            (TailExpr::Meet(x, y), b) => TailExpr::known_leq(x, b) || TailExpr::known_leq(y, b),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smart_constructors_simplify() {
        let z = TailExpr::ZSeq(2);
        assert_eq!(TailExpr::join(z.clone(), z.clone()), z);
        assert_eq!(TailExpr::sum(TailExpr::Zero, z.clone()), z);
        assert_eq!(TailExpr::scale(Rational::zero(), z.clone()), TailExpr::Zero);
        assert_eq!(TailExpr::pos(z.clone()), z);
        assert_eq!(
            TailExpr::scale(Rational::from_int(2), TailExpr::scale(Rational::new(1, 2), z.clone())),
            z
        );
    }

    #[test]
    fn phi_is_a_lattice_homomorphism_on_generators() {
        let d = TailExpr::sum(TailExpr::ZSeq(1), TailExpr::scale(-Rational::one(), TailExpr::ZSeq(2)));
        assert_eq!(d.phi(), Rational::zero());
        assert_eq!(TailExpr::pos(d.clone()).phi(), Rational::zero());
        assert_eq!(TailExpr::scale(Rational::from_int(3), TailExpr::ZSeq(4)).phi(), Rational::from_int(3));
    }

    #[test]
    fn bounds_for_differences_of_z() {
        let d = TailExpr::sum(TailExpr::ZSeq(1), TailExpr::scale(-Rational::one(), TailExpr::ZSeq(2)));
        assert_eq!(d.upper(), Rational::new(1, 3));
        assert_eq!(TailExpr::pos(TailExpr::scale(-Rational::one(), TailExpr::ZSeq(1))), TailExpr::Zero);
        let e = TailExpr::sum(TailExpr::ZSeq(1), TailExpr::scale(Rational::from_int(-2), TailExpr::ZSeq(2)));
        assert_eq!(e.upper(), Rational::from_int(3));
    }

    #[test]
    fn z_monotonicity_fact() {
        assert!(TailExpr::known_leq(&TailExpr::ZSeq(5), &TailExpr::ZSeq(2)));
        assert!(!TailExpr::known_leq(&TailExpr::ZSeq(2), &TailExpr::ZSeq(5)));
        assert!(TailExpr::known_leq(&TailExpr::Zero, &TailExpr::ZSeq(5)));
    }
}
