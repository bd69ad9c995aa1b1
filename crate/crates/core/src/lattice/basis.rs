//! Canonical families: the decreasing sequences `z_n`, the countable π-bases,
//! the dense set of positive base-stage vectors, and the dominating family.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::element::Element;
use super::space::SpaceDescriptor;
use super::tail::TailExpr;
use super::vector::{LimVector, Seq, Vector};
use crate::rational::Rational;

/// `z_n` as a vector of `space`: `(0,…,0,1,1,…)` with `n` zeros at the base,
/// unchanged by successor renormings, and `(z_n, z_n, …)` across the
/// components of a limit stage.
pub fn z_vector(space: &SpaceDescriptor, n: usize) -> Vector {
    match space.carrier() {
        SpaceDescriptor::Limit { .. } => {
            Vector::Lim(LimVector { explicit: Vec::new(), tail: TailExpr::ZSeq(n as u64) })
        }
        _ => Vector::Seq(Seq::new(vec![Rational::zero(); n], Rational::one())),
    }
}

pub fn z_seq(space: &SpaceDescriptor, n: usize) -> Element {
    assert!(n >= 1, "z-sequences are indexed from 1");
    Element::from_parts(space.clone(), z_vector(space, n))
}

/// Inverse of the Cantor pairing function.
pub fn unpair(k: u64) -> (u64, u64) {
    let w = ((((8 * k as u128 + 1) as f64).sqrt() as u128).saturating_sub(1) / 2) as u64;
    // float sqrt can be off by one for large k
    let mut w = w;
    while (w + 1) * (w + 2) / 2 <= k {
        w += 1;
    }
    while w * (w + 1) / 2 > k {
        w -= 1;
    }
    let t = w * (w + 1) / 2;
    let y = k - t;
    (w - y, y)
}

/// The `n`-th positive rational (`n >= 1`) in Calkin–Wilf order:
/// 1, 1/2, 2, 1/3, 3/2, 2/3, 3, …
pub fn calkin_wilf(n: u64) -> Rational {
    assert!(n >= 1);
    let (mut a, mut b) = (BigInt::from(1), BigInt::from(1));
    let bits = 64 - n.leading_zeros();
    for i in (0..bits - 1).rev() {
        if (n >> i) & 1 == 0 {
            b = &a + &b;
        } else {
            a = &a + &b;
        }
    }
    Rational::from(BigRational::new(a, b))
}

/// The countable π-basis, enumerated from `index = 1`.
///
/// Base: single-coordinate spikes `t·e_p` with `t` a positive rational.
/// Successor stages reuse the enumeration of the stage below. Limit stages
/// place a basis vector of the `n`-th component in position `n`.
pub fn pi_basis(space: &SpaceDescriptor, index: usize) -> Element {
    assert!(index >= 1, "π-basis is indexed from 1");
    Element::from_parts(space.clone(), pi_basis_vector(space, index))
}

fn pi_basis_vector(space: &SpaceDescriptor, index: usize) -> Vector {
    let (a, b) = unpair(index as u64 - 1);
    match space.carrier() {
        SpaceDescriptor::Limit { .. } => {
            let slot = a as usize + 1;
            let mut explicit: Vec<Vector> = (1..slot).map(|m| Vector::zero(&space.carrier().child(m))).collect();
            explicit.push(pi_basis_vector(&space.carrier().child(slot), b as usize + 1));
            Vector::Lim(LimVector { explicit, tail: TailExpr::Zero })
        }
        _ => {
            let mut prefix = vec![Rational::zero(); a as usize];
            prefix.push(calkin_wilf(b + 1));
            Vector::Seq(Seq::new(prefix, Rational::zero()))
        }
    }
}

/// Nonnegative rational coded by a natural number: 0 ↦ 0, n ↦ n-th Calkin–Wilf rational.
fn nonneg_rational(v: u64) -> Rational {
    if v == 0 {
        Rational::zero()
    } else {
        calkin_wilf(v)
    }
}

/// Decodes `k` into a nonnegative eventually constant sequence, or `None`
/// when the decoded vector is zero.
///
/// The code splits `k` into a prefix length and a payload; the payload is
/// unfolded by repeated unpairing into prefix entries followed by the tail.
pub fn dense_base_candidate(k: u64) -> Option<Seq> {
    let (len, mut rest) = unpair(k);
    let len = (len % 4) as usize;
    let mut coords = Vec::with_capacity(len + 1);
    for _ in 0..len {
        let (head, tail) = unpair(rest);
        coords.push(nonneg_rational(head));
        rest = tail;
    }
    let tail = nonneg_rational(rest);
    let s = Seq::new(coords, tail);
    if s.is_zero() {
        None
    } else {
        Some(s)
    }
}

/// The fixed countable dense set of positive vectors of the base space, in
/// enumeration order.
pub fn dense_base() -> impl Iterator<Item = Element> {
    (0u64..).filter_map(dense_base_candidate).map(|s| Element::from_parts(SpaceDescriptor::Base, Vector::Seq(s)))
}

/// Countable dominating family of a base-carried space: the constants `m·1`.
/// Every eventually constant sequence sits below `m·1` once `m >= sup|x|`.
pub fn dominating(space: &SpaceDescriptor, m: usize) -> Option<Element> {
    match space.carrier() {
        SpaceDescriptor::Base => Some(Element::from_parts(
            space.clone(),
            Vector::Seq(Seq::constant(Rational::from_int(m as i64))),
        )),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unpair_inverts_cantor_pairing() {
        for x in 0..40u64 {
            for y in 0..40u64 {
                let k = (x + y) * (x + y + 1) / 2 + y;
                assert_eq!(unpair(k), (x, y));
            }
        }
    }

    #[test]
    fn calkin_wilf_prefix() {
        let got: Vec<String> = (1..=7).map(|n| calkin_wilf(n).to_string()).collect();
        assert_eq!(got, ["1", "1/2", "2", "1/3", "3/2", "2/3", "3"]);
    }

    #[test]
    fn base_z_has_n_zeros() {
        let z2 = z_vector(&SpaceDescriptor::Base, 2);
        let s = z2.as_seq().unwrap();
        assert_eq!(s.get(1), &Rational::zero());
        assert_eq!(s.get(2), &Rational::zero());
        assert_eq!(s.get(3), &Rational::one());
        assert_eq!(s.tail(), &Rational::one());
    }

    #[test]
    fn dense_set_starts_with_positive_constants() {
        let first: Vec<Element> = dense_base().take(5).collect();
        assert!(first.iter().all(|e| e.vector().as_seq().is_some_and(|s| !s.is_zero())));
        assert!(dense_base().take(200).any(|e| e.vector() == &Vector::Seq(Seq::constant(Rational::one()))));
    }
}
