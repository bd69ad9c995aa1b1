#![allow(dead_code)]

use fatou_core::lattice::{Seq, Vector};
use fatou_core::{Element, Ordinal, Rational, SpaceDescriptor};
use rand::Rng;

pub fn q(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

pub fn base(prefix: &[Rational], tail: Rational) -> Element {
    Element::from_parts(SpaceDescriptor::Base, Vector::Seq(Seq::new(prefix.to_vec(), tail)))
}

pub fn stage_space(n: u64) -> SpaceDescriptor {
    SpaceDescriptor::for_stage(&Ordinal::finite(n)).expect("finite stage")
}

pub fn rand_rational(rng: &mut impl Rng, lo: i64, hi: i64, max_den: i64) -> Rational {
    Rational::new(rng.gen_range(lo..=hi), rng.gen_range(1..=max_den))
}

/// Eventually constant sequence with up to four explicit coordinates.
pub fn rand_seq(rng: &mut impl Rng, lo: i64, hi: i64) -> Seq {
    let len = rng.gen_range(0..=4);
    let prefix = (0..len).map(|_| rand_rational(rng, lo, hi, 6)).collect();
    Seq::new(prefix, rand_rational(rng, lo, hi, 6))
}

pub fn rand_element(rng: &mut impl Rng, space: &SpaceDescriptor) -> Element {
    let s = if rng.gen_ratio(1, 20) { Seq::constant(Rational::zero()) } else { rand_seq(rng, -12, 12) };
    Element::from_parts(space.clone(), Vector::Seq(s))
}

/// Strictly positive: nonnegative coordinates and a positive tail.
pub fn rand_positive(rng: &mut impl Rng) -> Element {
    let len = rng.gen_range(0..=3);
    let prefix: Vec<Rational> = (0..len).map(|_| rand_rational(rng, 0, 9, 5)).collect();
    base(&prefix, rand_rational(rng, 1, 9, 5))
}
