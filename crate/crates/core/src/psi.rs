//! The tree Ψ((z_n)) of strings `(y_1, …, y_k)` of strictly positive elements
//! with `‖(y_i − z_n)^+‖ <= ‖y_i‖/3^i` for all `i, n` and
//! `‖y_{i+1} − y_i‖ <= ‖y_i‖/3^i`.
//!
//! The quantifier over `n` is handled three ways: a single violated `n`
//! refutes (the positive part grows with `n` because `z` decreases), a clean
//! run up to a budget is a semi-verdict, and a certificate is issued when the
//! inequality provably stops changing after some index, or when stored family
//! facts bound it for every `n` at once.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::sequence::{SequenceSpec, TailRule};
use crate::lattice::{Element, NormBound, Order, Seq, SpaceDescriptor, TailExpr, Vector, DEFAULT_SAMPLE_BUDGET};
use crate::rational::Rational;
use crate::trees::FiniteTree;

/// Which defining inequality of Ψ is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Inequality {
    /// `‖(y_i − z_n)^+‖ <= ‖y_i‖/3^i`.
    Z { i: usize, n: usize },
    /// `‖y_{i+1} − y_i‖ <= ‖y_i‖/3^i`.
    Link { i: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Violated,
    Undecided,
}

/// One evaluated inequality: `lhs <= rhs`, both given as certified bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judged {
    pub inequality: Inequality,
    pub lhs: NormBound,
    pub rhs: NormBound,
    pub status: Status,
}

impl Judged {
    fn new(inequality: Inequality, lhs: NormBound, rhs: NormBound) -> Self {
        let status = if lhs.upper <= rhs.lower {
            Status::Holds
        } else if lhs.lower > rhs.upper {
            Status::Violated
        } else {
            Status::Undecided
        };
        Judged { inequality, lhs, rhs, status }
    }
}

/// An inequality established for every `n` at once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub statement: String,
    pub bound: Rational,
    pub threshold: Rational,
    pub derivation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Refuted { witness: Inequality },
    PassedUpTo { n_budget: usize },
    Certified,
    /// Bounds too loose to decide `witness` either way.
    Unknown { witness: Inequality },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiVerdict {
    pub outcome: Outcome,
    pub judged: Vec<Judged>,
    pub trace: Vec<Fact>,
}

impl PsiVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self.outcome, Outcome::Refuted { .. })
    }

    /// Certified or passed within budget.
    pub fn passes(&self) -> bool {
        matches!(self.outcome, Outcome::Certified | Outcome::PassedUpTo { .. })
    }

    /// The judged inequality that refuted the string, if any.
    pub fn refutation(&self) -> Option<&Judged> {
        match &self.outcome {
            Outcome::Refuted { witness } => self.judged.iter().find(|j| j.inequality == *witness),
            _ => None,
        }
    }
}

fn third_pow(i: usize) -> Rational {
    Rational::inv_pow(3, i as u32)
}

fn threshold(y: &Element, i: usize) -> NormBound {
    let b = y.norm_bounds(DEFAULT_SAMPLE_BUDGET);
    let s = third_pow(i);
    NormBound { lower: b.lower * &s, upper: b.upper * s }
}

fn check_inputs(z: &SequenceSpec, string: &[Element]) -> Result<()> {
    for (i, y) in string.iter().enumerate() {
        if y.space() != z.space() {
            return Err(Error::SpaceMismatch { left: z.space().to_string(), right: y.space().to_string() });
        }
        match y.is_strictly_positive() {
            Order::True => {}
            Order::False => return Err(Error::Precondition(format!("y_{} is not strictly positive", i + 1))),
            Order::UnknownBeyond(_) => {
                return Err(Error::Precondition(format!("positivity of y_{} is undecided", i + 1)))
            }
        }
    }
    Ok(())
}

fn judge_z(z: &SequenceSpec, y: &Element, i: usize, n: usize) -> Judged {
    let d = y.sub(&z.term(n)).expect("checked space").pos_part();
    Judged::new(Inequality::Z { i, n }, d.norm_bounds(DEFAULT_SAMPLE_BUDGET), threshold(y, i))
}

fn judge_link(string: &[Element], i: usize) -> Judged {
    let d = string[i].sub(&string[i - 1]).expect("checked space");
    Judged::new(Inequality::Link { i }, d.norm_bounds(DEFAULT_SAMPLE_BUDGET), threshold(&string[i - 1], i))
}

/// Index from which every term of the sequence behaves identically against
/// `v`, so that the value of `n ↦ ‖(v − c·z_{n+o})^+‖` no longer moves.
fn vector_stab(v: &Vector) -> usize {
    match v {
        Vector::Seq(s) => s.prefix().len() + 1,
        Vector::Lim(l) => l.explicit.iter().map(vector_stab).max().unwrap_or(1),
    }
}

/// `N` such that the bounds computed for `‖(y − z_n)^+‖` are the same for all
/// `n >= N`; `None` when the tail rule gives no such index.
pub fn stabilization_index(z: &SequenceSpec, y: &Element) -> Option<usize> {
    let k = z.tail_start();
    match z.tail() {
        TailRule::Constant { .. } => Some(k),
        TailRule::ZTail { offset, shift, .. } => {
            let v = match shift {
                Some(a) => y.sub(a).ok()?,
                None => y.clone(),
            };
            Some(k.max(vector_stab(v.vector()).saturating_sub(*offset as usize)).max(1))
        }
        TailRule::Formula { .. } => None,
    }
}

/// Membership check with an explicit budget on `n`.
///
/// Links are judged exactly; z-inequalities for `n <= n_budget`. The verdict
/// is `Certified` only when every position has stabilized within the budget.
pub fn psi_check(z: &SequenceSpec, string: &[Element], n_budget: usize) -> Result<PsiVerdict> {
    check_inputs(z, string)?;
    let mut judged = Vec::new();
    let mut trace = Vec::new();
    let mut undecided = None;
    let mut stabilized = true;
    for i in 1..=string.len() {
        if i >= 2 {
            let j = judge_link(string, i - 1);
            let status = j.status;
            judged.push(j);
            match status {
                Status::Violated => return Ok(refuted(Inequality::Link { i: i - 1 }, judged)),
                Status::Undecided => undecided = undecided.or(Some(Inequality::Link { i: i - 1 })),
                Status::Holds => {}
            }
        }
        let y = &string[i - 1];
        let stab = stabilization_index(z, y);
        let mut worst = Rational::zero();
        for n in 1..=n_budget {
            let j = judge_z(z, y, i, n);
            let status = j.status;
            worst = worst.max(j.lhs.upper.clone());
            judged.push(j);
            match status {
                Status::Violated => return Ok(refuted(Inequality::Z { i, n }, judged)),
                Status::Undecided => undecided = undecided.or(Some(Inequality::Z { i, n })),
                Status::Holds => {}
            }
        }
        match stab {
            Some(s) if s <= n_budget => trace.push(Fact {
                statement: format!("‖(y_{i} − z_n)^+‖ <= ‖y_{i}‖/3^{i} for all n"),
                bound: worst,
                threshold: threshold(y, i).lower,
                derivation: format!("values constant for n >= {s}; checked n <= {n_budget}"),
            }),
            _ => stabilized = false,
        }
    }
    let outcome = match undecided {
        Some(w) => Outcome::Unknown { witness: w },
        None if stabilized => Outcome::Certified,
        None => Outcome::PassedUpTo { n_budget },
    };
    Ok(PsiVerdict { outcome, judged, trace })
}

fn refuted(witness: Inequality, judged: Vec<Judged>) -> PsiVerdict {
    PsiVerdict { outcome: Outcome::Refuted { witness }, judged, trace: Vec::new() }
}

/// How the upper bound of `‖v‖` in `space` is obtained.
pub fn explain_upper(space: &SpaceDescriptor, v: &Vector) -> String {
    match space {
        SpaceDescriptor::Base => "exact: max(1/3·sup|t_j|, |lim t_j|)".into(),
        SpaceDescriptor::Succ { inner, .. } => {
            let phi = Element::from_parts(space.clone(), v.clone()).phi();
            format!("max(1/7·[{}], |φ| = {})", explain_upper(inner, v), phi.abs())
        }
        SpaceDescriptor::Limit { .. } => {
            let l = v.as_lim().expect("limit payload");
            let tail = match (&l.tail, l.tail.fact()) {
                (TailExpr::Zero, _) => "tail zero".to_string(),
                (_, Some((name, b))) => format!("tail fact {name} <= {b}"),
                (t, None) => format!("tail triangle bound <= {}", t.upper()),
            };
            format!("sup over components: {} explicit exact, {tail}", l.explicit.len())
        }
    }
}

/// Certification for every `n` by replaying the family facts and the
/// stabilization argument; falls back to [`psi_check`] when some inequality
/// cannot be certified that way.
pub fn psi_certify(z: &SequenceSpec, string: &[Element], n_budget: usize) -> Result<PsiVerdict> {
    check_inputs(z, string)?;
    let mut trace = Vec::new();
    let mut judged = Vec::new();
    let fallback = |reason: &str| -> Result<PsiVerdict> {
        let mut v = psi_check(z, string, n_budget)?;
        v.trace.insert(
            0,
            Fact {
                statement: "certification unavailable".into(),
                bound: Rational::zero(),
                threshold: Rational::zero(),
                derivation: reason.into(),
            },
        );
        Ok(v)
    };
    for i in 1..=string.len() {
        let y = &string[i - 1];
        if i >= 2 {
            let j = judge_link(string, i - 1);
            if j.status != Status::Holds {
                return fallback(&format!("link {} not certified", i - 1));
            }
            let d = string[i - 1].sub(&string[i - 2]).expect("checked space");
            trace.push(Fact {
                statement: format!("‖y_{i} − y_{}‖ <= ‖y_{}‖/3^{}", i - 1, i - 1, i - 1),
                bound: j.lhs.upper.clone(),
                threshold: j.rhs.lower.clone(),
                derivation: explain_upper(d.space(), d.vector()),
            });
            judged.push(j);
        }
        let Some(stab) = stabilization_index(z, y) else {
            return fallback("sequence tail has no stabilization index");
        };
        let mut worst: Option<Judged> = None;
        for n in 1..=stab {
            let j = judge_z(z, y, i, n);
            if j.status != Status::Holds {
                return fallback(&format!("z-inequality at i = {i}, n = {n} not certified"));
            }
            if worst.as_ref().is_none_or(|w| j.lhs.upper > w.lhs.upper) {
                worst = Some(j);
            }
        }
        let w = worst.expect("stab >= 1");
        let d = y.sub(&z.term(stab)).expect("checked space").pos_part();
        trace.push(Fact {
            statement: format!("‖(y_{i} − z_n)^+‖ <= ‖y_{i}‖/3^{i} for all n"),
            bound: w.lhs.upper.clone(),
            threshold: w.rhs.lower.clone(),
            derivation: format!("{}; bounds constant for n >= {stab}", explain_upper(d.space(), d.vector())),
        });
        judged.push(w);
    }
    Ok(PsiVerdict { outcome: Outcome::Certified, judged, trace })
}

/// From a branch of Ψ to an approximate positive lower bound: returns `y_k`
/// and a bound on the distance from `y_k` to the limit of the branch.
///
/// The error is `Σ_{i=k}^{L} ‖y_i‖/3^i` plus `M·3^{-L}/2` for the unseen part,
/// where `M` bounds `‖y_i‖` for `i > L`: `tail_norm` when the caller knows it,
/// otherwise `2‖y_L‖` (each link grows the norm by at most a factor `1 + 3^{-i}`
/// and the product of these stays below 2).
pub fn branch_to_lower_bound(
    branch: &[Element],
    k: usize,
    tail_norm: Option<Rational>,
) -> Result<(Element, Rational)> {
    if k == 0 || k > branch.len() {
        return Err(Error::Precondition(format!("k = {k} outside 1..={}", branch.len())));
    }
    for i in 1..branch.len() {
        if judge_link(branch, i).status != Status::Holds {
            return Err(Error::LinkViolated(i));
        }
    }
    let yk = branch[k - 1].clone();
    let l = branch.len();
    let mut err = Rational::zero();
    for (idx, y) in branch.iter().enumerate().skip(k - 1) {
        err += &(y.norm_bounds(DEFAULT_SAMPLE_BUDGET).upper * third_pow(idx + 1));
    }
    let m = tail_norm.unwrap_or_else(|| branch[l - 1].norm_bounds(DEFAULT_SAMPLE_BUDGET).upper * Rational::from_int(2));
    err += &(m * third_pow(l) * Rational::new(1, 2));
    Ok((yk, err))
}

/// A countable dense set of positive elements with a rule for picking a
/// member of a given open ball.
pub trait DenseSet {
    fn pick(&self, center: &Element, radius: &Rational) -> Option<Element>;
}

/// Base-space grid set `⋃_h D_h`, where `D_h` holds the nonzero
/// nonnegative eventually constant sequences with at most `h` leading
/// coordinates before the tail, all in `7^{-h}·ℕ`. Within a ball the
/// canonical pick is the coordinatewise rounding at the first level that
/// lands inside; rounding minimizes every coordinate error at once, so a level
/// meets the ball exactly when the rounding does.
#[derive(Clone, Copy, Debug)]
pub struct GridDense {
    pub max_level: u32,
}

impl Default for GridDense {
    fn default() -> Self {
        GridDense { max_level: 24 }
    }
}

fn round_to(x: &Rational, scale: &Rational) -> Rational {
    let scaled = x.clone() * scale + Rational::new(1, 2);
    Rational::from(num_rational::BigRational::from_integer(scaled.floor_int())) / scale
}

impl DenseSet for GridDense {
    fn pick(&self, center: &Element, radius: &Rational) -> Option<Element> {
        let s = center.vector().as_seq()?;
        for h in 1..=self.max_level {
            if s.prefix().len() > h as usize {
                continue;
            }
            let scale = Rational::from(num_rational::BigRational::from_integer(num_bigint::BigInt::from(7u32).pow(h)));
            let rounded = s.map(|t| round_to(&t.pos_part(), &scale));
            if rounded.is_zero() {
                continue;
            }
            let p = Element::from_parts(center.space().clone(), Vector::Seq(rounded));
            let d = p.sub(center).ok()?.norm_bounds(DEFAULT_SAMPLE_BUDGET);
            if &d.upper < radius {
                return Some(p);
            }
        }
        None
    }
}

/// A finite candidate list searched in order.
#[derive(Clone, Debug)]
pub struct ListDense(pub Vec<Element>);

impl DenseSet for ListDense {
    fn pick(&self, center: &Element, radius: &Rational) -> Option<Element> {
        self.0.iter().find(|p| {
            p.space() == center.space()
                && p.sub(center).is_ok_and(|d| &d.norm_bounds(DEFAULT_SAMPLE_BUDGET).upper < radius)
        }).cloned()
    }
}

/// From a positive lower bound to a branch of Ψ through a dense set: picks
/// `y_i` with `‖y_i − y‖ < ‖y‖/7^i`, `i = 1..=k`.
pub fn lower_bound_to_branch(y: &Element, dense: &dyn DenseSet, k: usize) -> Result<Vec<Element>> {
    if y.is_strictly_positive() != Order::True {
        return Err(Error::Precondition("lower bound must be strictly positive".into()));
    }
    let norm = y.norm()?;
    (1..=k)
        .map(|i| {
            let radius = norm.clone() * Rational::inv_pow(7, i as u32);
            dense
                .pick(y, &radius)
                .ok_or_else(|| Error::SearchExhausted(format!("no dense point within {radius} of y at i = {i}")))
        })
        .collect()
}

/// Result of exploring the pool-restricted tree `Ψ((z_n)) ∩ pool^{<ℕ}`.
#[derive(Clone, Debug)]
pub struct PsiSearch {
    /// Strings of pool indices judged in Ψ (certified or passed within budget).
    pub tree: FiniteTree<usize>,
    pub depth_reached: usize,
    /// A string whose last element lies below every `z_n`; repeating that
    /// element forever stays in Ψ, so the tree has an infinite branch.
    pub certificate: Option<Vec<usize>>,
}

/// Whether `y <= z_n` holds for every `n`, decided through the coordinatewise
/// limit of the (decreasing) base-space sequence.
pub fn below_every_term(z: &SequenceSpec, y: &Element) -> Option<bool> {
    let lim = z.coordinatewise_limit()?;
    let below_explicit = z.explicit().iter().all(|e| y.leq(e).is_ok_and(Order::is_true));
    Some(below_explicit && y.leq(&lim).ok()?.is_true())
}

/// Breadth-first exploration of `Ψ ∩ pool^{<ℕ}` up to `max_depth`, stopping at
/// `max_nodes` explored strings.
pub fn psi_tree_search(
    z: &SequenceSpec,
    pool: &[Element],
    max_depth: usize,
    n_budget: usize,
    max_nodes: usize,
) -> Result<PsiSearch> {
    let mut accepted: BTreeSet<Vec<usize>> = BTreeSet::new();
    accepted.insert(Vec::new());
    let mut certificate = None;
    let mut depth_reached = 0;
    let mut queue = VecDeque::from([Vec::<usize>::new()]);
    let mut positive: HashMap<usize, bool> = HashMap::new();
    while let Some(s) = queue.pop_front() {
        if s.len() >= max_depth {
            continue;
        }
        for (idx, y) in pool.iter().enumerate() {
            let ok = *positive.entry(idx).or_insert_with(|| y.is_strictly_positive() == Order::True);
            if !ok {
                continue;
            }
            let mut t = s.clone();
            t.push(idx);
            let string: Vec<Element> = t.iter().map(|&j| pool[j].clone()).collect();
            if !psi_check(z, &string, n_budget)?.passes() {
                continue;
            }
            if certificate.is_none() && below_every_term(z, y) == Some(true) {
                certificate = Some(t.clone());
            }
            depth_reached = depth_reached.max(t.len());
            accepted.insert(t.clone());
            if accepted.len() > max_nodes {
                return Err(Error::BudgetOverflow(format!("more than {max_nodes} strings in the pool tree")));
            }
            queue.push_back(t);
        }
    }
    Ok(PsiSearch { tree: FiniteTree::new(accepted)?, depth_reached, certificate })
}

/// Base-space helper: `t·1`.
pub fn constant(t: Rational) -> Element {
    Element::from_parts(SpaceDescriptor::Base, Vector::Seq(Seq::constant(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn constant_one_is_certified_in_base() {
        let z = SequenceSpec::z(&SpaceDescriptor::Base);
        let v = psi_check(&z, &[constant(q(1, 1))], 1).unwrap();
        assert_eq!(v.outcome, Outcome::Certified);
        assert_eq!(psi_check(&z, &[], 4).unwrap().outcome, Outcome::Certified);
    }

    #[test]
    fn constant_two_is_refuted_at_first_n() {
        let z = SequenceSpec::z(&SpaceDescriptor::Base);
        let v = psi_check(&z, &[constant(q(2, 1))], 8).unwrap();
        assert_eq!(v.outcome, Outcome::Refuted { witness: Inequality::Z { i: 1, n: 1 } });
        let r = v.refutation().unwrap();
        assert_eq!(r.lhs.lower, q(1, 1));
        assert_eq!(r.rhs.upper, q(2, 3));
    }

    #[test]
    fn positive_part_grows_with_n() {
        let z = SequenceSpec::z(&SpaceDescriptor::Base);
        let y = constant(q(5, 4));
        let mut last = Rational::zero();
        for n in 1..10 {
            let v = y.sub(&z.term(n)).unwrap().pos_part().norm().unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn certify_replays_successor_chain() {
        let s2 = SpaceDescriptor::Base.succ();
        let z = SequenceSpec::z(&s2);
        let y = vec![crate::lattice::z_seq(&s2, 1), constant(q(1, 1)).lift()];
        let v = psi_certify(&z, &y, 4).unwrap();
        assert_eq!(v.outcome, Outcome::Certified, "{v:?}");
        assert!(v.trace.iter().any(|f| f.derivation.contains("1/7")));
    }

    #[test]
    fn branch_error_matches_geometric_tail() {
        let ys: Vec<Element> = (0..5).map(|i| constant(q(1, 1) + q(1, 3i64.pow(i as u32 + 3)))).collect();
        let (_, err) = branch_to_lower_bound(&ys, 2, Some(q(1, 1))).unwrap();
        assert!(err > q(1, 6));
        let same = vec![constant(q(1, 1)); 4];
        // 1/27 + 1/81 for the listed terms, 2·3^{-4}/2 for the rest
        assert_eq!(branch_to_lower_bound(&same, 3, None).unwrap(), (constant(q(1, 1)), q(5, 81)));
    }

    #[test]
    fn grid_dense_picks_inside_the_ball() {
        let y = constant(q(3, 4));
        let b = lower_bound_to_branch(&y, &GridDense::default(), 5).unwrap();
        for (i, p) in b.iter().enumerate() {
            let d = p.sub(&y).unwrap().norm().unwrap();
            assert!(d < q(3, 4) * Rational::inv_pow(7, i as u32 + 1));
        }
    }
}
