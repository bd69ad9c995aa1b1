//! Convergence notions on rule-represented sequences: uniform convergence,
//! σ-order convergence against a witness, the infimum-zero test through the
//! π-basis, order-unboundedness against a dominating family, and the
//! vanishing-norm criterion.
//!
//! "For all n" and "for all but finitely many n" are decided exactly for
//! sequences over the base carrier: z-tails repeat one coordinate pattern
//! from a computable index on, and formula tails reduce to eventual signs of
//! polynomials. Other carriers fall back to budgeted evidence.

use serde_json::json;

use crate::lattice::sequence::{SequenceSpec, TailRule};
use crate::lattice::{dominating, pi_basis, Element, Order, Seq, SpaceDescriptor, Vector};
use crate::poly::{sign_stable_from, Poly, RatFn};
use crate::rational::Rational;
use crate::report::{Check, Report, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ConvBudgets {
    /// Basis or dominating indices checked.
    pub m: usize,
    /// Sequence indices searched.
    pub n: usize,
}

impl Default for ConvBudgets {
    fn default() -> Self {
        ConvBudgets { m: 64, n: 64 }
    }
}

/// Largest finite index range scanned before relying on eventual signs.
const SCAN_CAP: u64 = 1 << 20;
/// Largest index tried when searching for an explicit witness term.
const SEARCH_CAP: usize = 1 << 40;

fn base_carried(space: &SpaceDescriptor) -> bool {
    space.carrier() == &SpaceDescriptor::Base
}

fn seq(e: &Element) -> &Seq {
    e.vector().as_seq().expect("base-carried element")
}

fn base_elem(space: &SpaceDescriptor, s: Seq) -> Element {
    Element::from_parts(space.clone(), Vector::Seq(s))
}

/// The shift of a tail rule as a sequence (zero when absent).
fn shift_seq(shift: &Option<Element>) -> Seq {
    shift.as_ref().map_or_else(|| Seq::constant(Rational::zero()), |e| seq(e).clone())
}

/// Number of coordinate slots needed to see every distinct coordinate of the
/// given sequences: the prefixes plus one tail slot.
fn slots(seqs: &[&Seq]) -> usize {
    seqs.iter().map(|s| s.prefix().len()).max().unwrap_or(0) + 1
}

/// First index from which the terms of a z-tail rule repeat one coordinate
/// pattern relative to `extra`: every prefix position already sees the
/// shifted zero block and at least one tail position follows it.
fn z_stab(spec: &SequenceSpec, extra: &[&Seq]) -> usize {
    let TailRule::ZTail { offset, shift, .. } = spec.tail() else {
        return spec.tail_start();
    };
    let s = shift_seq(shift);
    let mut all: Vec<&Seq> = extra.to_vec();
    all.push(&s);
    let l = slots(&all);
    spec.tail_start().max(l.saturating_sub(*offset as usize)).max(1)
}

/// Whether `c0 + c1·f(n) >= 0` for every `n >= from` (or for all large `n`).
fn affine_holds(c0: &Rational, c1: &Rational, f: &RatFn, from: u64, eventually: bool) -> Option<bool> {
    let p = f.q.scale(c0).add(&f.p.scale(c1));
    let eventual = p.is_zero() || p.eventual_sign() * f.q.eventual_sign() > 0;
    if eventually || !eventual {
        return Some(eventual);
    }
    let b = sign_stable_from(&[&p, &f.q]).max(from);
    if b - from > SCAN_CAP {
        return None;
    }
    Some((from..=b).all(|n| !(p.eval_at(n) * f.q.eval_at(n)).is_negative()))
}

fn all_affine(conds: &[(Rational, Rational)], f: &RatFn, from: u64, eventually: bool) -> Option<bool> {
    let mut out = true;
    for (c0, c1) in conds {
        out &= affine_holds(c0, c1, f, from, eventually)?;
    }
    Some(out)
}

/// `(inf, sup)` of `f(n)` over `n >= from`; `None` when unbounded.
fn ratfn_range(f: &RatFn, from: u64) -> Option<(Rational, Rational)> {
    let lim = f.limit()?;
    let (num, den) = f.forward_difference();
    let b = sign_stable_from(&[&num, &den, &f.q]).max(from);
    if b - from > SCAN_CAP {
        return None;
    }
    // monotone from b on, so the limit bounds the rest
    let mut lo = lim.clone();
    let mut hi = lim;
    for n in from..=b + 1 {
        let v = f.eval_at(n)?;
        lo = lo.min(v.clone());
        hi = hi.max(v);
    }
    Some((lo, hi))
}

/// Per-coordinate affine data of a formula tail relative to a fixed `x`:
/// term `n` minus `x` is `w + f(n)·u`.
fn formula_parts(spec: &SequenceSpec, x: Option<&Seq>) -> Option<(Seq, Seq, RatFn)> {
    let TailRule::Formula { coeff, direction, shift } = spec.tail() else { return None };
    let a = shift_seq(shift);
    let w = match x {
        Some(x) => a.zip(x, |s, t| s - t),
        None => a,
    };
    Some((w, seq(direction).clone(), coeff.clone()))
}

/// Decides `pred(x_n)` for all `n >= from` (or all large `n`) when the tail
/// is a constant or a z-tail; `None` for formula tails.
fn scan_terms(
    spec: &SequenceSpec,
    from: usize,
    eventually: bool,
    extra: &[&Seq],
    pred: &dyn Fn(&Element) -> bool,
) -> Option<bool> {
    if matches!(spec.tail(), TailRule::Formula { .. }) {
        return None;
    }
    let start = from.max(1);
    let stab = z_stab(spec, extra).max(start);
    let explicit_ok = (start..spec.tail_start()).all(|n| eventually || pred(&spec.term(n)));
    let lo = if eventually { stab } else { start };
    Some(explicit_ok && (lo..=stab + 1).all(|n| pred(&spec.term(n))))
}

/// Whether every term is `>= 0`.
pub fn is_positive_sequence(spec: &SequenceSpec) -> Option<bool> {
    if !base_carried(spec.space()) {
        return canonical_z(spec).then_some(true);
    }
    let zero = Element::zero(spec.space());
    let explicit = spec.explicit().iter().all(|e| zero.leq(e).is_ok_and(Order::is_true));
    if let Some((w, u, f)) = formula_parts(spec, None) {
        let n = slots(&[&w, &u]);
        let conds: Vec<_> = (1..=n).map(|j| (w.get(j).clone(), u.get(j).clone())).collect();
        return Some(explicit && all_affine(&conds, &f, spec.tail_start() as u64, false)?);
    }
    scan_terms(spec, 1, false, &[], &|e| zero.leq(e).is_ok_and(Order::is_true))
}

fn canonical_z(spec: &SequenceSpec) -> bool {
    matches!(spec.tail(), TailRule::ZTail { shift: None, scale, .. } if scale.is_positive())
        && spec.explicit().is_empty()
}

/// Whether `x_{n+1} <= x_n` (or `>=` when `increasing`) for every `n`.
pub fn is_monotone(spec: &SequenceSpec, increasing: bool) -> Option<bool> {
    if !base_carried(spec.space()) {
        return (canonical_z(spec) && !increasing).then_some(true);
    }
    let ordered = |a: &Element, b: &Element| {
        let (lo, hi) = if increasing { (a, b) } else { (b, a) };
        lo.leq(hi).is_ok_and(Order::is_true)
    };
    let k = spec.tail_start();
    let explicit = (1..k).all(|n| ordered(&spec.term(n), &spec.term(n + 1)));
    if let Some((_, u, f)) = formula_parts(spec, None) {
        let (num, den) = f.forward_difference();
        let d = RatFn { p: num, q: den };
        let sign = if increasing { Rational::one() } else { -Rational::one() };
        let conds: Vec<_> = (1..=slots(&[&u])).map(|j| (Rational::zero(), u.get(j).clone() * &sign)).collect();
        return Some(explicit && all_affine(&conds, &d, k as u64, false)?);
    }
    let tail = scan_terms(spec, k, false, &[], &|_| true)?;
    let stab = z_stab(spec, &[]);
    Some(explicit && tail && (k..=stab + 1).all(|n| ordered(&spec.term(n), &spec.term(n + 1))))
}

/// `sup_{n >= k}` of the sup-norm and of the limit modulus of `|x_n − x|`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Profile {
    coord: Rational,
    tail: Rational,
}

impl Profile {
    fn zero() -> Self {
        Profile { coord: Rational::zero(), tail: Rational::zero() }
    }

    fn absorb(&mut self, v: &Seq) {
        self.coord = self.coord.clone().max(v.sup_abs());
        self.tail = self.tail.clone().max(v.tail().abs());
    }

    /// Norm of the finite joins, in the limit over window length.
    fn join_norm(&self, space: &SpaceDescriptor) -> Rational {
        match space {
            SpaceDescriptor::Base => (self.coord.clone() * Rational::new(1, 3)).max(self.tail.clone()),
            SpaceDescriptor::Succ { inner, .. } => {
                (self.join_norm(inner) * Rational::new(1, 7)).max(self.tail.clone())
            }
            SpaceDescriptor::Limit { .. } => unreachable!("base-carried spaces only"),
        }
    }
}

/// Window profile from index `k`; at infinity when `k` is `None`.
fn profile(spec: &SequenceSpec, x: &Seq, k: Option<usize>) -> Option<Profile> {
    let mut p = Profile::zero();
    let diff = |e: &Element| seq(e).zip(x, |s, t| (s - t).abs());
    let from = k.unwrap_or(usize::MAX);
    for n in from..spec.tail_start() {
        p.absorb(&diff(&spec.term(n)));
    }
    let k2 = from.max(spec.tail_start());
    match spec.tail() {
        TailRule::Constant { value } => p.absorb(&diff(value)),
        TailRule::ZTail { .. } => {
            // terms from `stab` on share one pattern
            let stab = z_stab(spec, &[x]);
            let (lo, hi) = match k {
                None => (stab, stab),
                Some(_) if k2 >= stab => (k2, k2),
                Some(_) => (k2, stab),
            };
            for n in lo..=hi {
                p.absorb(&diff(&spec.term(n)));
            }
        }
        TailRule::Formula { .. } => {
            let (w, u, f) = formula_parts(spec, Some(x))?;
            let (lo, hi) = match k {
                Some(_) => ratfn_range(&f, k2 as u64)?,
                None => {
                    let l = f.limit()?;
                    (l.clone(), l)
                }
            };
            let n = slots(&[&w, &u]);
            for j in 1..=n {
                let v = (w.get(j).clone() + u.get(j).clone() * &lo)
                    .abs()
                    .max((w.get(j).clone() + u.get(j).clone() * &hi).abs());
                p.coord = p.coord.clone().max(v.clone());
                if j == n {
                    p.tail = p.tail.clone().max(v);
                }
            }
        }
    }
    Some(p)
}

/// `J_k = sup_{m >= k} ‖⋁_{n=k}^{m} |x_n − x|‖`; `None` when unbounded.
pub fn window_sup(spec: &SequenceSpec, x: &Element, k: usize) -> Option<Rational> {
    Some(profile(spec, seq(x), Some(k))?.join_norm(spec.space()))
}

/// `lim_k J_k`, the exact obstruction to uniform convergence.
pub fn window_sup_limit(spec: &SequenceSpec, x: &Element) -> Option<Rational> {
    Some(profile(spec, seq(x), None)?.join_norm(spec.space()))
}

fn least_k_below(spec: &SequenceSpec, x: &Element, eps: &Rational) -> Option<usize> {
    let below = |k: usize| window_sup(spec, x, k).is_some_and(|j| &j < eps);
    let mut hi = 1usize;
    while !below(hi) {
        if hi >= SEARCH_CAP {
            return None;
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    // below(hi) holds; below(lo) fails or lo == 0
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// A regulator `u` with `|x_n − x| <= u/m` for all large `n`, for each `m`,
/// when the sequence converges uniformly to `x`.
pub fn uniform_regulator(spec: &SequenceSpec, x: &Element) -> Option<Element> {
    if window_sup_limit(spec, x)? != Rational::zero() {
        return None;
    }
    let one = base_elem(spec.space(), Seq::constant(Rational::one()));
    match spec.tail() {
        TailRule::Formula { direction, .. } if !direction.is_zero() => Some(direction.abs()),
        TailRule::Formula { .. } | TailRule::Constant { .. } => Some(one),
        TailRule::ZTail { scale, .. } if scale.is_zero() => Some(one),
        TailRule::ZTail { .. } => None,
    }
}

pub fn uniform_conv_check(spec: &SequenceSpec, x: &Element, eps_list: &[Rational]) -> Report {
    let mut report = Report::new("uniform convergence", json!({"eps": eps_list}));
    if !base_carried(spec.space()) || x.space() != spec.space() {
        report.push(Check::new("carrier", Verdict::Unknown, "exact window norms need a base-carried space"));
        return report;
    }
    let Some(j_inf) = window_sup_limit(spec, x) else {
        report.push(Check::new("obstruction", Verdict::Fail, "window norms are unbounded"));
        return report;
    };
    for eps in eps_list {
        let name = format!("eps={eps}");
        if !eps.is_positive() {
            report.push(Check::new(name, Verdict::Fail, "ε must be positive"));
        } else if &j_inf >= eps {
            report.push(Check::new(name, Verdict::Fail, format!("stuck: every window norm is at least {j_inf}")));
        } else {
            match least_k_below(spec, x, eps) {
                Some(k) => {
                    let j = window_sup(spec, x, k).expect("bounded");
                    report.push(Check::new(name, Verdict::Pass, format!("k = {k}, window norm {j}")).with_evidence(json!({"k": k, "window_norm": j})));
                }
                None => report.push(Check::new(name, Verdict::Unknown, "search cap reached")),
            }
        }
    }
    let mut ev = json!({"limit_window_norm": j_inf});
    if let Some(p) = profile(spec, seq(x), None) {
        ev["coordinate_sup"] = json!(p.coord);
        ev["tail_sup"] = json!(p.tail);
    }
    if let Some(u) = uniform_regulator(spec, x) {
        ev["regulator"] = json!(u);
    }
    let verdict = Verdict::from_bool(j_inf.is_zero());
    let detail = if j_inf.is_zero() {
        "window norms tend to 0: uniform".to_string()
    } else {
        format!("not uniform: window norms never drop below {j_inf}")
    };
    report.push(Check::new("obstruction", verdict, detail).with_evidence(ev));
    report
}

/// `∀^∞ n: |x_n − x| <= w`.
fn eventually_dominated(spec: &SequenceSpec, x: &Seq, w: &Element) -> Option<bool> {
    let ws = seq(w);
    if let Some((d, u, f)) = formula_parts(spec, Some(x)) {
        let n = slots(&[&d, &u, ws]);
        let mut conds = Vec::new();
        for j in 1..=n {
            conds.push((ws.get(j).clone() - d.get(j).clone(), -u.get(j).clone()));
            conds.push((ws.get(j).clone() + d.get(j).clone(), u.get(j).clone()));
        }
        return all_affine(&conds, &f, 1, true);
    }
    scan_terms(spec, 1, true, &[x, ws], &|e| seq(e).zip(x, |s, t| (s - t).abs()).leq(ws))
}

pub fn sigma_order_witness_check(
    spec: &SequenceSpec,
    x: &Element,
    witness: &SequenceSpec,
    budgets: &ConvBudgets,
) -> Report {
    let mut report = Report::new("σ-order convergence", json!(budgets));
    if !base_carried(spec.space()) || witness.space() != spec.space() || x.space() != spec.space() {
        report.push(Check::new("carrier", Verdict::Unknown, "exact tail comparison needs one base-carried space"));
        return report;
    }
    match is_monotone(witness, false) {
        Some(true) => report.push(Check::new("witness_decreasing", Verdict::Pass, "witness decreasing for every n")),
        Some(false) => {
            report.push(Check::new("witness_decreasing", Verdict::Fail, "witness is not decreasing; rejected"));
            return report;
        }
        None => {
            report.push(Check::new("witness_decreasing", Verdict::Unknown, "monotonicity undecided"));
            return report;
        }
    }
    let mut failed = None;
    let mut undecided = None;
    for m in 1..=budgets.m {
        match eventually_dominated(spec, seq(x), &witness.term(m)) {
            Some(true) => {}
            Some(false) => {
                failed = Some(m);
                break;
            }
            None => undecided = undecided.or(Some(m)),
        }
    }
    report.push(match (failed, undecided) {
        (Some(m), _) => Check::new("domination", Verdict::Fail, format!("|x_n − x| <= w_{m} fails for infinitely many n"))
            .with_evidence(json!({"m": m})),
        (None, Some(m)) => Check::new("domination", Verdict::Unknown, format!("undecided at m = {m}")),
        (None, None) => Check::new("domination", Verdict::Pass, format!("∀^∞ n |x_n − x| <= w_m for m <= {}", budgets.m)),
    });
    report.extend("witness.", x_down0_check(witness, budgets));
    report
}

fn leq_true(a: &Element, b: &Element) -> bool {
    a.leq(b).is_ok_and(Order::is_true)
}

pub fn x_down0_check(spec: &SequenceSpec, budgets: &ConvBudgets) -> Report {
    let mut report = Report::new("decreasing to 0", json!(budgets));
    let shape = match (is_monotone(spec, false), is_positive_sequence(spec)) {
        (Some(true), Some(true)) => Verdict::Pass,
        (Some(false), _) | (_, Some(false)) => Verdict::Fail,
        _ => Verdict::Unknown,
    };
    report.push(Check::new("decreasing_positive", shape, format!("{shape} for every n")));
    if shape == Verdict::Fail {
        return report;
    }
    let limit = spec.coordinatewise_limit().filter(|_| base_carried(spec.space()));
    let mut witnesses = Vec::new();
    for m in 1..=budgets.m {
        let b = pi_basis(spec.space(), m);
        let found = (1..=budgets.n).find(|&n| matches!(b.leq(&spec.term(n)), Ok(Order::False)));
        match (found, &limit) {
            (Some(n), _) => witnesses.push(json!({"m": m, "n": n})),
            (None, Some(l)) if leq_true(&b, l) => {
                report.push(
                    Check::new("pi_basis", Verdict::Fail, format!("b_{m} lies below every term"))
                        .with_evidence(json!({"m": m, "b": b, "witnesses": witnesses})),
                );
                return report;
            }
            (None, Some(_)) => {
                let n = doubling_find(|n| matches!(b.leq(&spec.term(n)), Ok(Order::False)), budgets.n);
                match n {
                    Some(n) => witnesses.push(json!({"m": m, "n": n, "beyond_budget": true})),
                    None => {
                        report.push(Check::new("pi_basis", Verdict::Unknown, format!("stuck at m = {m}")));
                        return report;
                    }
                }
            }
            (None, None) => {
                report.push(
                    Check::new("pi_basis", Verdict::Unknown, format!("budget exhausted at m = {m}"))
                        .with_evidence(json!({"m": m, "witnesses": witnesses})),
                );
                return report;
            }
        }
    }
    report.push(
        Check::new("pi_basis", Verdict::Pass, format!("every b_m with m <= {} fails to sit below some x_n", budgets.m))
            .with_evidence(json!(witnesses)),
    );
    // exact infimum through the coordinatewise limit, with a basis witness
    // when it is not zero
    if let Some(l) = limit {
        if l.is_zero() {
            report.push(Check::new("infimum", Verdict::Pass, "coordinatewise limit is 0"));
        } else {
            let m = (1..=SEARCH_CAP.min(1 << 20)).find(|&m| {
                let b = pi_basis(spec.space(), m);
                leq_true(&b, &l)
            });
            let c = match m {
                Some(m) => Check::new("infimum", Verdict::Fail, format!("b_{m} lies below every term"))
                    .with_evidence(json!({"m": m, "b": pi_basis(spec.space(), m)})),
                None => Check::new("infimum", Verdict::Fail, "coordinatewise limit is a nonzero lower bound")
                    .with_evidence(json!({"limit": l})),
            };
            report.push(c);
        }
    }
    report
}

fn doubling_find(pred: impl Fn(usize) -> bool, from: usize) -> Option<usize> {
    let mut lo = from;
    let mut hi = from.max(1) * 2;
    loop {
        if pred(hi) {
            // first hit in (lo, hi]
            return (lo + 1..=hi).find(|&n| pred(n));
        }
        if hi >= SEARCH_CAP {
            return None;
        }
        lo = hi;
        hi *= 2;
    }
}

pub fn x_up_unbounded_check(spec: &SequenceSpec, budgets: &ConvBudgets) -> Report {
    let mut report = Report::new("order-unbounded increasing", json!(budgets));
    let shape = match (is_monotone(spec, true), is_positive_sequence(spec)) {
        (Some(true), Some(true)) => Verdict::Pass,
        (Some(false), _) | (_, Some(false)) => Verdict::Fail,
        _ => Verdict::Unknown,
    };
    report.push(Check::new("increasing_positive", shape, format!("{shape} for every n")));
    if shape == Verdict::Fail {
        return report;
    }
    // Some(None): exactly known to be unbounded
    let sup = base_carried(spec.space()).then(|| profile(spec, &Seq::constant(Rational::zero()), Some(1)).map(|p| p.coord));
    let mut witnesses = Vec::new();
    for m in 1..=budgets.m {
        let Some(d) = dominating(spec.space(), m) else {
            report.push(Check::new("dominating", Verdict::Unknown, "no dominating family declared for this space"));
            return report;
        };
        let beyond = |n: usize| matches!(spec.term(n).leq(&d), Ok(Order::False));
        if let Some(n) = (1..=budgets.n).find(|&n| beyond(n)) {
            witnesses.push(json!({"m": m, "n": n}));
            continue;
        }
        match &sup {
            Some(Some(s)) if s <= &Rational::from_int(m as i64) => {
                report.push(
                    Check::new("dominating", Verdict::Fail, format!("bounded: every term lies below d_{m}"))
                        .with_evidence(json!({"m": m, "sup": s})),
                );
                return report;
            }
            Some(_) => match doubling_find(beyond, budgets.n) {
                Some(n) => witnesses.push(json!({"m": m, "n": n, "beyond_budget": true})),
                None => {
                    report.push(Check::new("dominating", Verdict::Unknown, format!("stuck at m = {m}")));
                    return report;
                }
            },
            None => {
                report.push(Check::new("dominating", Verdict::Unknown, format!("budget exhausted at m = {m}")));
                return report;
            }
        }
    }
    report.push(
        Check::new("dominating", Verdict::Pass, format!("no d_m with m <= {} bounds the sequence (evidence)", budgets.m))
            .with_evidence(json!(witnesses)),
    );
    report
}

/// `lim_n ‖x_n‖`, exact for base-carried rules.
pub fn limit_norm(spec: &SequenceSpec) -> Option<Rational> {
    if !base_carried(spec.space()) {
        return None;
    }
    match spec.tail() {
        TailRule::Constant { value } => value.norm().ok(),
        TailRule::ZTail { .. } => spec.term(z_stab(spec, &[])).norm().ok(),
        TailRule::Formula { .. } => spec.coordinatewise_limit()?.norm().ok(),
    }
}

/// The vanishing-norm criterion, valid only under the caller's assertion of
/// σ-order continuity, which the report records.
pub fn down0_by_norm_check(spec: &SequenceSpec, sigma_order_continuous: bool) -> Report {
    let mut report = Report::new("decreasing with vanishing norm", json!({"sigma_order_continuous": sigma_order_continuous}));
    let shape = match (is_monotone(spec, false), is_positive_sequence(spec)) {
        (Some(true), Some(true)) => Verdict::Pass,
        (Some(false), _) | (_, Some(false)) => Verdict::Fail,
        _ => Verdict::Unknown,
    };
    report.push(Check::new("decreasing_positive", shape, format!("{shape} for every n")));
    let c = match limit_norm(spec) {
        Some(l) if l.is_zero() => Check::new("limit_norm", Verdict::Pass, "lim ‖x_n‖ = 0"),
        Some(l) => Check::new("limit_norm", Verdict::Fail, format!("norm does not vanish: lim ‖x_n‖ = {l}")),
        None => Check::new("limit_norm", Verdict::Unknown, "tail rule does not determine the limit norm"),
    };
    report.push(c.with_evidence(json!({"flag_asserted": sigma_order_continuous})));
    report
}

/// `(1/n)·u`-style formula sequence helper.
pub fn scaled_reciprocal(u: Element) -> SequenceSpec {
    SequenceSpec::formula(u, RatFn::reciprocal(1, 0), None).expect("1/n has no zero denominator for n >= 1")
}

/// `n·u`.
pub fn scaled_linear(u: Element) -> SequenceSpec {
    SequenceSpec::formula(u, RatFn::new(Poly::from_ints(&[0, 1]), Poly::from_ints(&[1])), None)
        .expect("constant denominator")
}
