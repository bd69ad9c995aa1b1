//! Stage-by-stage construction of the renormed lattices `X_α` together with
//! their z-sequences and witness trees, and the verifier that re-checks the
//! five inductive properties with exact arithmetic.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::lattice::sequence::SequenceSpec;
use crate::lattice::{pi_basis, z_seq, Element, NormBound, Order, SpaceDescriptor, DEFAULT_SAMPLE_BUDGET};
use crate::ordinal::{Kind, Ordinal};
use crate::psi::{psi_certify, Outcome};
use crate::rational::Rational;
use crate::report::{Check, Report, Verdict};
use crate::trees::{stage_tree, NodeKey, StructuredTree};

pub const BUNDLE_SCHEMA: u32 = 1;

/// Everything built for one stage. The π-basis, the functional and the
/// z-sequence are determined by `space`.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub stage: Ordinal,
    pub space: SpaceDescriptor,
    pub witness: Arc<StructuredTree>,
    /// Labelled witness strings stored with the bundle; verification checks
    /// them against the rebuilt tree.
    pub samples: Vec<Sample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub node: NodeKey,
    pub labels: Vec<Element>,
}

/// On-disk form of a bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleFile {
    pub schema: u32,
    pub stage: Ordinal,
    pub stage_text: String,
    pub space: SpaceDescriptor,
    pub rank_cert: Ordinal,
    pub rank_cert_text: String,
    pub witness: serde_json::Value,
    pub samples: Vec<Sample>,
}

const SAMPLE_DEPTH: usize = 3;
const SAMPLE_WIDTH: usize = 2;

/// Nodes up to `depth`, at most `width` children each, in breadth-first order.
pub fn enumerate_nodes(tree: &StructuredTree, depth: usize, width: usize) -> Result<Vec<NodeKey>> {
    let mut out = Vec::new();
    let mut frontier = vec![NodeKey::Root];
    for _ in 0..depth {
        let mut next = Vec::new();
        for n in &frontier {
            next.extend(tree.children(n, width)?);
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

/// Builds stage `alpha >= 1`. Deterministic: limit stages construct their
/// components on demand and share them through the stage cache.
pub fn build(alpha: &Ordinal) -> Result<Bundle> {
    if alpha.is_zero() {
        return Err(Error::InvalidStage(alpha.clone()));
    }
    let witness = stage_tree(alpha)?;
    let space = witness.space().clone();
    let samples = enumerate_nodes(&witness, SAMPLE_DEPTH, SAMPLE_WIDTH)?
        .into_iter()
        .map(|node| Ok(Sample { labels: witness.string(&node)?, node }))
        .collect::<Result<_>>()?;
    Ok(Bundle { stage: alpha.clone(), space, witness, samples })
}

impl Bundle {
    pub fn z(&self) -> SequenceSpec {
        SequenceSpec::z(&self.space)
    }

    pub fn to_file(&self) -> BundleFile {
        BundleFile {
            schema: BUNDLE_SCHEMA,
            stage: self.stage.clone(),
            stage_text: self.stage.to_string(),
            space: self.space.clone(),
            rank_cert: self.witness.rank_cert().clone(),
            rank_cert_text: self.witness.rank_cert().to_string(),
            witness: self.witness.skeleton(4),
            samples: self.samples.clone(),
        }
    }

    /// Rebuilds the witness from the stored stage and keeps the stored
    /// samples as given, so that tampering shows up in verification.
    pub fn from_file(file: BundleFile) -> Result<Bundle> {
        if file.schema != BUNDLE_SCHEMA {
            return Err(Error::Schema(format!("bundle schema {} (expected {BUNDLE_SCHEMA})", file.schema)));
        }
        let built = build(&file.stage)?;
        if built.space != file.space {
            return Err(Error::Schema(format!("space {} does not match stage {}", file.space, file.stage)));
        }
        Ok(Bundle { samples: file.samples, ..built })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub n_budget: usize,
    pub components: usize,
    pub depth: usize,
    /// Truncations `truncate(n+1, n)` checked for `n <= truncation`.
    pub truncation: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { n_budget: 32, components: 8, depth: 4, truncation: 8 }
    }
}

fn bounds_json(b: &NormBound) -> serde_json::Value {
    json!({"lower": b.lower, "upper": b.upper})
}

/// Re-checks the inductive properties of a bundle within `budgets`.
pub fn verify(bundle: &Bundle, budgets: &Budgets) -> Report {
    let mut report = Report::new(format!("stage {}", bundle.stage), json!(budgets));
    report.push(check_z(bundle, budgets));
    report.push(check_infimum(bundle, budgets));
    let nodes = enumerate_nodes(&bundle.witness, budgets.depth, budgets.components);
    match nodes {
        Ok(nodes) => {
            report.push(check_psi(bundle, &nodes, budgets));
            report.push(check_labels(bundle, &nodes));
        }
        Err(e) => report.push(Check::new("witness_enumeration", Verdict::Fail, e.to_string())),
    }
    report.push(check_rank(bundle, budgets));
    if let Kind::Successor(p) = bundle.stage.classify() {
        if !p.is_zero() {
            report.push(successor_chain(bundle, budgets.n_budget));
        }
    }
    report
}

fn check_z(bundle: &Bundle, budgets: &Budgets) -> Check {
    let name = "z_decreasing_in_S";
    let mut prev: Option<Element> = None;
    for n in 1..=budgets.n_budget {
        let z = z_seq(&bundle.space, n);
        if !z.in_sphere_S() {
            let b = z.norm_bounds(DEFAULT_SAMPLE_BUDGET);
            return Check::new(name, Verdict::Fail, format!("z_{n} outside S: φ = {}, norm in {b}", z.phi()));
        }
        if let Some(p) = &prev {
            match z.leq(p) {
                Ok(Order::True) => {}
                Ok(o) => {
                    let v = if o == Order::False { Verdict::Fail } else { Verdict::Unknown };
                    return Check::new(name, v, format!("z_{n} <= z_{} is {o:?}", n - 1));
                }
                Err(e) => return Check::new(name, Verdict::Fail, e.to_string()),
            }
        }
        prev = Some(z);
    }
    Check::new(name, Verdict::Pass, format!("z_n decreasing with φ = norm = 1 for n <= {}", budgets.n_budget))
}

fn check_infimum(bundle: &Bundle, budgets: &Budgets) -> Check {
    let name = "pi_basis_infimum_zero";
    let mut witnesses = Vec::new();
    for m in 1..=budgets.components {
        let b = pi_basis(&bundle.space, m);
        let found = (1..=budgets.n_budget).find(|&n| matches!(b.leq(&z_seq(&bundle.space, n)), Ok(Order::False)));
        match found {
            Some(n) => witnesses.push(json!({"m": m, "n": n})),
            None => {
                return Check::new(name, Verdict::Unknown, format!("no n <= {} with b_{m} not below z_n", budgets.n_budget))
                    .with_evidence(json!(witnesses))
            }
        }
    }
    Check::new(name, Verdict::Pass, format!("every b_m (m <= {}) fails to sit below some z_n", budgets.components))
        .with_evidence(json!(witnesses))
}

fn check_psi(bundle: &Bundle, nodes: &[NodeKey], budgets: &Budgets) -> Check {
    let name = "witness_in_psi";
    let z = bundle.z();
    let mut certified = 0usize;
    let mut passed = 0usize;
    for node in nodes {
        let string = match bundle.witness.string(node) {
            Ok(s) => s,
            Err(e) => return Check::new(name, Verdict::Fail, e.to_string()),
        };
        let v = match psi_certify(&z, &string, budgets.n_budget) {
            Ok(v) => v,
            Err(e) => return Check::new(name, Verdict::Fail, format!("{node:?}: {e}")),
        };
        match &v.outcome {
            Outcome::Certified => certified += 1,
            Outcome::PassedUpTo { .. } => passed += 1,
            Outcome::Refuted { .. } => {
                let j = v.refutation().expect("refuted verdict carries its inequality");
                return Check::new(name, Verdict::Fail, format!("{node:?}: {:?} violated", j.inequality))
                    .with_evidence(json!({"lhs": bounds_json(&j.lhs), "rhs": bounds_json(&j.rhs)}));
            }
            Outcome::Unknown { witness } => {
                return Check::new(name, Verdict::Unknown, format!("{node:?}: {witness:?} undecided"))
            }
        }
    }
    let verdict = if passed == 0 { Verdict::Pass } else { Verdict::Unknown };
    Check::new(name, verdict, format!("{certified} nodes certified, {passed} passed within budget only"))
        .with_evidence(json!({"nodes": nodes.len(), "certified": certified}))
}

fn check_labels(bundle: &Bundle, nodes: &[NodeKey]) -> Check {
    let name = "labels_in_S";
    let outside = |y: &Element| {
        format!("φ = {}, norm in {}", y.phi(), y.norm_bounds(DEFAULT_SAMPLE_BUDGET))
    };
    for node in nodes {
        match bundle.witness.label(node) {
            Ok(y) if y.in_sphere_S() => {}
            Ok(y) => return Check::new(name, Verdict::Fail, format!("{node:?}: {}", outside(&y))),
            Err(e) => return Check::new(name, Verdict::Fail, e.to_string()),
        }
    }
    for s in &bundle.samples {
        for (i, y) in s.labels.iter().enumerate() {
            if !y.in_sphere_S() {
                return Check::new(name, Verdict::Fail, format!("stored {:?} position {}: {}", s.node, i + 1, outside(y)));
            }
        }
        match bundle.witness.string(&s.node) {
            Ok(rebuilt) if rebuilt == s.labels => {}
            Ok(_) => return Check::new(name, Verdict::Fail, format!("stored {:?} differs from the rebuilt tree", s.node)),
            Err(e) => return Check::new(name, Verdict::Fail, e.to_string()),
        }
    }
    Check::new(name, Verdict::Pass, format!("{} nodes and {} stored strings in S", nodes.len(), bundle.samples.len()))
}

fn check_rank(bundle: &Bundle, budgets: &Budgets) -> Check {
    let name = "rank_certificate";
    let cert = bundle.witness.rank_cert().clone();
    if cert <= bundle.stage {
        return Check::new(name, Verdict::Fail, format!("certificate {cert} does not exceed {}", bundle.stage));
    }
    match bundle.witness.structured_rank() {
        Ok(r) if r == cert => {}
        Ok(r) => return Check::new(name, Verdict::Fail, format!("recomputed {r} differs from certificate {cert}")),
        Err(e) => return Check::new(name, Verdict::Fail, e.to_string()),
    }
    if let Some(a) = bundle.stage.as_finite() {
        let full = match bundle.witness.truncate(a as usize + 1, usize::MAX) {
            Ok(t) => t.finite_rank(),
            Err(e) => return Check::new(name, Verdict::Fail, e.to_string()),
        };
        let v = Verdict::from_bool(full == cert);
        return Check::new(name, v, format!("certificate {cert}; explicit tree rank {full}"))
            .with_evidence(json!({"explicit_rank": full.to_string()}));
    }
    let mut ranks = Vec::new();
    for n in 1..=budgets.truncation {
        let r = match bundle.witness.truncate(n + 1, n) {
            Ok(t) => t.finite_rank(),
            Err(e) => return Check::new(name, Verdict::Fail, e.to_string()),
        };
        if r < Ordinal::finite(n as u64) {
            return Check::new(name, Verdict::Fail, format!("truncation at {n} has rank {r} < {n}"));
        }
        ranks.push(r.to_string());
    }
    Check::new(name, Verdict::Pass, format!("certificate {cert} > {}; truncation ranks {}", bundle.stage, ranks.join(", ")))
        .with_evidence(json!({"truncation_ranks": ranks}))
}

/// Exact replay of the successor-stage chain: for `z_1` of the stage below
/// and `y_1` the first label of the inner witness,
/// `‖(z_1 − z_n)^+‖ = ⅐‖(z_1 − z_n)^+‖_below < ‖z_1‖/3` and
/// `‖y_1 − z_1‖ = ⅐‖y_1 − z_1‖_below <= 2/7 < ‖z_1‖/3`.
pub fn successor_chain(bundle: &Bundle, n_budget: usize) -> Check {
    let name = "successor_chain";
    let SpaceDescriptor::Succ { inner, .. } = &bundle.space else {
        return Check::new(name, Verdict::Fail, "not a successor stage");
    };
    let z1 = z_seq(&bundle.space, 1);
    let third = z1.norm_bounds(DEFAULT_SAMPLE_BUDGET).lower * Rational::new(1, 3);
    let seventh = Rational::new(1, 7);
    let scaled = |b: &NormBound| NormBound { lower: b.lower.clone() * &seventh, upper: b.upper.clone() * &seventh };
    let mut values = Vec::new();
    for n in 1..=n_budget {
        let d = z1.sub(&z_seq(&bundle.space, n)).expect("same space").pos_part();
        let here = d.norm_bounds(DEFAULT_SAMPLE_BUDGET);
        let below = d.in_space(inner).expect("same carrier").norm_bounds(DEFAULT_SAMPLE_BUDGET);
        if here != scaled(&below) || here.upper > seventh || here.upper >= third {
            return Check::new(name, Verdict::Fail, format!("n = {n}: ‖(z_1 − z_n)^+‖ in {here}, below-stage {below}"));
        }
        if n <= 2 {
            values.push(json!({"n": n, "norm": bounds_json(&here), "below": bounds_json(&below)}));
        }
    }
    let Ok(Some(first)) = bundle
        .witness
        .children(&NodeKey::Root, 1)
        .and_then(|c| c.first().map(|n| bundle.witness.children(n, 1)).transpose())
        .map(|c| c.and_then(|c| c.into_iter().next()))
    else {
        return Check::new(name, Verdict::Fail, "inner witness has no first label");
    };
    let y1 = match bundle.witness.label(&first) {
        Ok(y) => y,
        Err(e) => return Check::new(name, Verdict::Fail, e.to_string()),
    };
    let d = y1.sub(&z1).expect("same space");
    let here = d.norm_bounds(DEFAULT_SAMPLE_BUDGET);
    let below = d.in_space(inner).expect("same carrier").norm_bounds(DEFAULT_SAMPLE_BUDGET);
    let two_sevenths = Rational::new(2, 7);
    if here != scaled(&below) || here.upper > two_sevenths || here.upper >= third {
        return Check::new(name, Verdict::Fail, format!("‖y_1 − z_1‖ in {here}, below-stage {below}"));
    }
    Check::new(
        name,
        Verdict::Pass,
        format!("‖(z_1 − z_n)^+‖ <= 1/7 < 1/3 for n <= {n_budget}; ‖y_1 − z_1‖ in {here} <= 2/7 < 1/3"),
    )
    .with_evidence(json!({"z_chain": values, "y1_minus_z1": bounds_json(&here), "y1_minus_z1_below": bounds_json(&below)}))
}

/// For `x, y ∈ S` at a stage, `φ((x − y)^+) = 0` and both `(x − y)^+` and
/// `x − y` have their norm divided by exactly 7 one stage up.
pub fn successor_norm_lemma_check(x: &Element, y: &Element) -> Result<Report> {
    if !x.in_sphere_S() || !y.in_sphere_S() {
        return Err(Error::Precondition("both elements must lie in S".into()));
    }
    let mut report = Report::new(format!("successor norm identity at {}", x.space()), serde_json::Value::Null);
    let d = x.sub(y)?;
    let p = d.pos_part();
    report.push(Check::new("phi_of_positive_part", Verdict::from_bool(p.phi().is_zero()), format!("φ((x − y)^+) = {}", p.phi())));
    for (label, v) in [("positive_part", &p), ("difference", &d)] {
        let below = v.norm_bounds(DEFAULT_SAMPLE_BUDGET);
        let up = v.lift().norm_bounds(DEFAULT_SAMPLE_BUDGET);
        let seventh = Rational::new(1, 7);
        let ok = up.lower == below.lower.clone() * &seventh && up.upper == below.upper.clone() * &seventh;
        report.push(
            Check::new(format!("rescaled_{label}"), Verdict::from_bool(ok), format!("one stage up {up}, here {below}"))
                .with_evidence(json!({"up": bounds_json(&up), "here": bounds_json(&below)})),
        );
    }
    Ok(report)
}

/// Wall-clock helper used by reports that record timings.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn small() -> Budgets {
        Budgets { n_budget: 12, components: 4, depth: 3, truncation: 4 }
    }

    #[test]
    fn base_bundle_verifies() {
        let r = verify(&build(&o("1")).unwrap(), &small());
        assert_eq!(r.verdict(), Verdict::Pass, "{r}");
    }

    #[test]
    fn stage_two_replays_the_chain() {
        let r = verify(&build(&o("2")).unwrap(), &small());
        assert_eq!(r.verdict(), Verdict::Pass, "{r}");
        let c = r.check("successor_chain").unwrap();
        assert_eq!(c.evidence["y1_minus_z1"]["upper"], json!("1/21"));
    }

    #[test]
    fn tampered_label_fails_in_s() {
        let mut b = build(&o("3")).unwrap();
        b.samples[0].labels[0] = b.samples[0].labels[0].scale(&Rational::from_int(2));
        let r = verify(&b, &small());
        assert_eq!(r.check("labels_in_S").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn file_round_trip_rebuilds() {
        let b = build(&o("w+1")).unwrap();
        let f = b.to_file();
        let back: BundleFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        let again = Bundle::from_file(back).unwrap();
        assert_eq!(again.samples, b.samples);
    }

    #[test]
    fn lemma_on_z_pair() {
        let s = SpaceDescriptor::Base;
        let r = successor_norm_lemma_check(&z_seq(&s, 1), &z_seq(&s, 2)).unwrap();
        assert_eq!(r.verdict(), Verdict::Pass, "{r}");
    }
}
