//! Witness trees of the transfinite construction.
//!
//! Stage 1 is an explicit two-node tree. A successor stage prepends one label
//! to every string of the stage below. A limit stage weaves, for every start
//! index `k`, a copy of the stage-`λ_k` tree whose labels are spread across
//! all components `m >= k`: a node `s` of the stage-`λ_k` tree is sent into the
//! stage-`λ_m` tree by replaying the rank-guided descent along `s`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::finite::FiniteTree;
use crate::error::{Error, Result};
use crate::lattice::{z_seq, BranchRef, Element, LimVector, Seq, SpaceDescriptor, TailExpr, Vector};
use crate::ordinal::{Kind, Ordinal};
use crate::rational::Rational;

/// Position of a node in a [`StructuredTree`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKey {
    Root,
    /// Child-index path in an explicit tree (never empty).
    Explicit(Vec<u32>),
    /// Node of the inner tree, seen below the prepended root label.
    Prefixed(Box<NodeKey>),
    /// Node of the stage-`λ_start` tree inside a limit-stage weave.
    Woven { start: u32, inner: Box<NodeKey> },
}

impl NodeKey {
    fn explicit(path: Vec<u32>) -> NodeKey {
        if path.is_empty() {
            NodeKey::Root
        } else {
            NodeKey::Explicit(path)
        }
    }

    fn prefixed(inner: NodeKey) -> NodeKey {
        NodeKey::Prefixed(Box::new(inner))
    }

    fn woven(start: u32, inner: NodeKey) -> NodeKey {
        NodeKey::Woven { start, inner: Box::new(inner) }
    }

    pub fn is_root(&self) -> bool {
        *self == NodeKey::Root
    }

    /// Length of the label string ending at this node.
    pub fn depth(&self) -> usize {
        match self {
            NodeKey::Root => 0,
            NodeKey::Explicit(p) => p.len(),
            NodeKey::Prefixed(s) => 1 + s.depth(),
            NodeKey::Woven { inner, .. } => inner.depth(),
        }
    }

    /// The ancestor at depth `len` (`len <= depth`).
    pub fn prefix(&self, len: usize) -> NodeKey {
        assert!(len <= self.depth(), "prefix longer than node");
        if len == 0 {
            return NodeKey::Root;
        }
        match self {
            NodeKey::Root => NodeKey::Root,
            NodeKey::Explicit(p) => NodeKey::Explicit(p[..len].to_vec()),
            NodeKey::Prefixed(s) => NodeKey::prefixed(s.prefix(len - 1)),
            NodeKey::Woven { start, inner } => NodeKey::woven(*start, inner.prefix(len)),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Shape {
    Explicit { tree: FiniteTree<u32>, labels: BTreeMap<Vec<u32>, Element> },
    Prefixed { root_label: Element, inner: Arc<StructuredTree> },
    /// Components are the stage trees along the fundamental sequence of `limit`,
    /// materialized through [`stage_tree`] on demand.
    Weave { limit: Ordinal },
}

/// A countable tree of element strings with a stored rank certificate
/// `ρ(T)` and the derivation that produced it.
#[derive(Clone, Debug)]
pub struct StructuredTree {
    space: SpaceDescriptor,
    shape: Shape,
    rank_cert: Ordinal,
    trace: Vec<String>,
}

/// Components whose certificates a weave checks when it is certified.
const WEAVE_CERT_SAMPLES: u64 = 2;

impl StructuredTree {
    /// Explicit tree from label strings; children are indexed in order of
    /// first appearance.
    pub fn explicit(space: SpaceDescriptor, strings: &[Vec<Element>]) -> Result<StructuredTree> {
        let mut labels: BTreeMap<Vec<u32>, Element> = BTreeMap::new();
        let mut next: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
        let mut paths = Vec::new();
        for s in strings {
            let mut path: Vec<u32> = Vec::new();
            for y in s {
                if y.space() != &space {
                    return Err(Error::SpaceMismatch { left: space.to_string(), right: y.space().to_string() });
                }
                let existing =
                    labels.iter().find(|(p, l)| p.len() == path.len() + 1 && p.starts_with(&path) && *l == y);
                match existing {
                    Some((p, _)) => path = p.clone(),
                    None => {
                        let idx = next.entry(path.clone()).or_insert(0);
                        path.push(*idx);
                        *idx += 1;
                        labels.insert(path.clone(), y.clone());
                    }
                }
            }
            paths.push(path);
        }
        let tree = FiniteTree::prefix_closure(paths);
        let rank_cert = tree.finite_rank();
        let trace = vec![format!("explicit: {} nodes, rank {rank_cert} by child recursion", tree.len())];
        Ok(StructuredTree { space, shape: Shape::Explicit { tree, labels }, rank_cert, trace })
    }

    /// `{∅, (1,1,1,…)}` in the base space.
    pub fn base() -> StructuredTree {
        let y1 = Element::from_parts(SpaceDescriptor::Base, Vector::Seq(Seq::constant(Rational::one())));
        StructuredTree::explicit(SpaceDescriptor::Base, &[vec![y1]]).expect("valid base tree")
    }

    /// `{∅} ∪ {(root_label) ⌢ s : s ∈ inner}`.
    pub fn prefixed(root_label: Element, inner: Arc<StructuredTree>) -> Result<StructuredTree> {
        let space = inner.space.succ();
        if root_label.space() != &space {
            return Err(Error::SpaceMismatch { left: space.to_string(), right: root_label.space().to_string() });
        }
        let rank_cert = inner.rank_cert.successor();
        let trace = vec![format!("prefixed: ρ = ρ(inner) + 1 = {} + 1 = {rank_cert}", inner.rank_cert)];
        Ok(StructuredTree { space, shape: Shape::Prefixed { root_label, inner }, rank_cert, trace })
    }

    fn weave(limit: Ordinal) -> Result<StructuredTree> {
        let space = SpaceDescriptor::for_stage(&limit)?;
        let mut tree = StructuredTree {
            space,
            shape: Shape::Weave { limit: limit.clone() },
            rank_cert: Ordinal::zero(),
            trace: Vec::new(),
        };
        let (cert, trace) = tree.weave_certificate(&limit)?;
        tree.rank_cert = cert;
        tree.trace = trace;
        Ok(tree)
    }

    /// Min rule: the node `(k, s)` has the rank of `s` in the stage-`λ_k` tree,
    /// which is the minimum over its images in the stage-`λ_m` trees (`m >= k`)
    /// because the descent embedding never lowers ranks. The root therefore
    /// has rank `sup_k λ_k = λ`.
    fn weave_certificate(&self, limit: &Ordinal) -> Result<(Ordinal, Vec<String>)> {
        let mut trace = vec![format!("weave over the fundamental sequence of {limit}")];
        for m in 1..=WEAVE_CERT_SAMPLES {
            let lm = limit.fundamental_sequence(m)?;
            let comp = stage_tree(&lm)?;
            let have = comp.rank_cert.clone();
            if have != lm.successor() {
                return Err(Error::MissingCertificate(format!("component {m} (stage {lm}) certifies {have}")));
            }
            trace.push(format!("component {m}: stage {lm}, ρ = {have}, root rank {lm}"));
        }
        trace.push("min rule: rank of (k, s) = rank of s in component k; images for m >= k rank at least as high".to_string());
        trace.push(format!("root rank = sup_k λ_k = {limit}; ρ = {}", limit.successor()));
        Ok((limit.successor(), trace))
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn stage(&self) -> Ordinal {
        self.space.stage()
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn rank_cert(&self) -> &Ordinal {
        &self.rank_cert
    }

    pub fn trace(&self) -> &[String] {
        &self.trace
    }

    fn component(limit: &Ordinal, k: u32) -> Result<Arc<StructuredTree>> {
        stage_tree(&limit.fundamental_sequence(k as u64)?)
    }

    pub fn contains(&self, node: &NodeKey) -> bool {
        match (&self.shape, node) {
            (_, NodeKey::Root) => true,
            (Shape::Explicit { tree, .. }, NodeKey::Explicit(p)) => tree.contains(p),
            (Shape::Prefixed { inner, .. }, NodeKey::Prefixed(s)) => inner.contains(s),
            (Shape::Weave { limit }, NodeKey::Woven { start, inner }) => {
                *start >= 1
                    && !inner.is_root()
                    && StructuredTree::component(limit, *start).is_ok_and(|c| c.contains(inner))
            }
            _ => false,
        }
    }

    fn require(&self, node: &NodeKey) -> Result<()> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(Error::NodeNotFound(format!("{node:?}")))
        }
    }

    /// `ρ_T(node)`.
    pub fn node_rank(&self, node: &NodeKey) -> Result<Ordinal> {
        self.require(node)?;
        match (&self.shape, node) {
            (Shape::Explicit { tree, .. }, NodeKey::Root) => tree.node_rank(&[]),
            (Shape::Explicit { tree, .. }, NodeKey::Explicit(p)) => tree.node_rank(p),
            (Shape::Prefixed { inner, .. }, NodeKey::Root) => Ok(inner.node_rank(&NodeKey::Root)?.successor()),
            (Shape::Prefixed { inner, .. }, NodeKey::Prefixed(s)) => inner.node_rank(s),
            (Shape::Weave { limit }, NodeKey::Root) => Ok(limit.clone()),
            (Shape::Weave { limit }, NodeKey::Woven { start, inner }) => {
                StructuredTree::component(limit, *start)?.node_rank(inner)
            }
            _ => unreachable!("require() checked shape/key agreement"),
        }
    }

    /// Up to `limit` children of `node` in canonical order.
    ///
    /// The children of a weave root are enumerated diagonally over
    /// (start index, child of the component root).
    pub fn children(&self, node: &NodeKey, limit: usize) -> Result<Vec<NodeKey>> {
        self.require(node)?;
        Ok(match (&self.shape, node) {
            (Shape::Explicit { tree, .. }, n) => {
                let path = match n {
                    NodeKey::Explicit(p) => p.clone(),
                    _ => Vec::new(),
                };
                tree.children(&path).take(limit).map(|c| NodeKey::explicit(c.clone())).collect()
            }
            (Shape::Prefixed { .. }, NodeKey::Root) => vec![NodeKey::prefixed(NodeKey::Root)].into_iter().take(limit).collect(),
            (Shape::Prefixed { inner, .. }, NodeKey::Prefixed(s)) => {
                inner.children(s, limit)?.into_iter().map(NodeKey::prefixed).collect()
            }
            (Shape::Weave { limit: lam }, NodeKey::Root) => {
                let mut out = Vec::new();
                let mut cache: HashMap<u32, Vec<NodeKey>> = HashMap::new();
                let mut diag = 0u32;
                while out.len() < limit {
                    for k in 1..=diag + 1 {
                        let j = (diag + 1 - k) as usize;
                        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(k) {
                            e.insert(StructuredTree::component(lam, k)?.children(&NodeKey::Root, limit)?);
                        }
                        let kids = &cache[&k];
                        if let Some(c) = kids.get(j) {
                            out.push(NodeKey::woven(k, c.clone()));
                            if out.len() == limit {
                                break;
                            }
                        }
                    }
                    diag += 1;
                }
                out
            }
            (Shape::Weave { limit: lam }, NodeKey::Woven { start, inner }) => StructuredTree::component(lam, *start)?
                .children(inner, limit)?
                .into_iter()
                .map(|c| NodeKey::woven(*start, c))
                .collect(),
            _ => unreachable!("require() checked shape/key agreement"),
        })
    }

    /// The canonical child of `node` whose rank is at least `r`; requires
    /// `ρ_T(node) > r`. This is Player II's tree strategy.
    pub fn descend(&self, node: &NodeKey, r: &Ordinal) -> Result<NodeKey> {
        let here = self.node_rank(node)?;
        if here <= *r {
            return Err(Error::NoChild { node: format!("{node:?}"), wanted: r.clone() });
        }
        match (&self.shape, node) {
            (Shape::Explicit { tree, .. }, n) => {
                let path = match n {
                    NodeKey::Explicit(p) => p.clone(),
                    _ => Vec::new(),
                };
                let child = tree
                    .children(&path)
                    .find(|c| tree.node_rank(c).is_ok_and(|cr| cr >= *r))
                    .expect("a child of rank >= r exists below a node of rank > r");
                Ok(NodeKey::explicit(child.clone()))
            }
            (Shape::Prefixed { .. }, NodeKey::Root) => Ok(NodeKey::prefixed(NodeKey::Root)),
            (Shape::Prefixed { inner, .. }, NodeKey::Prefixed(s)) => Ok(NodeKey::prefixed(inner.descend(s, r)?)),
            (Shape::Weave { limit }, NodeKey::Root) => {
                let mut k = 1u32;
                loop {
                    let lk = limit.fundamental_sequence(k as u64)?;
                    if lk > *r {
                        let inner = stage_tree(&lk)?.descend(&NodeKey::Root, r)?;
                        return Ok(NodeKey::woven(k, inner));
                    }
                    k += 1;
                }
            }
            (Shape::Weave { limit }, NodeKey::Woven { start, inner }) => {
                Ok(NodeKey::woven(*start, StructuredTree::component(limit, *start)?.descend(inner, r)?))
            }
            _ => unreachable!("node_rank() checked shape/key agreement"),
        }
    }

    /// The label of a non-root node.
    pub fn label(&self, node: &NodeKey) -> Result<Element> {
        self.require(node)?;
        match (&self.shape, node) {
            (_, NodeKey::Root) => Err(Error::NodeNotFound("the root carries no label".into())),
            (Shape::Explicit { labels, .. }, NodeKey::Explicit(p)) => Ok(labels[p].clone()),
            (Shape::Prefixed { root_label, .. }, NodeKey::Prefixed(s)) if s.is_root() => Ok(root_label.clone()),
            (Shape::Prefixed { inner, .. }, NodeKey::Prefixed(s)) => Ok(inner.label(s)?.lift()),
            (Shape::Weave { limit }, NodeKey::Woven { start, inner }) => {
                let explicit = (1..*start as usize).map(|m| Vector::zero(&self.space.child(m))).collect();
                let tail = TailExpr::Branch(BranchRef {
                    stage: limit.clone(),
                    start: *start as usize,
                    node: inner.as_ref().clone(),
                });
                Ok(Element::from_parts(self.space.clone(), Vector::Lim(LimVector { explicit, tail })))
            }
            _ => unreachable!("require() checked shape/key agreement"),
        }
    }

    /// The label string `(y_1, …, y_d)` ending at `node`.
    pub fn string(&self, node: &NodeKey) -> Result<Vec<Element>> {
        (1..=node.depth()).map(|i| self.label(&node.prefix(i))).collect()
    }

    /// Rank recomputed from the shape rules, checking stored component
    /// certificates on the way.
    pub fn structured_rank(&self) -> Result<Ordinal> {
        match &self.shape {
            Shape::Explicit { tree, .. } => Ok(tree.finite_rank()),
            Shape::Prefixed { inner, .. } => Ok(inner.structured_rank()?.successor()),
            Shape::Weave { limit } => Ok(self.weave_certificate(limit)?.0),
        }
    }

    /// Explicit subtree: nodes up to `depth`, at most `components` children per
    /// node. Strings are chains of node keys.
    pub fn truncate(&self, depth: usize, components: usize) -> Result<FiniteTree<NodeKey>> {
        let mut strings = Vec::new();
        let mut queue = VecDeque::from([(NodeKey::Root, Vec::<NodeKey>::new())]);
        while let Some((node, path)) = queue.pop_front() {
            if path.len() < depth {
                for c in self.children(&node, components)? {
                    let mut p = path.clone();
                    p.push(c.clone());
                    queue.push_back((c, p));
                }
            }
            strings.push(path);
        }
        Ok(FiniteTree::prefix_closure(strings))
    }

    /// A countable subtree whose certificate is at least `target`. Stage
    /// trees are already countable and finitely described, so the canonical
    /// refinement keeps every stored witness branch.
    pub fn countable_refinement(self: &Arc<Self>, target: &Ordinal) -> Result<Arc<StructuredTree>> {
        let have = self.structured_rank()?;
        if have < *target {
            return Err(Error::CertificateBelowTarget { have, target: target.clone() });
        }
        match &self.shape {
            Shape::Prefixed { root_label, inner } => {
                let inner_target = match target.classify() {
                    Kind::Successor(p) => p,
                    _ => target.clone(),
                };
                let refined = inner.countable_refinement(&inner_target)?;
                if Arc::ptr_eq(&refined, inner) {
                    Ok(self.clone())
                } else {
                    Ok(Arc::new(StructuredTree::prefixed(root_label.clone(), refined)?))
                }
            }
            _ => Ok(self.clone()),
        }
    }

    /// Graphviz rendering of a truncation, labelled by element digests.
    pub fn to_dot(&self, depth: usize, components: usize) -> Result<String> {
        let t = self.truncate(depth, components)?;
        let mut names = HashMap::new();
        for s in t.nodes() {
            if let Some(last) = s.last() {
                names.insert(last.clone(), self.label(last)?.digest());
            }
        }
        Ok(t.to_dot(|n| names[n].clone()))
    }

    /// JSON skeleton: shape, certificate and derivation trace, recursing
    /// into the first `components` components of a weave.
    pub fn skeleton(&self, components: usize) -> serde_json::Value {
        let base = json!({
            "stage": self.stage(),
            "rank_cert": self.rank_cert,
            "rank_cert_text": self.rank_cert.to_string(),
            "trace": self.trace,
        });
        let mut obj = base.as_object().cloned().expect("object literal");
        match &self.shape {
            Shape::Explicit { labels, .. } => {
                obj.insert("shape".into(), json!("explicit"));
                let nodes: Vec<_> = labels.iter().map(|(p, l)| json!({"path": p, "label": l.digest()})).collect();
                obj.insert("nodes".into(), json!(nodes));
            }
            Shape::Prefixed { root_label, inner } => {
                obj.insert("shape".into(), json!("prefixed"));
                obj.insert("root_label".into(), json!(root_label.digest()));
                obj.insert("inner".into(), inner.skeleton(components));
            }
            Shape::Weave { limit } => {
                obj.insert("shape".into(), json!("weave"));
                let comps: Vec<_> = (1..=components as u32)
                    .filter_map(|k| StructuredTree::component(limit, k).ok().map(|c| (k, c)))
                    .map(|(k, c)| json!({"start": k, "stage": c.stage().to_string(), "rank_cert": c.rank_cert.to_string()}))
                    .collect();
                obj.insert("components".into(), json!(comps));
            }
        }
        serde_json::Value::Object(obj)
    }
}

fn stages() -> &'static Mutex<HashMap<Ordinal, Arc<StructuredTree>>> {
    static STAGES: OnceLock<Mutex<HashMap<Ordinal, Arc<StructuredTree>>>> = OnceLock::new();
    STAGES.get_or_init(Default::default)
}

/// The witness tree `T_α` of stage `α >= 1`, built once and shared.
pub fn stage_tree(alpha: &Ordinal) -> Result<Arc<StructuredTree>> {
    if let Some(t) = stages().lock().expect("stage memo poisoned").get(alpha) {
        return Ok(t.clone());
    }
    // built outside the lock: construction recurses into earlier stages
    let built = match alpha.classify() {
        Kind::Zero => return Err(Error::InvalidStage(alpha.clone())),
        Kind::Successor(p) if p.is_zero() => StructuredTree::base(),
        Kind::Successor(p) => {
            let inner = stage_tree(&p)?;
            let root_label = z_seq(&inner.space.succ(), 1);
            StructuredTree::prefixed(root_label, inner)?
        }
        Kind::Limit => StructuredTree::weave(alpha.clone())?,
    };
    let mut memo = stages().lock().expect("stage memo poisoned");
    Ok(memo.entry(alpha.clone()).or_insert_with(|| Arc::new(built)).clone())
}

/// Image in the stage-`λ_m` tree of the node `s` of the stage-`λ_k` tree,
/// obtained by replaying the descent with the ranks of the prefixes of `s`.
pub fn map_into(limit: &Ordinal, k: usize, s: &NodeKey, m: usize) -> Result<NodeKey> {
    let source = stage_tree(&limit.fundamental_sequence(k as u64)?)?;
    if m == k {
        return Ok(s.clone());
    }
    let target = stage_tree(&limit.fundamental_sequence(m as u64)?)?;
    let mut t = NodeKey::Root;
    for i in 1..=s.depth() {
        let r = source.node_rank(&s.prefix(i))?;
        t = target.descend(&t, &r)?;
    }
    Ok(t)
}

type BranchMemo = Mutex<HashMap<(BranchRef, usize), Vector>>;

fn branches() -> &'static BranchMemo {
    static BRANCHES: OnceLock<BranchMemo> = OnceLock::new();
    BRANCHES.get_or_init(Default::default)
}

/// Component `m` of a woven label: zero below the start index, otherwise the
/// label of the image node in the stage-`λ_m` tree.
pub fn branch_component(b: &BranchRef, m: usize) -> Result<Vector> {
    let child = SpaceDescriptor::for_stage(&b.stage.fundamental_sequence(m as u64)?)?;
    if m < b.start {
        return Ok(Vector::zero(&child));
    }
    let key = (b.clone(), m);
    if let Some(v) = branches().lock().expect("branch memo poisoned").get(&key) {
        return Ok(v.clone());
    }
    let node = map_into(&b.stage, b.start, &b.node, m)?;
    let comp = stage_tree(&b.stage.fundamental_sequence(m as u64)?)?;
    let v = comp.label(&node)?.into_vector();
    let mut memo = branches().lock().expect("branch memo poisoned");
    Ok(memo.entry(key).or_insert(v).clone())
}
