use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

/// A finite tree of label strings, closed under initial segments and
/// containing the empty string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(deserialize = "L: Ord + Clone + Deserialize<'de>"), try_from = "RawTree<L>")]
pub struct FiniteTree<L: Ord> {
    nodes: BTreeSet<Vec<L>>,
}

#[derive(Deserialize)]
struct RawTree<L: Ord> {
    nodes: BTreeSet<Vec<L>>,
}

impl<L: Ord + Clone> TryFrom<RawTree<L>> for FiniteTree<L> {
    type Error = Error;

    fn try_from(raw: RawTree<L>) -> Result<Self> {
        FiniteTree::new(raw.nodes)
    }
}

impl<L: Ord + Clone> FiniteTree<L> {
    /// Validates prefix-closure; rejects input without the empty string or
    /// with a string whose initial segment is missing.
    pub fn new(nodes: impl IntoIterator<Item = Vec<L>>) -> Result<Self> {
        let nodes: BTreeSet<Vec<L>> = nodes.into_iter().collect();
        if !nodes.contains(&Vec::new()) {
            return Err(Error::InvalidTree("missing the empty string".into()));
        }
        if let Some(bad) = nodes.iter().find(|s| !s.is_empty() && !nodes.contains(&s[..s.len() - 1])) {
            return Err(Error::InvalidTree(format!("string of length {} has no parent", bad.len())));
        }
        Ok(FiniteTree { nodes })
    }

    /// The smallest tree containing every given string.
    pub fn prefix_closure(strings: impl IntoIterator<Item = Vec<L>>) -> Self {
        let mut nodes = BTreeSet::new();
        nodes.insert(Vec::new());
        for s in strings {
            for len in 1..=s.len() {
                nodes.insert(s[..len].to_vec());
            }
        }
        FiniteTree { nodes }
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Vec<L>> {
        self.nodes.iter()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, s: &[L]) -> bool {
        self.nodes.contains(s)
    }

    pub fn children<'a>(&'a self, s: &'a [L]) -> impl Iterator<Item = &'a Vec<L>> + 'a {
        self.nodes
            .range(s.to_vec()..)
            .take_while(move |t| t.starts_with(s))
            .filter(move |t| t.len() == s.len() + 1)
    }

    pub fn is_subtree_of(&self, other: &FiniteTree<L>) -> bool {
        self.nodes.is_subset(&other.nodes)
    }

    /// Rank of every node: 0 on leaves, otherwise one more than the largest
    /// child rank.
    fn heights(&self) -> BTreeMap<&[L], u64> {
        let mut by_len: Vec<&Vec<L>> = self.nodes.iter().collect();
        by_len.sort_by_key(|s| std::cmp::Reverse(s.len()));
        let mut h: BTreeMap<&[L], u64> = BTreeMap::new();
        for s in by_len {
            let own = *h.entry(s.as_slice()).or_insert(0);
            if let Some((_, parent)) = s.split_last() {
                let p = h.entry(parent).or_insert(0);
                *p = (*p).max(own + 1);
            }
        }
        h
    }

    pub fn node_rank(&self, s: &[L]) -> Result<Ordinal> {
        if !self.contains(s) {
            return Err(Error::NodeNotFound(format!("string of length {}", s.len())));
        }
        Ok(Ordinal::finite(self.heights()[s]))
    }

    /// `ρ(T) = ρ_T(∅) + 1`.
    pub fn finite_rank(&self) -> Ordinal {
        Ordinal::finite(self.heights()[[].as_slice()] + 1)
    }

    /// Graphviz rendering; `name` renders a node's last label.
    pub fn to_dot(&self, name: impl Fn(&L) -> String) -> String {
        let ids: BTreeMap<&Vec<L>, usize> = self.nodes.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut out = String::from("digraph tree {\n  n0 [label=\"∅\"];\n");
        for (s, id) in &ids {
            if let Some((last, parent)) = s.split_last() {
                let _ = writeln!(out, "  n{id} [label=\"{}\"];", name(last).replace('"', "'"));
                let _ = writeln!(out, "  n{} -> n{id};", ids[&parent.to_vec()]);
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn finite_rank<L: Ord + Clone>(t: &FiniteTree<L>) -> Ordinal {
    t.finite_rank()
}
