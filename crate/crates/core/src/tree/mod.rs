//! Rooted binary leaf-labelled trees.
//!
//! Nodes live in a flat arena stored in post-order: children always precede
//! their parent and the root is the last node. A node's subtree therefore
//! occupies the contiguous index range `[x - size(x) + 1, x]`, which makes
//! ancestry tests O(1). Trees are immutable once built; every edit produces a
//! new tree through [`TreeBuilder`].

mod canonical;
mod enumerate;
mod lca;
pub mod newick;
mod ops;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

pub use enumerate::{enumerate_topologies, topology_count, Topologies, DEFAULT_ENUMERATION_CAP};
use lca::LcaIndex;

/// Identifier of a node, valid only for the tree that issued it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub(crate) fn new(i: usize) -> Self {
        Self(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Event carried by an internal node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    Spec,
    Dup,
    Creat,
}

impl Event {
    pub fn as_str(self) -> &'static str {
        match self {
            Event::Spec => "Spec",
            Event::Dup => "Dup",
            Event::Creat => "Creat",
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Event {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Spec" => Ok(Event::Spec),
            "Dup" => Ok(Event::Dup),
            "Creat" => Ok(Event::Creat),
            other => Err(Error::InvalidArgument(alloc::format!("unknown event `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    parent: Option<NodeId>,
    children: Option<(NodeId, NodeId)>,
    name: Option<String>,
    label: Option<Event>,
    size: u32,
    depth: u32,
}

/// A rooted binary tree with uniquely named leaves and optional event labels
/// on internal nodes.
#[derive(Clone)]
pub struct PhyloTree {
    nodes: Vec<Node>,
    leaf_index: BTreeMap<String, NodeId>,
    leaves: Vec<NodeId>,
    lca: LcaIndex,
}

impl fmt::Debug for PhyloTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("PhyloTree").field(&self.to_newick()).finish()
    }
}

/// Structural equality: same node layout, names and labels.
impl PartialEq for PhyloTree {
    fn eq(&self, other: &Self) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.nodes.iter().zip(&other.nodes).all(|(a, b)| {
                a.children == b.children && a.name == b.name && a.label == b.label
            })
    }
}

impl Eq for PhyloTree {}

impl PhyloTree {
    /// Single-leaf tree.
    pub fn leaf(name: impl Into<String>) -> Self {
        let mut b = TreeBuilder::new();
        let root = b.leaf(name);
        b.build(root).expect("single leaf is always valid")
    }

    /// New tree whose root has `left` and `right` as subtrees.
    pub fn join(left: &PhyloTree, right: &PhyloTree, label: Option<Event>) -> Result<Self> {
        let mut b = TreeBuilder::with_capacity(left.len() + right.len() + 1);
        let l = b.copy_subtree(left, left.root(), true);
        let r = b.copy_subtree(right, right.root(), true);
        let root = b.internal(l, r, label);
        b.build(root)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        NodeId::new(self.nodes.len() - 1)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn leaf_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.leaves.iter().map(move |&l| self.name(l).unwrap_or_default())
    }

    /// All nodes in post-order.
    pub fn nodes(&self) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator {
        (0..self.nodes.len()).map(NodeId::new)
    }

    /// Internal nodes in post-order.
    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&x| !self.is_leaf(x))
    }

    pub fn is_leaf(&self, x: NodeId) -> bool {
        self.nodes[x.index()].children.is_none()
    }

    pub fn children(&self, x: NodeId) -> Option<(NodeId, NodeId)> {
        self.nodes[x.index()].children
    }

    pub fn parent(&self, x: NodeId) -> Option<NodeId> {
        self.nodes[x.index()].parent
    }

    pub fn sibling(&self, x: NodeId) -> Option<NodeId> {
        let (l, r) = self.children(self.parent(x)?)?;
        Some(if l == x { r } else { l })
    }

    pub fn name(&self, x: NodeId) -> Option<&str> {
        self.nodes[x.index()].name.as_deref()
    }

    pub fn label(&self, x: NodeId) -> Option<Event> {
        self.nodes[x.index()].label
    }

    pub fn depth(&self, x: NodeId) -> usize {
        self.nodes[x.index()].depth as usize
    }

    /// Number of nodes in the subtree rooted at `x`.
    pub fn subtree_size(&self, x: NodeId) -> usize {
        self.nodes[x.index()].size as usize
    }

    /// Nodes of the subtree rooted at `x`, in post-order.
    pub fn subtree_nodes(&self, x: NodeId) -> impl DoubleEndedIterator<Item = NodeId> {
        let hi = x.index();
        let lo = hi + 1 - self.subtree_size(x);
        (lo..=hi).map(NodeId::new)
    }

    pub fn subtree_leaves(&self, x: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.subtree_nodes(x).filter(move |&y| self.is_leaf(y))
    }

    /// `true` when `a` is `b` or one of its ancestors.
    #[inline]
    pub fn is_ancestor_or_self(&self, a: NodeId, b: NodeId) -> bool {
        let hi = a.index();
        let lo = hi + 1 - self.subtree_size(a);
        (lo..=hi).contains(&b.index())
    }

    /// Leaf node carrying `name`.
    pub fn find_leaf(&self, name: &str) -> Option<NodeId> {
        self.leaf_index.get(name).copied()
    }

    pub(crate) fn require_leaf(&self, name: &str) -> Result<NodeId> {
        self.find_leaf(name).ok_or_else(|| Error::UnknownLeaf(name.to_string()))
    }

    /// Lowest common ancestor of two nodes.
    #[inline]
    pub fn lca_nodes(&self, a: NodeId, b: NodeId) -> NodeId {
        self.lca.query(a, b)
    }

    /// Lowest common ancestor of a non-empty set of leaves, by name.
    pub fn lca<'a, I>(&self, leaves: I) -> Result<NodeId>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut acc: Option<NodeId> = None;
        for name in leaves {
            let x = self.require_leaf(name)?;
            acc = Some(match acc {
                None => x,
                Some(a) => self.lca_nodes(a, x),
            });
        }
        acc.ok_or(Error::EmptyLeafSet)
    }

    /// Number of edges on the path between `a` and its ancestor `b`.
    pub fn distance_to_ancestor(&self, a: NodeId, ancestor: NodeId) -> usize {
        debug_assert!(self.is_ancestor_or_self(ancestor, a));
        self.depth(a) - self.depth(ancestor)
    }

    /// Copy of the tree with every event label removed.
    pub fn without_labels(&self) -> PhyloTree {
        self.map_labels(|_, _| None)
    }

    /// Copy of the tree whose internal labels are replaced by `f(node, old)`.
    pub fn map_labels(&self, mut f: impl FnMut(NodeId, Option<Event>) -> Option<Event>) -> PhyloTree {
        let mut t = self.clone();
        for (i, node) in t.nodes.iter_mut().enumerate() {
            if node.children.is_some() {
                node.label = f(NodeId::new(i), node.label);
            }
        }
        t
    }

    /// Copy of the tree with leaves renamed through `f`.
    pub fn rename_leaves(&self, mut f: impl FnMut(&str) -> Result<String>) -> Result<PhyloTree> {
        let mut b = TreeBuilder::with_capacity(self.len());
        let mut map = Vec::with_capacity(self.len());
        for x in self.nodes() {
            let id = match self.children(x) {
                None => b.leaf(f(self.name(x).unwrap_or_default())?),
                Some((l, r)) => b.internal(map[l.index()], map[r.index()], self.label(x)),
            };
            map.push(id);
        }
        b.build(map[self.root().index()])
    }
}

enum Proto {
    Leaf(String),
    Internal(usize, usize, Option<Event>),
}

/// Incremental constructor for [`PhyloTree`].
///
/// Nodes are added bottom-up; [`TreeBuilder::build`] keeps only the nodes
/// reachable from the chosen root and lays them out in post-order.
#[derive(Default)]
pub struct TreeBuilder {
    protos: Vec<Proto>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self { protos: Vec::with_capacity(n) }
    }

    pub fn leaf(&mut self, name: impl Into<String>) -> usize {
        self.protos.push(Proto::Leaf(name.into()));
        self.protos.len() - 1
    }

    pub fn internal(&mut self, left: usize, right: usize, label: Option<Event>) -> usize {
        assert!(left < self.protos.len() && right < self.protos.len(), "child must exist");
        self.protos.push(Proto::Internal(left, right, label));
        self.protos.len() - 1
    }

    /// Copies the subtree of `t` rooted at `x`; returns the builder id of its root.
    pub fn copy_subtree(&mut self, t: &PhyloTree, x: NodeId, keep_labels: bool) -> usize {
        let first = x.index() + 1 - t.subtree_size(x);
        let mut map = vec![usize::MAX; t.subtree_size(x)];
        for y in t.subtree_nodes(x) {
            let id = match t.children(y) {
                None => self.leaf(t.name(y).unwrap_or_default()),
                Some((l, r)) => {
                    let label = if keep_labels { t.label(y) } else { None };
                    self.internal(map[l.index() - first], map[r.index() - first], label)
                }
            };
            map[y.index() - first] = id;
        }
        map[x.index() - first]
    }

    pub fn build(self, root: usize) -> Result<PhyloTree> {
        let protos = self.protos;
        // Iterative post-order walk from `root`.
        let mut order: Vec<usize> = Vec::new();
        let mut seen = vec![false; protos.len()];
        let mut stack = vec![(root, false)];
        while let Some((p, expanded)) = stack.pop() {
            if expanded {
                order.push(p);
                continue;
            }
            if core::mem::replace(&mut seen[p], true) {
                return Err(Error::MalformedTree);
            }
            stack.push((p, true));
            if let Proto::Internal(l, r, _) = protos[p] {
                stack.push((r, false));
                stack.push((l, false));
            }
        }

        let mut new_id = vec![u32::MAX; protos.len()];
        let mut nodes: Vec<Node> = Vec::with_capacity(order.len());
        let mut leaf_index = BTreeMap::new();
        let mut leaves = Vec::new();
        let mut protos: Vec<Option<Proto>> = protos.into_iter().map(Some).collect();
        for &p in &order {
            let id = NodeId::new(nodes.len());
            new_id[p] = id.0;
            let node = match protos[p].take().expect("visited once") {
                Proto::Leaf(name) => {
                    if leaf_index.insert(name.clone(), id).is_some() {
                        return Err(Error::DuplicateLeaf(name));
                    }
                    leaves.push(id);
                    Node { parent: None, children: None, name: Some(name), label: None, size: 1, depth: 0 }
                }
                Proto::Internal(l, r, label) => {
                    let (l, r) = (NodeId(new_id[l]), NodeId(new_id[r]));
                    nodes[l.index()].parent = Some(id);
                    nodes[r.index()].parent = Some(id);
                    let size = 1 + nodes[l.index()].size + nodes[r.index()].size;
                    Node { parent: None, children: Some((l, r)), name: None, label, size, depth: 0 }
                }
            };
            nodes.push(node);
        }
        for i in (0..nodes.len()).rev() {
            if let Some(p) = nodes[i].parent {
                nodes[i].depth = nodes[p.index()].depth + 1;
            }
        }
        let lca = LcaIndex::build(&nodes);
        Ok(PhyloTree { nodes, leaf_index, leaves, lca })
    }
}
