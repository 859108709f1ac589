//! Reconstruction of a protein tree, with its creation nodes, from all of
//! its inclusion-wise maximum creation-free subtrees.
//!
//! Proteins are grouped into classes of equal *span* (the set of input
//! subtrees containing them). Classes are then merged pairwise until one
//! remains: two classes with disjoint spans whose complements look alike
//! in every subtree are joined under a new creation node; otherwise a
//! previously built class is grafted into another one at the unique
//! position compatible with the input subtrees.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::reconcile::{apparent_creations, LeafMapping};
use crate::tree::{Event, NodeId, PhyloTree};

/// Ordered list of input subtrees `P_1..P_k` over the universe of their leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreeFamily {
    trees: Vec<PhyloTree>,
    universe: Vec<String>,
    /// `leaf_ids[i][x]`: universe index of node `x` of `P_i`, or `usize::MAX`.
    leaf_ids: Vec<Vec<usize>>,
}

impl SubtreeFamily {
    pub fn new(trees: Vec<PhyloTree>) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::InconsistentFamily("empty family".to_string()));
        }
        let mut names: Vec<String> =
            trees.iter().flat_map(|t| t.leaf_names().map(str::to_string)).collect();
        names.sort_unstable();
        names.dedup();
        let leaf_ids = trees
            .iter()
            .map(|t| {
                t.nodes()
                    .map(|x| match t.name(x) {
                        Some(n) if t.is_leaf(x) => names.binary_search_by(|m| m.as_str().cmp(n)).expect("known leaf"),
                        _ => usize::MAX,
                    })
                    .collect()
            })
            .collect();
        Ok(Self { trees, universe: names, leaf_ids })
    }

    pub fn trees(&self) -> &[PhyloTree] {
        &self.trees
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Sorted union of all leaf names.
    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    fn leaf_set(&self, i: usize) -> BitSet {
        let mut s = BitSet::new(self.universe.len());
        for &l in self.trees[i].leaves() {
            s.insert(self.leaf_ids[i][l.index()]);
        }
        s
    }

    /// `P_i` restricted to the universe leaves accepted by `keep`.
    fn restrict(&self, i: usize, keep: impl Fn(usize) -> bool) -> Option<PhyloTree> {
        let ids = &self.leaf_ids[i];
        let mask: Vec<bool> = ids.iter().map(|&id| id != usize::MAX && keep(id)).collect();
        self.trees[i].restrict_mask(&mask)
    }

    fn restricted_shape(&self, i: usize, keep: impl Fn(usize) -> bool) -> String {
        self.restrict(i, keep).map(|t| t.canonical_shape()).unwrap_or_default()
    }
}

/// `span(x)` for every protein `x`: indices of the subtrees containing it.
pub fn compute_spans(family: &SubtreeFamily) -> BTreeMap<String, Vec<usize>> {
    let mut spans: BTreeMap<String, Vec<usize>> =
        family.universe.iter().map(|n| (n.clone(), Vec::new())).collect();
    for (i, t) in family.trees.iter().enumerate() {
        for name in t.leaf_names() {
            spans.get_mut(name).expect("universe covers all leaves").push(i);
        }
    }
    spans
}

/// One class of the span partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanClass {
    /// Sorted leaf names.
    pub leaves: Vec<String>,
    /// Sorted indices of the subtrees in the span.
    pub span: Vec<usize>,
    /// `P_i` restricted to the class, identical for every `P_i` in the span.
    pub tree: PhyloTree,
}

/// Classes ordered by their smallest leaf name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanPartition {
    pub classes: Vec<SpanClass>,
}

/// Internal working class: bit sets over the universe and the family.
#[derive(Clone, Debug)]
struct Class {
    leaves: BitSet,
    key: usize,
    span: BitSet,
    tree: PhyloTree,
    built: bool,
}

fn partition_classes(family: &SubtreeFamily) -> Result<Vec<Class>> {
    let n = family.universe.len();
    let k = family.len();
    let mut spans = vec![BitSet::new(k); n];
    for i in 0..k {
        for id in family.leaf_set(i).iter() {
            spans[id].insert(i);
        }
    }
    let mut groups: BTreeMap<&BitSet, Vec<usize>> = BTreeMap::new();
    for (id, span) in spans.iter().enumerate() {
        groups.entry(span).or_default().push(id);
    }
    let mut classes = Vec::with_capacity(groups.len());
    for (span, ids) in groups {
        let mut leaves = BitSet::new(n);
        for &id in &ids {
            leaves.insert(id);
        }
        let mut tree: Option<PhyloTree> = None;
        for i in span.iter() {
            let t = family.restrict(i, |id| leaves.contains(id)).expect("class leaves lie in every span member");
            match &tree {
                None => tree = Some(t.without_labels()),
                Some(first) if first.canonical_shape() != t.canonical_shape() => {
                    return Err(Error::InconsistentFamily(format!(
                        "subtrees disagree on the proteins {{{}}}",
                        ids.iter().map(|&id| family.universe[id].as_str()).collect::<Vec<_>>().join(",")
                    )));
                }
                Some(_) => {}
            }
        }
        let key = ids[0];
        classes.push(Class { leaves, key, span: span.clone(), tree: tree.expect("span is non-empty"), built: false });
    }
    classes.sort_by_key(|c| c.key);
    Ok(classes)
}

/// Coarsest partition of the proteins into classes of equal span.
pub fn span_partition(family: &SubtreeFamily) -> Result<SpanPartition> {
    let classes = partition_classes(family)?
        .into_iter()
        .map(|c| SpanClass {
            leaves: c.leaves.iter().map(|id| family.universe[id].clone()).collect(),
            span: c.span.iter().collect(),
            tree: c.tree,
        })
        .collect();
    Ok(SpanPartition { classes })
}

/// Complement restrictions `{P_i | L(P_i) - S : P_i in span}` as a sorted
/// multiset of canonical shapes; an empty restriction encodes as `""`.
fn complements(family: &SubtreeFamily, leaves: &BitSet, span: &BitSet) -> Vec<String> {
    let mut out: Vec<String> = span.iter().map(|i| family.restricted_shape(i, |id| !leaves.contains(id))).collect();
    out.sort_unstable();
    out
}

fn joinable(family: &SubtreeFamily, u: &Class, v: &Class) -> bool {
    !u.span.intersects(&v.span) && complements(family, &u.leaves, &u.span) == complements(family, &v.leaves, &v.span)
}

/// Case-a test for classes `u` and `v` of `part`: disjoint spans and equal
/// complement restrictions.
pub fn check_case_a(family: &SubtreeFamily, part: &SpanPartition, u: usize, v: usize) -> bool {
    let to_class = |c: &SpanClass| {
        let mut leaves = BitSet::new(family.universe.len());
        for name in &c.leaves {
            if let Ok(id) = family.universe.binary_search(name) {
                leaves.insert(id);
            }
        }
        let mut span = BitSet::new(family.len());
        for &i in &c.span {
            span.insert(i);
        }
        Class { leaves, key: 0, span, tree: c.tree.clone(), built: false }
    };
    u != v && joinable(family, &to_class(&part.classes[u]), &to_class(&part.classes[v]))
}

/// Step counts of one assembly run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AssemblyTrace {
    /// Creation joins.
    pub joins: usize,
    /// Compatible grafts.
    pub grafts: usize,
}

/// Protein tree whose restriction to each input subtree's leaves is that
/// subtree, with `Creat` exactly on the join nodes.
pub fn assemble_protein_tree(family: &SubtreeFamily) -> Result<PhyloTree> {
    assemble_protein_tree_traced(family).map(|(t, _)| t)
}

pub fn assemble_protein_tree_traced(family: &SubtreeFamily) -> Result<(PhyloTree, AssemblyTrace)> {
    let mut classes = partition_classes(family)?;
    let mut trace = AssemblyTrace::default();
    while classes.len() > 1 {
        if let Some((a, b)) = find_join(family, &classes) {
            let v = classes.remove(b);
            let u = &mut classes[a];
            u.tree = PhyloTree::join(&u.tree, &v.tree, Some(Event::Creat))?;
            u.leaves.union_with(&v.leaves);
            u.key = u.key.min(v.key);
            u.built = true;
            for t in &mut classes {
                t.span.difference_with(&v.span);
            }
            trace.joins += 1;
        } else {
            let (a, b, tree) = find_graft(family, &classes)?;
            let v = classes.remove(b);
            let u = &mut classes[a];
            u.tree = tree;
            u.leaves.union_with(&v.leaves);
            u.key = u.key.min(v.key);
            u.built = true;
            trace.grafts += 1;
        }
        classes.sort_by_key(|c| c.key);
    }
    let last = classes.pop().expect("partition is non-empty");
    Ok((last.tree, trace))
}

/// First case-a pair `(a, b)`, `a < b`, in class order.
fn find_join(family: &SubtreeFamily, classes: &[Class]) -> Option<(usize, usize)> {
    let shapes: Vec<Vec<String>> = classes.iter().map(|c| complements(family, &c.leaves, &c.span)).collect();
    (0..classes.len()).find_map(|a| {
        (a + 1..classes.len())
            .find(|&b| !classes[a].span.intersects(&classes[b].span) && shapes[a] == shapes[b])
            .map(|b| (a, b))
    })
}

/// Nodes of `t` not strictly inside a creation-joined block; grafting
/// above any of them keeps every block intact.
fn open_positions(t: &PhyloTree) -> Vec<NodeId> {
    let mut blocked = vec![false; t.len()];
    for x in t.nodes().rev() {
        if let Some((l, r)) = t.children(x) {
            let b = blocked[x.index()] || t.label(x) == Some(Event::Creat);
            blocked[l.index()] = b;
            blocked[r.index()] = b;
        }
    }
    t.nodes().filter(|x| !blocked[x.index()]).collect()
}

fn is_block(c: &Class) -> bool {
    c.tree.label(c.tree.root()) == Some(Event::Creat)
}

/// First pair of equal-span classes, one of them already built, that has a
/// compatible graft; the graft must be unique. Pairs made of a block and a
/// non-block class come first, so blocks enter their host one at a time.
fn find_graft(family: &SubtreeFamily, classes: &[Class]) -> Result<(usize, usize, PhyloTree)> {
    let mut pairs: Vec<(bool, usize, usize)> = Vec::new();
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            let (ca, cb) = (&classes[a], &classes[b]);
            if ca.span == cb.span && (ca.built || cb.built) {
                pairs.push((is_block(ca) == is_block(cb), a, b));
            }
        }
    }
    pairs.sort_by_key(|&(same_kind, _, _)| same_kind);
    for (_, a, b) in pairs {
        {
            let (ca, cb) = (&classes[a], &classes[b]);
            let mut found: Vec<(String, PhyloTree)> = Vec::new();
            for (donor, host) in [(ca, cb), (cb, ca)] {
                for at in open_positions(&host.tree) {
                    let cand = host.tree.graft(&donor.tree, at)?;
                    if compatible(family, &cand, &ca.leaves, &cb.leaves, &host.span) {
                        let key = cand.canonical_form();
                        if !found.iter().any(|(k, _)| *k == key) {
                            found.push((key, cand));
                        }
                    }
                }
            }
            match found.len() {
                0 => continue,
                1 => return Ok((a, b, found.pop().expect("one candidate").1)),
                n => {
                    return Err(Error::InconsistentFamily(format!(
                        "{n} distinct compatible grafts for one class pair"
                    )))
                }
            }
        }
    }
    Err(Error::InconsistentFamily("no creation join and no compatible graft".to_string()))
}

/// `cand|S_t = P_i|S_t` with `S_t = (S_u ∪ S_v) ∩ L(P_i)` for every `P_i` in `span`.
fn compatible(family: &SubtreeFamily, cand: &PhyloTree, a: &BitSet, b: &BitSet, span: &BitSet) -> bool {
    let cand_ids: Vec<usize> = cand
        .nodes()
        .map(|x| match cand.name(x) {
            Some(n) if cand.is_leaf(x) => family.universe.binary_search_by(|m| m.as_str().cmp(n)).expect("known leaf"),
            _ => usize::MAX,
        })
        .collect();
    span.iter().all(|i| {
        let members = family.leaf_set(i);
        let within = |id: usize| members.contains(id) && (a.contains(id) || b.contains(id));
        let mask: Vec<bool> = cand_ids.iter().map(|&id| id != usize::MAX && within(id)).collect();
        let lhs = cand.restrict_mask(&mask).map(|t| t.canonical_shape()).unwrap_or_default();
        lhs == family.restricted_shape(i, within)
    })
}

pub const DEFAULT_CREATION_CAP: usize = 12;

/// All inclusion-maximal leaf sets of `protein` whose pairwise LCAs are
/// never `Creat`, each as an unlabelled restriction of `protein`.
///
/// Every internal node must be labelled and every apparent creation must
/// carry `Creat`.
pub fn extract_max_creation_free_subtrees(protein: &PhyloTree, g: &LeafMapping) -> Result<SubtreeFamily> {
    extract_with_cap(protein, g, DEFAULT_CREATION_CAP)
}

pub fn extract_with_cap(protein: &PhyloTree, g: &LeafMapping, cap: usize) -> Result<SubtreeFamily> {
    if let Some(x) = protein.internal_nodes().find(|&x| protein.label(x).is_none()) {
        return Err(Error::InvalidArgument(format!("internal node {x} has no event label")));
    }
    if let Some(x) = apparent_creations(protein, g)?.into_iter().find(|&x| protein.label(x) != Some(Event::Creat)) {
        return Err(Error::InvalidArgument(format!("apparent creation {x} is not labelled Creat")));
    }
    let creations = protein.internal_nodes().filter(|&x| protein.label(x) == Some(Event::Creat)).count();
    if creations > cap {
        return Err(Error::CapExceeded { size: creations, cap });
    }

    let n = protein.len();
    let mut sets: Vec<Vec<BitSet>> = Vec::with_capacity(n);
    for x in protein.nodes() {
        let here = match protein.children(x) {
            None => {
                let mut s = BitSet::new(n);
                s.insert(x.index());
                vec![s]
            }
            Some((l, r)) => {
                let (left, right) = (&sets[l.index()], &sets[r.index()]);
                if protein.label(x) == Some(Event::Creat) {
                    left.iter().chain(right).cloned().collect()
                } else {
                    let mut out = Vec::with_capacity(left.len() * right.len());
                    for a in left {
                        for b in right {
                            let mut s = a.clone();
                            s.union_with(b);
                            out.push(s);
                        }
                    }
                    out
                }
            }
        };
        sets.push(here);
    }
    let mut root = sets.pop().expect("non-empty tree");
    root.sort_unstable();
    root.dedup();
    let maximal: Vec<&BitSet> = root
        .iter()
        .filter(|s| !root.iter().any(|t| t != *s && s.is_subset(t)))
        .collect();
    let mut trees: Vec<PhyloTree> = maximal
        .into_iter()
        .map(|s| {
            let mask: Vec<bool> = (0..n).map(|i| s.contains(i)).collect();
            protein.restrict_mask(&mask).expect("non-empty leaf set").without_labels()
        })
        .collect();
    trees.sort_by_cached_key(|t| {
        let mut names: Vec<String> = t.leaf_names().map(str::to_string).collect();
        names.sort_unstable();
        names
    });
    SubtreeFamily::new(trees)
}

/// Outcome of checking the complete-subtree lemma against a known tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1Report {
    pub creations: usize,
    /// First class pair (indices into the partition) meeting every item.
    pub witness: Option<(usize, usize)>,
}

impl Lemma1Report {
    pub fn passed(&self) -> bool {
        self.creations == 0 || self.witness.is_some()
    }
}

/// Looks for classes `S_u`, `S_v` such that `S_u`, `S_v` and their union
/// are clades of `truth`, the union's root is `Creat`, each class tree
/// agrees with `truth`, the spans are disjoint and the complement
/// restrictions coincide.
pub fn check_lemma1(family: &SubtreeFamily, part: &SpanPartition, truth: &PhyloTree) -> Result<Lemma1Report> {
    let creations = truth.internal_nodes().filter(|&x| truth.label(x) == Some(Event::Creat)).count();
    let clade = |names: &mut dyn Iterator<Item = &String>| -> Result<Option<NodeId>> {
        let names: Vec<&str> = names.map(String::as_str).collect();
        let root = truth.lca(names.iter().copied())?;
        Ok((truth.subtree_leaves(root).count() == names.len()).then_some(root))
    };
    let mut witness = None;
    'outer: for u in 0..part.classes.len() {
        for v in u + 1..part.classes.len() {
            let (cu, cv) = (&part.classes[u], &part.classes[v]);
            if clade(&mut cu.leaves.iter())?.is_none() || clade(&mut cv.leaves.iter())?.is_none() {
                continue;
            }
            let Some(w) = clade(&mut cu.leaves.iter().chain(&cv.leaves))? else { continue };
            if truth.label(w) != Some(Event::Creat) {
                continue;
            }
            let agrees = [cu, cv].iter().all(|c| {
                let here = truth.restrict(c.leaves.iter().map(String::as_str)).map(|t| t.canonical_shape());
                here.is_ok_and(|s| s == c.tree.canonical_shape())
            });
            if agrees && check_case_a(family, part, u, v) {
                witness = Some((u, v));
                break 'outer;
            }
        }
    }
    Ok(Lemma1Report { creations, witness })
}

#[cfg(test)]
mod tests;
