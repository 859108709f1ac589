use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::{NodeId, PhyloTree, TreeBuilder};
use crate::error::{Error, Result};

impl PhyloTree {
    /// `T|keep`: the tree induced by `keep` with degree-2 nodes suppressed.
    /// Labels of surviving internal nodes are preserved.
    pub fn restrict<'a, I>(&self, keep: I) -> Result<PhyloTree>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut mask = vec![false; self.len()];
        let mut any = false;
        for name in keep {
            mask[self.require_leaf(name)?.index()] = true;
            any = true;
        }
        if !any {
            return Err(Error::EmptyLeafSet);
        }
        Ok(self.restrict_mask(&mask).expect("mask is non-empty"))
    }

    /// Restriction to the leaves flagged in `mask` (indexed by node); `None`
    /// when no leaf is flagged.
    pub fn restrict_mask(&self, mask: &[bool]) -> Option<PhyloTree> {
        let mut b = TreeBuilder::with_capacity(self.len());
        let mut rep: Vec<Option<usize>> = vec![None; self.len()];
        for x in self.nodes() {
            rep[x.index()] = match self.children(x) {
                None => mask[x.index()].then(|| b.leaf(self.name(x).unwrap_or_default())),
                Some((l, r)) => match (rep[l.index()], rep[r.index()]) {
                    (Some(a), Some(c)) => Some(b.internal(a, c, self.label(x))),
                    (one, None) | (None, one) => one,
                },
            };
        }
        rep[self.root().index()].map(|root| b.build(root).expect("restriction of a valid tree"))
    }

    /// Copy of the complete subtree rooted at `x`.
    pub fn subtree(&self, x: NodeId) -> PhyloTree {
        let mut b = TreeBuilder::with_capacity(self.subtree_size(x));
        let root = b.copy_subtree(self, x, true);
        b.build(root).expect("subtree of a valid tree")
    }

    /// Attaches `donor` as the sibling of `at`: a new unlabelled node is
    /// inserted on the edge above `at` (or above the root).
    pub fn graft(&self, donor: &PhyloTree, at: NodeId) -> Result<PhyloTree> {
        let mut b = TreeBuilder::with_capacity(self.len() + donor.len() + 1);
        let d = b.copy_subtree(donor, donor.root(), true);
        let mut map = vec![usize::MAX; self.len()];
        for y in self.nodes() {
            let mut id = match self.children(y) {
                None => b.leaf(self.name(y).unwrap_or_default()),
                Some((l, r)) => b.internal(map[l.index()], map[r.index()], self.label(y)),
            };
            if y == at {
                id = b.internal(id, d, None);
            }
            map[y.index()] = id;
        }
        b.build(map[self.root().index()])
    }

    /// Replaces each complete subtree rooted at `x` by the given tree. The
    /// replaced nodes must be pairwise incomparable.
    pub fn replace_subtrees(&self, replacements: &[(NodeId, &PhyloTree)]) -> Result<PhyloTree> {
        for (i, &(x, _)) in replacements.iter().enumerate() {
            for &(y, _) in &replacements[i + 1..] {
                if self.is_ancestor_or_self(x, y) || self.is_ancestor_or_self(y, x) {
                    return Err(Error::InvalidArgument(
                        "replacement roots must be pairwise incomparable".to_string(),
                    ));
                }
            }
        }
        let mut b = TreeBuilder::with_capacity(self.len());
        let mut map = vec![usize::MAX; self.len()];
        for y in self.nodes() {
            map[y.index()] = match replacements.iter().find(|(x, _)| *x == y) {
                Some((_, t)) => b.copy_subtree(t, t.root(), true),
                None => match self.children(y) {
                    // Nodes below a replaced root are copied too and then
                    // dropped by `build` as unreachable.
                    None => b.leaf(self.name(y).unwrap_or_default()),
                    Some((l, r)) => b.internal(map[l.index()], map[r.index()], self.label(y)),
                },
            };
        }
        let replaced_leaves = replacements.iter().all(|&(x, t)| {
            let mut a: Vec<&str> = self.subtree_leaves(x).filter_map(|l| self.name(l)).collect();
            let mut c: Vec<&str> = t.leaf_names().collect();
            a.sort_unstable();
            c.sort_unstable();
            a == c
        });
        if !replaced_leaves {
            return Err(Error::InvalidArgument(
                "replacement subtree must keep the leaf set".to_string(),
            ));
        }
        b.build(map[self.root().index()])
    }
}
