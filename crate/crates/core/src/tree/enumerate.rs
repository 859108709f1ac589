use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{PhyloTree, TreeBuilder};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// `(2n-3)!!` rooted binary topologies on `n >= 2` leaves (1 for `n <= 2`).
pub fn topology_count(n: usize) -> u128 {
    (2..n).map(|k| (2 * k - 1) as u128).product()
}

/// Every rooted binary topology on `leaves`, each exactly once.
///
/// Trees are generated by stepwise insertion: the `k`-th leaf (0-based,
/// `k >= 2`) is attached above one of the `2k - 1` nodes of the current tree.
/// A mixed-radix counter walks all insertion choices.
pub fn enumerate_topologies<S: AsRef<str>>(leaves: &[S], cap: usize) -> Result<Topologies> {
    if leaves.is_empty() {
        return Err(Error::EmptyLeafSet);
    }
    if leaves.len() > cap {
        return Err(Error::CapExceeded { size: leaves.len(), cap });
    }
    let names: Vec<String> = leaves.iter().map(|s| String::from(s.as_ref())).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateLeaf(w[0].clone()));
    }
    let digits = vec![0; names.len().saturating_sub(2)];
    Ok(Topologies { names, digits, done: false })
}

#[derive(Clone, Debug)]
pub struct Topologies {
    names: Vec<String>,
    /// `digits[i]` chooses where leaf `i + 2` is inserted; radix `2(i+2) - 1`.
    digits: Vec<usize>,
    done: bool,
}

impl Topologies {
    fn decode(&self) -> PhyloTree {
        let n = self.names.len();
        if n == 1 {
            return PhyloTree::leaf(self.names[0].clone());
        }
        // parent/children over creation order; node 0 = leaf 0, 1 = leaf 1,
        // 2 = their parent.
        let mut parent: Vec<Option<usize>> = vec![Some(2), Some(2), None];
        let mut children: Vec<Option<(usize, usize)>> = vec![None, None, Some((0, 1))];
        let mut leaf_of: Vec<Option<usize>> = vec![Some(0), Some(1), None];
        let mut root = 2;
        for (i, &d) in self.digits.iter().enumerate() {
            let k = i + 2;
            let leaf = parent.len();
            let joint = leaf + 1;
            parent.push(Some(joint));
            children.push(None);
            leaf_of.push(Some(k));
            let above = d;
            let old_parent = parent[above];
            parent.push(old_parent);
            children.push(Some((above, leaf)));
            leaf_of.push(None);
            parent[above] = Some(joint);
            match old_parent {
                None => root = joint,
                Some(p) => {
                    let (l, r) = children[p].expect("parent is internal");
                    children[p] = Some(if l == above { (joint, r) } else { (l, joint) });
                }
            }
        }
        let mut b = TreeBuilder::with_capacity(children.len());
        let mut ids = vec![usize::MAX; children.len()];
        // Post-order from the root, iteratively.
        let mut stack = vec![(root, false)];
        while let Some((x, expanded)) = stack.pop() {
            match (children[x], expanded) {
                (Some((l, r)), false) => {
                    stack.push((x, true));
                    stack.push((r, false));
                    stack.push((l, false));
                }
                (Some((l, r)), true) => ids[x] = b.internal(ids[l], ids[r], None),
                (None, _) => ids[x] = b.leaf(self.names[leaf_of[x].expect("leaf")].clone()),
            }
        }
        b.build(ids[root]).expect("enumerated tree is valid")
    }

    fn advance(&mut self) {
        for (i, d) in self.digits.iter_mut().enumerate() {
            let radix = 2 * (i + 2) - 1;
            *d += 1;
            if *d < radix {
                return;
            }
            *d = 0;
        }
        self.done = true;
    }
}

impl Iterator for Topologies {
    type Item = PhyloTree;

    fn next(&mut self) -> Option<PhyloTree> {
        if self.done {
            return None;
        }
        let t = self.decode();
        self.advance();
        Some(t)
    }
}
