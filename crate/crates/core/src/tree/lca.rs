//! Euler tour + sparse table LCA: O(n log n) build, O(1) query.

use alloc::vec;
use alloc::vec::Vec;

use super::{Node, NodeId};

#[derive(Clone, Debug, Default)]
pub(super) struct LcaIndex {
    first: Vec<u32>,
    /// `table[k][i]` is the shallowest node among `euler[i .. i + 2^k]`.
    table: Vec<Vec<u32>>,
    depth: Vec<u32>,
}

impl LcaIndex {
    pub fn build(nodes: &[Node]) -> Self {
        let n = nodes.len();
        if n == 0 {
            return Self::default();
        }
        let root = n - 1;
        let mut euler: Vec<u32> = Vec::with_capacity(2 * n);
        let mut first = vec![0u32; n];
        // (node, number of children already visited)
        let mut stack: Vec<(usize, u8)> = vec![(root, 0)];
        while let Some(top) = stack.last_mut() {
            let (x, visited) = *top;
            if visited == 0 {
                first[x] = euler.len() as u32;
            }
            euler.push(x as u32);
            match (nodes[x].children, visited) {
                (Some((l, _)), 0) => {
                    top.1 = 1;
                    stack.push((l.index(), 0));
                }
                (Some((_, r)), 1) => {
                    top.1 = 2;
                    stack.push((r.index(), 0));
                }
                _ => {
                    stack.pop();
                }
            }
        }

        let depth: Vec<u32> = nodes.iter().map(|n| n.depth).collect();
        let m = euler.len();
        let mut table = vec![euler];
        let mut span = 1;
        while 2 * span <= m {
            let prev = table.last().expect("non-empty");
            let next: Vec<u32> = (0..=m - 2 * span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if depth[a as usize] <= depth[b as usize] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            table.push(next);
            span *= 2;
        }
        Self { first, table, depth }
    }

    #[inline]
    pub fn query(&self, a: NodeId, b: NodeId) -> NodeId {
        let (mut i, mut j) = (self.first[a.index()] as usize, self.first[b.index()] as usize);
        if i > j {
            core::mem::swap(&mut i, &mut j);
        }
        let len = j - i + 1;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let row = &self.table[k];
        let (x, y) = (row[i], row[j + 1 - (1 << k)]);
        NodeId(if self.depth[x as usize] <= self.depth[y as usize] { x } else { y })
    }
}
