use alloc::string::String;
use alloc::vec::Vec;

use super::newick::push_name;
use super::{Event, PhyloTree};

impl PhyloTree {
    /// Sibling-order-independent encoding: equal strings iff the trees are
    /// isomorphic as leaf-labelled rooted trees with equal event labels.
    pub fn canonical_form(&self) -> String {
        self.canonical_with(|_| true)
    }

    /// Like [`canonical_form`](Self::canonical_form) but ignoring every label.
    pub fn canonical_shape(&self) -> String {
        self.canonical_with(|_| false)
    }

    /// Canonical encoding keeping only the labels accepted by `keep`.
    pub fn canonical_with(&self, keep: impl Fn(Event) -> bool) -> String {
        let mut enc: Vec<String> = Vec::with_capacity(self.len());
        for x in self.nodes() {
            let s = match self.children(x) {
                None => {
                    let mut s = String::new();
                    push_name(self.name(x).unwrap_or_default(), &mut s);
                    s
                }
                Some((l, r)) => {
                    let (a, b) = (&enc[l.index()], &enc[r.index()]);
                    let (a, b) = if a <= b { (a, b) } else { (b, a) };
                    let mut s = String::with_capacity(a.len() + b.len() + 8);
                    s.push('(');
                    s.push_str(a);
                    s.push(',');
                    s.push_str(b);
                    s.push(')');
                    if let Some(e) = self.label(x).filter(|&e| keep(e)) {
                        s.push_str(e.as_str());
                    }
                    s
                }
            };
            enc.push(s);
        }
        enc.pop().unwrap_or_default()
    }
}
