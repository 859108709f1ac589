use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tree::{NodeId, PhyloTree};

/// Leaf-to-leaf mapping by name: protein to gene (`g`) or gene to species (`s`).
///
/// Extra entries for names absent from the source tree are tolerated, so one
/// mapping file can serve several trees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeafMapping {
    pairs: BTreeMap<String, String>,
}

impl LeafMapping {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `source -> target`, returning the previous target if any.
    pub fn insert(&mut self, source: impl Into<String>, target: impl Into<String>) -> Option<String> {
        self.pairs.insert(source.into(), target.into())
    }

    pub fn get(&self, source: &str) -> Option<&str> {
        self.pairs.get(source).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    /// Image leaf of every leaf of `src`, indexed by `src` node (internal
    /// entries are left as the root of `dst` and must not be read).
    ///
    /// Fails on a source leaf without an entry or an entry naming a
    /// non-leaf of `dst`.
    pub fn leaf_images(&self, src: &PhyloTree, dst: &PhyloTree) -> Result<Vec<NodeId>> {
        let mut images = vec![dst.root(); src.len()];
        for &leaf in src.leaves() {
            let name = src.name(leaf).unwrap_or_default();
            let target = self.get(name).ok_or_else(|| Error::MissingMapping(name.to_string()))?;
            images[leaf.index()] = dst.find_leaf(target).ok_or_else(|| Error::DanglingTarget {
                leaf: name.to_string(),
                target: target.to_string(),
            })?;
        }
        Ok(images)
    }

    /// Every leaf of `dst` is the image of at least one leaf of `src`.
    pub fn check_surjective(&self, src: &PhyloTree, dst: &PhyloTree) -> Result<()> {
        let images = self.leaf_images(src, dst)?;
        let hit: BTreeSet<NodeId> = src.leaves().iter().map(|l| images[l.index()]).collect();
        match dst.leaves().iter().find(|l| !hit.contains(l)) {
            Some(&missing) => Err(Error::NotSurjective(dst.name(missing).unwrap_or_default().to_string())),
            None => Ok(()),
        }
    }

    /// The mapping restricted to `src` is a bijection onto the leaves of `dst`.
    pub fn check_bijective(&self, src: &PhyloTree, dst: &PhyloTree) -> Result<()> {
        let images = self.leaf_images(src, dst)?;
        let mut seen = BTreeSet::new();
        for &l in src.leaves() {
            let target = images[l.index()];
            if !seen.insert(target) {
                return Err(Error::NotBijective(dst.name(target).unwrap_or_default().to_string()));
            }
        }
        self.check_surjective(src, dst)
    }
}

impl<S: Into<String>, T: Into<String>> FromIterator<(S, T)> for LeafMapping {
    fn from_iter<I: IntoIterator<Item = (S, T)>>(iter: I) -> Self {
        let mut m = Self::new();
        for (a, b) in iter {
            m.insert(a, b);
        }
        m
    }
}

/// LCA extension of a leaf mapping to every node of the source tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedMapping {
    images: Vec<NodeId>,
}

impl ExtendedMapping {
    /// Extends per-leaf images (as returned by [`LeafMapping::leaf_images`])
    /// bottom-up: an internal node maps to the LCA of its children's images.
    pub fn from_leaf_images(src: &PhyloTree, dst: &PhyloTree, mut images: Vec<NodeId>) -> Self {
        for x in src.nodes() {
            if let Some((l, r)) = src.children(x) {
                images[x.index()] = dst.lca_nodes(images[l.index()], images[r.index()]);
            }
        }
        Self { images }
    }

    #[inline]
    pub fn image(&self, x: NodeId) -> NodeId {
        self.images[x.index()]
    }

    pub fn images(&self) -> &[NodeId] {
        &self.images
    }
}

/// `m` extended from the leaves of `src` to all of its nodes.
pub fn extend_mapping(src: &PhyloTree, dst: &PhyloTree, m: &LeafMapping) -> Result<ExtendedMapping> {
    let images = m.leaf_images(src, dst)?;
    Ok(ExtendedMapping::from_leaf_images(src, dst, images))
}
