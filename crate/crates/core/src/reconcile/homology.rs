use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{LeafMapping, Reconciliation, ReconciliationKind};
use crate::error::{Error, Result};
use crate::tree::{Event, NodeId, PhyloTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Homology {
    /// Genes whose LCA is a speciation.
    Ortholog,
    /// Genes whose LCA is a duplication, or proteins whose LCA is a creation.
    Paralog,
    /// Proteins whose LCA is a speciation.
    OrthoOrtholog,
    /// Proteins whose LCA is a duplication.
    ParaOrtholog,
}

impl Homology {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ortholog => "ortholog",
            Self::Paralog => "paralog",
            Self::OrthoOrtholog => "ortho-ortholog",
            Self::ParaOrtholog => "para-ortholog",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HomologyRelation {
    pub a: String,
    pub b: String,
    pub relation: Homology,
}

/// One relation per unordered leaf pair, read from the label of the pair's LCA.
pub fn classify_pairs(t: &PhyloTree, recon: &Reconciliation) -> Result<Vec<HomologyRelation>> {
    let leaves = t.leaves();
    let mut out = Vec::with_capacity(leaves.len() * leaves.len().saturating_sub(1) / 2);
    for (i, &x) in leaves.iter().enumerate() {
        for &y in &leaves[i + 1..] {
            let w = t.lca_nodes(x, y);
            let label = recon
                .label(w)
                .ok_or_else(|| Error::InvalidArgument("reconciliation does not label this tree".to_string()))?;
            let relation = match (recon.kind(), label) {
                (ReconciliationKind::GeneSpecies, Event::Spec) => Homology::Ortholog,
                (ReconciliationKind::GeneSpecies, _) => Homology::Paralog,
                (ReconciliationKind::ProteinGene, Event::Spec) => Homology::OrthoOrtholog,
                (ReconciliationKind::ProteinGene, Event::Dup) => Homology::ParaOrtholog,
                (ReconciliationKind::ProteinGene, Event::Creat) => Homology::Paralog,
            };
            out.push(HomologyRelation {
                a: t.name(x).unwrap_or_default().to_string(),
                b: t.name(y).unwrap_or_default().to_string(),
                relation,
            });
        }
    }
    Ok(out)
}

/// Internal nodes of `protein` whose two child subtrees contain proteins of
/// a common gene.
pub fn apparent_creations(protein: &PhyloTree, g: &LeafMapping) -> Result<BTreeSet<NodeId>> {
    let mut gene_id: BTreeMap<&str, usize> = BTreeMap::new();
    let mut genes: Vec<Vec<usize>> = Vec::with_capacity(protein.len());
    let mut out = BTreeSet::new();
    for x in protein.nodes() {
        let set = match protein.children(x) {
            None => {
                let name = protein.name(x).unwrap_or_default();
                let gene = g.get(name).ok_or_else(|| Error::MissingMapping(name.to_string()))?;
                let next = gene_id.len();
                alloc::vec![*gene_id.entry(gene).or_insert(next)]
            }
            Some((l, r)) => {
                let (a, b) = (&genes[l.index()], &genes[r.index()]);
                let (merged, shared) = merge_sorted(a, b);
                if shared {
                    out.insert(x);
                }
                merged
            }
        };
        genes.push(set);
    }
    Ok(out)
}

fn merge_sorted(a: &[usize], b: &[usize]) -> (Vec<usize>, bool) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j, mut shared) = (0, 0, false);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                shared = true;
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    (out, shared)
}
