//! LCA-reconciliation of gene trees with species trees and of protein trees
//! with gene trees.
//!
//! Both layers share one procedure. A source node is mapped to the LCA of
//! the images of its leaves; it carries the "divergence" event (Spec) when
//! its image differs from both children's images, and the "same lineage"
//! event (Dup for genes, Creat for proteins) otherwise. Each edge `(x, y)`
//! loses one lineage per interior node on the target path between the two
//! images, plus one extra loss of `image(x)` when `x` carries the same
//! lineage event and the images differ. The extra loss is listed first.

mod cost;
mod homology;
mod mapping;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tree::{Event, NodeId, PhyloTree};

pub use cost::{double_cost, CostSpec, GeneCost, ProteinCost};
pub use homology::{apparent_creations, classify_pairs, Homology, HomologyRelation};
pub use mapping::{extend_mapping, ExtendedMapping, LeafMapping};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReconciliationKind {
    GeneSpecies,
    ProteinGene,
}

/// Labels, per-edge losses and unit costs of one LCA-reconciliation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconciliation {
    kind: ReconciliationKind,
    mapping: ExtendedMapping,
    labels: Vec<Option<Event>>,
    /// `losses[y]`: target nodes lost on the edge from `parent(y)` to `y`.
    losses: Vec<Vec<NodeId>>,
    events: usize,
    loss_total: usize,
    mutation: usize,
}

impl Reconciliation {
    pub fn kind(&self) -> ReconciliationKind {
        self.kind
    }

    pub fn mapping(&self) -> &ExtendedMapping {
        &self.mapping
    }

    pub fn image(&self, x: NodeId) -> NodeId {
        self.mapping.image(x)
    }

    /// Event at internal node `x`; `None` for leaves.
    pub fn label(&self, x: NodeId) -> Option<Event> {
        self.labels[x.index()]
    }

    pub fn labels(&self) -> &[Option<Event>] {
        &self.labels
    }

    /// Target-tree nodes lost on the edge entering `y`, in order.
    pub fn losses_on(&self, y: NodeId) -> &[NodeId] {
        &self.losses[y.index()]
    }

    /// Duplication cost (gene layer) or creation cost (protein layer).
    pub fn event_cost(&self) -> usize {
        self.events
    }

    pub fn loss_cost(&self) -> usize {
        self.loss_total
    }

    pub fn mutation_cost(&self) -> usize {
        self.mutation
    }

    /// The source tree with the computed events written on its internal nodes.
    pub fn labeled_tree(&self, src: &PhyloTree) -> PhyloTree {
        src.map_labels(|x, _| self.label(x))
    }

    /// Recounts events from the labels and losses from the per-edge lists
    /// and checks them against the summary, including `M = D + L`
    /// (resp. `M = C + L`).
    pub fn check_identities(&self) -> bool {
        let same_lineage = match self.kind {
            ReconciliationKind::GeneSpecies => Event::Dup,
            ReconciliationKind::ProteinGene => Event::Creat,
        };
        let events = self.labels.iter().filter(|&&l| l == Some(same_lineage)).count();
        let losses: usize = self.losses.iter().map(Vec::len).sum();
        events == self.events && losses == self.loss_total && self.mutation == events + losses
    }
}

/// Core LCA-reconciliation over precomputed node images.
///
/// `divergence` picks the label of a node whose image differs from both
/// children's images; `same_lineage` is used otherwise.
fn lca_reconcile(
    kind: ReconciliationKind,
    src: &PhyloTree,
    dst: &PhyloTree,
    mapping: ExtendedMapping,
    same_lineage: Event,
    mut divergence: impl FnMut(NodeId) -> Event,
) -> Reconciliation {
    let mut labels = vec![None; src.len()];
    let mut losses: Vec<Vec<NodeId>> = vec![Vec::new(); src.len()];
    let mut events = 0;
    let mut loss_total = 0;
    for x in src.internal_nodes() {
        let (l, r) = src.children(x).expect("internal");
        let ix = mapping.image(x);
        let label = if ix != mapping.image(l) && ix != mapping.image(r) {
            divergence(ix)
        } else {
            events += 1;
            same_lineage
        };
        labels[x.index()] = Some(label);
        for y in [l, r] {
            let iy = mapping.image(y);
            let list = &mut losses[y.index()];
            if iy != ix {
                if label == same_lineage {
                    list.push(ix);
                }
                // Interior nodes of the path, collected bottom-up.
                let start = list.len();
                let mut z = dst.parent(iy).expect("image below a strict ancestor has a parent");
                while z != ix {
                    list.push(z);
                    z = dst.parent(z).expect("walk stays below the ancestor image");
                }
                list[start..].reverse();
            }
            loss_total += list.len();
        }
    }
    Reconciliation { kind, mapping, labels, losses, events, loss_total, mutation: events + loss_total }
}

/// LCA-reconciliation of gene tree `gene` with species tree `species`.
pub fn reconcile_gene_species(
    gene: &PhyloTree,
    species: &PhyloTree,
    s: &LeafMapping,
) -> Result<Reconciliation> {
    let mapping = extend_mapping(gene, species, s)?;
    Ok(reconcile_gene_species_mapped(gene, species, mapping))
}

pub(crate) fn reconcile_gene_species_mapped(
    gene: &PhyloTree,
    species: &PhyloTree,
    mapping: ExtendedMapping,
) -> Reconciliation {
    lca_reconcile(ReconciliationKind::GeneSpecies, gene, species, mapping, Event::Dup, |_| Event::Spec)
}

/// LCA-reconciliation of protein tree `protein` with gene tree `gene`.
///
/// `gene_labels` is the gene tree's own reconciliation; it decides whether a
/// non-creation protein node is a speciation or a duplication.
pub fn reconcile_protein_gene(
    protein: &PhyloTree,
    gene: &PhyloTree,
    g: &LeafMapping,
    gene_labels: &Reconciliation,
) -> Result<Reconciliation> {
    if gene_labels.kind != ReconciliationKind::GeneSpecies || gene_labels.labels.len() != gene.len() {
        return Err(Error::InvalidArgument(
            "gene labels must come from reconciling this gene tree with a species tree".into(),
        ));
    }
    let mapping = extend_mapping(protein, gene, g)?;
    Ok(reconcile_protein_gene_mapped(protein, gene, mapping, gene_labels.labels()))
}

pub(crate) fn reconcile_protein_gene_mapped(
    protein: &PhyloTree,
    gene: &PhyloTree,
    mapping: ExtendedMapping,
    gene_labels: &[Option<Event>],
) -> Reconciliation {
    lca_reconcile(ReconciliationKind::ProteinGene, protein, gene, mapping, Event::Creat, |gx| {
        gene_labels[gx.index()].unwrap_or(Event::Spec)
    })
}

/// Trees and mapping of the gene/species instance equivalent to a
/// protein/gene instance: proteins are read as genes and genes as species.
#[derive(Clone, Debug)]
pub struct SwappedInstance {
    pub gene: PhyloTree,
    pub species: PhyloTree,
    pub mapping: LeafMapping,
}

/// Reinterprets `(P, G, g)` as a gene/species instance `(G', S', s')` with
/// `G' = P`, `S' = G`, `s' = g`. Reconciling the result reproduces
/// `C(P,G)`, `L(P,G)` and `M(P,G)` as `D`, `L` and `M`.
pub fn relabel_for_prop1(protein: &PhyloTree, gene: &PhyloTree, g: &LeafMapping) -> SwappedInstance {
    SwappedInstance { gene: protein.without_labels(), species: gene.without_labels(), mapping: g.clone() }
}

#[cfg(test)]
mod tests;
