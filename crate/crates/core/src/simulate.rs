//! Seeded simulation of species, gene and protein trees with known events.
//!
//! Genes evolve along the species tree and proteins along the gene tree
//! under a per-edge Bernoulli model. A lineage entering an edge first
//! duplicates (creates, for proteins) with the configured probability,
//! otherwise it may be lost, otherwise it reaches the lower node where it
//! speciates or becomes a leaf. One lineage per edge is designated primary
//! and is never lost, so every species keeps a gene and every gene keeps a
//! protein. Nodes left with a single child are suppressed.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::reconcile::LeafMapping;
use crate::tree::{Event, NodeId, PhyloTree, TreeBuilder};

/// Consecutive duplications (or creations) allowed on one edge.
const MAX_BURST: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub species: usize,
    pub duplication: f64,
    pub loss: f64,
    pub creation: f64,
    pub protein_loss: f64,
    pub seed: u64,
}

impl SimConfig {
    /// No events besides speciation: `G` and `P` copy `S`.
    pub fn congruent(species: usize, seed: u64) -> Self {
        Self { species, duplication: 0.0, loss: 0.0, creation: 0.0, protein_loss: 0.0, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.species == 0 {
            return Err(Error::Simulation("species count must be positive".into()));
        }
        for (name, p) in [
            ("duplication", self.duplication),
            ("loss", self.loss),
            ("creation", self.creation),
            ("protein loss", self.protein_loss),
        ] {
            if !(0.0..0.95).contains(&p) {
                return Err(Error::Simulation(format!("{name} probability {p} outside [0, 0.95)")));
            }
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Simulated triple with its generating history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    pub species: PhyloTree,
    /// Labelled with the simulated `Spec`/`Dup` events.
    pub gene: PhyloTree,
    /// Labelled with the simulated `Spec`/`Dup`/`Creat` events.
    pub protein: PhyloTree,
    pub s: LeafMapping,
    pub g: LeafMapping,
    /// Species node below each edge where a gene lineage was lost.
    pub gene_losses: Vec<NodeId>,
    /// Gene node below each edge where a protein lineage was lost.
    pub protein_losses: Vec<NodeId>,
}

/// Lowercase bijective base-26 name: `a..z, aa, ab, ...`.
pub fn species_name(mut i: usize) -> String {
    let mut rev = Vec::new();
    loop {
        rev.push(b'a' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    rev.iter().rev().map(|&b| b as char).collect()
}

/// Random binary tree on `n` species: each new leaf is attached above a
/// uniformly chosen existing node.
pub fn simulate_species_tree(n: usize, seed: u64) -> Result<PhyloTree> {
    if n == 0 {
        return Err(Error::Simulation("species count must be positive".into()));
    }
    species_tree_with(n, &mut SimConfig::congruent(n, seed).rng(0))
}

fn species_tree_with(n: usize, rng: &mut ChaCha8Rng) -> Result<PhyloTree> {
    // Arena: children of internal nodes, parent links, leaves first.
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut children: Vec<Option<(usize, usize)>> = vec![None];
    let mut root = 0;
    for _ in 1..n {
        let at = rng.gen_range(0..parent.len());
        let leaf = parent.len();
        parent.push(None);
        children.push(None);
        let inner = parent.len();
        parent.push(parent[at]);
        children.push(Some((at, leaf)));
        match parent[at] {
            None => root = inner,
            Some(p) => {
                let (l, r) = children[p].expect("parent is internal");
                children[p] = Some(if l == at { (inner, r) } else { (l, inner) });
            }
        }
        parent[at] = Some(inner);
        parent[leaf] = Some(inner);
    }
    let mut leaf_no = 0;
    let mut b = TreeBuilder::with_capacity(parent.len());
    let mut ids = vec![usize::MAX; parent.len()];
    let mut stack = vec![(root, false)];
    while let Some((x, expanded)) = stack.pop() {
        match children[x] {
            None => {
                ids[x] = b.leaf(species_name(leaf_no));
                leaf_no += 1;
            }
            Some((l, r)) if expanded => ids[x] = b.internal(ids[l], ids[r], None),
            Some((l, r)) => {
                stack.push((x, true));
                stack.push((r, false));
                stack.push((l, false));
            }
        }
    }
    b.build(ids[root])
}

/// Lineage tree before naming: leaves remember the host leaf they reached.
enum Sim {
    Leaf(NodeId),
    Inner(usize, usize, Event),
}

struct Lineages<'a> {
    host: &'a PhyloTree,
    burst: f64,
    loss: f64,
    burst_event: Event,
    nodes: Vec<Sim>,
    losses: Vec<NodeId>,
}

impl Lineages<'_> {
    /// Lineage entering `host` node `y` from above; `None` when lost.
    fn descend(&mut self, y: NodeId, primary: bool, burst: usize, rng: &mut ChaCha8Rng) -> Option<usize> {
        if burst < MAX_BURST && rng.gen_bool(self.burst) {
            let a = self.descend(y, primary, burst + 1, rng);
            let b = self.descend(y, false, burst + 1, rng);
            return self.join(a, b, self.burst_event);
        }
        if !primary && rng.gen_bool(self.loss) {
            self.losses.push(y);
            return None;
        }
        match self.host.children(y) {
            None => {
                self.nodes.push(Sim::Leaf(y));
                Some(self.nodes.len() - 1)
            }
            Some((l, r)) => {
                let a = self.descend(l, primary, 0, rng);
                let b = self.descend(r, primary, 0, rng);
                self.join(a, b, self.host.label(y).filter(|&e| e != Event::Creat).unwrap_or(Event::Spec))
            }
        }
    }

    fn join(&mut self, a: Option<usize>, b: Option<usize>, event: Event) -> Option<usize> {
        match (a, b) {
            (Some(a), Some(b)) => {
                self.nodes.push(Sim::Inner(a, b, event));
                Some(self.nodes.len() - 1)
            }
            (one, None) | (None, one) => one,
        }
    }

    /// Builds the tree, naming leaves `<host leaf><index>` with indices
    /// zero-padded per host leaf, and the leaf-to-host mapping.
    fn finish(self, root: usize) -> Result<(PhyloTree, LeafMapping, Vec<NodeId>)> {
        let mut count = vec![0usize; self.host.len()];
        for n in &self.nodes {
            if let Sim::Leaf(y) = n {
                count[y.index()] += 1;
            }
        }
        let mut next = vec![0usize; self.host.len()];
        let mut b = TreeBuilder::with_capacity(self.nodes.len());
        let mut map = LeafMapping::new();
        let mut ids = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let id = match *n {
                Sim::Leaf(y) => {
                    let host = self.host.name(y).unwrap_or_default();
                    next[y.index()] += 1;
                    let width = decimal_width(count[y.index()]);
                    let name = format!("{host}{:0width$}", next[y.index()]);
                    map.insert(name.clone(), host);
                    b.leaf(name)
                }
                Sim::Inner(l, r, e) => b.internal(ids[l], ids[r], Some(e)),
            };
            ids.push(id);
        }
        Ok((b.build(ids[root])?, map, self.losses))
    }
}

fn decimal_width(mut n: usize) -> usize {
    let mut w = 1;
    while n >= 10 {
        n /= 10;
        w += 1;
    }
    w
}

fn evolve(
    host: &PhyloTree,
    burst: f64,
    loss: f64,
    burst_event: Event,
    rng: &mut ChaCha8Rng,
) -> Result<(PhyloTree, LeafMapping, Vec<NodeId>)> {
    let mut lin = Lineages { host, burst, loss, burst_event, nodes: Vec::new(), losses: Vec::new() };
    let root = lin.descend(host.root(), true, 0, rng).expect("primary lineage survives");
    lin.finish(root)
}

/// Gene tree evolved along `species`, its leaf mapping and loss placements.
pub fn simulate_gene_tree(species: &PhyloTree, cfg: &SimConfig) -> Result<(PhyloTree, LeafMapping, Vec<NodeId>)> {
    cfg.validate()?;
    evolve(species, cfg.duplication, cfg.loss, Event::Dup, &mut cfg.rng(1))
}

/// Protein tree evolved along `gene`, its leaf mapping and loss placements.
/// Non-creation protein nodes copy the label of the gene node they reach.
pub fn simulate_protein_tree(gene: &PhyloTree, cfg: &SimConfig) -> Result<(PhyloTree, LeafMapping, Vec<NodeId>)> {
    cfg.validate()?;
    evolve(gene, cfg.creation, cfg.protein_loss, Event::Creat, &mut cfg.rng(2))
}

/// Species, gene and protein trees from one configuration.
pub fn simulate(cfg: &SimConfig) -> Result<GroundTruth> {
    cfg.validate()?;
    let species = species_tree_with(cfg.species, &mut cfg.rng(0))?;
    let (gene, s, gene_losses) = simulate_gene_tree(&species, cfg)?;
    let (protein, g, protein_losses) = simulate_protein_tree(&gene, cfg)?;
    Ok(GroundTruth { species, gene, protein, s, g, gene_losses, protein_losses })
}
