//! Gene tree correction guided by a protein tree and a species tree, for
//! families where every gene carries exactly one protein.
//!
//! Starting from the gene tree `g(P)` induced by the protein tree, each
//! duplication node whose image differs from a child's image is a
//! candidate for a local rearrangement: the divergent child subtree is
//! grafted onto an edge of its sibling subtree on which the child's species
//! image is lost. The best rearrangement of each candidate is scored by its
//! improvement `delta` of the double cost, and a maximum-weight antichain of
//! improving candidates is applied.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::reconcile::{
    reconcile_gene_species_mapped, reconcile_protein_gene_mapped, CostSpec, ExtendedMapping, LeafMapping,
    Reconciliation,
};
use crate::tree::{enumerate_topologies, Event, NodeId, PhyloTree, TreeBuilder};

/// `g(P)`: the protein tree with each protein renamed to its gene.
///
/// Fails unless `g` is injective on the leaves of `protein`.
pub fn induced_gene_tree(protein: &PhyloTree, g: &LeafMapping) -> Result<PhyloTree> {
    let mut seen = BTreeSet::new();
    let renamed = protein.rename_leaves(|name| {
        let gene = g.get(name).ok_or_else(|| Error::MissingMapping(name.to_string()))?;
        if !seen.insert(gene) {
            return Err(Error::NotBijective(gene.to_string()));
        }
        Ok(gene.to_string())
    })?;
    Ok(renamed.without_labels())
}

/// Duplication nodes whose image differs from the image of at least one child.
pub fn incongruent_duplications(gene: &PhyloTree, recon: &Reconciliation) -> BTreeSet<NodeId> {
    gene.internal_nodes()
        .filter(|&x| recon.label(x) == Some(Event::Dup))
        .filter(|&x| {
            let (l, r) = gene.children(x).expect("internal");
            recon.image(x) != recon.image(l) || recon.image(x) != recon.image(r)
        })
        .collect()
}

/// One rearrangement of `G[x]`: `grafted` is moved onto the edge entering
/// `attach`, inside the subtree of `grafted`'s sibling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixCandidate {
    pub grafted: NodeId,
    pub attach: NodeId,
    pub tree: PhyloTree,
}

/// Rearrangements of `G[x]` obtained by grafting a child whose image differs
/// from `image(x)` onto an edge strictly inside its sibling's subtree on
/// which that child's image is lost. Both children are tried when both differ.
pub fn mix_candidates(gene: &PhyloTree, x: NodeId, recon: &Reconciliation) -> Vec<MixCandidate> {
    mix_attachments(gene, x, recon)
        .into_iter()
        .map(|(moved, host, attach)| MixCandidate { grafted: moved, attach, tree: graft_within(gene, host, moved, attach) })
        .collect()
}

/// `(moved, host, attach)` for every member of `Mix(G[x])`, without building trees.
fn mix_attachments(gene: &PhyloTree, x: NodeId, recon: &Reconciliation) -> Vec<Attachment> {
    let Some((l, r)) = gene.children(x) else { return Vec::new() };
    let mut out = Vec::new();
    for (moved, host) in [(l, r), (r, l)] {
        let lost = recon.image(moved);
        if lost == recon.image(x) {
            continue;
        }
        for c in gene.subtree_nodes(host).filter(|&c| c != host) {
            if recon.losses_on(c).contains(&lost) {
                out.push((moved, host, c));
            }
        }
    }
    out
}

/// Copy of `G[host]` with `G[moved]` attached as the sibling of `attach`.
fn graft_within(gene: &PhyloTree, host: NodeId, moved: NodeId, attach: NodeId) -> PhyloTree {
    let mut b = TreeBuilder::with_capacity(gene.subtree_size(host) + gene.subtree_size(moved) + 1);
    let donor = b.copy_subtree(gene, moved, false);
    let first = host.index() + 1 - gene.subtree_size(host);
    let mut map = vec![usize::MAX; gene.subtree_size(host)];
    for y in gene.subtree_nodes(host) {
        let mut id = match gene.children(y) {
            None => b.leaf(gene.name(y).unwrap_or_default()),
            Some((a, c)) => b.internal(map[a.index() - first], map[c.index() - first], None),
        };
        if y == attach {
            id = b.internal(id, donor, None);
        }
        map[y.index() - first] = id;
    }
    b.build(map[host.index() - first]).expect("graft keeps leaves distinct")
}

/// Best rearrangement found for one incongruent duplication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalMove {
    /// Root of the replaced subtree in `g(P)`.
    pub node: NodeId,
    pub replacement: PhyloTree,
    /// `Y(G[x], S) - XY(P[u], G_opt[x], S)`; always positive.
    pub delta: usize,
}

/// Everything the heuristic needs about one instance, resolved once.
struct Instance<'a> {
    species: &'a PhyloTree,
    spec: CostSpec,
    gene: PhyloTree,
    recon: Reconciliation,
    /// `Y` weight of each node: its duplication and the losses on its child edges.
    weight: Vec<usize>,
    /// Prefix sums of `weight` in post-order, so subtree sums are O(1).
    prefix: Vec<usize>,
}

impl<'a> Instance<'a> {
    fn new(
        protein: &PhyloTree,
        species: &'a PhyloTree,
        g: &LeafMapping,
        s: &LeafMapping,
        spec: CostSpec,
    ) -> Result<Self> {
        let gene = induced_gene_tree(protein, g)?;
        let recon = gene_species(&gene, species, s)?;
        let (we, wl) = Self::gene_weights(spec);
        let weight: Vec<usize> = gene
            .nodes()
            .map(|v| match gene.children(v) {
                None => 0,
                Some((a, b)) => {
                    let dup = usize::from(recon.label(v) == Some(Event::Dup));
                    we * dup + wl * (recon.losses_on(a).len() + recon.losses_on(b).len())
                }
            })
            .collect();
        let mut prefix = Vec::with_capacity(weight.len() + 1);
        prefix.push(0);
        for w in &weight {
            prefix.push(prefix[prefix.len() - 1] + w);
        }
        Ok(Self { species, spec, gene, recon, weight, prefix })
    }

    /// Multipliers of duplications and losses in `Y`.
    fn gene_weights(spec: CostSpec) -> (usize, usize) {
        match spec.gene {
            crate::GeneCost::Duplication => (1, 0),
            crate::GeneCost::Loss => (0, 1),
            crate::GeneCost::Mutation => (1, 1),
        }
    }

    /// `Y` restricted to the nodes and edges of `G[x]`.
    fn subtree_gene_cost(&self, x: NodeId) -> usize {
        let hi = x.index() + 1;
        self.prefix[hi] - self.prefix[hi - self.gene.subtree_size(x)]
    }

    /// `XY(P[x], G')` for `G'` = `G[host]` with `G[moved]` grafted above
    /// `attach`, from the reconciliation of `G` alone.
    ///
    /// Only the new node and the ancestors of `attach` up to `host` change
    /// their species image. `P[x]` maps identically onto both parts of
    /// `G'` and its root onto `host`, which makes the root a creation; the
    /// protein losses are the new node on the edge above `attach` plus the
    /// path from `moved` up to `host` and the creation's own loss.
    fn candidate_cost(&self, moved: NodeId, host: NodeId, attach: NodeId) -> usize {
        let sp = self.species;
        let (we, wl) = Self::gene_weights(self.spec);
        let image = |v: NodeId| self.recon.image(v);
        let node_cost = |p: NodeId, a: NodeId, b: NodeId| {
            let dup = p == a || p == b;
            let edge = |c: NodeId| if c == p { 0 } else { sp.depth(c) - sp.depth(p) - 1 + usize::from(dup) };
            we * usize::from(dup) + wl * (edge(a) + edge(b))
        };
        let moved_image = image(moved);
        let mut below = sp.lca_nodes(image(attach), moved_image);
        let mut changed = node_cost(below, image(attach), moved_image);
        let mut replaced = 0;
        let mut path = 0;
        let mut z = attach;
        while z != host {
            let a = self.gene.parent(z).expect("attach lies strictly inside host");
            let other = self.gene.sibling(z).expect("internal parent");
            let lifted = sp.lca_nodes(image(a), moved_image);
            changed += node_cost(lifted, below, image(other));
            replaced += self.weight[a.index()];
            below = lifted;
            z = a;
            path += 1;
        }
        let gene_cost = self.subtree_gene_cost(host) + self.subtree_gene_cost(moved) - replaced + changed;
        let protein_cost = match self.spec.protein {
            crate::ProteinCost::Creation => 1,
            crate::ProteinCost::Loss => path + 2,
            crate::ProteinCost::Mutation => path + 3,
        };
        gene_cost + protein_cost
    }

    fn best_move(&self, x: NodeId) -> Option<LocalMove> {
        let attachments = mix_attachments(&self.gene, x, &self.recon);
        let before = self.subtree_gene_cost(x);
        // Trees are built only for cost ties and for the winner; ties go to
        // the smallest canonical form.
        let mut best: Option<(usize, Attachment, Option<String>)> = None;
        for att in attachments {
            let (moved, host, attach) = att;
            let cost = self.candidate_cost(moved, host, attach);
            match &mut best {
                Some((c, _, _)) if cost > *c => {}
                Some((c, inc, key)) if cost == *c => {
                    let incumbent = key.get_or_insert_with(|| graft_within(&self.gene, inc.1, inc.0, inc.2).canonical_form());
                    let challenger = graft_within(&self.gene, host, moved, attach).canonical_form();
                    if challenger < *incumbent {
                        best = Some((cost, att, Some(challenger)));
                    }
                }
                _ => best = Some((cost, att, None)),
            }
        }
        let (cost, (moved, host, attach), _) = best?;
        (cost < before).then(|| LocalMove {
            node: x,
            replacement: graft_within(&self.gene, host, moved, attach),
            delta: before - cost,
        })
    }
}

/// `(moved, host, attach)`: graft `moved` above `attach` inside `host`.
type Attachment = (NodeId, NodeId, NodeId);

fn gene_species(gene: &PhyloTree, species: &PhyloTree, s: &LeafMapping) -> Result<Reconciliation> {
    let images = s.leaf_images(gene, species)?;
    let mapping = ExtendedMapping::from_leaf_images(gene, species, images);
    Ok(reconcile_gene_species_mapped(gene, species, mapping))
}

/// `XY(P, G, S)`, where the species leaves need not all be images.
fn xy_cost(
    protein: &PhyloTree,
    gene: &PhyloTree,
    species: &PhyloTree,
    g: &LeafMapping,
    s: &LeafMapping,
    spec: CostSpec,
) -> Result<usize> {
    let gs = gene_species(gene, species, s)?;
    let images = g.leaf_images(protein, gene)?;
    let mapping = ExtendedMapping::from_leaf_images(protein, gene, images);
    let pg = reconcile_protein_gene_mapped(protein, gene, mapping, gs.labels());
    Ok(spec.combine(&pg, &gs))
}

/// Best improving rearrangement of `g(P)[x]`, if any.
pub fn best_local_replacement(
    protein: &PhyloTree,
    species: &PhyloTree,
    g: &LeafMapping,
    s: &LeafMapping,
    x: NodeId,
    spec: CostSpec,
) -> Result<Option<LocalMove>> {
    let inst = Instance::new(protein, species, g, s, spec)?;
    if !incongruent_duplications(&inst.gene, &inst.recon).contains(&x) {
        return Ok(None);
    }
    Ok(inst.best_move(x))
}

/// Maximum-`delta` subset of `moves` with no two nodes in an
/// ancestor/descendant relation, by a bottom-up tree DP. On ties the
/// descendants are kept.
pub fn select_antichain(moves: Vec<LocalMove>, gene: &PhyloTree) -> Vec<LocalMove> {
    let mut at: Vec<Option<LocalMove>> = vec![None; gene.len()];
    for m in moves {
        let i = m.node.index();
        at[i] = Some(m);
    }
    let mut best = vec![0usize; gene.len()];
    let mut take = vec![false; gene.len()];
    for x in gene.nodes() {
        let below = gene.children(x).map_or(0, |(l, r)| best[l.index()] + best[r.index()]);
        let here = at[x.index()].as_ref().map_or(0, |m| m.delta);
        take[x.index()] = here > below;
        best[x.index()] = here.max(below);
    }
    let mut chosen = Vec::new();
    let mut stack = vec![gene.root()];
    while let Some(x) = stack.pop() {
        if take[x.index()] {
            chosen.push(at[x.index()].take().expect("taken node has a move"));
        } else if let Some((l, r)) = gene.children(x) {
            stack.push(r);
            stack.push(l);
        }
    }
    chosen.sort_by_key(|m| m.node);
    chosen
}

/// Outcome of one correction run.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionReport {
    pub leaves: usize,
    /// `XY(P, g(P), S)`, which equals `Y(g(P), S)`.
    pub baseline: usize,
    pub output_cost: usize,
    /// Duplications and losses of `g(P)` against the species tree.
    pub baseline_duplications: usize,
    pub baseline_losses: usize,
    /// Applied moves: root of the replaced subtree in `g(P)` and its `delta`.
    pub applied: Vec<(NodeId, usize)>,
    /// Number of improving candidates before antichain selection.
    pub candidates: usize,
    pub modified: bool,
    /// Wall time, when measured.
    pub elapsed_ms: Option<f64>,
}

impl CorrectionReport {
    pub fn total_delta(&self) -> usize {
        self.applied.iter().map(|&(_, d)| d).sum()
    }

    pub fn reduction(&self) -> usize {
        self.baseline - self.output_cost
    }
}

/// Corrects `g(P)` against `species`; the result is `g(P)` itself or a tree
/// with strictly lower double cost.
pub fn correct_gene_tree(
    protein: &PhyloTree,
    species: &PhyloTree,
    g: &LeafMapping,
    s: &LeafMapping,
    spec: CostSpec,
) -> Result<(PhyloTree, CorrectionReport)> {
    #[cfg(feature = "std")]
    let start = std::time::Instant::now();

    let inst = Instance::new(protein, species, g, s, spec)?;
    let baseline = spec.gene.of(&inst.recon);
    debug_assert_eq!(
        xy_cost(protein, &inst.gene, species, g, s, spec)?,
        baseline,
        "X(P, g(P)) must vanish"
    );

    let mut moves = Vec::new();
    for x in incongruent_duplications(&inst.gene, &inst.recon) {
        if let Some(m) = inst.best_move(x) {
            moves.push(m);
        }
    }
    let candidates = moves.len();
    let chosen = select_antichain(moves, &inst.gene);
    let output = if chosen.is_empty() {
        inst.gene.clone()
    } else {
        let repl: Vec<(NodeId, &PhyloTree)> = chosen.iter().map(|m| (m.node, &m.replacement)).collect();
        inst.gene.replace_subtrees(&repl)?
    };
    let output_cost = xy_cost(protein, &output, species, g, s, spec)?;

    let report = CorrectionReport {
        leaves: protein.leaf_count(),
        baseline,
        output_cost,
        baseline_duplications: inst.recon.event_cost(),
        baseline_losses: inst.recon.loss_cost(),
        applied: chosen.iter().map(|m| (m.node, m.delta)).collect(),
        candidates,
        modified: !chosen.is_empty(),
        #[cfg(feature = "std")]
        elapsed_ms: Some(start.elapsed().as_secs_f64() * 1e3),
        #[cfg(not(feature = "std"))]
        elapsed_ms: None,
    };
    Ok((output, report))
}

pub const DEFAULT_EXACT_CAP: usize = 8;

/// Exhaustive MinDRGT: tries every gene tree topology on the genes of `P`.
/// Ties go to the smallest canonical form.
pub fn solve_exact(
    protein: &PhyloTree,
    species: &PhyloTree,
    g: &LeafMapping,
    s: &LeafMapping,
    spec: CostSpec,
    cap: usize,
) -> Result<(PhyloTree, usize)> {
    let mut genes = BTreeSet::new();
    for name in protein.leaf_names() {
        genes.insert(g.get(name).ok_or_else(|| Error::MissingMapping(name.to_string()))?);
    }
    let genes: Vec<&str> = genes.into_iter().collect();
    let mut best: Option<(usize, String, PhyloTree)> = None;
    for tree in enumerate_topologies(&genes, cap)? {
        let cost = xy_cost(protein, &tree, species, g, s, spec)?;
        if best.as_ref().is_some_and(|(c, _, _)| cost > *c) {
            continue;
        }
        let key = tree.canonical_form();
        if best.as_ref().is_none_or(|(c, k, _)| cost < *c || key < *k) {
            best = Some((cost, key, tree));
        }
    }
    let (cost, _, tree) = best.expect("at least one topology");
    Ok((tree, cost))
}
