use std::collections::{BTreeMap, BTreeSet};

use drecon_core::mindrgt::{correct_gene_tree, induced_gene_tree};
use drecon_core::reconcile::{
    double_cost, reconcile_gene_species, reconcile_protein_gene, relabel_for_prop1, CostSpec, LeafMapping,
};
use drecon_core::simulate::{simulate, simulate_species_tree, species_name, SimConfig};
use drecon_core::tree::TreeBuilder;
use drecon_core::{Event, PhyloTree};
use proptest::prelude::*;

/// Random topology on `names`, with optional random labels.
fn shaped(names: &[String], seed: u64, labels: &[u8]) -> PhyloTree {
    let base = simulate_species_tree(names.len(), seed).unwrap();
    let by_default: BTreeMap<String, &String> = (0..names.len()).map(species_name).zip(names).collect();
    let renamed = base.rename_leaves(|n| Ok(by_default[n].clone())).unwrap();
    renamed.map_labels(|x, _| match labels.get(x.index()).copied().unwrap_or(0) % 4 {
        1 => Some(Event::Spec),
        2 => Some(Event::Dup),
        3 => Some(Event::Creat),
        _ => None,
    })
}

fn names() -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set("[a-zA-Z0-9_.' ():,;\\[\\]-]{1,5}", 1..24).prop_map(|s| s.into_iter().collect())
}

/// Same tree with the children of each node flagged in `flips` swapped.
fn swap_children(t: &PhyloTree, flips: &[bool]) -> PhyloTree {
    let mut b = TreeBuilder::new();
    let mut ids = Vec::with_capacity(t.len());
    for x in t.nodes() {
        let id = match t.children(x) {
            None => b.leaf(t.name(x).unwrap()),
            Some((l, r)) if flips.get(x.index()).copied().unwrap_or(false) => {
                b.internal(ids[r.index()], ids[l.index()], t.label(x))
            }
            Some((l, r)) => b.internal(ids[l.index()], ids[r.index()], t.label(x)),
        };
        ids.push(id);
    }
    b.build(ids[t.root().index()]).unwrap()
}

fn noisy(seed: u64, species: usize) -> SimConfig {
    SimConfig { species, duplication: 0.15, loss: 0.15, creation: 0.15, protein_loss: 0.25, seed }
}

proptest! {
    #[test]
    fn newick_round_trip(names in names(), seed: u64, labels in prop::collection::vec(any::<u8>(), 64)) {
        let t = shaped(&names, seed, &labels);
        let text = t.to_newick();
        let back = PhyloTree::from_newick(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.to_newick(), text);
    }

    #[test]
    fn restriction_composes(names in names(), seed: u64, a in any::<u64>(), b in any::<u64>()) {
        let t = shaped(&names, seed, &[]);
        let outer: Vec<&str> = names.iter().enumerate().filter(|(i, _)| a >> (i % 64) & 1 == 1).map(|(_, n)| n.as_str()).collect();
        let inner: Vec<&str> = outer.iter().enumerate().filter(|(i, _)| b >> (i % 64) & 1 == 1).map(|(_, n)| *n).collect();
        prop_assume!(!inner.is_empty());
        let twice = t.restrict(outer.iter().copied()).unwrap().restrict(inner.iter().copied()).unwrap();
        let once = t.restrict(inner.iter().copied()).unwrap();
        prop_assert_eq!(twice.canonical_form(), once.canonical_form());
        let kept: BTreeSet<&str> = once.leaf_names().collect();
        prop_assert_eq!(kept, inner.iter().copied().collect::<BTreeSet<_>>());
    }

    #[test]
    fn canonical_form_ignores_child_order(names in names(), seed: u64, labels in prop::collection::vec(any::<u8>(), 64), flips in prop::collection::vec(any::<bool>(), 64)) {
        let t = shaped(&names, seed, &labels);
        let s = swap_children(&t, &flips);
        prop_assert_eq!(t.canonical_form(), s.canonical_form());
        let reparsed = PhyloTree::from_newick(&s.to_newick()).unwrap();
        prop_assert_eq!(reparsed.canonical_form(), t.canonical_form());
    }

    #[test]
    fn lca_is_the_deepest_common_ancestor(names in names(), seed: u64, i in any::<usize>(), j in any::<usize>()) {
        let t = shaped(&names, seed, &[]);
        let (a, b) = (t.leaves()[i % t.leaf_count()], t.leaves()[j % t.leaf_count()]);
        let w = t.lca_nodes(a, b);
        prop_assert!(t.is_ancestor_or_self(w, a) && t.is_ancestor_or_self(w, b));
        if let Some((l, r)) = t.children(w) {
            prop_assert!(!(t.is_ancestor_or_self(l, a) && t.is_ancestor_or_self(l, b)));
            prop_assert!(!(t.is_ancestor_or_self(r, a) && t.is_ancestor_or_self(r, b)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cost_identities_on_simulated_triples(seed: u64, species in 2usize..9) {
        let t = simulate(&noisy(seed, species)).unwrap();
        let gs = reconcile_gene_species(&t.gene, &t.species, &t.s).unwrap();
        let pg = reconcile_protein_gene(&t.protein, &t.gene, &t.g, &gs).unwrap();
        prop_assert!(gs.check_identities() && pg.check_identities());
        prop_assert_eq!(gs.mutation_cost(), gs.event_cost() + gs.loss_cost());
        prop_assert_eq!(pg.mutation_cost(), pg.event_cost() + pg.loss_cost());
        for x in t.gene.internal_nodes() {
            let (l, r) = t.gene.children(x).unwrap();
            let same = gs.image(x) == gs.image(l) || gs.image(x) == gs.image(r);
            prop_assert_eq!(gs.label(x) == Some(Event::Dup), same);
        }
        for x in t.protein.internal_nodes() {
            let (l, r) = t.protein.children(x).unwrap();
            let same = pg.image(x) == pg.image(l) || pg.image(x) == pg.image(r);
            prop_assert_eq!(pg.label(x) == Some(Event::Creat), same);
        }
    }

    #[test]
    fn prop1_equivalence(seed: u64, species in 2usize..9) {
        let t = simulate(&noisy(seed, species)).unwrap();
        let gs = reconcile_gene_species(&t.gene, &t.species, &t.s).unwrap();
        let pg = reconcile_protein_gene(&t.protein, &t.gene, &t.g, &gs).unwrap();
        let sw = relabel_for_prop1(&t.protein, &t.gene, &t.g);
        let as_gene = reconcile_gene_species(&sw.gene, &sw.species, &sw.mapping).unwrap();
        prop_assert_eq!(pg.event_cost(), as_gene.event_cost());
        prop_assert_eq!(pg.loss_cost(), as_gene.loss_cost());
        prop_assert_eq!(pg.mutation_cost(), as_gene.mutation_cost());
    }

    #[test]
    fn correction_contract(seed: u64, species in 3usize..10, spec_idx in 0usize..9) {
        let cfg = SimConfig { species, duplication: 0.2, loss: 0.2, creation: 0.0, protein_loss: 0.0, seed };
        let t = simulate(&cfg).unwrap();
        let spec = CostSpec::ALL[spec_idx];
        let (out, rep) = correct_gene_tree(&t.protein, &t.species, &t.g, &t.s, spec).unwrap();
        let gp = induced_gene_tree(&t.protein, &t.g).unwrap();
        prop_assert!(rep.output_cost <= rep.baseline);
        prop_assert_eq!(rep.output_cost + rep.total_delta(), rep.baseline);
        prop_assert_eq!(rep.output_cost, double_cost(&t.protein, &out, &t.species, &t.g, &t.s, spec).unwrap());
        if !rep.modified {
            prop_assert_eq!(&out, &gp);
        }
        let mut a: Vec<&str> = out.leaf_names().collect();
        let mut b: Vec<&str> = gp.leaf_names().collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn congruent_triples_cost_nothing() {
    for seed in 0..50 {
        let t = simulate(&SimConfig::congruent(2 + seed as usize % 10, seed)).unwrap();
        for spec in CostSpec::ALL {
            assert_eq!(double_cost(&t.protein, &t.gene, &t.species, &t.g, &t.s, spec).unwrap(), 0);
        }
    }
}

#[test]
fn bad_mappings_are_reported() {
    let g = PhyloTree::from_newick("(a1,b1);").unwrap();
    let s = PhyloTree::from_newick("(a,b);").unwrap();
    let partial: LeafMapping = [("a1", "a")].into_iter().collect();
    assert!(reconcile_gene_species(&g, &s, &partial).is_err());
    let dangling: LeafMapping = [("a1", "a"), ("b1", "z")].into_iter().collect();
    assert!(reconcile_gene_species(&g, &s, &dangling).is_err());
}

