use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::*;

fn t(s: &str) -> PhyloTree {
    PhyloTree::from_newick(s).unwrap()
}

/// Maps each leaf to the name with its last character removed
/// (`a11 -> a1`, `a1 -> a`).
fn chop(tree: &PhyloTree) -> LeafMapping {
    tree.leaf_names().map(|n| (n, &n[..n.len() - 1])).collect()
}

fn node_by_leaves(tree: &PhyloTree, leaves: &[&str]) -> NodeId {
    tree.lca(leaves.iter().copied()).unwrap()
}

/// Image oracle: deepest target node whose leaf set contains every image leaf.
fn oracle_image(src: &PhyloTree, dst: &PhyloTree, m: &LeafMapping, x: NodeId) -> NodeId {
    let wanted: BTreeSet<&str> = src.subtree_leaves(x).map(|l| m.get(src.name(l).unwrap()).unwrap()).collect();
    dst.nodes()
        .filter(|&z| {
            let have: BTreeSet<&str> = dst.subtree_leaves(z).map(|l| dst.name(l).unwrap()).collect();
            wanted.is_subset(&have)
        })
        .min_by_key(|&z| dst.subtree_size(z))
        .unwrap()
}

/// Loss oracle: depth arithmetic instead of walking the path.
fn oracle_losses(src: &PhyloTree, dst: &PhyloTree, r: &Reconciliation, same: Event) -> usize {
    src.nodes()
        .filter_map(|y| src.parent(y).map(|x| (x, y)))
        .map(|(x, y)| {
            let (ix, iy) = (r.image(x), r.image(y));
            if ix == iy {
                0
            } else {
                dst.depth(iy) - dst.depth(ix) - 1 + usize::from(r.label(x) == Some(same))
            }
        })
        .sum()
}

#[test]
fn extend_mapping_examples() {
    let s = t("(a,b);");
    let g = t("(a1,b1);");
    let m = extend_mapping(&g, &s, &chop(&g)).unwrap();
    assert_eq!(m.image(g.root()), s.root());

    let g = t("(a1,a2);");
    let m = extend_mapping(&g, &s, &chop(&g)).unwrap();
    assert_eq!(m.image(g.root()), s.find_leaf("a").unwrap());

    let s = t("((a,b),c);");
    let g = t("((a1,c1),b1);");
    let map = chop(&g);
    let m = extend_mapping(&g, &s, &map).unwrap();
    assert_eq!(m.image(g.root()), s.root());
    let cherry = node_by_leaves(&g, &["a1", "c1"]);
    assert_eq!(m.image(cherry), s.root());
    for x in g.nodes() {
        assert_eq!(m.image(x), oracle_image(&g, &s, &map, x));
    }
}

#[test]
fn mapping_errors() {
    let s = t("(a,b);");
    let g = t("(a1,b1);");
    let partial: LeafMapping = [("a1", "a")].into_iter().collect();
    assert_eq!(extend_mapping(&g, &s, &partial), Err(Error::MissingMapping("b1".into())));
    let dangling: LeafMapping = [("a1", "a"), ("b1", "z")].into_iter().collect();
    assert!(matches!(extend_mapping(&g, &s, &dangling), Err(Error::DanglingTarget { .. })));
    let g2 = t("(a1,a2);");
    assert_eq!(chop(&g2).check_surjective(&g2, &s), Err(Error::NotSurjective("b".into())));
    let p = t("(a11,a12);");
    let gene = t("a1;");
    assert!(matches!(chop(&p).check_bijective(&p, &gene), Err(Error::NotBijective(_))));
}

#[test]
fn gene_species_examples() {
    let s = t("((a,b),c);");
    let g = t("((a1,b1),c1);");
    let r = reconcile_gene_species(&g, &s, &chop(&g)).unwrap();
    assert_eq!((r.event_cost(), r.loss_cost(), r.mutation_cost()), (0, 0, 0));

    let s2 = t("(a,b);");
    let g = t("(a1,a2);");
    let r = reconcile_gene_species(&g, &s2, &chop(&g)).unwrap();
    assert_eq!(r.label(g.root()), Some(Event::Dup));
    assert_eq!((r.event_cost(), r.loss_cost(), r.mutation_cost()), (1, 0, 1));

    let g = t("((a1,c1),b1);");
    let r = reconcile_gene_species(&g, &s, &chop(&g)).unwrap();
    assert_eq!(r.label(g.root()), Some(Event::Dup));
    let ab = node_by_leaves(&s, &["a", "b"]);
    assert_eq!(r.losses_on(g.find_leaf("b1").unwrap()), [s.root(), ab]);
    assert_eq!(r.losses_on(g.find_leaf("a1").unwrap()), [ab]);
    assert!(r.losses_on(g.find_leaf("c1").unwrap()).is_empty());
    assert_eq!((r.event_cost(), r.loss_cost(), r.mutation_cost()), (1, 3, 4));
    assert_eq!(oracle_losses(&g, &s, &r, Event::Dup), 3);
    assert!(r.check_identities());
}

#[test]
fn protein_gene_examples() {
    let s = t("((a,b),c);");
    let p = t("((a11,b11),c11);");
    let g = t("((a1,b1),c1);");
    let gs = reconcile_gene_species(&g, &s, &chop(&g)).unwrap();
    let r = reconcile_protein_gene(&p, &g, &chop(&p), &gs).unwrap();
    assert_eq!((r.event_cost(), r.loss_cost(), r.mutation_cost()), (0, 0, 0));

    let p = t("(x11,x12);");
    let g = t("x1;");
    let gs = reconcile_gene_species(&g, &t("x;"), &chop(&g)).unwrap();
    let r = reconcile_protein_gene(&p, &g, &chop(&p), &gs).unwrap();
    assert_eq!(r.label(p.root()), Some(Event::Creat));
    assert_eq!((r.event_cost(), r.loss_cost()), (1, 0));

    let p = t("((a11,b11),(a21,c11));");
    let g = t("(((a1,b1),a2),c1);");
    let gs = reconcile_gene_species(&g, &s, &chop(&g)).unwrap();
    let r = reconcile_protein_gene(&p, &g, &chop(&p), &gs).unwrap();
    assert_eq!(r.label(p.root()), Some(Event::Creat));
    assert_eq!((r.event_cost(), r.loss_cost(), r.mutation_cost()), (1, 3, 4));
    let g_ab = node_by_leaves(&g, &["a1", "b1"]);
    let g_aba = g.parent(g_ab).unwrap();
    let p_ab = node_by_leaves(&p, &["a11", "b11"]);
    assert_eq!(r.losses_on(p_ab), [g.root(), g_aba]);
    assert_eq!(r.losses_on(p.find_leaf("a21").unwrap()), [g_aba]);
    assert_eq!(oracle_losses(&p, &g, &r, Event::Creat), 3);
    // Non-creation protein nodes inherit Spec/Dup from the gene node.
    assert_eq!(r.label(p_ab), gs.label(g_ab));
    assert!(r.check_identities());
}

#[test]
fn gene_labels_must_match_gene_tree() {
    let p = t("(a11,b11);");
    let g = t("(a1,b1);");
    let other = t("((a1,b1),c1);");
    let gs = reconcile_gene_species(&other, &t("((a,b),c);"), &chop(&other)).unwrap();
    assert!(matches!(reconcile_protein_gene(&p, &g, &chop(&p), &gs), Err(Error::InvalidArgument(_))));
}

#[test]
fn single_leaf_trees_cost_nothing() {
    let g = t("a1;");
    let r = reconcile_gene_species(&g, &t("a;"), &chop(&g)).unwrap();
    assert_eq!(r.mutation_cost(), 0);
}

#[test]
fn double_cost_examples() {
    let s = t("((a,b),c);");
    let p = t("((a11,b11),c11);");
    let g = t("((a1,b1),c1);");
    for spec in CostSpec::ALL {
        assert_eq!(double_cost(&p, &g, &s, &chop(&p), &chop(&g), spec).unwrap(), 0);
    }

    let p = t("((a11,c11),b11);");
    let gp = t("((a1,c1),b1);");
    assert_eq!(double_cost(&p, &gp, &s, &chop(&p), &chop(&gp), CostSpec::MM).unwrap(), 4);
    let g = t("((a1,b1),c1);");
    assert_eq!(double_cost(&p, &g, &s, &chop(&p), &chop(&g), CostSpec::MM).unwrap(), 4);
    let gs = reconcile_gene_species(&g, &s, &chop(&g)).unwrap();
    let pg = reconcile_protein_gene(&p, &g, &chop(&p), &gs).unwrap();
    assert_eq!((pg.mutation_cost(), gs.mutation_cost()), (4, 0));
    let g3 = t("((b1,c1),a1);");
    assert_eq!(double_cost(&p, &g3, &s, &chop(&p), &chop(&g3), CostSpec::MM).unwrap(), 8);
}

#[test]
fn cost_spec_codes() {
    let codes: Vec<String> = CostSpec::ALL.iter().map(|c| alloc::format!("{c}")).collect();
    assert_eq!(codes, ["CD", "CL", "CM", "LD", "LL", "LM", "MD", "ML", "MM"]);
    for c in CostSpec::ALL {
        assert_eq!(alloc::format!("{c}").parse::<CostSpec>().unwrap(), c);
    }
    assert!("DM".parse::<CostSpec>().is_err());
    assert!("M".parse::<CostSpec>().is_err());
    assert_eq!(CostSpec::default(), CostSpec::MM);
}

#[test]
fn classify_examples() {
    let g = t("(a1,b1);");
    let s = t("(a,b);");
    let r = reconcile_gene_species(&g, &s, &chop(&g)).unwrap();
    let rel = classify_pairs(&g, &r).unwrap();
    assert_eq!(rel.len(), 1);
    assert_eq!(rel[0].relation, Homology::Ortholog);

    let p = t("(x11,x12);");
    let gx = t("x1;");
    let gs = reconcile_gene_species(&gx, &t("x;"), &chop(&gx)).unwrap();
    let r = reconcile_protein_gene(&p, &gx, &chop(&p), &gs).unwrap();
    assert_eq!(classify_pairs(&p, &r).unwrap()[0].relation, Homology::Paralog);

    // Para-orthologous proteins sit on paralogous genes.
    let s = t("(a,b);");
    let g = t("((a1,b1),(a2,b2));");
    let p = t("((a11,b11),(a21,b21));");
    let gs = reconcile_gene_species(&g, &s, &chop(&g)).unwrap();
    let pg = reconcile_protein_gene(&p, &g, &chop(&p), &gs).unwrap();
    let gene_rel = classify_pairs(&g, &gs).unwrap();
    let g_map = chop(&p);
    for rel in classify_pairs(&p, &pg).unwrap() {
        let (ga, gb) = (g_map.get(&rel.a).unwrap(), g_map.get(&rel.b).unwrap());
        let gene = gene_rel
            .iter()
            .find(|r| (r.a == ga && r.b == gb) || (r.a == gb && r.b == ga))
            .unwrap()
            .relation;
        match rel.relation {
            Homology::OrthoOrtholog => assert_eq!(gene, Homology::Ortholog),
            Homology::ParaOrtholog => assert_eq!(gene, Homology::Paralog),
            other => panic!("unexpected {other:?}"),
        }
    }
    assert!(classify_pairs(&p, &pg).unwrap().iter().any(|r| r.relation == Homology::ParaOrtholog));
}

#[test]
fn apparent_creation_examples() {
    let p = t("(x11,x12);");
    assert_eq!(apparent_creations(&p, &chop(&p)).unwrap(), [p.root()].into());
    let p = t("((a11,b11),c11);");
    assert!(apparent_creations(&p, &chop(&p)).unwrap().is_empty());
    let p = t("((a11,b11),(a12,c11));");
    let oracle: BTreeSet<NodeId> = p
        .internal_nodes()
        .filter(|&x| {
            let (l, r) = p.children(x).unwrap();
            let genes = |y| -> BTreeSet<String> {
                p.subtree_leaves(y).map(|l| String::from(&p.name(l).unwrap()[..2])).collect()
            };
            !genes(l).is_disjoint(&genes(r))
        })
        .collect();
    assert_eq!(apparent_creations(&p, &chop(&p)).unwrap(), oracle);
    assert_eq!(oracle, [p.root()].into());
}

#[test]
fn prop1_on_fixed_instance() {
    let p = t("((a11,b11),(a21,c11));");
    let g = t("(((a1,b1),a2),c1);");
    let s = t("((a,b),c);");
    let gs = reconcile_gene_species(&g, &s, &chop(&g)).unwrap();
    let pg = reconcile_protein_gene(&p, &g, &chop(&p), &gs).unwrap();
    let sw = relabel_for_prop1(&p, &g, &chop(&p));
    let r = reconcile_gene_species(&sw.gene, &sw.species, &sw.mapping).unwrap();
    assert_eq!(
        (pg.event_cost(), pg.loss_cost(), pg.mutation_cost()),
        (r.event_cost(), r.loss_cost(), r.mutation_cost())
    );
}

#[test]
fn labeled_tree_writes_events() {
    let s = t("((a,b),c);");
    let g = t("((a1,c1),b1);");
    let r = reconcile_gene_species(&g, &s, &chop(&g)).unwrap();
    assert_eq!(r.labeled_tree(&g).to_newick(), "((a1,c1)Spec,b1)Dup;");
}
