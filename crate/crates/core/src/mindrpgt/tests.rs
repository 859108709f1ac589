use alloc::collections::BTreeSet;
use alloc::string::ToString;

use super::*;
use crate::reconcile::{reconcile_gene_species, reconcile_protein_gene};
use crate::simulate::{simulate, SimConfig};
use crate::testutil::{chop, t};

fn family(trees: &[&str]) -> SubtreeFamily {
    SubtreeFamily::new(trees.iter().map(|s| t(s)).collect()).unwrap()
}

fn creat_form(tree: &PhyloTree) -> String {
    tree.canonical_with(|e| e == Event::Creat)
}

/// Labelled protein tree whose maximal creation-free subtrees have the
/// leaf sets used in the span example.
const SPAN_TREE: &str =
    "((((b01,b02)Creat,c11)Spec,((b11,a21)Spec,(b21,c12)Spec)Spec)Creat,((a31,b31)Spec,(c21,(c31,d31)Spec)Spec)Spec)Spec;";

fn span_family() -> (PhyloTree, SubtreeFamily) {
    let p = t(SPAN_TREE);
    let fam = extract_max_creation_free_subtrees(&p, &chop(&p)).unwrap();
    (p, fam)
}

fn names(v: &[&str]) -> Vec<String> {
    let mut out: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    out.sort_unstable();
    out
}

#[test]
fn span_example_family_leafsets() {
    let (_, fam) = span_family();
    let sets: BTreeSet<Vec<String>> = fam
        .trees()
        .iter()
        .map(|t| {
            let mut v: Vec<String> = t.leaf_names().map(str::to_string).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let want: BTreeSet<Vec<String>> = [
        names(&["b01", "c11", "a31", "b31", "c21", "c31", "d31"]),
        names(&["b02", "c11", "a31", "b31", "c21", "c31", "d31"]),
        names(&["b11", "a21", "b21", "c12", "a31", "b31", "c21", "c31", "d31"]),
    ]
    .into_iter()
    .collect();
    assert_eq!(sets, want);
}

#[test]
fn span_example_spans_and_classes() {
    let (_, fam) = span_family();
    // Order the family as P1, P2, P3 of the example.
    let mut trees = fam.trees().to_vec();
    trees.sort_by_key(|t| {
        ["b01", "b02", "b11"].iter().position(|n| t.find_leaf(n).is_some()).unwrap()
    });
    let fam = SubtreeFamily::new(trees).unwrap();
    let spans = compute_spans(&fam);
    assert_eq!(spans["b01"], [0]);
    assert_eq!(spans["c11"], [0, 1]);
    assert_eq!(spans["b11"], [2]);
    assert_eq!(spans["a31"], [0, 1, 2]);

    let part = span_partition(&fam).unwrap();
    let got: BTreeSet<(Vec<String>, Vec<usize>)> =
        part.classes.iter().map(|c| (c.leaves.clone(), c.span.clone())).collect();
    let want: BTreeSet<(Vec<String>, Vec<usize>)> = [
        (names(&["b01"]), vec![0]),
        (names(&["b02"]), vec![1]),
        (names(&["b11", "a21", "b21", "c12"]), vec![2]),
        (names(&["c11"]), vec![0, 1]),
        (names(&["a31", "b31", "c21", "c31", "d31"]), vec![0, 1, 2]),
    ]
    .into_iter()
    .collect();
    assert_eq!(got, want);

    let idx = |leaf: &str| part.classes.iter().position(|c| c.leaves.iter().any(|l| l == leaf)).unwrap();
    assert!(check_case_a(&fam, &part, idx("b01"), idx("b02")));
    assert!(!check_case_a(&fam, &part, idx("b01"), idx("c11")));
    assert!(!check_case_a(&fam, &part, idx("b01"), idx("b01")));
}

#[test]
fn span_example_round_trip_and_lemma() {
    let (p, fam) = span_family();
    let (out, trace) = assemble_protein_tree_traced(&fam).unwrap();
    assert_eq!(creat_form(&out), creat_form(&p));
    assert_eq!(trace.joins, 2);
    let report = check_lemma1(&fam, &span_partition(&fam).unwrap(), &p).unwrap();
    assert!(report.passed() && report.witness.is_some());
}

#[test]
fn trivial_spans_and_partitions() {
    let fam = family(&["((a,b),c);"]);
    assert!(compute_spans(&fam).values().all(|s| s == &[0]));
    let part = span_partition(&fam).unwrap();
    assert_eq!(part.classes.len(), 1);
    assert_eq!(part.classes[0].leaves, names(&["a", "b", "c"]));

    let fam = family(&["(a,b);", "(c,d);"]);
    let spans = compute_spans(&fam);
    assert_eq!((spans["a"].clone(), spans["d"].clone()), (vec![0], vec![1]));

    let fam = family(&["((a,b),c);", "(c,(b,a));"]);
    let part = span_partition(&fam).unwrap();
    assert_eq!(part.classes.len(), 1);
    assert_eq!(part.classes[0].span, [0, 1]);
}

#[test]
fn inconsistent_restrictions_are_rejected() {
    let fam = family(&["((a,b),c);", "((a,c),b);"]);
    assert!(matches!(span_partition(&fam), Err(Error::InconsistentFamily(_))));
    assert!(assemble_protein_tree(&fam).is_err());
}

#[test]
fn assemble_trivial_families() {
    let fam = family(&["((a11,b11),c11);"]);
    let out = assemble_protein_tree(&fam).unwrap();
    assert_eq!(out.canonical_form(), t("((a11,b11),c11);").canonical_form());

    let fam = family(&["x11;", "x12;"]);
    let part = span_partition(&fam).unwrap();
    assert!(check_case_a(&fam, &part, 0, 1));
    assert_eq!(assemble_protein_tree(&fam).unwrap().to_newick(), "(x11,x12)Creat;");

    let truth = t("((x11,y11)Spec,(x12,y12)Spec)Creat;");
    let fam = extract_max_creation_free_subtrees(&truth, &chop(&truth)).unwrap();
    assert_eq!(fam.len(), 2);
    assert_eq!(creat_form(&assemble_protein_tree(&fam).unwrap()), creat_form(&truth));
}

#[test]
fn extraction_examples() {
    let p = t("((a11,b11)Spec,c11)Spec;");
    let fam = extract_max_creation_free_subtrees(&p, &chop(&p)).unwrap();
    assert_eq!(fam.trees(), [p.without_labels()]);

    let p = t("(x11,x12)Creat;");
    let fam = extract_max_creation_free_subtrees(&p, &chop(&p)).unwrap();
    assert_eq!(fam.trees().iter().map(PhyloTree::to_newick).collect::<Vec<_>>(), ["x11;", "x12;"]);

    let unlabelled = t("((a11,b11),c11)Spec;");
    assert!(extract_max_creation_free_subtrees(&unlabelled, &chop(&unlabelled)).is_err());
    let hidden = t("(x11,x12)Spec;");
    assert!(extract_max_creation_free_subtrees(&hidden, &chop(&hidden)).is_err());
    let many = t("((((x11,x12)Creat,x13)Creat,x14)Creat,x15)Creat;");
    assert!(matches!(extract_with_cap(&many, &chop(&many), 3), Err(Error::CapExceeded { size: 4, cap: 3 })));
}

/// Brute force: every leaf subset whose pairwise LCAs avoid `Creat`, kept
/// when no other such subset strictly contains it.
fn extraction_oracle(p: &PhyloTree) -> BTreeSet<Vec<String>> {
    let leaves = p.leaves();
    let free: Vec<u32> = (1u32..1 << leaves.len())
        .filter(|&m| {
            let chosen: Vec<NodeId> = (0..leaves.len()).filter(|i| m >> i & 1 == 1).map(|i| leaves[i]).collect();
            chosen.iter().enumerate().all(|(i, &a)| {
                chosen[i + 1..].iter().all(|&b| p.label(p.lca_nodes(a, b)) != Some(Event::Creat))
            })
        })
        .collect();
    free.iter()
        .filter(|&&m| !free.iter().any(|&o| o != m && o & m == m))
        .map(|&m| {
            let mut v: Vec<String> =
                (0..leaves.len()).filter(|i| m >> i & 1 == 1).map(|i| p.name(leaves[i]).unwrap().to_string()).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

fn sim_config(seed: u64) -> SimConfig {
    SimConfig { species: 5, duplication: 0.15, loss: 0.15, creation: 0.2, protein_loss: 0.2, seed }
}

/// Simulated protein tree labelled by LCA-reconciliation, with its mapping.
fn labelled_protein(seed: u64) -> (PhyloTree, LeafMapping) {
    let truth = simulate(&sim_config(seed)).unwrap();
    let gs = reconcile_gene_species(&truth.gene, &truth.species, &truth.s).unwrap();
    let pg = reconcile_protein_gene(&truth.protein, &truth.gene, &truth.g, &gs).unwrap();
    (pg.labeled_tree(&truth.protein), truth.g)
}

fn creat_nodes(p: &PhyloTree) -> usize {
    p.internal_nodes().filter(|&x| p.label(x) == Some(Event::Creat)).count()
}

fn has_adjacent_creations(p: &PhyloTree) -> bool {
    p.internal_nodes().any(|x| {
        p.label(x) == Some(Event::Creat) && p.parent(x).is_some_and(|y| p.label(y) == Some(Event::Creat))
    })
}

#[test]
fn extraction_matches_brute_force() {
    let mut checked = 0;
    for seed in 0..300 {
        let (p, g) = labelled_protein(seed);
        if p.leaf_count() > 14 || creat_nodes(&p) > 12 {
            continue;
        }
        let fam = extract_max_creation_free_subtrees(&p, &g).unwrap();
        let got: BTreeSet<Vec<String>> = fam
            .trees()
            .iter()
            .map(|t| {
                let mut v: Vec<String> = t.leaf_names().map(str::to_string).collect();
                v.sort_unstable();
                v
            })
            .collect();
        assert_eq!(got.len(), fam.len());
        assert_eq!(got, extraction_oracle(&p), "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 100);
}

#[test]
fn adjacent_creations_are_not_identifiable() {
    let a = t("((a11,b11)Creat,c11)Creat;");
    let b = t("(a11,(b11,c11)Creat)Creat;");
    let ga = chop(&a);
    let fa = extract_max_creation_free_subtrees(&a, &ga).unwrap();
    let fb = extract_max_creation_free_subtrees(&b, &chop(&b)).unwrap();
    assert_eq!(fa, fb);
    assert_ne!(creat_form(&a), creat_form(&b));
}

/// Canonical form with each maximal run of adjacent `Creat` nodes merged
/// into one multifurcation.
fn collapsed(p: &PhyloTree) -> String {
    fn parts(p: &PhyloTree, x: NodeId) -> Vec<String> {
        match p.children(x) {
            Some((l, r)) if p.label(x) == Some(Event::Creat) => {
                let mut v = parts(p, l);
                v.extend(parts(p, r));
                v
            }
            _ => vec![enc(p, x)],
        }
    }
    fn enc(p: &PhyloTree, x: NodeId) -> String {
        match p.children(x) {
            None => p.name(x).unwrap().to_string(),
            Some(_) if p.label(x) == Some(Event::Creat) => {
                let mut v = parts(p, x);
                v.sort_unstable();
                alloc::format!("<{}>Creat", v.join("|"))
            }
            Some((l, r)) => {
                let mut v = [enc(p, l), enc(p, r)];
                v.sort_unstable();
                alloc::format!("({},{})", v[0], v[1])
            }
        }
    }
    enc(p, p.root())
}

#[test]
fn collapsed_encoding_merges_creation_runs() {
    assert_eq!(collapsed(&t("((a11,b11)Creat,c11)Creat;")), collapsed(&t("(a11,(b11,c11)Creat)Creat;")));
    assert_ne!(collapsed(&t("((a11,b11)Creat,c11)Creat;")), collapsed(&t("((a11,b11)Spec,c11)Creat;")));
    assert_eq!(collapsed(&t("(((a,b)Creat,c)Spec,d)Creat;")), "<(<a|b>Creat,c)|d>Creat");
}

#[test]
fn round_trip_on_simulated_trees() {
    let (mut strict, mut loose) = (0, 0);
    for seed in 0..400 {
        let (p, g) = labelled_protein(seed);
        let creations = creat_nodes(&p);
        if p.leaf_count() > 40 || creations > 6 {
            continue;
        }
        let fam = extract_max_creation_free_subtrees(&p, &g).unwrap();
        let (out, trace) = assemble_protein_tree_traced(&fam).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        for sub in fam.trees() {
            let r = out.restrict(sub.leaf_names()).unwrap();
            assert_eq!(r.canonical_shape(), sub.canonical_shape(), "seed {seed}");
        }
        assert_eq!(trace.joins, creations, "seed {seed}");
        assert_eq!(collapsed(&out), collapsed(&p), "seed {seed}");
        loose += 1;
        if !has_adjacent_creations(&p) {
            assert_eq!(creat_form(&out), creat_form(&p), "seed {seed}");
            strict += 1;
        }
        let report = check_lemma1(&fam, &span_partition(&fam).unwrap(), &p).unwrap();
        assert!(report.passed(), "seed {seed}");
    }
    assert!(strict >= 100 && loose >= strict, "{strict} {loose}");
}

#[test]
fn partition_classes_are_maximal() {
    for seed in 0..100 {
        let (p, g) = labelled_protein(seed);
        if creat_nodes(&p) > 8 {
            continue;
        }
        let fam = extract_max_creation_free_subtrees(&p, &g).unwrap();
        let part = span_partition(&fam).unwrap();
        let mut seen = BTreeSet::new();
        for c in &part.classes {
            for l in &c.leaves {
                assert!(seen.insert(l.clone()));
            }
        }
        assert_eq!(seen.len(), p.leaf_count());
        let spans: BTreeSet<&Vec<usize>> = part.classes.iter().map(|c| &c.span).collect();
        assert_eq!(spans.len(), part.classes.len());
    }
}

