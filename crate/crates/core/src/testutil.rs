use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::reconcile::LeafMapping;
use crate::tree::PhyloTree;

pub(crate) fn t(s: &str) -> PhyloTree {
    PhyloTree::from_newick(s).unwrap()
}

/// Maps each leaf to its name minus the last character.
pub(crate) fn chop(tree: &PhyloTree) -> LeafMapping {
    tree.leaf_names().map(|n| (n, &n[..n.len() - 1])).collect()
}

/// Random topology on `names` by joining random pairs of a shrinking pool.
pub(crate) fn random_tree(names: &[String], rng: &mut impl Rng) -> PhyloTree {
    let mut pool: Vec<PhyloTree> = names.iter().map(PhyloTree::leaf).collect();
    while pool.len() > 1 {
        pool.shuffle(rng);
        let a = pool.pop().unwrap();
        let b = pool.pop().unwrap();
        pool.push(PhyloTree::join(&a, &b, None).unwrap());
    }
    pool.pop().unwrap()
}

/// One-protein-per-gene instance `(P, S, g, s)` with `n` genes spread over
/// up to `k` species. Gene `aN` belongs to species `a`, protein `aN1` to gene `aN`.
pub(crate) fn random_instance(
    seed: u64,
    n: usize,
    k: usize,
) -> (PhyloTree, PhyloTree, LeafMapping, LeafMapping) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let species: Vec<String> = (0..k).map(|i| String::from((b'a' + i as u8) as char)).collect();
    let mut counts = alloc::vec![0usize; k];
    let mut genes = Vec::with_capacity(n);
    let mut s = LeafMapping::new();
    for _ in 0..n {
        let sp = rng.gen_range(0..k);
        counts[sp] += 1;
        let gene = format!("{}{}", species[sp], counts[sp]);
        s.insert(gene.clone(), species[sp].clone());
        genes.push(gene);
    }
    let used: Vec<String> = species.iter().zip(&counts).filter(|(_, &c)| c > 0).map(|(s, _)| s.clone()).collect();
    let s_tree = random_tree(&used, &mut rng);
    let proteins: Vec<String> = genes.iter().map(|g| format!("{g}1")).collect();
    let p_tree = random_tree(&proteins, &mut rng);
    let g = chop(&p_tree);
    (p_tree, s_tree, g, s)
}
