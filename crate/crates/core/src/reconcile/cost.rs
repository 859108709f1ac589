use core::fmt;
use core::str::FromStr;

use super::{reconcile_gene_species, reconcile_protein_gene, LeafMapping, Reconciliation};
use crate::error::{Error, Result};
use crate::tree::PhyloTree;

/// Protein-to-gene reconciliation cost: creations, losses or both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProteinCost {
    Creation,
    Loss,
    Mutation,
}

/// Gene-to-species reconciliation cost: duplications, losses or both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneCost {
    Duplication,
    Loss,
    Mutation,
}

impl ProteinCost {
    pub fn of(self, r: &Reconciliation) -> usize {
        match self {
            Self::Creation => r.event_cost(),
            Self::Loss => r.loss_cost(),
            Self::Mutation => r.mutation_cost(),
        }
    }

    fn code(self) -> char {
        match self {
            Self::Creation => 'C',
            Self::Loss => 'L',
            Self::Mutation => 'M',
        }
    }
}

impl GeneCost {
    pub fn of(self, r: &Reconciliation) -> usize {
        match self {
            Self::Duplication => r.event_cost(),
            Self::Loss => r.loss_cost(),
            Self::Mutation => r.mutation_cost(),
        }
    }

    fn code(self) -> char {
        match self {
            Self::Duplication => 'D',
            Self::Loss => 'L',
            Self::Mutation => 'M',
        }
    }
}

/// One of the nine double reconciliation costs `XY`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CostSpec {
    pub protein: ProteinCost,
    pub gene: GeneCost,
}

impl CostSpec {
    pub const MM: CostSpec = CostSpec { protein: ProteinCost::Mutation, gene: GeneCost::Mutation };
    pub const CD: CostSpec = CostSpec { protein: ProteinCost::Creation, gene: GeneCost::Duplication };

    pub const ALL: [CostSpec; 9] = {
        use GeneCost as G;
        use ProteinCost as P;
        [
            CostSpec::new(P::Creation, G::Duplication),
            CostSpec::new(P::Creation, G::Loss),
            CostSpec::new(P::Creation, G::Mutation),
            CostSpec::new(P::Loss, G::Duplication),
            CostSpec::new(P::Loss, G::Loss),
            CostSpec::new(P::Loss, G::Mutation),
            CostSpec::new(P::Mutation, G::Duplication),
            CostSpec::new(P::Mutation, G::Loss),
            CostSpec::new(P::Mutation, G::Mutation),
        ]
    };

    pub const fn new(protein: ProteinCost, gene: GeneCost) -> Self {
        Self { protein, gene }
    }

    /// `X(P,G) + Y(G,S)` from the two reconciliations.
    pub fn combine(self, protein_gene: &Reconciliation, gene_species: &Reconciliation) -> usize {
        self.protein.of(protein_gene) + self.gene.of(gene_species)
    }
}

impl Default for CostSpec {
    fn default() -> Self {
        Self::MM
    }
}

impl fmt::Display for CostSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.protein.code(), self.gene.code())
    }
}

impl FromStr for CostSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let (Some(x), Some(y), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(Error::InvalidArgument(alloc::format!("cost must be two letters, got `{s}`")));
        };
        let protein = match x.to_ascii_uppercase() {
            'C' => ProteinCost::Creation,
            'L' => ProteinCost::Loss,
            'M' => ProteinCost::Mutation,
            _ => return Err(Error::InvalidArgument(alloc::format!("unknown protein cost `{x}`"))),
        };
        let gene = match y.to_ascii_uppercase() {
            'D' => GeneCost::Duplication,
            'L' => GeneCost::Loss,
            'M' => GeneCost::Mutation,
            _ => return Err(Error::InvalidArgument(alloc::format!("unknown gene cost `{y}`"))),
        };
        Ok(CostSpec { protein, gene })
    }
}

/// Double reconciliation cost `XY(P, G, S)`.
pub fn double_cost(
    protein: &PhyloTree,
    gene: &PhyloTree,
    species: &PhyloTree,
    g: &LeafMapping,
    s: &LeafMapping,
    spec: CostSpec,
) -> Result<usize> {
    let gs = reconcile_gene_species(gene, species, s)?;
    let pg = reconcile_protein_gene(protein, gene, g, &gs)?;
    Ok(spec.combine(&pg, &gs))
}
