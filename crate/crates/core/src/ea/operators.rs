//! Variation operators over package-order chromosomes.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::chromosome::Chromosome;
use crate::domain::{GeneKey, InstanceIndex};
use crate::error::{Error, Result};

/// Builds a child by taking `pa[0]`, `pb[0]`, `pa[1]`, `pb[1]`, ... and keeping
/// each gene the first time its key is seen. Genes keep the staff
/// allocations of the parent they were copied from.
pub fn crossover(pa: &Chromosome, pb: &Chromosome) -> Result<Chromosome> {
    if pa.len() != pb.len() {
        return Err(Error::MismatchedParents);
    }
    let keys_a: HashSet<GeneKey> = pa.keys().collect();
    let keys_b: HashSet<GeneKey> = pb.keys().collect();
    if keys_a.len() != pa.len() || keys_a != keys_b {
        return Err(Error::MismatchedParents);
    }
    let mut seen = HashSet::with_capacity(pa.len());
    let mut genes = Vec::with_capacity(pa.len());
    for (a, b) in pa.genes.iter().zip(&pb.genes) {
        for gene in [a, b] {
            if seen.insert(gene.key) {
                genes.push(gene.clone());
            }
        }
    }
    Ok(Chromosome::new(genes))
}

/// What a mutation did, for tracing and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Entry `entry` of the gene at `gene` now names another (or the same)
    /// qualified technician.
    Reassign { gene: usize, entry: usize },
    /// The gene at `from` was removed and reinserted at `to`.
    Relocate { from: usize, to: usize },
}

/// Applies one of the two mutation operators, each with probability one
/// half.
pub fn mutate<R: Rng>(chromosome: &mut Chromosome, index: &InstanceIndex, rng: &mut R) -> Option<Mutation> {
    if chromosome.is_empty() {
        return None;
    }
    if rng.gen_bool(0.5) {
        Some(reassign(chromosome, index, rng))
    } else {
        Some(relocate(chromosome, rng))
    }
}

pub fn reassign<R: Rng>(chromosome: &mut Chromosome, index: &InstanceIndex, rng: &mut R) -> Mutation {
    let g = rng.gen_range(0..chromosome.len());
    let gene = &mut chromosome.genes[g];
    let e = rng.gen_range(0..gene.entries.len());
    let entry = &mut gene.entries[e];
    if let Some(tech) = index
        .qualified(gene.key.wp, entry.wo as usize, entry.slot as usize)
        .choose(rng)
    {
        entry.tech = *tech;
    }
    Mutation::Reassign { gene: g, entry: e }
}

pub fn relocate<R: Rng>(chromosome: &mut Chromosome, rng: &mut R) -> Mutation {
    let n = chromosome.len();
    let from = rng.gen_range(0..n);
    let to = rng.gen_range(0..n);
    let gene = chromosome.genes.remove(from);
    chromosome.genes.insert(to, gene);
    Mutation::Relocate { from, to }
}
