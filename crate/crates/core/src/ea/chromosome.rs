use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{GeneKey, InstanceIndex, ProblemInstance, TechId};
use crate::error::{Error, Result};

/// One staff allocation: technician `tech` fills slot `slot` of work order
/// `wo` within the gene's package.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StaffEntry {
    pub wo: u16,
    pub slot: u16,
    pub tech: TechId,
}

/// A package occurrence on one aircraft together with its staff
/// allocations, ordered by work order then slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gene {
    pub key: GeneKey,
    pub entries: Vec<StaffEntry>,
}

impl Gene {
    /// A gene whose allocations are drawn uniformly from each slot's
    /// qualified technicians.
    pub fn random<R: Rng>(key: GeneKey, instance: &ProblemInstance, index: &InstanceIndex, rng: &mut R) -> Result<Self> {
        let wp = instance
            .work_package(key.wp)
            .ok_or(Error::UnknownWorkPackage(key.wp.0))?;
        let mut entries = Vec::with_capacity(wp.slot_count());
        for (wo, def) in wp.work_orders.iter().enumerate() {
            for slot in 0..def.slots.len() {
                let tech = *index
                    .qualified(key.wp, wo, slot)
                    .choose(rng)
                    .ok_or(Error::Unsolvable {
                        wp: key.wp.0,
                        wo,
                        slot,
                    })?;
                entries.push(StaffEntry {
                    wo: wo as u16,
                    slot: slot as u16,
                    tech,
                });
            }
        }
        Ok(Self { key, entries })
    }
}

/// Package placement priority: genes are decoded front to back.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chromosome {
    pub genes: Vec<Gene>,
}

impl Chromosome {
    pub fn new(genes: Vec<Gene>) -> Self {
        Self { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = GeneKey> + '_ {
        self.genes.iter().map(|g| g.key)
    }

    /// Uniformly random gene order with uniformly random qualified staff.
    pub fn random<R: Rng>(instance: &ProblemInstance, index: &InstanceIndex, rng: &mut R) -> Result<Self> {
        let mut keys = index.genes().to_vec();
        keys.shuffle(rng);
        let genes = keys
            .into_iter()
            .map(|key| Gene::random(key, instance, index, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { genes })
    }

    /// Checks that the chromosome holds every gene of the instance exactly
    /// once and that each allocation is well-formed and qualified.
    pub fn validate(&self, instance: &ProblemInstance, index: &InstanceIndex) -> Result<()> {
        let mut expected: HashMap<GeneKey, usize> = HashMap::new();
        for key in index.genes() {
            *expected.entry(*key).or_default() += 1;
        }
        for gene in &self.genes {
            match expected.get_mut(&gene.key) {
                Some(n) if *n > 0 => *n -= 1,
                _ => {
                    return Err(Error::InvalidInstance(format!(
                        "gene {} is duplicated or not part of the instance",
                        gene.key
                    )))
                }
            }
            let wp = instance
                .work_package(gene.key.wp)
                .ok_or(Error::UnknownWorkPackage(gene.key.wp.0))?;
            let layout = wp
                .work_orders
                .iter()
                .enumerate()
                .flat_map(|(wo, def)| (0..def.slots.len()).map(move |slot| (wo as u16, slot as u16)));
            if gene.entries.len() != wp.slot_count()
                || !gene.entries.iter().zip(layout).all(|(e, (wo, slot))| e.wo == wo && e.slot == slot)
            {
                return Err(Error::InvalidInstance(format!(
                    "gene {} entries do not follow its work orders",
                    gene.key
                )));
            }
            for e in &gene.entries {
                if !index.qualified(gene.key.wp, e.wo as usize, e.slot as usize).contains(&e.tech) {
                    return Err(Error::InvalidInstance(format!(
                        "technician {} unqualified for {} wo {} slot {}",
                        e.tech, gene.key, e.wo, e.slot
                    )));
                }
            }
        }
        if expected.values().any(|n| *n != 0) {
            return Err(Error::InvalidInstance("chromosome is missing genes".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let keys: Vec<String> = self.genes.iter().map(|g| g.key.to_string()).collect();
        write!(f, "[{}]", keys.join(", "))
    }
}
