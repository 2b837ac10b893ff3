//! Dataset summary statistics: per-split instance/fact/bag counts and a
//! global manifest over entities, relations, and semantic types.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::align::{RelationalInstance, NA_LABEL};
use crate::ids::{Cui, Tui};
use crate::kg::Entity;
use crate::split::Ratios;
use crate::util::round2;

/// Counts for one corpus split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSummary {
    pub name: String,
    /// Total relational instances, NA included.
    pub instances: u64,
    /// Distinct non-NA (head, tail, relation) facts.
    pub facts: u64,
    /// Distinct ordered (head, tail) pairs, NA included.
    pub bags: u64,
    /// Mean instances per bag, rounded to 2 decimals; 0 when there are no bags.
    pub instances_per_bag: f64,
    /// Percentage of instances labeled NA, rounded to 2 decimals.
    pub na_pct: f64,
}

/// Summarize one split from its instance records.
pub fn summarize_split(name: impl Into<String>, instances: &[RelationalInstance]) -> SplitSummary {
    let mut facts: BTreeSet<(&Cui, &Cui, &str)> = BTreeSet::new();
    let mut bags: BTreeSet<(&Cui, &Cui)> = BTreeSet::new();
    let mut na = 0u64;
    for inst in instances {
        bags.insert((&inst.head.cui, &inst.tail.cui));
        if inst.relation == NA_LABEL {
            na += 1;
        } else {
            facts.insert((&inst.head.cui, &inst.tail.cui, inst.relation.as_str()));
        }
    }
    let total = instances.len() as u64;
    SplitSummary {
        name: name.into(),
        instances: total,
        facts: facts.len() as u64,
        bags: bags.len() as u64,
        instances_per_bag: if bags.is_empty() {
            0.0
        } else {
            round2(total as f64 / bags.len() as f64)
        },
        na_pct: if total == 0 {
            0.0
        } else {
            round2(na as f64 * 100.0 / total as f64)
        },
    }
}

/// Configuration values that determine a build, recorded for reproducibility.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFingerprint {
    pub seed: u64,
    pub ratios: Ratios,
    pub na_target: f64,
    pub prune_threshold: u64,
}

/// Global dataset figures across all splits.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub splits: Vec<SplitSummary>,
    /// Distinct entities appearing as an instance endpoint.
    pub entities: u64,
    /// Distinct relation labels, NA included.
    pub relations: u64,
    /// Distinct semantic types of the endpoint entities (when known).
    pub semantic_types: u64,
    /// Distinct semantic groups of the endpoint entities (when known).
    pub semantic_groups: u64,
    pub config: ConfigFingerprint,
}

/// Build the global manifest from per-split instances and the entity table.
/// Entities absent from the table still count toward the entity total but
/// contribute no semantic type or group.
pub fn build_manifest(
    splits: &[(String, Vec<RelationalInstance>)],
    entities: &BTreeMap<Cui, Entity>,
    config: ConfigFingerprint,
) -> DatasetManifest {
    let mut seen_entities: BTreeSet<&Cui> = BTreeSet::new();
    let mut relations: BTreeSet<&str> = BTreeSet::new();
    let mut tuis: BTreeSet<&Tui> = BTreeSet::new();
    let mut groups = BTreeSet::new();
    let mut summaries = Vec::with_capacity(splits.len());
    for (name, instances) in splits {
        summaries.push(summarize_split(name.clone(), instances));
        for inst in instances {
            relations.insert(inst.relation.as_str());
            for cui in [&inst.head.cui, &inst.tail.cui] {
                seen_entities.insert(cui);
                if let Some(entity) = entities.get(cui) {
                    tuis.extend(entity.tuis.iter());
                    groups.insert(entity.group);
                }
            }
        }
    }
    DatasetManifest {
        splits: summaries,
        entities: seen_entities.len() as u64,
        relations: relations.len() as u64,
        semantic_types: tuis.len() as u64,
        semantic_groups: groups.len() as u64,
        config,
    }
}
