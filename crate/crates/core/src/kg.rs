//! Knowledge-graph distillation: entity whitelisting by semantic type/group
//! and relation canonicalization with inverse rewriting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;

use crate::ids::{Cui, Tui};
use crate::registry::{SemanticGroup, TypeRegistry};
use crate::relations::{RelationCanonMap, RelationKind};
use crate::rows::{ConceptRow, RawRelRow, TypeAssignment};

/// A whitelisted entity with its retained semantic types and surface forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub cui: Cui,
    /// Whitelisted TUIs only.
    pub tuis: BTreeSet<Tui>,
    pub group: SemanticGroup,
    pub names: BTreeSet<String>,
}

/// A directed fact in canonical relation direction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triple {
    pub head: Cui,
    pub relation: String,
    pub tail: Cui,
}

impl Triple {
    pub fn new(head: Cui, relation: impl Into<String>, tail: Cui) -> Self {
        Triple {
            head,
            relation: relation.into(),
            tail,
        }
    }
}

/// Counters for concepts dropped while building the entity set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityDiagnostics {
    /// CUIs present in MRCONSO but absent from MRSTY.
    pub untyped: u64,
    /// CUIs whose types are all outside the whitelist.
    pub no_whitelisted_type: u64,
}

/// Aggregate whitelisted entities from parsed concept and type rows.
///
/// A concept is kept iff at least one of its TUIs is whitelisted; only
/// whitelisted TUIs are stored. The entity's group is taken from its lowest
/// whitelisted TUI, which makes the assignment order-independent.
pub fn build_entity_set(
    concepts: &[ConceptRow],
    types: &[TypeAssignment],
    registry: &TypeRegistry,
    whitelist: &BTreeSet<Tui>,
) -> (BTreeMap<Cui, Entity>, EntityDiagnostics) {
    let mut tuis_by_cui: BTreeMap<&Cui, BTreeSet<&Tui>> = BTreeMap::new();
    for t in types {
        tuis_by_cui.entry(&t.cui).or_default().insert(&t.tui);
    }

    let mut entities: BTreeMap<Cui, Entity> = BTreeMap::new();
    let mut diag = EntityDiagnostics::default();
    let mut seen_dropped: BTreeSet<&Cui> = BTreeSet::new();

    for row in concepts {
        if let Some(entity) = entities.get_mut(&row.cui) {
            entity.names.insert(row.surface.clone());
            continue;
        }
        if seen_dropped.contains(&row.cui) {
            continue;
        }
        let Some(tuis) = tuis_by_cui.get(&row.cui) else {
            diag.untyped += 1;
            seen_dropped.insert(&row.cui);
            continue;
        };
        let kept: BTreeSet<Tui> = tuis
            .iter()
            .filter(|t| whitelist.contains(**t))
            .map(|t| (*t).clone())
            .collect();
        let Some(first) = kept.iter().next() else {
            diag.no_whitelisted_type += 1;
            seen_dropped.insert(&row.cui);
            continue;
        };
        let group = registry
            .group_of(first)
            .expect("whitelisted TUI has a group");
        let mut names = BTreeSet::new();
        names.insert(row.surface.clone());
        entities.insert(
            row.cui.clone(),
            Entity {
                cui: row.cui.clone(),
                tuis: kept,
                group,
                names,
            },
        );
    }

    (entities, diag)
}

/// Counters for relation rows dropped during canonicalization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleDiagnostics {
    pub missing_rela: u64,
    pub excluded: u64,
    pub unknown_rela: u64,
    pub missing_endpoint: u64,
}

/// Map raw relation rows onto canonical triples.
///
/// The raw row `(cui1, rela, cui2)` asserts `cui2 rela cui1`. A canonical
/// relation is kept as stated; an inverse relation is rewritten onto its
/// canonical counterpart with the arguments flipped; excluded and unknown
/// labels are dropped. Both endpoints must be whitelisted entities. The
/// result is a deduplicated set.
pub fn canonicalize_triples<I>(
    rels: I,
    entities: &BTreeMap<Cui, Entity>,
    canon: &RelationCanonMap,
) -> (BTreeSet<Triple>, TripleDiagnostics)
where
    I: IntoIterator<Item = RawRelRow>,
{
    let mut triples = BTreeSet::new();
    let mut diag = TripleDiagnostics::default();

    for row in rels {
        let Some(rela) = row.rela.as_deref().filter(|r| !r.is_empty()) else {
            diag.missing_rela += 1;
            continue;
        };
        // Statement direction: cui2 rela cui1.
        let (subject, object) = (&row.cui2, &row.cui1);
        let triple = match canon.resolve(rela) {
            RelationKind::Canonical => {
                Triple::new(subject.clone(), rela, object.clone())
            }
            RelationKind::InverseOf(canonical) => {
                Triple::new(object.clone(), canonical, subject.clone())
            }
            RelationKind::Excluded => {
                diag.excluded += 1;
                continue;
            }
            RelationKind::Unknown => {
                diag.unknown_rela += 1;
                continue;
            }
        };
        if !entities.contains_key(&triple.head) || !entities.contains_key(&triple.tail) {
            diag.missing_endpoint += 1;
            continue;
        }
        triples.insert(triple);
    }

    (triples, diag)
}

/// Drop entities that participate in no triple.
pub fn retain_active_entities(
    entities: &mut BTreeMap<Cui, Entity>,
    triples: &BTreeSet<Triple>,
) -> u64 {
    let mut active: BTreeSet<&Cui> = BTreeSet::new();
    for t in triples {
        active.insert(&t.head);
        active.insert(&t.tail);
    }
    let before = entities.len() as u64;
    let keep: BTreeSet<Cui> = active.into_iter().cloned().collect();
    entities.retain(|cui, _| keep.contains(cui));
    before - entities.len() as u64
}
