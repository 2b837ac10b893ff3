//! Canonical relation inventory: 21 retained relations, their inverse names,
//! and the excluded uninformative relations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};

/// Bundled canonical/inverse relation pairs (`canonical\tinverse`).
pub const BUILTIN_RELATIONS: &str = include_str!("../data/relations.tsv");
/// Bundled excluded relation names, one per line.
pub const BUILTIN_EXCLUDED_RELATIONS: &str = include_str!("../data/excluded_relations.tsv");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationMapError {
    #[error("malformed relation map line {line}: `{content}`")]
    Malformed { line: usize, content: String },
    #[error("relation `{0}` listed both as canonical and as an inverse")]
    CanonicalInverseClash(String),
    #[error("required excluded relation `{0}` missing from the excluded set")]
    MissingExcluded(String),
}

/// How a raw fine-grained relation label resolves against the map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationKind<'a> {
    /// Already in canonical direction.
    Canonical,
    /// Inverse name; the triple must be flipped to this canonical relation.
    InverseOf(&'a str),
    /// Explicitly excluded as uninformative.
    Excluded,
    /// Not part of the retained inventory.
    Unknown,
}

/// Canonical relation map.
#[derive(Debug, Clone)]
pub struct RelationCanonMap {
    canonical: BTreeSet<String>,
    inverse_of: BTreeMap<String, String>,
    excluded: BTreeSet<String>,
}

/// Relations that must always be excluded.
const REQUIRED_EXCLUDED: [&str; 4] = [
    "same_as",
    "possibly_equivalent_to",
    "associated_with",
    "temporally_related_to",
];

impl RelationCanonMap {
    pub fn builtin() -> Self {
        Self::from_tsv(BUILTIN_RELATIONS, BUILTIN_EXCLUDED_RELATIONS)
            .expect("bundled relation config is valid")
    }

    pub fn from_tsv(pairs_tsv: &str, excluded_tsv: &str) -> Result<Self, RelationMapError> {
        let mut canonical = BTreeSet::new();
        let mut inverse_of = BTreeMap::new();
        for (i, line) in pairs_tsv.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: alloc::vec::Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 || cols[0].is_empty() || cols[1].is_empty() {
                return Err(RelationMapError::Malformed {
                    line: i + 1,
                    content: line.to_string(),
                });
            }
            canonical.insert(cols[0].to_string());
            inverse_of.insert(cols[1].to_string(), cols[0].to_string());
        }
        let mut excluded = BTreeSet::new();
        for line in excluded_tsv.lines() {
            let name = line.trim();
            if !name.is_empty() {
                excluded.insert(name.to_string());
            }
        }
        let map = RelationCanonMap {
            canonical,
            inverse_of,
            excluded,
        };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<(), RelationMapError> {
        for name in self.inverse_of.keys() {
            if self.canonical.contains(name) {
                return Err(RelationMapError::CanonicalInverseClash(name.clone()));
            }
        }
        for required in REQUIRED_EXCLUDED {
            if !self.excluded.contains(required) {
                return Err(RelationMapError::MissingExcluded(required.to_string()));
            }
        }
        Ok(())
    }

    pub fn resolve<'a>(&'a self, rela: &str) -> RelationKind<'a> {
        if self.excluded.contains(rela) {
            RelationKind::Excluded
        } else if self.canonical.contains(rela) {
            RelationKind::Canonical
        } else if let Some(canon) = self.inverse_of.get(rela) {
            RelationKind::InverseOf(canon)
        } else {
            RelationKind::Unknown
        }
    }

    pub fn is_canonical(&self, rela: &str) -> bool {
        self.canonical.contains(rela)
    }

    /// Inverse name of a canonical relation, if any.
    pub fn inverse_name(&self, canonical: &str) -> Option<&str> {
        self.inverse_of
            .iter()
            .find(|(_, c)| c.as_str() == canonical)
            .map(|(inv, _)| inv.as_str())
    }

    pub fn canonical_relations(&self) -> &BTreeSet<String> {
        &self.canonical
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_21_canonical_relations() {
        let map = RelationCanonMap::builtin();
        assert_eq!(map.canonical_relations().len(), 21);
    }

    #[test]
    fn resolves_all_kinds() {
        let map = RelationCanonMap::builtin();
        assert_eq!(map.resolve("finding_site_of"), RelationKind::Canonical);
        assert_eq!(
            map.resolve("has_finding_site"),
            RelationKind::InverseOf("finding_site_of")
        );
        assert_eq!(map.resolve("same_as"), RelationKind::Excluded);
        assert_eq!(map.resolve("isa"), RelationKind::Unknown);
    }

    #[test]
    fn occurs_after_inverse() {
        let map = RelationCanonMap::builtin();
        assert_eq!(map.inverse_name("occurs_after"), Some("occurs_before"));
    }

    #[test]
    fn rejects_canonical_inverse_clash() {
        let err = RelationCanonMap::from_tsv(
            "a_of\tb_of\nb_of\tc_of\n",
            "same_as\npossibly_equivalent_to\nassociated_with\ntemporally_related_to\n",
        )
        .unwrap_err();
        assert!(matches!(err, RelationMapError::CanonicalInverseClash(_)));
    }
}
