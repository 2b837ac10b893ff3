//! Semantic-type registry: the full release type inventory plus the
//! whitelisted type-to-group mapping. Both ship as bundled TSV config and can
//! be overridden by external files with the same layout.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use core::fmt;

use crate::ids::Tui;

/// Bundled inventory of the 127 release semantic types (`TUI\tname`).
pub const BUILTIN_SEMANTIC_TYPES: &str = include_str!("../data/semantic_types.tsv");
/// Bundled whitelist of 51 retained types with their groups (`TUI\tSG\tname`).
pub const BUILTIN_SEMANTIC_GROUPS: &str = include_str!("../data/semantic_groups.tsv");

/// Coarse-grained semantic group. Only the six retained groups are modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemanticGroup {
    Anat,
    Chem,
    Devi,
    Diso,
    Phys,
    Proc,
}

impl SemanticGroup {
    pub fn code(self) -> &'static str {
        match self {
            SemanticGroup::Anat => "ANAT",
            SemanticGroup::Chem => "CHEM",
            SemanticGroup::Devi => "DEVI",
            SemanticGroup::Diso => "DISO",
            SemanticGroup::Phys => "PHYS",
            SemanticGroup::Proc => "PROC",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "ANAT" => Some(SemanticGroup::Anat),
            "CHEM" => Some(SemanticGroup::Chem),
            "DEVI" => Some(SemanticGroup::Devi),
            "DISO" => Some(SemanticGroup::Diso),
            "PHYS" => Some(SemanticGroup::Phys),
            "PROC" => Some(SemanticGroup::Proc),
            _ => None,
        }
    }
}

impl fmt::Display for SemanticGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("malformed registry line {line}: `{content}`")]
    Malformed { line: usize, content: String },
    #[error("unknown semantic group code `{0}`")]
    UnknownGroup(String),
    #[error("whitelisted TUI {0} missing from the type inventory")]
    UnknownWhitelistTui(Tui),
}

/// Type inventory plus whitelist/group map.
#[derive(Debug, Clone)]
pub struct TypeRegistry {
    types: BTreeMap<Tui, String>,
    groups: BTreeMap<Tui, SemanticGroup>,
}

impl TypeRegistry {
    /// Registry loaded from the bundled config.
    pub fn builtin() -> Self {
        Self::from_tsv(BUILTIN_SEMANTIC_TYPES, BUILTIN_SEMANTIC_GROUPS)
            .expect("bundled registry config is valid")
    }

    /// Parse a registry from TSV content (same layout as the bundled files).
    pub fn from_tsv(types_tsv: &str, groups_tsv: &str) -> Result<Self, RegistryError> {
        let mut types = BTreeMap::new();
        for (i, line) in types_tsv.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.splitn(2, '\t');
            let tui = cols
                .next()
                .and_then(|t| Tui::new(t).ok())
                .ok_or_else(|| RegistryError::Malformed {
                    line: i + 1,
                    content: line.to_string(),
                })?;
            let name = cols.next().unwrap_or("").trim().to_string();
            types.insert(tui, name);
        }

        let mut groups = BTreeMap::new();
        for (i, line) in groups_tsv.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: alloc::vec::Vec<&str> = line.split('\t').collect();
            if cols.len() < 2 {
                return Err(RegistryError::Malformed {
                    line: i + 1,
                    content: line.to_string(),
                });
            }
            let tui = Tui::new(cols[0]).map_err(|_| RegistryError::Malformed {
                line: i + 1,
                content: line.to_string(),
            })?;
            let sg = SemanticGroup::from_code(cols[1])
                .ok_or_else(|| RegistryError::UnknownGroup(cols[1].to_string()))?;
            if !types.contains_key(&tui) {
                return Err(RegistryError::UnknownWhitelistTui(tui));
            }
            groups.insert(tui, sg);
        }

        Ok(TypeRegistry { types, groups })
    }

    /// Is this TUI part of the release inventory?
    pub fn is_known(&self, tui: &Tui) -> bool {
        self.types.contains_key(tui)
    }

    pub fn sty_name(&self, tui: &Tui) -> Option<&str> {
        self.types.get(tui).map(String::as_str)
    }

    /// Group of a whitelisted TUI, `None` if the TUI is not retained.
    pub fn group_of(&self, tui: &Tui) -> Option<SemanticGroup> {
        self.groups.get(tui).copied()
    }

    /// The retained TUIs (default entity whitelist).
    pub fn whitelist(&self) -> BTreeSet<Tui> {
        self.groups.keys().cloned().collect()
    }

    pub fn inventory_size(&self) -> usize {
        self.types.len()
    }

    pub fn whitelist_size(&self) -> usize {
        self.groups.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_counts() {
        let reg = TypeRegistry::builtin();
        assert_eq!(reg.inventory_size(), 127);
        assert_eq!(reg.whitelist_size(), 51);
    }

    #[test]
    fn t023_is_anat() {
        let reg = TypeRegistry::builtin();
        let t023 = Tui::new("T023").unwrap();
        assert_eq!(reg.group_of(&t023), Some(SemanticGroup::Anat));
        assert_eq!(
            reg.sty_name(&t023),
            Some("Body Part, Organ, or Organ Component")
        );
    }

    #[test]
    fn non_whitelisted_type_has_no_group() {
        let reg = TypeRegistry::builtin();
        let t170 = Tui::new("T170").unwrap();
        assert!(reg.is_known(&t170));
        assert_eq!(reg.group_of(&t170), None);
    }

    #[test]
    fn every_whitelisted_tui_maps_to_one_of_six_groups() {
        let reg = TypeRegistry::builtin();
        let mut seen = BTreeSet::new();
        for tui in reg.whitelist() {
            seen.insert(reg.group_of(&tui).unwrap());
        }
        assert_eq!(seen.len(), 6);
    }
}
