//! Benchmark leakage auditor: CUI-level, inverse-aware triple overlap
//! between a training split and evaluation splits.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::util::{normalize_surface, round2};

/// A benchmark triple whose endpoints may be surface forms or identifiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LabeledTriple {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

impl LabeledTriple {
    pub fn new(
        head: impl Into<String>,
        relation: impl Into<String>,
        tail: impl Into<String>,
    ) -> Self {
        LabeledTriple {
            head: head.into(),
            relation: relation.into(),
            tail: tail.into(),
        }
    }
}

/// Maps surface forms to concept identifiers before comparison.
///
/// In identity mode the endpoints are assumed to already be identifiers.
/// Surface lookup is exact after lowercasing and whitespace collapse; no
/// fuzzy matching, to keep the audit conservative.
#[derive(Debug, Clone)]
pub struct NormalizationMap {
    map: BTreeMap<String, String>,
    identity: bool,
}

impl NormalizationMap {
    pub fn identity() -> Self {
        NormalizationMap {
            map: BTreeMap::new(),
            identity: true,
        }
    }

    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let map = entries
            .into_iter()
            .map(|(surface, id)| (normalize_surface(&surface), id))
            .collect();
        NormalizationMap {
            map,
            identity: false,
        }
    }

    fn resolve(&self, endpoint: &str) -> Option<String> {
        if self.identity {
            Some(endpoint.to_string())
        } else {
            self.map.get(&normalize_surface(endpoint)).cloned()
        }
    }
}

/// Overlap figures for one evaluation split.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOverlap {
    pub name: String,
    pub total: u64,
    /// Triples with an endpoint missing from the normalization map; excluded
    /// from the percentage denominator.
    pub unmapped: u64,
    pub direct: u64,
    pub inverse_aware: u64,
    pub direct_pct: f64,
    pub inverse_aware_pct: f64,
}

/// Report over all evaluation splits.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    pub train_total: u64,
    pub train_unmapped: u64,
    pub evals: Vec<EvalOverlap>,
}

impl OverlapReport {
    /// True when no eval split overlaps the training split.
    pub fn clean(&self) -> bool {
        self.evals.iter().all(|e| e.inverse_aware == 0)
    }
}

type Key = (String, String, String);

fn normalized_key(t: &LabeledTriple, norm: &NormalizationMap) -> Option<Key> {
    let h = norm.resolve(&t.head)?;
    let tl = norm.resolve(&t.tail)?;
    Some((h, t.relation.clone(), tl))
}

/// Quantify direct and inverse-aware triple overlap between `train` and each
/// evaluation split.
///
/// An eval triple counts as overlapping inverse-aware when it, or its image
/// under the (symmetrized) `inverse_map`, appears in the normalized training
/// set. Percentages are rounded half-up to 2 decimals.
pub fn audit_overlap(
    train: &[LabeledTriple],
    evals: &[(String, Vec<LabeledTriple>)],
    norm: &NormalizationMap,
    inverse_map: &BTreeMap<String, String>,
) -> OverlapReport {
    let mut train_set: BTreeSet<Key> = BTreeSet::new();
    let mut train_unmapped = 0u64;
    for t in train {
        match normalized_key(t, norm) {
            Some(k) => {
                train_set.insert(k);
            }
            None => train_unmapped += 1,
        }
    }

    // Symmetric closure so r -> r' also admits r' -> r.
    let mut inverses: BTreeMap<&str, &str> = BTreeMap::new();
    for (a, b) in inverse_map {
        inverses.insert(a.as_str(), b.as_str());
        inverses.insert(b.as_str(), a.as_str());
    }

    let mut reports = Vec::with_capacity(evals.len());
    for (name, triples) in evals {
        let mut unmapped = 0u64;
        let mut direct = 0u64;
        let mut inverse_aware = 0u64;
        for t in triples {
            let Some((h, r, tl)) = normalized_key(t, norm) else {
                unmapped += 1;
                continue;
            };
            let hit_direct = train_set.contains(&(h.clone(), r.clone(), tl.clone()));
            let hit_inverse = hit_direct
                || inverses
                    .get(r.as_str())
                    .is_some_and(|inv| {
                        train_set.contains(&(tl.clone(), (*inv).to_string(), h.clone()))
                    });
            if hit_direct {
                direct += 1;
            }
            if hit_inverse {
                inverse_aware += 1;
            }
        }
        let denom = triples.len() as u64 - unmapped;
        let pct = |count: u64| {
            if denom == 0 {
                0.0
            } else {
                round2(count as f64 * 100.0 / denom as f64)
            }
        };
        reports.push(EvalOverlap {
            name: name.clone(),
            total: triples.len() as u64,
            unmapped,
            direct,
            inverse_aware,
            direct_pct: pct(direct),
            inverse_aware_pct: pct(inverse_aware),
        });
    }

    OverlapReport {
        train_total: train.len() as u64,
        train_unmapped,
        evals: reports,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn t(h: &str, r: &str, tl: &str) -> LabeledTriple {
        LabeledTriple::new(h, r, tl)
    }

    #[test]
    fn train_vs_itself_is_full_direct_overlap() {
        let train = vec![t("C1", "r", "C2"), t("C3", "r", "C4")];
        let report = audit_overlap(
            &train,
            &[("self".to_string(), train.clone())],
            &NormalizationMap::identity(),
            &BTreeMap::new(),
        );
        assert_eq!(report.evals[0].direct_pct, 100.0);
        assert_eq!(report.evals[0].inverse_aware_pct, 100.0);
    }

    #[test]
    fn disjoint_eval_is_zero() {
        let report = audit_overlap(
            &[t("C1", "r", "C2")],
            &[("test".to_string(), vec![t("C3", "r", "C4")])],
            &NormalizationMap::identity(),
            &BTreeMap::new(),
        );
        assert_eq!(report.evals[0].direct_pct, 0.0);
        assert_eq!(report.evals[0].inverse_aware_pct, 0.0);
        assert!(report.clean());
    }

    #[test]
    fn inverse_fixture_direct_zero_inverse_full() {
        let mut inv = BTreeMap::new();
        inv.insert("r_inv".to_string(), "r".to_string());
        let report = audit_overlap(
            &[t("A", "r", "B")],
            &[("test".to_string(), vec![t("B", "r_inv", "A")])],
            &NormalizationMap::identity(),
            &inv,
        );
        let e = &report.evals[0];
        assert_eq!(e.direct, 0);
        assert_eq!(e.inverse_aware, 1);
        assert_eq!(e.direct_pct, 0.0);
        assert_eq!(e.inverse_aware_pct, 100.0);
    }

    #[test]
    fn surface_normalization_reaches_shared_cui() {
        let norm = NormalizationMap::from_entries([
            ("ECG".to_string(), "C0013798".to_string()),
            ("electrocardiography".to_string(), "C0013798".to_string()),
            ("Q-T interval".to_string(), "C0429028".to_string()),
        ]);
        let report = audit_overlap(
            &[t("electrocardiography", "measures", "Q-T interval")],
            &[(
                "test".to_string(),
                vec![t("ECG", "measures", "Q-T  interval")],
            )],
            &norm,
            &BTreeMap::new(),
        );
        assert_eq!(report.evals[0].direct, 1);
    }

    #[test]
    fn unmapped_surfaces_reduce_denominator() {
        let norm = NormalizationMap::from_entries([("a".to_string(), "C1".to_string())]);
        let report = audit_overlap(
            &[t("a", "r", "a")],
            &[(
                "test".to_string(),
                vec![t("a", "r", "a"), t("mystery", "r", "a")],
            )],
            &norm,
            &BTreeMap::new(),
        );
        let e = &report.evals[0];
        assert_eq!(e.unmapped, 1);
        assert_eq!(e.direct_pct, 100.0);
    }

    #[test]
    fn report_is_input_order_invariant() {
        let train = vec![t("C1", "r", "C2"), t("C3", "r", "C4")];
        let mut rev = train.clone();
        rev.reverse();
        let eval = vec![t("C1", "r", "C2"), t("C9", "r", "C8")];
        let a = audit_overlap(
            &train,
            &[("e".to_string(), eval.clone())],
            &NormalizationMap::identity(),
            &BTreeMap::new(),
        );
        let b = audit_overlap(
            &rev,
            &[("e".to_string(), eval)],
            &NormalizationMap::identity(),
            &BTreeMap::new(),
        );
        assert_eq!(a.evals[0].direct, b.evals[0].direct);
    }
}
