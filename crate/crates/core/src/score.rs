//! Corpus-level metrics over ranked prediction lists: precision-recall
//! curve, area under it (average precision), precision-at-k, micro/macro F1.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::align::NA_LABEL;
use crate::ids::Cui;

/// One scored fact prediction. NA predictions are excluded from ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub head: Cui,
    pub tail: Cui,
    pub relation: String,
    pub score: f64,
}

/// The non-NA gold facts of an evaluation split.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldFacts {
    facts: BTreeSet<(Cui, Cui, String)>,
}

impl GoldFacts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, head: Cui, tail: Cui, relation: String) {
        debug_assert!(relation != NA_LABEL);
        self.facts.insert((head, tail, relation));
    }

    pub fn contains(&self, p: &Prediction) -> bool {
        self.facts
            .contains(&(p.head.clone(), p.tail.clone(), p.relation.clone()))
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Cui, Cui, String)> {
        self.facts.iter()
    }
}

/// Sort predictions by score descending with a deterministic tie-break on
/// (head, tail, relation); NA predictions and duplicate facts (keeping the
/// best-scored copy) are dropped.
pub fn rank(predictions: &[Prediction]) -> Vec<Prediction> {
    let mut ranked: Vec<Prediction> = predictions
        .iter()
        .filter(|p| p.relation != NA_LABEL)
        .cloned()
        .collect();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.head.cmp(&b.head))
            .then_with(|| a.tail.cmp(&b.tail))
            .then_with(|| a.relation.cmp(&b.relation))
    });
    let mut seen: BTreeSet<(Cui, Cui, String)> = BTreeSet::new();
    ranked.retain(|p| seen.insert((p.head.clone(), p.tail.clone(), p.relation.clone())));
    ranked
}

/// Precision-recall points at every rank of the sorted prediction list.
pub fn pr_curve(predictions: &[Prediction], gold: &GoldFacts) -> Vec<(f64, f64)> {
    if gold.is_empty() {
        return Vec::new();
    }
    let ranked = rank(predictions);
    let mut hits = 0usize;
    let mut curve = Vec::with_capacity(ranked.len());
    for (i, p) in ranked.iter().enumerate() {
        if gold.contains(p) {
            hits += 1;
        }
        let precision = hits as f64 / (i + 1) as f64;
        let recall = hits as f64 / gold.len() as f64;
        curve.push((precision, recall));
    }
    curve
}

/// Area under the PR curve by step-wise summation over recall increments.
///
/// Since recall rises by exactly 1/|gold| at each hit, this equals average
/// precision (the mean of precision values at the hits, normalized by the
/// gold count). Empty curve yields 0.
pub fn auc(curve: &[(f64, f64)]) -> f64 {
    let mut area = 0.0;
    let mut prev_recall = 0.0;
    for (precision, recall) in curve {
        area += precision * (recall - prev_recall);
        prev_recall = *recall;
    }
    area
}

/// Average precision computed directly from predictions.
pub fn average_precision(predictions: &[Prediction], gold: &GoldFacts) -> f64 {
    auc(&pr_curve(predictions, gold))
}

/// Fraction of the top-k ranked predictions that are gold facts; k is capped
/// at the number of predictions.
pub fn precision_at_k(predictions: &[Prediction], gold: &GoldFacts, k: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    let ranked = rank(predictions);
    let k = k.min(ranked.len());
    if k == 0 {
        return 0.0;
    }
    let hits = ranked[..k].iter().filter(|p| gold.contains(p)).count();
    hits as f64 / k as f64
}

/// How the decision cutoff for F1 is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdPolicy {
    /// Cut the ranked list where micro-F1 peaks (default).
    MaxMicroF1,
    /// Treat predictions with score >= the given value as positive.
    ScoreThreshold(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct F1Report {
    pub micro: f64,
    pub macro_: f64,
    /// Number of top-ranked predictions treated as positive decisions.
    pub cutoff_rank: usize,
    /// Score of the last prediction inside the cutoff.
    pub threshold_score: Option<f64>,
}

/// Micro and macro F1 under the given threshold policy. Macro averages
/// per-relation F1 over the relations present in gold.
pub fn f1_scores(
    predictions: &[Prediction],
    gold: &GoldFacts,
    policy: ThresholdPolicy,
) -> F1Report {
    let ranked = rank(predictions);
    if ranked.is_empty() || gold.is_empty() {
        return F1Report {
            micro: 0.0,
            macro_: 0.0,
            cutoff_rank: 0,
            threshold_score: None,
        };
    }

    let cutoff = match policy {
        ThresholdPolicy::MaxMicroF1 => {
            let mut hits = 0usize;
            let mut best = (0usize, 0.0f64);
            for (i, p) in ranked.iter().enumerate() {
                if gold.contains(p) {
                    hits += 1;
                }
                let f1 = 2.0 * hits as f64 / ((i + 1) + gold.len()) as f64;
                if f1 > best.1 {
                    best = (i + 1, f1);
                }
            }
            best.0
        }
        ThresholdPolicy::ScoreThreshold(t) => {
            ranked.iter().take_while(|p| p.score >= t).count()
        }
    };

    let decisions = &ranked[..cutoff];
    let hits = decisions.iter().filter(|p| gold.contains(p)).count();
    let micro = if cutoff == 0 {
        0.0
    } else {
        2.0 * hits as f64 / (cutoff + gold.len()) as f64
    };

    // Per-relation tallies over relations present in gold.
    let mut per_rel: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new(); // (tp, fp, gold)
    for (_, _, r) in gold.iter() {
        per_rel.entry(r.as_str()).or_insert((0, 0, 0)).2 += 1;
    }
    for p in decisions {
        if let Some(entry) = per_rel.get_mut(p.relation.as_str()) {
            if gold.contains(p) {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    let mut macro_sum = 0.0;
    for (tp, fp, gold_count) in per_rel.values() {
        let predicted = tp + fp;
        let precision = if predicted == 0 {
            0.0
        } else {
            *tp as f64 / predicted as f64
        };
        let recall = *tp as f64 / *gold_count as f64;
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        macro_sum += f1;
    }
    let macro_ = macro_sum / per_rel.len() as f64;

    F1Report {
        micro,
        macro_,
        cutoff_rank: cutoff,
        threshold_score: decisions.last().map(|p| p.score),
    }
}
