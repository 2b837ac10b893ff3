//! Knowledge-to-text alignment: related/unrelated entity pairs, constrained
//! negative sampling, sentence matching, mention pruning, cross-split
//! overlap removal and bag assembly.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{LinkedSentence, Mention};
use crate::ids::{Cui, Tui};
use crate::kg::{Entity, Triple};
use crate::rng::DetRng;
use crate::util::normalize_surface;

/// Label assigned to sampled unrelated pairs.
pub const NA_LABEL: &str = "NA";

/// Bundled default mention stoplist, one surface form per line.
pub const BUILTIN_MENTION_STOPLIST: &str = include_str!("../data/mention_stoplist.tsv");

/// The bundled stoplist parsed into a set.
pub fn builtin_stoplist() -> BTreeSet<String> {
    BUILTIN_MENTION_STOPLIST
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(ToString::to_string)
        .collect()
}

/// Ordered entity pair.
pub type Pair = (Cui, Cui);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlignError {
    #[error("pair ({0}, {1}) carries conflicting non-NA labels `{2}` and `{3}`")]
    ConflictingLabels(Cui, Cui, String, String),
}

/// Related pairs of one split, each with its canonical relation.
///
/// Canonicalization already fixed triple directions, so pairs are ordered in
/// canonical direction. A pair backed by several relations keeps the
/// lexicographically smallest as its instance label; the others are counted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PositivePairs {
    labels: BTreeMap<Pair, String>,
    /// Pairs that had more than one distinct relation.
    pub multi_relation_pairs: u64,
}

impl PositivePairs {
    pub fn label_of(&self, pair: &Pair) -> Option<&str> {
        self.labels.get(pair).map(String::as_str)
    }

    pub fn contains(&self, pair: &Pair) -> bool {
        self.labels.contains_key(pair)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &Pair> {
        self.labels.keys()
    }
}

/// Type and role constraints observed in the related pairs of a split.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeRoleIndex {
    /// Fine-grained (head STY, tail STY) pairs observed in the positives.
    pub type_pairs: BTreeSet<(Tui, Tui)>,
    pub head_roles: BTreeSet<Cui>,
    pub tail_roles: BTreeSet<Cui>,
}

/// Build the related-pair set and its type/role index from split triples.
pub fn build_positive_pairs(
    triples: &BTreeSet<Triple>,
    entities: &BTreeMap<Cui, Entity>,
) -> (PositivePairs, TypeRoleIndex) {
    let mut positives = PositivePairs::default();
    let mut index = TypeRoleIndex::default();
    let mut conflicted: BTreeSet<Pair> = BTreeSet::new();

    for t in triples {
        let pair = (t.head.clone(), t.tail.clone());
        match positives.labels.get_mut(&pair) {
            None => {
                positives.labels.insert(pair.clone(), t.relation.clone());
            }
            Some(existing) if *existing != t.relation => {
                if conflicted.insert(pair.clone()) {
                    positives.multi_relation_pairs += 1;
                }
                if t.relation < *existing {
                    *existing = t.relation.clone();
                }
            }
            Some(_) => {}
        }
        index.head_roles.insert(t.head.clone());
        index.tail_roles.insert(t.tail.clone());
        if let (Some(h), Some(tl)) = (entities.get(&t.head), entities.get(&t.tail)) {
            for ht in &h.tuis {
                for tt in &tl.tuis {
                    index.type_pairs.insert((ht.clone(), tt.clone()));
                }
            }
        }
    }

    (positives, index)
}

/// Does the (head, tail) candidate satisfy the type constraint? Multi-typed
/// concepts qualify if any of their STY combinations was observed.
pub fn satisfies_type_constraint(
    head: &Entity,
    tail: &Entity,
    type_pairs: &BTreeSet<(Tui, Tui)>,
) -> bool {
    head.tuis.iter().any(|ht| {
        tail.tuis
            .iter()
            .any(|tt| type_pairs.contains(&(ht.clone(), tt.clone())))
    })
}

/// Outcome of negative-pair sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeSample {
    pub pairs: BTreeSet<Pair>,
    /// How far short of the target the sampler fell after exhausting
    /// candidates.
    pub shortfall: u64,
}

// Above this candidate-space size the exhaustive fallback sweep is skipped
// and the sampler returns fewer pairs with a shortfall instead.
const EXHAUSTIVE_SWEEP_LIMIT: u64 = 4_000_000;

fn negative_candidate_ok(
    head: &Cui,
    tail: &Cui,
    entities: &BTreeMap<Cui, Entity>,
    index: &TypeRoleIndex,
    global_positives: &BTreeSet<Pair>,
    excluded: &BTreeSet<Pair>,
) -> bool {
    if head == tail {
        return false;
    }
    let pair = (head.clone(), tail.clone());
    if global_positives.contains(&pair) || excluded.contains(&pair) {
        return false;
    }
    let (Some(h), Some(t)) = (entities.get(head), entities.get(tail)) else {
        return false;
    };
    satisfies_type_constraint(h, t, &index.type_pairs)
}

/// Sample unrelated pairs by entity corruption under the type and role
/// constraints.
///
/// Every emitted pair (h, t) has h drawn from the observed head roles and t
/// from the observed tail roles (equivalently, it is a one-sided corruption
/// of some related pair), is absent from the all-split related pairs and
/// from `excluded` (pairs already claimed by other splits), and shares an
/// observed STY pair. Seeded and deterministic. If random corruption stalls
/// before reaching `target` and the candidate space is small enough, a
/// deterministic exhaustive sweep fills the remainder, so the sampler finds
/// every admissible pair when asked for enough.
pub fn sample_negative_pairs(
    index: &TypeRoleIndex,
    entities: &BTreeMap<Cui, Entity>,
    global_positives: &BTreeSet<Pair>,
    excluded: &BTreeSet<Pair>,
    seed: u64,
    target: usize,
) -> NegativeSample {
    let mut out = BTreeSet::new();
    if target == 0 || index.head_roles.is_empty() || index.tail_roles.is_empty() {
        return NegativeSample {
            pairs: out,
            shortfall: target as u64,
        };
    }

    let heads: Vec<&Cui> = index.head_roles.iter().collect();
    let tails: Vec<&Cui> = index.tail_roles.iter().collect();
    let mut rng = DetRng::from_seed(seed);

    let attempt_cap = 200usize.saturating_mul(target).max(1_000);
    let mut attempts = 0usize;
    while out.len() < target && attempts < attempt_cap {
        attempts += 1;
        let head = heads[rng.index(heads.len())];
        let tail = tails[rng.index(tails.len())];
        if negative_candidate_ok(head, tail, entities, index, global_positives, excluded)
        {
            out.insert((head.clone(), tail.clone()));
        }
    }

    if out.len() < target {
        let space = heads.len() as u64 * tails.len() as u64;
        if space <= EXHAUSTIVE_SWEEP_LIMIT {
            let mut remaining: Vec<Pair> = Vec::new();
            for head in &heads {
                for tail in &tails {
                    let pair = ((*head).clone(), (*tail).clone());
                    if !out.contains(&pair)
                        && negative_candidate_ok(
                            head,
                            tail,
                            entities,
                            index,
                            global_positives,
                            excluded,
                        )
                    {
                        remaining.push(pair);
                    }
                }
            }
            rng.shuffle(&mut remaining);
            for pair in remaining {
                if out.len() >= target {
                    break;
                }
                out.insert(pair);
            }
        }
    }

    let shortfall = target.saturating_sub(out.len()) as u64;
    NegativeSample {
        pairs: out,
        shortfall,
    }
}

/// One labeled (sentence, head mention, tail mention) record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalInstance {
    pub text: String,
    pub head: Mention,
    pub tail: Mention,
    /// Canonical relation name, or [`NA_LABEL`].
    pub relation: String,
}

impl RelationalInstance {
    pub fn pair(&self) -> Pair {
        (self.head.cui.clone(), self.tail.cui.clone())
    }

    pub fn is_na(&self) -> bool {
        self.relation == NA_LABEL
    }
}

/// Match sentences against a split's related and unrelated pairs.
///
/// For each sentence, every ordered CUI pair among its mentions that is in
/// the positives (label = its relation) or the negatives (label = NA) yields
/// exactly one instance; repeated mention combinations of the same CUI pair
/// within one sentence are not duplicated.
pub fn match_sentences(
    positives: &PositivePairs,
    negatives: &BTreeSet<Pair>,
    sentences: &[LinkedSentence],
) -> Vec<RelationalInstance> {
    let mut out = Vec::new();
    for sentence in sentences {
        let mut seen: BTreeSet<Pair> = BTreeSet::new();
        for head in &sentence.mentions {
            for tail in &sentence.mentions {
                if head.cui == tail.cui {
                    continue;
                }
                let pair = (head.cui.clone(), tail.cui.clone());
                if seen.contains(&pair) {
                    continue;
                }
                let relation = if let Some(label) = positives.label_of(&pair) {
                    label.to_string()
                } else if negatives.contains(&pair) {
                    NA_LABEL.to_string()
                } else {
                    continue;
                };
                seen.insert(pair);
                out.push(RelationalInstance {
                    text: sentence.text.clone(),
                    head: head.clone(),
                    tail: tail.clone(),
                    relation,
                });
            }
        }
    }
    out
}

/// Counters reported by [`prune_mentions`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PruneStats {
    pub removed_instances: u64,
    pub pruned_surfaces: u64,
    pub stoplisted_surfaces: u64,
}

/// Type-based mention pruning.
///
/// Mention occurrences are pooled by (STY, normalized surface); a pool whose
/// count exceeds `threshold`, or whose surface is stoplisted, has every
/// instance carrying that surface (as head or tail) removed.
pub fn prune_mentions(
    instances: Vec<RelationalInstance>,
    threshold: u64,
    stoplist: &BTreeSet<String>,
    entities: &BTreeMap<Cui, Entity>,
) -> (Vec<RelationalInstance>, PruneStats) {
    let mut counts: BTreeMap<(Tui, String), u64> = BTreeMap::new();
    for inst in &instances {
        for mention in [&inst.head, &inst.tail] {
            let surface = normalize_surface(&mention.surface);
            if let Some(entity) = entities.get(&mention.cui) {
                for tui in &entity.tuis {
                    *counts.entry((tui.clone(), surface.clone())).or_insert(0) += 1;
                }
            }
        }
    }

    let mut removed: BTreeSet<String> = BTreeSet::new();
    let mut stats = PruneStats::default();
    for ((_, surface), count) in &counts {
        if *count > threshold && removed.insert(surface.clone()) {
            stats.pruned_surfaces += 1;
        }
    }
    for surface in stoplist {
        let key = normalize_surface(surface);
        if removed.insert(key) {
            stats.stoplisted_surfaces += 1;
        }
    }

    let before = instances.len();
    let kept: Vec<RelationalInstance> = instances
        .into_iter()
        .filter(|inst| {
            !removed.contains(&normalize_surface(&inst.head.surface))
                && !removed.contains(&normalize_surface(&inst.tail.surface))
        })
        .collect();
    stats.removed_instances = (before - kept.len()) as u64;
    (kept, stats)
}

fn surface_key(inst: &RelationalInstance) -> (String, String) {
    (
        normalize_surface(&inst.head.surface),
        normalize_surface(&inst.tail.surface),
    )
}

/// Remove mention-level overlap across splits: an ordered (head surface,
/// tail surface) pair occurring in several splits is retained only in the
/// highest-priority split (train > valid > test).
pub fn remove_cross_split_mention_overlap(
    train: Vec<RelationalInstance>,
    valid: Vec<RelationalInstance>,
    test: Vec<RelationalInstance>,
) -> (Vec<RelationalInstance>, Vec<RelationalInstance>, Vec<RelationalInstance>, u64) {
    let train_keys: BTreeSet<(String, String)> = train.iter().map(surface_key).collect();
    let before_valid = valid.len();
    let valid_kept: Vec<RelationalInstance> = valid
        .into_iter()
        .filter(|i| !train_keys.contains(&surface_key(i)))
        .collect();
    let valid_keys: BTreeSet<(String, String)> = valid_kept.iter().map(surface_key).collect();
    let before_test = test.len();
    let test_kept: Vec<RelationalInstance> = test
        .into_iter()
        .filter(|i| {
            let k = surface_key(i);
            !train_keys.contains(&k) && !valid_keys.contains(&k)
        })
        .collect();
    let removed = (before_valid - valid_kept.len()) as u64 + (before_test - test_kept.len()) as u64;
    (train, valid_kept, test_kept, removed)
}

/// All instances of one ordered entity pair under one label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bag {
    pub head: Cui,
    pub tail: Cui,
    pub relation: String,
    pub instances: Vec<RelationalInstance>,
}

/// Group instances into per-pair bags and report the NA instance fraction.
///
/// A pair mixing distinct non-NA labels (or NA with non-NA) signals an
/// upstream bug and is an error.
pub fn assemble_bags(
    instances: Vec<RelationalInstance>,
) -> Result<(Vec<Bag>, f64), AlignError> {
    let total = instances.len();
    let na_count = instances.iter().filter(|i| i.is_na()).count();

    let mut groups: BTreeMap<Pair, Vec<RelationalInstance>> = BTreeMap::new();
    for inst in instances {
        groups.entry(inst.pair()).or_default().push(inst);
    }

    let mut bags = Vec::with_capacity(groups.len());
    for ((head, tail), members) in groups {
        let relation = members[0].relation.clone();
        for m in &members[1..] {
            if m.relation != relation {
                return Err(AlignError::ConflictingLabels(
                    head,
                    tail,
                    relation,
                    m.relation.clone(),
                ));
            }
        }
        bags.push(Bag {
            head,
            tail,
            relation,
            instances: members,
        });
    }

    let na_fraction = if total == 0 {
        0.0
    } else {
        na_count as f64 / total as f64
    };
    Ok((bags, na_fraction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::SemanticGroup;
    use crate::synth::cui;
    use alloc::vec;

    fn tui(s: &str) -> Tui {
        Tui::new(s).unwrap()
    }

    fn entity(n: u32, tuis: &[&str]) -> (Cui, Entity) {
        let c = cui(n);
        (
            c.clone(),
            Entity {
                cui: c,
                tuis: tuis.iter().map(|t| tui(t)).collect(),
                group: SemanticGroup::Diso,
                names: BTreeSet::new(),
            },
        )
    }

    fn entity_table(specs: &[(u32, &[&str])]) -> BTreeMap<Cui, Entity> {
        specs.iter().map(|(n, t)| entity(*n, t)).collect()
    }

    #[test]
    fn positives_and_index_from_single_triple() {
        let entities = entity_table(&[(1, &["T023"]), (2, &["T191"])]);
        let triples: BTreeSet<Triple> =
            [Triple::new(cui(1), "finding_site_of", cui(2))].into_iter().collect();
        let (pos, index) = build_positive_pairs(&triples, &entities);
        assert_eq!(pos.label_of(&(cui(1), cui(2))), Some("finding_site_of"));
        assert!(index.head_roles.contains(&cui(1)));
        assert!(index.tail_roles.contains(&cui(2)));
        assert!(index.type_pairs.contains(&(tui("T023"), tui("T191"))));
    }

    #[test]
    fn positive_index_matches_brute_force() {
        let kg = crate::synth::synthetic_kg(20, 11);
        let specs: Vec<(u32, &[&str])> = (0..30).map(|n| (n, ["T047"].as_slice())).collect();
        let entities = entity_table(&specs);
        let (pos, index) = build_positive_pairs(&kg, &entities);

        // Naive double loop oracle.
        let mut heads = BTreeSet::new();
        let mut tails = BTreeSet::new();
        let mut pairs = BTreeSet::new();
        for t in &kg {
            heads.insert(t.head.clone());
            tails.insert(t.tail.clone());
            pairs.insert((t.head.clone(), t.tail.clone()));
        }
        assert_eq!(index.head_roles, heads);
        assert_eq!(index.tail_roles, tails);
        assert_eq!(pos.pairs().cloned().collect::<BTreeSet<_>>(), pairs);
    }

    /// Brute-force enumeration of all admissible negative pairs.
    fn enumerate_negatives(
        index: &TypeRoleIndex,
        entities: &BTreeMap<Cui, Entity>,
        global_positives: &BTreeSet<Pair>,
        excluded: &BTreeSet<Pair>,
    ) -> BTreeSet<Pair> {
        let mut out = BTreeSet::new();
        for h in entities.keys() {
            for t in entities.keys() {
                if index.head_roles.contains(h)
                    && index.tail_roles.contains(t)
                    && negative_candidate_ok(h, t, entities, index, global_positives, excluded)
                {
                    out.insert((h.clone(), t.clone()));
                }
            }
        }
        out
    }

    #[test]
    fn negatives_subset_of_enumeration_and_equal_at_capacity() {
        let kg = crate::synth::synthetic_kg(30, 5);
        let specs: Vec<(u32, &[&str])> = (0..40).map(|n| (n, ["T047"].as_slice())).collect();
        let entities = entity_table(&specs);
        let (pos, index) = build_positive_pairs(&kg, &entities);
        let global: BTreeSet<Pair> = pos.pairs().cloned().collect();
        let excluded = BTreeSet::new();

        let oracle = enumerate_negatives(&index, &entities, &global, &excluded);
        let sample = sample_negative_pairs(&index, &entities, &global, &excluded, 9, 10);
        assert!(sample.pairs.is_subset(&oracle));
        assert_eq!(sample.pairs.len(), 10);

        let full = sample_negative_pairs(&index, &entities, &global, &excluded, 9, oracle.len());
        assert_eq!(full.pairs, oracle);
        assert_eq!(full.shortfall, 0);

        let over =
            sample_negative_pairs(&index, &entities, &global, &excluded, 9, oracle.len() + 5);
        assert_eq!(over.pairs, oracle);
        assert_eq!(over.shortfall, 5);
    }

    #[test]
    fn negative_never_hits_global_positive() {
        // Candidate corruption (C, B) where (C, B) is a positive elsewhere
        // must be rejected.
        let entities = entity_table(&[(1, &["T047"]), (2, &["T047"]), (3, &["T047"])]);
        let triples: BTreeSet<Triple> = [
            Triple::new(cui(1), "cause_of", cui(2)),
            Triple::new(cui(3), "cause_of", cui(2)),
        ]
        .into_iter()
        .collect();
        let (pos, index) = build_positive_pairs(&triples, &entities);
        let global: BTreeSet<Pair> = pos.pairs().cloned().collect();
        let sample = sample_negative_pairs(&index, &entities, &global, &BTreeSet::new(), 0, 100);
        assert!(!sample.pairs.contains(&(cui(3), cui(2))));
        assert!(!sample.pairs.contains(&(cui(1), cui(2))));
    }

    #[test]
    fn role_constraint_restricts_corruption_side() {
        // cui(2) only ever appears as tail, so it can never head a negative.
        let entities = entity_table(&[(1, &["T047"]), (2, &["T047"]), (3, &["T047"])]);
        let triples: BTreeSet<Triple> = [
            Triple::new(cui(1), "cause_of", cui(2)),
            Triple::new(cui(3), "cause_of", cui(2)),
        ]
        .into_iter()
        .collect();
        let (pos, index) = build_positive_pairs(&triples, &entities);
        let global: BTreeSet<Pair> = pos.pairs().cloned().collect();
        let sample = sample_negative_pairs(&index, &entities, &global, &BTreeSet::new(), 0, 100);
        for (h, _) in &sample.pairs {
            assert!(index.head_roles.contains(h));
        }
        assert!(!sample.pairs.iter().any(|(h, _)| *h == cui(2)));
    }

    #[test]
    fn type_constraint_rejects_unobserved_combinations() {
        // Positive uses (T047, T047); entity 4 is a device and can't pair.
        let entities = entity_table(&[
            (1, &["T047"]),
            (2, &["T047"]),
            (3, &["T047"]),
            (4, &["T074"]),
        ]);
        let triples: BTreeSet<Triple> =
            [Triple::new(cui(1), "cause_of", cui(2)), Triple::new(cui(4), "cause_of", cui(3))]
                .into_iter()
                .collect();
        let (_, mut index) = build_positive_pairs(&triples, &entities);
        // Keep only the (T047, T047) observation.
        index.type_pairs.retain(|(a, b)| a == &tui("T047") && b == &tui("T047"));
        let global = BTreeSet::new();
        let sample = sample_negative_pairs(&index, &entities, &global, &BTreeSet::new(), 0, 100);
        for (h, t) in &sample.pairs {
            assert_ne!(*h, cui(4));
            assert_ne!(*t, cui(4));
        }
    }

    fn mention(n: u32, start: usize, surface: &str) -> Mention {
        Mention {
            cui: cui(n),
            start,
            end: start + surface.chars().count(),
            surface: surface.to_string(),
        }
    }

    fn sentence(text: &str, mentions: Vec<Mention>) -> LinkedSentence {
        LinkedSentence::new(text.to_string(), mentions, String::new()).unwrap()
    }

    #[test]
    fn match_emits_positive_and_negative_instances() {
        // "aa bb cc" with three mentions; (1,2) positive, (3,1) negative.
        let s = sentence(
            "aa bb cc",
            vec![mention(1, 0, "aa"), mention(2, 3, "bb"), mention(3, 6, "cc")],
        );
        let mut positives = PositivePairs::default();
        positives
            .labels
            .insert((cui(1), cui(2)), "cause_of".to_string());
        let negatives: BTreeSet<Pair> = [(cui(3), cui(1))].into_iter().collect();
        let instances = match_sentences(&positives, &negatives, &[s]);
        assert_eq!(instances.len(), 2);
        let labels: BTreeSet<&str> =
            instances.iter().map(|i| i.relation.as_str()).collect();
        assert_eq!(labels, ["NA", "cause_of"].into_iter().collect());
    }

    #[test]
    fn single_mention_sentence_yields_nothing() {
        let s = sentence("aa only", vec![mention(1, 0, "aa")]);
        let mut positives = PositivePairs::default();
        positives
            .labels
            .insert((cui(1), cui(2)), "cause_of".to_string());
        assert!(match_sentences(&positives, &BTreeSet::new(), &[s]).is_empty());
    }

    fn instance(h: u32, hs: &str, t: u32, ts: &str, rel: &str) -> RelationalInstance {
        let text = alloc::format!("{hs} x {ts}");
        let head = mention(h, 0, hs);
        let tail = mention(t, hs.chars().count() + 3, ts);
        RelationalInstance {
            text,
            head,
            tail,
            relation: rel.to_string(),
        }
    }

    #[test]
    fn pruning_with_neutral_settings_is_identity() {
        let entities = entity_table(&[(1, &["T047"]), (2, &["T047"])]);
        let instances = vec![instance(1, "flu", 2, "cough", "cause_of")];
        let (kept, stats) =
            prune_mentions(instances.clone(), u64::MAX, &BTreeSet::new(), &entities);
        assert_eq!(kept, instances);
        assert_eq!(stats.removed_instances, 0);
    }

    #[test]
    fn stoplisted_surface_removed_regardless_of_count() {
        let entities = entity_table(&[(1, &["T047"]), (2, &["T047"])]);
        let instances = vec![
            instance(1, "disease", 2, "cough", "cause_of"),
            instance(1, "flu", 2, "cough", "cause_of"),
        ];
        let stoplist: BTreeSet<String> = ["disease".to_string()].into_iter().collect();
        let (kept, stats) = prune_mentions(instances, u64::MAX, &stoplist, &entities);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].head.surface, "flu");
        assert_eq!(stats.removed_instances, 1);
    }

    #[test]
    fn threshold_boundary_is_strict() {
        let entities = entity_table(&[(1, &["T047"]), (2, &["T047"])]);
        // "liver" appears exactly `threshold` times: kept.
        let threshold = 4u64;
        let at: Vec<RelationalInstance> = (0..threshold)
            .map(|_| instance(1, "liver", 2, "cough", "cause_of"))
            .collect();
        let (kept, _) = prune_mentions(at.clone(), threshold, &BTreeSet::new(), &entities);
        assert_eq!(kept.len(), at.len());

        // threshold + 1 occurrences: the whole pool is removed.
        let mut over = at;
        over.push(instance(1, "liver", 2, "fever", "cause_of"));
        let (kept, stats) = prune_mentions(over, threshold, &BTreeSet::new(), &entities);
        assert!(kept.is_empty());
        assert_eq!(stats.pruned_surfaces, 1);
    }

    #[test]
    fn cross_split_overlap_keeps_train_only() {
        let shared = instance(1, "ECG", 2, "Q-T interval", "NA");
        let train = vec![shared.clone()];
        let valid = vec![shared.clone(), instance(3, "unique", 4, "pair", "NA")];
        let test = vec![shared.clone()];
        let (tr, va, te, _) = remove_cross_split_mention_overlap(train, valid, test);
        assert_eq!(tr.len(), 1);
        assert_eq!(va.len(), 1);
        assert_eq!(va[0].head.surface, "unique");
        assert!(te.is_empty());
    }

    #[test]
    fn overlap_priority_valid_over_test() {
        let shared = instance(1, "aa", 2, "bb", "NA");
        let (_, va, te, _) = remove_cross_split_mention_overlap(
            vec![],
            vec![shared.clone()],
            vec![shared.clone()],
        );
        assert_eq!(va.len(), 1);
        assert!(te.is_empty());
    }

    #[test]
    fn bags_group_by_pair_and_report_na_fraction() {
        let mut instances = Vec::new();
        for _ in 0..6 {
            instances.push(instance(1, "aa", 2, "bb", "cause_of"));
        }
        for _ in 0..9 {
            instances.push(instance(3, "cc", 4, "dd", "NA"));
        }
        instances.push(instance(5, "ee", 6, "ff", "NA"));
        let (bags, na) = assemble_bags(instances).unwrap();
        assert_eq!(bags.len(), 3);
        let six = bags.iter().find(|b| b.head == cui(1)).unwrap();
        assert_eq!(six.instances.len(), 6);
        assert!((na - 10.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn conflicting_labels_error() {
        let a = instance(1, "aa", 2, "bb", "cause_of");
        let b = instance(1, "aa", 2, "bb", "focus_of");
        assert!(assemble_bags(vec![a, b]).is_err());
    }

    #[test]
    fn ninety_percent_na_fixture() {
        let mut instances = Vec::new();
        instances.push(instance(1, "aa", 2, "bb", "cause_of"));
        for k in 0..9u32 {
            instances.push(instance(10 + k, "xx", 30 + k, "yy", "NA"));
        }
        let (_, na) = assemble_bags(instances).unwrap();
        assert!((na - 0.9).abs() < 1e-12);
    }
}
