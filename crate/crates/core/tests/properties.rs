//! Randomized invariant checks over the splitters, the negative sampler,
//! the dictionary linker, and the scorer.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use proptest::prelude::*;

use medalign_core::align::{build_positive_pairs, sample_negative_pairs, satisfies_type_constraint};
use medalign_core::corpus::{char_slice, dedup_sentences, dictionary_link, AmbiguityPolicy, Lexicon, LinkedSentence};
use medalign_core::ids::Tui;
use medalign_core::kg::Entity;
use medalign_core::registry::TypeRegistry;
use medalign_core::score::{average_precision, Prediction};
use medalign_core::score::GoldFacts;
use medalign_core::split::{entities_of, split_inductive, split_transductive, verify_split, Ratios};
use medalign_core::synth::{cui, synthetic_kg};
use medalign_core::RelationCanonMap;

fn ratios() -> Ratios {
    Ratios::new(0.7, 0.1, 0.2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn transductive_split_partitions_kg(n in 20usize..200, seed in 0u64..1_000) {
        let kg = synthetic_kg(n, seed);
        let s = split_transductive(&kg, ratios(), seed).unwrap();
        let mut union = s.train.clone();
        prop_assert!(union.is_disjoint(&s.valid));
        prop_assert!(union.is_disjoint(&s.test));
        prop_assert!(s.valid.is_disjoint(&s.test));
        union.extend(s.valid.iter().cloned());
        union.extend(s.test.iter().cloned());
        prop_assert_eq!(union, kg);

        // Every eval entity is seen in training.
        let seen = entities_of(&s.train);
        for t in s.valid.iter().chain(s.test.iter()) {
            prop_assert!(seen.contains(&t.head) && seen.contains(&t.tail));
        }
    }

    #[test]
    fn inductive_split_keeps_eval_unseen(n in 50usize..300, seed in 0u64..500) {
        let kg = synthetic_kg(n, seed);
        let Ok(s) = split_inductive(&kg, ratios(), seed) else {
            // Ratio unreachable on this draw; nothing further to check.
            return Ok(());
        };
        let seen = entities_of(&s.train);
        // Every eval triple touches at least one entity unseen in training.
        for t in s.valid.iter().chain(s.test.iter()) {
            prop_assert!(!seen.contains(&t.head) || !seen.contains(&t.tail));
        }
        let mut union = s.train.clone();
        union.extend(s.valid.iter().cloned());
        union.extend(s.test.iter().cloned());
        prop_assert_eq!(union, kg);
    }

    #[test]
    fn split_verifier_accepts_fresh_splits(n in 20usize..150, seed in 0u64..300) {
        let kg = synthetic_kg(n, seed);
        let canon = RelationCanonMap::builtin();
        let s = split_transductive(&kg, ratios(), seed).unwrap();
        let report = verify_split(&s, &canon);
        prop_assert!(report.pass, "verifier rejected a fresh split: {report:?}");
    }

    #[test]
    fn negative_samples_are_sound(n in 20usize..120, seed in 0u64..300, target in 1usize..60) {
        let kg = synthetic_kg(n, seed);
        let entities = synthetic_entities(&kg);
        let (positives, index) = build_positive_pairs(&kg, &entities);
        let global: BTreeSet<_> = positives.pairs().cloned().collect();
        let sample = sample_negative_pairs(&index, &entities, &global, &BTreeSet::new(), seed, target);
        prop_assert!(sample.pairs.len() <= target);
        for (h, t) in &sample.pairs {
            prop_assert!(h != t);
            prop_assert!(!global.contains(&(h.clone(), t.clone())));
            prop_assert!(index.head_roles.contains(h));
            prop_assert!(index.tail_roles.contains(t));
            prop_assert!(satisfies_type_constraint(&entities[h], &entities[t], &index.type_pairs));
        }
        // The sampler is deterministic for a fixed seed.
        let again = sample_negative_pairs(&index, &entities, &global, &BTreeSet::new(), seed, target);
        prop_assert_eq!(sample, again);
    }

    #[test]
    fn linked_mentions_are_valid_and_disjoint(words in proptest::collection::vec("[a-z]{1,8}", 1..20)) {
        let text = words.join(" ");
        let mut lexicon = Lexicon::new();
        for (i, w) in words.iter().enumerate() {
            lexicon.insert(w, cui(i as u32 % 7));
        }
        // Also index some bigrams so longest-match has work to do.
        for (i, pair) in words.windows(2).enumerate() {
            if i % 2 == 0 {
                lexicon.insert(&pair.join(" "), cui(100 + i as u32));
            }
        }
        let mentions = dictionary_link(&text, &lexicon, AmbiguityPolicy::FirstCui);
        let mut last_end = 0usize;
        for m in &mentions {
            prop_assert!(m.start >= last_end, "mentions overlap");
            prop_assert!(m.end > m.start);
            let slice = char_slice(&text, m.start, m.end).unwrap();
            prop_assert_eq!(&slice, &m.surface);
            last_end = m.end;
        }
        // Linked sentences built from the result always validate.
        LinkedSentence::new(text, mentions, "s".to_string()).unwrap();
    }

    #[test]
    fn dedup_is_idempotent(texts in proptest::collection::vec("[a-z ]{1,20}", 1..15)) {
        let sentences: Vec<LinkedSentence> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| LinkedSentence::new(t.clone(), vec![], format!("s{i}")).unwrap())
            .collect();
        let once = dedup_sentences(sentences);
        let twice = dedup_sentences(once.clone());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn average_precision_is_bounded_and_scale_invariant(
        scores in proptest::collection::vec(0.0f64..1.0, 1..40),
        gold_mask in proptest::collection::vec(any::<bool>(), 1..40),
    ) {
        let preds: Vec<Prediction> = scores
            .iter()
            .enumerate()
            .map(|(i, s)| Prediction {
                head: cui(i as u32),
                tail: cui(1_000 + i as u32),
                relation: "cause_of".to_string(),
                score: *s,
            })
            .collect();
        let mut gold = GoldFacts::new();
        for (i, keep) in gold_mask.iter().enumerate() {
            if *keep && i < preds.len() {
                gold.insert(preds[i].head.clone(), preds[i].tail.clone(), preds[i].relation.clone());
            }
        }
        if gold.is_empty() {
            return Ok(());
        }
        let ap = average_precision(&preds, &gold);
        prop_assert!((0.0..=1.0).contains(&ap));
        let shifted: Vec<Prediction> = preds
            .iter()
            .map(|p| Prediction { score: p.score * 42.0 + 3.0, ..p.clone() })
            .collect();
        prop_assert_eq!(ap, average_precision(&shifted, &gold));
    }
}

/// Entities for every CUI of the synthetic KG, typed so that heads and tails
/// exercise distinct semantic types.
fn synthetic_entities(kg: &BTreeSet<medalign_core::kg::Triple>) -> BTreeMap<medalign_core::ids::Cui, Entity> {
    let registry = TypeRegistry::builtin();
    let mut entities = BTreeMap::new();
    for c in entities_of(kg) {
        let n: u32 = c.as_str()[1..].parse().unwrap();
        let tui: Tui = if n % 2 == 0 { "T023" } else { "T047" }.parse().unwrap();
        let group = registry.group_of(&tui).unwrap();
        entities.insert(
            c.clone(),
            Entity {
                cui: c,
                tuis: BTreeSet::from([tui]),
                group,
                names: BTreeSet::from([format!("entity {n}")]),
            },
        );
    }
    entities
}
