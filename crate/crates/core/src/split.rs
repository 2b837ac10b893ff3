//! Transductive and inductive train/valid/test splitting of the knowledge
//! graph, plus an independent disjointness/coverage verifier.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::ids::Cui;
use crate::kg::Triple;
use crate::relations::{RelationCanonMap, RelationKind};
use crate::rng::DetRng;

/// Fractional split targets; must each lie in (0,1) and sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratios {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

impl Ratios {
    pub fn new(train: f64, valid: f64, test: f64) -> Result<Self, SplitError> {
        let r = Ratios { train, valid, test };
        let ok = [train, valid, test].iter().all(|x| *x > 0.0 && *x < 1.0);
        let sum = train + valid + test;
        if ok && (sum - 1.0).abs() < 1e-9 {
            Ok(r)
        } else {
            Err(SplitError::InvalidRatios { train, valid, test })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMode {
    Transductive,
    Inductive,
}

impl SplitMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitMode::Transductive => "transductive",
            SplitMode::Inductive => "inductive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SplitError {
    #[error("invalid split ratios {train}/{valid}/{test}: must be in (0,1) and sum to 1")]
    InvalidRatios { train: f64, valid: f64, test: f64 },
    #[error("cannot split an empty knowledge graph")]
    EmptyKg,
    #[error(
        "inductive ratio targets unreachable within ±2 pp; closest achievable \
         train/valid/test = {train:.4}/{valid:.4}/{test:.4}"
    )]
    RatioUnreachable { train: f64, valid: f64, test: f64 },
}

/// A completed split with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitTriples {
    pub mode: SplitMode,
    pub seed: u64,
    pub ratios: Ratios,
    pub train: BTreeSet<Triple>,
    pub valid: BTreeSet<Triple>,
    pub test: BTreeSet<Triple>,
}

/// Entities touched by a triple set.
pub fn entities_of(triples: &BTreeSet<Triple>) -> BTreeSet<Cui> {
    let mut out = BTreeSet::new();
    for t in triples {
        out.insert(t.head.clone());
        out.insert(t.tail.clone());
    }
    out
}

impl SplitTriples {
    pub fn train_entities(&self) -> BTreeSet<Cui> {
        entities_of(&self.train)
    }

    pub fn valid_entities(&self) -> BTreeSet<Cui> {
        entities_of(&self.valid)
    }

    pub fn test_entities(&self) -> BTreeSet<Cui> {
        entities_of(&self.test)
    }
}

fn rounded_count(total: usize, fraction: f64) -> usize {
    let x = total as f64 * fraction;
    let n = (x + 0.5) as usize;
    n.min(total)
}

/// Random triple partition where every evaluation entity must be seen in
/// training: eval triples touching an unseen entity are moved back to train
/// until a fixpoint is reached.
pub fn split_transductive(
    kg: &BTreeSet<Triple>,
    ratios: Ratios,
    seed: u64,
) -> Result<SplitTriples, SplitError> {
    if kg.is_empty() {
        return Err(SplitError::EmptyKg);
    }
    let mut rng = DetRng::from_seed(seed);
    // BTreeSet iteration gives lexicographic order, so the shuffle outcome is
    // independent of how the caller assembled the set.
    let order: Vec<&Triple> = rng.shuffled(&kg.iter().collect::<Vec<_>>());

    let n = order.len();
    let n_train = rounded_count(n, ratios.train);
    let n_valid = rounded_count(n, ratios.valid).min(n - n_train);

    let mut train: BTreeSet<Triple> = order[..n_train].iter().map(|t| (*t).clone()).collect();
    let mut valid: BTreeSet<Triple> = order[n_train..n_train + n_valid]
        .iter()
        .map(|t| (*t).clone())
        .collect();
    let mut test: BTreeSet<Triple> = order[n_train + n_valid..]
        .iter()
        .map(|t| (*t).clone())
        .collect();

    loop {
        let seen = entities_of(&train);
        let mut moved = false;
        for set in [&mut valid, &mut test] {
            let back: Vec<Triple> = set
                .iter()
                .filter(|t| !seen.contains(&t.head) || !seen.contains(&t.tail))
                .cloned()
                .collect();
            for t in back {
                set.remove(&t);
                train.insert(t);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }

    Ok(SplitTriples {
        mode: SplitMode::Transductive,
        seed,
        ratios,
        train,
        valid,
        test,
    })
}

/// Inductive split: a pool of entities is held out as unseen, training keeps
/// only triples entirely among seen entities, and triples touching the unseen
/// pool are divided between valid and test.
///
/// The unseen-pool size is searched over seeded entity orders (up to 50
/// reshuffles) so the train fraction lands within ±2 percentage points of
/// the target; otherwise the closest achievable ratios are reported as an
/// error.
pub fn split_inductive(
    kg: &BTreeSet<Triple>,
    ratios: Ratios,
    seed: u64,
) -> Result<SplitTriples, SplitError> {
    const MAX_ATTEMPTS: usize = 50;

    if kg.is_empty() {
        return Err(SplitError::EmptyKg);
    }
    let mut rng = DetRng::from_seed(seed);
    let entities: Vec<Cui> = entities_of(kg).into_iter().collect();

    let triples: Vec<&Triple> = kg.iter().collect();
    let n = triples.len();

    // Incident triples per entity.
    let mut index: BTreeMap<&Cui, Vec<usize>> = BTreeMap::new();
    for (i, t) in triples.iter().enumerate() {
        index.entry(&t.head).or_default().push(i);
        if t.tail != t.head {
            index.entry(&t.tail).or_default().push(i);
        }
    }

    let target = n as f64 * ratios.train;
    let tolerance = n as f64 * 0.02;

    // Each attempt reshuffles the entity order and sweeps every
    // unseen-prefix size k, tracking train_count(k) = number of fully-seen
    // triples, computed incrementally via per-triple unseen-endpoint
    // counters. The discrete jumps of train_count can skip the tolerance
    // window for one order but land inside it for another.
    let mut best: Option<(Vec<Cui>, usize, f64)> = None;
    for _ in 0..MAX_ATTEMPTS {
        let order = rng.shuffled(&entities);
        let mut unseen_endpoints = alloc::vec![0u8; n];
        let mut train_count = n;
        let mut best_k = 0usize;
        let mut best_dev = (train_count as f64 - target).abs();
        for (k, entity) in order.iter().enumerate() {
            for &i in &index[entity] {
                if unseen_endpoints[i] == 0 {
                    train_count -= 1;
                }
                unseen_endpoints[i] += 1;
            }
            let dev = (train_count as f64 - target).abs();
            if dev < best_dev {
                best_dev = dev;
                best_k = k + 1;
            }
        }
        let improved = best.as_ref().is_none_or(|(_, _, d)| best_dev < *d);
        if improved {
            best = Some((order, best_k, best_dev));
        }
        if best_dev <= tolerance {
            break;
        }
    }
    let (order, best_k, best_dev) = best.expect("at least one attempt ran");

    // Materialize the best cut.
    let unseen: BTreeSet<&Cui> = order[..best_k].iter().collect();
    let mut train = BTreeSet::new();
    let mut pool: Vec<&Triple> = Vec::new();
    for t in &triples {
        if unseen.contains(&t.head) || unseen.contains(&t.tail) {
            pool.push(t);
        } else {
            train.insert((*t).clone());
        }
    }

    if best_dev > tolerance {
        let eval = n - train.len();
        let valid_share = ratios.valid / (ratios.valid + ratios.test);
        return Err(SplitError::RatioUnreachable {
            train: train.len() as f64 / n as f64,
            valid: eval as f64 * valid_share / n as f64,
            test: eval as f64 * (1.0 - valid_share) / n as f64,
        });
    }

    let pool = rng.shuffled(&pool);
    let n_valid = rounded_count(pool.len(), ratios.valid / (ratios.valid + ratios.test));
    let valid: BTreeSet<Triple> = pool[..n_valid].iter().map(|t| (*t).clone()).collect();
    let test: BTreeSet<Triple> = pool[n_valid..].iter().map(|t| (*t).clone()).collect();

    Ok(SplitTriples {
        mode: SplitMode::Inductive,
        seed,
        ratios,
        train,
        valid,
        test,
    })
}

/// Pairwise overlap counts between the three splits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OverlapCounts {
    pub train_valid: u64,
    pub train_test: u64,
    pub valid_test: u64,
}

impl OverlapCounts {
    pub fn total(&self) -> u64 {
        self.train_valid + self.train_test + self.valid_test
    }
}

/// Result of [`verify_split`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitReport {
    pub mode: SplitMode,
    pub sizes: [u64; 3],
    pub direct: OverlapCounts,
    /// Overlaps counted after normalizing (h, r, t) ≡ (t, r⁻¹, h).
    pub inverse_aware: OverlapCounts,
    /// Eval triples violating the mode's entity contract.
    pub entity_violations: u64,
    pub pass: bool,
}

fn canonical_key(t: &Triple, canon: &RelationCanonMap) -> (Cui, String, Cui) {
    match canon.resolve(&t.relation) {
        RelationKind::InverseOf(c) => (t.tail.clone(), String::from(c), t.head.clone()),
        _ => (t.head.clone(), t.relation.clone(), t.tail.clone()),
    }
}

fn overlap(a: &BTreeSet<Triple>, b: &BTreeSet<Triple>) -> u64 {
    a.intersection(b).count() as u64
}

fn inverse_overlap(a: &BTreeSet<Triple>, b: &BTreeSet<Triple>, canon: &RelationCanonMap) -> u64 {
    let ka: BTreeSet<_> = a.iter().map(|t| canonical_key(t, canon)).collect();
    let kb: BTreeSet<_> = b.iter().map(|t| canonical_key(t, canon)).collect();
    ka.intersection(&kb).count() as u64
}

/// Check a split for direct overlap, inverse-aware overlap and entity
/// coverage. Pure report: never fails.
pub fn verify_split(s: &SplitTriples, canon: &RelationCanonMap) -> SplitReport {
    let direct = OverlapCounts {
        train_valid: overlap(&s.train, &s.valid),
        train_test: overlap(&s.train, &s.test),
        valid_test: overlap(&s.valid, &s.test),
    };
    let inverse_aware = OverlapCounts {
        train_valid: inverse_overlap(&s.train, &s.valid, canon),
        train_test: inverse_overlap(&s.train, &s.test, canon),
        valid_test: inverse_overlap(&s.valid, &s.test, canon),
    };

    let seen = s.train_entities();
    let mut entity_violations = 0u64;
    for t in s.valid.iter().chain(s.test.iter()) {
        let head_seen = seen.contains(&t.head);
        let tail_seen = seen.contains(&t.tail);
        let violated = match s.mode {
            SplitMode::Transductive => !head_seen || !tail_seen,
            SplitMode::Inductive => head_seen && tail_seen,
        };
        if violated {
            entity_violations += 1;
        }
    }

    let pass = direct.total() == 0 && inverse_aware.total() == 0 && entity_violations == 0;
    SplitReport {
        mode: s.mode,
        sizes: [s.train.len() as u64, s.valid.len() as u64, s.test.len() as u64],
        direct,
        inverse_aware,
        entity_violations,
        pass,
    }
}
