//! Seeded synthetic fixtures used by tests, benchmarks and the acceptance
//! suite.

use alloc::collections::BTreeSet;
use alloc::format;

use crate::ids::Cui;
use crate::kg::Triple;
use crate::rng::DetRng;

/// Numbered CUI, e.g. `cui(5)` -> `C0000005`.
pub fn cui(n: u32) -> Cui {
    Cui::new(&format!("C{n:07}")).unwrap()
}

/// Random knowledge graph with `n_triples` triples over a pool of entities
/// sized to keep degrees moderate. Deterministic in `seed`.
pub fn synthetic_kg(n_triples: usize, seed: u64) -> BTreeSet<Triple> {
    let mut rng = DetRng::from_seed(seed);
    let n_entities = (n_triples as f64 * 0.8) as usize + 4;
    let relations = ["finding_site_of", "cause_of", "component_of"];
    let mut kg = BTreeSet::new();
    while kg.len() < n_triples {
        let h = rng.index(n_entities) as u32;
        let t = rng.index(n_entities) as u32;
        if h == t {
            continue;
        }
        let r = relations[rng.index(relations.len())];
        kg.insert(Triple::new(cui(h), r, cui(t)));
    }
    kg
}
