//! Shared synthetic fixture generation for the integration and acceptance
//! tests: small RRF files plus an entity-linked sentence corpus whose scale
//! is controlled by the caller.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use medalign_core::rng::DetRng;

/// One concept of the synthetic ontology.
#[derive(Debug, Clone)]
pub struct FixtureConcept {
    pub cui: String,
    pub tui: &'static str,
    pub sty: &'static str,
    pub surface: String,
}

pub fn diso(i: usize) -> FixtureConcept {
    FixtureConcept {
        cui: format!("C{:07}", 1000 + i),
        tui: "T047",
        sty: "Disease or Syndrome",
        surface: format!("disoterm{i}"),
    }
}

pub fn anat(i: usize) -> FixtureConcept {
    FixtureConcept {
        cui: format!("C{:07}", 2000 + i),
        tui: "T023",
        sty: "Body Part, Organ, or Organ Component",
        surface: format!("anatterm{i}"),
    }
}

pub fn mrconso_line(c: &FixtureConcept) -> String {
    format!(
        "{}|ENG|P|L1|PF|S1|Y|A1|||{}X|SNOMEDCT_US|PT|123|{}|0|N||",
        c.cui, c.cui, c.surface
    )
}

pub fn mrsty_line(c: &FixtureConcept) -> String {
    format!("{}|{}|A1.2|{}|AT1||", c.cui, c.tui, c.sty)
}

/// MRREL row asserting the statement "`head` `rela` `tail`": the row stores
/// (CUI1 = tail, RELA, CUI2 = head).
pub fn mrrel_line(head: &str, rela: &str, tail: &str) -> String {
    format!("{tail}|A1|SCUI|RO|{head}|A2|SCUI|{rela}|R1||SNOMEDCT_US|||||")
}

/// A JSON corpus line for one sentence mentioning the two concepts once.
/// `uid` makes the text unique so deduplication keeps every sentence.
pub fn sentence_line(uid: usize, head: &FixtureConcept, tail: &FixtureConcept) -> String {
    let prefix = format!("record {uid} links ");
    let middle = " with ";
    let h_start = prefix.chars().count();
    let h_end = h_start + head.surface.chars().count();
    let t_start = h_end + middle.chars().count();
    let t_end = t_start + tail.surface.chars().count();
    let text = format!("{prefix}{}{middle}{} here.", head.surface, tail.surface);
    format!(
        r#"{{"text":"{text}","mentions":[{{"cui":"{}","start":{h_start},"end":{h_end},"surface":"{}"}},{{"cui":"{}","start":{t_start},"end":{t_end},"surface":"{}"}}]}}"#,
        head.cui, head.surface, tail.cui, tail.surface
    )
}

/// A complete pipeline input set on disk.
pub struct Fixture {
    pub mrconso: PathBuf,
    pub mrsty: PathBuf,
    pub mrrel: PathBuf,
    pub sentences: PathBuf,
    /// (head, relation, tail) statements encoded in MRREL.
    pub triples: Vec<(FixtureConcept, &'static str, FixtureConcept)>,
}

/// Parameters controlling fixture scale.
pub struct FixtureSpec {
    pub n_diso: usize,
    pub n_anat: usize,
    /// finding_site_of statements (disorder -> body part).
    pub n_triples: usize,
    /// Sentences per related pair.
    pub pos_sentences: usize,
    /// Unrelated co-occurring candidate pairs.
    pub n_negative_pairs: usize,
    /// Sentences per unrelated pair.
    pub neg_sentences: usize,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec {
            n_diso: 20,
            n_anat: 12,
            n_triples: 40,
            pos_sentences: 2,
            n_negative_pairs: 60,
            neg_sentences: 2,
            seed: 11,
        }
    }
}

/// Write a synthetic fixture into `dir`.
pub fn build_fixture(dir: &Path, spec: &FixtureSpec) -> Fixture {
    let disos: Vec<FixtureConcept> = (0..spec.n_diso).map(diso).collect();
    let anats: Vec<FixtureConcept> = (0..spec.n_anat).map(anat).collect();

    let mut rng = DetRng::from_seed(spec.seed);
    let mut pair_keys: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut triples = Vec::new();
    let mut guard = 0;
    while triples.len() < spec.n_triples && guard < spec.n_triples * 100 {
        guard += 1;
        let d = rng.index(disos.len());
        let a = rng.index(anats.len());
        if pair_keys.insert((d, a)) {
            triples.push((disos[d].clone(), "finding_site_of", anats[a].clone()));
        }
    }

    // Unrelated candidate pairs drawn from the same role populations.
    let mut negatives = Vec::new();
    guard = 0;
    while negatives.len() < spec.n_negative_pairs && guard < spec.n_negative_pairs * 200 {
        guard += 1;
        let d = rng.index(disos.len());
        let a = rng.index(anats.len());
        if pair_keys.insert((d, a)) {
            negatives.push((disos[d].clone(), anats[a].clone()));
        }
    }

    let mut mrconso = String::new();
    let mut mrsty = String::new();
    for c in disos.iter().chain(anats.iter()) {
        writeln!(mrconso, "{}", mrconso_line(c)).unwrap();
        writeln!(mrsty, "{}", mrsty_line(c)).unwrap();
    }
    let mut mrrel = String::new();
    for (h, r, t) in &triples {
        writeln!(mrrel, "{}", mrrel_line(&h.cui, r, &t.cui)).unwrap();
    }

    let mut sentences = String::new();
    let mut uid = 0;
    for (h, _, t) in &triples {
        for _ in 0..spec.pos_sentences {
            writeln!(sentences, "{}", sentence_line(uid, h, t)).unwrap();
            uid += 1;
        }
    }
    for (h, t) in &negatives {
        for _ in 0..spec.neg_sentences {
            writeln!(sentences, "{}", sentence_line(uid, h, t)).unwrap();
            uid += 1;
        }
    }

    let fixture = Fixture {
        mrconso: dir.join("MRCONSO.RRF"),
        mrsty: dir.join("MRSTY.RRF"),
        mrrel: dir.join("MRREL.RRF"),
        sentences: dir.join("sentences.jsonl"),
        triples,
    };
    std::fs::write(&fixture.mrconso, mrconso).unwrap();
    std::fs::write(&fixture.mrsty, mrsty).unwrap();
    std::fs::write(&fixture.mrrel, mrrel).unwrap();
    std::fs::write(&fixture.sentences, sentences).unwrap();
    fixture
}

/// Path to the compiled CLI binary.
pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_medalign")
}
