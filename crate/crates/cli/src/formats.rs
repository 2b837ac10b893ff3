//! On-disk formats: tab-separated triple/entity tables, line-delimited JSON
//! corpora, and the fixed-field-order instance records consumed by common
//! relation-extraction frameworks.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use medalign_core::align::RelationalInstance;
use medalign_core::audit::LabeledTriple;
use medalign_core::corpus::{LinkedSentence, Mention};
use medalign_core::ids::{Cui, Tui};
use medalign_core::kg::{Entity, Triple};
use medalign_core::registry::{SemanticGroup, TypeRegistry};
use medalign_core::score::{GoldFacts, Prediction};

use crate::rrf::RejectLog;

// ---------------------------------------------------------------------------
// Triple tables (head CUI, relation, tail CUI), lexicographically sorted.

pub fn write_triples(path: &Path, triples: &BTreeSet<Triple>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for t in triples {
        writeln!(out, "{}\t{}\t{}", t.head, t.relation, t.tail)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_triples(path: &Path) -> Result<BTreeSet<Triple>> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut triples = BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(h), Some(r), Some(t)) = (cols.next(), cols.next(), cols.next()) else {
            bail!("{}:{}: expected 3 tab-separated columns", path.display(), i + 1);
        };
        triples.insert(Triple {
            head: h.parse().with_context(|| format!("{}:{}: bad head CUI", path.display(), i + 1))?,
            relation: r.to_string(),
            tail: t.parse().with_context(|| format!("{}:{}: bad tail CUI", path.display(), i + 1))?,
        });
    }
    Ok(triples)
}

// ---------------------------------------------------------------------------
// Entity table: one row per (cui, name): cui, group, comma-joined TUIs, name.

pub fn write_entities(path: &Path, entities: &BTreeMap<Cui, Entity>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for e in entities.values() {
        let tuis = e
            .tuis
            .iter()
            .map(|t| t.as_str())
            .collect::<Vec<_>>()
            .join(",");
        for name in &e.names {
            writeln!(out, "{}\t{}\t{}\t{}", e.cui, e.group.code(), tuis, name)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_entities(path: &Path) -> Result<BTreeMap<Cui, Entity>> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut entities: BTreeMap<Cui, Entity> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            bail!("{}:{}: expected 4 columns", path.display(), i + 1);
        }
        let cui: Cui = cols[0]
            .parse()
            .with_context(|| format!("{}:{}: bad CUI", path.display(), i + 1))?;
        let group = SemanticGroup::from_code(cols[1])
            .with_context(|| format!("{}:{}: unknown semantic group {}", path.display(), i + 1, cols[1]))?;
        let mut tuis = BTreeSet::new();
        for t in cols[2].split(',').filter(|t| !t.is_empty()) {
            let tui: Tui = t
                .parse()
                .with_context(|| format!("{}:{}: bad TUI", path.display(), i + 1))?;
            tuis.insert(tui);
        }
        let e = entities.entry(cui.clone()).or_insert_with(|| Entity {
            cui,
            tuis: tuis.clone(),
            group,
            names: BTreeSet::new(),
        });
        e.names.insert(cols[3].to_string());
    }
    Ok(entities)
}

// ---------------------------------------------------------------------------
// Entity-linked sentence corpus: newline-delimited JSON records.

#[derive(Debug, Serialize, Deserialize)]
struct MentionRecord {
    cui: String,
    start: usize,
    end: usize,
    surface: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct SentenceRecord {
    text: String,
    mentions: Vec<MentionRecord>,
    #[serde(default)]
    source_id: String,
}

/// Read a linked-sentence corpus; records violating the mention invariants
/// (bad offsets, surface mismatch, overlap) or failing to parse go to the
/// reject log.
pub fn read_linked_sentences(path: &Path, log: &mut RejectLog) -> Result<Vec<LinkedSentence>> {
    let label = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut sentences = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = (i + 1) as u64;
        if line.trim().is_empty() {
            continue;
        }
        let record: SentenceRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                log.push(&label, line_no, format!("malformed record: {e}"));
                continue;
            }
        };
        let mut mentions = Vec::with_capacity(record.mentions.len());
        let mut bad = false;
        for m in record.mentions {
            match m.cui.parse::<Cui>() {
                Ok(cui) => mentions.push(Mention {
                    cui,
                    start: m.start,
                    end: m.end,
                    surface: m.surface,
                }),
                Err(_) => {
                    log.push(&label, line_no, format!("bad CUI {:?}", m.cui));
                    bad = true;
                    break;
                }
            }
        }
        if bad {
            continue;
        }
        match LinkedSentence::new(record.text, mentions, record.source_id) {
            Ok(s) => sentences.push(s),
            Err(e) => log.push(&label, line_no, format!("{e}")),
        }
    }
    Ok(sentences)
}

pub fn write_linked_sentences(path: &Path, sentences: &[LinkedSentence]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for s in sentences {
        let record = SentenceRecord {
            text: s.text.clone(),
            mentions: s
                .mentions
                .iter()
                .map(|m| MentionRecord {
                    cui: m.cui.to_string(),
                    start: m.start,
                    end: m.end,
                    surface: m.surface.clone(),
                })
                .collect(),
            source_id: s.source_id.clone(),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Instance records: one compact JSON object per line with the fixed field
// order text, h{id,pos,name}, t{id,pos,name}, relation; UTF-8, LF endings.

#[derive(Debug, Serialize, Deserialize)]
struct EndpointRecord {
    id: String,
    pos: [usize; 2],
    name: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceRecord {
    text: String,
    h: EndpointRecord,
    t: EndpointRecord,
    relation: String,
}

fn endpoint(m: &Mention) -> EndpointRecord {
    EndpointRecord {
        id: m.cui.to_string(),
        pos: [m.start, m.end],
        name: m.surface.clone(),
    }
}

/// Serialize one instance to its canonical line (no trailing newline).
pub fn instance_line(inst: &RelationalInstance) -> Result<String> {
    // Offsets must slice to the recorded surface; anything else means the
    // pipeline corrupted the instance upstream.
    for m in [&inst.head, &inst.tail] {
        let actual = medalign_core::corpus::char_slice(&inst.text, m.start, m.end);
        if actual.as_deref() != Some(m.surface.as_str()) {
            bail!(
                "corrupt instance: offsets [{}, {}) do not slice to {:?}",
                m.start,
                m.end,
                m.surface
            );
        }
    }
    let record = InstanceRecord {
        text: inst.text.clone(),
        h: endpoint(&inst.head),
        t: endpoint(&inst.tail),
        relation: inst.relation.clone(),
    };
    Ok(serde_json::to_string(&record)?)
}

pub fn write_instances(path: &Path, instances: &[RelationalInstance]) -> Result<u64> {
    let mut out = BufWriter::new(File::create(path)?);
    for inst in instances {
        out.write_all(instance_line(inst)?.as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(instances.len() as u64)
}

pub fn read_instances(path: &Path) -> Result<Vec<RelationalInstance>> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut instances = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: InstanceRecord = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: malformed instance", path.display(), i + 1))?;
        let to_mention = |e: EndpointRecord| -> Result<Mention> {
            Ok(Mention {
                cui: e.id.parse().map_err(|_| {
                    anyhow::anyhow!("{}:{}: bad CUI {:?}", path.display(), i + 1, e.id)
                })?,
                start: e.pos[0],
                end: e.pos[1],
                surface: e.name,
            })
        };
        instances.push(RelationalInstance {
            text: r.text,
            head: to_mention(r.h)?,
            tail: to_mention(r.t)?,
            relation: r.relation,
        });
    }
    Ok(instances)
}

// ---------------------------------------------------------------------------
// Small auxiliary tables.

/// Lexicon file: tab-separated surface, CUI.
pub fn read_lexicon(path: &Path) -> Result<medalign_core::corpus::Lexicon> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut lexicon = medalign_core::corpus::Lexicon::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (surface, cui) = line
            .split_once('\t')
            .with_context(|| format!("{}:{}: expected 2 columns", path.display(), i + 1))?;
        lexicon.insert(surface, cui.parse()?);
    }
    Ok(lexicon)
}

/// Stoplist: one surface per line; blank lines and `#` comments skipped.
pub fn read_stoplist(path: &Path) -> Result<BTreeSet<String>> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut stoplist = BTreeSet::new();
    for line in reader.lines() {
        let line = line?;
        let surface = line.trim();
        if surface.is_empty() || surface.starts_with('#') {
            continue;
        }
        stoplist.insert(surface.to_string());
    }
    Ok(stoplist)
}

/// Labeled triple file for auditing: tab-separated head, relation, tail
/// where the endpoints may be surfaces or identifiers.
pub fn read_labeled_triples(path: &Path) -> Result<Vec<LabeledTriple>> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut triples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            bail!("{}:{}: expected 3 columns", path.display(), i + 1);
        }
        triples.push(LabeledTriple::new(cols[0], cols[1], cols[2]));
    }
    Ok(triples)
}

/// Surface-to-CUI normalization map: tab-separated surface, CUI.
pub fn read_normalization_map(path: &Path) -> Result<medalign_core::audit::NormalizationMap> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (surface, id) = line
            .split_once('\t')
            .with_context(|| format!("{}:{}: expected 2 columns", path.display(), i + 1))?;
        entries.push((surface.to_string(), id.to_string()));
    }
    Ok(medalign_core::audit::NormalizationMap::from_entries(entries))
}

/// Prediction file: tab-separated head CUI, tail CUI, relation, score.
pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut preds = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            bail!("{}:{}: expected 4 columns", path.display(), i + 1);
        }
        preds.push(Prediction {
            head: cols[0].parse()?,
            tail: cols[1].parse()?,
            relation: cols[2].to_string(),
            score: cols[3]
                .parse()
                .with_context(|| format!("{}:{}: bad score", path.display(), i + 1))?,
        });
    }
    Ok(preds)
}

/// Gold-fact file: tab-separated head CUI, tail CUI, relation (non-NA).
pub fn read_gold_facts(path: &Path) -> Result<GoldFacts> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut gold = GoldFacts::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            bail!("{}:{}: expected 3 columns", path.display(), i + 1);
        }
        gold.insert(cols[0].parse()?, cols[1].parse()?, cols[2].to_string());
    }
    Ok(gold)
}

/// Relation-to-id map: NA is 0, remaining relations lexicographic.
pub fn rel2id(instances: &[&[RelationalInstance]]) -> BTreeMap<String, u32> {
    let mut relations: BTreeSet<&str> = BTreeSet::new();
    for split in instances {
        for inst in *split {
            if inst.relation != medalign_core::align::NA_LABEL {
                relations.insert(&inst.relation);
            }
        }
    }
    let mut map = BTreeMap::new();
    map.insert(medalign_core::align::NA_LABEL.to_string(), 0);
    for (i, r) in relations.into_iter().enumerate() {
        map.insert(r.to_string(), (i + 1) as u32);
    }
    map
}

pub fn write_rel2id(path: &Path, map: &BTreeMap<String, u32>) -> Result<()> {
    // Stable output: emit in id order.
    let mut by_id: Vec<(&String, &u32)> = map.iter().collect();
    by_id.sort_by_key(|(_, id)| **id);
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(b"{")?;
    for (i, (name, id)) in by_id.iter().enumerate() {
        if i > 0 {
            out.write_all(b", ")?;
        }
        write!(out, "{}: {}", serde_json::to_string(name)?, id)?;
    }
    out.write_all(b"}\n")?;
    out.flush()?;
    Ok(())
}

/// Built-in inverse-relation table as relation -> inverse name map.
pub fn builtin_inverse_map() -> BTreeMap<String, String> {
    let canon = medalign_core::RelationCanonMap::builtin();
    let mut map = BTreeMap::new();
    for r in canon.canonical_relations() {
        if let Some(inv) = canon.inverse_name(r) {
            map.insert(inv.to_string(), r.to_string());
        }
    }
    map
}

/// The 51-type whitelist from the built-in registry.
pub fn builtin_whitelist() -> BTreeSet<Tui> {
    TypeRegistry::builtin().whitelist()
}

#[cfg(test)]
mod tests {
    use super::*;
    use medalign_core::synth::cui;

    #[test]
    fn triples_round_trip_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kg.tsv");
        let mut kg = BTreeSet::new();
        kg.insert(Triple {
            head: cui(2),
            relation: "cause_of".into(),
            tail: cui(1),
        });
        kg.insert(Triple {
            head: cui(1),
            relation: "finding_site_of".into(),
            tail: cui(3),
        });
        write_triples(&path, &kg).unwrap();
        assert_eq!(read_triples(&path).unwrap(), kg);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("C0000001\t"));
    }

    #[test]
    fn instance_line_matches_fixed_field_order() {
        let inst = RelationalInstance {
            text: "aa bb".into(),
            head: Mention {
                cui: cui(1),
                start: 0,
                end: 2,
                surface: "aa".into(),
            },
            tail: Mention {
                cui: cui(2),
                start: 3,
                end: 5,
                surface: "bb".into(),
            },
            relation: "cause_of".into(),
        };
        let line = instance_line(&inst).unwrap();
        assert_eq!(
            line,
            r#"{"text":"aa bb","h":{"id":"C0000001","pos":[0,2],"name":"aa"},"t":{"id":"C0000002","pos":[3,5],"name":"bb"},"relation":"cause_of"}"#
        );
    }

    #[test]
    fn corrupt_offsets_are_fatal() {
        let inst = RelationalInstance {
            text: "aa bb".into(),
            head: Mention {
                cui: cui(1),
                start: 0,
                end: 3,
                surface: "aa".into(),
            },
            tail: Mention {
                cui: cui(2),
                start: 3,
                end: 5,
                surface: "bb".into(),
            },
            relation: "NA".into(),
        };
        assert!(instance_line(&inst).is_err());
    }

    #[test]
    fn instances_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("train.txt");
        let instances: Vec<RelationalInstance> = (0..50)
            .map(|i| RelationalInstance {
                text: format!("x{i:02} y{i:02}"),
                head: Mention {
                    cui: cui(i),
                    start: 0,
                    end: 3,
                    surface: format!("x{i:02}"),
                },
                tail: Mention {
                    cui: cui(i + 1),
                    start: 4,
                    end: 7,
                    surface: format!("y{i:02}"),
                },
                relation: if i % 2 == 0 { "NA".into() } else { "cause_of".into() },
            })
            .collect();
        write_instances(&path, &instances).unwrap();
        assert_eq!(read_instances(&path).unwrap(), instances);
    }

    #[test]
    fn sentences_round_trip_and_reject_invalid() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(
            &path,
            concat!(
                r#"{"text":"aa bb","mentions":[{"cui":"C0000001","start":0,"end":2,"surface":"aa"}]}"#,
                "\n",
                r#"{"text":"aa bb","mentions":[{"cui":"C0000001","start":2,"end":2,"surface":""}]}"#,
                "\n",
                "not json\n",
            ),
        )
        .unwrap();
        let mut log = RejectLog::new();
        let sentences = read_linked_sentences(&path, &mut log).unwrap();
        assert_eq!(sentences.len(), 1);
        assert_eq!(log.len(), 2);
        let out = dir.path().join("out.jsonl");
        write_linked_sentences(&out, &sentences).unwrap();
        let mut log2 = RejectLog::new();
        assert_eq!(read_linked_sentences(&out, &mut log2).unwrap(), sentences);
        assert!(log2.is_empty());
    }

    #[test]
    fn rel2id_puts_na_first() {
        let insts = vec![
            RelationalInstance {
                text: "a b".into(),
                head: Mention { cui: cui(1), start: 0, end: 1, surface: "a".into() },
                tail: Mention { cui: cui(2), start: 2, end: 3, surface: "b".into() },
                relation: "finding_site_of".into(),
            },
            RelationalInstance {
                text: "a b".into(),
                head: Mention { cui: cui(1), start: 0, end: 1, surface: "a".into() },
                tail: Mention { cui: cui(3), start: 2, end: 3, surface: "b".into() },
                relation: "cause_of".into(),
            },
        ];
        let map = rel2id(&[&insts]);
        assert_eq!(map["NA"], 0);
        assert_eq!(map["cause_of"], 1);
        assert_eq!(map["finding_site_of"], 2);
    }
}
