//! Streaming parsers for UMLS Rich Release Format files (pipe-delimited, no
//! header, trailing pipe per row). Malformed rows are recorded in a reject
//! log and parsing continues; only I/O failures are fatal.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use medalign_core::ids::{Cui, Tui};
use medalign_core::registry::TypeRegistry;
use medalign_core::rows::{ConceptRow, RawRelRow, TypeAssignment};

/// One rejected input row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectEntry {
    pub file: String,
    pub line: u64,
    pub reason: String,
}

/// Accumulates rejected rows across parsers; serialized as tab-separated
/// (file, line, reason).
#[derive(Debug, Default)]
pub struct RejectLog {
    pub entries: Vec<RejectEntry>,
}

impl RejectLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, file: &str, line: u64, reason: impl Into<String>) {
        self.entries.push(RejectEntry {
            file: file.to_string(),
            line,
            reason: reason.into(),
        });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn write_tsv(&self, path: &Path) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(File::create(path)?);
        for e in &self.entries {
            writeln!(out, "{}\t{}\t{}", e.file, e.line, e.reason)?;
        }
        out.flush()
    }
}

/// Source-vocabulary filter; defaults to SNOMED CT (US edition).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFilter {
    pub vocabs: BTreeSet<String>,
}

impl Default for SourceFilter {
    fn default() -> Self {
        SourceFilter {
            vocabs: BTreeSet::from(["SNOMEDCT_US".to_string()]),
        }
    }
}

impl SourceFilter {
    pub fn accepts(&self, vocab: &str) -> bool {
        self.vocabs.contains(vocab)
    }
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Iterate raw lines, sending UTF-8 decode failures to the reject log.
fn each_line<F>(path: &Path, log: &mut RejectLog, mut f: F) -> std::io::Result<u64>
where
    F: FnMut(u64, &str, &mut RejectLog),
{
    let label = file_label(path);
    let reader = BufReader::new(File::open(path)?);
    let mut line_no = 0u64;
    for raw in reader.split(b'\n') {
        let raw = raw?;
        line_no += 1;
        if raw.is_empty() {
            continue;
        }
        match std::str::from_utf8(&raw) {
            Ok(line) => f(line_no, line.trim_end_matches('\r'), log),
            Err(_) => log.push(&label, line_no, "invalid UTF-8"),
        }
    }
    Ok(line_no)
}

/// Split a pipe-delimited RRF row, dropping the empty field created by the
/// trailing pipe.
fn split_row(line: &str) -> Vec<&str> {
    let mut fields: Vec<&str> = line.split('|').collect();
    if fields.last() == Some(&"") {
        fields.pop();
    }
    fields
}

/// Parse MRCONSO.RRF into concept rows. Rows failing the source-vocabulary
/// filter or carrying a suppression flag are silently filtered; structurally
/// bad rows go to the reject log.
pub fn parse_mrconso(
    path: &Path,
    filter: &SourceFilter,
    log: &mut RejectLog,
) -> std::io::Result<Vec<ConceptRow>> {
    let label = file_label(path);
    let mut rows = Vec::new();
    each_line(path, log, |line_no, line, log| {
        let f = split_row(line);
        if f.len() < 18 {
            log.push(&label, line_no, format!("expected >=18 columns, got {}", f.len()));
            return;
        }
        let (sab, suppress) = (f[11], f[16]);
        if !filter.accepts(sab) || suppress != "N" {
            return;
        }
        let cui: Cui = match f[0].parse() {
            Ok(c) => c,
            Err(_) => {
                log.push(&label, line_no, format!("bad CUI {:?}", f[0]));
                return;
            }
        };
        let surface = f[14].trim();
        if surface.is_empty() {
            log.push(&label, line_no, "empty concept string");
            return;
        }
        rows.push(ConceptRow {
            cui,
            language: f[1].to_string(),
            term_status: f[2].to_string(),
            is_pref: f[6].to_string(),
            source_vocab: sab.to_string(),
            term_type: f[12].to_string(),
            surface: surface.to_string(),
            suppress: suppress.to_string(),
        });
    })?;
    Ok(rows)
}

/// Parse MRSTY.RRF into unique (CUI, TUI) type assignments. TUIs outside the
/// release registry are rejected.
pub fn parse_mrsty(
    path: &Path,
    registry: &TypeRegistry,
    log: &mut RejectLog,
) -> std::io::Result<Vec<TypeAssignment>> {
    let label = file_label(path);
    let mut seen: BTreeSet<(Cui, Tui)> = BTreeSet::new();
    let mut rows = Vec::new();
    each_line(path, log, |line_no, line, log| {
        let f = split_row(line);
        if f.len() < 4 {
            log.push(&label, line_no, format!("expected >=4 columns, got {}", f.len()));
            return;
        }
        let cui: Cui = match f[0].parse() {
            Ok(c) => c,
            Err(_) => {
                log.push(&label, line_no, format!("bad CUI {:?}", f[0]));
                return;
            }
        };
        let tui: Tui = match f[1].parse() {
            Ok(t) => t,
            Err(_) => {
                log.push(&label, line_no, format!("bad TUI {:?}", f[1]));
                return;
            }
        };
        if !registry.is_known(&tui) {
            log.push(&label, line_no, format!("unknown TUI {}", tui));
            return;
        }
        if seen.insert((cui.clone(), tui.clone())) {
            rows.push(TypeAssignment {
                cui,
                tui,
                sty_name: f[3].to_string(),
            });
        }
    })?;
    Ok(rows)
}

/// Parse MRREL.RRF into raw relation rows. Keeps rows whose coarse category
/// is in `rel_filter` (default {RO}) and whose source vocabulary passes the
/// filter; self-loops are dropped. A missing fine relation label (RELA) is
/// preserved as absent for downstream diagnostics.
pub fn parse_mrrel(
    path: &Path,
    rel_filter: &BTreeSet<String>,
    source: &SourceFilter,
    log: &mut RejectLog,
) -> std::io::Result<Vec<RawRelRow>> {
    let label = file_label(path);
    let mut rows = Vec::new();
    each_line(path, log, |line_no, line, log| {
        let f = split_row(line);
        if f.len() < 11 {
            log.push(&label, line_no, format!("expected >=11 columns, got {}", f.len()));
            return;
        }
        let (rel, sab) = (f[3], f[10]);
        if !rel_filter.contains(rel) || !source.accepts(sab) {
            return;
        }
        let cui1: Cui = match f[0].parse() {
            Ok(c) => c,
            Err(_) => {
                log.push(&label, line_no, format!("bad CUI {:?}", f[0]));
                return;
            }
        };
        let cui2: Cui = match f[4].parse() {
            Ok(c) => c,
            Err(_) => {
                log.push(&label, line_no, format!("bad CUI {:?}", f[4]));
                return;
            }
        };
        if cui1 == cui2 {
            return;
        }
        let rela = f[7].trim();
        rows.push(RawRelRow {
            cui1,
            rel: rel.to_string(),
            rela: if rela.is_empty() {
                None
            } else {
                Some(rela.to_string())
            },
            cui2,
            source_vocab: sab.to_string(),
        });
    })?;
    Ok(rows)
}

/// The default coarse-category filter: "has relationship other than
/// synonymous, narrower, or broader".
pub fn default_rel_filter() -> BTreeSet<String> {
    BTreeSet::from(["RO".to_string()])
}
