//! Stage orchestration: parse → build-kg → split → align → emit, plus the
//! audit and score entry points. All randomness flows from one root seed via
//! per-stage derived seeds, so stages are independently re-runnable.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use medalign_core::align::{
    self, assemble_bags, build_positive_pairs, builtin_stoplist, match_sentences, prune_mentions,
    remove_cross_split_mention_overlap, satisfies_type_constraint, Pair,
};
use medalign_core::audit::{audit_overlap, NormalizationMap};
use medalign_core::corpus::dedup_sentences;
use medalign_core::ids::Cui;
use medalign_core::kg::{build_entity_set, canonicalize_triples, retain_active_entities, Entity};
use medalign_core::registry::TypeRegistry;
use medalign_core::rng::{derive_seed, DetRng};
use medalign_core::rows::{ConceptRow, RawRelRow, TypeAssignment};
use medalign_core::score::{
    average_precision, f1_scores, precision_at_k, pr_curve, GoldFacts, Prediction,
    ThresholdPolicy,
};
use medalign_core::split::{
    split_inductive, split_transductive, verify_split, Ratios, SplitError, SplitMode,
};
use medalign_core::stats::{build_manifest, summarize_split, ConfigFingerprint, SplitSummary};
use medalign_core::RelationCanonMap;

use crate::formats;
use crate::manifest::Manifest;
use crate::rrf::{self, RejectLog, SourceFilter};

/// Environment variable overriding where intermediate stage files are kept.
pub const SCRATCH_ENV: &str = "MEDALIGN_SCRATCH";

/// Fully resolved pipeline configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub seed: u64,
    pub mode: String,
    pub ratios: [f64; 3],
    pub na_target: f64,
    pub prune_threshold: u64,
    pub out_dir: PathBuf,
    pub mrconso: Option<PathBuf>,
    pub mrsty: Option<PathBuf>,
    pub mrrel: Option<PathBuf>,
    pub sentences: Option<PathBuf>,
    pub stoplist: Option<PathBuf>,
    pub source_vocabs: Vec<String>,
    /// Worker cap; execution is sequential, the flag is accepted as an upper
    /// bound so configs stay portable.
    pub threads: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            mode: "inductive".to_string(),
            ratios: [0.7, 0.1, 0.2],
            na_target: 0.9,
            prune_threshold: 10_000,
            out_dir: PathBuf::from("."),
            mrconso: None,
            mrsty: None,
            mrrel: None,
            sentences: None,
            stoplist: None,
            source_vocabs: vec!["SNOMEDCT_US".to_string()],
            threads: 1,
        }
    }
}

impl PipelineConfig {
    pub fn split_mode(&self) -> Result<SplitMode> {
        match self.mode.as_str() {
            "inductive" => Ok(SplitMode::Inductive),
            "transductive" => Ok(SplitMode::Transductive),
            other => bail!("unknown split mode `{other}` (use inductive or transductive)"),
        }
    }

    pub fn ratios(&self) -> Result<Ratios> {
        Ok(Ratios::new(self.ratios[0], self.ratios[1], self.ratios[2])?)
    }

    /// Directory for intermediate files; honors the scratch override.
    pub fn scratch_dir(&self) -> PathBuf {
        std::env::var_os(SCRATCH_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| self.out_dir.clone())
    }

    fn scratch(&self, name: &str) -> PathBuf {
        self.scratch_dir().join(name)
    }

    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn require(&self, field: Option<&PathBuf>, name: &str) -> Result<PathBuf> {
        let path = field.ok_or_else(|| anyhow::anyhow!("config is missing `{name}`"))?;
        if !path.exists() {
            bail!("missing input file {} (config `{name}`)", path.display());
        }
        Ok(path.clone())
    }
}

/// Pipeline stages in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Parse,
    Kg,
    Split,
    Align,
    Emit,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Parse, Stage::Kg, Stage::Split, Stage::Align, Stage::Emit];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Parse => "parse",
            Stage::Kg => "build-kg",
            Stage::Split => "split",
            Stage::Align => "align",
            Stage::Emit => "emit",
        }
    }
}

/// Exit-code classification for errors.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.downcast_ref::<SplitError>().is_some()
            || cause.downcast_ref::<align::AlignError>().is_some()
        {
            return 3;
        }
    }
    2
}

fn ensure_dirs(cfg: &PipelineConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    std::fs::create_dir_all(cfg.scratch_dir())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Intermediate row tables (tab-separated).

fn write_concepts(path: &Path, rows: &[ConceptRow]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.cui, r.language, r.term_status, r.is_pref, r.source_vocab, r.term_type, r.surface,
            r.suppress
        )?;
    }
    out.flush()?;
    Ok(())
}

fn read_concepts(path: &Path) -> Result<Vec<ConceptRow>> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 8 {
            bail!("{}:{}: expected 8 columns", path.display(), i + 1);
        }
        rows.push(ConceptRow {
            cui: f[0].parse()?,
            language: f[1].to_string(),
            term_status: f[2].to_string(),
            is_pref: f[3].to_string(),
            source_vocab: f[4].to_string(),
            term_type: f[5].to_string(),
            surface: f[6].to_string(),
            suppress: f[7].to_string(),
        });
    }
    Ok(rows)
}

fn write_types(path: &Path, rows: &[TypeAssignment]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in rows {
        writeln!(out, "{}\t{}\t{}", r.cui, r.tui, r.sty_name)?;
    }
    out.flush()?;
    Ok(())
}

fn read_types(path: &Path) -> Result<Vec<TypeAssignment>> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            bail!("{}:{}: expected 3 columns", path.display(), i + 1);
        }
        rows.push(TypeAssignment {
            cui: f[0].parse()?,
            tui: f[1].parse()?,
            sty_name: f[2].to_string(),
        });
    }
    Ok(rows)
}

fn write_raw_rels(path: &Path, rows: &[RawRelRow]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.cui1,
            r.rel,
            r.rela.as_deref().unwrap_or(""),
            r.cui2,
            r.source_vocab
        )?;
    }
    out.flush()?;
    Ok(())
}

fn read_raw_rels(path: &Path) -> Result<Vec<RawRelRow>> {
    let reader = BufReader::new(
        File::open(path).with_context(|| format!("missing input file {}", path.display()))?,
    );
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            bail!("{}:{}: expected 5 columns", path.display(), i + 1);
        }
        rows.push(RawRelRow {
            cui1: f[0].parse()?,
            rel: f[1].to_string(),
            rela: if f[2].is_empty() {
                None
            } else {
                Some(f[2].to_string())
            },
            cui2: f[3].parse()?,
            source_vocab: f[4].to_string(),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Stages.

pub fn run_parse(cfg: &PipelineConfig, manifest: &mut Manifest) -> Result<()> {
    ensure_dirs(cfg)?;
    let mrconso = cfg.require(cfg.mrconso.as_ref(), "mrconso")?;
    let mrsty = cfg.require(cfg.mrsty.as_ref(), "mrsty")?;
    let mrrel = cfg.require(cfg.mrrel.as_ref(), "mrrel")?;

    let filter = SourceFilter {
        vocabs: cfg.source_vocabs.iter().cloned().collect(),
    };
    let registry = TypeRegistry::builtin();
    let mut log = RejectLog::new();
    let concepts = rrf::parse_mrconso(&mrconso, &filter, &mut log)?;
    let types = rrf::parse_mrsty(&mrsty, &registry, &mut log)?;
    let rels = rrf::parse_mrrel(&mrrel, &rrf::default_rel_filter(), &filter, &mut log)?;

    let concepts_out = cfg.scratch("concepts.tsv");
    let types_out = cfg.scratch("types.tsv");
    let rels_out = cfg.scratch("relations_raw.tsv");
    let rejects_out = cfg.scratch("rejects.tsv");
    write_concepts(&concepts_out, &concepts)?;
    write_types(&types_out, &types)?;
    write_raw_rels(&rels_out, &rels)?;
    log.write_tsv(&rejects_out)?;

    log::info!(
        "parse: {} concepts, {} type assignments, {} relation rows, {} rejects",
        concepts.len(),
        types.len(),
        rels.len(),
        log.len()
    );
    manifest.record(
        Stage::Parse.name(),
        derive_seed(cfg.seed, "parse"),
        &[mrconso, mrsty, mrrel],
        &[concepts_out, types_out, rels_out, rejects_out],
    )
}

pub fn run_build_kg(cfg: &PipelineConfig, manifest: &mut Manifest) -> Result<()> {
    ensure_dirs(cfg)?;
    let concepts_in = cfg.scratch("concepts.tsv");
    let types_in = cfg.scratch("types.tsv");
    let rels_in = cfg.scratch("relations_raw.tsv");
    let concepts = read_concepts(&concepts_in)?;
    let types = read_types(&types_in)?;
    let rels = read_raw_rels(&rels_in)?;

    let registry = TypeRegistry::builtin();
    let whitelist = registry.whitelist();
    let canon = RelationCanonMap::builtin();
    let (mut entities, ediag) = build_entity_set(&concepts, &types, &registry, &whitelist);
    let (triples, tdiag) = canonicalize_triples(rels, &entities, &canon);
    retain_active_entities(&mut entities, &triples);

    let kg_out = cfg.out("kg.tsv");
    let entities_out = cfg.out("entities.tsv");
    formats::write_triples(&kg_out, &triples)?;
    formats::write_entities(&entities_out, &entities)?;

    log::info!(
        "build-kg: {} triples over {} entities (dropped: {} untyped, {} unwhitelisted, {} missing rela, {} excluded, {} unknown rela, {} missing endpoints)",
        triples.len(),
        entities.len(),
        ediag.untyped,
        ediag.no_whitelisted_type,
        tdiag.missing_rela,
        tdiag.excluded,
        tdiag.unknown_rela,
        tdiag.missing_endpoint
    );
    manifest.record(
        Stage::Kg.name(),
        derive_seed(cfg.seed, "build-kg"),
        &[concepts_in, types_in, rels_in],
        &[kg_out, entities_out],
    )
}

pub fn run_split(cfg: &PipelineConfig, manifest: &mut Manifest) -> Result<()> {
    ensure_dirs(cfg)?;
    let kg_in = cfg.out("kg.tsv");
    let kg = formats::read_triples(&kg_in)?;
    let ratios = cfg.ratios()?;
    let seed = derive_seed(cfg.seed, "split");
    let split = match cfg.split_mode()? {
        SplitMode::Transductive => split_transductive(&kg, ratios, seed)?,
        SplitMode::Inductive => split_inductive(&kg, ratios, seed)?,
    };
    let canon = RelationCanonMap::builtin();
    let report = verify_split(&split, &canon);
    if !report.pass {
        bail!("split verification failed: {report:?}");
    }

    let train_out = cfg.out("train_triples.tsv");
    let valid_out = cfg.out("valid_triples.tsv");
    let test_out = cfg.out("test_triples.tsv");
    formats::write_triples(&train_out, &split.train)?;
    formats::write_triples(&valid_out, &split.valid)?;
    formats::write_triples(&test_out, &split.test)?;
    let report_out = cfg.out("split_report.json");
    let report_json = json!({
        "mode": cfg.mode,
        "sizes": report.sizes,
        "direct_overlap": report.direct.total(),
        "inverse_aware_overlap": report.inverse_aware.total(),
        "entity_violations": report.entity_violations,
        "pass": report.pass,
    });
    std::fs::write(&report_out, format!("{:#}\n", report_json))?;

    log::info!(
        "split ({}): train {} / valid {} / test {}",
        cfg.mode,
        split.train.len(),
        split.valid.len(),
        split.test.len()
    );
    manifest.record(
        Stage::Split.name(),
        seed,
        &[kg_in],
        &[train_out, valid_out, test_out, report_out],
    )
}

/// Ordered CUI-pair co-occurrence counts over deduplicated sentences: how
/// many instances a pair would yield if selected.
fn co_occurrence_counts(
    sentences: &[medalign_core::corpus::LinkedSentence],
) -> BTreeMap<Pair, u64> {
    let mut counts: BTreeMap<Pair, u64> = BTreeMap::new();
    for s in sentences {
        let mut seen: BTreeSet<Pair> = BTreeSet::new();
        for head in &s.mentions {
            for tail in &s.mentions {
                if head.cui == tail.cui {
                    continue;
                }
                let pair = (head.cui.clone(), tail.cui.clone());
                if seen.insert(pair.clone()) {
                    *counts.entry(pair).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

/// Select unrelated pairs for one split until the projected NA instance
/// count reaches `needed`, drawing candidates from sentence-co-occurring
/// pairs that satisfy the role and type constraints and are claimed by no
/// other split. Seeded and deterministic.
#[allow(clippy::too_many_arguments)]
fn select_negatives(
    index: &align::TypeRoleIndex,
    entities: &BTreeMap<Cui, Entity>,
    global_positives: &BTreeSet<Pair>,
    used: &BTreeSet<Pair>,
    co_counts: &BTreeMap<Pair, u64>,
    seed: u64,
    needed: u64,
) -> BTreeSet<Pair> {
    let mut candidates: Vec<(&Pair, u64)> = co_counts
        .iter()
        .filter(|(pair, _)| {
            let (h, t) = pair;
            if global_positives.contains(pair) || used.contains(pair) {
                return false;
            }
            if !index.head_roles.contains(h) || !index.tail_roles.contains(t) {
                return false;
            }
            let (Some(he), Some(te)) = (entities.get(h), entities.get(t)) else {
                return false;
            };
            satisfies_type_constraint(he, te, &index.type_pairs)
        })
        .map(|(pair, count)| (pair, *count))
        .collect();
    let mut rng = DetRng::from_seed(seed);
    rng.shuffle(&mut candidates);

    let mut chosen = BTreeSet::new();
    let mut projected = 0u64;
    for (pair, count) in candidates {
        if projected >= needed {
            break;
        }
        chosen.insert(pair.clone());
        projected += count;
    }
    chosen
}

#[derive(Debug, Serialize)]
struct AlignSplitReport {
    split: String,
    positive_pairs: usize,
    negative_pairs: usize,
    instances: usize,
    na_fraction: f64,
    pruned_instances: u64,
    bags: usize,
}

pub fn run_align(cfg: &PipelineConfig, manifest: &mut Manifest) -> Result<()> {
    ensure_dirs(cfg)?;
    let sentences_in = cfg.require(cfg.sentences.as_ref(), "sentences")?;
    let entities_in = cfg.out("entities.tsv");
    let split_files = [
        ("train", cfg.out("train_triples.tsv")),
        ("valid", cfg.out("valid_triples.tsv")),
        ("test", cfg.out("test_triples.tsv")),
    ];

    let entities = formats::read_entities(&entities_in)?;
    let mut log = RejectLog::new();
    let sentences = dedup_sentences(formats::read_linked_sentences(&sentences_in, &mut log)?);
    let stoplist: BTreeSet<String> = match &cfg.stoplist {
        Some(path) => formats::read_stoplist(path)?,
        None => builtin_stoplist(),
    };

    // Per-split positives and the all-split related-pair set.
    let mut splits = Vec::new();
    let mut global_positives: BTreeSet<Pair> = BTreeSet::new();
    for (name, path) in &split_files {
        let triples = formats::read_triples(path)?;
        let (positives, index) = build_positive_pairs(&triples, &entities);
        global_positives.extend(positives.pairs().cloned());
        splits.push((*name, positives, index));
    }

    let co_counts = co_occurrence_counts(&sentences);
    let empty: BTreeSet<Pair> = BTreeSet::new();
    let mut used: BTreeSet<Pair> = BTreeSet::new();
    let mut per_split_instances = Vec::new();
    let mut reports = Vec::new();
    for (name, positives, index) in &splits {
        // How many NA instances hit the target fraction, given the split's
        // positive instance volume?
        let positive_instances = match_sentences(positives, &empty, &sentences);
        let p = positive_instances.len() as f64;
        let t = cfg.na_target.clamp(0.0, 0.999);
        let needed = if t <= 0.0 {
            0
        } else {
            (p * t / (1.0 - t)).ceil() as u64
        };
        let negatives = select_negatives(
            index,
            &entities,
            &global_positives,
            &used,
            &co_counts,
            derive_seed(cfg.seed, &format!("align.negatives.{name}")),
            needed,
        );
        used.extend(negatives.iter().cloned());
        let instances = match_sentences(positives, &negatives, &sentences);
        per_split_instances.push((name.to_string(), positives.len(), negatives.len(), instances));
    }

    // Pruning, then cross-split mention-overlap removal (train > valid > test).
    let mut pruned = Vec::new();
    for (name, n_pos, n_neg, instances) in per_split_instances {
        let (kept, stats) = prune_mentions(instances, cfg.prune_threshold, &stoplist, &entities);
        pruned.push((name, n_pos, n_neg, stats, kept));
    }
    let [train_entry, valid_entry, test_entry]: [_; 3] = pruned
        .try_into()
        .map_err(|_| anyhow::anyhow!("expected exactly 3 splits"))?;
    let (train, valid, test, overlap_removed) = remove_cross_split_mention_overlap(
        train_entry.4.clone(),
        valid_entry.4.clone(),
        test_entry.4.clone(),
    );
    log::info!("align: removed {overlap_removed} cross-split mention-overlap instances");

    let final_splits = [
        (train_entry, train),
        (valid_entry, valid),
        (test_entry, test),
    ];
    let mut outputs = Vec::new();
    for ((name, n_pos, n_neg, prune_stats, _), instances) in final_splits {
        let (bags, na_fraction) = assemble_bags(instances.clone())?;
        reports.push(AlignSplitReport {
            split: name.clone(),
            positive_pairs: n_pos,
            negative_pairs: n_neg,
            instances: instances.len(),
            na_fraction,
            pruned_instances: prune_stats.removed_instances,
            bags: bags.len(),
        });
        let out = cfg.scratch(&format!("align_{name}.txt"));
        formats::write_instances(&out, &instances)?;
        outputs.push(out);
    }

    let report_out = cfg.scratch("align_report.json");
    let report_json = json!({
        "splits": reports,
        "overlap_removed": overlap_removed,
        "sentence_rejects": log.len(),
    });
    std::fs::write(&report_out, format!("{:#}\n", report_json))?;
    outputs.push(report_out);

    let mut inputs = vec![sentences_in, entities_in];
    inputs.extend(split_files.into_iter().map(|(_, p)| p));
    manifest.record(
        Stage::Align.name(),
        derive_seed(cfg.seed, "align"),
        &inputs,
        &outputs,
    )
}

pub fn run_emit(cfg: &PipelineConfig, manifest: &mut Manifest) -> Result<()> {
    ensure_dirs(cfg)?;
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut split_instances = Vec::new();
    for name in ["train", "valid", "test"] {
        let input = cfg.scratch(&format!("align_{name}.txt"));
        let instances = formats::read_instances(&input)?;
        let out = cfg.out(&format!("{name}.txt"));
        formats::write_instances(&out, &instances)?;
        inputs.push(input);
        outputs.push(out);
        split_instances.push((name.to_string(), instances));
    }

    let rel_map = formats::rel2id(&[
        &split_instances[0].1,
        &split_instances[1].1,
        &split_instances[2].1,
    ]);
    let rel2id_out = cfg.out("rel2id.json");
    formats::write_rel2id(&rel2id_out, &rel_map)?;
    outputs.push(rel2id_out);

    let entities = formats::read_entities(&cfg.out("entities.tsv")).unwrap_or_default();
    let fingerprint = ConfigFingerprint {
        seed: cfg.seed,
        ratios: cfg.ratios()?,
        na_target: cfg.na_target,
        prune_threshold: cfg.prune_threshold,
    };
    let stats = build_manifest(&split_instances, &entities, fingerprint);
    let stats_out = cfg.out("stats.json");
    std::fs::write(&stats_out, format!("{:#}\n", dataset_manifest_json(&stats)))?;
    outputs.push(stats_out);

    manifest.record(
        Stage::Emit.name(),
        derive_seed(cfg.seed, "emit"),
        &inputs,
        &outputs,
    )
}

fn split_summary_json(s: &SplitSummary) -> serde_json::Value {
    json!({
        "split": s.name,
        "instances": s.instances,
        "facts": s.facts,
        "bags": s.bags,
        "instances_per_bag": s.instances_per_bag,
        "na_pct": s.na_pct,
    })
}

pub fn dataset_manifest_json(m: &medalign_core::stats::DatasetManifest) -> serde_json::Value {
    json!({
        "splits": m.splits.iter().map(split_summary_json).collect::<Vec<_>>(),
        "entities": m.entities,
        "relations": m.relations,
        "semantic_types": m.semantic_types,
        "semantic_groups": m.semantic_groups,
        "config": {
            "seed": m.config.seed,
            "ratios": [m.config.ratios.train, m.config.ratios.valid, m.config.ratios.test],
            "na_target": m.config.na_target,
            "prune_threshold": m.config.prune_threshold,
        },
    })
}

/// Run the requested stages in dependency order and save the manifest.
pub fn run_stages(cfg: &PipelineConfig, stages: &[Stage]) -> Result<()> {
    ensure_dirs(cfg)?;
    let manifest_path = cfg.out("manifest.json");
    let mut manifest = Manifest::load(&manifest_path).unwrap_or_else(|_| Manifest::new(cfg.seed));
    manifest.root_seed = cfg.seed;
    for stage in Stage::ALL {
        if !stages.contains(&stage) {
            continue;
        }
        let result = match stage {
            Stage::Parse => run_parse(cfg, &mut manifest),
            Stage::Kg => run_build_kg(cfg, &mut manifest),
            Stage::Split => run_split(cfg, &mut manifest),
            Stage::Align => run_align(cfg, &mut manifest),
            Stage::Emit => run_emit(cfg, &mut manifest),
        };
        result.with_context(|| format!("stage `{}` failed", stage.name()))?;
        manifest.save(&manifest_path)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Audit and score entry points.

pub fn run_audit(
    train: &Path,
    evals: &[PathBuf],
    norm_map: Option<&Path>,
    out: Option<&Path>,
) -> Result<serde_json::Value> {
    let train_triples = formats::read_labeled_triples(train)?;
    let mut eval_sets = Vec::new();
    for path in evals {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        eval_sets.push((name, formats::read_labeled_triples(path)?));
    }
    let norm = match norm_map {
        Some(path) => formats::read_normalization_map(path)?,
        None => NormalizationMap::identity(),
    };
    let inverse_map = formats::builtin_inverse_map();
    let report = audit_overlap(&train_triples, &eval_sets, &norm, &inverse_map);

    let value = json!({
        "train_total": report.train_total,
        "train_unmapped": report.train_unmapped,
        "clean": report.clean(),
        "evals": report.evals.iter().map(|e| json!({
            "name": e.name,
            "total": e.total,
            "unmapped": e.unmapped,
            "direct": e.direct,
            "inverse_aware": e.inverse_aware,
            "direct_pct": e.direct_pct,
            "inverse_aware_pct": e.inverse_aware_pct,
        })).collect::<Vec<_>>(),
    });
    if let Some(path) = out {
        std::fs::write(path, format!("{:#}\n", value))?;
    }
    Ok(value)
}

pub fn run_score(
    predictions: &Path,
    gold_path: &Path,
    ks: &[usize],
    out: Option<&Path>,
) -> Result<serde_json::Value> {
    let preds: Vec<Prediction> = formats::read_predictions(predictions)?;
    let gold: GoldFacts = formats::read_gold_facts(gold_path)?;
    if gold.is_empty() {
        bail!("gold fact file {} is empty", gold_path.display());
    }
    let curve = pr_curve(&preds, &gold);
    let ap = average_precision(&preds, &gold);
    let f1 = f1_scores(&preds, &gold, ThresholdPolicy::MaxMicroF1);
    let value = json!({
        "auc": ap,
        "curve_points": curve.len(),
        "precision_at": ks.iter().map(|k| json!({
            "k": k,
            "precision": precision_at_k(&preds, &gold, *k),
        })).collect::<Vec<_>>(),
        "micro_f1": f1.micro,
        "macro_f1": f1.macro_,
        "f1_cutoff_rank": f1.cutoff_rank,
        "f1_threshold_score": f1.threshold_score,
    });
    if let Some(path) = out {
        std::fs::write(path, format!("{:#}\n", value))?;
    }
    Ok(value)
}

pub fn run_stats(instance_files: &[(String, PathBuf)], out: Option<&Path>) -> Result<serde_json::Value> {
    let mut summaries = Vec::new();
    for (name, path) in instance_files {
        let instances = formats::read_instances(path)?;
        summaries.push(summarize_split(name.clone(), &instances));
    }
    let value = json!({
        "splits": summaries.iter().map(split_summary_json).collect::<Vec<_>>(),
    });
    if let Some(path) = out {
        std::fs::write(path, format!("{:#}\n", value))?;
    }
    Ok(value)
}
