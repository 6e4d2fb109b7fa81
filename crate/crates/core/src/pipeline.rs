//! Generation string in, structured entities out: parse, align, project, decode.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::align::{align_hierarchical, project_labels, Normalizer, Tier};
use crate::dataset::InstanceRecord;
use crate::decode::{decode_entities, gold_spans, EntitySpan, RepairPolicy};
use crate::error::{Error, Result};
use crate::eval::{EvalReport, Tally};
use crate::genparse::parse_generation;
use crate::tag::{LabelSet, TaggingScheme, TokenSequence};

#[derive(Debug, Clone, Default)]
pub struct ProcessOptions {
    pub scheme: TaggingScheme,
    pub normalizer: Normalizer,
    pub repair: RepairPolicy,
    /// Segments equal to this marker are removed before parsing and counted
    /// separately instead of as malformed.
    pub gap_marker: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordStats {
    pub tier: Option<Tier>,
    pub lcs_length: usize,
    pub unmatched_pred: usize,
    pub unmatched_orig: usize,
    pub unknown_labels: usize,
    pub malformed: usize,
    pub gap_markers: usize,
}

/// One output line of the `process` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessedRecord {
    pub id: String,
    #[serde(default)]
    pub tags: Vec<String>,
    pub entities: Vec<EntitySpan>,
    #[serde(default)]
    pub stats: RecordStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub tags: Vec<String>,
    pub entities: Vec<EntitySpan>,
    pub stats: RecordStats,
}

pub fn extract(
    tokens: &TokenSequence,
    labels: &LabelSet,
    generation: &str,
    opts: &ProcessOptions,
) -> Extraction {
    let mut gap_markers = 0;
    let parsed = match &opts.gap_marker {
        Some(marker) => {
            let kept: Vec<&str> = generation
                .split_whitespace()
                .filter(|seg| {
                    let is_marker = seg == marker;
                    gap_markers += usize::from(is_marker);
                    !is_marker
                })
                .collect();
            parse_generation(&kept.join(" "))
        }
        None => parse_generation(generation),
    };
    let (alignment, align_stats) = align_hierarchical(tokens, &parsed, &opts.normalizer);
    let projection = project_labels(tokens, &parsed, &alignment, labels, opts.scheme);
    let entities = decode_entities(&projection.seq, opts.scheme, opts.repair)
        .expect("projected tags always belong to the scheme");
    Extraction {
        tags: projection.seq.tag_strings(),
        entities,
        stats: RecordStats {
            tier: Some(align_stats.tier),
            lcs_length: align_stats.lcs_length,
            unmatched_pred: align_stats.unmatched_pred,
            unmatched_orig: align_stats.unmatched_orig,
            unknown_labels: projection.unknown_labels,
            malformed: parsed.malformed,
            gap_markers,
        },
    }
}

/// Runs the pipeline on one record. Problems with the record itself are soft
/// failures: all-`O` tags, no entities and a diagnostic.
pub fn process_record(rec: &InstanceRecord, opts: &ProcessOptions) -> ProcessedRecord {
    let soft_fail = |msg: String| ProcessedRecord {
        id: rec.id.clone(),
        tags: vec!["O".to_owned(); rec.tokens.len()],
        entities: Vec::new(),
        stats: RecordStats::default(),
        diagnostic: Some(msg),
    };
    let tokens = match rec.token_sequence() {
        Ok(t) => t,
        Err(e) => return soft_fail(e.to_string()),
    };
    let labels = match rec.labels() {
        Ok(l) => l,
        Err(e) => return soft_fail(e.to_string()),
    };
    let Some(generation) = &rec.generation else {
        return soft_fail("record has no generation".to_owned());
    };
    let ex = extract(&tokens, &labels, generation, opts);
    let diagnostic = (ex.stats.lcs_length == 0 && !tokens.is_empty())
        .then(|| "generation shares no tokens with the input".to_owned());
    ProcessedRecord {
        id: rec.id.clone(),
        tags: ex.tags,
        entities: ex.entities,
        stats: ex.stats,
        diagnostic,
    }
}

/// Scores predictions against gold records, paired by id. Every gold record
/// must carry `gold_tags`, and both sides must hold the same set of ids.
pub fn evaluate(
    gold: &[InstanceRecord],
    pred: &[ProcessedRecord],
    scheme: TaggingScheme,
    per_type: bool,
) -> Result<EvalReport> {
    let mut by_id: HashMap<&str, &ProcessedRecord> = HashMap::with_capacity(pred.len());
    for p in pred {
        if by_id.insert(p.id.as_str(), p).is_some() {
            return Err(Error::DuplicateId(p.id.clone()));
        }
    }
    let mut gold_ids = BTreeSet::new();
    for g in gold {
        if !gold_ids.insert(g.id.as_str()) {
            return Err(Error::DuplicateId(g.id.clone()));
        }
    }
    let missing_pred: Vec<String> = gold
        .iter()
        .filter(|g| !by_id.contains_key(g.id.as_str()))
        .map(|g| g.id.clone())
        .collect();
    let missing_gold: Vec<String> = pred
        .iter()
        .filter(|p| !gold_ids.contains(p.id.as_str()))
        .map(|p| p.id.clone())
        .collect();
    if !missing_pred.is_empty() || !missing_gold.is_empty() {
        return Err(Error::IdMismatch {
            missing_pred,
            missing_gold,
        });
    }

    let mut tally = Tally::default();
    for g in gold {
        let seq = g
            .gold_sequence(scheme)?
            .ok_or_else(|| Error::MissingGold(g.id.clone()))?;
        tally.add_sentence(&gold_spans(&seq), &by_id[g.id.as_str()].entities);
    }
    Ok(tally.report(per_type))
}
