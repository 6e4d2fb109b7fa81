//! Instruction-tuning instances: the instruction text, the target strings in the
//! entity-centric and token-by-token variants, and label-set regularization
//! (class-order shuffling and external type sampling).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decode::{gold_spans, spans_to_tags, EntitySpan};
use crate::error::{Error, Result};
use crate::tag::{LabelSet, TaggedSequence, TaggingScheme};

pub const DEFAULT_GAP_MARKER: &str = "...";

/// How many non-entity neighbours an entity-centric target keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextLen {
    Tokens(usize),
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetVariant {
    /// `[span](Type)` mentions with surrounding context.
    EntityCentric {
        context: ContextLen,
        gap_marker: String,
    },
    /// `token(TAG)` for every token.
    TokenByToken(TaggingScheme),
}

impl TargetVariant {
    pub fn entity_centric(context: ContextLen) -> Self {
        TargetVariant::EntityCentric {
            context,
            gap_marker: DEFAULT_GAP_MARKER.to_owned(),
        }
    }
}

impl std::str::FromStr for TargetVariant {
    type Err = String;

    /// `bio`, `bioes`, `entity:<k>` or `entity:full`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Some(ctx) = s.strip_prefix("entity:") {
            let context = if ctx == "full" {
                ContextLen::Full
            } else {
                ContextLen::Tokens(
                    ctx.parse()
                        .map_err(|_| format!("bad context length {ctx:?}"))?,
                )
            };
            return Ok(TargetVariant::entity_centric(context));
        }
        s.parse().map(TargetVariant::TokenByToken)
    }
}

fn check_parens(seq: &TaggedSequence) -> Result<()> {
    match seq.tokens().iter().find(|t| t.contains(['(', ')'])) {
        Some(t) => Err(Error::InvalidToken {
            token: t.clone(),
            reason: "parentheses are not allowed in target tokens",
        }),
        None => Ok(()),
    }
}

/// Renders the training target for `seq`. The gold tags may be in either scheme.
pub fn build_target(seq: &TaggedSequence, variant: &TargetVariant) -> Result<String> {
    check_parens(seq)?;
    let spans = gold_spans(seq);
    if let Some(bad) = spans.iter().find(|s| s.label.contains(['(', ')'])) {
        return Err(Error::InvalidLabel {
            label: bad.label.clone(),
            reason: "parentheses are not allowed in labels",
        });
    }
    let tokens = seq.tokens().as_slice();
    match variant {
        TargetVariant::TokenByToken(scheme) => {
            let tags = spans_to_tags(&spans, tokens.len(), *scheme)?;
            Ok(tokens
                .iter()
                .zip(&tags)
                .map(|(tok, tag)| format!("{tok}({tag})"))
                .collect::<Vec<_>>()
                .join(" "))
        }
        TargetVariant::EntityCentric {
            context,
            gap_marker,
        } => Ok(entity_centric(tokens, &spans, *context, gap_marker)),
    }
}

fn entity_centric(tokens: &[String], spans: &[EntitySpan], ctx: ContextLen, gap: &str) -> String {
    let n = tokens.len();
    let windows: Vec<(usize, usize)> = match ctx {
        ContextLen::Full => vec![(0, n)],
        ContextLen::Tokens(k) => {
            let mut merged: Vec<(usize, usize)> = Vec::new();
            for s in spans {
                let w = (s.start.saturating_sub(k), (s.end + k).min(n));
                match merged.last_mut() {
                    Some(last) if w.0 <= last.1 => last.1 = last.1.max(w.1),
                    _ => merged.push(w),
                }
            }
            merged
        }
    };

    let mut parts: Vec<String> = Vec::new();
    let mut spans = spans.iter().peekable();
    for (w, &(lo, hi)) in windows.iter().enumerate() {
        // Markers only between windows: with no context the mentions are simply listed.
        if w > 0 && ctx != ContextLen::Tokens(0) {
            parts.push(gap.to_owned());
        }
        let mut i = lo;
        while i < hi {
            match spans.peek() {
                Some(s) if s.start == i => {
                    parts.push(format!(
                        "[{}]({})",
                        tokens[s.start..s.end].join(" "),
                        s.label
                    ));
                    i = s.end;
                    spans.next();
                }
                _ => {
                    parts.push(tokens[i].clone());
                    i += 1;
                }
            }
        }
    }
    parts.join(" ")
}

fn label_list(labels: &LabelSet) -> String {
    let names = labels.as_slice();
    if names.is_empty() {
        return "O".to_owned();
    }
    format!("{} and O", names.join(", "))
}

/// Task description and guideline. Byte-stable for fixed inputs; only the label
/// list changes with the label order.
pub fn build_instruction(labels: &LabelSet, scheme: TaggingScheme) -> String {
    let mut out = String::new();
    out.push_str("Please analyze the sentence provided, identifying the entity type for each word on a token-by-token basis.\n");
    out.push_str("Output format is: word_1(label_1), word_2(label_2), ...\n");
    out.push_str(&format!(
        "We'll use the {}-format to label the entities, where:\n",
        scheme.name()
    ));
    out.push_str("1. B- (Begin) indicates the start of a named entity.\n");
    out.push_str(
        "2. I- (Inside) is used for words within a named entity but are not the first word.\n",
    );
    match scheme {
        TaggingScheme::Bio => {
            out.push_str("3. O (Outside) denotes words not part of a named entity.\n");
        }
        TaggingScheme::Bioes => {
            out.push_str(
                "3. E- (End) is used for the last word of a named entity spanning several words.\n",
            );
            out.push_str(
                "4. S- (Single) is used for a named entity consisting of a single word.\n",
            );
            out.push_str("5. O (Outside) denotes words not part of a named entity.\n");
        }
    }
    out.push_str(&format!(
        "Use the specific entity tags: {}.\n",
        label_list(labels)
    ));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    pub shuffle_seed: u64,
    /// Global type vocabulary externals are drawn from.
    pub external_pool: LabelSet,
    pub external_count: usize,
}

impl SamplerConfig {
    /// Twice the number of present types, capped so the prompt lists at most 10.
    pub fn default_external_count(present: usize) -> usize {
        (2 * present).min(10usize.saturating_sub(present))
    }
}

/// Present types plus up to `external_count` absent ones from the pool, in a
/// seeded random order.
pub fn sample_label_set(present: &LabelSet, cfg: &SamplerConfig) -> LabelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.shuffle_seed);
    let candidates: Vec<&String> = cfg
        .external_pool
        .iter()
        .filter(|t| !present.contains(t))
        .collect();
    let mut out: Vec<String> = present.iter().cloned().collect();
    out.extend(
        candidates
            .choose_multiple(&mut rng, cfg.external_count)
            .map(|t| (*t).clone()),
    );
    out.shuffle(&mut rng);
    LabelSet::new(out).expect("union of two valid, disjoint label sets")
}

/// One line of an instruction-tuning JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub id: String,
    pub instruction: String,
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptInstance {
    pub instruction: String,
    pub input_line: String,
    pub target_line: String,
    pub labels_used: LabelSet,
}

impl PromptInstance {
    pub fn build(
        seq: &TaggedSequence,
        labels: LabelSet,
        variant: &TargetVariant,
        instruction_scheme: TaggingScheme,
    ) -> Result<Self> {
        Ok(Self {
            instruction: build_instruction(&labels, instruction_scheme),
            input_line: seq.tokens().join(" "),
            target_line: build_target(seq, variant)?,
            labels_used: labels,
        })
    }

    pub fn into_record(self, id: impl Into<String>) -> PromptRecord {
        PromptRecord {
            id: id.into(),
            instruction: self.instruction,
            input: self.input_line,
            output: self.target_line,
        }
    }
}
