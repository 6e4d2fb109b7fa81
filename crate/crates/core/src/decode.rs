//! Tag sequences to entity spans and back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tag::{Prefix, Tag, TaggedSequence, TaggingScheme};

/// Half-open token span `[start, end)` with its type and covered text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub label: String,
    #[serde(default)]
    pub text: String,
}

impl EntitySpan {
    pub fn new(start: usize, end: usize, label: impl Into<String>) -> Self {
        Self {
            start,
            end,
            label: label.into(),
            text: String::new(),
        }
    }

    /// Same start, end and type; text is ignored.
    pub fn same_entity(&self, other: &EntitySpan) -> bool {
        self.start == other.start && self.end == other.end && self.label == other.label
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// How to treat illegal transitions in model output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepairPolicy {
    /// Orphan `I`/`E` tags open (or form) a span; unterminated BIOES runs are kept.
    #[default]
    Conservative,
    /// Orphan runs and unterminated BIOES runs are dropped.
    Strict,
}

impl std::str::FromStr for RepairPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "conservative" => Ok(Self::Conservative),
            "strict" => Ok(Self::Strict),
            other => Err(format!("unknown repair policy {other:?}")),
        }
    }
}

struct Open<'a> {
    start: usize,
    label: &'a str,
    /// False for a run that began with an orphan tag under `Strict`.
    keep: bool,
}

/// Decodes spans, sorted by start and non-overlapping.
pub fn decode_entities(
    seq: &TaggedSequence,
    scheme: TaggingScheme,
    policy: RepairPolicy,
) -> Result<Vec<EntitySpan>> {
    let conservative = policy == RepairPolicy::Conservative;
    let tokens = seq.tokens();
    let mut spans = Vec::new();
    let mut emit = |start: usize, end: usize, label: &str| {
        let text = tokens.as_slice()[start..end].join(" ");
        spans.push(EntitySpan {
            start,
            end,
            label: label.to_owned(),
            text,
        });
    };
    // A run that ends without an explicit terminator: always complete under BIO,
    // unterminated under BIOES.
    let close = |open: Option<Open<'_>>, end: usize, emit: &mut dyn FnMut(usize, usize, &str)| {
        if let Some(o) = open {
            let complete = scheme == TaggingScheme::Bio || conservative;
            if o.keep && complete {
                emit(o.start, end, o.label);
            }
        }
    };

    let mut open: Option<Open<'_>> = None;
    for (i, tag) in seq.tags().iter().enumerate() {
        let (prefix, label) = match tag {
            Tag::Outside => {
                close(open.take(), i, &mut emit);
                continue;
            }
            Tag::Entity { prefix, label } => (*prefix, label.as_str()),
        };
        if !scheme.allows(prefix) {
            return Err(Error::InvalidLabel {
                label: tag.to_string(),
                reason: "tag prefix not allowed by the tagging scheme",
            });
        }
        let continues = open.as_ref().is_some_and(|o| o.label == label);
        match prefix {
            Prefix::B => {
                close(open.take(), i, &mut emit);
                open = Some(Open {
                    start: i,
                    label,
                    keep: true,
                });
            }
            Prefix::I if continues => {}
            Prefix::I => {
                close(open.take(), i, &mut emit);
                open = Some(Open {
                    start: i,
                    label,
                    keep: conservative,
                });
            }
            Prefix::E if continues => {
                let o = open.take().expect("continues implies an open run");
                if o.keep {
                    emit(o.start, i + 1, o.label);
                }
            }
            Prefix::E => {
                close(open.take(), i, &mut emit);
                if conservative {
                    emit(i, i + 1, label);
                }
            }
            Prefix::S => {
                close(open.take(), i, &mut emit);
                emit(i, i + 1, label);
            }
        }
    }
    close(open.take(), seq.len(), &mut emit);
    Ok(spans)
}

/// Reads gold spans from a sequence tagged in either scheme. BIOES decoding with
/// the conservative policy reads every legal BIO sequence exactly as BIO would.
pub fn gold_spans(seq: &TaggedSequence) -> Vec<EntitySpan> {
    decode_entities(seq, TaggingScheme::Bioes, RepairPolicy::Conservative)
        .expect("every prefix is allowed under BIOES")
}

/// Inverse of [`decode_entities`] for legal span sets.
pub fn spans_to_tags(spans: &[EntitySpan], n: usize, scheme: TaggingScheme) -> Result<Vec<Tag>> {
    let mut tags = vec![Tag::Outside; n];
    let mut prev_end = 0;
    for (k, s) in spans.iter().enumerate() {
        if s.start >= s.end || s.end > n {
            return Err(Error::SpanOutOfRange {
                start: s.start,
                end: s.end,
                len: n,
            });
        }
        if k > 0 && s.start < prev_end {
            return Err(Error::SpanOverlap {
                start: s.start,
                end: s.end,
                prev_end,
            });
        }
        prev_end = s.end;
        let label = &s.label;
        match scheme {
            TaggingScheme::Bio => {
                tags[s.start] = Tag::entity(Prefix::B, label.clone());
                for t in &mut tags[s.start + 1..s.end] {
                    *t = Tag::entity(Prefix::I, label.clone());
                }
            }
            TaggingScheme::Bioes if s.end - s.start == 1 => {
                tags[s.start] = Tag::entity(Prefix::S, label.clone());
            }
            TaggingScheme::Bioes => {
                tags[s.start] = Tag::entity(Prefix::B, label.clone());
                for t in &mut tags[s.start + 1..s.end - 1] {
                    *t = Tag::entity(Prefix::I, label.clone());
                }
                tags[s.end - 1] = Tag::entity(Prefix::E, label.clone());
            }
        }
    }
    Ok(tags)
}
