//! Structuring generative NER output.
//!
//! A model that labels text token by token emits strings such as
//! `John(B-Person) explored(O) Tokyo(B-Location)`. The generated words do not
//! always match the input: words get dropped, repeated or respelled. This crate
//! parses such generations, aligns the generated words back onto the input tokens
//! through a longest common subsequence, projects the labels, decodes entity spans
//! and scores them. It also builds the instruction-tuning instances and a seeded
//! noise model that reproduces the usual generation failures.

pub mod align;
pub mod dataset;
pub mod decode;
pub mod error;
pub mod eval;
pub mod genparse;
pub mod noise;
pub mod pipeline;
pub mod schema;
pub mod tag;

pub use align::{
    align_hierarchical, align_tokens, lcs_dp_oracle, lcs_hunt_szymanski, normalize_token,
    project_labels, AlignStats, Alignment, Normalizer, Projection, Tier,
};
pub use dataset::{load_dataset, Dataset, Format, InstanceRecord};
pub use decode::{decode_entities, gold_spans, spans_to_tags, EntitySpan, RepairPolicy};
pub use error::{Error, Result};
pub use eval::{classify_errors, micro_prf, micro_prf_with, ErrorCounts, EvalReport, Tally};
pub use genparse::{parse_generation, ParsedPrediction, PredItem};
pub use noise::{corrupt, NoiseConfig};
pub use pipeline::{
    evaluate, extract, process_record, ProcessOptions, ProcessedRecord, RecordStats,
};
pub use schema::{
    build_instruction, build_target, sample_label_set, ContextLen, PromptInstance, PromptRecord,
    SamplerConfig, TargetVariant,
};
pub use tag::{
    check_final, check_transition, parse_tag, render_tag, LabelSet, Prefix, Tag, TaggedSequence,
    TaggingScheme, TokenSequence, Transition, UnknownLabel,
};
