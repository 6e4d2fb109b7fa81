//! Seeded corruption of clean token-by-token targets: word omission, repetition
//! and character-level substitution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decode::{gold_spans, spans_to_tags};
use crate::tag::{Tag, TaggedSequence, TaggingScheme};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub p_omit: f64,
    pub p_add: f64,
    pub p_sub: f64,
    /// Only `O` tokens may be omitted or substituted.
    pub entity_safe: bool,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn clean() -> Self {
        Self {
            p_omit: 0.0,
            p_add: 0.0,
            p_sub: 0.0,
            entity_safe: false,
            seed: 0,
        }
    }

    /// Splits a per-token corruption rate 39:3:58 between omission, addition and
    /// substitution.
    pub fn mixture(rate: f64, seed: u64) -> Self {
        Self {
            p_omit: rate * 0.39,
            p_add: rate * 0.03,
            p_sub: rate * 0.58,
            entity_safe: false,
            seed,
        }
    }

    pub fn omission_only(p_omit: f64, seed: u64) -> Self {
        Self {
            p_omit,
            entity_safe: true,
            seed,
            ..Self::clean()
        }
    }

    pub fn is_valid(&self) -> bool {
        let ps = [self.p_omit, self.p_add, self.p_sub];
        ps.iter().all(|p| (0.0..=1.0).contains(p)) && ps.iter().sum::<f64>() <= 1.0 + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharEdit {
    /// Remove the character at this index.
    Drop(usize),
    /// Swap characters at this index and the next.
    Swap(usize),
    /// Repeat the character at this index.
    Double(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenEdit {
    Keep,
    Omit,
    Substitute(CharEdit),
    /// Emit the unit, then emit it again.
    Repeat,
}

/// Draws one edit per token. Each token gets at most one edit.
pub fn plan_edits(seq: &TaggedSequence, cfg: &NoiseConfig) -> Vec<TokenEdit> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    seq.tokens()
        .iter()
        .zip(seq.tags())
        .map(|(tok, tag)| {
            let u: f64 = rng.gen();
            let protected = cfg.entity_safe && !tag.is_outside();
            if u < cfg.p_omit {
                if protected {
                    TokenEdit::Keep
                } else {
                    TokenEdit::Omit
                }
            } else if u < cfg.p_omit + cfg.p_sub {
                let len = tok.chars().count();
                let at = rng.gen_range(0..len);
                if protected {
                    TokenEdit::Keep
                } else if len < 2 {
                    TokenEdit::Substitute(CharEdit::Double(0))
                } else if rng.gen_bool(0.5) {
                    TokenEdit::Substitute(CharEdit::Drop(at))
                } else {
                    TokenEdit::Substitute(CharEdit::Swap(at.min(len - 2)))
                }
            } else if u < cfg.p_omit + cfg.p_sub + cfg.p_add {
                TokenEdit::Repeat
            } else {
                TokenEdit::Keep
            }
        })
        .collect()
}

fn apply_char_edit(token: &str, edit: CharEdit) -> String {
    let mut chars: Vec<char> = token.chars().collect();
    match edit {
        CharEdit::Drop(i) => {
            chars.remove(i);
        }
        CharEdit::Swap(i) => chars.swap(i, i + 1),
        CharEdit::Double(i) => chars.insert(i, chars[i]),
    }
    chars.into_iter().collect()
}

/// Renders the BIO token-by-token target with the given edits applied.
pub fn apply_edits(seq: &TaggedSequence, edits: &[TokenEdit]) -> String {
    assert_eq!(edits.len(), seq.len(), "one edit per token");
    let tags = spans_to_tags(&gold_spans(seq), seq.len(), TaggingScheme::Bio)
        .expect("decoded spans are legal");
    let mut units: Vec<String> = Vec::with_capacity(seq.len());
    for ((tok, tag), edit) in seq.tokens().iter().zip(&tags).zip(edits) {
        match edit {
            TokenEdit::Keep => units.push(unit(tok, tag)),
            TokenEdit::Omit => {}
            TokenEdit::Substitute(e) => units.push(unit(&apply_char_edit(tok, *e), tag)),
            TokenEdit::Repeat => {
                units.push(unit(tok, tag));
                units.push(unit(tok, tag));
            }
        }
    }
    units.join(" ")
}

fn unit(tok: &str, tag: &Tag) -> String {
    format!("{tok}({tag})")
}

/// Corrupted generation string for `seq`. Deterministic in `(seq, cfg)`.
pub fn corrupt(seq: &TaggedSequence, cfg: &NoiseConfig) -> String {
    apply_edits(seq, &plan_edits(seq, cfg))
}
