//! Maps predicted tokens one-to-one onto original tokens and projects the
//! predicted labels back onto the original sequence.
//!
//! Alignment is hierarchical. Identical sequences take an O(N) identity path,
//! pure omissions an O(N) greedy subsequence path, and everything else falls
//! through to [`lcs_hunt_szymanski`]. Every tier yields exactly the alignment
//! [`lcs_dp_oracle`] would on the normalized tokens.

mod lcs;
mod normalize;

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

pub use lcs::{lcs_dp_oracle, lcs_hunt_szymanski};
pub use normalize::{normalize_token, Normalizer};

use crate::genparse::ParsedPrediction;
use crate::tag::{parse_tag, LabelSet, Tag, TaggedSequence, TaggingScheme, TokenSequence};

/// `(pred_index, orig_index)` pairs, strictly increasing in both coordinates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alignment {
    pairs: Vec<(usize, usize)>,
}

impl Alignment {
    /// Validates monotonicity and bounds.
    pub fn new(pairs: Vec<(usize, usize)>, pred_len: usize, orig_len: usize) -> Option<Self> {
        let al = Self { pairs };
        al.is_valid_for(pred_len, orig_len).then_some(al)
    }

    pub(crate) fn from_pairs_unchecked(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_valid_for(&self, pred_len: usize, orig_len: usize) -> bool {
        self.pairs
            .iter()
            .all(|&(p, o)| p < pred_len && o < orig_len)
            && self
                .pairs
                .windows(2)
                .all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Exact,
    Subsequence,
    Lcs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlignStats {
    pub tier: Tier,
    pub lcs_length: usize,
    pub unmatched_pred: usize,
    pub unmatched_orig: usize,
}

/// Hierarchical alignment over raw token slices.
pub fn align_tokens<O: AsRef<str>, P: AsRef<str>>(
    orig: &[O],
    pred: &[P],
    norm: &Normalizer,
) -> (Alignment, AlignStats) {
    if let Normalizer::Identity = norm {
        return align_normalized(orig, pred);
    }
    let orig: Vec<Cow<'_, str>> = orig.iter().map(|t| norm.normalize(t.as_ref())).collect();
    let pred: Vec<Cow<'_, str>> = pred.iter().map(|t| norm.normalize(t.as_ref())).collect();
    align_normalized(&orig, &pred)
}

fn align_normalized<O: AsRef<str>, P: AsRef<str>>(
    orig: &[O],
    pred: &[P],
) -> (Alignment, AlignStats) {
    let same =
        orig.len() == pred.len() && orig.iter().zip(pred).all(|(o, p)| o.as_ref() == p.as_ref());
    let (alignment, tier) = if same {
        let pairs = (0..orig.len())
            .filter(|&i| !orig[i].as_ref().is_empty())
            .map(|i| (i, i))
            .collect();
        (Alignment { pairs }, Tier::Exact)
    } else if let Some(pairs) = greedy_subsequence(orig, pred) {
        (Alignment { pairs }, Tier::Subsequence)
    } else {
        (lcs_hunt_szymanski(pred, orig), Tier::Lcs)
    };
    let stats = AlignStats {
        tier,
        lcs_length: alignment.len(),
        unmatched_pred: pred.len() - alignment.len(),
        unmatched_orig: orig.len() - alignment.len(),
    };
    (alignment, stats)
}

/// Earliest-match embedding of `pred` into `orig`, if `pred` is a subsequence.
fn greedy_subsequence<O: AsRef<str>, P: AsRef<str>>(
    orig: &[O],
    pred: &[P],
) -> Option<Vec<(usize, usize)>> {
    if pred.len() > orig.len() {
        return None;
    }
    let mut pairs = Vec::with_capacity(pred.len());
    let mut rest = orig.iter().enumerate();
    for (i, p) in pred.iter().enumerate() {
        let p = p.as_ref();
        if p.is_empty() {
            return None;
        }
        let (j, _) = rest.find(|(_, o)| o.as_ref() == p)?;
        pairs.push((i, j));
    }
    Some(pairs)
}

pub fn align_hierarchical(
    orig: &TokenSequence,
    pred: &ParsedPrediction,
    norm: &Normalizer,
) -> (Alignment, AlignStats) {
    let pred_tokens: Vec<&str> = pred.tokens().collect();
    align_tokens(orig.as_slice(), &pred_tokens, norm)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub seq: TaggedSequence,
    /// Aligned predictions whose raw label was not valid and became `O`.
    pub unknown_labels: usize,
}

/// Copies each aligned prediction's label onto its original token. Unmatched
/// original tokens, and aligned ones with unknown labels, become `O`.
pub fn project_labels(
    orig: &TokenSequence,
    pred: &ParsedPrediction,
    al: &Alignment,
    labels: &LabelSet,
    scheme: TaggingScheme,
) -> Projection {
    let mut tags = vec![Tag::Outside; orig.len()];
    let mut unknown_labels = 0;
    for &(p, o) in al.pairs() {
        match parse_tag(&pred.items[p].raw_label, labels, scheme) {
            Ok(tag) => tags[o] = tag,
            Err(_) => unknown_labels += 1,
        }
    }
    let seq = TaggedSequence::new(orig.clone(), tags).expect("one tag per original token");
    Projection {
        seq,
        unknown_labels,
    }
}
