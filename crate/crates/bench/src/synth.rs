//! Seeded synthetic sentences with a Zipfian function-word vocabulary, so common
//! words repeat the way they do in real text.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tagalign_core::noise::{corrupt, NoiseConfig};
use tagalign_core::{parse_generation, Prefix, Tag, TaggedSequence, TokenSequence};

use crate::BenchPair;

const FUNCTION_WORDS: &[&str] = &[
    "the", ",", ".", "of", "and", "to", "a", "in", "that", "is", "was", "for", "on", "with", "as",
    "by", "at", "from", "his", "her", "it", "an", "were", "which", "are", "this", "be", "has",
    "had", "not", "after", "also", "their", "its", "but", "who", "been", "one", "two", "new",
    "first", "would", "said", "more", "when", "than", "into", "over", "year", "years",
];

const CONTENT_WORDS: &[&str] = &[
    "government",
    "season",
    "album",
    "team",
    "minister",
    "market",
    "shares",
    "police",
    "club",
    "report",
    "company",
    "match",
    "city",
    "election",
    "film",
    "record",
    "league",
    "court",
    "officials",
    "president",
    "week",
    "season's",
    "profit",
    "group",
    "troops",
    "talks",
    "players",
    "price",
    "percent",
    "million",
    "border",
    "capital",
    "results",
    "goals",
    "win",
    "agreement",
    "statement",
    "bank",
    "rebels",
    "visit",
    "division",
    "title",
    "lead",
    "stage",
];

const NAMES: &[&str] = &[
    "Smith", "Tokyo", "Berlin", "Maria", "Chen", "Garcia", "Reuters", "Honda", "Nile", "Oslo",
    "Kaplan", "Ahmed", "Lorax", "Brontë", "Müller", "Sydney", "Dynamo", "Arsenal", "Yen", "Celtic",
    "Andes", "Peter", "Clinton", "Siemens", "Boeing", "Lagos", "Kiev", "Ajax",
];

pub const TYPES: &[&str] = &["PER", "LOC", "ORG", "MISC"];

const SYLLABLES: &[&str] = &[
    "ka", "ro", "mi", "ten", "sal", "vor", "du", "len", "gra", "pe", "tis", "mon", "ba", "rek",
    "lo", "fin", "sta", "ur", "ne", "col",
];

/// Rare-word tail size. Real news text of a few hundred tokens is mostly
/// distinct words once the function words are set aside.
const TAIL_WORDS: usize = 4000;

/// Deterministic pseudo-words of two to four syllables.
fn tail_word(k: usize) -> String {
    let n = SYLLABLES.len();
    let mut word = String::new();
    let mut x = k + n * n;
    while x > 0 {
        word.push_str(SYLLABLES[x % n]);
        x /= n;
    }
    word
}

/// Cumulative Zipf weights over `n` ranks.
fn zipf_cdf(n: usize, s: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = (1..=n)
        .map(|k| {
            acc += 1.0 / (k as f64).powf(s);
            acc
        })
        .collect();
    for c in &mut cdf {
        *c /= acc;
    }
    cdf
}

pub struct SentenceGen {
    rng: ChaCha8Rng,
    cdf: Vec<f64>,
    words: Vec<String>,
}

impl SentenceGen {
    pub fn new(seed: u64) -> Self {
        let words: Vec<String> = FUNCTION_WORDS
            .iter()
            .chain(CONTENT_WORDS)
            .map(|w| w.to_string())
            .chain((0..TAIL_WORDS).map(tail_word))
            .collect();
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cdf: zipf_cdf(words.len(), 1.0),
            words,
        }
    }

    fn word(&mut self) -> String {
        let u: f64 = self.rng.gen();
        let k = self
            .cdf
            .partition_point(|&c| c < u)
            .min(self.words.len() - 1);
        self.words[k].clone()
    }

    /// A sentence of exactly `len` tokens, roughly one entity per eight tokens.
    pub fn sentence(&mut self, len: usize) -> TaggedSequence {
        let mut tokens = Vec::with_capacity(len);
        let mut tags = Vec::with_capacity(len);
        while tokens.len() < len {
            let room = len - tokens.len();
            if self.rng.gen_bool(0.12) {
                let span = self.rng.gen_range(1..=3).min(room);
                let ty = TYPES[self.rng.gen_range(0..TYPES.len())];
                for k in 0..span {
                    tokens.push(NAMES[self.rng.gen_range(0..NAMES.len())].to_owned());
                    let prefix = if k == 0 { Prefix::B } else { Prefix::I };
                    tags.push(Tag::entity(prefix, ty));
                }
            } else {
                tokens.push(self.word());
                tags.push(Tag::Outside);
            }
        }
        TaggedSequence::new(
            TokenSequence::new(tokens).expect("vocabulary tokens are valid"),
            tags,
        )
        .expect("one tag per token")
    }
}

/// `per_bucket` corrupted pairs with original lengths drawn uniformly from each
/// `[lo, hi)` range. Corruption mixes omission, repetition and substitution at the
/// given per-token rate.
pub fn noisy_corpus(
    ranges: &[(usize, usize)],
    per_bucket: usize,
    rate: f64,
    seed: u64,
) -> Vec<BenchPair> {
    let mut gen = SentenceGen::new(seed);
    let mut len_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    for &(lo, hi) in ranges {
        for k in 0..per_bucket {
            let len = len_rng.gen_range(lo.max(1)..hi);
            let seq = gen.sentence(len);
            let generation = corrupt(
                &seq,
                &NoiseConfig::mixture(rate, seed.wrapping_add(k as u64)),
            );
            out.push(BenchPair {
                orig: seq.tokens().as_slice().to_vec(),
                pred: parse_generation(&generation)
                    .tokens()
                    .map(str::to_owned)
                    .collect(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentences_have_requested_length_and_repeat_words() {
        let mut g = SentenceGen::new(1);
        let s = g.sentence(120);
        assert_eq!(s.len(), 120);
        let distinct: std::collections::BTreeSet<&String> = s.tokens().iter().collect();
        assert!(distinct.len() < 120);
        assert!(s.positives().count() > 0);
    }

    #[test]
    fn corpus_is_seeded() {
        let a = noisy_corpus(&[(0, 60), (100, 200)], 5, 0.1, 3);
        let b = noisy_corpus(&[(0, 60), (100, 200)], 5, 0.1, 3);
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a[5..].iter().all(|p| (100..200).contains(&p.orig.len())));
    }
}
