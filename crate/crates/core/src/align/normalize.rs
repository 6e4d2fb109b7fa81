//! Token normalizers applied to both sides before matching.

use std::borrow::Cow;
use std::collections::BTreeSet;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Normalizer {
    #[default]
    Identity,
    /// Compatibility decomposition, combining marks stripped, lowercased.
    UnicodeFold,
    /// Drops every character outside the alphabet. Stands in for a model-vocabulary
    /// round trip: characters the model cannot emit disappear.
    VocabFilter(BTreeSet<char>),
    /// Applied left to right.
    Chain(Vec<Normalizer>),
}

impl Normalizer {
    pub fn ascii_letters() -> Self {
        Normalizer::VocabFilter(('a'..='z').chain('A'..='Z').collect())
    }

    /// Alphabet made of every non-whitespace character in `text`.
    pub fn vocab_from_text(text: &str) -> Self {
        Normalizer::VocabFilter(text.chars().filter(|c| !c.is_whitespace()).collect())
    }

    pub fn normalize<'a>(&self, token: &'a str) -> Cow<'a, str> {
        match self {
            Normalizer::Identity => Cow::Borrowed(token),
            Normalizer::UnicodeFold => fixpoint(token, fold_once),
            Normalizer::VocabFilter(alphabet) => {
                if token.chars().all(|c| alphabet.contains(&c)) {
                    Cow::Borrowed(token)
                } else {
                    Cow::Owned(token.chars().filter(|c| alphabet.contains(c)).collect())
                }
            }
            Normalizer::Chain(steps) => fixpoint(token, |t| {
                steps
                    .iter()
                    .fold(t.to_owned(), |acc, n| n.normalize(&acc).into_owned())
            }),
        }
    }
}

pub fn normalize_token<'a>(token: &'a str, norm: &Normalizer) -> Cow<'a, str> {
    norm.normalize(token)
}

fn fold_once(s: &str) -> String {
    s.to_lowercase()
        .nfkd()
        .filter(|c| !is_combining_mark(*c))
        .collect()
}

// A handful of code points (e.g. U+0130) need a second pass before the result is stable.
fn fixpoint<'a>(token: &'a str, step: impl Fn(&str) -> String) -> Cow<'a, str> {
    let mut cur = step(token);
    for _ in 0..4 {
        let next = step(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    if cur == token {
        Cow::Borrowed(token)
    } else {
        Cow::Owned(cur)
    }
}
