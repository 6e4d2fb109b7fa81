//! Recovers `(word, label)` pairs from a raw `word(label) word(label) ...` generation.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredItem {
    pub token: String,
    pub raw_label: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedPrediction {
    pub items: Vec<PredItem>,
    /// Whitespace-separated segments that did not end in a `(label)` group.
    pub malformed: usize,
}

impl ParsedPrediction {
    pub fn tokens(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.items.iter().map(|i| i.token.as_str())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Parses a generation. Never fails: segments without a trailing balanced
/// parenthesis group are skipped and counted in `malformed`.
///
/// The label is the content of the last balanced group closing the segment and the
/// word is everything before it, so `foo(bar)(O)` yields the word `foo(bar)`.
pub fn parse_generation(text: &str) -> ParsedPrediction {
    let mut out = ParsedPrediction::default();
    for segment in text.split_whitespace() {
        match split_segment(segment) {
            Some((token, label)) => out.items.push(PredItem {
                token: token.to_owned(),
                raw_label: label.to_owned(),
            }),
            None => out.malformed += 1,
        }
    }
    out
}

fn split_segment(segment: &str) -> Option<(&str, &str)> {
    let bytes = segment.as_bytes();
    if bytes.last() != Some(&b')') {
        return None;
    }
    let close = bytes.len() - 1;
    let mut depth = 0usize;
    // Parentheses are ASCII, so byte offsets are char boundaries.
    for open in (0..=close).rev() {
        match bytes[open] {
            b')' => depth += 1,
            b'(' => {
                depth -= 1;
                if depth == 0 {
                    let word = &segment[..open];
                    let label = &segment[open + 1..close];
                    return (!word.is_empty() && !label.is_empty()).then_some((word, label));
                }
            }
            _ => {}
        }
    }
    None
}
