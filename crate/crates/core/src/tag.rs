//! Token sequences, label sets and the BIO / BIOES tag algebra.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pre-split tokens. Every token is non-empty and contains no whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct TokenSequence(Vec<String>);

impl TokenSequence {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        for t in &tokens {
            if t.is_empty() {
                return Err(Error::InvalidToken {
                    token: t.clone(),
                    reason: "empty token",
                });
            }
            if t.chars().any(char::is_whitespace) {
                return Err(Error::InvalidToken {
                    token: t.clone(),
                    reason: "token contains whitespace",
                });
            }
        }
        Ok(Self(tokens))
    }

    /// Splits raw text on whitespace. The only tokenizer the library offers.
    pub fn from_whitespace(text: &str) -> Self {
        Self(text.split_whitespace().map(str::to_owned).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub fn join(&self, sep: &str) -> String {
        self.0.join(sep)
    }
}

impl std::ops::Index<usize> for TokenSequence {
    type Output = str;
    fn index(&self, i: usize) -> &str {
        &self.0[i]
    }
}

impl TryFrom<Vec<String>> for TokenSequence {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TokenSequence> for Vec<String> {
    fn from(t: TokenSequence) -> Self {
        t.0
    }
}

/// Ordered set of entity type names. Order matters: class-order shuffling permutes it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelSet(Vec<String>);

impl LabelSet {
    pub fn new<I, S>(types: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let types: Vec<String> = types.into_iter().map(Into::into).collect();
        for (i, t) in types.iter().enumerate() {
            validate_label(t)?;
            if types[..i].contains(t) {
                return Err(Error::InvalidLabel {
                    label: t.clone(),
                    reason: "duplicate label",
                });
            }
        }
        Ok(Self(types))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.iter().any(|t| t == name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }
}

impl TryFrom<Vec<String>> for LabelSet {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LabelSet> for Vec<String> {
    fn from(l: LabelSet) -> Self {
        l.0
    }
}

fn validate_label(t: &str) -> Result<()> {
    let reason = if t.is_empty() {
        "empty label"
    } else if t == "O" {
        "\"O\" is reserved for the outside tag"
    } else if t.contains(['(', ')']) {
        "labels may not contain parentheses"
    } else if t.chars().any(char::is_whitespace) {
        "labels may not contain whitespace"
    } else {
        return Ok(());
    };
    Err(Error::InvalidLabel {
        label: t.to_owned(),
        reason,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaggingScheme {
    #[default]
    Bio,
    Bioes,
}

impl TaggingScheme {
    pub fn allows(self, prefix: Prefix) -> bool {
        match self {
            TaggingScheme::Bio => matches!(prefix, Prefix::B | Prefix::I),
            TaggingScheme::Bioes => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TaggingScheme::Bio => "BIO",
            TaggingScheme::Bioes => "BIOES",
        }
    }
}

impl std::str::FromStr for TaggingScheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bio" => Ok(Self::Bio),
            "bioes" => Ok(Self::Bioes),
            other => Err(format!(
                "unknown tagging scheme {other:?} (expected bio or bioes)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prefix {
    B,
    I,
    E,
    S,
}

impl Prefix {
    pub const ALL: [Prefix; 4] = [Prefix::B, Prefix::I, Prefix::E, Prefix::S];

    fn as_char(self) -> char {
        match self {
            Prefix::B => 'B',
            Prefix::I => 'I',
            Prefix::E => 'E',
            Prefix::S => 'S',
        }
    }

    fn from_str(s: &str) -> Option<Self> {
        match s {
            "B" => Some(Prefix::B),
            "I" => Some(Prefix::I),
            "E" => Some(Prefix::E),
            "S" => Some(Prefix::S),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tag {
    Outside,
    Entity { prefix: Prefix, label: String },
}

impl Tag {
    pub fn entity(prefix: Prefix, label: impl Into<String>) -> Self {
        Tag::Entity {
            prefix,
            label: label.into(),
        }
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, Tag::Outside)
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            Tag::Outside => None,
            Tag::Entity { label, .. } => Some(label),
        }
    }

    pub fn prefix(&self) -> Option<Prefix> {
        match self {
            Tag::Outside => None,
            Tag::Entity { prefix, .. } => Some(*prefix),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Outside => f.write_str("O"),
            Tag::Entity { prefix, label } => write!(f, "{}-{}", prefix.as_char(), label),
        }
    }
}

/// A raw tag string that does not name a known label under the active scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLabel(pub String);

/// Parses `O` or `<prefix>-<type>`. Unknown labels are returned as a value so the
/// caller can choose a policy.
pub fn parse_tag(
    text: &str,
    labels: &LabelSet,
    scheme: TaggingScheme,
) -> std::result::Result<Tag, UnknownLabel> {
    if text == "O" {
        return Ok(Tag::Outside);
    }
    let unknown = || UnknownLabel(text.to_owned());
    let (p, label) = text.split_once('-').ok_or_else(unknown)?;
    let prefix = Prefix::from_str(p).ok_or_else(unknown)?;
    if !scheme.allows(prefix) || !labels.contains(label) {
        return Err(unknown());
    }
    Ok(Tag::entity(prefix, label))
}

pub fn render_tag(tag: &Tag) -> String {
    tag.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transition {
    Legal,
    Illegal(&'static str),
}

impl Transition {
    pub fn is_legal(&self) -> bool {
        matches!(self, Transition::Legal)
    }
}

/// Whether `next` may follow `prev`. The start of a sequence behaves like a
/// preceding `O`.
///
/// Under BIOES an open `B`/`I` must be continued by `I`/`E` of the same type, so a
/// `B`/`I` followed by anything else is illegal (the entity is left unterminated).
pub fn check_transition(prev: &Tag, next: &Tag, scheme: TaggingScheme) -> Transition {
    let same_type = prev.label().is_some() && prev.label() == next.label();
    match scheme {
        TaggingScheme::Bio => match next.prefix() {
            Some(Prefix::I) => {
                if same_type && matches!(prev.prefix(), Some(Prefix::B | Prefix::I)) {
                    Transition::Legal
                } else {
                    Transition::Illegal("I without opener")
                }
            }
            Some(Prefix::E | Prefix::S) => Transition::Illegal("prefix not in BIO"),
            _ => Transition::Legal,
        },
        TaggingScheme::Bioes => {
            let open = matches!(prev.prefix(), Some(Prefix::B | Prefix::I));
            let continues = matches!(next.prefix(), Some(Prefix::I | Prefix::E));
            match (open, continues) {
                (true, true) if same_type => Transition::Legal,
                (true, true) => Transition::Illegal("continuation of a different type"),
                (true, false) => Transition::Illegal("unterminated entity"),
                (false, true) => Transition::Illegal("I/E without opener"),
                (false, false) => Transition::Legal,
            }
        }
    }
}

/// Whether a sequence may end on `last`.
pub fn check_final(last: &Tag, scheme: TaggingScheme) -> Transition {
    match (scheme, last.prefix()) {
        (TaggingScheme::Bioes, Some(Prefix::B | Prefix::I)) => {
            Transition::Illegal("unterminated entity at end of sequence")
        }
        _ => Transition::Legal,
    }
}

/// Tokens paired with one tag each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSequence {
    tokens: TokenSequence,
    tags: Vec<Tag>,
}

impl TaggedSequence {
    pub fn new(tokens: TokenSequence, tags: Vec<Tag>) -> Result<Self> {
        if tokens.len() != tags.len() {
            return Err(Error::LengthMismatch {
                tokens: tokens.len(),
                tags: tags.len(),
            });
        }
        Ok(Self { tokens, tags })
    }

    /// Parses tag strings; any tag that is not valid under `scheme` is an error.
    pub fn from_strings<S: AsRef<str>>(
        tokens: TokenSequence,
        tags: &[S],
        labels: &LabelSet,
        scheme: TaggingScheme,
    ) -> Result<Self> {
        let tags = tags
            .iter()
            .map(|t| {
                parse_tag(t.as_ref(), labels, scheme).map_err(|u| Error::InvalidLabel {
                    label: u.0,
                    reason: "tag not valid for the label set and scheme",
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(tokens, tags)
    }

    pub fn tokens(&self) -> &TokenSequence {
        &self.tokens
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Indices of entity-tagged tokens.
    pub fn positives(&self) -> impl Iterator<Item = usize> + '_ {
        self.tags
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_outside())
            .map(|(i, _)| i)
    }

    /// Indices of `O`-tagged tokens.
    pub fn negatives(&self) -> impl Iterator<Item = usize> + '_ {
        self.tags
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_outside())
            .map(|(i, _)| i)
    }

    pub fn tag_strings(&self) -> Vec<String> {
        self.tags.iter().map(render_tag).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels() -> LabelSet {
        LabelSet::new(["Person", "Location"]).unwrap()
    }

    fn t(s: &str) -> Tag {
        parse_tag(
            s,
            &LabelSet::new(["Person", "Location", "title"]).unwrap(),
            TaggingScheme::Bioes,
        )
        .unwrap()
    }

    #[test]
    fn parses_known_tags() {
        assert_eq!(
            parse_tag("B-Person", &labels(), TaggingScheme::Bio),
            Ok(Tag::entity(Prefix::B, "Person"))
        );
        assert_eq!(
            parse_tag("O", &labels(), TaggingScheme::Bio),
            Ok(Tag::Outside)
        );
    }

    #[test]
    fn unknown_labels_are_values() {
        let l = labels();
        assert_eq!(
            parse_tag("B-Gene", &l, TaggingScheme::Bio),
            Err(UnknownLabel("B-Gene".into()))
        );
        assert!(parse_tag("S-Person", &l, TaggingScheme::Bio).is_err());
        assert!(parse_tag("S-Person", &l, TaggingScheme::Bioes).is_ok());
        assert!(parse_tag("Person", &l, TaggingScheme::Bio).is_err());
        assert!(parse_tag("X-Person", &l, TaggingScheme::Bio).is_err());
        assert!(parse_tag("o", &l, TaggingScheme::Bio).is_err());
    }

    #[test]
    fn hyphenated_labels() {
        let l = LabelSet::new(["date-time"]).unwrap();
        assert_eq!(
            parse_tag("I-date-time", &l, TaggingScheme::Bio),
            Ok(Tag::entity(Prefix::I, "date-time"))
        );
    }

    #[test]
    fn renders() {
        assert_eq!(
            render_tag(&Tag::entity(Prefix::I, "Location")),
            "I-Location"
        );
        assert_eq!(render_tag(&Tag::Outside), "O");
        assert_eq!(render_tag(&Tag::entity(Prefix::S, "Person")), "S-Person");
    }

    #[test]
    fn render_parse_identity_exhaustive() {
        let l = LabelSet::new(["Person", "Location", "a-b", "x"]).unwrap();
        for scheme in [TaggingScheme::Bio, TaggingScheme::Bioes] {
            assert_eq!(
                parse_tag("O", &l, scheme).map(|t| render_tag(&t)),
                Ok("O".into())
            );
            for label in l.iter() {
                for p in Prefix::ALL.into_iter().filter(|p| scheme.allows(*p)) {
                    let tag = Tag::entity(p, label.clone());
                    let s = render_tag(&tag);
                    assert_eq!(parse_tag(&s, &l, scheme), Ok(tag));
                }
            }
        }
    }

    #[test]
    fn label_set_validation() {
        assert!(LabelSet::new(["O"]).is_err());
        assert!(LabelSet::new(["a(b)"]).is_err());
        assert!(LabelSet::new([""]).is_err());
        assert!(LabelSet::new(["A", "A"]).is_err());
        assert!(LabelSet::new(["A", "B"]).is_ok());
    }

    #[test]
    fn token_validation() {
        assert!(TokenSequence::new(["a", ""]).is_err());
        assert!(TokenSequence::new(["a b"]).is_err());
        assert_eq!(TokenSequence::from_whitespace("  a  b\n c ").len(), 3);
    }

    #[test]
    fn bio_transitions() {
        let bio = TaggingScheme::Bio;
        assert_eq!(
            check_transition(&Tag::Outside, &t("I-Location"), bio),
            Transition::Illegal("I without opener")
        );
        assert!(check_transition(&t("B-Person"), &t("I-Person"), bio).is_legal());
        assert!(check_transition(&t("I-Person"), &t("I-Person"), bio).is_legal());
        assert!(!check_transition(&t("B-Person"), &t("I-Location"), bio).is_legal());
        assert!(check_transition(&t("I-Person"), &t("B-Person"), bio).is_legal());
        assert!(check_transition(&t("B-Person"), &Tag::Outside, bio).is_legal());
    }

    #[test]
    fn bioes_transitions() {
        let s = TaggingScheme::Bioes;
        assert!(!check_transition(&t("S-Person"), &t("I-Person"), s).is_legal());
        assert!(check_transition(&t("B-Person"), &t("I-Person"), s).is_legal());
        assert!(check_transition(&t("I-Person"), &t("E-Person"), s).is_legal());
        assert!(!check_transition(&t("B-Person"), &t("E-Location"), s).is_legal());
        assert!(!check_transition(&t("B-Person"), &Tag::Outside, s).is_legal());
        assert!(check_transition(&t("E-Person"), &t("S-Person"), s).is_legal());
        assert!(check_transition(&Tag::Outside, &t("B-title"), s).is_legal());
        assert!(!check_final(&t("I-Person"), s).is_legal());
        assert!(check_final(&t("I-Person"), TaggingScheme::Bio).is_legal());
    }

    proptest! {
        #[test]
        fn partition_covers_every_index(tags in prop::collection::vec(0u8..3, 0..40)) {
            let n = tags.len();
            let tokens = TokenSequence::new((0..n).map(|i| format!("w{i}"))).unwrap();
            let tags = tags
                .into_iter()
                .map(|k| match k {
                    0 => Tag::Outside,
                    1 => Tag::entity(Prefix::B, "Person"),
                    _ => Tag::entity(Prefix::I, "Person"),
                })
                .collect();
            let seq = TaggedSequence::new(tokens, tags).unwrap();
            let p: Vec<_> = seq.positives().collect();
            let neg: Vec<_> = seq.negatives().collect();
            prop_assert_eq!(p.len() + neg.len(), n);
            prop_assert!(p.iter().all(|i| !neg.contains(i)));
        }
    }
}
