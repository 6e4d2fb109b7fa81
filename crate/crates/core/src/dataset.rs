//! Instance records and the CoNLL / JSONL corpus formats.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tag::{parse_tag, LabelSet, TaggedSequence, TaggingScheme, TokenSequence};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    /// Zero-based record index when absent from the input.
    #[serde(default)]
    pub id: String,
    pub tokens: Vec<String>,
    pub label_set: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_tags: Option<Vec<String>>,
}

impl InstanceRecord {
    pub fn token_sequence(&self) -> Result<TokenSequence> {
        TokenSequence::new(self.tokens.iter().cloned())
    }

    pub fn labels(&self) -> Result<LabelSet> {
        LabelSet::new(self.label_set.iter().cloned())
    }

    /// Gold tags as a sequence; `None` when the record carries no gold.
    pub fn gold_sequence(&self, scheme: TaggingScheme) -> Result<Option<TaggedSequence>> {
        let Some(tags) = &self.gold_tags else {
            return Ok(None);
        };
        TaggedSequence::from_strings(self.token_sequence()?, tags, &self.labels()?, scheme)
            .map(Some)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        self.token_sequence().map_err(|e| e.to_string())?;
        self.labels().map_err(|e| e.to_string())?;
        if let Some(tags) = &self.gold_tags {
            if tags.len() != self.tokens.len() {
                return Err(format!(
                    "{} tokens but {} gold tags",
                    self.tokens.len(),
                    tags.len()
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Conll,
    #[default]
    Jsonl,
}

impl Format {
    /// From a file extension: `.conll`, `.bio`, `.txt` and `.tsv` read as CoNLL.
    pub fn guess(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("conll" | "bio" | "txt" | "tsv") => Format::Conll,
            _ => Format::Jsonl,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "conll" => Ok(Format::Conll),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!(
                "unknown format {other:?} (expected conll or jsonl)"
            )),
        }
    }
}

/// A gold tag that does not parse under the scheme; it was replaced by `O`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownTag {
    pub line: usize,
    pub tag: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    pub records: Vec<InstanceRecord>,
    pub unknown_tags: Vec<UnknownTag>,
}

pub fn load_dataset(path: &Path, format: Format, scheme: TaggingScheme) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path.display().to_string();
    match format {
        Format::Conll => parse_conll(&text, &name, scheme),
        Format::Jsonl => parse_jsonl(&text, &name, scheme),
    }
}

/// One `token <whitespace> tag` per line (extra middle columns are ignored), blank
/// lines between sentences. `-DOCSTART-` lines are skipped. The label set of every
/// record is the set of types seen in the file, in order of first appearance.
pub fn parse_conll(text: &str, name: &str, scheme: TaggingScheme) -> Result<Dataset> {
    // Tokens, and tags with their line numbers.
    type Sentence = (Vec<String>, Vec<(usize, String)>);
    let mut sentences: Vec<Sentence> = Vec::new();
    let mut cur: Sentence = Default::default();
    let mut types: Vec<String> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.is_empty() {
            if !cur.0.is_empty() {
                sentences.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if cols[0] == "-DOCSTART-" {
            continue;
        }
        if cols.len() < 2 {
            return Err(Error::Malformed {
                path: name.to_owned(),
                line: line_no,
                message: format!("expected `token tag`, found {line:?}"),
            });
        }
        let tag = cols[cols.len() - 1];
        if let Some((_, ty)) = tag.split_once('-') {
            if !ty.is_empty() && !types.iter().any(|t| t == ty) {
                types.push(ty.to_owned());
            }
        }
        cur.0.push(cols[0].to_owned());
        cur.1.push((line_no, tag.to_owned()));
    }
    if !cur.0.is_empty() {
        sentences.push(cur);
    }

    // Types that cannot be labels ("O", parentheses) surface as unknown tags below.
    types.retain(|t| LabelSet::new([t.as_str()]).is_ok());
    let labels = LabelSet::new(types.iter().cloned()).expect("filtered to valid, unique labels");
    let mut unknown_tags = Vec::new();
    let records = sentences
        .into_iter()
        .enumerate()
        .map(|(i, (tokens, tags))| {
            let gold = tags
                .into_iter()
                .map(|(line, tag)| match parse_tag(&tag, &labels, scheme) {
                    Ok(t) => t.to_string(),
                    Err(_) => {
                        unknown_tags.push(UnknownTag { line, tag });
                        "O".to_owned()
                    }
                })
                .collect();
            InstanceRecord {
                id: i.to_string(),
                tokens,
                label_set: types.clone(),
                generation: None,
                gold_tags: Some(gold),
            }
        })
        .collect();
    Ok(Dataset {
        records,
        unknown_tags,
    })
}

pub fn parse_jsonl(text: &str, name: &str, scheme: TaggingScheme) -> Result<Dataset> {
    let mut out = Dataset::default();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| Error::Malformed {
            path: name.to_owned(),
            line: k + 1,
            message,
        };
        let mut rec: InstanceRecord =
            serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        rec.validate().map_err(malformed)?;
        if rec.id.is_empty() {
            rec.id = out.records.len().to_string();
        }
        if let Some(tags) = &mut rec.gold_tags {
            let labels = LabelSet::new(rec.label_set.iter().cloned()).expect("validated above");
            for t in tags.iter_mut() {
                if parse_tag(t, &labels, scheme).is_err() {
                    out.unknown_tags.push(UnknownTag {
                        line: k + 1,
                        tag: std::mem::replace(t, "O".to_owned()),
                    });
                }
            }
        }
        out.records.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize, W: Write>(items: &[T], mut w: W) -> io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes records with gold tags as CoNLL; records without gold are written all-`O`.
pub fn write_conll<W: Write>(records: &[InstanceRecord], mut w: W) -> io::Result<()> {
    for (k, rec) in records.iter().enumerate() {
        if k > 0 {
            w.write_all(b"\n")?;
        }
        for (i, tok) in rec.tokens.iter().enumerate() {
            let tag = rec.gold_tags.as_ref().map_or("O", |t| t[i].as_str());
            writeln!(w, "{tok} {tag}")?;
        }
    }
    Ok(())
}
