//! Document and annotation data model, the corpus file format, validation,
//! majority-vote gold construction and corpus statistics.
//!
//! Offsets in the file are Unicode scalar-value offsets into `text`
//! (not bytes). Tokens and sentences are ingested, never computed here.

mod gold;
mod stats;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gold::{build_gold_majority, GoldMajority, UnresolvedRegion};
pub use stats::{corpus_statistics, CorpusStatistics, LengthStats};
pub use validate::{validate_corpus, validate_document, Finding, Severity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topic {
    Homeschooling,
    Mainstreaming,
    PrayerInSchools,
    PublicPrivateSchools,
    Redshirting,
    SingleSexEducation,
}

impl Topic {
    pub const ALL: [Topic; 6] = [
        Topic::Homeschooling,
        Topic::Mainstreaming,
        Topic::PrayerInSchools,
        Topic::PublicPrivateSchools,
        Topic::Redshirting,
        Topic::SingleSexEducation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Topic::Homeschooling => "homeschooling",
            Topic::Mainstreaming => "mainstreaming",
            Topic::PrayerInSchools => "prayer-in-schools",
            Topic::PublicPrivateSchools => "public-private-schools",
            Topic::Redshirting => "redshirting",
            Topic::SingleSexEducation => "single-sex-education",
        }
    }

    /// Two- or three-letter abbreviation used in table headers.
    pub fn short(&self) -> &'static str {
        match self {
            Topic::Homeschooling => "HS",
            Topic::Mainstreaming => "MS",
            Topic::PrayerInSchools => "PIS",
            Topic::PublicPrivateSchools => "PPS",
            Topic::Redshirting => "RS",
            Topic::SingleSexEducation => "SSE",
        }
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Topic::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown topic `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Register {
    Comment,
    Forumpost,
    Blogpost,
    Article,
}

impl Register {
    pub const ALL: [Register; 4] = [
        Register::Comment,
        Register::Forumpost,
        Register::Blogpost,
        Register::Article,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Register::Comment => "comment",
            Register::Forumpost => "forumpost",
            Register::Blogpost => "blogpost",
            Register::Article => "article",
        }
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Register {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Register::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown register `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentType {
    Claim,
    Premise,
    Backing,
    Rebuttal,
    Refutation,
    AppealToEmotion,
}

impl ComponentType {
    /// The five argument components of the logos dimension, in label order.
    pub const LOGOS: [ComponentType; 5] = [
        ComponentType::Claim,
        ComponentType::Premise,
        ComponentType::Backing,
        ComponentType::Rebuttal,
        ComponentType::Refutation,
    ];

    pub const ALL: [ComponentType; 6] = [
        ComponentType::Claim,
        ComponentType::Premise,
        ComponentType::Backing,
        ComponentType::Rebuttal,
        ComponentType::Refutation,
        ComponentType::AppealToEmotion,
    ];

    pub fn dimension(&self) -> Dimension {
        match self {
            ComponentType::AppealToEmotion => Dimension::Pathos,
            _ => Dimension::Logos,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ComponentType::Claim => "claim",
            ComponentType::Premise => "premise",
            ComponentType::Backing => "backing",
            ComponentType::Rebuttal => "rebuttal",
            ComponentType::Refutation => "refutation",
            ComponentType::AppealToEmotion => "appeal_to_emotion",
        }
    }

    /// Capitalized name as used in BIO labels ("Claim", "Premise", ...).
    pub fn title(&self) -> &'static str {
        match self {
            ComponentType::Claim => "Claim",
            ComponentType::Premise => "Premise",
            ComponentType::Backing => "Backing",
            ComponentType::Rebuttal => "Rebuttal",
            ComponentType::Refutation => "Refutation",
            ComponentType::AppealToEmotion => "AppealToEmotion",
        }
    }
}

impl fmt::Display for ComponentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ComponentType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ComponentType::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown component type `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Logos,
    Pathos,
}

/// Half-open character range `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extent {
    pub start: usize,
    pub end: usize,
}

impl Extent {
    pub fn new(start: usize, end: usize) -> Self {
        Extent { start, end }
    }

    pub fn contains(&self, other: &Extent) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpan {
    #[serde(rename = "type")]
    pub component_type: ComponentType,
    pub dimension: Dimension,
    /// Inclusive token index.
    pub first_token: usize,
    /// Inclusive token index.
    pub last_token: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    /// Only meaningful for claims.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implicit: Option<bool>,
}

impl ComponentSpan {
    pub fn new(component_type: ComponentType, first_token: usize, last_token: usize) -> Self {
        ComponentSpan {
            component_type,
            dimension: component_type.dimension(),
            first_token,
            last_token,
            summary: None,
            implicit: None,
        }
    }

    pub fn len(&self) -> usize {
        self.last_token + 1 - self.first_token
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tokens(&self) -> Range<usize> {
        self.first_token..self.last_token + 1
    }

    pub fn overlaps(&self, other: &ComponentSpan) -> bool {
        self.first_token <= other.last_token && other.first_token <= self.last_token
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationSet {
    pub annotator: String,
    pub spans: Vec<ComponentSpan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implicit_claim_stance: Option<String>,
}

impl AnnotationSet {
    pub fn new(annotator: impl Into<String>, spans: Vec<ComponentSpan>) -> Self {
        AnnotationSet {
            annotator: annotator.into(),
            spans,
            implicit_claim_stance: None,
        }
    }

    pub fn spans_in(&self, dimension: Dimension) -> impl Iterator<Item = &ComponentSpan> {
        self.spans.iter().filter(move |s| s.dimension == dimension)
    }

    /// Logos spans sorted by first token.
    pub fn logos_spans(&self) -> Vec<&ComponentSpan> {
        let mut spans: Vec<&ComponentSpan> = self.spans_in(Dimension::Logos).collect();
        spans.sort_by_key(|s| (s.first_token, s.last_token));
        spans
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Persuasive {
    pub label: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub votes: BTreeMap<String, bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub id: String,
    pub topic: Topic,
    pub register: Register,
    pub text: String,
    #[serde(default)]
    pub paragraphs: Vec<Extent>,
    #[serde(default)]
    pub sentences: Vec<Extent>,
    #[serde(default)]
    pub tokens: Vec<Extent>,
    #[serde(default)]
    pub annotations: Vec<AnnotationSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<AnnotationSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persuasive: Option<Persuasive>,
    /// Annotation phase the document belongs to, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<u8>,
}

impl Document {
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    /// Token indices belonging to sentence `index`.
    pub fn sentence_tokens(&self, index: usize) -> Range<usize> {
        let s = self.sentences[index];
        let first = self.tokens.partition_point(|t| t.start < s.start);
        let end = self.tokens.partition_point(|t| t.start < s.end);
        first..end.max(first)
    }

    /// Index of the sentence containing token `index`, if any.
    pub fn sentence_of_token(&self, index: usize) -> Option<usize> {
        let t = self.tokens.get(index)?;
        let i = self.sentences.partition_point(|s| s.end <= t.start);
        self.sentences
            .get(i)
            .filter(|s| s.contains(t))
            .map(|_| i)
    }

    /// Index of the paragraph containing sentence `index`, if any.
    pub fn paragraph_of_sentence(&self, index: usize) -> Option<usize> {
        let s = self.sentences.get(index)?;
        let i = self.paragraphs.partition_point(|p| p.end <= s.start);
        self.paragraphs.get(i).filter(|p| p.contains(s)).map(|_| i)
    }

    /// Surface strings of all tokens, resolved from character offsets.
    pub fn token_strings(&self) -> Vec<&str> {
        let bytes = char_to_byte_offsets(&self.text);
        self.tokens
            .iter()
            .map(|t| {
                let lo = bytes.get(t.start).copied().unwrap_or(self.text.len());
                let hi = bytes.get(t.end).copied().unwrap_or(self.text.len());
                &self.text[lo..hi.max(lo)]
            })
            .collect()
    }

    pub fn annotation(&self, annotator: &str) -> Option<&AnnotationSet> {
        self.annotations.iter().find(|a| a.annotator == annotator)
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

/// Byte offset of every char boundary, plus the end of the string.
fn char_to_byte_offsets(text: &str) -> Vec<usize> {
    let mut out: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
    out.push(text.len());
    out
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub version: String,
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(name: impl Into<String>, documents: Vec<Document>) -> Self {
        Corpus {
            name: name.into(),
            version: "1".to_string(),
            documents,
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.documents.iter().position(|d| d.id == id)
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    /// Distinct annotator ids, in order of first appearance.
    pub fn annotators(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for doc in &self.documents {
            for set in &doc.annotations {
                if !out.contains(&set.annotator) {
                    out.push(set.annotator.clone());
                }
            }
        }
        out
    }

    pub fn topics(&self) -> Vec<Topic> {
        let mut t: Vec<Topic> = self.documents.iter().map(|d| d.topic).collect();
        t.sort();
        t.dedup();
        t
    }

    /// Parses a corpus from JSON text and validates every document.
    pub fn from_json_str(json: &str) -> Result<Corpus> {
        let value: serde_json::Value = serde_json::from_str(json).map_err(|e| Error::json(&e))?;
        let obj = value.as_object().ok_or_else(|| Error::Validation {
            doc_id: "<corpus>".into(),
            field: "$".into(),
            message: "top level must be an object".into(),
        })?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "name" | "version" | "documents") {
                return Err(Error::Validation {
                    doc_id: "<corpus>".into(),
                    field: key.clone(),
                    message: "unknown top-level field".into(),
                });
            }
        }
        let text_field = |key: &str| -> Result<String> {
            match obj.get(key) {
                None => Ok(String::new()),
                Some(serde_json::Value::String(s)) => Ok(s.clone()),
                Some(_) => Err(Error::Validation {
                    doc_id: "<corpus>".into(),
                    field: key.into(),
                    message: "expected a string".into(),
                }),
            }
        };
        let name = text_field("name")?;
        let version = text_field("version")?;
        let docs = obj
            .get("documents")
            .and_then(|d| d.as_array())
            .ok_or_else(|| Error::Validation {
                doc_id: "<corpus>".into(),
                field: "documents".into(),
                message: "missing or not an array".into(),
            })?;

        let mut documents = Vec::with_capacity(docs.len());
        for (i, raw) in docs.iter().enumerate() {
            let doc_id = raw
                .get("id")
                .and_then(|v| v.as_str())
                .map(str::to_string)
                .unwrap_or_else(|| format!("<document #{i}>"));
            let doc: Document = serde_path_to_error::deserialize(raw).map_err(|e| {
                let path = e.path().to_string();
                Error::Validation {
                    doc_id: doc_id.clone(),
                    field: path,
                    message: e.into_inner().to_string(),
                }
            })?;
            documents.push(doc);
        }
        let corpus = Corpus {
            name,
            version,
            documents,
        };
        if let Some(err) = validate_corpus(&corpus)
            .into_iter()
            .find(|f| f.severity == Severity::Error)
        {
            return Err(Error::Validation {
                doc_id: err.doc_id,
                field: err.field,
                message: err.message,
            });
        }
        Ok(corpus)
    }

    /// Canonical JSON: keys sorted lexicographically, two-space indentation,
    /// LF line endings, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        // serde_json::Value keeps object keys in a BTreeMap, so going through
        // it sorts every level.
        let value = serde_json::to_value(self).expect("corpus is always representable as JSON");
        let mut out = serde_json::to_string_pretty(&value).expect("serializing a Value cannot fail");
        out.push('\n');
        out
    }
}

pub fn parse_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Corpus::from_json_str(&text)
}

pub fn serialize_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, corpus.to_canonical_json()).map_err(|e| Error::io(path, e))
}
