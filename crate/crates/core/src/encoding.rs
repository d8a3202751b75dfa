//! The 11-class BIO scheme over sentences, projection of token spans onto
//! sentences and back, and the oracle measuring what the projection loses.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::{AnnotationSet, ComponentSpan, ComponentType, Corpus, Document};
use crate::error::{Error, Result};
use crate::evaluation::{ConfusionMatrix, TokenScores};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BioLabel {
    O,
    ClaimB,
    ClaimI,
    PremiseB,
    PremiseI,
    BackingB,
    BackingI,
    RebuttalB,
    RebuttalI,
    RefutationB,
    RefutationI,
}

impl BioLabel {
    pub const COUNT: usize = 11;

    /// Fixed label order. Decoding ties resolve towards earlier entries.
    pub const ALL: [BioLabel; 11] = [
        BioLabel::O,
        BioLabel::ClaimB,
        BioLabel::ClaimI,
        BioLabel::PremiseB,
        BioLabel::PremiseI,
        BioLabel::BackingB,
        BioLabel::BackingI,
        BioLabel::RebuttalB,
        BioLabel::RebuttalI,
        BioLabel::RefutationB,
        BioLabel::RefutationI,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> BioLabel {
        BioLabel::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            BioLabel::O => "O",
            BioLabel::ClaimB => "Claim-B",
            BioLabel::ClaimI => "Claim-I",
            BioLabel::PremiseB => "Premise-B",
            BioLabel::PremiseI => "Premise-I",
            BioLabel::BackingB => "Backing-B",
            BioLabel::BackingI => "Backing-I",
            BioLabel::RebuttalB => "Rebuttal-B",
            BioLabel::RebuttalI => "Rebuttal-I",
            BioLabel::RefutationB => "Refutation-B",
            BioLabel::RefutationI => "Refutation-I",
        }
    }

    /// Label for a logos component. Pathos types have no BIO label.
    pub fn new(component: ComponentType, begin: bool) -> Option<BioLabel> {
        let pos = ComponentType::LOGOS.iter().position(|c| *c == component)?;
        Some(BioLabel::ALL[1 + 2 * pos + usize::from(!begin)])
    }

    pub fn component(self) -> Option<ComponentType> {
        match self {
            BioLabel::O => None,
            l => Some(ComponentType::LOGOS[(l.index() - 1) / 2]),
        }
    }

    pub fn is_begin(self) -> bool {
        self != BioLabel::O && self.index() % 2 == 1
    }

    pub fn is_inside(self) -> bool {
        self != BioLabel::O && self.index() % 2 == 0
    }

    /// The inside variant of the same component type; O stays O.
    pub fn inside(self) -> BioLabel {
        match self.component() {
            Some(c) => BioLabel::new(c, false).expect("logos type"),
            None => BioLabel::O,
        }
    }
}

impl fmt::Display for BioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BioLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BioLabel::ALL
            .iter()
            .copied()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown BIO label `{s}`")))
    }
}

impl Serialize for BioLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for BioLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One label per sentence of a document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceLabeling {
    pub doc_id: String,
    pub labels: Vec<BioLabel>,
}

/// Projects the logos spans of `annotation` onto sentences.
///
/// Each sentence takes the component with the most tokens inside it; ties go
/// to the component starting earliest. The label is `-B` when that
/// component's first token lies in the sentence and `-I` otherwise.
pub fn sentence_approximate(doc: &Document, annotation: &AnnotationSet) -> SentenceLabeling {
    let spans = annotation.logos_spans();
    let labels = (0..doc.sentence_count())
        .map(|i| {
            let range = doc.sentence_tokens(i);
            let mut best: Option<(&ComponentSpan, usize)> = None;
            for span in &spans {
                let lo = span.first_token.max(range.start);
                let hi = (span.last_token + 1).min(range.end);
                if hi <= lo {
                    continue;
                }
                let inside = hi - lo;
                // Spans are sorted by start, so strict > keeps the earliest on ties.
                if best.is_none_or(|(_, n)| inside > n) {
                    best = Some((span, inside));
                }
            }
            match best {
                None => BioLabel::O,
                Some((span, _)) => {
                    BioLabel::new(span.component_type, range.contains(&span.first_token))
                        .expect("logos span")
                }
            }
        })
        .collect();
    SentenceLabeling {
        doc_id: doc.id.clone(),
        labels,
    }
}

/// Spreads sentence labels over their tokens. A `-B` sentence yields `-B`
/// on its first token and `-I` on the rest.
pub fn expand_to_tokens(doc: &Document, labeling: &SentenceLabeling) -> Result<Vec<BioLabel>> {
    if labeling.labels.len() != doc.sentence_count() {
        return Err(Error::LengthMismatch {
            what: "sentence labels vs sentences",
            left: labeling.labels.len(),
            right: doc.sentence_count(),
        });
    }
    let mut out = vec![BioLabel::O; doc.token_count()];
    for (i, &label) in labeling.labels.iter().enumerate() {
        let range = doc.sentence_tokens(i);
        for (k, t) in range.enumerate() {
            out[t] = if k == 0 { label } else { label.inside() };
        }
    }
    Ok(out)
}

/// Token-level BIO labels of the logos spans in `annotation`.
pub fn tokens_from_annotation(doc: &Document, annotation: &AnnotationSet) -> Vec<BioLabel> {
    let n = doc.token_count();
    let mut out = vec![BioLabel::O; n];
    for span in annotation.logos_spans() {
        for t in span.tokens().filter(|&t| t < n) {
            let begin = t == span.first_token;
            out[t] = BioLabel::new(span.component_type, begin).expect("logos span");
        }
    }
    out
}

/// Scores the sentence-level approximation of the gold data against the
/// token-level gold data, pooled over the whole corpus.
pub fn oracle_eval(corpus: &Corpus) -> Result<TokenScores> {
    let mut cm = ConfusionMatrix::default();
    for doc in &corpus.documents {
        let gold = doc.gold.as_ref().ok_or_else(|| {
            Error::InvalidInput(format!("document {} has no gold annotation", doc.id))
        })?;
        let approx = expand_to_tokens(doc, &sentence_approximate(doc, gold))?;
        cm.add_sequences(&tokens_from_annotation(doc, gold), &approx)?;
    }
    Ok(cm.scores())
}

/// One row of the token-label dump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenLabelRow {
    pub doc_id: String,
    pub token_index: usize,
    pub gold: BioLabel,
    pub predicted: BioLabel,
}

pub const TOKEN_DUMP_HEADER: &str = "doc_id\ttoken_index\tgold_label\tpredicted_label";

pub fn write_token_dump<W: Write>(mut w: W, rows: &[TokenLabelRow]) -> std::io::Result<()> {
    writeln!(w, "{TOKEN_DUMP_HEADER}")?;
    for r in rows {
        writeln!(w, "{}\t{}\t{}\t{}", r.doc_id, r.token_index, r.gold, r.predicted)?;
    }
    Ok(())
}

pub fn read_token_dump<R: BufRead>(r: R) -> Result<Vec<TokenLabelRow>> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Format {
            line: line_no,
            message: e.to_string(),
        })?;
        if i == 0 {
            if line != TOKEN_DUMP_HEADER {
                return Err(Error::Format {
                    line: 1,
                    message: format!("expected header `{TOKEN_DUMP_HEADER}`"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let bad = |message: String| Error::Format {
            line: line_no,
            message,
        };
        if cols.len() != 4 {
            return Err(bad(format!("expected 4 columns, found {}", cols.len())));
        }
        rows.push(TokenLabelRow {
            doc_id: cols[0].to_string(),
            token_index: cols[1].parse().map_err(|_| bad(format!("bad token index `{}`", cols[1])))?,
            gold: cols[2].parse().map_err(|e: Error| bad(e.to_string()))?,
            predicted: cols[3].parse().map_err(|e: Error| bad(e.to_string()))?,
        });
    }
    Ok(rows)
}
