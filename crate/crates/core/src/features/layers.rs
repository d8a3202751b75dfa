//! Precomputed linguistic layers read from a JSON sidecar keyed by document
//! id. Every section is optional.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Syntax {
    /// Dependency tree depth per sentence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<Vec<f64>>,
    /// Constituency production rules per sentence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub productions: Option<Vec<Vec<String>>>,
    /// Sub-clause count per sentence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subclauses: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentLayers {
    /// One tag per token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Vec<String>>,
    /// Five sentiment scores per sentence, very negative to very positive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<Vec<[f64; 5]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub syntax: Option<Syntax>,
    /// Semantic-role strings per sentence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub srl: Option<Vec<Vec<String>>>,
    /// Coreference-chain strings per sentence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coref: Option<Vec<Vec<String>>>,
    /// Discourse-relation strings per sentence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discourse: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinguisticLayers {
    pub documents: BTreeMap<String, DocumentLayers>,
}

fn check_len(doc: &Document, section: &str, found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::Validation {
            doc_id: doc.id.clone(),
            field: format!("layers.{section}"),
            message: format!("{found} entries, document has {expected}"),
        });
    }
    Ok(())
}

impl LinguisticLayers {
    pub fn from_json_str(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::json(&e))
    }

    pub fn get(&self, doc_id: &str) -> Option<&DocumentLayers> {
        self.documents.get(doc_id)
    }

    /// Checks that every section has one entry per token or sentence.
    pub fn validate(&self, corpus: &Corpus) -> Result<()> {
        for doc in &corpus.documents {
            let Some(l) = self.get(&doc.id) else { continue };
            let (nt, ns) = (doc.token_count(), doc.sentence_count());
            if let Some(p) = &l.pos {
                check_len(doc, "pos", p.len(), nt)?;
            }
            if let Some(s) = &l.sentiment {
                check_len(doc, "sentiment", s.len(), ns)?;
                if s.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::Validation {
                        doc_id: doc.id.clone(),
                        field: "layers.sentiment".into(),
                        message: "non-finite score".into(),
                    });
                }
            }
            if let Some(sx) = &l.syntax {
                if let Some(d) = &sx.depth {
                    check_len(doc, "syntax.depth", d.len(), ns)?;
                }
                if let Some(p) = &sx.productions {
                    check_len(doc, "syntax.productions", p.len(), ns)?;
                }
                if let Some(c) = &sx.subclauses {
                    check_len(doc, "syntax.subclauses", c.len(), ns)?;
                }
            }
            for (name, sec) in [("srl", &l.srl), ("coref", &l.coref), ("discourse", &l.discourse)] {
                if let Some(s) = sec {
                    check_len(doc, name, s.len(), ns)?;
                }
            }
        }
        Ok(())
    }
}

pub fn load_layers(path: impl AsRef<Path>) -> Result<LinguisticLayers> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    LinguisticLayers::from_json_str(&text)
}
