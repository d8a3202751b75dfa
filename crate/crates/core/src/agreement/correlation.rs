use serde::{Deserialize, Serialize};

use super::alpha::{alpha_u, Continuum};
use super::readability::document_readability;
use crate::corpus::{ComponentType, Corpus, Document, Register, Topic};
use crate::error::{Error, Result};

pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            what: "correlation inputs",
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "correlation needs at least 3 pairs, found {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Restricts an analysis to documents of one register and/or topic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subset {
    pub register: Option<Register>,
    pub topic: Option<Topic>,
}

impl Subset {
    pub fn all() -> Self {
        Subset::default()
    }

    pub fn contains(&self, doc: &Document) -> bool {
        self.register.is_none_or(|r| doc.register == r) && self.topic.is_none_or(|t| doc.topic == t)
    }

    pub fn describe(&self) -> String {
        match (self.register, self.topic) {
            (None, None) => "all".into(),
            (Some(r), None) => r.to_string(),
            (None, Some(t)) => t.to_string(),
            (Some(r), Some(t)) => format!("{r}/{t}"),
        }
    }
}

pub const MEASURES: [&str; 8] = ["SC", "DL", "APL", "ASL", "ARI", "CL", "Flesch", "LIX"];

/// Share of component boundaries (starts and ends over all listed
/// annotators) that coincide with sentence boundaries.
pub fn sentence_coverage(doc: &Document, annotators: &[String], categories: &[ComponentType]) -> Option<f64> {
    let starts: Vec<usize> = (0..doc.sentence_count()).map(|i| doc.sentence_tokens(i).start).collect();
    let ends: Vec<usize> = (0..doc.sentence_count())
        .map(|i| doc.sentence_tokens(i).end)
        .filter(|&e| e > 0)
        .map(|e| e - 1)
        .collect();
    let (mut aligned, mut total) = (0usize, 0usize);
    for a in annotators {
        let Some(set) = doc.annotation(a) else { continue };
        for s in set.spans.iter().filter(|s| categories.contains(&s.component_type)) {
            total += 2;
            aligned += usize::from(starts.contains(&s.first_token));
            aligned += usize::from(ends.contains(&s.last_token));
        }
    }
    (total > 0).then(|| aligned as f64 / total as f64)
}

/// The eight per-document measures in [`MEASURES`] order.
pub fn document_measures(doc: &Document, annotators: &[String], categories: &[ComponentType]) -> Result<[f64; 8]> {
    let sc = sentence_coverage(doc, annotators, categories)
        .ok_or_else(|| Error::Undefined(format!("document {} has no components", doc.id)))?;
    let tokens = doc.token_count() as f64;
    let r = document_readability(doc)?;
    Ok([
        sc,
        tokens,
        tokens / doc.paragraphs.len().max(1) as f64,
        tokens / doc.sentence_count().max(1) as f64,
        r.ari,
        r.coleman_liau,
        r.flesch,
        r.lix,
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub measure: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub subset: String,
    pub documents: usize,
    pub cells: Vec<CorrelationCell>,
}

/// Pearson r between document-local alpha and each measure, over the
/// documents in `subset` for which both are defined.
pub fn disagreement_correlates(
    corpus: &Corpus,
    subset: Subset,
    annotators: &[String],
    categories: &[ComponentType],
) -> Result<CorrelationTable> {
    let mut alphas = Vec::new();
    let mut measures: Vec<[f64; 8]> = Vec::new();
    let mut considered = 0;
    for doc in corpus.documents.iter().filter(|d| subset.contains(d)) {
        considered += 1;
        let Ok(c) = Continuum::from_document(doc, annotators) else { continue };
        let (Ok(a), Ok(m)) = (alpha_u(&c, categories), document_measures(doc, annotators, categories)) else {
            continue;
        };
        alphas.push(a);
        measures.push(m);
    }
    if considered == 0 {
        return Err(Error::InvalidInput(format!("subset {} is empty", subset.describe())));
    }
    let cells = MEASURES
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let xs: Vec<f64> = measures.iter().map(|m| m[k]).collect();
            match pearson_r(&xs, &alphas) {
                Ok(r) => CorrelationCell {
                    measure: name.to_string(),
                    r: Some(r),
                    error: None,
                },
                Err(e) => CorrelationCell {
                    measure: name.to_string(),
                    r: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(CorrelationTable {
        subset: subset.describe(),
        documents: alphas.len(),
        cells,
    })
}
