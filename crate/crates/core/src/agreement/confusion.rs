use serde::{Deserialize, Serialize};

use crate::corpus::{ComponentType, Corpus, Dimension, Document};
use crate::error::{Error, Result};

/// Pairwise label confusion between annotators. `labels[0]` is "none"; the
/// rest are the selected component types.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbConfusion {
    pub labels: Vec<String>,
    /// Row `j`: distribution of the other annotator's label given that one
    /// annotator chose label `j`. `None` for labels nobody used.
    pub rows: Vec<Option<Vec<f64>>>,
    pub counts: Vec<Vec<u64>>,
}

/// Per-token label indices of one annotator: 0 for none, `k + 1` for
/// `categories[k]`. Types outside `categories` count as none.
pub fn token_label_indices(doc: &Document, annotator: &str, categories: &[ComponentType]) -> Option<Vec<usize>> {
    let set = doc.annotation(annotator)?;
    let mut out = vec![0; doc.token_count()];
    for span in &set.spans {
        if let Some(k) = categories.iter().position(|c| *c == span.component_type) {
            let n = out.len();
            for t in span.tokens().filter(|&t| t < n) {
                out[t] = k + 1;
            }
        }
    }
    Some(out)
}

/// Accumulates counts over all ordered annotator pairs and tokens, then
/// normalizes each row.
pub fn confusion_from_assignments(docs: &[Vec<Vec<usize>>], n_labels: usize) -> (Vec<Vec<u64>>, Vec<Option<Vec<f64>>>) {
    let mut counts = vec![vec![0u64; n_labels]; n_labels];
    for annotators in docs {
        for (i, a) in annotators.iter().enumerate() {
            for (j, b) in annotators.iter().enumerate() {
                if i == j {
                    continue;
                }
                for (x, y) in a.iter().zip(b) {
                    counts[*x][*y] += 1;
                }
            }
        }
    }
    let rows = counts
        .iter()
        .map(|row| {
            let total: u64 = row.iter().sum();
            (total > 0).then(|| row.iter().map(|&c| c as f64 / total as f64).collect())
        })
        .collect();
    (counts, rows)
}

/// Probabilistic confusion matrix over the listed annotators. Each document
/// contributes the listed annotators it carries, if at least two.
pub fn prob_confusion_matrix(
    corpus: &Corpus,
    annotators: &[String],
    categories: &[ComponentType],
) -> Result<ProbConfusion> {
    if annotators.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 annotators".into()));
    }
    if categories.iter().any(|c| c.dimension() != categories[0].dimension()) {
        return Err(Error::InvalidInput("categories must share one dimension".into()));
    }
    let docs: Vec<Vec<Vec<usize>>> = corpus
        .documents
        .iter()
        .map(|d| {
            annotators
                .iter()
                .filter_map(|a| token_label_indices(d, a, categories))
                .collect::<Vec<_>>()
        })
        .filter(|rows| rows.len() >= 2)
        .collect();
    if docs.is_empty() {
        return Err(Error::InvalidInput("no document has two of the listed annotators".into()));
    }
    let (counts, rows) = confusion_from_assignments(&docs, categories.len() + 1);
    let mut labels = vec!["none".to_string()];
    labels.extend(categories.iter().map(|c| c.as_str().to_string()));
    Ok(ProbConfusion { labels, rows, counts })
}

/// Logos categories in label order.
pub fn logos_categories() -> Vec<ComponentType> {
    ComponentType::ALL
        .iter()
        .copied()
        .filter(|c| c.dimension() == Dimension::Logos)
        .collect()
}
