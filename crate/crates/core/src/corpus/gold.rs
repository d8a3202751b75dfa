use serde::Serialize;

use super::{AnnotationSet, ComponentSpan, ComponentType, Dimension, Document};
use crate::error::{Error, Result};

/// Tokens of one dimension for which no label reached a strict majority.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnresolvedRegion {
    pub dimension: Dimension,
    pub first_token: usize,
    pub last_token: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldMajority {
    pub gold: AnnotationSet,
    pub unresolved: Vec<UnresolvedRegion>,
}

/// Builds a gold annotation set by token-level strict-majority voting,
/// separately per dimension.
///
/// Adjacent tokens with the same majority label are merged into one span,
/// except where at least two annotators start a component of that label at a
/// token; there a new span begins. Tokens without a strict majority are
/// labeled as outside any component and reported as unresolved.
pub fn build_gold_majority(doc: &Document) -> Result<GoldMajority> {
    let sets = &doc.annotations;
    if sets.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "document {}: majority vote needs at least 3 annotation sets, found {}",
            doc.id,
            sets.len()
        )));
    }
    let n = doc.token_count();
    let mut spans = Vec::new();
    let mut unresolved = Vec::new();

    for dim in [Dimension::Logos, Dimension::Pathos] {
        // Per annotator: label per token and span-start markers.
        let mut labels: Vec<Vec<Option<ComponentType>>> = Vec::with_capacity(sets.len());
        let mut starts: Vec<Vec<bool>> = Vec::with_capacity(sets.len());
        for set in sets {
            let mut l = vec![None; n];
            let mut s = vec![false; n];
            for span in set.spans_in(dim) {
                for t in span.tokens().filter(|&t| t < n) {
                    l[t] = Some(span.component_type);
                }
                if span.first_token < n {
                    s[span.first_token] = true;
                }
            }
            labels.push(l);
            starts.push(s);
        }

        let mut majority: Vec<Option<ComponentType>> = vec![None; n];
        let mut open_unresolved: Option<usize> = None;
        for t in 0..n {
            match strict_majority(labels.iter().map(|l| l[t])) {
                Some(label) => {
                    majority[t] = label;
                    if let Some(first) = open_unresolved.take() {
                        unresolved.push(UnresolvedRegion {
                            dimension: dim,
                            first_token: first,
                            last_token: t - 1,
                        });
                    }
                }
                None => {
                    open_unresolved.get_or_insert(t);
                }
            }
        }
        if let Some(first) = open_unresolved {
            unresolved.push(UnresolvedRegion {
                dimension: dim,
                first_token: first,
                last_token: n - 1,
            });
        }

        let mut t = 0;
        while t < n {
            let Some(label) = majority[t] else {
                t += 1;
                continue;
            };
            let first = t;
            t += 1;
            while t < n && majority[t] == Some(label) {
                let agreed_start = (0..sets.len())
                    .filter(|&a| starts[a][t] && labels[a][t] == Some(label))
                    .count();
                if agreed_start >= 2 {
                    break;
                }
                t += 1;
            }
            let mut span = ComponentSpan::new(label, first, t - 1);
            // Carry over metadata from the first annotator with an identical span.
            if let Some(src) = sets
                .iter()
                .flat_map(|s| s.spans.iter())
                .find(|s| s.component_type == label && s.first_token == first && s.last_token == t - 1)
            {
                span.summary = src.summary.clone();
                span.implicit = src.implicit;
            }
            spans.push(span);
        }
    }

    let stance = strict_majority(sets.iter().map(|s| s.implicit_claim_stance.clone())).flatten();
    Ok(GoldMajority {
        gold: AnnotationSet {
            annotator: "gold".into(),
            spans,
            implicit_claim_stance: stance,
        },
        unresolved,
    })
}

/// The value chosen by more than half of the voters, if any.
fn strict_majority<T: PartialEq>(votes: impl Iterator<Item = T>) -> Option<T> {
    let votes: Vec<T> = votes.collect();
    let n = votes.len();
    for (i, v) in votes.iter().enumerate() {
        let count = votes.iter().filter(|w| *w == v).count();
        if count * 2 > n {
            return votes.into_iter().nth(i);
        }
    }
    None
}
