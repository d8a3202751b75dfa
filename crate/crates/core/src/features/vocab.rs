use std::collections::BTreeMap;
use std::collections::HashMap;

use crate::corpus::{Corpus, Document};

pub const MAX_NGRAM: usize = 3;

/// Lowercased tokens of each sentence.
pub fn lowercase_sentences(doc: &Document) -> Vec<Vec<String>> {
    let tokens = doc.token_strings();
    (0..doc.sentence_count())
        .map(|i| doc.sentence_tokens(i).map(|t| tokens[t].to_lowercase()).collect())
        .collect()
}

/// Space-joined 1- to 3-grams of one token sequence.
pub fn ngrams(tokens: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for n in 1..=MAX_NGRAM {
        for w in tokens.windows(n) {
            out.push(w.join(" "));
        }
    }
    out
}

/// FS0 n-gram vocabulary with ids in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Vocabulary {
    pub min_count: usize,
    entries: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn from_entries(min_count: usize, mut entries: Vec<String>) -> Self {
        entries.sort();
        entries.dedup();
        let index = entries.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        Vocabulary {
            min_count,
            entries,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, ngram: &str) -> Option<u32> {
        self.index.get(ngram).copied()
    }

    pub fn contains(&self, ngram: &str) -> bool {
        self.index.contains_key(ngram)
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    /// Sorted, deduplicated vocabulary ids of a sentence's n-grams.
    pub fn hits(&self, tokens: &[String]) -> Vec<u32> {
        let mut ids: Vec<u32> = ngrams(tokens).iter().filter_map(|g| self.id(g)).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// N-grams (n = 1..3, lowercased, within sentences) occurring at least
/// `min_count` times over the training documents.
pub fn build_vocabulary(corpus: &Corpus, train: &[usize], min_count: usize) -> Vocabulary {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for &d in train {
        for sentence in lowercase_sentences(&corpus.documents[d]) {
            for g in ngrams(&sentence) {
                *counts.entry(g).or_default() += 1;
            }
        }
    }
    let entries = counts
        .into_iter()
        .filter(|(_, c)| *c >= min_count.max(1))
        .map(|(g, _)| g)
        .collect();
    Vocabulary::from_entries(min_count, entries)
}
