use std::collections::BTreeMap;

use serde::Serialize;

use super::{Corpus, Register, Topic};
use crate::encoding::{sentence_approximate, BioLabel};

/// Totals with per-document mean and sample standard deviation.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LengthStats {
    pub documents: usize,
    pub tokens: usize,
    pub tokens_mean: f64,
    pub tokens_sd: f64,
    pub sentences: usize,
    pub sentences_mean: f64,
    pub sentences_sd: f64,
}

impl LengthStats {
    fn from_lengths(tokens: &[usize], sentences: &[usize]) -> Self {
        let (tm, tsd) = mean_sd(tokens);
        let (sm, ssd) = mean_sd(sentences);
        LengthStats {
            documents: tokens.len(),
            tokens: tokens.iter().sum(),
            tokens_mean: tm,
            tokens_sd: tsd,
            sentences: sentences.iter().sum(),
            sentences_mean: sm,
            sentences_sd: ssd,
        }
    }
}

fn mean_sd(xs: &[usize]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().map(|&x| x as f64).sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CorpusStatistics {
    pub documents: usize,
    /// Document counts per topic and register.
    pub topic_register: BTreeMap<Topic, BTreeMap<Register, usize>>,
    pub by_register: BTreeMap<Register, LengthStats>,
    pub all: LengthStats,
    /// Sentence counts per BIO class after the sentence-level approximation
    /// of the gold annotations. Absent when some document lacks gold.
    pub class_distribution: Option<BTreeMap<String, usize>>,
    pub notices: Vec<String>,
}

impl CorpusStatistics {
    pub fn class_count(&self, label: BioLabel) -> Option<usize> {
        self.class_distribution
            .as_ref()
            .map(|d| d.get(label.name()).copied().unwrap_or(0))
    }
}

pub fn corpus_statistics(corpus: &Corpus) -> CorpusStatistics {
    let mut stats = CorpusStatistics {
        documents: corpus.len(),
        ..Default::default()
    };
    for doc in &corpus.documents {
        *stats
            .topic_register
            .entry(doc.topic)
            .or_default()
            .entry(doc.register)
            .or_default() += 1;
    }

    let lengths = |filter: &dyn Fn(Register) -> bool| {
        let docs: Vec<_> = corpus.documents.iter().filter(|d| filter(d.register)).collect();
        let t: Vec<usize> = docs.iter().map(|d| d.token_count()).collect();
        let s: Vec<usize> = docs.iter().map(|d| d.sentence_count()).collect();
        LengthStats::from_lengths(&t, &s)
    };
    for reg in Register::ALL {
        if corpus.documents.iter().any(|d| d.register == reg) {
            stats.by_register.insert(reg, lengths(&|r| r == reg));
        }
    }
    stats.all = lengths(&|_| true);

    let missing: Vec<&str> = corpus
        .documents
        .iter()
        .filter(|d| d.gold.is_none())
        .map(|d| d.id.as_str())
        .collect();
    if missing.is_empty() {
        let mut dist: BTreeMap<String, usize> =
            BioLabel::ALL.iter().map(|l| (l.name().to_string(), 0)).collect();
        for doc in &corpus.documents {
            let gold = doc.gold.as_ref().expect("checked above");
            for label in sentence_approximate(doc, gold).labels {
                *dist.get_mut(label.name()).expect("all labels present") += 1;
            }
        }
        stats.class_distribution = Some(dist);
    } else {
        stats.notices.push(format!(
            "class distribution omitted: {} document(s) without gold annotations (first: {})",
            missing.len(),
            missing[0]
        ));
    }
    stats
}
