//! Document-level persuasive / non-persuasive classifier over binary 1-3
//! gram features, trained with the averaged perceptron.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::features::{build_vocabulary, lowercase_sentences, Vocabulary};
use crate::par::{derive_seed, Exec};

pub const CLASSIFIER_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DocClassifierConfig {
    pub epochs: usize,
    pub seed: u64,
    pub min_count: usize,
    pub averaging: bool,
}

impl Default for DocClassifierConfig {
    fn default() -> Self {
        DocClassifierConfig {
            epochs: 10,
            seed: 0,
            min_count: 2,
            averaging: true,
        }
    }
}

/// A document reduced to its label and sorted vocabulary ids.
#[derive(Clone, Debug, PartialEq)]
pub struct DocInstance {
    pub doc_id: String,
    pub label: Option<bool>,
    pub features: Vec<u32>,
}

pub fn doc_instance(doc: &Document, vocab: &Vocabulary) -> DocInstance {
    let mut features: Vec<u32> = lowercase_sentences(doc).iter().flat_map(|s| vocab.hits(s)).collect();
    features.sort_unstable();
    features.dedup();
    DocInstance {
        doc_id: doc.id.clone(),
        label: doc.persuasive.as_ref().map(|p| p.label),
        features,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearTextClassifier {
    pub vocab: Vocabulary,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearTextClassifier {
    pub fn score_features(&self, features: &[u32]) -> f64 {
        self.bias + features.iter().map(|&f| self.weights[f as usize]).sum::<f64>()
    }

    /// `(persuasive, score)`; positive scores are persuasive.
    pub fn classify(&self, doc: &Document) -> (bool, f64) {
        let s = self.score_features(&doc_instance(doc, &self.vocab).features);
        (s > 0.0, s)
    }

    pub fn to_json(&self) -> Result<String> {
        let num = |x: f64| -> Result<Box<RawValue>> {
            if !x.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite weight {x}")));
            }
            RawValue::from_string(format!("{x:.16e}")).map_err(|e| Error::json(&e))
        };
        let mut weights = BTreeMap::new();
        for (g, &w) in self.vocab.entries().iter().zip(&self.weights) {
            if w != 0.0 {
                weights.insert(g.clone(), num(w)?);
            }
        }
        let file = ClassifierOut {
            version: CLASSIFIER_VERSION,
            min_count: self.vocab.min_count,
            bias: num(self.bias)?,
            weights,
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::json(&e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ClassifierIn = serde_json::from_str(text).map_err(|e| Error::json(&e))?;
        if file.version != CLASSIFIER_VERSION {
            return Err(Error::Version {
                found: file.version.to_string(),
                expected: CLASSIFIER_VERSION.to_string(),
            });
        }
        if !file.bias.is_finite() || file.weights.values().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput("classifier weights must be finite".into()));
        }
        let vocab = Vocabulary::from_entries(file.min_count, file.weights.keys().cloned().collect());
        let weights = vocab.entries().iter().map(|g| file.weights[g]).collect();
        Ok(LinearTextClassifier {
            vocab,
            weights,
            bias: file.bias,
        })
    }
}

#[derive(Serialize)]
struct ClassifierOut {
    version: u32,
    min_count: usize,
    bias: Box<RawValue>,
    weights: BTreeMap<String, Box<RawValue>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifierIn {
    version: u32,
    min_count: usize,
    bias: f64,
    weights: BTreeMap<String, f64>,
}

pub fn save_classifier(model: &LinearTextClassifier, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model.to_json()? + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_classifier(path: impl AsRef<Path>) -> Result<LinearTextClassifier> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    LinearTextClassifier::from_json(&text)
}

/// Trains on the labeled documents among `train`.
pub fn train_doc_classifier(corpus: &Corpus, train: &[usize], config: &DocClassifierConfig) -> Result<LinearTextClassifier> {
    if config.epochs == 0 {
        return Err(Error::InvalidInput("epochs must be at least 1".into()));
    }
    let labeled: Vec<usize> = train
        .iter()
        .copied()
        .filter(|&d| corpus.documents[d].persuasive.is_some())
        .collect();
    let vocab = build_vocabulary(corpus, &labeled, config.min_count);
    let data: Vec<(Vec<u32>, f64)> = labeled
        .iter()
        .map(|&d| {
            let inst = doc_instance(&corpus.documents[d], &vocab);
            (inst.features, if inst.label == Some(true) { 1.0 } else { -1.0 })
        })
        .collect();
    let positives = data.iter().filter(|(_, y)| *y > 0.0).count();
    if positives == 0 || positives == data.len() {
        return Err(Error::InvalidInput(format!(
            "training data needs both classes ({positives} persuasive of {})",
            data.len()
        )));
    }
    let n = vocab.len();
    let (mut w, mut u) = (vec![0.0; n], vec![0.0; n]);
    let (mut b, mut ub) = (0.0, 0.0);
    let mut c = 1.0;
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 0..config.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, epoch as u64));
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, y) = &data[i];
            let s = b + x.iter().map(|&f| w[f as usize]).sum::<f64>();
            if y * s <= 0.0 {
                for &f in x {
                    w[f as usize] += y;
                    u[f as usize] += c * y;
                }
                b += y;
                ub += c * y;
            }
            c += 1.0;
        }
    }
    if config.averaging {
        for (w, u) in w.iter_mut().zip(&u) {
            *w -= u / c;
        }
        b -= ub / c;
    }
    Ok(LinearTextClassifier { vocab, weights: w, bias: b })
}

/// Binary classification scores; the positive class is "persuasive".
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BinaryScores {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub f1_persuasive: f64,
    pub f1_non_persuasive: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
}

fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let p = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let r = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

impl BinaryScores {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let pos = f1(tp, fp, fn_);
        let neg = f1(tn, fn_, fp);
        let total = tp + fp + fn_ + tn;
        BinaryScores {
            tp,
            fp,
            fn_,
            tn,
            f1_persuasive: pos,
            f1_non_persuasive: neg,
            macro_f1: (pos + neg) / 2.0,
            accuracy: if total == 0 { 0.0 } else { (tp + tn) as f64 / total as f64 },
        }
    }
}

pub fn binary_scores(gold: &[bool], predicted: &[bool]) -> Result<BinaryScores> {
    if gold.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            what: "gold and predicted labels",
            left: gold.len(),
            right: predicted.len(),
        });
    }
    let mut c = [0usize; 4];
    for (&g, &p) in gold.iter().zip(predicted) {
        c[match (g, p) {
            (true, true) => 0,
            (false, true) => 1,
            (true, false) => 2,
            (false, false) => 3,
        }] += 1;
    }
    Ok(BinaryScores::from_counts(c[0], c[1], c[2], c[3]))
}

/// Gold and predicted labels of the labeled documents among `test`.
pub fn predict_docs(model: &LinearTextClassifier, corpus: &Corpus, test: &[usize]) -> (Vec<bool>, Vec<bool>) {
    test.iter()
        .filter_map(|&d| {
            let doc = &corpus.documents[d];
            doc.persuasive.as_ref().map(|p| (p.label, model.classify(doc).0))
        })
        .unzip()
}

pub fn evaluate_docs(model: &LinearTextClassifier, corpus: &Corpus, test: &[usize]) -> Result<BinaryScores> {
    let (g, p) = predict_docs(model, corpus, test);
    binary_scores(&g, &p)
}

/// k-fold cross-validation over a seeded shuffle of the labeled documents,
/// scored on the pooled predictions.
pub fn cross_validate_docs(corpus: &Corpus, k: usize, config: &DocClassifierConfig, exec: &Exec) -> Result<BinaryScores> {
    let mut ids: Vec<usize> = (0..corpus.len()).filter(|&d| corpus.documents[d].persuasive.is_some()).collect();
    if k < 2 || k > ids.len() {
        return Err(Error::InvalidInput(format!("{k} folds for {} labeled documents", ids.len())));
    }
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let folds = crate::evaluation::contiguous_folds(ids.len(), k);
    let results = exec.map_range(k, |f| {
        let test: Vec<usize> = folds[f].clone().map(|i| ids[i]).collect();
        let train: Vec<usize> = (0..ids.len()).filter(|i| !folds[f].contains(i)).map(|i| ids[i]).collect();
        let cfg = DocClassifierConfig {
            seed: derive_seed(config.seed, f as u64),
            ..config.clone()
        };
        train_doc_classifier(corpus, &train, &cfg).map(|m| predict_docs(&m, corpus, &test))
    });
    let (mut gold, mut pred) = (Vec::new(), Vec::new());
    for r in results {
        let (g, p) = r?;
        gold.extend(g);
        pred.extend(p);
    }
    binary_scores(&gold, &pred)
}
