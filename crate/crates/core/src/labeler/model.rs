//! The sentence labeler: feature layout, training, prediction and model files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::perceptron::{train_perceptron, ChainWeights, Observation, TrainingConfig, TrainingHistory};
use crate::corpus::Corpus;
use crate::encoding::{expand_to_tokens, sentence_approximate, BioLabel, SentenceLabeling};
use crate::error::{Error, Result};
use crate::features::{
    split_prefix, window_prefix, FeatureConfig, FoldResources, Interner, Resources, SentenceFeatures, StaticFeatures,
    TopicModel, Vocabulary,
};
use crate::par::Exec;

pub const MODEL_VERSION: u32 = 1;

const FS0_PREFIX: &str = "FS0_ng=";
const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
    pub averaging: bool,
    pub documents: usize,
    pub sentences: usize,
    pub history: TrainingHistory,
}

/// A document's sentences in model-local feature ids, expanded over the
/// context window on the fly.
struct WindowedSequence {
    window: usize,
    width: usize,
    current_base: usize,
    local: Vec<Vec<(u32, f64)>>,
    current: Vec<Vec<u32>>,
}

impl Observation for WindowedSequence {
    fn len(&self) -> usize {
        self.local.len()
    }

    fn for_each_feature(&self, i: usize, f: &mut dyn FnMut(usize, f64)) {
        let c = self.window as isize;
        for k in -c..=c {
            let j = i as isize + k;
            if j < 0 || j >= self.local.len() as isize {
                continue;
            }
            let slot = (k + c) as usize * self.width;
            for &(g, v) in &self.local[j as usize] {
                f(slot + g as usize, v);
            }
        }
        for &id in &self.current[i] {
            f(self.current_base + id as usize, 1.0);
        }
    }
}

/// First-order linear-chain model over the 11 sentence labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearChainModel {
    pub config: FeatureConfig,
    /// Embedding dimension the model was trained with, if FS4 is active.
    pub embedding_dim: Option<usize>,
    space: Interner,
    vocab: Option<Vocabulary>,
    topic_model: Option<TopicModel>,
    weights: ChainWeights,
    pub metadata: TrainingMetadata,
}

fn layout(config: &FeatureConfig, width: usize) -> usize {
    (2 * config.window + 1) * width
}

/// Trains on the documents `train` (indices into `corpus`) using the fold's
/// fitted resources.
pub fn train(
    corpus: &Corpus,
    cache: &StaticFeatures,
    fold: &FoldResources,
    config: &FeatureConfig,
    train: &[usize],
    training: &TrainingConfig,
    embedding_dim: Option<usize>,
) -> Result<LinearChainModel> {
    if train.is_empty() {
        return Err(Error::InvalidInput("no training documents".into()));
    }
    let mut space = Interner::default();
    let mut remap = vec![ABSENT; cache.space.len()];
    let mut data = Vec::with_capacity(train.len());
    let mut raw = Vec::with_capacity(train.len());
    for &d in train {
        let doc = &corpus.documents[d];
        let gold = doc
            .gold
            .as_ref()
            .ok_or_else(|| Error::InvalidInput(format!("document {} has no gold annotation", doc.id)))?;
        if doc.sentence_count() == 0 {
            continue;
        }
        let feats = fold.document(cache, config, d);
        for s in &feats {
            for &(g, _) in &s.local {
                if remap[g as usize] == ABSENT {
                    remap[g as usize] = space.intern(cache.space.name(g));
                }
            }
        }
        let labels: Vec<usize> = sentence_approximate(doc, gold).labels.iter().map(|l| l.index()).collect();
        raw.push((feats, labels));
    }
    let width = space.len();
    let vocab = fold.vocab.clone().filter(|_| config.sets.contains(0));
    let dim = layout(config, width) + vocab.as_ref().map_or(0, Vocabulary::len);
    let mut sentences = 0;
    for (feats, labels) in raw {
        sentences += labels.len();
        data.push((sequence(config, width, &remap, &feats), labels));
    }
    let (weights, history) = train_perceptron(dim, BioLabel::COUNT, &data, training)?;
    Ok(LinearChainModel {
        config: config.clone(),
        embedding_dim: embedding_dim.filter(|_| config.sets.contains(4)),
        space,
        vocab,
        topic_model: fold.topic_model.clone().filter(|_| config.sets.contains(2)),
        weights,
        metadata: TrainingMetadata {
            epochs: training.epochs,
            seed: training.seed,
            shuffle: training.shuffle,
            averaging: training.averaging,
            documents: data.len(),
            sentences,
            history,
        },
    })
}

fn sequence(config: &FeatureConfig, width: usize, remap: &[u32], feats: &[SentenceFeatures]) -> WindowedSequence {
    WindowedSequence {
        window: config.window,
        width,
        current_base: layout(config, width),
        local: feats
            .iter()
            .map(|s| {
                s.local
                    .iter()
                    .filter_map(|&(g, v)| remap.get(g as usize).filter(|&&m| m != ABSENT).map(|&m| (m, v)))
                    .collect()
            })
            .collect(),
        current: feats.iter().map(|s| s.current.clone()).collect(),
    }
}

/// A model bound to one feature cache.
pub struct Predictor<'a> {
    model: &'a LinearChainModel,
    remap: Vec<u32>,
}

impl Predictor<'_> {
    pub fn decode(&self, feats: &[SentenceFeatures]) -> Vec<BioLabel> {
        let seq = sequence(&self.model.config, self.model.space.len(), &self.remap, feats);
        self.model.weights.decode(&seq).into_iter().map(BioLabel::from_index).collect()
    }
}

/// Labels of one predicted document.
#[derive(Clone, Debug, PartialEq)]
pub struct DocumentPrediction {
    pub sentences: SentenceLabeling,
    pub tokens: Vec<BioLabel>,
}

impl LinearChainModel {
    pub fn predictor(&self, cache: &StaticFeatures) -> Predictor<'_> {
        let remap = (0..cache.space.len() as u32)
            .map(|g| self.space.get(cache.space.name(g)).unwrap_or(ABSENT))
            .collect();
        Predictor { model: self, remap }
    }

    pub fn vocabulary(&self) -> Option<&Vocabulary> {
        self.vocab.as_ref()
    }

    pub fn topic_model(&self) -> Option<&TopicModel> {
        self.topic_model.as_ref()
    }

    /// The fold resources this model was trained with, over `cache`.
    pub fn fold_resources(&self, cache: &StaticFeatures) -> FoldResources {
        FoldResources::from_parts(cache, self.vocab.clone(), self.topic_model.clone())
    }

    /// Number of topics the feature cache must provide names for.
    pub fn topic_count(&self) -> usize {
        self.topic_model.as_ref().map_or(self.config.lda_topics, |t| t.topics)
    }

    /// Checks that the supplied resources match what the model was trained on.
    pub fn check_resources(&self, resources: &Resources<'_>) -> Result<()> {
        let mismatch = |supplied: String| Error::ConfigMismatch {
            model: format!("{} (embedding dim {:?})", self.config.describe(), self.embedding_dim),
            supplied,
        };
        match (self.config.sets.contains(4), resources.embeddings) {
            (true, None) => Err(Error::MissingResource {
                set: 4,
                resource: "word embeddings",
            }),
            (false, Some(e)) => Err(mismatch(format!("embeddings of dimension {}", e.dim()))),
            (true, Some(e)) if self.embedding_dim != Some(e.dim()) => {
                Err(mismatch(format!("embeddings of dimension {}", e.dim())))
            }
            _ => Ok(()),
        }
    }

    /// Feature name of flat feature index `f`.
    fn feature_name(&self, f: usize) -> String {
        let width = self.space.len();
        let base = layout(&self.config, width);
        if f >= base {
            let v = self.vocab.as_ref().expect("vocabulary present when FS0 weights exist");
            return format!("{FS0_PREFIX}{}", v.entries()[f - base]);
        }
        let k = (f / width) as isize - self.config.window as isize;
        format!("{}{}", window_prefix(k), self.space.name((f % width) as u32))
    }

    /// Emission rows with at least one nonzero weight, by feature name.
    pub fn emission_weights(&self) -> BTreeMap<String, Vec<f64>> {
        let n = BioLabel::COUNT;
        self.weights
            .emission
            .chunks(n)
            .enumerate()
            .filter(|(_, row)| row.iter().any(|w| *w != 0.0))
            .map(|(f, row)| (self.feature_name(f), row.to_vec()))
            .collect()
    }

    pub fn transition_weights(&self) -> Vec<Vec<f64>> {
        self.weights.transition.chunks(BioLabel::COUNT).map(<[f64]>::to_vec).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = |xs: &[f64]| -> Result<Box<RawValue>> {
            if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite weight {x}")));
            }
            let body: Vec<String> = xs.iter().map(|x| format!("{x:.16e}")).collect();
            RawValue::from_string(format!("[{}]", body.join(","))).map_err(|e| Error::json(&e))
        };
        let mut emission = BTreeMap::new();
        for (name, row) in self.emission_weights() {
            emission.insert(name, raw(&row)?);
        }
        let transition = self
            .transition_weights()
            .iter()
            .map(|r| raw(r))
            .collect::<Result<Vec<_>>>()?;
        let file = ModelFileOut {
            version: MODEL_VERSION,
            label_order: BioLabel::ALL.iter().map(|l| l.name()).collect(),
            feature_config: &self.config,
            embedding_dim: self.embedding_dim,
            emission_weights: emission,
            transition_weights: transition,
            training_metadata: &self.metadata,
            topic_model: self.topic_model.as_ref(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::json(&e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let probe: VersionProbe = serde_json::from_str(text).map_err(|e| Error::json(&e))?;
        if probe.version != MODEL_VERSION {
            return Err(Error::Version {
                found: probe.version.to_string(),
                expected: MODEL_VERSION.to_string(),
            });
        }
        let file: ModelFileIn = serde_json::from_str(text).map_err(|e| Error::json(&e))?;
        let names: Vec<&str> = BioLabel::ALL.iter().map(|l| l.name()).collect();
        if file.label_order != names {
            return Err(Error::InvalidInput(format!(
                "model label order {:?} differs from {:?}",
                file.label_order, names
            )));
        }
        let n = BioLabel::COUNT;
        let finite_row = |r: &Vec<f64>| r.len() == n && r.iter().all(|x| x.is_finite());
        if file.transition_weights.len() != n || !file.transition_weights.iter().all(finite_row) {
            return Err(Error::InvalidInput("transition weights must be a finite 11x11 matrix".into()));
        }
        let config = file.feature_config;
        let c = config.window as isize;
        let mut space = Interner::default();
        let mut ngrams = Vec::new();
        let mut rows = Vec::new();
        for (name, row) in &file.emission_weights {
            if !finite_row(row) {
                return Err(Error::InvalidInput(format!("emission row {name} must hold 11 finite weights")));
            }
            if let Some(g) = name.strip_prefix(FS0_PREFIX) {
                ngrams.push(g.to_string());
                continue;
            }
            let (k, base) = split_prefix(name);
            if k.abs() <= c {
                rows.push((k, space.intern(base), row));
            }
        }
        let vocab = config.sets.contains(0).then(|| Vocabulary::from_entries(config.min_count, ngrams));
        let width = space.len();
        let base = layout(&config, width);
        let dim = base + vocab.as_ref().map_or(0, Vocabulary::len);
        let mut weights = ChainWeights::zeros(dim, n);
        for (k, g, row) in rows {
            let f = (k + c) as usize * width + g as usize;
            weights.emission[f * n..(f + 1) * n].copy_from_slice(row);
        }
        if let Some(v) = &vocab {
            for (name, row) in &file.emission_weights {
                if let Some(id) = name.strip_prefix(FS0_PREFIX).and_then(|g| v.id(g)) {
                    let f = base + id as usize;
                    weights.emission[f * n..(f + 1) * n].copy_from_slice(row);
                }
            }
        }
        weights.transition = file.transition_weights.concat();
        let mut topic_model = file.topic_model;
        if let Some(tm) = &mut topic_model {
            tm.reindex();
        }
        Ok(LinearChainModel {
            config,
            embedding_dim: file.embedding_dim,
            space,
            vocab,
            topic_model,
            weights,
            metadata: file.training_metadata,
        })
    }
}

#[derive(Serialize)]
struct ModelFileOut<'a> {
    version: u32,
    label_order: Vec<&'static str>,
    feature_config: &'a FeatureConfig,
    embedding_dim: Option<usize>,
    emission_weights: BTreeMap<String, Box<RawValue>>,
    transition_weights: Vec<Box<RawValue>>,
    training_metadata: &'a TrainingMetadata,
    #[serde(skip_serializing_if = "Option::is_none")]
    topic_model: Option<&'a TopicModel>,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFileIn {
    #[allow(dead_code)]
    version: u32,
    label_order: Vec<String>,
    feature_config: FeatureConfig,
    embedding_dim: Option<usize>,
    emission_weights: BTreeMap<String, Vec<f64>>,
    transition_weights: Vec<Vec<f64>>,
    training_metadata: TrainingMetadata,
    #[serde(default)]
    topic_model: Option<TopicModel>,
}

pub fn save_model(model: &LinearChainModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model.to_json()? + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LinearChainModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    LinearChainModel::from_json(&text)
}

/// Labels every document of `corpus`.
pub fn predict_corpus(
    model: &LinearChainModel,
    corpus: &Corpus,
    resources: &Resources<'_>,
    exec: &Exec,
) -> Result<Vec<DocumentPrediction>> {
    model.check_resources(resources)?;
    let cache = StaticFeatures::build(
        corpus,
        resources,
        model.topic_count(),
        model.config.lowercase_lookup,
        Interner::default(),
    );
    let fold = model.fold_resources(&cache);
    let predictor = model.predictor(&cache);
    exec.map_range(corpus.len(), |d| {
        let doc = &corpus.documents[d];
        let sentences = SentenceLabeling {
            doc_id: doc.id.clone(),
            labels: predictor.decode(&fold.document(&cache, &model.config, d)),
        };
        let tokens = expand_to_tokens(doc, &sentences)?;
        Ok(DocumentPrediction { sentences, tokens })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::EmbeddingTable;
    use crate::synth::{DocBuilder, SynthConfig, SynthCorpus};
    use crate::{ComponentSpan, ComponentType, Register, Topic};

    fn cfg(sets: &str) -> FeatureConfig {
        let mut c = FeatureConfig::new(sets.parse().unwrap());
        c.min_count = 1;
        c.lda_topics = 3;
        c.lda_iterations = 20;
        c.window = 1;
        c
    }

    fn fit(corpus: &Corpus, emb: Option<&EmbeddingTable>, config: &FeatureConfig, epochs: usize) -> LinearChainModel {
        let r = Resources {
            embeddings: emb,
            layers: None,
        };
        let cache = StaticFeatures::build(corpus, &r, config.lda_topics, true, Interner::default());
        let ids: Vec<usize> = (0..corpus.len()).collect();
        let fold = FoldResources::fit(corpus, &cache, &ids, config, None, 1).unwrap();
        let t = TrainingConfig {
            epochs,
            seed: 3,
            ..Default::default()
        };
        train(corpus, &cache, &fold, config, &ids, &t, emb.map(EmbeddingTable::dim)).unwrap()
    }

    fn memorized_doc() -> Corpus {
        let mut d = DocBuilder::new("m", Topic::Homeschooling, Register::Comment)
            .paragraph(&[&["alpha", "beta", "."], &["gamma", "delta", "."], &["eps", "zeta", "."]])
            .paragraph(&[&["eta", "theta", "."]])
            .build();
        d.gold = Some(crate::corpus::AnnotationSet::new(
            "gold",
            vec![
                ComponentSpan::new(ComponentType::Claim, 0, 5),
                ComponentSpan::new(ComponentType::Premise, 9, 11),
            ],
        ));
        Corpus::new("m", vec![d])
    }

    #[test]
    fn memorizes_a_single_document() {
        let c = memorized_doc();
        let m = fit(&c, None, &cfg("0"), 20);
        let p = predict_corpus(&m, &c, &Resources::default(), &Exec::sequential()).unwrap();
        let gold = sentence_approximate(&c.documents[0], c.documents[0].gold.as_ref().unwrap());
        assert_eq!(p[0].sentences, gold);
    }

    #[test]
    fn round_trip_preserves_predictions() {
        let c = SynthCorpus::generate(&SynthConfig::small(12), 4);
        let e = SynthCorpus::embeddings(6, 2);
        let config = cfg("01234");
        let m = fit(&c, Some(&e), &config, 3);
        let r = Resources {
            embeddings: Some(&e),
            layers: None,
        };
        let json = m.to_json().unwrap();
        let back = LinearChainModel::from_json(&json).unwrap();
        let probe = SynthCorpus::generate(&SynthConfig::small(50), 99);
        let a = predict_corpus(&m, &probe, &r, &Exec::sequential()).unwrap();
        let b = predict_corpus(&back, &probe, &r, &Exec::parallel()).unwrap();
        assert_eq!(a, b);
        assert_eq!(back.to_json().unwrap(), json);
    }

    #[test]
    fn same_seed_same_weights() {
        let c = SynthCorpus::generate(&SynthConfig::small(8), 1);
        assert_eq!(fit(&c, None, &cfg("01"), 4), fit(&c, None, &cfg("01"), 4));
    }

    #[test]
    fn load_errors() {
        let c = memorized_doc();
        let json = fit(&c, None, &cfg("0"), 2).to_json().unwrap();
        assert!(LinearChainModel::from_json(&json[..json.len() / 2]).is_err());
        let v2 = json.replacen("\"version\": 1", "\"version\": 2", 1);
        match LinearChainModel::from_json(&v2) {
            Err(Error::Version { found, expected }) => assert_eq!((found.as_str(), expected.as_str()), ("2", "1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fs0_model_with_embeddings_is_a_mismatch() {
        let c = memorized_doc();
        let m = LinearChainModel::from_json(&fit(&c, None, &cfg("0"), 2).to_json().unwrap()).unwrap();
        let e = SynthCorpus::embeddings(4, 1);
        let r = Resources {
            embeddings: Some(&e),
            layers: None,
        };
        assert!(matches!(
            predict_corpus(&m, &c, &r, &Exec::sequential()),
            Err(Error::ConfigMismatch { .. })
        ));
    }

    #[test]
    fn token_output_matches_token_count() {
        let train_c = SynthCorpus::generate(&SynthConfig::small(10), 7);
        let m = fit(&train_c, None, &cfg("01"), 2);
        let probe = SynthCorpus::generate(&SynthConfig::small(100), 8);
        let p = predict_corpus(&m, &probe, &Resources::default(), &Exec::parallel()).unwrap();
        for (d, pred) in probe.documents.iter().zip(&p) {
            assert_eq!(pred.tokens.len(), d.token_count());
            assert_eq!(pred.sentences.labels.len(), d.sentence_count());
        }
    }

    #[test]
    fn empty_document_gives_empty_labeling() {
        let c = memorized_doc();
        let m = fit(&c, None, &cfg("0"), 2);
        let mut empty = DocBuilder::new("e", Topic::Homeschooling, Register::Comment).build();
        empty.gold = None;
        let p = predict_corpus(&m, &Corpus::new("e", vec![empty]), &Resources::default(), &Exec::sequential()).unwrap();
        assert!(p[0].sentences.labels.is_empty() && p[0].tokens.is_empty());
    }

    #[test]
    fn all_o_gold_prefers_o() {
        let mut c = SynthCorpus::generate(&SynthConfig::small(10), 5);
        for d in &mut c.documents {
            d.gold = Some(crate::corpus::AnnotationSet::new("gold", vec![]));
        }
        let m = fit(&c, None, &cfg("01"), 3);
        let p = predict_corpus(&m, &c, &Resources::default(), &Exec::sequential()).unwrap();
        assert!(p.iter().all(|d| d.tokens.iter().all(|l| *l == BioLabel::O)));
    }
}
