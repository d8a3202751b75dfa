//! Sentence features.
//!
//! FS0 n-grams describe the current sentence only. FS1-FS4 features are
//! computed once per sentence ("local" features) and then shared with the
//! neighbours: sentence `i` sees the local features of sentence `i + k`
//! under the prefix `minus{|k|}Sent_` or `plus{k}Sent_` for `0 < |k| <= C`.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};

use super::config::FeatureConfig;
use super::embeddings::EmbeddingTable;
use super::layers::{DocumentLayers, LinguisticLayers};
use super::lda::{train_lda, LdaConfig, TopicModel};
use super::vocab::{build_vocabulary, lowercase_sentences, Vocabulary};
use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};

/// Feature name to value.
pub type FeatureVector = BTreeMap<String, f64>;

pub const SENTIMENT_NAMES: [&str; 5] = ["VeryNegative", "Negative", "Neutral", "Positive", "VeryPositive"];

/// Positional prefix of a neighbour at offset `k`.
pub fn window_prefix(k: isize) -> String {
    match k {
        0 => String::new(),
        k if k < 0 => format!("minus{}Sent_", -k),
        k => format!("plus{k}Sent_"),
    }
}

/// Splits a prefixed name into its offset and base name.
pub fn split_prefix(name: &str) -> (isize, &str) {
    for (sign, tag) in [(-1isize, "minus"), (1, "plus")] {
        if let Some(rest) = name.strip_prefix(tag) {
            if let Some(pos) = rest.find("Sent_") {
                if let Ok(k) = rest[..pos].parse::<isize>() {
                    if k > 0 {
                        return (sign * k, &rest[pos + 5..]);
                    }
                }
            }
        }
    }
    (0, name)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Interner {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Resources shared by all folds.
#[derive(Clone, Copy, Debug, Default)]
pub struct Resources<'a> {
    pub embeddings: Option<&'a EmbeddingTable>,
    pub layers: Option<&'a LinguisticLayers>,
}

impl Resources<'_> {
    pub fn check(&self, config: &FeatureConfig) -> Result<()> {
        if config.sets.contains(4) && self.embeddings.is_none() {
            return Err(Error::MissingResource {
                set: 4,
                resource: "word embeddings",
            });
        }
        Ok(())
    }
}

/// Feature groups silently left out because an optional layer is missing.
pub fn degradations(config: &FeatureConfig, resources: &Resources<'_>, corpus: &Corpus) -> Vec<String> {
    let mut out = Vec::new();
    let missing_docs = match resources.layers {
        None => corpus.len(),
        Some(l) => corpus.documents.iter().filter(|d| l.get(&d.id).is_none()).count(),
    };
    let section_missing = |f: &dyn Fn(&DocumentLayers) -> bool| match resources.layers {
        None => true,
        Some(l) => corpus.documents.iter().all(|d| l.get(&d.id).is_none_or(|x| !f(x))),
    };
    let mut note = |set: u8, what: &str, absent: bool| {
        if config.sets.contains(set) && absent {
            out.push(format!("FS{set}: {what} omitted (layer not supplied)"));
        }
    };
    note(1, "POS n-grams", section_missing(&|l| l.pos.is_some()));
    note(1, "syntax features", section_missing(&|l| l.syntax.is_some()));
    note(2, "sentiment scores", section_missing(&|l| l.sentiment.is_some()));
    note(3, "semantic roles", section_missing(&|l| l.srl.is_some()));
    note(3, "coreference", section_missing(&|l| l.coref.is_some()));
    note(3, "discourse relations", section_missing(&|l| l.discourse.is_some()));
    if resources.layers.is_some() && missing_docs > 0 && config.sets.windowed() {
        out.push(format!("layers: {missing_docs} document(s) absent from the sidecar"));
    }
    out
}

/// Emits the fold-independent local features of one sentence, tagged with
/// their feature set.
fn static_local(
    doc: &Document,
    tokens: &[&str],
    sent: usize,
    layers: Option<&DocumentLayers>,
    embeddings: Option<&EmbeddingTable>,
    lowercase: bool,
    emit: &mut dyn FnMut(u8, Cow<'_, str>, f64),
) {
    let range = doc.sentence_tokens(sent);
    let words = &tokens[range.clone()];
    let n = words.len();

    for k in 0..n.min(3) {
        emit(1, format!("FS1_first{k}={}", words[k]).into(), 1.0);
        emit(1, format!("FS1_last{k}={}", words[n - 1 - k]).into(), 1.0);
    }
    let rel = |pos: usize, count: usize| if count > 1 { pos as f64 / (count - 1) as f64 } else { 0.0 };
    let par = doc.paragraph_of_sentence(sent);
    let in_par: Vec<usize> = (0..doc.sentence_count())
        .filter(|&j| par.is_some() && doc.paragraph_of_sentence(j) == par)
        .collect();
    let pos_in_par = in_par.iter().position(|&j| j == sent).unwrap_or(0);
    emit(1, "FS1_relPosParagraph".into(), rel(pos_in_par, in_par.len()));
    emit(1, "FS1_relPosDocument".into(), rel(sent, doc.sentence_count()));

    if let Some(l) = layers {
        if let Some(pos) = &l.pos {
            let tags = &pos[range.clone()];
            for len in 1..=3 {
                for g in tags.windows(len) {
                    emit(1, format!("FS1_pos={}", g.join("_")).into(), 1.0);
                }
            }
        }
        if let Some(sx) = &l.syntax {
            if let Some(d) = &sx.depth {
                emit(1, "FS1_depDepth".into(), d[sent]);
            }
            if let Some(p) = &sx.productions {
                for rule in &p[sent] {
                    emit(1, format!("FS1_prod={rule}").into(), 1.0);
                }
            }
            if let Some(c) = &sx.subclauses {
                emit(1, "FS1_subclauses".into(), c[sent]);
            }
        }
        if let Some(s) = &l.sentiment {
            for (name, v) in SENTIMENT_NAMES.iter().zip(s[sent]) {
                emit(2, format!("FS2_sentiment{name}").into(), v);
            }
        }
        for (tag, sec) in [("srl", &l.srl), ("coref", &l.coref), ("discourse", &l.discourse)] {
            if let Some(s) = sec {
                for item in &s[sent] {
                    emit(3, format!("FS3_{tag}={item}").into(), 1.0);
                }
            }
        }
    }

    if let Some(table) = embeddings {
        let v = super::embeddings::sentence_embedding(words, table, lowercase);
        for (k, x) in v.into_iter().enumerate() {
            emit(4, format!("FS4_emb{k}").into(), x);
        }
    }
}

/// Words fed to the topic model: lowercased, alphanumeric tokens.
pub fn topic_words(sentence: &[String]) -> Vec<String> {
    sentence
        .iter()
        .filter(|w| w.chars().any(char::is_alphanumeric))
        .cloned()
        .collect()
}

/// Local features of one sentence as a named vector, for the sets selected
/// in `config`. Binary features repeated within the sentence are counted.
fn local_named(
    doc: &Document,
    sent: usize,
    config: &FeatureConfig,
    resources: &Resources<'_>,
    topic_model: Option<&TopicModel>,
) -> FeatureVector {
    let tokens = doc.token_strings();
    let layers = resources.layers.and_then(|l| l.get(&doc.id));
    let mut out = FeatureVector::new();
    static_local(
        doc,
        &tokens,
        sent,
        layers,
        resources.embeddings,
        config.lowercase_lookup,
        &mut |set, name, v| {
            if config.sets.contains(set) {
                *out.entry(name.into_owned()).or_default() += v;
            }
        },
    );
    if config.sets.contains(2) {
        if let Some(tm) = topic_model {
            let words = topic_words(&lowercase_sentences(doc)[sent]);
            for (k, p) in tm.infer(&words).into_iter().enumerate() {
                out.insert(format!("FS2_topic{k}"), p);
            }
        }
    }
    out
}

/// Full named feature vector of sentence `sent`.
pub fn extract_features(
    doc: &Document,
    sent: usize,
    config: &FeatureConfig,
    vocab: Option<&Vocabulary>,
    resources: &Resources<'_>,
    topic_model: Option<&TopicModel>,
) -> Result<FeatureVector> {
    if sent >= doc.sentence_count() {
        return Err(Error::InvalidInput(format!(
            "sentence {sent} out of range for document {}",
            doc.id
        )));
    }
    resources.check(config)?;
    if config.sets.contains(2) && topic_model.is_none() {
        return Err(Error::MissingResource {
            set: 2,
            resource: "a topic model",
        });
    }
    if config.sets.contains(0) && vocab.is_none() {
        return Err(Error::MissingResource {
            set: 0,
            resource: "an n-gram vocabulary",
        });
    }
    let mut out = FeatureVector::new();
    if let Some(v) = vocab.filter(|_| config.sets.contains(0)) {
        let sentence = &lowercase_sentences(doc)[sent];
        for id in v.hits(sentence) {
            out.insert(format!("FS0_ng={}", v.entries()[id as usize]), 1.0);
        }
    }
    let c = config.window as isize;
    for k in -c..=c {
        let j = sent as isize + k;
        if j < 0 || j >= doc.sentence_count() as isize {
            continue;
        }
        let prefix = window_prefix(k);
        for (name, v) in local_named(doc, j as usize, config, resources, topic_model) {
            out.insert(format!("{prefix}{name}"), v);
        }
    }
    Ok(out)
}

/// Interned sparse features of one sentence.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SentenceFeatures {
    /// FS0 vocabulary ids, value 1.
    pub current: Vec<u32>,
    /// Local FS1-FS4 features as (windowed id, value).
    pub local: Vec<(u32, f64)>,
}

/// Fold-independent local features of every sentence in a corpus, interned
/// into one windowed feature space.
#[derive(Clone, Debug)]
pub struct StaticFeatures {
    pub space: Interner,
    /// `[doc][sentence][set]`, sets 1-4 (index 0 unused).
    docs: Vec<Vec<[Vec<(u32, f64)>; 5]>>,
    lowercase: Vec<Vec<Vec<String>>>,
    topic_ids: Vec<u32>,
}

impl StaticFeatures {
    /// Computes static features for all sets the resources allow. `space`
    /// seeds the interner (pass a trained model's space to keep its ids).
    pub fn build(corpus: &Corpus, resources: &Resources<'_>, lda_topics: usize, lowercase_lookup: bool, mut space: Interner) -> Self {
        let topic_ids = (0..lda_topics).map(|k| space.intern(&format!("FS2_topic{k}"))).collect();
        let mut docs = Vec::with_capacity(corpus.len());
        for doc in &corpus.documents {
            let tokens = doc.token_strings();
            let layers = resources.layers.and_then(|l| l.get(&doc.id));
            let sents = (0..doc.sentence_count())
                .map(|s| {
                    let mut sets: [Vec<(u32, f64)>; 5] = Default::default();
                    let mut acc: BTreeMap<(u8, u32), f64> = BTreeMap::new();
                    static_local(doc, &tokens, s, layers, resources.embeddings, lowercase_lookup, &mut |set, name, v| {
                        *acc.entry((set, space.intern(&name))).or_default() += v;
                    });
                    for ((set, id), v) in acc {
                        sets[set as usize].push((id, v));
                    }
                    sets
                })
                .collect();
            docs.push(sents);
        }
        StaticFeatures {
            space,
            docs,
            lowercase: corpus.documents.iter().map(lowercase_sentences).collect(),
            topic_ids,
        }
    }

    pub fn lowercase_sentences(&self, doc: usize) -> &[Vec<String>] {
        &self.lowercase[doc]
    }

    pub fn topic_ids(&self) -> &[u32] {
        &self.topic_ids
    }
}

/// Resources fitted on the training documents of one fold.
#[derive(Clone, Debug, Default)]
pub struct FoldResources {
    pub vocab: Option<Vocabulary>,
    pub topic_model: Option<TopicModel>,
    /// Topic proportions `[doc][sentence]`, when FS2 is active.
    topic_props: Option<Vec<Vec<Vec<f64>>>>,
}

impl FoldResources {
    /// Fits the vocabulary and, unless `pretrained` is given, the topic model
    /// on the `train` documents only.
    pub fn fit(
        corpus: &Corpus,
        cache: &StaticFeatures,
        train: &[usize],
        config: &FeatureConfig,
        pretrained: Option<&TopicModel>,
        seed: u64,
    ) -> Result<Self> {
        let vocab = config
            .sets
            .contains(0)
            .then(|| build_vocabulary(corpus, train, config.min_count));
        let topic_model = if config.sets.contains(2) {
            Some(match pretrained {
                Some(tm) => tm.clone(),
                None => {
                    let texts: Vec<Vec<String>> = train
                        .iter()
                        .map(|&d| cache.lowercase_sentences(d).iter().flat_map(|s| topic_words(s)).collect())
                        .collect();
                    train_lda(&texts, &LdaConfig::new(config.lda_topics, config.lda_iterations, seed))?
                }
            })
        } else {
            None
        };
        Ok(Self::from_parts(cache, vocab, topic_model))
    }

    pub fn from_parts(cache: &StaticFeatures, vocab: Option<Vocabulary>, topic_model: Option<TopicModel>) -> Self {
        let topic_props = topic_model.as_ref().map(|tm| {
            cache
                .lowercase
                .iter()
                .map(|doc| doc.iter().map(|s| tm.infer(&topic_words(s))).collect())
                .collect()
        });
        FoldResources {
            vocab,
            topic_model,
            topic_props,
        }
    }

    /// Interned features of every sentence of document `doc`.
    pub fn document(&self, cache: &StaticFeatures, config: &FeatureConfig, doc: usize) -> Vec<SentenceFeatures> {
        let sents = &cache.docs[doc];
        (0..sents.len())
            .map(|s| {
                let current = match (&self.vocab, config.sets.contains(0)) {
                    (Some(v), true) => v.hits(&cache.lowercase[doc][s]),
                    _ => Vec::new(),
                };
                let mut local = Vec::new();
                for set in 1..5u8 {
                    if config.sets.contains(set) {
                        local.extend_from_slice(&sents[s][set as usize]);
                    }
                }
                if config.sets.contains(2) {
                    if let Some(props) = &self.topic_props {
                        for (k, p) in props[doc][s].iter().enumerate() {
                            if let Some(&id) = cache.topic_ids.get(k) {
                                local.push((id, *p));
                            }
                        }
                    }
                }
                SentenceFeatures { current, local }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{SynthConfig, SynthCorpus};
    use std::collections::BTreeSet;

    fn setup() -> (Corpus, EmbeddingTable) {
        (SynthCorpus::generate(&SynthConfig::small(4), 3), SynthCorpus::embeddings(8, 1))
    }

    fn cfg(s: &str) -> FeatureConfig {
        let mut c = FeatureConfig::new(s.parse().unwrap());
        c.lda_topics = 4;
        c.lda_iterations = 20;
        c.min_count = 1;
        c
    }

    #[test]
    fn prefixes_round_trip() {
        for k in -4..=4 {
            let name = format!("{}FS2_topic3", window_prefix(k));
            assert_eq!(split_prefix(&name), (k, "FS2_topic3"));
        }
        assert_eq!(split_prefix("minusXSent_a"), (0, "minusXSent_a"));
    }

    #[test]
    fn first_sentence_has_no_minus_features() {
        let (c, e) = setup();
        let r = Resources {
            embeddings: Some(&e),
            layers: None,
        };
        let f = extract_features(&c.documents[0], 0, &cfg("14"), None, &r, None).unwrap();
        assert!(f.keys().all(|k| !k.starts_with("minus")));
        assert!(f.keys().any(|k| k.starts_with("plus1Sent_")));
    }

    #[test]
    fn missing_resources_are_errors() {
        let (c, _) = setup();
        let r = Resources::default();
        let d = &c.documents[0];
        assert!(matches!(
            extract_features(d, 0, &cfg("4"), None, &r, None),
            Err(Error::MissingResource { set: 4, .. })
        ));
        assert!(matches!(
            extract_features(d, 0, &cfg("0"), None, &r, None),
            Err(Error::MissingResource { set: 0, .. })
        ));
        assert!(matches!(
            extract_features(d, 0, &cfg("2"), None, &r, None),
            Err(Error::MissingResource { set: 2, .. })
        ));
    }

    #[test]
    fn out_of_vocabulary_embedding_is_zero() {
        let (c, _) = setup();
        let e = EmbeddingTable::parse("zzz 1 1 1\n".as_bytes(), None).unwrap();
        let r = Resources {
            embeddings: Some(&e),
            layers: None,
        };
        let mut config = cfg("4");
        config.window = 0;
        let f = extract_features(&c.documents[0], 0, &config, None, &r, None).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.values().all(|v| *v == 0.0));
    }

    #[test]
    fn sentiment_of_neighbour_is_prefixed() {
        let (c, _) = setup();
        let d = &c.documents.iter().find(|d| d.sentence_count() >= 3).unwrap();
        let mut layers = LinguisticLayers::default();
        let mut dl = DocumentLayers::default();
        dl.sentiment = Some((0..d.sentence_count()).map(|i| [0.0, 0.23 * i as f64, 0.0, 0.0, 0.0]).collect());
        layers.documents.insert(d.id.clone(), dl);
        let r = Resources {
            embeddings: None,
            layers: Some(&layers),
        };
        let f = extract_features(d, 2, &cfg("2"), None, &r, Some(&trained_model(&c))).unwrap();
        assert_eq!(f["minus2Sent_FS2_sentimentNegative"], 0.0);
        assert_eq!(f["minus1Sent_FS2_sentimentNegative"], 0.23);
        assert_eq!(f.keys().filter(|k| k.starts_with("FS2_topic")).count(), 4);
    }

    fn trained_model(c: &Corpus) -> TopicModel {
        let texts: Vec<Vec<String>> = c
            .documents
            .iter()
            .map(|d| lowercase_sentences(d).concat())
            .collect();
        train_lda(&texts, &LdaConfig::new(4, 10, 1)).unwrap()
    }

    #[test]
    fn window_symmetry() {
        let (c, e) = setup();
        let r = Resources {
            embeddings: Some(&e),
            layers: None,
        };
        let config = cfg("14");
        let d = c.documents.iter().max_by_key(|d| d.sentence_count()).unwrap();
        let n = d.sentence_count();
        let all: Vec<FeatureVector> = (0..n)
            .map(|i| extract_features(d, i, &config, None, &r, None).unwrap())
            .collect();
        for i in 0..n {
            for (name, v) in &all[i] {
                let (k, base) = split_prefix(name);
                let j = i as isize + k;
                assert!(k.unsigned_abs() <= config.window);
                assert!(j >= 0 && (j as usize) < n);
                assert_eq!(all[j as usize].get(base), Some(v), "{name} in {i}");
            }
        }
    }

    #[test]
    fn relative_positions_in_unit_interval_and_fs0_binary() {
        let (c, _) = setup();
        let r = Resources::default();
        let v = build_vocabulary(&c, &[0, 1, 2, 3], 1);
        for d in &c.documents {
            for i in 0..d.sentence_count() {
                let f = extract_features(d, i, &cfg("01"), Some(&v), &r, None).unwrap();
                for (k, x) in &f {
                    if k.contains("relPos") {
                        assert!((0.0..=1.0).contains(x));
                    }
                    if k.starts_with("FS0_") {
                        assert_eq!(*x, 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn cached_features_match_named_extraction() {
        let (c, e) = setup();
        let r = Resources {
            embeddings: Some(&e),
            layers: None,
        };
        let config = cfg("01234");
        let cache = StaticFeatures::build(&c, &r, config.lda_topics, true, Interner::default());
        let train: Vec<usize> = (0..c.len()).collect();
        let fold = FoldResources::fit(&c, &cache, &train, &config, None, 7).unwrap();
        for (di, d) in c.documents.iter().enumerate() {
            let sents = fold.document(&cache, &config, di);
            for (i, s) in sents.iter().enumerate() {
                let named = extract_features(d, i, &config, fold.vocab.as_ref(), &r, fold.topic_model.as_ref()).unwrap();
                let local: FeatureVector = named
                    .iter()
                    .filter(|(k, _)| split_prefix(k).0 == 0 && !k.starts_with("FS0_"))
                    .map(|(k, v)| (k.clone(), *v))
                    .collect();
                let cached: FeatureVector = s.local.iter().map(|(id, v)| (cache.space.name(*id).to_string(), *v)).collect();
                assert_eq!(local, cached);
                let fs0: BTreeSet<String> = named.keys().filter(|k| k.starts_with("FS0_")).cloned().collect();
                let cur: BTreeSet<String> = s
                    .current
                    .iter()
                    .map(|id| format!("FS0_ng={}", fold.vocab.as_ref().unwrap().entries()[*id as usize]))
                    .collect();
                assert_eq!(fs0, cur);
            }
        }
    }
}
