//! Sentence features FS0-FS4 and the resources they are computed from.

mod config;
mod embeddings;
mod extract;
mod layers;
mod lda;
mod vocab;

pub use config::{FeatureConfig, FeatureSets};
pub use embeddings::{load_embeddings, load_embeddings_filtered, sentence_embedding, EmbeddingTable};
pub use extract::{
    degradations, extract_features, split_prefix, topic_words, window_prefix, FeatureVector, FoldResources, Interner,
    Resources, SentenceFeatures, StaticFeatures, SENTIMENT_NAMES,
};
pub use layers::{load_layers, DocumentLayers, LinguisticLayers, Syntax};
pub use lda::{train_lda, LdaConfig, TopicModel};
pub use vocab::{build_vocabulary, lowercase_sentences, ngrams, Vocabulary};
