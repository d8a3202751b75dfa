//! Linear-chain sentence labeler trained with the averaged structured
//! perceptron.

mod decode;
mod model;
mod perceptron;

pub use decode::{sequence_score, viterbi};
pub use model::{
    load_model, predict_corpus, save_model, train, DocumentPrediction, LinearChainModel, Predictor, TrainingMetadata,
    MODEL_VERSION,
};
pub use perceptron::{train_perceptron, ChainWeights, Observation, SparseSequence, TrainingConfig, TrainingHistory};
