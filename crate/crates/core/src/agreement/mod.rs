//! Annotation reliability and disagreement diagnostics: unitized alpha,
//! Fleiss' kappa, the probabilistic confusion matrix, readability indices and
//! correlations between per-document agreement and document properties.

mod alpha;
mod confusion;
mod correlation;
mod fleiss;
mod readability;

use serde::Serialize;

pub use alpha::{
    alpha_u, corpus_alpha_u, disagreement, document_continua, AgreementResult, Continuum, Disagreement, Unit,
};
pub use confusion::{confusion_from_assignments, logos_categories, prob_confusion_matrix, token_label_indices, ProbConfusion};
pub use correlation::{
    disagreement_correlates, document_measures, pearson_r, sentence_coverage, CorrelationCell, CorrelationTable,
    Subset, MEASURES,
};
pub use fleiss::fleiss_kappa;
pub use readability::{document_readability, readability, syllables, Readability};

/// Serialized form of one agreement measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementReport {
    pub metric: String,
    pub category: String,
    pub value: f64,
    pub std_error: f64,
    pub n_perm: usize,
    pub seed: u64,
    pub subset: String,
}
