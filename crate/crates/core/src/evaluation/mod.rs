//! Token-level scoring, boundary similarity, the paired significance test and
//! the three experiment scenarios.

mod boundary;
mod metrics;
mod report;
mod scenario;
mod significance;

pub use boundary::{
    boundary_similarity, boundary_tally, segmentation_from_labels, BoundaryTally, Segmentation, DEFAULT_WINDOW,
};
pub use metrics::{token_macro_f1, ClassScore, ConfusionMatrix, TokenScores};
pub use report::{render_report, ReportFormat, ReportInput};
pub use scenario::{
    contiguous_folds, crossval_splits, evaluate_pairs, gold_tokens, human_vs_gold, labels_to_units, EvalReport,
    Experiment, GroupReport, Learner, MajorityLearner, OracleLearner, PerceptronLearner, Scenario, ScenarioReport,
    SignificanceRow, Split, SplitContext, SplitRecord,
};
pub use significance::{discordant_p_value, liddell_exact_test, PairedTest};
