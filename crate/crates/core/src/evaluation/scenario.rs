//! Experiment scenarios: cross-validation over all documents, in-domain
//! cross-validation per topic, and cross-domain held-out topics.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::boundary::{boundary_tally, segmentation_from_labels, BoundaryTally};
use super::metrics::{ConfusionMatrix, TokenScores};
use super::significance::{liddell_exact_test, PairedTest};
use crate::agreement::{alpha_u, Continuum, Unit};
use crate::corpus::{ComponentType, Corpus, Topic};
use crate::encoding::{expand_to_tokens, sentence_approximate, tokens_from_annotation, BioLabel, SentenceLabeling, TokenLabelRow};
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureSets, FoldResources, Interner, Resources, StaticFeatures, TopicModel};
use crate::labeler::{self, TrainingConfig};
use crate::par::{derive_seed, Exec};

/// `k` contiguous blocks over `0..n`; the first `n % k` blocks hold one
/// extra item.
pub fn contiguous_folds(n: usize, k: usize) -> Vec<Range<usize>> {
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    (0..k)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    All,
    InDomain,
    CrossDomain,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::All => "all",
            Scenario::InDomain => "in-domain",
            Scenario::CrossDomain => "cross-domain",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Scenario::All),
            "in-domain" => Ok(Scenario::InDomain),
            "cross-domain" => Ok(Scenario::CrossDomain),
            _ => Err(Error::InvalidInput(format!(
                "unknown scenario {s:?} (expected all, in-domain or cross-domain)"
            ))),
        }
    }
}

/// One train/test partition. `group` is the topic for in-domain and
/// cross-domain runs.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub name: String,
    pub group: Option<Topic>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded shuffle of `ids`, cut into `k` contiguous folds.
pub fn crossval_splits(ids: &[usize], k: usize, seed: u64, group: Option<Topic>) -> Result<Vec<Split>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {k}")));
    }
    if k > ids.len() {
        return Err(Error::InvalidInput(format!("{k} folds for {} documents", ids.len())));
    }
    let mut order = ids.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let prefix = group.map_or(String::new(), |t| format!("{} ", t.as_str()));
    Ok(contiguous_folds(order.len(), k)
        .into_iter()
        .enumerate()
        .map(|(i, r)| Split {
            name: format!("{prefix}fold {}", i + 1),
            group,
            train: order[..r.start].iter().chain(&order[r.end..]).copied().collect(),
            test: order[r].to_vec(),
        })
        .collect())
}

/// Everything a learner may use for one split.
pub struct SplitContext<'a> {
    pub corpus: &'a Corpus,
    pub cache: &'a StaticFeatures,
    pub fold: &'a FoldResources,
    pub train: &'a [usize],
    pub test: &'a [usize],
    pub seed: u64,
}

/// Produces sentence labels for the test documents of a split.
pub trait Learner: Sync {
    fn name(&self) -> String;

    /// Feature sets this learner needs fitted per split.
    fn feature_sets(&self) -> Option<FeatureSets> {
        None
    }

    fn predict(&self, ctx: &SplitContext<'_>) -> Result<Vec<Vec<BioLabel>>>;
}

/// Predicts the sentence approximation of the gold annotation.
pub struct OracleLearner;

impl Learner for OracleLearner {
    fn name(&self) -> String {
        "oracle".into()
    }

    fn predict(&self, ctx: &SplitContext<'_>) -> Result<Vec<Vec<BioLabel>>> {
        ctx.test
            .iter()
            .map(|&d| {
                let doc = &ctx.corpus.documents[d];
                let gold = doc.gold.as_ref().ok_or_else(|| missing_gold(&doc.id))?;
                Ok(sentence_approximate(doc, gold).labels)
            })
            .collect()
    }
}

/// Labels every sentence O.
pub struct MajorityLearner;

impl Learner for MajorityLearner {
    fn name(&self) -> String {
        "all-O".into()
    }

    fn predict(&self, ctx: &SplitContext<'_>) -> Result<Vec<Vec<BioLabel>>> {
        Ok(ctx
            .test
            .iter()
            .map(|&d| vec![BioLabel::O; ctx.corpus.documents[d].sentence_count()])
            .collect())
    }
}

/// The linear-chain labeler with one feature configuration.
pub struct PerceptronLearner {
    pub config: FeatureConfig,
    pub training: TrainingConfig,
    pub embedding_dim: Option<usize>,
}

impl Learner for PerceptronLearner {
    fn name(&self) -> String {
        self.config.sets.to_string()
    }

    fn feature_sets(&self) -> Option<FeatureSets> {
        Some(self.config.sets)
    }

    fn predict(&self, ctx: &SplitContext<'_>) -> Result<Vec<Vec<BioLabel>>> {
        let training = TrainingConfig {
            seed: ctx.seed,
            ..self.training.clone()
        };
        let model = labeler::train(ctx.corpus, ctx.cache, ctx.fold, &self.config, ctx.train, &training, self.embedding_dim)?;
        let predictor = model.predictor(ctx.cache);
        Ok(ctx
            .test
            .iter()
            .map(|&d| predictor.decode(&ctx.fold.document(ctx.cache, &self.config, d)))
            .collect())
    }
}

fn missing_gold(id: &str) -> Error {
    Error::InvalidInput(format!("document {id} has no gold annotation"))
}

/// Maximal component runs of a token labeling as α_U units, shifted by
/// `offset`. `-B` opens a new unit; `-I` continues a run of the same type.
pub fn labels_to_units(tokens: &[BioLabel], offset: usize) -> Vec<Unit> {
    let mut out: Vec<Unit> = Vec::new();
    let mut open: Option<(usize, ComponentType)> = None;
    for (i, l) in tokens.iter().enumerate() {
        let c = l.component();
        let continues = matches!((open, c), (Some((_, t)), Some(u)) if t == u && l.is_inside());
        if !continues {
            if let Some((s, t)) = open.take() {
                out.push(Unit::new(offset + s, offset + i - 1, t));
            }
            open = c.map(|t| (i, t));
        }
    }
    if let Some((s, t)) = open {
        out.push(Unit::new(offset + s, offset + tokens.len() - 1, t));
    }
    out
}

/// Token scores plus the segmentation-oriented metrics of one system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub system: String,
    pub documents: usize,
    pub scores: TokenScores,
    /// Row-normalized confusion matrix (gold rows).
    pub probabilistic_confusion: Vec<Option<Vec<f64>>>,
    /// α_U of predicted vs gold units over the concatenated documents.
    pub alpha_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_u_error: Option<String>,
    pub boundary_similarity: f64,
    pub boundary: BoundaryTally,
}

/// Scores pairs of (gold, predicted) token sequences, pooled.
pub fn evaluate_pairs<'a>(
    system: &str,
    pairs: impl IntoIterator<Item = (&'a [BioLabel], &'a [BioLabel])>,
    window: usize,
) -> Result<EvalReport> {
    let mut cm = ConfusionMatrix::default();
    let mut tally = BoundaryTally::default();
    let (mut gold_units, mut pred_units) = (Vec::new(), Vec::new());
    let (mut offset, mut documents) = (0, 0);
    for (g, p) in pairs {
        cm.add_sequences(g, p)?;
        tally.add(&boundary_tally(&segmentation_from_labels(g), &segmentation_from_labels(p), window)?);
        gold_units.extend(labels_to_units(g, offset));
        pred_units.extend(labels_to_units(p, offset));
        offset += g.len();
        documents += 1;
    }
    let alpha = if offset == 0 {
        Err(Error::Undefined("no tokens scored".into()))
    } else {
        Continuum::new(offset, vec![gold_units, pred_units]).and_then(|c| alpha_u(&c, &ComponentType::LOGOS))
    };
    Ok(EvalReport {
        system: system.to_string(),
        documents,
        probabilistic_confusion: cm.row_normalized(),
        scores: cm.scores(),
        alpha_u: alpha.as_ref().ok().copied(),
        alpha_u_error: alpha.err().map(|e| e.to_string()),
        boundary_similarity: tally.similarity(),
        boundary: tally,
    })
}

/// Gold token labels of every document.
pub fn gold_tokens(corpus: &Corpus) -> Result<Vec<Vec<BioLabel>>> {
    corpus
        .documents
        .iter()
        .map(|d| {
            d.gold
                .as_ref()
                .map(|g| tokens_from_annotation(d, g))
                .ok_or_else(|| missing_gold(&d.id))
        })
        .collect()
}

/// Every annotator of every document scored against the gold annotation,
/// pooled into one report.
pub fn human_vs_gold(corpus: &Corpus, window: usize) -> Result<EvalReport> {
    let gold = gold_tokens(corpus)?;
    let human: Vec<(usize, Vec<BioLabel>)> = corpus
        .documents
        .iter()
        .enumerate()
        .flat_map(|(i, d)| d.annotations.iter().map(move |a| (i, tokens_from_annotation(d, a))))
        .collect();
    evaluate_pairs(
        "human",
        human.iter().map(|(i, h)| (gold[*i].as_slice(), h.as_slice())),
        window,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<Topic>,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub group: Topic,
    pub reports: Vec<EvalReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRow {
    pub baseline: String,
    pub system: String,
    pub test: PairedTest,
}

/// Results of one scenario for several systems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub folds: usize,
    pub feature_config: FeatureConfig,
    pub systems: Vec<String>,
    pub splits: Vec<SplitRecord>,
    pub notices: Vec<String>,
    pub groups: Vec<GroupReport>,
    /// One report per system from the summed confusion matrix.
    pub aggregated: Vec<EvalReport>,
    /// Each system against the first, on pooled token correctness.
    pub significance: Vec<SignificanceRow>,
    /// Predicted token labels per system, by document index.
    #[serde(skip)]
    pub predictions: Vec<BTreeMap<usize, Vec<BioLabel>>>,
}

impl ScenarioReport {
    pub fn aggregated_for(&self, system: &str) -> Option<&EvalReport> {
        self.aggregated.iter().find(|r| r.system == system)
    }

    /// Checks that no split trains on one of its test documents, that every
    /// evaluated document is tested exactly once, and that cross-domain
    /// training never sees the held-out topic.
    pub fn audit(&self, corpus: &Corpus) -> Result<()> {
        let mut tested: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &self.splits {
            for id in &s.test {
                if s.train.contains(id) {
                    return Err(Error::Validation {
                        doc_id: id.clone(),
                        field: "split".into(),
                        message: format!("{} trains on its test document", s.name),
                    });
                }
                *tested.entry(id).or_default() += 1;
            }
            if self.scenario == Scenario::CrossDomain {
                if let Some(topic) = s.group {
                    if let Some(id) = s.train.iter().find(|id| corpus.get(id).is_some_and(|d| d.topic == topic)) {
                        return Err(Error::Validation {
                            doc_id: id.clone(),
                            field: "split".into(),
                            message: format!("{} trains on the held-out topic", s.name),
                        });
                    }
                }
            }
        }
        if let Some((id, n)) = tested.iter().find(|(_, n)| **n != 1) {
            return Err(Error::Validation {
                doc_id: id.to_string(),
                field: "split".into(),
                message: format!("tested {n} times"),
            });
        }
        Ok(())
    }

    /// Token rows of one system for the prediction dump.
    pub fn token_rows(&self, corpus: &Corpus, system: usize) -> Result<Vec<TokenLabelRow>> {
        let gold = gold_tokens(corpus)?;
        let mut rows = Vec::new();
        for (&d, pred) in &self.predictions[system] {
            for (i, (g, p)) in gold[d].iter().zip(pred).enumerate() {
                rows.push(TokenLabelRow {
                    doc_id: corpus.documents[d].id.clone(),
                    token_index: i,
                    gold: *g,
                    predicted: *p,
                });
            }
        }
        Ok(rows)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::json(&e))
    }
}

/// Shared settings of one experiment.
pub struct Experiment<'a> {
    pub corpus: &'a Corpus,
    pub resources: Resources<'a>,
    /// Feature parameters shared by every learner; `sets` is ignored.
    pub features: FeatureConfig,
    pub folds: usize,
    pub seed: u64,
    pub boundary_window: usize,
    /// Topic model fitted elsewhere, used instead of per-split LDA.
    pub pretrained_topics: Option<&'a TopicModel>,
    pub exec: Exec,
}

impl<'a> Experiment<'a> {
    pub fn new(corpus: &'a Corpus, resources: Resources<'a>) -> Self {
        Experiment {
            corpus,
            resources,
            features: FeatureConfig::new(FeatureSets::TABLE[0].parse().expect("valid feature sets")),
            folds: 10,
            seed: 0,
            boundary_window: super::DEFAULT_WINDOW,
            pretrained_topics: None,
            exec: Exec::default(),
        }
    }

    pub fn splits(&self, scenario: Scenario) -> Result<(Vec<Split>, Vec<String>)> {
        let mut notices = Vec::new();
        let all: Vec<usize> = (0..self.corpus.len()).collect();
        let by_topic = |t: Topic| -> Vec<usize> { all.iter().copied().filter(|&d| self.corpus.documents[d].topic == t).collect() };
        let splits = match scenario {
            Scenario::All => crossval_splits(&all, self.folds, self.seed, None)?,
            Scenario::InDomain => {
                let mut out = Vec::new();
                for (i, t) in self.corpus.topics().into_iter().enumerate() {
                    let ids = by_topic(t);
                    if ids.len() < self.folds {
                        notices.push(format!(
                            "skipped topic {}: {} documents for {} folds",
                            t.as_str(),
                            ids.len(),
                            self.folds
                        ));
                        continue;
                    }
                    out.extend(crossval_splits(&ids, self.folds, derive_seed(self.seed, i as u64), Some(t))?);
                }
                if out.is_empty() {
                    return Err(Error::InvalidInput("no topic has enough documents for in-domain folds".into()));
                }
                out
            }
            Scenario::CrossDomain => {
                let topics = self.corpus.topics();
                if topics.len() < 2 {
                    return Err(Error::InvalidInput("cross-domain evaluation needs at least two topics".into()));
                }
                topics
                    .into_iter()
                    .map(|t| Split {
                        name: format!("held-out {}", t.as_str()),
                        group: Some(t),
                        train: all.iter().copied().filter(|&d| self.corpus.documents[d].topic != t).collect(),
                        test: by_topic(t),
                    })
                    .collect()
            }
        };
        Ok((splits, notices))
    }

    pub fn run(&self, scenario: Scenario, learners: &[&dyn Learner]) -> Result<ScenarioReport> {
        if learners.is_empty() {
            return Err(Error::InvalidInput("no systems to evaluate".into()));
        }
        let gold = gold_tokens(self.corpus)?;
        let union = learners
            .iter()
            .filter_map(|l| l.feature_sets())
            .fold(None, |acc: Option<FeatureSets>, s| Some(acc.map_or(s, |a| a.union(s))));
        let features = FeatureConfig {
            sets: union.unwrap_or(self.features.sets),
            ..self.features.clone()
        };
        if union.is_some() {
            self.resources.check(&features)?;
        }
        let (splits, notices) = self.splits(scenario)?;
        let cache = StaticFeatures::build(
            self.corpus,
            &self.resources,
            features.lda_topics,
            features.lowercase_lookup,
            Interner::default(),
        );
        let results = self.exec.map_range(splits.len(), |i| -> Result<Vec<Vec<Vec<BioLabel>>>> {
            let split = &splits[i];
            let seed = derive_seed(self.seed, 1000 + i as u64);
            let fold = match union {
                Some(_) => FoldResources::fit(self.corpus, &cache, &split.train, &features, self.pretrained_topics, seed)?,
                None => FoldResources::default(),
            };
            let ctx = SplitContext {
                corpus: self.corpus,
                cache: &cache,
                fold: &fold,
                train: &split.train,
                test: &split.test,
                seed,
            };
            learners
                .iter()
                .map(|l| {
                    let sentences = l.predict(&ctx)?;
                    split
                        .test
                        .iter()
                        .zip(sentences)
                        .map(|(&d, labels)| {
                            let doc = &self.corpus.documents[d];
                            expand_to_tokens(
                                doc,
                                &SentenceLabeling {
                                    doc_id: doc.id.clone(),
                                    labels,
                                },
                            )
                        })
                        .collect()
                })
                .collect()
        });
        let mut predictions: Vec<BTreeMap<usize, Vec<BioLabel>>> = vec![BTreeMap::new(); learners.len()];
        for (split, r) in splits.iter().zip(results) {
            for (li, docs) in r?.into_iter().enumerate() {
                for (&d, tokens) in split.test.iter().zip(docs) {
                    predictions[li].insert(d, tokens);
                }
            }
        }
        let names: Vec<String> = learners.iter().map(|l| l.name()).collect();
        let report_for = |li: usize, docs: &mut dyn Iterator<Item = usize>| {
            let pairs: Vec<usize> = docs.collect();
            evaluate_pairs(
                &names[li],
                pairs.iter().map(|d| (gold[*d].as_slice(), predictions[li][d].as_slice())),
                self.boundary_window,
            )
        };
        let aggregated = (0..learners.len())
            .map(|li| report_for(li, &mut predictions[li].keys().copied()))
            .collect::<Result<Vec<_>>>()?;
        let mut groups = Vec::new();
        if scenario != Scenario::All {
            let mut topics: Vec<Topic> = splits.iter().filter_map(|s| s.group).collect();
            topics.dedup();
            for t in topics {
                let reports = (0..learners.len())
                    .map(|li| {
                        report_for(
                            li,
                            &mut predictions[li].keys().copied().filter(|&d| self.corpus.documents[d].topic == t),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                groups.push(GroupReport { group: t, reports });
            }
        }
        let flat = |li: usize| -> Vec<BioLabel> { predictions[li].values().flatten().copied().collect() };
        let gold_flat: Vec<BioLabel> = predictions[0].keys().flat_map(|&d| gold[d].iter().copied()).collect();
        let base = flat(0);
        let significance = (1..learners.len())
            .map(|li| {
                Ok(SignificanceRow {
                    baseline: names[0].clone(),
                    system: names[li].clone(),
                    test: liddell_exact_test(&gold_flat, &base, &flat(li))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let ids = |v: &[usize]| v.iter().map(|&d| self.corpus.documents[d].id.clone()).collect();
        Ok(ScenarioReport {
            scenario,
            seed: self.seed,
            folds: if scenario == Scenario::CrossDomain { splits.len() } else { self.folds },
            feature_config: features,
            systems: names,
            splits: splits
                .iter()
                .map(|s| SplitRecord {
                    name: s.name.clone(),
                    group: s.group,
                    train: ids(&s.train),
                    test: ids(&s.test),
                })
                .collect(),
            notices,
            groups,
            aggregated,
            significance,
            predictions,
        })
    }
}
