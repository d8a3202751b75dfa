use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;

use argmine::agreement::{
    corpus_alpha_u, disagreement_correlates, fleiss_kappa, prob_confusion_matrix, AgreementReport, Subset,
};
use argmine::corpus::{
    build_gold_majority, corpus_statistics, parse_corpus, serialize_corpus, validate_corpus, Severity,
};
use argmine::encoding::{read_token_dump, tokens_from_annotation, write_token_dump, TokenLabelRow};
use argmine::evaluation::{
    evaluate_pairs, human_vs_gold, liddell_exact_test, render_report, EvalReport, Experiment, Learner,
    MajorityLearner, OracleLearner, PerceptronLearner, ReportFormat, ReportInput, Scenario, ScenarioReport,
    DEFAULT_WINDOW,
};
use argmine::features::{
    degradations, load_embeddings_filtered, load_layers, topic_words, train_lda, EmbeddingTable, FeatureConfig,
    FeatureSets, FoldResources, Interner, LdaConfig, LinguisticLayers, Resources, StaticFeatures, TopicModel,
};
use argmine::labeler::{self, load_model, predict_corpus, save_model, TrainingConfig};
use argmine::persuasiveness::{cross_validate_docs, save_classifier, train_doc_classifier, DocClassifierConfig};
use argmine::{BioLabel, ComponentType, Corpus, Exec};

use crate::meta::{beside, RunMetadata};
use crate::settings::Settings;
use crate::{Cli, CliError, Command, FeatureArgs};

type CmdResult = Result<u8, CliError>;

/// Gold and predicted labels of one document from a token dump.
type DumpDoc = (String, Vec<BioLabel>, Vec<BioLabel>);

pub fn run(cli: Cli) -> CmdResult {
    let section = match &cli.command {
        Command::Validate(_) => "validate",
        Command::Stats(_) => "stats",
        Command::Gold(_) => "gold",
        Command::Agreement(_) => "agreement",
        Command::Train(_) => "train",
        Command::Predict(_) => "predict",
        Command::Eval(_) => "eval",
        Command::Xval(_) => "xval",
        Command::Persuasive(_) => "persuasive",
        Command::Report(_) => "report",
    };
    let s = Settings::load(cli.config.as_deref(), section)?;
    let workers = s.or("workers", cli.workers, 0usize)?;
    let exec = Exec::with_workers(workers);
    let mut meta = RunMetadata::new(section);
    meta.set("workers", workers);
    if let Some(c) = &cli.config {
        meta.input(c).with_context(|| format!("hashing {}", c.display()))?;
    }
    match cli.command {
        Command::Validate(a) => validate(&s, a, meta),
        Command::Stats(a) => stats(&s, a, meta),
        Command::Gold(a) => gold(&s, a, meta),
        Command::Agreement(a) => agreement(&s, a, meta, &exec),
        Command::Train(a) => train(&s, a, meta),
        Command::Predict(a) => predict(&s, a, meta, &exec),
        Command::Eval(a) => eval(&s, a, meta),
        Command::Xval(a) => xval(&s, a, meta, &exec),
        Command::Persuasive(a) => persuasive(&s, a, meta, &exec),
        Command::Report(a) => report(&s, a, meta),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn load_corpus(s: &Settings, flag: Option<PathBuf>, meta: &mut RunMetadata) -> Result<(PathBuf, Corpus), CliError> {
    let path: PathBuf = s.require("corpus", flag)?;
    meta.input(&path).with_context(|| format!("reading {}", path.display()))?;
    let corpus = parse_corpus(&path).with_context(|| format!("loading corpus {}", path.display()))?;
    meta.set("corpus", path.display().to_string());
    Ok((path, corpus))
}

fn to_json(value: &impl Serialize) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value).map_err(anyhow::Error::from)? + "\n")
}

/// Writes `text` to `out` (plus run metadata beside it) or to stdout.
fn emit(text: &str, out: Option<&Path>, mut meta: RunMetadata) -> Result<(), CliError> {
    match out {
        Some(p) => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            meta.output(p);
            meta.emit(Some(beside(p)))?;
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
            meta.emit(None)?;
        }
    }
    Ok(())
}

fn format_flag(s: &Settings, flag: Option<String>, default: ReportFormat) -> Result<ReportFormat, CliError> {
    match s.get::<String>("format", flag)? {
        None => Ok(default),
        Some(f) => f.parse().map_err(|e: argmine::Error| usage(e.to_string())),
    }
}

fn validate(s: &Settings, a: crate::ValidateArgs, mut meta: RunMetadata) -> CmdResult {
    let path: PathBuf = s.require("corpus", a.corpus)?;
    let json = s.get::<String>("format", a.format)?.as_deref() == Some("json");
    meta.input(&path).with_context(|| format!("reading {}", path.display()))?;
    let findings = match parse_corpus(&path) {
        Ok(c) => validate_corpus(&c),
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            println!("1 errors, 0 warnings");
            return Ok(1);
        }
    };
    let errors = findings.iter().filter(|f| f.severity == Severity::Error).count();
    let warnings = findings.len() - errors;
    if json {
        print!("{}", to_json(&findings)?);
    } else {
        for f in &findings {
            let tag = if f.severity == Severity::Error { "error" } else { "warning" };
            println!("{tag}: {} {}: {}", f.doc_id, f.field, f.message);
        }
        println!("{errors} errors, {warnings} warnings");
    }
    Ok(u8::from(errors > 0))
}

fn stats(s: &Settings, a: crate::StatsArgs, mut meta: RunMetadata) -> CmdResult {
    let (_, corpus) = load_corpus(s, a.corpus, &mut meta)?;
    let out: Option<PathBuf> = s.get("out", a.out)?;
    emit(&to_json(&corpus_statistics(&corpus))?, out.as_deref(), meta)?;
    Ok(0)
}

fn gold(s: &Settings, a: crate::GoldArgs, mut meta: RunMetadata) -> CmdResult {
    let (_, mut corpus) = load_corpus(s, a.corpus, &mut meta)?;
    let out: PathBuf = s.require("out", a.out)?;
    let mut unresolved = 0;
    let mut skipped = Vec::new();
    for doc in &mut corpus.documents {
        match build_gold_majority(doc) {
            Ok(g) => {
                unresolved += g.unresolved.len();
                doc.gold = Some(g.gold);
            }
            Err(e) => skipped.push(format!("{e}")),
        }
    }
    serialize_corpus(&corpus, &out)?;
    eprintln!(
        "gold built for {} documents ({} unresolved regions, {} skipped)",
        corpus.len() - skipped.len(),
        unresolved,
        skipped.len()
    );
    meta.notes.extend(skipped);
    meta.notes.push(format!("{unresolved} unresolved majority regions"));
    meta.output(&out);
    meta.emit(Some(beside(&out)))?;
    Ok(0)
}

fn categories(name: &str) -> Result<Vec<ComponentType>, CliError> {
    if name == "logos" || name == "all" {
        return Ok(ComponentType::LOGOS.to_vec());
    }
    name.split(',')
        .map(|c| c.trim().parse::<ComponentType>().map_err(|e| usage(e.to_string())))
        .collect()
}

fn annotator_list(s: &Settings, flag: Option<String>, corpus: &Corpus) -> Result<Vec<String>, CliError> {
    Ok(match s.get::<String>("annotators", flag)? {
        Some(list) => list.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect(),
        None => corpus.annotators(),
    })
}

fn agreement(s: &Settings, a: crate::AgreementArgs, mut meta: RunMetadata, exec: &Exec) -> CmdResult {
    let (_, corpus) = load_corpus(s, a.corpus, &mut meta)?;
    let metric = s.or("metric", a.metric, "alpha-u".to_string())?;
    let category = s.or("category", a.category, "logos".to_string())?;
    let n_perm = s.or("n-perm", a.n_perm, 100usize)?;
    let seed = s.or("seed", a.seed, 0u64)?;
    let annotators = annotator_list(s, a.annotators, &corpus)?;
    let subset = Subset {
        register: s
            .get::<String>("register", a.register)?
            .map(|r| r.parse().map_err(|e: argmine::Error| usage(e.to_string())))
            .transpose()?,
        topic: s
            .get::<String>("topic", a.topic)?
            .map(|t| t.parse().map_err(|e: argmine::Error| usage(e.to_string())))
            .transpose()?,
    };
    let cats = categories(&category)?;
    for (k, v) in [("metric", &metric), ("category", &category)] {
        meta.set(k, v);
    }
    meta.set("n-perm", n_perm);
    meta.set("annotators", &annotators);
    meta.set("subset", subset.describe());
    meta.seeds.insert("seed".into(), seed);
    let out: Option<PathBuf> = s.get("out", a.out)?;
    let filtered = Corpus::new(
        corpus.name.clone(),
        corpus.documents.iter().filter(|d| subset.contains(d)).cloned().collect(),
    );
    let text = match metric.as_str() {
        "alpha-u" => {
            let r = corpus_alpha_u(&filtered, &annotators, &cats, n_perm, seed, exec)?;
            to_json(&AgreementReport {
                metric,
                category,
                value: r.value,
                std_error: r.std_error,
                n_perm,
                seed,
                subset: subset.describe(),
            })?
        }
        "confusion" => to_json(&prob_confusion_matrix(&filtered, &annotators, &cats)?)?,
        "correlation" => to_json(&disagreement_correlates(&corpus, subset, &annotators, &cats)?)?,
        "fleiss" => to_json(&persuasive_fleiss(&filtered))?,
        other => return Err(usage(format!("unknown metric {other:?} (alpha-u, confusion, correlation, fleiss)"))),
    };
    emit(&text, out.as_deref(), meta)?;
    Ok(0)
}

#[derive(Serialize)]
struct FleissSummary {
    items: usize,
    raters: usize,
    excluded: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// Fleiss κ over the persuasiveness votes of documents rated by the most
/// common number of annotators.
fn persuasive_fleiss(corpus: &Corpus) -> FleissSummary {
    let votes: Vec<Vec<bool>> = corpus
        .documents
        .iter()
        .filter_map(|d| d.persuasive.as_ref())
        .map(|p| p.votes.values().copied().collect::<Vec<bool>>())
        .filter(|v| !v.is_empty())
        .collect();
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for v in &votes {
        *freq.entry(v.len()).or_default() += 1;
    }
    let raters = freq.iter().max_by_key(|(n, c)| (**c, **n)).map_or(0, |(n, _)| *n);
    let items: Vec<Vec<bool>> = votes.iter().filter(|v| v.len() == raters).cloned().collect();
    let k = fleiss_kappa(&items);
    FleissSummary {
        items: items.len(),
        raters,
        excluded: votes.len() - items.len(),
        kappa: k.as_ref().ok().copied(),
        error: k.err().map(|e| e.to_string()),
    }
}

struct FeatureSettings {
    sets: Vec<FeatureSets>,
    base: FeatureConfig,
    training: TrainingConfig,
    embeddings: Option<PathBuf>,
    layers: Option<PathBuf>,
    lda_raw: Option<PathBuf>,
}

fn feature_settings(s: &Settings, a: FeatureArgs, default_sets: &str) -> Result<FeatureSettings, CliError> {
    let spec = s.or("features", a.features, default_sets.to_string())?;
    let sets = spec
        .split(',')
        .map(|x| x.trim().parse::<FeatureSets>().map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut base = FeatureConfig::new(sets[0]);
    base.window = s.or("window", a.window, base.window)?;
    base.min_count = s.or("min-count", a.min_count, base.min_count)?;
    base.lda_topics = s.or("lda-topics", a.lda_topics, base.lda_topics)?;
    base.lda_iterations = s.or("lda-iterations", a.lda_iterations, base.lda_iterations)?;
    let training = TrainingConfig {
        epochs: s.or("epochs", a.epochs, 10usize)?,
        seed: s.or("seed", a.seed, 0u64)?,
        ..TrainingConfig::default()
    };
    if training.epochs == 0 {
        return Err(usage("--epochs must be at least 1"));
    }
    Ok(FeatureSettings {
        sets,
        base,
        training,
        embeddings: s.get("embeddings", a.embeddings)?,
        layers: s.get("layers", a.layers)?,
        lda_raw: s.get("lda-raw", a.lda_raw)?,
    })
}

impl FeatureSettings {
    fn record(&self, meta: &mut RunMetadata) {
        meta.set("features", self.sets.iter().map(|s| s.to_string()).collect::<Vec<_>>());
        meta.set("feature_config", &self.base);
        meta.set("training", &self.training);
        meta.seeds.insert("seed".into(), self.training.seed);
    }
}

struct Loaded {
    embeddings: Option<EmbeddingTable>,
    layers: Option<LinguisticLayers>,
}

impl Loaded {
    fn resources(&self) -> Resources<'_> {
        Resources {
            embeddings: self.embeddings.as_ref(),
            layers: self.layers.as_ref(),
        }
    }
}

fn corpus_words(corpus: &Corpus) -> HashSet<String> {
    let mut out = HashSet::new();
    for d in &corpus.documents {
        for t in d.token_strings() {
            out.insert(t.to_string());
            out.insert(t.to_lowercase());
        }
    }
    out
}

fn load_resources(
    corpus: &Corpus,
    embeddings: Option<&Path>,
    layers: Option<&Path>,
    meta: &mut RunMetadata,
) -> Result<Loaded, CliError> {
    let embeddings = match embeddings {
        None => None,
        Some(p) => {
            meta.input(p).with_context(|| format!("reading {}", p.display()))?;
            let t = load_embeddings_filtered(p, Some(&corpus_words(corpus)))
                .with_context(|| format!("loading embeddings {}", p.display()))?;
            meta.set("embedding_dim", t.dim());
            if !t.duplicates().is_empty() {
                meta.notes.push(format!("{} duplicate embedding entries (first kept)", t.duplicates().len()));
            }
            Some(t)
        }
    };
    let layers = match layers {
        None => None,
        Some(p) => {
            meta.input(p).with_context(|| format!("reading {}", p.display()))?;
            let l = load_layers(p).with_context(|| format!("loading layers {}", p.display()))?;
            l.validate(corpus)?;
            Some(l)
        }
    };
    Ok(Loaded { embeddings, layers })
}

fn raw_topic_model(path: &Path, config: &FeatureConfig, seed: u64, meta: &mut RunMetadata) -> Result<TopicModel, CliError> {
    meta.input(path).with_context(|| format!("reading {}", path.display()))?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let texts: Vec<Vec<String>> = text
        .lines()
        .map(|l| topic_words(&l.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>()))
        .filter(|t| !t.is_empty())
        .collect();
    meta.notes.push(format!("topic model fitted on {} raw texts from {}", texts.len(), path.display()));
    Ok(train_lda(&texts, &LdaConfig::new(config.lda_topics, config.lda_iterations, seed))?)
}

fn train(s: &Settings, a: crate::TrainArgs, mut meta: RunMetadata) -> CmdResult {
    let (_, corpus) = load_corpus(s, a.corpus, &mut meta)?;
    let fs = feature_settings(s, a.features, "01234")?;
    let out: PathBuf = s.require("out", a.out)?;
    if fs.sets.len() != 1 {
        return Err(usage("train takes a single feature-set combination"));
    }
    fs.record(&mut meta);
    let config = fs.base.clone();
    let loaded = load_resources(&corpus, fs.embeddings.as_deref(), fs.layers.as_deref(), &mut meta)?;
    let resources = loaded.resources();
    resources.check(&config)?;
    meta.degraded_features = degradations(&config, &resources, &corpus);
    let pretrained = match &fs.lda_raw {
        Some(p) if config.sets.contains(2) => Some(raw_topic_model(p, &config, fs.training.seed, &mut meta)?),
        _ => None,
    };
    let ids: Vec<usize> = (0..corpus.len()).filter(|&d| corpus.documents[d].gold.is_some()).collect();
    if ids.is_empty() {
        return Err(anyhow!("no document carries a gold annotation").into());
    }
    let cache = StaticFeatures::build(&corpus, &resources, config.lda_topics, config.lowercase_lookup, Interner::default());
    let fold = FoldResources::fit(&corpus, &cache, &ids, &config, pretrained.as_ref(), fs.training.seed)?;
    let model = labeler::train(
        &corpus,
        &cache,
        &fold,
        &config,
        &ids,
        &fs.training,
        loaded.embeddings.as_ref().map(EmbeddingTable::dim),
    )?;
    save_model(&model, &out)?;
    eprintln!(
        "trained on {} documents ({} sentences); training errors per epoch: {:?}",
        model.metadata.documents, model.metadata.sentences, model.metadata.history.sequence_errors
    );
    meta.output(&out);
    meta.emit(Some(beside(&out)))?;
    Ok(0)
}

fn token_rows(corpus: &Corpus, predictions: &[labeler::DocumentPrediction]) -> Vec<TokenLabelRow> {
    let mut rows = Vec::new();
    for (doc, p) in corpus.documents.iter().zip(predictions) {
        let gold = doc
            .gold
            .as_ref()
            .map_or_else(|| vec![BioLabel::O; doc.token_count()], |g| tokens_from_annotation(doc, g));
        for (i, (g, l)) in gold.iter().zip(&p.tokens).enumerate() {
            rows.push(TokenLabelRow {
                doc_id: doc.id.clone(),
                token_index: i,
                gold: *g,
                predicted: *l,
            });
        }
    }
    rows
}

fn predict(s: &Settings, a: crate::PredictArgs, mut meta: RunMetadata, exec: &Exec) -> CmdResult {
    let (_, corpus) = load_corpus(s, a.corpus, &mut meta)?;
    let model_path: PathBuf = s.require("model", a.model)?;
    meta.input(&model_path).with_context(|| format!("reading {}", model_path.display()))?;
    let model = load_model(&model_path).with_context(|| format!("loading model {}", model_path.display()))?;
    let embeddings: Option<PathBuf> = s.get("embeddings", a.embeddings)?;
    let layers: Option<PathBuf> = s.get("layers", a.layers)?;
    let loaded = load_resources(&corpus, embeddings.as_deref(), layers.as_deref(), &mut meta)?;
    meta.set("feature_config", &model.config);
    meta.degraded_features = degradations(&model.config, &loaded.resources(), &corpus);
    if corpus.documents.iter().any(|d| d.gold.is_none()) {
        meta.notes.push("documents without gold are dumped with gold label O".into());
    }
    let predictions = predict_corpus(&model, &corpus, &loaded.resources(), exec)?;
    let mut buf = Vec::new();
    write_token_dump(&mut buf, &token_rows(&corpus, &predictions))?;
    let out: Option<PathBuf> = s.get("out", a.out)?;
    emit(&String::from_utf8(buf).map_err(anyhow::Error::from)?, out.as_deref(), meta)?;
    Ok(0)
}

fn read_dump(path: &Path, meta: &mut RunMetadata) -> Result<Vec<DumpDoc>, CliError> {
    meta.input(path).with_context(|| format!("reading {}", path.display()))?;
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let rows = read_token_dump(BufReader::new(f)).with_context(|| format!("parsing {}", path.display()))?;
    let mut docs: Vec<DumpDoc> = Vec::new();
    for r in rows {
        match docs.last_mut() {
            Some((id, g, p)) if *id == r.doc_id => {
                g.push(r.gold);
                p.push(r.predicted);
            }
            _ => docs.push((r.doc_id, vec![r.gold], vec![r.predicted])),
        }
    }
    Ok(docs)
}

fn dump_report(name: &str, docs: &[DumpDoc], window: usize) -> argmine::Result<EvalReport> {
    evaluate_pairs(name, docs.iter().map(|(_, g, p)| (g.as_slice(), p.as_slice())), window)
}

#[derive(Serialize)]
struct EvalOutput {
    report: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<Comparison>,
}

#[derive(Serialize)]
struct Comparison {
    report: EvalReport,
    test: argmine::evaluation::PairedTest,
}

fn eval(s: &Settings, a: crate::EvalArgs, mut meta: RunMetadata) -> CmdResult {
    let path: PathBuf = s.require("predictions", a.predictions)?;
    let window = s.or("boundary-window", a.boundary_window, DEFAULT_WINDOW)?;
    let format = format_flag(s, a.format, ReportFormat::Json)?;
    meta.set("boundary-window", window);
    let docs = read_dump(&path, &mut meta)?;
    let report = dump_report("predictions", &docs, window)?;
    let comparison = match s.get::<PathBuf>("compare", a.compare)? {
        None => None,
        Some(other) => {
            let b = read_dump(&other, &mut meta)?;
            let same = docs.len() == b.len() && docs.iter().zip(&b).all(|(x, y)| x.0 == y.0 && x.1 == y.1);
            if !same {
                return Err(anyhow!("{} and {} do not cover the same gold tokens", path.display(), other.display()).into());
            }
            let flat = |d: &[DumpDoc], pred: bool| -> Vec<BioLabel> {
                d.iter().flat_map(|(_, g, p)| if pred { p.clone() } else { g.clone() }).collect()
            };
            Some(Comparison {
                report: dump_report("compare", &b, window)?,
                test: liddell_exact_test(&flat(&docs, false), &flat(&docs, true), &flat(&b, true))?,
            })
        }
    };
    let text = match format {
        ReportFormat::Json => to_json(&EvalOutput { report, comparison })?,
        f => {
            let mut summary = vec![("Predictions", &report)];
            if let Some(c) = &comparison {
                summary.push(("Compare", &c.report));
            }
            render_report(
                &ReportInput {
                    summary,
                    ..Default::default()
                },
                f,
            )?
        }
    };
    let out: Option<PathBuf> = s.get("out", a.out)?;
    emit(&text, out.as_deref(), meta)?;
    Ok(0)
}

fn xval(s: &Settings, a: crate::XvalArgs, mut meta: RunMetadata, exec: &Exec) -> CmdResult {
    let (_, corpus) = load_corpus(s, a.corpus, &mut meta)?;
    let fs = feature_settings(s, a.features, &FeatureSets::TABLE.join(","))?;
    let folds = s.or("folds", a.folds, 10usize)?;
    if folds < 2 {
        return Err(usage("--folds must be at least 2"));
    }
    let scenario: Scenario = s
        .or("scenario", a.scenario, "all".to_string())?
        .parse()
        .map_err(|e: argmine::Error| usage(e.to_string()))?;
    let window = s.or("boundary-window", a.boundary_window, DEFAULT_WINDOW)?;
    let format = format_flag(s, a.format, ReportFormat::Markdown)?;
    let baselines = a.baselines || s.or("baselines", None, false)?;
    let out: PathBuf = s.require("out", a.out)?;
    fs.record(&mut meta);
    meta.set("folds", folds);
    meta.set("scenario", scenario.as_str());
    meta.set("boundary-window", window);
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let loaded = load_resources(&corpus, fs.embeddings.as_deref(), fs.layers.as_deref(), &mut meta)?;
    let resources = loaded.resources();
    let union = fs.sets.iter().fold(fs.sets[0], |acc, s| acc.union(*s));
    let union_config = FeatureConfig {
        sets: union,
        ..fs.base.clone()
    };
    resources.check(&union_config)?;
    meta.degraded_features = degradations(&union_config, &resources, &corpus);
    let pretrained = match &fs.lda_raw {
        Some(p) if union.contains(2) => Some(raw_topic_model(p, &fs.base, fs.training.seed, &mut meta)?),
        _ => None,
    };
    let perceptrons: Vec<PerceptronLearner> = fs
        .sets
        .iter()
        .map(|sets| PerceptronLearner {
            config: FeatureConfig {
                sets: *sets,
                ..fs.base.clone()
            },
            training: fs.training.clone(),
            embedding_dim: loaded.embeddings.as_ref().map(EmbeddingTable::dim),
        })
        .collect();
    let mut learners: Vec<&dyn Learner> = perceptrons.iter().map(|p| p as &dyn Learner).collect();
    if baselines {
        learners.push(&MajorityLearner);
        learners.push(&OracleLearner);
    }
    let experiment = Experiment {
        corpus: &corpus,
        resources,
        features: fs.base.clone(),
        folds,
        seed: fs.training.seed,
        boundary_window: window,
        pretrained_topics: pretrained.as_ref(),
        exec: *exec,
    };
    let report = experiment.run(scenario, &learners)?;
    report.audit(&corpus)?;
    for n in &report.notices {
        eprintln!("notice: {n}");
    }
    meta.notes.extend(report.notices.iter().cloned());

    let metrics = out.join("metrics.json");
    fs::write(&metrics, report.to_json()? + "\n")?;
    meta.output(&metrics);
    for (i, name) in report.systems.iter().enumerate() {
        let p = out.join(format!("predictions_{name}.tsv"));
        let f = fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
        write_token_dump(io::BufWriter::new(f), &report.token_rows(&corpus, i)?)?;
        meta.output(&p);
    }
    if format != ReportFormat::Json {
        let mut summary = Vec::new();
        let human = human_vs_gold(&corpus, window).ok().filter(|h| h.documents > 0);
        for r in &report.aggregated {
            summary.push((r.system.as_str(), r));
        }
        if let Some(h) = &human {
            summary.push(("human", h));
        }
        let text = render_report(
            &ReportInput {
                scenarios: vec![&report],
                summary,
                ..Default::default()
            },
            format,
        )?;
        let p = out.join(format!("report.{}", format.extension()));
        fs::write(&p, text)?;
        meta.output(&p);
    }
    for r in &report.aggregated {
        eprintln!(
            "{:>8}  macro-F1 {:.3}  accuracy {:.3}",
            r.system, r.scores.macro_f1, r.scores.accuracy
        );
    }
    meta.emit(Some(out.join("run_metadata.json")))?;
    Ok(0)
}

#[derive(Serialize)]
struct PersuasiveOutput {
    documents: usize,
    labeled: usize,
    persuasive: usize,
    agreement: FleissSummary,
    folds: usize,
    protocol: &'static str,
    cross_validation: argmine::persuasiveness::BinaryScores,
}

fn persuasive(s: &Settings, a: crate::PersuasiveArgs, mut meta: RunMetadata, exec: &Exec) -> CmdResult {
    let (_, corpus) = load_corpus(s, a.corpus, &mut meta)?;
    let folds = s.or("folds", a.folds, 10usize)?;
    let config = DocClassifierConfig {
        epochs: s.or("epochs", a.epochs, 10usize)?,
        seed: s.or("seed", a.seed, 0u64)?,
        min_count: s.or("min-count", a.min_count, 2usize)?,
        ..Default::default()
    };
    meta.set("folds", folds);
    meta.set("classifier", &config);
    meta.seeds.insert("seed".into(), config.seed);
    let protocol = "k-fold CV over a seeded shuffle; binary 1-3 gram features; averaged perceptron";
    meta.notes.push(protocol.into());
    let labeled: Vec<bool> = corpus.documents.iter().filter_map(|d| d.persuasive.as_ref().map(|p| p.label)).collect();
    let cv = cross_validate_docs(&corpus, folds, &config, exec)?;
    if let Some(p) = s.get::<PathBuf>("model-out", a.model_out)? {
        let ids: Vec<usize> = (0..corpus.len()).collect();
        save_classifier(&train_doc_classifier(&corpus, &ids, &config)?, &p)?;
        meta.output(&p);
    }
    let text = to_json(&PersuasiveOutput {
        documents: corpus.len(),
        labeled: labeled.len(),
        persuasive: labeled.iter().filter(|x| **x).count(),
        agreement: persuasive_fleiss(&corpus),
        folds,
        protocol,
        cross_validation: cv,
    })?;
    let out: Option<PathBuf> = s.get("out", a.out)?;
    emit(&text, out.as_deref(), meta)?;
    Ok(0)
}

fn report(s: &Settings, a: crate::ReportArgs, mut meta: RunMetadata) -> CmdResult {
    let corpus_flag: Option<PathBuf> = s.get("corpus", a.corpus)?;
    let corpus = match corpus_flag {
        Some(p) => Some(load_corpus(s, Some(p), &mut meta)?.1),
        None => None,
    };
    let window = s.or("boundary-window", a.boundary_window, DEFAULT_WINDOW)?;
    let format = format_flag(s, a.format, ReportFormat::Markdown)?;
    let mut scenarios: Vec<ScenarioReport> = Vec::new();
    for p in &a.results {
        meta.input(p).with_context(|| format!("reading {}", p.display()))?;
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        scenarios.push(serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?);
    }
    let predictions_path: Option<PathBuf> = s.get("predictions", a.predictions)?;
    let dump = match &predictions_path {
        Some(p) => Some(read_dump(p, &mut meta)?),
        None => None,
    };
    let system = match &dump {
        Some(d) => Some(dump_report("system", d, window)?),
        None => None,
    };
    let human = match &corpus {
        Some(c) if c.documents.iter().all(|d| d.gold.is_some()) => {
            human_vs_gold(c, window).ok().filter(|h| h.documents > 0)
        }
        _ => None,
    };
    let mut summary: Vec<(&str, &EvalReport)> = Vec::new();
    for sc in &scenarios {
        let baseline = sc.aggregated_for("0").or_else(|| sc.aggregated_for("all-O"));
        if let Some(b) = baseline {
            summary.push(("Baseline", b));
        }
        let best = sc
            .aggregated
            .iter()
            .filter(|r| r.system != "oracle" && r.system != "all-O")
            .max_by(|x, y| x.scores.macro_f1.total_cmp(&y.scores.macro_f1));
        if let Some(b) = best {
            summary.push(("Best system", b));
        }
    }
    if let Some(r) = &system {
        summary.push(("Predictions", r));
    }
    if let Some(h) = &human {
        summary.push(("Human", h));
    }
    let mut side = Vec::new();
    if let (Some(c), Some(d)) = (&corpus, &dump) {
        for (id, _, p) in d {
            if let Some(i) = c.index_of(id) {
                side.push((i, p.as_slice()));
            }
        }
    }
    let text = render_report(
        &ReportInput {
            scenarios: scenarios.iter().collect(),
            summary,
            corpus: corpus.as_ref(),
            predictions: side,
        },
        format,
    )?;
    let out: Option<PathBuf> = s.get("out", a.out)?;
    emit(&text, out.as_deref(), meta)?;
    Ok(0)
}
