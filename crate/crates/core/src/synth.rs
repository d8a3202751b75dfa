//! Synthetic corpora for tests, benchmarks and the acceptance suite.
//!
//! Generated documents follow the real corpus format: paragraphs, sentences
//! and tokens with character offsets, three annotators, and a gold set.
//! Argument components are runs of whole sentences (optionally with ragged
//! token-level edges) produced by a small Markov chain, and sentences inside
//! a component carry type-specific cue words so that a learner has signal.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    AnnotationSet, ComponentSpan, ComponentType, Corpus, Document, Extent, Persuasive, Register,
    Topic,
};
use crate::features::EmbeddingTable;

/// Builds a document from nested paragraphs → sentences → words.
/// Words are joined by single spaces, paragraphs by a blank line.
pub struct DocBuilder {
    id: String,
    topic: Topic,
    register: Register,
    text: String,
    chars: usize,
    paragraphs: Vec<Extent>,
    sentences: Vec<Extent>,
    tokens: Vec<Extent>,
}

impl DocBuilder {
    pub fn new(id: impl Into<String>, topic: Topic, register: Register) -> Self {
        DocBuilder {
            id: id.into(),
            topic,
            register,
            text: String::new(),
            chars: 0,
            paragraphs: Vec::new(),
            sentences: Vec::new(),
            tokens: Vec::new(),
        }
    }

    fn push_str(&mut self, s: &str) {
        self.text.push_str(s);
        self.chars += s.chars().count();
    }

    pub fn paragraph(mut self, sentences: &[&[&str]]) -> Self {
        let owned: Vec<Vec<String>> = sentences
            .iter()
            .map(|s| s.iter().map(|w| w.to_string()).collect())
            .collect();
        self.push_paragraph(&owned);
        self
    }

    pub fn push_paragraph(&mut self, sentences: &[Vec<String>]) {
        if !self.paragraphs.is_empty() {
            self.push_str("\n\n");
        }
        let p_start = self.chars;
        for (si, sentence) in sentences.iter().enumerate() {
            if si > 0 {
                self.push_str(" ");
            }
            let s_start = self.chars;
            for (wi, word) in sentence.iter().enumerate() {
                if wi > 0 {
                    self.push_str(" ");
                }
                let start = self.chars;
                self.push_str(word);
                self.tokens.push(Extent::new(start, self.chars));
            }
            self.sentences.push(Extent::new(s_start, self.chars));
        }
        self.paragraphs.push(Extent::new(p_start, self.chars));
    }

    pub fn build(self) -> Document {
        Document {
            id: self.id,
            topic: self.topic,
            register: self.register,
            text: self.text,
            paragraphs: self.paragraphs,
            sentences: self.sentences,
            tokens: self.tokens,
            annotations: Vec::new(),
            gold: None,
            persuasive: None,
            phase: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub documents: usize,
    pub topics: Vec<Topic>,
    pub sentences: (usize, usize),
    pub words: (usize, usize),
    pub paragraph_len: (usize, usize),
    /// Probability that a component edge is moved inside a sentence.
    pub ragged_edges: f64,
    pub annotators: usize,
    /// Per-sentence probability that an annotator deviates from gold.
    pub annotator_noise: f64,
    /// Probability that a component sentence contains its type's cue word.
    pub cue_strength: f64,
}

impl SynthConfig {
    pub fn small(documents: usize) -> Self {
        SynthConfig {
            documents,
            topics: vec![Topic::Homeschooling, Topic::Redshirting, Topic::PrayerInSchools],
            sentences: (2, 8),
            words: (3, 12),
            paragraph_len: (1, 4),
            ragged_edges: 0.0,
            annotators: 3,
            annotator_noise: 0.1,
            cue_strength: 0.9,
        }
    }

    pub fn aligned(mut self) -> Self {
        self.ragged_edges = 0.0;
        self
    }

    pub fn ragged(mut self, p: f64) -> Self {
        self.ragged_edges = p;
        self
    }
}

const FILLER: &[&str] = &[
    "the", "a", "of", "and", "to", "in", "is", "it", "that", "for", "with", "on", "was", "as",
    "are", "be", "this", "have", "not", "they", "at", "by", "from", "or", "one", "had", "but",
    "what", "all", "were", "when", "we", "there", "can", "an", "your", "which", "their", "said",
    "if", "do", "will", "each", "about", "how", "up", "out", "them", "then", "she", "many",
    "some", "so", "these", "would", "other", "into", "has", "more", "her", "two", "like", "him",
];

fn cue(t: ComponentType) -> &'static [&'static str] {
    match t {
        ComponentType::Claim => &["believe", "think", "should", "must"],
        ComponentType::Premise => &["because", "since", "therefore", "shows"],
        ComponentType::Backing => &["study", "research", "experience", "statistics"],
        ComponentType::Rebuttal => &["however", "opponents", "argue", "although"],
        ComponentType::Refutation => &["nonsense", "wrong", "actually", "untrue"],
        ComponentType::AppealToEmotion => &["shame", "heart"],
    }
}

fn topic_words(t: Topic) -> &'static [&'static str] {
    match t {
        Topic::Homeschooling => &["homeschool", "parents", "curriculum", "socialization"],
        Topic::Mainstreaming => &["inclusion", "disabilities", "classroom", "special"],
        Topic::PrayerInSchools => &["prayer", "religion", "church", "secular"],
        Topic::PublicPrivateSchools => &["private", "public", "tuition", "vouchers"],
        Topic::Redshirting => &["kindergarten", "birthday", "older", "delay"],
        Topic::SingleSexEducation => &["boys", "girls", "coed", "gender"],
    }
}

/// Sentence-level state of the generating chain.
fn next_state(prev: Option<ComponentType>, rng: &mut ChaCha8Rng) -> Option<ComponentType> {
    let r: f64 = rng.gen();
    match prev {
        None => {
            if r < 0.45 {
                None
            } else if r < 0.60 {
                Some(ComponentType::Claim)
            } else if r < 0.82 {
                Some(ComponentType::Premise)
            } else if r < 0.92 {
                Some(ComponentType::Backing)
            } else if r < 0.97 {
                Some(ComponentType::Rebuttal)
            } else {
                Some(ComponentType::Refutation)
            }
        }
        Some(ComponentType::Rebuttal) if r < 0.5 => Some(ComponentType::Refutation),
        Some(_) if r < 0.4 => None,
        Some(ComponentType::Claim) => Some(ComponentType::Premise),
        Some(_) if r < 0.7 => Some(ComponentType::Premise),
        Some(_) => Some(ComponentType::Backing),
    }
}

pub struct SynthCorpus;

impl SynthCorpus {
    pub fn generate(config: &SynthConfig, seed: u64) -> Corpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let documents = (0..config.documents)
            .map(|i| Self::document(config, i, &mut rng))
            .collect();
        Corpus::new(format!("synthetic-{seed}"), documents)
    }

    fn document(config: &SynthConfig, index: usize, rng: &mut ChaCha8Rng) -> Document {
        let topic = config.topics[index % config.topics.len()];
        let register = Register::ALL[rng.gen_range(0..Register::ALL.len())];
        let n_sent = rng.gen_range(config.sentences.0..=config.sentences.1);

        // Component runs over sentences.
        let mut states: Vec<Option<ComponentType>> = Vec::with_capacity(n_sent);
        let mut run_start = vec![false; n_sent];
        let mut i = 0;
        let mut prev = None;
        while i < n_sent {
            let state = next_state(prev, rng);
            let len = if state.is_some() { rng.gen_range(1..=3) } else { rng.gen_range(1..=2) };
            for k in 0..len.min(n_sent - i) {
                states.push(state);
                run_start[i + k] = k == 0;
            }
            i += len.min(n_sent - i);
            prev = state;
        }

        let mut sentences: Vec<Vec<String>> = Vec::with_capacity(n_sent);
        for state in &states {
            let n_words = rng.gen_range(config.words.0..=config.words.1);
            let mut words: Vec<String> = (0..n_words)
                .map(|_| {
                    if rng.gen_bool(0.15) {
                        topic_words(topic).choose(rng).unwrap().to_string()
                    } else {
                        FILLER.choose(rng).unwrap().to_string()
                    }
                })
                .collect();
            if let Some(t) = state {
                if rng.gen_bool(config.cue_strength) {
                    let pos = rng.gen_range(0..words.len().max(1));
                    words.insert(pos, cue(*t).choose(rng).unwrap().to_string());
                }
            }
            if let Some(first) = words.first_mut() {
                let mut c = first.chars();
                if let Some(h) = c.next() {
                    *first = h.to_uppercase().chain(c).collect();
                }
            }
            words.push(".".to_string());
            sentences.push(words);
        }

        let mut builder = DocBuilder::new(format!("doc{index:04}"), topic, register);
        let mut s = 0;
        while s < n_sent {
            let len = rng
                .gen_range(config.paragraph_len.0..=config.paragraph_len.1)
                .min(n_sent - s)
                .max(1);
            builder.push_paragraph(&sentences[s..s + len]);
            s += len;
        }
        let mut doc = builder.build();

        let mut spans = Vec::new();
        let mut s = 0;
        while s < n_sent {
            let Some(t) = states[s] else {
                s += 1;
                continue;
            };
            let mut e = s;
            while e + 1 < n_sent && states[e + 1] == Some(t) && !run_start[e + 1] {
                e += 1;
            }
            let mut first = doc.sentence_tokens(s).start;
            let mut last = doc.sentence_tokens(e).end - 1;
            if config.ragged_edges > 0.0 {
                let head = doc.sentence_tokens(s);
                if head.len() > 2 && rng.gen_bool(config.ragged_edges) && (s == 0 || states[s - 1].is_none()) {
                    first += rng.gen_range(1..head.len() - 1);
                }
                let tail = doc.sentence_tokens(e);
                if tail.len() > 2
                    && rng.gen_bool(config.ragged_edges)
                    && (e + 1 == n_sent || states[e + 1].is_none())
                    && last > first + 1
                {
                    last -= rng.gen_range(1..(tail.len() - 1).min(last - first));
                }
            }
            spans.push(ComponentSpan::new(t, first, last));
            s = e + 1;
        }
        doc.gold = Some(AnnotationSet::new("gold", spans.clone()));

        for a in 0..config.annotators {
            let mut own: Vec<ComponentSpan> = Vec::new();
            for span in &spans {
                if rng.gen_bool(config.annotator_noise) {
                    match rng.gen_range(0..3) {
                        0 => continue,
                        1 => {
                            let alt = ComponentType::LOGOS[rng.gen_range(0..5)];
                            own.push(ComponentSpan::new(alt, span.first_token, span.last_token));
                        }
                        _ => {
                            let first = (span.first_token + 1).min(span.last_token);
                            own.push(ComponentSpan::new(span.component_type, first, span.last_token));
                        }
                    }
                } else {
                    own.push(span.clone());
                }
            }
            doc.annotations.push(AnnotationSet::new(format!("annotator{}", a + 1), own));
        }

        let persuasive = spans.iter().any(|s| s.component_type == ComponentType::Claim);
        doc.persuasive = Some(Persuasive {
            label: persuasive,
            votes: BTreeMap::new(),
        });
        doc
    }

    /// Random embeddings for every word the generator can emit. Cue words of
    /// one component type share a direction so that summed sentence vectors
    /// carry the label signal.
    pub fn embeddings(dim: usize, seed: u64) -> EmbeddingTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = EmbeddingTable::new(dim);
        let mut directions: BTreeMap<ComponentType, Vec<f32>> = BTreeMap::new();
        for t in ComponentType::ALL {
            directions.insert(t, (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }
        for w in FILLER {
            table.insert(w.to_string(), (0..dim).map(|_| rng.gen_range(-0.1..0.1)).collect());
        }
        for t in Topic::ALL {
            for w in topic_words(t) {
                table.insert(w.to_string(), (0..dim).map(|_| rng.gen_range(-0.3..0.3)).collect());
            }
        }
        for t in ComponentType::ALL {
            for w in cue(t) {
                let v = directions[&t].iter().map(|x| x + rng.gen_range(-0.2..0.2)).collect();
                table.insert(w.to_string(), v);
            }
        }
        table
    }

    /// Unlabeled raw texts over the generator's vocabulary, for topic models.
    pub fn raw_texts(n: usize, seed: u64) -> Vec<Vec<String>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let topic = Topic::ALL[rng.gen_range(0..6)];
                (0..rng.gen_range(20..60))
                    .map(|_| {
                        if rng.gen_bool(0.4) {
                            topic_words(topic).choose(&mut rng).unwrap().to_string()
                        } else {
                            FILLER.choose(&mut rng).unwrap().to_string()
                        }
                    })
                    .collect()
            })
            .collect()
    }
}
