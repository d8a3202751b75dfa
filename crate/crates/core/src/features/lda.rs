//! Latent Dirichlet allocation trained by collapsed Gibbs sampling.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub topics: usize,
    /// Document-topic prior; `None` means `50 / topics`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    /// Sweeps used when inferring proportions of a new text.
    pub inference_iterations: usize,
    pub seed: u64,
}

impl LdaConfig {
    pub fn new(topics: usize, iterations: usize, seed: u64) -> Self {
        LdaConfig {
            topics,
            alpha: None,
            beta: 0.01,
            iterations,
            inference_iterations: 50,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub inference_iterations: usize,
    pub vocabulary: Vec<String>,
    /// Word-topic counts, row-major `[word][topic]`.
    pub word_topic: Vec<u32>,
    pub topic_totals: Vec<u64>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

fn sample(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut r = rng.gen::<f64>() * total;
    for (k, w) in weights.iter().enumerate() {
        r -= w;
        if r < 0.0 {
            return k;
        }
    }
    weights.len() - 1
}

fn fnv1a(words: &[String]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for w in words {
        for b in w.bytes().chain(std::iter::once(0)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Trains a topic model on tokenized texts. Single chain, deterministic for a
/// fixed seed.
pub fn train_lda(texts: &[Vec<String>], config: &LdaConfig) -> Result<TopicModel> {
    let t = config.topics;
    if t < 2 {
        return Err(Error::InvalidInput(format!("LDA needs at least 2 topics, got {t}")));
    }
    let mut vocabulary: Vec<String> = texts.iter().flatten().cloned().collect();
    vocabulary.sort();
    vocabulary.dedup();
    if vocabulary.is_empty() {
        return Err(Error::InvalidInput("LDA training texts have an empty vocabulary".into()));
    }
    let index: HashMap<String, usize> = vocabulary.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let docs: Vec<Vec<usize>> = texts.iter().map(|d| d.iter().map(|w| index[w]).collect()).collect();
    let alpha = config.alpha.unwrap_or(50.0 / t as f64);
    let beta = config.beta;
    let v = vocabulary.len();
    let vbeta = v as f64 * beta;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut nwt = vec![0u32; v * t];
    let mut nt = vec![0u64; t];
    let mut ndt: Vec<Vec<u32>> = docs.iter().map(|_| vec![0; t]).collect();
    let mut z: Vec<Vec<usize>> = docs
        .iter()
        .enumerate()
        .map(|(d, words)| {
            words
                .iter()
                .map(|&w| {
                    let k = rng.gen_range(0..t);
                    nwt[w * t + k] += 1;
                    nt[k] += 1;
                    ndt[d][k] += 1;
                    k
                })
                .collect()
        })
        .collect();

    let mut p = vec![0.0; t];
    for _ in 0..config.iterations {
        for (d, words) in docs.iter().enumerate() {
            for (i, &w) in words.iter().enumerate() {
                let old = z[d][i];
                nwt[w * t + old] -= 1;
                nt[old] -= 1;
                ndt[d][old] -= 1;
                for k in 0..t {
                    p[k] = (f64::from(ndt[d][k]) + alpha) * (f64::from(nwt[w * t + k]) + beta)
                        / (nt[k] as f64 + vbeta);
                }
                let new = sample(&mut rng, &p);
                z[d][i] = new;
                nwt[w * t + new] += 1;
                nt[new] += 1;
                ndt[d][new] += 1;
            }
        }
    }

    Ok(TopicModel {
        topics: t,
        alpha,
        beta,
        seed: config.seed,
        inference_iterations: config.inference_iterations,
        vocabulary,
        word_topic: nwt,
        topic_totals: nt,
        index,
    })
}

impl TopicModel {
    /// Rebuilds the word index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.vocabulary.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    }

    fn word(&self, w: &str) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Topic proportions of a new text by Gibbs sampling its assignments with
    /// the trained word-topic counts held fixed. The sampler is seeded from
    /// the text itself, so equal texts get equal proportions. A text without
    /// known words gets the uniform distribution.
    pub fn infer(&self, words: &[String]) -> Vec<f64> {
        let t = self.topics;
        let ids: Vec<usize> = words.iter().filter_map(|w| self.word(w)).collect();
        if ids.is_empty() {
            return vec![1.0 / t as f64; t];
        }
        let vbeta = self.vocabulary.len() as f64 * self.beta;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(words));
        let mut ndt = vec![0u32; t];
        let mut z: Vec<usize> = ids
            .iter()
            .map(|_| {
                let k = rng.gen_range(0..t);
                ndt[k] += 1;
                k
            })
            .collect();
        let mut p = vec![0.0; t];
        for _ in 0..self.inference_iterations {
            for (i, &w) in ids.iter().enumerate() {
                ndt[z[i]] -= 1;
                for k in 0..t {
                    p[k] = (f64::from(ndt[k]) + self.alpha) * (f64::from(self.word_topic[w * t + k]) + self.beta)
                        / (self.topic_totals[k] as f64 + vbeta);
                }
                z[i] = sample(&mut rng, &p);
                ndt[z[i]] += 1;
            }
        }
        let denom = ids.len() as f64 + t as f64 * self.alpha;
        let mut theta: Vec<f64> = ndt.iter().map(|&c| (f64::from(c) + self.alpha) / denom).collect();
        let s: f64 = theta.iter().sum();
        theta.iter_mut().for_each(|x| *x /= s);
        theta
    }

    /// The `n` most probable words of a topic.
    pub fn top_words(&self, topic: usize, n: usize) -> Vec<&str> {
        let t = self.topics;
        let mut ids: Vec<usize> = (0..self.vocabulary.len()).collect();
        ids.sort_by(|&a, &b| {
            self.word_topic[b * t + topic]
                .cmp(&self.word_topic[a * t + topic])
                .then(a.cmp(&b))
        });
        ids.into_iter().take(n).map(|i| self.vocabulary[i].as_str()).collect()
    }
}
