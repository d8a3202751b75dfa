//! Averaged structured perceptron for linear-chain models.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::decode::viterbi;
use crate::error::{Error, Result};
use crate::par::derive_seed;

/// A sequence whose positions expose sparse (feature index, value) pairs.
pub trait Observation {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn for_each_feature(&self, position: usize, f: &mut dyn FnMut(usize, f64));
}

/// Explicit feature lists per position.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseSequence(pub Vec<Vec<(usize, f64)>>);

impl Observation for SparseSequence {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn for_each_feature(&self, position: usize, f: &mut dyn FnMut(usize, f64)) {
        for &(i, v) in &self.0[position] {
            f(i, v);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
    pub averaging: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            epochs: 10,
            seed: 0,
            shuffle: true,
            averaging: true,
        }
    }
}

/// Emission weights `[feature * labels + label]` and transition weights
/// `[prev * labels + label]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainWeights {
    pub labels: usize,
    pub emission: Vec<f64>,
    pub transition: Vec<f64>,
}

impl ChainWeights {
    pub fn zeros(dim: usize, labels: usize) -> Self {
        ChainWeights {
            labels,
            emission: vec![0.0; dim * labels],
            transition: vec![0.0; labels * labels],
        }
    }

    pub fn dim(&self) -> usize {
        self.emission.len() / self.labels
    }

    pub fn emissions<O: Observation + ?Sized>(&self, seq: &O) -> Vec<Vec<f64>> {
        let n = self.labels;
        let dim = self.dim();
        (0..seq.len())
            .map(|i| {
                let mut s = vec![0.0; n];
                seq.for_each_feature(i, &mut |f, v| {
                    if f < dim {
                        let row = &self.emission[f * n..(f + 1) * n];
                        for (acc, w) in s.iter_mut().zip(row) {
                            *acc += w * v;
                        }
                    }
                });
                s
            })
            .collect()
    }

    pub fn decode<O: Observation + ?Sized>(&self, seq: &O) -> Vec<usize> {
        viterbi(&self.emissions(seq), &self.transition)
    }
}

/// Per-epoch training statistics.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    /// Sequences decoded with at least one error, per epoch.
    pub sequence_errors: Vec<usize>,
    /// Mislabeled positions, per epoch.
    pub position_errors: Vec<usize>,
}

struct Averaged {
    w: ChainWeights,
    u: ChainWeights,
    c: f64,
}

impl Averaged {
    fn bump(&mut self, emission: bool, index: usize, delta: f64) {
        let c = self.c;
        if emission {
            self.w.emission[index] += delta;
            self.u.emission[index] += c * delta;
        } else {
            self.w.transition[index] += delta;
            self.u.transition[index] += c * delta;
        }
    }
}

/// Trains on `(observation, gold labels)` pairs. Deterministic for a fixed
/// configuration.
pub fn train_perceptron<O: Observation>(
    dim: usize,
    labels: usize,
    data: &[(O, Vec<usize>)],
    config: &TrainingConfig,
) -> Result<(ChainWeights, TrainingHistory)> {
    if dim == 0 {
        return Err(Error::InvalidInput("empty feature space".into()));
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("no training sequences".into()));
    }
    if config.epochs == 0 {
        return Err(Error::InvalidInput("epochs must be at least 1".into()));
    }
    for (o, g) in data {
        if o.len() != g.len() {
            return Err(Error::LengthMismatch {
                what: "observations and gold labels",
                left: o.len(),
                right: g.len(),
            });
        }
        if let Some(&bad) = g.iter().find(|&&y| y >= labels) {
            return Err(Error::InvalidInput(format!("gold label {bad} outside 0..{labels}")));
        }
    }
    let mut st = Averaged {
        w: ChainWeights::zeros(dim, labels),
        u: ChainWeights::zeros(dim, labels),
        c: 1.0,
    };
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = TrainingHistory::default();
    for epoch in 0..config.epochs {
        if config.shuffle {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, epoch as u64));
            order.shuffle(&mut rng);
        }
        let (mut seq_err, mut pos_err) = (0, 0);
        for &k in &order {
            let (obs, gold) = &data[k];
            let pred = st.w.decode(obs);
            if pred != *gold {
                seq_err += 1;
                for i in 0..gold.len() {
                    let (g, p) = (gold[i], pred[i]);
                    if g != p {
                        pos_err += 1;
                        obs.for_each_feature(i, &mut |f, v| {
                            if f < dim {
                                st.bump(true, f * labels + g, v);
                                st.bump(true, f * labels + p, -v);
                            }
                        });
                    }
                    if i > 0 {
                        let (gp, pp) = (gold[i - 1], pred[i - 1]);
                        if (gp, g) != (pp, p) {
                            st.bump(false, gp * labels + g, 1.0);
                            st.bump(false, pp * labels + p, -1.0);
                        }
                    }
                }
            }
            st.c += 1.0;
        }
        history.sequence_errors.push(seq_err);
        history.position_errors.push(pos_err);
    }
    if !config.averaging {
        return Ok((st.w, history));
    }
    let c = st.c;
    let avg = |w: &[f64], u: &[f64]| w.iter().zip(u).map(|(w, u)| w - u / c).collect();
    Ok((
        ChainWeights {
            labels,
            emission: avg(&st.w.emission, &st.u.emission),
            transition: avg(&st.w.transition, &st.u.transition),
        },
        history,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// Alternating labels; feature 0 is a bias, feature 1 marks the first
    /// position. Only transitions separate the rest of the sequence.
    fn alternating(rng: &mut ChaCha8Rng, count: usize) -> Vec<(SparseSequence, Vec<usize>)> {
        (0..count)
            .map(|_| {
                let len = rng.gen_range(2..12);
                let start = rng.gen_range(0..2usize);
                let obs = (0..len)
                    .map(|i| {
                        let mut f = vec![(0, 1.0)];
                        if i == 0 {
                            f.push((1 + start, 1.0));
                        }
                        f
                    })
                    .collect();
                (SparseSequence(obs), (0..len).map(|i| (start + i) % 2).collect())
            })
            .collect()
    }

    #[test]
    fn transitions_alone_disambiguate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let train = alternating(&mut rng, 50);
        let (w, _) = train_perceptron(3, 2, &train, &TrainingConfig::default()).unwrap();
        for (obs, gold) in alternating(&mut rng, 200) {
            assert_eq!(w.decode(&obs), gold);
        }
    }

    #[test]
    fn separable_data_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<_> = (0..40)
            .map(|_| {
                let len = rng.gen_range(1..8);
                let y: Vec<usize> = (0..len).map(|_| rng.gen_range(0..4)).collect();
                let obs = y.iter().map(|&l| vec![(l, 1.0), (4, 1.0)]).collect();
                (SparseSequence(obs), y)
            })
            .collect();
        let cfg = TrainingConfig {
            epochs: 50,
            ..Default::default()
        };
        let (w, h) = train_perceptron(5, 4, &data, &cfg).unwrap();
        assert!(h.sequence_errors.contains(&0));
        for (o, g) in &data {
            assert_eq!(&w.decode(o), g);
        }
    }

    #[test]
    fn deterministic_with_and_without_averaging() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = alternating(&mut rng, 20);
        for averaging in [true, false] {
            let cfg = TrainingConfig {
                averaging,
                seed: 4,
                ..Default::default()
            };
            let a = train_perceptron(3, 2, &data, &cfg).unwrap();
            let b = train_perceptron(3, 2, &data, &cfg).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        let data = vec![(SparseSequence(vec![vec![(0, 1.0)]]), vec![0])];
        assert!(train_perceptron(0, 2, &data, &TrainingConfig::default()).is_err());
        let none: Vec<(SparseSequence, Vec<usize>)> = Vec::new();
        assert!(train_perceptron(1, 2, &none, &TrainingConfig::default()).is_err());
        let cfg = TrainingConfig {
            epochs: 0,
            ..Default::default()
        };
        assert!(train_perceptron(1, 2, &data, &cfg).is_err());
        let bad = vec![(SparseSequence(vec![vec![(0, 1.0)]]), vec![0, 1])];
        assert!(train_perceptron(1, 2, &bad, &TrainingConfig::default()).is_err());
    }
}
