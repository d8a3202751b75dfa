use serde::{Deserialize, Serialize};

use crate::encoding::BioLabel;
use crate::error::{Error, Result};

const N: usize = BioLabel::COUNT;

/// Token counts indexed `[gold][predicted]` in BIO label order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; N]; N],
}

impl ConfusionMatrix {
    pub fn from_sequences(gold: &[BioLabel], predicted: &[BioLabel]) -> Result<Self> {
        let mut cm = ConfusionMatrix::default();
        cm.add_sequences(gold, predicted)?;
        Ok(cm)
    }

    pub fn add(&mut self, gold: BioLabel, predicted: BioLabel) {
        self.counts[gold.index()][predicted.index()] += 1;
    }

    pub fn add_sequences(&mut self, gold: &[BioLabel], predicted: &[BioLabel]) -> Result<()> {
        if gold.len() != predicted.len() {
            return Err(Error::LengthMismatch {
                what: "gold vs predicted tokens",
                left: gold.len(),
                right: predicted.len(),
            });
        }
        for (g, p) in gold.iter().zip(predicted) {
            self.add(*g, *p);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for g in 0..N {
            for p in 0..N {
                self.counts[g][p] += other.counts[g][p];
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..N).map(|i| self.counts[i][i]).sum()
    }

    /// Row-normalized view: row `g` is the distribution of predictions for
    /// gold label `g`. Rows of unseen gold labels are `None`.
    pub fn row_normalized(&self) -> Vec<Option<Vec<f64>>> {
        self.counts
            .iter()
            .map(|row| {
                let total: u64 = row.iter().sum();
                (total > 0).then(|| row.iter().map(|&c| c as f64 / total as f64).collect())
            })
            .collect()
    }

    pub fn scores(&self) -> TokenScores {
        let per_class: Vec<ClassScore> = BioLabel::ALL
            .iter()
            .map(|&label| {
                let i = label.index();
                let tp = self.counts[i][i] as f64;
                let gold: u64 = self.counts[i].iter().sum();
                let pred: u64 = (0..N).map(|g| self.counts[g][i]).sum();
                let precision = if pred > 0 { tp / pred as f64 } else { 0.0 };
                let recall = if gold > 0 { tp / gold as f64 } else { 0.0 };
                let f1 = if precision + recall > 0.0 {
                    2.0 * precision * recall / (precision + recall)
                } else {
                    0.0
                };
                ClassScore {
                    label,
                    precision,
                    recall,
                    f1,
                    support: gold,
                }
            })
            .collect();
        let macro_f1 = per_class.iter().map(|c| c.f1).sum::<f64>() / N as f64;
        let total = self.total();
        let accuracy = if total > 0 {
            self.correct() as f64 / total as f64
        } else {
            0.0
        };
        TokenScores {
            per_class,
            macro_f1,
            accuracy,
            tokens: total,
            confusion: self.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub label: BioLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold token count.
    pub support: u64,
}

/// Eleven-class token scores. Classes absent from both gold and prediction
/// score F1 = 0 and still count towards the macro average.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TokenScores {
    pub per_class: Vec<ClassScore>,
    pub macro_f1: f64,
    pub accuracy: f64,
    pub tokens: u64,
    pub confusion: ConfusionMatrix,
}

impl TokenScores {
    pub fn f1(&self, label: BioLabel) -> f64 {
        self.per_class[label.index()].f1
    }
}

pub fn token_macro_f1(gold: &[BioLabel], predicted: &[BioLabel]) -> Result<TokenScores> {
    Ok(ConfusionMatrix::from_sequences(gold, predicted)?.scores())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use BioLabel::*;

    #[test]
    fn perfect_predictions() {
        let g = vec![O, ClaimB, ClaimI, O];
        let s = token_macro_f1(&g, &g).unwrap();
        assert_eq!(s.f1(O), 1.0);
        assert_eq!(s.f1(ClaimB), 1.0);
        assert_eq!(s.f1(PremiseB), 0.0);
        assert_abs_diff_eq!(s.macro_f1, 3.0 / 11.0, epsilon = 1e-15);
        assert_eq!(s.accuracy, 1.0);
    }

    #[test]
    fn hand_counted_example() {
        let g = [O, O, ClaimB, ClaimI];
        let p = [O, ClaimB, ClaimI, ClaimI];
        let s = token_macro_f1(&g, &p).unwrap();
        // Claim-I: tp 1, predicted 2, gold 1.
        assert_abs_diff_eq!(s.per_class[ClaimI.index()].precision, 0.5);
        assert_abs_diff_eq!(s.per_class[ClaimI.index()].recall, 1.0);
        assert_abs_diff_eq!(s.f1(ClaimI), 2.0 / 3.0, epsilon = 1e-15);
        // O: tp 1, predicted 1, gold 2.
        assert_abs_diff_eq!(s.f1(O), 2.0 / 3.0, epsilon = 1e-15);
        // Claim-B: tp 0.
        assert_eq!(s.f1(ClaimB), 0.0);
        assert_abs_diff_eq!(s.macro_f1, (4.0 / 3.0) / 11.0, epsilon = 1e-15);
        assert_eq!(s.accuracy, 0.5);
        assert_eq!(s.confusion.total(), 4);
    }

    #[test]
    fn length_mismatch() {
        assert!(token_macro_f1(&[O], &[O, O]).is_err());
    }

    fn label() -> impl Strategy<Value = BioLabel> {
        (0usize..11).prop_map(BioLabel::from_index)
    }

    proptest! {
        #[test]
        fn merged_matrix_equals_concatenation(
            a in proptest::collection::vec((label(), label()), 0..50),
            b in proptest::collection::vec((label(), label()), 0..50),
        ) {
            let split = |v: &[(BioLabel, BioLabel)]| -> (Vec<_>, Vec<_>) { v.iter().copied().unzip() };
            let (ga, pa) = split(&a);
            let (gb, pb) = split(&b);
            let mut m = ConfusionMatrix::from_sequences(&ga, &pa).unwrap();
            m.merge(&ConfusionMatrix::from_sequences(&gb, &pb).unwrap());
            let all: Vec<_> = a.iter().chain(&b).copied().collect();
            let (g, p) = split(&all);
            prop_assert_eq!(&m, &ConfusionMatrix::from_sequences(&g, &p).unwrap());
            prop_assert_eq!(m.total(), all.len() as u64);
            let s = m.scores();
            let mean = s.per_class.iter().map(|c| c.f1).sum::<f64>() / 11.0;
            prop_assert_eq!(s.macro_f1, mean);
        }
    }
}
