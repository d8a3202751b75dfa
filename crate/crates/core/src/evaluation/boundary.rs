//! Boundary similarity between two segmentations of one continuum.
//!
//! Boundaries present in both segmentations are matches. The remaining
//! boundaries are either paired as near-miss transpositions (distance at most
//! `window`, cost `d / (window + 1)`) or left as additions/deletions (cost 1).
//! Among all pairings the one with the highest similarity
//!
//! ```text
//! B = 1 - (additions + transposition cost) / (additions + transpositions + matches)
//! ```
//!
//! is used. Two segmentations without any boundary have similarity 1.

use serde::{Deserialize, Serialize};

use crate::encoding::BioLabel;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 2;

/// Boundary positions within a continuum of `length` units. A boundary at
/// `p` separates unit `p - 1` from unit `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    pub length: usize,
    pub boundaries: Vec<usize>,
}

impl Segmentation {
    pub fn new(length: usize, boundaries: Vec<usize>) -> Result<Self> {
        for (i, &b) in boundaries.iter().enumerate() {
            if b == 0 || b >= length {
                return Err(Error::InvalidInput(format!(
                    "boundary {b} outside (0, {length})"
                )));
            }
            if i > 0 && boundaries[i - 1] >= b {
                return Err(Error::InvalidInput("boundaries must be strictly increasing".into()));
            }
        }
        Ok(Segmentation { length, boundaries })
    }
}

/// Boundary positions where the component identity changes. A `-B` label
/// always opens a new component; runs of O are segments as well.
pub fn segmentation_from_labels(tokens: &[BioLabel]) -> Segmentation {
    let boundaries = (1..tokens.len())
        .filter(|&i| tokens[i].is_begin() || tokens[i].component() != tokens[i - 1].component())
        .collect();
    Segmentation {
        length: tokens.len(),
        boundaries,
    }
}

/// Edit tallies behind one similarity value. Tallies of several documents
/// add up to a pooled similarity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTally {
    pub matches: usize,
    pub additions: usize,
    pub transpositions: usize,
    pub transposition_cost: f64,
}

impl BoundaryTally {
    pub fn similarity(&self) -> f64 {
        let denom = (self.additions + self.transpositions + self.matches) as f64;
        if denom == 0.0 {
            return 1.0;
        }
        1.0 - (self.additions as f64 + self.transposition_cost) / denom
    }

    pub fn add(&mut self, other: &BoundaryTally) {
        self.matches += other.matches;
        self.additions += other.additions;
        self.transpositions += other.transpositions;
        self.transposition_cost += other.transposition_cost;
    }
}

pub fn boundary_similarity(a: &Segmentation, b: &Segmentation, window: usize) -> Result<f64> {
    Ok(boundary_tally(a, b, window)?.similarity())
}

pub fn boundary_tally(a: &Segmentation, b: &Segmentation, window: usize) -> Result<BoundaryTally> {
    if a.length != b.length {
        return Err(Error::LengthMismatch {
            what: "segmentation lengths",
            left: a.length,
            right: b.length,
        });
    }
    Segmentation::new(a.length, a.boundaries.clone())?;
    Segmentation::new(b.length, b.boundaries.clone())?;

    let in_b = |x: &usize| b.boundaries.binary_search(x).is_ok();
    let in_a = |x: &usize| a.boundaries.binary_search(x).is_ok();
    let ua: Vec<usize> = a.boundaries.iter().copied().filter(|x| !in_b(x)).collect();
    let ub: Vec<usize> = b.boundaries.iter().copied().filter(|x| !in_a(x)).collect();
    let matches = a.boundaries.len() - ua.len();

    // cost[i][j][t]: least transposition cost aligning ua[..i] with ub[..j]
    // using exactly t transpositions. Pairings never need to cross, so an
    // order-preserving alignment covers every optimum.
    let (n, m) = (ua.len(), ub.len());
    let max_t = n.min(m);
    let unit = 1.0 / (window as f64 + 1.0);
    let mut cost = vec![vec![vec![f64::INFINITY; max_t + 1]; m + 1]; n + 1];
    cost[0][0][0] = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            for t in 0..=max_t {
                let c = cost[i][j][t];
                if !c.is_finite() {
                    continue;
                }
                if i < n && c < cost[i + 1][j][t] {
                    cost[i + 1][j][t] = c;
                }
                if j < m && c < cost[i][j + 1][t] {
                    cost[i][j + 1][t] = c;
                }
                if i < n && j < m && t < max_t {
                    let d = ua[i].abs_diff(ub[j]);
                    if d <= window {
                        let nc = c + d as f64 * unit;
                        if nc < cost[i + 1][j + 1][t + 1] {
                            cost[i + 1][j + 1][t + 1] = nc;
                        }
                    }
                }
            }
        }
    }
    let mut best: Option<BoundaryTally> = None;
    for t in 0..=max_t {
        let c = cost[n][m][t];
        if !c.is_finite() {
            continue;
        }
        let tally = BoundaryTally {
            matches,
            additions: n + m - 2 * t,
            transpositions: t,
            transposition_cost: c,
        };
        if best.is_none_or(|b| tally.similarity() > b.similarity()) {
            best = Some(tally);
        }
    }
    Ok(best.expect("zero transpositions is always feasible"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use BioLabel::*;

    fn seg(len: usize, b: &[usize]) -> Segmentation {
        Segmentation::new(len, b.to_vec()).unwrap()
    }

    #[test]
    fn identical_is_one() {
        let a = seg(10, &[2, 5, 7]);
        assert_eq!(boundary_similarity(&a, &a, 2).unwrap(), 1.0);
        assert_eq!(boundary_similarity(&seg(10, &[]), &seg(10, &[]), 2).unwrap(), 1.0);
    }

    #[test]
    fn single_addition_is_zero() {
        assert_eq!(boundary_similarity(&seg(10, &[5]), &seg(10, &[]), 2).unwrap(), 0.0);
    }

    #[test]
    fn near_miss_is_partial_credit() {
        // One transposition at distance 1, window 2: cost 1/3 over 1 edit.
        let v = boundary_similarity(&seg(10, &[5]), &seg(10, &[6]), 2).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        // Beyond the window: two additions.
        assert_eq!(boundary_similarity(&seg(10, &[2]), &seg(10, &[6]), 2).unwrap(), 0.0);
        // One match plus one near miss at distance 2: 1 - (2/3) / 2.
        let v = boundary_similarity(&seg(20, &[3, 10]), &seg(20, &[3, 12]), 2).unwrap();
        assert!((v - (1.0 - (2.0 / 3.0) / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_boundary_is_an_error() {
        assert!(Segmentation::new(5, vec![5]).is_err());
        assert!(Segmentation::new(5, vec![0]).is_err());
        assert!(Segmentation::new(5, vec![3, 2]).is_err());
        let bad = Segmentation {
            length: 5,
            boundaries: vec![9],
        };
        assert!(boundary_similarity(&bad, &seg(5, &[]), 2).is_err());
    }

    #[test]
    fn segmentations_from_labels() {
        assert!(segmentation_from_labels(&[O, O, O]).boundaries.is_empty());
        assert_eq!(segmentation_from_labels(&[O, O, ClaimB, ClaimI, O]).boundaries, vec![2, 4]);
        assert_eq!(
            segmentation_from_labels(&[PremiseB, PremiseI, PremiseB]).boundaries,
            vec![2]
        );
        assert_eq!(segmentation_from_labels(&[ClaimI, PremiseI]).boundaries, vec![1]);
    }
}
