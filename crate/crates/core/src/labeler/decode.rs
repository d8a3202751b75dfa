//! First-order Viterbi decoding over a dense label set.

/// Score of `labels` under per-position emission scores `emissions[i][y]`
/// and row-major transition scores `transitions[prev * n + y]`.
pub fn sequence_score(emissions: &[Vec<f64>], transitions: &[f64], labels: &[usize]) -> f64 {
    let n = emissions.first().map_or(0, Vec::len);
    let mut score = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        score += emissions[i][y];
        if i > 0 {
            score += transitions[labels[i - 1] * n + y];
        }
    }
    score
}

/// Highest-scoring label sequence. Ties go to the lower label index, both
/// for back-pointers and for the final label.
pub fn viterbi(emissions: &[Vec<f64>], transitions: &[f64]) -> Vec<usize> {
    let len = emissions.len();
    if len == 0 {
        return Vec::new();
    }
    let n = emissions[0].len();
    debug_assert_eq!(transitions.len(), n * n);
    let mut delta = emissions[0].clone();
    let mut back = vec![0usize; len * n];
    let mut next = vec![0.0; n];
    for i in 1..len {
        for y in 0..n {
            let mut best = 0;
            let mut best_score = delta[0] + transitions[y];
            for p in 1..n {
                let s = delta[p] + transitions[p * n + y];
                if s > best_score {
                    best = p;
                    best_score = s;
                }
            }
            back[i * n + y] = best;
            next[y] = best_score + emissions[i][y];
        }
        std::mem::swap(&mut delta, &mut next);
    }
    let mut y = 0;
    for k in 1..n {
        if delta[k] > delta[y] {
            y = k;
        }
    }
    let mut out = vec![0; len];
    out[len - 1] = y;
    for i in (1..len).rev() {
        y = back[i * n + y];
        out[i - 1] = y;
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(rng: &mut ChaCha8Rng, len: usize, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let e = (0..len).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let t = (0..n * n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        (e, t)
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let len = rng.gen_range(1..=6);
            let (e, t) = random_instance(&mut rng, len, 5);
            let got = sequence_score(&e, &t, &viterbi(&e, &t));
            approx::assert_abs_diff_eq!(got, brute::best_score(&e, &t), epsilon = 1e-9);
        }
    }

    #[test]
    fn beats_random_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (e, t) = random_instance(&mut rng, 40, 11);
        let best = sequence_score(&e, &t, &viterbi(&e, &t));
        for _ in 0..10_000 {
            let labels: Vec<usize> = (0..40).map(|_| rng.gen_range(0..11)).collect();
            assert!(sequence_score(&e, &t, &labels) <= best + 1e-9);
        }
    }

    #[test]
    fn zero_model_picks_first_label() {
        let e = vec![vec![0.0; 11]; 7];
        assert_eq!(viterbi(&e, &[0.0; 121]), vec![0; 7]);
        assert!(viterbi(&[], &[0.0; 121]).is_empty());
    }

    #[test]
    fn forbidden_transition_never_decoded() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (e, mut t) = random_instance(&mut rng, 12, 11);
            t[2] = -1e6;
            let y = viterbi(&e, &t);
            assert!(y.windows(2).all(|w| w != [0, 2]));
        }
    }
}
