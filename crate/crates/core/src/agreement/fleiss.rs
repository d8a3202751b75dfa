use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Fleiss' kappa. Each item lists the category chosen by each rater; every
/// item must have the same number of raters.
pub fn fleiss_kappa<T: Ord>(items: &[Vec<T>]) -> Result<f64> {
    let first = items
        .first()
        .ok_or_else(|| Error::InvalidInput("no items to rate".into()))?;
    let n = first.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 raters per item, found {n}")));
    }
    let mut totals: BTreeMap<&T, f64> = BTreeMap::new();
    let mut p_bar = 0.0;
    for (i, item) in items.iter().enumerate() {
        if item.len() != n {
            return Err(Error::InvalidInput(format!(
                "item {i} has {} ratings, expected {n}",
                item.len()
            )));
        }
        let mut counts: BTreeMap<&T, f64> = BTreeMap::new();
        for v in item {
            *counts.entry(v).or_default() += 1.0;
            *totals.entry(v).or_default() += 1.0;
        }
        let agree: f64 = counts.values().map(|c| c * c).sum::<f64>() - n as f64;
        p_bar += agree / (n as f64 * (n as f64 - 1.0));
    }
    let nn = items.len() as f64;
    p_bar /= nn;
    let p_e: f64 = totals.values().map(|c| (c / (nn * n as f64)).powi(2)).sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Err(Error::Undefined("only one category occurs in the ratings".into()));
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Count-table form of the textbook definition.
    fn oracle(table: &[Vec<usize>]) -> f64 {
        let n_items = table.len() as f64;
        let k = table[0].len();
        let n: usize = table[0].iter().sum();
        let n = n as f64;
        let mut p_i_sum = 0.0;
        for row in table {
            let s: f64 = row.iter().map(|&c| (c * c) as f64).sum();
            p_i_sum += (s - n) / (n * (n - 1.0));
        }
        let p_bar = p_i_sum / n_items;
        let mut p_e = 0.0;
        for j in 0..k {
            let col: usize = table.iter().map(|r| r[j]).sum();
            let p_j = col as f64 / (n_items * n);
            p_e += p_j * p_j;
        }
        (p_bar - p_e) / (1.0 - p_e)
    }

    fn to_votes(table: &[Vec<usize>]) -> Vec<Vec<usize>> {
        table
            .iter()
            .map(|row| row.iter().enumerate().flat_map(|(j, &c)| std::iter::repeat_n(j, c)).collect())
            .collect()
    }

    #[test]
    fn small_hand_table() {
        let items = vec![vec!['A', 'A', 'B'], vec!['A', 'B', 'B'], vec!['A'; 3], vec!['B'; 3]];
        // P_i = 1/3, 1/3, 1, 1 → P̄ = 2/3; p_A = p_B = 1/2 → P_e = 1/2.
        let k = fleiss_kappa(&items).unwrap();
        assert!((k - 1.0 / 3.0).abs() < 1e-12);
        let table = vec![vec![2, 1], vec![1, 2], vec![3, 0], vec![0, 3]];
        assert!((k - oracle(&table)).abs() < 1e-12);
    }

    #[test]
    fn unanimous_is_one() {
        let items = vec![vec![1, 1, 1], vec![0, 0, 0], vec![2, 2, 2]];
        assert_eq!(fleiss_kappa(&items).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fleiss_kappa(&[vec![0, 0], vec![0, 0]]), Err(Error::Undefined(_))));
        assert!(fleiss_kappa(&[vec![0, 1], vec![0]]).is_err());
        assert!(fleiss_kappa::<u8>(&[]).is_err());
    }

    #[test]
    fn random_tables_match_oracle_and_ignore_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = rng.gen_range(2..5);
            let raters = rng.gen_range(2..6);
            let table: Vec<Vec<usize>> = (0..rng.gen_range(2..30))
                .map(|_| {
                    let mut row = vec![0; k];
                    for _ in 0..raters {
                        row[rng.gen_range(0..k)] += 1;
                    }
                    row
                })
                .collect();
            let votes = to_votes(&table);
            let Ok(v) = fleiss_kappa(&votes) else { continue };
            assert!((v - oracle(&table)).abs() < 1e-9);
            let relabeled: Vec<Vec<usize>> =
                votes.iter().map(|r| r.iter().map(|&c| (c + 1) % k).collect()).collect();
            assert!((fleiss_kappa(&relabeled).unwrap() - v).abs() < 1e-12);
        }
    }
}
