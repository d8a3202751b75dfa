use serde::{Deserialize, Serialize};

use crate::encoding::BioLabel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedTest {
    /// Tokens where A is correct and B is not.
    pub n10: u64,
    /// Tokens where B is correct and A is not.
    pub n01: u64,
    pub p_value: f64,
}

/// Two-sided exact matched-pairs test on per-token correctness.
pub fn liddell_exact_test(
    gold: &[BioLabel],
    pred_a: &[BioLabel],
    pred_b: &[BioLabel],
) -> Result<PairedTest> {
    if gold.len() != pred_a.len() || gold.len() != pred_b.len() {
        return Err(Error::LengthMismatch {
            what: "gold vs system predictions",
            left: gold.len(),
            right: if gold.len() != pred_a.len() { pred_a.len() } else { pred_b.len() },
        });
    }
    let (mut n10, mut n01) = (0u64, 0u64);
    for ((g, a), b) in gold.iter().zip(pred_a).zip(pred_b) {
        match (a == g, b == g) {
            (true, false) => n10 += 1,
            (false, true) => n01 += 1,
            _ => {}
        }
    }
    Ok(PairedTest {
        n10,
        n01,
        p_value: discordant_p_value(n10, n01),
    })
}

/// `min(1, 2 * P[X >= max(n10, n01)])` for `X ~ Binomial(n10 + n01, 1/2)`.
pub fn discordant_p_value(n10: u64, n01: u64) -> f64 {
    let n = n10 + n01;
    if n == 0 {
        return 1.0;
    }
    let k0 = n10.max(n01);
    // ln C(n, k) built incrementally from ln C(n, k0).
    let ln_fact = |m: u64| (1..=m).map(|i| (i as f64).ln()).sum::<f64>();
    let ln_half_n = n as f64 * 0.5f64.ln();
    let mut ln_c = ln_fact(n) - ln_fact(k0) - ln_fact(n - k0);
    let mut tail = 0.0;
    for k in k0..=n {
        tail += (ln_c + ln_half_n).exp();
        if k < n {
            ln_c += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
        }
    }
    (2.0 * tail).min(1.0)
}
