//! Krippendorff's unitized alpha over a continuum of tokens.
//!
//! For one category every annotator's continuum is cut into sections: the
//! units of that category and the gaps between them. Observed disagreement
//! sums squared distances over pairs of sections from different annotators:
//!
//! * two overlapping units: `(b_g - b_h)^2 + (e_g - e_h)^2`
//! * a unit lying inside a gap of the other annotator: the unit length squared
//! * everything else: 0
//!
//! normalized by `m (m - 1) L^2`. Expected disagreement is
//!
//! ```text
//! D_e = (2 / L) * sum_units [ (N - 1)/3 (2l^3 - 3l^2 + l) + l^2 sum_{gaps G >= l} (G - l + 1) ]
//!       / ( mL (mL - 1) - sum_units l (l - 1) )
//! ```
//!
//! with `N` the number of units of the category over all annotators and the
//! gap sum running over every annotator's gaps. Joint alpha over several
//! categories is `1 - sum D_o / sum D_e`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{ComponentType, Corpus, Document};
use crate::error::{Error, Result};
use crate::par::{derive_seed, Exec};

/// One annotated stretch of the continuum, `[start, start + len)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unit {
    pub start: usize,
    pub len: usize,
    pub category: ComponentType,
}

impl Unit {
    pub fn new(first_token: usize, last_token: usize, category: ComponentType) -> Self {
        Unit {
            start: first_token,
            len: last_token + 1 - first_token,
            category,
        }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Continuum {
    pub length: usize,
    /// Units per annotator, sorted by start.
    pub annotators: Vec<Vec<Unit>>,
}

impl Continuum {
    pub fn new(length: usize, mut annotators: Vec<Vec<Unit>>) -> Result<Self> {
        for (a, units) in annotators.iter_mut().enumerate() {
            units.sort_by_key(|u| (u.start, u.len));
            for u in units.iter() {
                if u.len == 0 || u.end() > length {
                    return Err(Error::InvalidInput(format!(
                        "annotator {a}: unit {}..{} outside continuum of length {length}",
                        u.start,
                        u.end()
                    )));
                }
            }
            for w in units.windows(2) {
                if w[0].category == w[1].category && w[1].start < w[0].end() {
                    return Err(Error::InvalidInput(format!(
                        "annotator {a}: overlapping {} units at {}",
                        w[0].category, w[1].start
                    )));
                }
            }
        }
        Ok(Continuum { length, annotators })
    }

    /// One continuum for a document, one annotator row per id. Missing
    /// annotators are an error.
    pub fn from_document(doc: &Document, annotators: &[String]) -> Result<Self> {
        let rows = annotators
            .iter()
            .map(|id| {
                let set = doc.annotation(id).ok_or_else(|| {
                    Error::InvalidInput(format!("document {} lacks annotator {id}", doc.id))
                })?;
                Ok(set
                    .spans
                    .iter()
                    .map(|s| Unit::new(s.first_token, s.last_token, s.component_type))
                    .collect())
            })
            .collect::<Result<Vec<Vec<Unit>>>>()?;
        Continuum::new(doc.token_count(), rows)
    }

    /// Concatenates continua that share the same annotator rows.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Continuum>) -> Result<Self> {
        let mut out: Option<Continuum> = None;
        for part in parts {
            let acc = out.get_or_insert_with(|| Continuum {
                length: 0,
                annotators: vec![Vec::new(); part.annotators.len()],
            });
            if acc.annotators.len() != part.annotators.len() {
                return Err(Error::LengthMismatch {
                    what: "annotators per continuum",
                    left: acc.annotators.len(),
                    right: part.annotators.len(),
                });
            }
            for (row, units) in acc.annotators.iter_mut().zip(&part.annotators) {
                row.extend(units.iter().map(|u| Unit {
                    start: u.start + acc.length,
                    ..*u
                }));
            }
            acc.length += part.length;
        }
        out.ok_or_else(|| Error::InvalidInput("nothing to concatenate".into()))
    }
}

/// A section of one annotator's continuum for one category.
#[derive(Clone, Copy, Debug)]
struct Section {
    start: i128,
    len: i128,
    unit: bool,
}

fn sections(units: &[Unit], category: ComponentType, length: usize) -> Vec<Section> {
    let mut out = Vec::new();
    let mut pos = 0usize;
    for u in units.iter().filter(|u| u.category == category) {
        if u.start > pos {
            out.push(Section {
                start: pos as i128,
                len: (u.start - pos) as i128,
                unit: false,
            });
        }
        out.push(Section {
            start: u.start as i128,
            len: u.len as i128,
            unit: true,
        });
        pos = u.end();
    }
    if pos < length {
        out.push(Section {
            start: pos as i128,
            len: (length - pos) as i128,
            unit: false,
        });
    }
    out
}

fn pair_distance(g: &Section, h: &Section) -> i128 {
    let d = g.start - h.start;
    match (g.unit, h.unit) {
        (true, true) if -g.len < d && d < h.len => d * d + (d + g.len - h.len).pow(2),
        (true, false) if h.len - g.len >= d && d >= 0 => g.len * g.len,
        (false, true) if g.len - h.len >= -d && -d >= 0 => h.len * h.len,
        _ => 0,
    }
}

/// Unnormalized observed and expected disagreement of one category, as the
/// exact integer sums plus their normalizers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Disagreement {
    pub observed: f64,
    pub expected: f64,
}

/// Observed and expected disagreement for one category.
pub fn disagreement(c: &Continuum, category: ComponentType) -> Result<Disagreement> {
    let m = c.annotators.len();
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "unitized alpha needs at least 2 annotators, found {m}"
        )));
    }
    if c.length == 0 {
        return Err(Error::InvalidInput("continuum is empty".into()));
    }
    let secs: Vec<Vec<Section>> = c
        .annotators
        .iter()
        .map(|u| sections(u, category, c.length))
        .collect();

    // Only overlapping sections contribute, so a merge sweep suffices.
    let mut d_o: i128 = 0;
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let (a, b) = (&secs[i], &secs[j]);
            let (mut x, mut y) = (0, 0);
            while x < a.len() && y < b.len() {
                d_o += pair_distance(&a[x], &b[y]);
                if a[x].start + a[x].len <= b[y].start + b[y].len {
                    x += 1;
                } else {
                    y += 1;
                }
            }
        }
    }

    let units: Vec<i128> = secs.iter().flatten().filter(|s| s.unit).map(|s| s.len).collect();
    let mut gaps: Vec<i128> = secs.iter().flatten().filter(|s| !s.unit).map(|s| s.len).collect();
    gaps.sort_unstable();
    // suffix[k] = sum over gaps[k..] of (G + 1)
    let mut suffix = vec![0i128; gaps.len() + 1];
    for k in (0..gaps.len()).rev() {
        suffix[k] = suffix[k + 1] + gaps[k] + 1;
    }
    let n_units = units.len() as i128;
    let mut num: i128 = 0;
    let mut within: i128 = 0;
    for &l in &units {
        // l (l - 1) (2l - 1) is divisible by 6, so the third is exact.
        num += (n_units - 1) * (2 * l * l * l - 3 * l * l + l) / 3;
        let k = gaps.partition_point(|&g| g < l);
        let count = (gaps.len() - k) as i128;
        num += l * l * (suffix[k] - l * count);
        within += l * (l - 1);
    }
    let ml = (m * c.length) as i128;
    let denom = ml * (ml - 1) - within;
    let len = c.length as f64;
    let observed = d_o as f64 / (m as f64 * (m - 1) as f64 * len * len);
    let expected = if denom > 0 {
        (2.0 / len) * num as f64 / denom as f64
    } else {
        0.0
    };
    Ok(Disagreement { observed, expected })
}

/// Unitized alpha for one category, or jointly when several are given.
pub fn alpha_u(c: &Continuum, categories: &[ComponentType]) -> Result<f64> {
    if categories.is_empty() {
        return Err(Error::InvalidInput("no category selected".into()));
    }
    let (mut d_o, mut d_e) = (0.0, 0.0);
    for &cat in categories {
        let d = disagreement(c, cat)?;
        d_o += d.observed;
        d_e += d.expected;
    }
    if d_e <= 0.0 {
        return Err(Error::Undefined(
            "expected disagreement is zero (no units of the selected categories)".into(),
        ));
    }
    Ok(1.0 - d_o / d_e)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementResult {
    pub value: f64,
    pub n_permutations: usize,
    /// Standard deviation of alpha across concatenation orders.
    pub std_error: f64,
    pub documents: usize,
}

/// Documents carrying every listed annotator, each as its own continuum.
pub fn document_continua(corpus: &Corpus, annotators: &[String]) -> Vec<(usize, Continuum)> {
    corpus
        .documents
        .iter()
        .enumerate()
        .filter(|(_, d)| annotators.iter().all(|a| d.annotation(a).is_some()))
        .filter_map(|(i, d)| Continuum::from_document(d, annotators).ok().map(|c| (i, c)))
        .collect()
}

/// Alpha over the whole corpus treated as one continuum. Documents are
/// concatenated in `n_perm` seeded random orders; the result is the mean over
/// orders. Each order draws from its own generator derived from
/// `(seed, permutation index)`, so the result does not depend on scheduling.
pub fn corpus_alpha_u(
    corpus: &Corpus,
    annotators: &[String],
    categories: &[ComponentType],
    n_perm: usize,
    seed: u64,
    exec: &Exec,
) -> Result<AgreementResult> {
    if n_perm == 0 {
        return Err(Error::InvalidInput("n_perm must be at least 1".into()));
    }
    if annotators.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "unitized alpha needs at least 2 annotators, found {}",
            annotators.len()
        )));
    }
    let parts: Vec<Continuum> = document_continua(corpus, annotators)
        .into_iter()
        .map(|(_, c)| c)
        .collect();
    if parts.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no document is annotated by all of {}",
            annotators.join(", ")
        )));
    }
    let values = exec.map_range(n_perm, |p| {
        let mut order: Vec<usize> = (0..parts.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(seed, p as u64)));
        let joined = Continuum::concat(order.iter().map(|&i| &parts[i]))?;
        alpha_u(&joined, categories)
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(AgreementResult {
        value: mean,
        n_permutations: n_perm,
        std_error: sd,
        documents: parts.len(),
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use ComponentType::*;

    fn cont(len: usize, rows: &[&[(usize, usize, ComponentType)]]) -> Continuum {
        Continuum::new(
            len,
            rows.iter()
                .map(|r| r.iter().map(|&(a, b, c)| Unit::new(a, b, c)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_is_exactly_one() {
        let c = cont(20, &[&[(2, 5, Claim), (9, 14, Premise)], &[(2, 5, Claim), (9, 14, Premise)]]);
        assert_eq!(alpha_u(&c, &[Claim]).unwrap(), 1.0);
        assert_eq!(alpha_u(&c, &ComponentType::LOGOS).unwrap(), 1.0);
    }

    #[test]
    fn shifted_unit_matches_oracle() {
        let c = cont(10, &[&[(0, 4, Claim)], &[(2, 6, Claim)]]);
        let a = alpha_u(&c, &[Claim]).unwrap();
        assert!((a - oracle::alpha(&c, &[Claim])).abs() < 1e-12);
        assert!(a < 1.0);
    }

    #[test]
    fn errors() {
        let one = cont(10, &[&[(0, 4, Claim)]]);
        assert!(matches!(alpha_u(&one, &[Claim]), Err(Error::InvalidInput(_))));
        let empty = cont(10, &[&[], &[]]);
        assert!(matches!(alpha_u(&empty, &[Claim]), Err(Error::Undefined(_))));
        assert!(Continuum::new(5, vec![vec![Unit::new(3, 6, Claim)]]).is_err());
    }

    fn random_rows(rng: &mut ChaCha8Rng, m: usize, len: usize, cats: &[ComponentType]) -> Vec<Vec<Unit>> {
        (0..m)
            .map(|_| {
                let mut units = Vec::new();
                let mut pos = rng.gen_range(0..3);
                while pos < len {
                    let l = rng.gen_range(1..=4).min(len - pos);
                    units.push(Unit {
                        start: pos,
                        len: l,
                        category: cats[rng.gen_range(0..cats.len())],
                    });
                    pos += l + rng.gen_range(0..4);
                }
                units
            })
            .collect()
    }

    #[test]
    fn sweep_matches_oracle_on_random_small_continua() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        for _ in 0..300 {
            let len = rng.gen_range(1..25);
            let m = rng.gen_range(2..5);
            let c = Continuum::new(len, random_rows(&mut rng, m, len, &[Claim, Premise])).unwrap();
            for cats in [&[Claim][..], &[Premise][..], &[Claim, Premise][..]] {
                if let Ok(a) = alpha_u(&c, cats) {
                    let o = oracle::alpha(&c, cats);
                    assert!((a - o).abs() < 1e-9, "{a} vs {o} on {c:?}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn single_document_value_ignores_corpus_order() {
        use crate::synth::{SynthConfig, SynthCorpus};
        let corpus = SynthCorpus::generate(&SynthConfig::small(1), 4);
        let ids = corpus.annotators();
        let c = Continuum::from_document(&corpus.documents[0], &ids).unwrap();
        let direct = alpha_u(&c, &ComponentType::LOGOS).unwrap();
        let r = corpus_alpha_u(&corpus, &ids, &ComponentType::LOGOS, 5, 1, &Exec::sequential()).unwrap();
        assert_eq!(r.value, direct);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn corpus_alpha_is_reproducible_across_executors() {
        use crate::synth::{SynthConfig, SynthCorpus};
        let corpus = SynthCorpus::generate(&SynthConfig::small(12), 8);
        let ids = corpus.annotators();
        let a = corpus_alpha_u(&corpus, &ids, &[Premise], 8, 42, &Exec::sequential()).unwrap();
        let b = corpus_alpha_u(&corpus, &ids, &[Premise], 8, 42, &Exec::parallel()).unwrap();
        assert_eq!(a, b);
        assert!(a.value > 0.0 && a.value <= 1.0);
        assert!(a.std_error >= 0.0);
    }

    #[test]
    fn identical_annotators_across_corpus() {
        use crate::synth::{SynthConfig, SynthCorpus};
        let mut cfg = SynthConfig::small(6);
        cfg.annotator_noise = 0.0;
        let corpus = SynthCorpus::generate(&cfg, 2);
        let ids = corpus.annotators();
        let r = corpus_alpha_u(&corpus, &ids, &ComponentType::LOGOS, 10, 0, &Exec::sequential()).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.std_error, 0.0);
    }
}
