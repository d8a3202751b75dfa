use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Readability {
    pub ari: f64,
    pub coleman_liau: f64,
    pub flesch: f64,
    pub lix: f64,
}

/// Vowel groups, minus a word-final silent `e`, at least one.
pub fn syllables(word: &str) -> usize {
    let lower: Vec<char> = word.to_lowercase().chars().filter(|c| c.is_alphabetic()).collect();
    let vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0;
    let mut prev = false;
    for &c in &lower {
        let v = vowel(c);
        if v && !prev {
            groups += 1;
        }
        prev = v;
    }
    let n = lower.len();
    if groups > 1 && n >= 2 && lower[n - 1] == 'e' && !vowel(lower[n - 2]) {
        groups -= 1;
    }
    groups.max(1)
}

/// Readability indices over tokens and a sentence count. Tokens without any
/// letter or digit (punctuation) are not words.
pub fn readability(tokens: &[&str], sentences: usize) -> Result<Readability> {
    let words: Vec<&str> = tokens
        .iter()
        .copied()
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .collect();
    if sentences == 0 || words.is_empty() {
        return Err(Error::Undefined(
            "readability needs at least one sentence and one word".into(),
        ));
    }
    let w = words.len() as f64;
    let s = sentences as f64;
    let letters: usize = words.iter().map(|x| x.chars().filter(|c| c.is_alphabetic()).count()).sum();
    let chars: usize = words.iter().map(|x| x.chars().filter(|c| c.is_alphanumeric()).count()).sum();
    let syl: usize = words.iter().map(|x| syllables(x)).sum();
    let long = words
        .iter()
        .filter(|x| x.chars().filter(|c| c.is_alphabetic()).count() > 6)
        .count();
    let l = letters as f64 / w * 100.0;
    let s100 = s / w * 100.0;
    Ok(Readability {
        ari: 4.71 * (chars as f64 / w) + 0.5 * (w / s) - 21.43,
        coleman_liau: 0.0588 * l - 0.296 * s100 - 15.8,
        flesch: 206.835 - 1.015 * (w / s) - 84.6 * (syl as f64 / w),
        lix: w / s + 100.0 * long as f64 / w,
    })
}

pub fn document_readability(doc: &Document) -> Result<Readability> {
    readability(&doc.token_strings(), doc.sentence_count())
}
