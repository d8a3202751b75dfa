use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// Word vectors of one fixed dimensionality.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f32>>,
    duplicates: Vec<String>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            ..Default::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Words that occurred more than once while loading; the last vector won.
    pub fn duplicates(&self) -> &[String] {
        &self.duplicates
    }

    /// Inserts or replaces a vector. Panics on a dimensionality mismatch.
    pub fn insert(&mut self, word: String, vector: Vec<f32>) {
        assert_eq!(vector.len(), self.dim, "embedding dimensionality");
        self.vectors.insert(word, vector);
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Lowercased form first, then the original casing.
    pub fn lookup(&self, word: &str, lowercase: bool) -> Option<&[f32]> {
        if lowercase {
            let lower = word.to_lowercase();
            if let Some(v) = self.get(&lower) {
                return Some(v);
            }
        }
        self.get(word)
    }

    /// Reads the text word-vector format: an optional `<count> <dim>` header
    /// line, then one word followed by its components per line. When `keep`
    /// is given, other words are skipped (their rows are still checked).
    pub fn parse<R: BufRead>(reader: R, keep: Option<&HashSet<String>>) -> Result<Self> {
        let mut table: Option<EmbeddingTable> = None;
        let mut seen: HashSet<String> = HashSet::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::Format {
                line: line_no,
                message: e.to_string(),
            })?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(' ').filter(|f| !f.is_empty());
            let word = fields.next().expect("line is not empty");
            let rest: Vec<&str> = fields.collect();
            if i == 0 && rest.len() == 1 && word.parse::<usize>().is_ok() {
                if let Ok(dim) = rest[0].parse::<usize>() {
                    table = Some(EmbeddingTable::new(dim));
                    continue;
                }
            }
            let t = table.get_or_insert_with(|| EmbeddingTable::new(rest.len()));
            if rest.len() != t.dim || t.dim == 0 {
                return Err(Error::Format {
                    line: line_no,
                    message: format!("expected {} components, found {}", t.dim, rest.len()),
                });
            }
            if !seen.insert(word.to_string()) {
                log::warn!("embedding for `{word}` repeated at line {line_no}; last occurrence wins");
                t.duplicates.push(word.to_string());
            }
            if keep.is_some_and(|k| !k.contains(word)) {
                continue;
            }
            let vector = rest
                .iter()
                .map(|f| f.parse::<f32>())
                .collect::<std::result::Result<Vec<f32>, _>>()
                .map_err(|e| Error::Format {
                    line: line_no,
                    message: format!("bad component: {e}"),
                })?;
            t.vectors.insert(word.to_string(), vector);
        }
        table.ok_or_else(|| Error::Format {
            line: 0,
            message: "embedding file is empty".into(),
        })
    }
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    load_embeddings_filtered(path, None)
}

/// Loads only the listed words, to keep large tables small in memory.
pub fn load_embeddings_filtered(path: impl AsRef<Path>, keep: Option<&HashSet<String>>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    EmbeddingTable::parse(BufReader::new(file), keep)
}

/// Elementwise sum of the vectors of all in-table tokens.
pub fn sentence_embedding(tokens: &[&str], table: &EmbeddingTable, lowercase: bool) -> Vec<f64> {
    let mut sum = vec![0.0f64; table.dim()];
    for t in tokens {
        if let Some(v) = table.lookup(t, lowercase) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += f64::from(*x);
            }
        }
    }
    sum
}
