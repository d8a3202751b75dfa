use std::collections::HashSet;

use serde::Serialize;

use super::{AnnotationSet, ComponentType, Corpus, Dimension, Document, Extent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub doc_id: String,
    pub field: String,
    pub message: String,
}

struct Collector<'a> {
    doc_id: &'a str,
    findings: Vec<Finding>,
}

impl Collector<'_> {
    fn error(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Error, field.into(), message.into());
    }

    fn warning(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Warning, field.into(), message.into());
    }

    fn push(&mut self, severity: Severity, field: String, message: String) {
        self.findings.push(Finding {
            severity,
            doc_id: self.doc_id.to_string(),
            field,
            message,
        });
    }
}

/// Checks every document invariant. Returns an empty list iff the document
/// is valid; warnings do not make a document invalid.
pub fn validate_document(doc: &Document) -> Vec<Finding> {
    let mut c = Collector {
        doc_id: &doc.id,
        findings: Vec::new(),
    };
    let len = doc.char_len();

    check_extents(&mut c, "paragraphs", &doc.paragraphs, len, false);
    check_extents(&mut c, "sentences", &doc.sentences, len, false);
    check_extents(&mut c, "tokens", &doc.tokens, len, true);

    // Sentences partition the token list.
    let mut covered = 0usize;
    for i in 0..doc.sentences.len() {
        let range = doc.sentence_tokens(i);
        if range.start != covered {
            c.error(
                format!("sentences[{i}]"),
                format!("tokens {covered}..{} are not inside any sentence", range.start),
            );
        }
        for t in range.clone() {
            if !doc.sentences[i].contains(&doc.tokens[t]) {
                c.error(format!("tokens[{t}]"), format!("token crosses the end of sentence {i}"));
            }
        }
        covered = covered.max(range.end);
    }
    if covered != doc.tokens.len() {
        c.error(
            "tokens",
            format!("tokens {covered}..{} are not inside any sentence", doc.tokens.len()),
        );
    }

    for i in 0..doc.sentences.len() {
        if doc.paragraph_of_sentence(i).is_none() {
            c.error(format!("sentences[{i}]"), "sentence does not lie within a single paragraph");
        }
    }

    let mut seen = HashSet::new();
    for (i, set) in doc.annotations.iter().enumerate() {
        if !seen.insert(set.annotator.as_str()) {
            c.error(format!("annotations[{i}].annotator"), format!("duplicate annotator `{}`", set.annotator));
        }
        check_annotation_set(&mut c, &format!("annotations[{i}]"), set, doc.tokens.len());
    }
    if let Some(gold) = &doc.gold {
        check_annotation_set(&mut c, "gold", gold, doc.tokens.len());
    }
    if let Some(p) = &doc.persuasive {
        let yes = p.votes.values().filter(|v| **v).count();
        let no = p.votes.len() - yes;
        if yes != no && (yes > no) != p.label {
            c.warning("persuasive.label", "label disagrees with the majority of votes");
        }
    }
    c.findings
}

fn check_extents(c: &mut Collector<'_>, name: &str, extents: &[Extent], len: usize, nonempty: bool) {
    let mut prev_end = 0usize;
    for (i, e) in extents.iter().enumerate() {
        if e.end > len {
            c.error(format!("{name}[{i}]"), format!("end {} exceeds text length {len}", e.end));
        }
        if e.start > e.end || (nonempty && e.start == e.end) {
            c.error(format!("{name}[{i}]"), format!("invalid range {}..{}", e.start, e.end));
        }
        if i > 0 && e.start < prev_end {
            c.error(format!("{name}[{i}]"), "overlaps or precedes the previous entry");
        }
        prev_end = prev_end.max(e.end);
    }
}

fn check_annotation_set(c: &mut Collector<'_>, prefix: &str, set: &AnnotationSet, n_tokens: usize) {
    for (j, span) in set.spans.iter().enumerate() {
        let field = format!("{prefix}.spans[{j}]");
        if span.first_token > span.last_token {
            c.error(&field, format!("first_token {} > last_token {}", span.first_token, span.last_token));
        }
        if span.last_token >= n_tokens {
            c.error(
                &field,
                format!("last_token {} out of range (document has {n_tokens} tokens)", span.last_token),
            );
        }
        if span.component_type.dimension() != span.dimension {
            c.error(
                &field,
                format!("type {} does not belong to the {:?} dimension", span.component_type, span.dimension),
            );
        }
        if span.implicit.is_some() && span.component_type != ComponentType::Claim {
            c.error(&field, "the implicit flag is only valid on claims");
        }
    }

    for dim in [Dimension::Logos, Dimension::Pathos] {
        let mut spans: Vec<(usize, &super::ComponentSpan)> = set
            .spans
            .iter()
            .enumerate()
            .filter(|(_, s)| s.dimension == dim)
            .collect();
        spans.sort_by_key(|(_, s)| (s.first_token, s.last_token));
        for w in spans.windows(2) {
            if w[0].1.overlaps(w[1].1) {
                c.error(
                    format!("{prefix}.spans[{}]", w[1].0),
                    format!("overlaps spans[{}] in the {:?} dimension", w[0].0, dim),
                );
            }
        }
    }

    let has = |t: ComponentType| set.spans.iter().any(|s| s.component_type == t);
    if has(ComponentType::Refutation) && !has(ComponentType::Rebuttal) {
        c.warning(format!("{prefix}.spans"), "refutation without any rebuttal in the same annotation set");
    }
}

/// Validates every document plus corpus-level invariants (unique ids).
pub fn validate_corpus(corpus: &Corpus) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for doc in &corpus.documents {
        if !ids.insert(doc.id.as_str()) {
            out.push(Finding {
                severity: Severity::Error,
                doc_id: doc.id.clone(),
                field: "id".into(),
                message: "duplicate document id".into(),
            });
        }
        out.extend(validate_document(doc));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ComponentSpan, Register, Topic};
    use crate::synth::DocBuilder;

    fn doc() -> Document {
        DocBuilder::new("d", Topic::Homeschooling, Register::Comment)
            .paragraph(&[&["a", "b", "c", "."], &["d", "e", "."]])
            .build()
    }

    fn errors(f: &[Finding]) -> usize {
        f.iter().filter(|x| x.severity == Severity::Error).count()
    }

    #[test]
    fn disjoint_claim_and_premise_is_clean() {
        let mut d = doc();
        d.gold = Some(AnnotationSet::new(
            "gold",
            vec![
                ComponentSpan::new(ComponentType::Claim, 0, 3),
                ComponentSpan::new(ComponentType::Premise, 4, 6),
            ],
        ));
        assert_eq!(validate_document(&d), vec![]);
    }

    #[test]
    fn overlapping_premises_give_one_error() {
        let mut d = doc();
        d.annotations.push(AnnotationSet::new(
            "A",
            vec![
                ComponentSpan::new(ComponentType::Premise, 0, 3),
                ComponentSpan::new(ComponentType::Premise, 2, 5),
            ],
        ));
        let f = validate_document(&d);
        assert_eq!(f.len(), 1);
        assert_eq!(errors(&f), 1);
    }

    #[test]
    fn pathos_may_overlap_logos() {
        let mut d = doc();
        d.annotations.push(AnnotationSet::new(
            "A",
            vec![
                ComponentSpan::new(ComponentType::Premise, 0, 3),
                ComponentSpan::new(ComponentType::AppealToEmotion, 1, 5),
            ],
        ));
        assert!(validate_document(&d).is_empty());
    }

    #[test]
    fn refutation_without_rebuttal_warns() {
        let mut d = doc();
        d.annotations.push(AnnotationSet::new(
            "A",
            vec![ComponentSpan::new(ComponentType::Refutation, 0, 3)],
        ));
        let f = validate_document(&d);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].severity, Severity::Warning);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut d = doc();
        let mut s = ComponentSpan::new(ComponentType::AppealToEmotion, 0, 1);
        s.dimension = Dimension::Logos;
        d.annotations.push(AnnotationSet::new("A", vec![s]));
        assert_eq!(errors(&validate_document(&d)), 1);
    }

    #[test]
    fn token_outside_sentences_is_an_error() {
        let mut d = doc();
        d.sentences.pop();
        assert!(errors(&validate_document(&d)) >= 1);
    }

    #[test]
    fn implicit_flag_on_premise_is_an_error() {
        let mut d = doc();
        let mut s = ComponentSpan::new(ComponentType::Premise, 0, 1);
        s.implicit = Some(true);
        d.annotations.push(AnnotationSet::new("A", vec![s]));
        assert_eq!(errors(&validate_document(&d)), 1);
    }

    #[test]
    fn duplicate_ids_are_reported() {
        let c = Corpus::new("c", vec![doc(), doc()]);
        let f = validate_corpus(&c);
        assert_eq!(errors(&f), 1);
        assert_eq!(f[0].field, "id");
    }
}
