//! Human-readable experiment reports: metric tables and side-by-side gold
//! and predicted spans per document.

use std::fmt::Write;
use std::str::FromStr;

use super::scenario::{EvalReport, ScenarioReport};
use crate::corpus::{ComponentType, Corpus, Document};
use crate::encoding::BioLabel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
    Html,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "md" => Ok(ReportFormat::Markdown),
            "html" => Ok(ReportFormat::Html),
            _ => Err(Error::InvalidInput(format!("unknown format {s:?} (expected json, md or html)"))),
        }
    }
}

impl ReportFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
            ReportFormat::Html => "html",
        }
    }
}

/// What to render. Any part may be absent.
#[derive(Default)]
pub struct ReportInput<'a> {
    pub scenarios: Vec<&'a ScenarioReport>,
    /// Rows of the summary table (for example baseline, best system, human).
    pub summary: Vec<(&'a str, &'a EvalReport)>,
    pub corpus: Option<&'a Corpus>,
    /// Predicted token labels per document index, for the side-by-side part.
    pub predictions: Vec<(usize, &'a [BioLabel])>,
}

/// Table rows plus cells, shared by both text formats.
struct Table {
    title: String,
    head: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn f3(x: f64) -> String {
    format!("{x:.3}")
}

fn opt3(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), f3)
}

fn class_table(title: String, reports: &[&EvalReport]) -> Table {
    let mut head = vec!["System".to_string(), "Macro-F1".to_string(), "Accuracy".to_string()];
    head.extend(BioLabel::ALL.iter().map(|l| l.name().to_string()));
    let rows = reports
        .iter()
        .map(|r| {
            let mut row = vec![r.system.clone(), f3(r.scores.macro_f1), f3(r.scores.accuracy)];
            row.extend(BioLabel::ALL.iter().map(|l| f3(r.scores.f1(*l))));
            row
        })
        .collect();
    Table { title, head, rows }
}

fn tables(input: &ReportInput<'_>) -> Vec<Table> {
    let mut out = Vec::new();
    if !input.summary.is_empty() {
        out.push(Table {
            title: "Summary".into(),
            head: ["", "Macro-F1", "α_U", "Boundary similarity"].map(String::from).to_vec(),
            rows: input
                .summary
                .iter()
                .map(|(name, r)| {
                    vec![
                        name.to_string(),
                        f3(r.scores.macro_f1),
                        opt3(r.alpha_u),
                        f3(r.boundary_similarity),
                    ]
                })
                .collect(),
        });
    }
    for s in &input.scenarios {
        let agg: Vec<&EvalReport> = s.aggregated.iter().collect();
        out.push(class_table(format!("Scenario {} (aggregated)", s.scenario), &agg));
        for g in &s.groups {
            let reports: Vec<&EvalReport> = g.reports.iter().collect();
            out.push(class_table(format!("Scenario {}: {}", s.scenario, g.group.as_str()), &reports));
        }
        if !s.significance.is_empty() {
            out.push(Table {
                title: format!("Scenario {}: paired exact test against {}", s.scenario, s.significance[0].baseline),
                head: ["System", "n10", "n01", "p"].map(String::from).to_vec(),
                rows: s
                    .significance
                    .iter()
                    .map(|r| {
                        vec![
                            r.system.clone(),
                            r.test.n10.to_string(),
                            r.test.n01.to_string(),
                            format!("{:.3e}", r.test.p_value),
                        ]
                    })
                    .collect(),
            });
        }
    }
    out
}

/// Token ranges of the components in a token labeling.
fn spans(tokens: &[BioLabel]) -> Vec<(usize, usize, ComponentType)> {
    super::scenario::labels_to_units(tokens, 0)
        .into_iter()
        .map(|u| (u.start, u.end(), u.category))
        .collect()
}

fn span_texts(doc: &Document, tokens: &[BioLabel]) -> Vec<(ComponentType, String)> {
    let words = doc.token_strings();
    spans(tokens)
        .into_iter()
        .map(|(s, e, t)| (t, words[s..e].join(" ")))
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn gold_labels(doc: &Document) -> Vec<BioLabel> {
    doc.gold
        .as_ref()
        .map_or_else(|| vec![BioLabel::O; doc.token_count()], |g| crate::encoding::tokens_from_annotation(doc, g))
}

fn markdown(input: &ReportInput<'_>) -> String {
    let mut s = String::from("# Argument component identification report\n");
    for t in tables(input) {
        let _ = write!(s, "\n## {}\n\n| {} |\n|{}\n", t.title, t.head.join(" | "), "---|".repeat(t.head.len()));
        for r in &t.rows {
            let _ = writeln!(s, "| {} |", r.join(" | "));
        }
    }
    if let Some(corpus) = input.corpus {
        if !input.predictions.is_empty() {
            s.push_str("\n## Documents\n");
        }
        for (d, pred) in &input.predictions {
            let doc = &corpus.documents[*d];
            let _ = writeln!(s, "\n### {} ({}, {})\n", doc.id, doc.topic.as_str(), doc.register.as_str());
            for (side, labels) in [("Gold", gold_labels(doc)), ("Predicted", pred.to_vec())] {
                let _ = writeln!(s, "**{side}**\n");
                let items = span_texts(doc, &labels);
                if items.is_empty() {
                    s.push_str("- (no components)\n");
                }
                for (t, text) in items {
                    let _ = writeln!(s, "- [{}] {}", t.title(), text);
                }
                s.push('\n');
            }
        }
    }
    s
}

fn highlighted(doc: &Document, labels: &[BioLabel]) -> String {
    let words = doc.token_strings();
    let mut s = String::new();
    let mut i = 0;
    for (start, end, t) in spans(labels) {
        s.push_str(&escape(&words[i..start].join(" ")));
        let _ = write!(
            s,
            " <span class=\"{}\" title=\"{}\">{}</span> ",
            t.as_str(),
            t.title(),
            escape(&words[start..end].join(" "))
        );
        i = end;
    }
    s.push_str(&escape(&words[i..].join(" ")));
    s
}

fn html(input: &ReportInput<'_>) -> String {
    let mut s = String::from(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Argument component report</title>\n<style>\n\
         table{border-collapse:collapse}td,th{border:1px solid #999;padding:2px 6px}\n\
         .claim{background:#f9c}.premise{background:#9cf}.backing{background:#9f9}\n\
         .rebuttal{background:#fc9}.refutation{background:#cc9}\n\
         .side{display:flex;gap:2em}.side>div{flex:1}\n</style></head><body>\n\
         <h1>Argument component identification report</h1>\n",
    );
    for t in tables(input) {
        let _ = write!(s, "<h2>{}</h2>\n<table><tr>", escape(&t.title));
        for h in &t.head {
            let _ = write!(s, "<th>{}</th>", escape(h));
        }
        s.push_str("</tr>\n");
        for r in &t.rows {
            s.push_str("<tr>");
            for c in r {
                let _ = write!(s, "<td>{}</td>", escape(c));
            }
            s.push_str("</tr>\n");
        }
        s.push_str("</table>\n");
    }
    if let Some(corpus) = input.corpus {
        for (d, pred) in &input.predictions {
            let doc = &corpus.documents[*d];
            let _ = write!(
                s,
                "<h3>{}</h3>\n<div class=\"side\"><div><h4>Gold</h4><p>{}</p></div><div><h4>Predicted</h4><p>{}</p></div></div>\n",
                escape(&doc.id),
                highlighted(doc, &gold_labels(doc)),
                highlighted(doc, pred)
            );
        }
    }
    s.push_str("</body></html>\n");
    s
}

#[derive(serde::Serialize)]
struct JsonReport<'a> {
    summary: Vec<SummaryRow<'a>>,
    scenarios: &'a [&'a ScenarioReport],
}

#[derive(serde::Serialize)]
struct SummaryRow<'a> {
    name: &'a str,
    macro_f1: f64,
    alpha_u: Option<f64>,
    boundary_similarity: f64,
}

pub fn render_report(input: &ReportInput<'_>, format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Markdown => markdown(input),
        ReportFormat::Html => html(input),
        ReportFormat::Json => {
            let r = JsonReport {
                summary: input
                    .summary
                    .iter()
                    .map(|(name, r)| SummaryRow {
                        name,
                        macro_f1: r.scores.macro_f1,
                        alpha_u: r.alpha_u,
                        boundary_similarity: r.boundary_similarity,
                    })
                    .collect(),
                scenarios: &input.scenarios,
            };
            serde_json::to_string_pretty(&r).map_err(|e| Error::json(&e))? + "\n"
        }
    })
}
