//! Renders evaluation reports as the landscape table, canonical JSON, or a
//! DOT argument tree.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::engine::{apply_filter, EvaluationReport, Filter, FilterError, Status};

pub const TABLE_COLUMNS: [&str; 6] = ["AI-SC", "Stage in AI Life Cycle", "Decomposition", "VR", "M&M", "Status"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("unsupported report format `{0}` (expected table, json or dot)")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("malformed report JSON: {0}")]
    Malformed(String),
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "json" => Ok(ReportFormat::Json),
            "dot" => Ok(ReportFormat::Dot),
            other => Err(ReportError::UnsupportedFormat(other.to_string())),
        }
    }
}

pub fn serialize_report(report: &EvaluationReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => table_text(report),
        ReportFormat::Json => render_json(report),
        ReportFormat::Dot => render_argument_tree(report),
    }
}

pub fn parse_report(text: &str) -> Result<EvaluationReport, ReportError> {
    serde_json::from_str(text).map_err(|e| ReportError::Malformed(e.to_string()))
}

/// The filtered landscape table with a roll-up footer.
pub fn render_table(report: &EvaluationReport, filter: &Filter) -> Result<String, ReportError> {
    Ok(table_text(&apply_filter(report, filter)?))
}

fn table_text(report: &EvaluationReport) -> String {
    let body: Vec<[String; 6]> = report
        .rows
        .iter()
        .map(|r| {
            [
                r.row.concern_name.clone(),
                r.row.stage_name.clone(),
                r.row.decomposition.clone(),
                r.row.vr_id.clone(),
                r.row.mm_name.clone(),
                r.status.to_string(),
            ]
        })
        .collect();
    let mut widths = TABLE_COLUMNS.map(|c| c.chars().count());
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[&str]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            let _ = write!(s, "{cell:<w$}");
        }
        s.trim_end().to_string()
    };

    let mut out = String::new();
    out.push_str(&line(&TABLE_COLUMNS));
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&rule.join("-+-"));
    out.push('\n');
    for row in &body {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        out.push_str(&line(&cells));
        out.push('\n');
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "\n{} satisfied, {} violated, {} pending, {} error, {} not applicable; coverage gaps: {}",
        s.satisfied, s.violated, s.pending, s.error, s.not_applicable, s.coverage_gaps
    );
    if !report.filter.is_empty() {
        let _ = writeln!(out, "filter: {}", report.filter.describe());
    }
    for gap in &report.coverage_gaps {
        let _ = writeln!(out, "gap: {gap}");
    }
    out
}

pub fn render_json(report: &EvaluationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report always serializes");
    s.push('\n');
    s
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

fn status_style(status: Status) -> &'static str {
    match status {
        Status::Satisfied => "palegreen",
        Status::Violated => "salmon",
        Status::Pending => "lightyellow",
        Status::Error => "orange",
        Status::NotApplicable => "lightgrey",
    }
}

/// Concern -> goal -> VR tree with one status-labelled node per element.
pub fn render_argument_tree(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(&report.landscape_name));
    out.push_str("  rankdir=TB;\n  node [shape=box, style=filled];\n");
    let node = |out: &mut String, id: &str, label: &str, status: Status| {
        let _ = writeln!(
            out,
            "  \"{}\" [label=\"{}\\n[{}]\", fillcolor={}];",
            dot_escape(id),
            dot_escape(label),
            status,
            status_style(status)
        );
    };
    for c in &report.concerns {
        let label = if c.rationale.is_empty() {
            format!("{} ({})", c.name, c.concern_id)
        } else {
            format!("{} ({})\n{}", c.name, c.concern_id, c.rationale)
        };
        node(&mut out, &format!("concern:{}", c.concern_id), &label, c.status);
    }
    for g in &report.goals {
        node(&mut out, &format!("goal:{}", g.goal_id), &g.decomposition, g.status);
    }
    for v in &report.verdicts {
        let status = report.vr_status(&v.vr_id).unwrap_or_else(|| v.verdict.status.into());
        node(&mut out, &format!("vr:{}", v.vr_id), &format!("{} ({})", v.vr_id, v.kind), status);
    }
    let edge = |out: &mut String, from: &str, to: &str| {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", dot_escape(from), dot_escape(to));
    };
    for g in &report.goals {
        if report.concerns.iter().any(|c| c.concern_id == g.concern_id) {
            edge(&mut out, &format!("concern:{}", g.concern_id), &format!("goal:{}", g.goal_id));
        }
    }
    for v in &report.verdicts {
        if report.goals.iter().any(|g| g.goal_id == v.goal_id) {
            edge(&mut out, &format!("goal:{}", v.goal_id), &format!("vr:{}", v.vr_id));
        }
    }
    out.push_str("}\n");
    out
}
