//! Argument evaluation: per-requirement verdicts, goal and concern roll-ups,
//! coverage blind spots and dimension filters.

mod coverage;
mod verdict;

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::evidence::EvidenceBundle;
use crate::model::{rows, Landscape, LandscapeRow};

pub use coverage::{coverage, CoverageGap, CoverageGapKind};
pub use verdict::{evaluate_vr, MeasuredValue, Verdict, VerdictStatus};

/// Status shown for rows, goals and concerns. `NotApplicable` marks
/// everything below a concern filtered out as not relevant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Satisfied,
    Violated,
    Pending,
    Error,
    NotApplicable,
}

impl From<VerdictStatus> for Status {
    fn from(s: VerdictStatus) -> Self {
        match s {
            VerdictStatus::Satisfied => Status::Satisfied,
            VerdictStatus::Violated => Status::Violated,
            VerdictStatus::Pending => Status::Pending,
            VerdictStatus::Error => Status::Error,
        }
    }
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Satisfied => "Satisfied",
            Status::Violated => "Violated",
            Status::Pending => "Pending",
            Status::Error => "Error",
            Status::NotApplicable => "NotApplicable",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Status::Satisfied,
            Status::Violated,
            Status::Pending,
            Status::Error,
            Status::NotApplicable,
        ]
        .into_iter()
        .find(|st| st.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown status `{s}`"))
    }
}

/// Worst status under Violated > Error > Pending > Satisfied. Nothing to
/// aggregate means nothing has been demonstrated yet: `Pending`.
pub fn aggregate<I: IntoIterator<Item = VerdictStatus>>(statuses: I) -> VerdictStatus {
    statuses
        .into_iter()
        .max_by_key(|s| s.severity())
        .unwrap_or(VerdictStatus::Pending)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalRollup {
    pub goal_id: String,
    pub concern_id: String,
    pub decomposition: String,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcernRollup {
    pub concern_id: String,
    pub name: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rollup {
    pub goals: Vec<GoalRollup>,
    pub concerns: Vec<ConcernRollup>,
}

/// Goal status aggregates its requirements; concern status aggregates its
/// goals. Concerns marked not relevant report `NotApplicable` with their
/// rationale, as do their goals.
pub fn rollup(landscape: &Landscape, verdicts: &HashMap<String, VerdictStatus>) -> Rollup {
    let mut goal_status = HashMap::new();
    let mut goals = Vec::new();
    for g in landscape.goals() {
        let st = aggregate(g.vr_ids.iter().map(|v| verdicts.get(v).copied().unwrap_or(VerdictStatus::Pending)));
        goal_status.insert(g.id.as_str(), st);
        let relevant = landscape.concern(&g.concern_id).is_some_and(|c| c.relevant);
        goals.push(GoalRollup {
            goal_id: g.id.clone(),
            concern_id: g.concern_id.clone(),
            decomposition: g.decomposition(),
            status: if relevant { st.into() } else { Status::NotApplicable },
        });
    }
    let concerns = landscape
        .concerns()
        .iter()
        .map(|c| ConcernRollup {
            concern_id: c.id.clone(),
            name: c.name.clone(),
            status: if c.relevant {
                aggregate(c.goal_ids.iter().map(|g| goal_status[g.as_str()])).into()
            } else {
                Status::NotApplicable
            },
            rationale: if c.relevant { String::new() } else { c.relevance_rationale.clone() },
        })
        .collect();
    goals.sort_by(|a, b| (&a.concern_id, &a.goal_id).cmp(&(&b.concern_id, &b.goal_id)));
    let mut concerns: Vec<ConcernRollup> = concerns;
    concerns.sort_by(|a, b| a.concern_id.cmp(&b.concern_id));
    Rollup { goals, concerns }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("unknown {dimension} filter key `{key}`")]
    UnknownFilterKey { dimension: &'static str, key: String },
}

/// Conjunctive filter over the table dimensions. Keys match ids or display
/// names. An empty filter is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Filter {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
}

impl Filter {
    pub fn is_empty(&self) -> bool {
        self.concern.is_none() && self.stage.is_none() && self.component.is_none() && self.status.is_none()
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = [
            ("concern", &self.concern),
            ("stage", &self.stage),
            ("component", &self.component),
            ("status", &self.status),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| format!("{k}={v}")))
        .collect();
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join(", ")
        }
    }

    /// Merges two filters; keys present in `other` take precedence.
    pub fn and(&self, other: &Filter) -> Filter {
        Filter {
            concern: other.concern.clone().or_else(|| self.concern.clone()),
            stage: other.stage.clone().or_else(|| self.stage.clone()),
            component: other.component.clone().or_else(|| self.component.clone()),
            status: other.status.clone().or_else(|| self.status.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionEntry {
    pub id: String,
    pub name: String,
}

/// Known keys per filterable dimension, retained so that filtered reports
/// can still be re-filtered and validated.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Dimensions {
    pub concerns: Vec<DimensionEntry>,
    pub stages: Vec<DimensionEntry>,
    pub components: Vec<DimensionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(flatten)]
    pub row: LandscapeRow,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VrVerdict {
    pub vr_id: String,
    pub goal_id: String,
    pub concern_id: String,
    pub kind: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub satisfied: usize,
    pub violated: usize,
    pub pending: usize,
    pub error: usize,
    pub not_applicable: usize,
    pub coverage_gaps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub landscape_name: String,
    pub landscape_version: String,
    pub fingerprint: String,
    pub evaluated_at: String,
    pub filter: Filter,
    pub dimensions: Dimensions,
    pub rows: Vec<ReportRow>,
    /// In canonical row order.
    pub verdicts: Vec<VrVerdict>,
    pub goals: Vec<GoalRollup>,
    pub concerns: Vec<ConcernRollup>,
    pub coverage_gaps: Vec<CoverageGap>,
    pub summary: Summary,
}

fn summarize(rows: &[ReportRow], gaps: usize) -> Summary {
    let mut seen = BTreeSet::new();
    let mut s = Summary {
        coverage_gaps: gaps,
        ..Summary::default()
    };
    for r in rows {
        if !seen.insert(r.row.vr_id.as_str()) {
            continue;
        }
        match r.status {
            Status::Satisfied => s.satisfied += 1,
            Status::Violated => s.violated += 1,
            Status::Pending => s.pending += 1,
            Status::Error => s.error += 1,
            Status::NotApplicable => s.not_applicable += 1,
        }
    }
    s
}

impl EvaluationReport {
    pub fn verdict(&self, vr_id: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.vr_id == vr_id).map(|v| &v.verdict)
    }

    /// Display status of a requirement, accounting for concern relevance.
    pub fn vr_status(&self, vr_id: &str) -> Option<Status> {
        self.rows.iter().find(|r| r.row.vr_id == vr_id).map(|r| r.status)
    }

    pub fn concern_status(&self, concern_id: &str) -> Option<Status> {
        self.concerns.iter().find(|c| c.concern_id == concern_id).map(|c| c.status)
    }

    pub fn goal_status(&self, goal_id: &str) -> Option<Status> {
        self.goals.iter().find(|g| g.goal_id == goal_id).map(|g| g.status)
    }

    /// Worst visible requirement status, ignoring `NotApplicable`; `None` when
    /// every visible requirement is satisfied or not applicable.
    pub fn worst_status(&self) -> Option<VerdictStatus> {
        let s = &self.summary;
        if s.violated > 0 {
            Some(VerdictStatus::Violated)
        } else if s.error > 0 {
            Some(VerdictStatus::Error)
        } else if s.pending > 0 {
            Some(VerdictStatus::Pending)
        } else {
            None
        }
    }
}

/// Evaluates every requirement and assembles the unfiltered report.
pub fn evaluate(landscape: &Landscape, bundle: &EvidenceBundle, evaluated_at: &str) -> EvaluationReport {
    let fp = landscape.fingerprint();
    let vr_order = landscape.vr_ids_in_order();
    let verdict_map: HashMap<String, Verdict> = vr_order
        .iter()
        .map(|id| {
            let vr = landscape.vr(id).expect("listed");
            (vr.id.clone(), evaluate_vr(vr, bundle, fp))
        })
        .collect();
    let statuses: HashMap<String, VerdictStatus> = verdict_map.iter().map(|(k, v)| (k.clone(), v.status)).collect();
    let roll = rollup(landscape, &statuses);

    let rows: Vec<ReportRow> = rows(landscape)
        .into_iter()
        .map(|row| {
            let relevant = landscape.concern(&row.concern_id).is_some_and(|c| c.relevant);
            let status = if relevant {
                statuses[&row.vr_id].into()
            } else {
                Status::NotApplicable
            };
            ReportRow { row, status }
        })
        .collect();

    let verdicts = vr_order
        .iter()
        .map(|id| {
            let vr = landscape.vr(id).expect("listed");
            let goal = landscape.goal(&vr.goal_id).expect("validated");
            VrVerdict {
                vr_id: vr.id.clone(),
                goal_id: goal.id.clone(),
                concern_id: goal.concern_id.clone(),
                kind: vr.requirement.kind().to_string(),
                verdict: verdict_map[*id].clone(),
            }
        })
        .collect();

    let dim = |id: &str, name: &str| DimensionEntry {
        id: id.to_string(),
        name: name.to_string(),
    };
    let mut dimensions = Dimensions {
        concerns: landscape.concerns().iter().map(|c| dim(&c.id, &c.name)).collect(),
        stages: landscape.stages().iter().map(|s| dim(&s.id, &s.name)).collect(),
        components: landscape.components().iter().map(|c| dim(&c.id, &c.name)).collect(),
    };
    dimensions.concerns.sort_by(|a, b| a.id.cmp(&b.id));
    dimensions.stages.sort_by_key(|s| landscape.stage(&s.id).map(|st| st.order));
    dimensions.components.sort_by(|a, b| a.id.cmp(&b.id));

    let coverage_gaps = coverage(landscape);
    let summary = summarize(&rows, coverage_gaps.len());
    EvaluationReport {
        landscape_name: landscape.name().to_string(),
        landscape_version: landscape.version().to_string(),
        fingerprint: fp.to_string(),
        evaluated_at: evaluated_at.to_string(),
        filter: Filter::default(),
        dimensions,
        rows,
        verdicts,
        goals: roll.goals,
        concerns: roll.concerns,
        coverage_gaps,
        summary,
    }
}

fn resolve_key(entries: &[DimensionEntry], key: &str, dimension: &'static str) -> Result<String, FilterError> {
    entries
        .iter()
        .find(|e| e.id == key)
        .or_else(|| entries.iter().find(|e| e.name == key))
        .map(|e| e.id.clone())
        .ok_or_else(|| FilterError::UnknownFilterKey {
            dimension,
            key: key.to_string(),
        })
}

/// Restricts a report to the rows passing `filter` (conjoined with any filter
/// already applied). Verdicts are copied, never recomputed.
pub fn apply_filter(report: &EvaluationReport, filter: &Filter) -> Result<EvaluationReport, FilterError> {
    let filter = report.filter.and(filter);
    let concern = filter
        .concern
        .as_deref()
        .map(|k| resolve_key(&report.dimensions.concerns, k, "concern"))
        .transpose()?;
    let stage = filter
        .stage
        .as_deref()
        .map(|k| resolve_key(&report.dimensions.stages, k, "stage"))
        .transpose()?;
    let component = filter
        .component
        .as_deref()
        .map(|k| resolve_key(&report.dimensions.components, k, "component"))
        .transpose()?;
    let status = filter
        .status
        .as_deref()
        .map(|k| {
            Status::from_str(k).map_err(|_| FilterError::UnknownFilterKey {
                dimension: "status",
                key: k.to_string(),
            })
        })
        .transpose()?;
    if filter.is_empty() {
        return Ok(report.clone());
    }

    let row_passes = |r: &ReportRow| {
        concern.as_ref().is_none_or(|c| &r.row.concern_id == c)
            && stage.as_ref().is_none_or(|s| &r.row.stage_id == s)
            && component.as_ref().is_none_or(|c| r.row.component_ids.contains(c))
            && status.is_none_or(|s| r.status == s)
    };
    let rows: Vec<ReportRow> = report.rows.iter().filter(|r| row_passes(r)).cloned().collect();
    let vrs: BTreeSet<&str> = rows.iter().map(|r| r.row.vr_id.as_str()).collect();

    // Without stage or status keys, structural entries that have no rows
    // (e.g. a concern lacking goals) stay visible under a matching concern or
    // component filter.
    let structural = stage.is_none() && status.is_none();
    let concern_components: HashMap<&str, Vec<&str>> = report
        .rows
        .iter()
        .map(|r| (r.row.concern_id.as_str(), r.row.component_ids.iter().map(String::as_str).collect()))
        .collect();
    let concern_matches = |cid: &str| {
        concern.as_deref().is_none_or(|c| c == cid)
            && component.as_deref().is_none_or(|comp| {
                concern_components
                    .get(cid)
                    .is_some_and(|cs| cs.contains(&comp))
            })
    };

    let verdicts: Vec<VrVerdict> = report
        .verdicts
        .iter()
        .filter(|v| vrs.contains(v.vr_id.as_str()))
        .cloned()
        .collect();
    let goal_ids: BTreeSet<&str> = verdicts.iter().map(|v| v.goal_id.as_str()).collect();
    let goals: Vec<GoalRollup> = report
        .goals
        .iter()
        .filter(|g| goal_ids.contains(g.goal_id.as_str()) || (structural && concern_matches(&g.concern_id)))
        .cloned()
        .collect();
    let concern_ids: BTreeSet<&str> = goals.iter().map(|g| g.concern_id.as_str()).collect();
    let concerns: Vec<ConcernRollup> = report
        .concerns
        .iter()
        .filter(|c| concern_ids.contains(c.concern_id.as_str()) || (structural && concern_matches(&c.concern_id)))
        .cloned()
        .collect();

    let visible: BTreeSet<&str> = concerns
        .iter()
        .map(|c| c.concern_id.as_str())
        .chain(goals.iter().map(|g| g.goal_id.as_str()))
        .chain(vrs.iter().copied())
        .chain(rows.iter().map(|r| r.row.mm_id.as_str()))
        .collect();
    let coverage_gaps: Vec<CoverageGap> = report
        .coverage_gaps
        .iter()
        .filter(|g| visible.contains(g.subject.as_str()))
        .cloned()
        .collect();
    let summary = summarize(&rows, coverage_gaps.len());
    Ok(EvaluationReport {
        filter,
        rows,
        verdicts,
        goals,
        concerns,
        coverage_gaps,
        summary,
        ..report.clone()
    })
}
