//! Evidence records produced by metrics, reviews and approvals.

use std::collections::HashSet;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::metrics::MetricId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ApprovalVerdict {
    Approved,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Resolution {
    Excluded,
    Revised,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionEntry {
    pub instance_id: String,
    pub resolution: Resolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum EvidencePayload {
    MetricResult {
        metric_id: MetricId,
        dataset_ids: Vec<String>,
        value: f64,
        /// Free text; a first `;`-separated token of `gap` marks a value that
        /// already is the difference or distance between two datasets.
        #[serde(default)]
        config_note: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        warnings: Vec<String>,
    },
    ApprovalRecord {
        approver_id: String,
        #[serde(default)]
        approver_role: String,
        verdict: ApprovalVerdict,
        #[serde(default)]
        document_ref: String,
    },
    ReviewLog {
        dataset_id: String,
        total_items: u64,
        reviewed_items: u64,
    },
    FlagResolutionLog {
        dataset_id: String,
        /// Ids flagged by the metric run that produced this log.
        flagged_ids: Vec<String>,
        #[serde(default)]
        entries: Vec<ResolutionEntry>,
    },
    DocumentRecord {
        document_kind: String,
        document_ref: String,
    },
}

impl EvidencePayload {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EvidencePayload::MetricResult { .. } => "MetricResult",
            EvidencePayload::ApprovalRecord { .. } => "ApprovalRecord",
            EvidencePayload::ReviewLog { .. } => "ReviewLog",
            EvidencePayload::FlagResolutionLog { .. } => "FlagResolutionLog",
            EvidencePayload::DocumentRecord { .. } => "DocumentRecord",
        }
    }
}

/// True when a metric result carries a precomputed two-dataset gap.
pub fn is_gap_note(config_note: &str) -> bool {
    config_note.split(';').next().is_some_and(|t| t.trim() == "gap")
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceRecord {
    pub id: String,
    pub vr_id: String,
    /// Landscape fingerprint at the time the evidence was created.
    pub landscape_fingerprint: String,
    pub timestamp: DateTime<Utc>,
    pub payload: EvidencePayload,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvidenceBundle {
    pub source: String,
    pub records: Vec<EvidenceRecord>,
}

impl EvidenceBundle {
    pub fn new(source: impl Into<String>) -> Self {
        EvidenceBundle {
            source: source.into(),
            records: Vec::new(),
        }
    }

    /// Appends a record; record ids must stay unique.
    pub fn push(&mut self, record: EvidenceRecord) -> Result<(), String> {
        if self.records.iter().any(|r| r.id == record.id) {
            return Err(format!("duplicate evidence record id `{}`", record.id));
        }
        self.records.push(record);
        Ok(())
    }

    /// First id of the form `ev-NNNN` not yet used in the bundle.
    pub fn next_record_id(&self) -> String {
        let used: HashSet<&str> = self.records.iter().map(|r| r.id.as_str()).collect();
        (self.records.len() + 1..)
            .map(|n| format!("ev-{n:04}"))
            .find(|id| !used.contains(id.as_str()))
            .expect("unbounded range")
    }
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

/// Parses an RFC 3339 timestamp and requires a zero UTC offset.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let dt = DateTime::parse_from_rfc3339(s).ok()?;
    (dt.offset().local_minus_utc() == 0).then(|| dt.with_timezone(&Utc))
}
