//! Parsing and canonical serialization of landscape definitions, evidence
//! bundles and numeric datasets.
//!
//! Canonical JSON is two-space pretty-printed, keys in declaration order
//! (maps sorted), LF line endings and a trailing newline.

pub mod data;
pub mod evidence;

use std::collections::HashSet;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::model::{build_landscape, Landscape, LandscapeDefinition, ModelError};
use evidence::{format_timestamp, parse_timestamp, EvidenceBundle, EvidencePayload, EvidenceRecord};

pub use crate::report::{serialize_report, ReportFormat};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column} (byte {offset}): {message}")]
    Syntax {
        line: usize,
        column: usize,
        offset: usize,
        message: String,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("invalid timestamp `{value}` in record `{record}`: expected RFC 3339 UTC")]
    InvalidTimestamp { record: String, value: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, ParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        classify(text, path, err.into_inner())
    })?;
    de.end().map_err(|e| classify(text, ".".into(), e))?;
    Ok(value)
}

fn classify(text: &str, path: String, err: serde_json::Error) -> ParseError {
    match err.classify() {
        serde_json::error::Category::Data => ParseError::Schema {
            path,
            message: err.to_string(),
        },
        serde_json::error::Category::Eof => ParseError::Syntax {
            line: err.line(),
            column: err.column(),
            offset: text.len(),
            message: err.to_string(),
        },
        _ => ParseError::Syntax {
            line: err.line(),
            column: err.column(),
            offset: byte_offset(text, err.line(), err.column()),
            message: err.to_string(),
        },
    }
}

fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("domain types always serialize");
    s.push('\n');
    s
}

pub fn parse_landscape(text: &str) -> Result<Landscape, ParseError> {
    let def: LandscapeDefinition = from_json(text)?;
    Ok(build_landscape(def)?)
}

pub fn serialize_landscape(landscape: &Landscape) -> String {
    to_canonical_json(landscape.definition())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    vr_id: String,
    landscape_fingerprint: String,
    timestamp: String,
    payload: EvidencePayload,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    #[serde(default)]
    source: String,
    records: Vec<RawRecord>,
}

pub fn parse_evidence(text: &str) -> Result<EvidenceBundle, ParseError> {
    let raw: RawBundle = from_json(text)?;
    let mut ids = HashSet::new();
    let mut records = Vec::with_capacity(raw.records.len());
    for (i, r) in raw.records.into_iter().enumerate() {
        let schema = |field: &str, message: String| ParseError::Schema {
            path: format!("records[{i}].{field}"),
            message,
        };
        if r.id.is_empty() {
            return Err(schema("id", "record id must be non-empty".into()));
        }
        if !ids.insert(r.id.clone()) {
            return Err(schema("id", format!("duplicate record id `{}`", r.id)));
        }
        if r.vr_id.is_empty() {
            return Err(schema("vr_id", "vr_id must be non-empty".into()));
        }
        let timestamp = parse_timestamp(&r.timestamp).ok_or_else(|| ParseError::InvalidTimestamp {
            record: r.id.clone(),
            value: r.timestamp.clone(),
        })?;
        match &r.payload {
            EvidencePayload::ReviewLog {
                total_items,
                reviewed_items,
                ..
            } if reviewed_items > total_items => {
                return Err(schema(
                    "payload.reviewed_items",
                    format!("reviewed_items {reviewed_items} exceeds total_items {total_items}"),
                ));
            }
            EvidencePayload::MetricResult { dataset_ids, .. } if dataset_ids.is_empty() => {
                return Err(schema("payload.dataset_ids", "at least one dataset id is required".into()));
            }
            _ => {}
        }
        records.push(EvidenceRecord {
            id: r.id,
            vr_id: r.vr_id,
            landscape_fingerprint: r.landscape_fingerprint,
            timestamp,
            payload: r.payload,
        });
    }
    Ok(EvidenceBundle {
        source: raw.source,
        records,
    })
}

pub fn serialize_evidence(bundle: &EvidenceBundle) -> String {
    let raw = RawBundle {
        source: bundle.source.clone(),
        records: bundle
            .records
            .iter()
            .map(|r| RawRecord {
                id: r.id.clone(),
                vr_id: r.vr_id.clone(),
                landscape_fingerprint: r.landscape_fingerprint.clone(),
                timestamp: format_timestamp(&r.timestamp),
                payload: r.payload.clone(),
            })
            .collect(),
    };
    to_canonical_json(&raw)
}
