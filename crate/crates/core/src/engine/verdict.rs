//! Binary evaluation of a single verifiable requirement against evidence.
//!
//! Only records addressed to the requirement are considered. Records whose
//! landscape fingerprint differs from the current one are stale and ignored.
//! Among the remaining records, those of the wrong kind or bound to other
//! metrics/datasets are unusable. When nothing usable remains the verdict is
//! `Error` (unusable or stale evidence present) or `Pending` (no evidence).
//! Otherwise the most recent usable record wins; recency is the timestamp,
//! then the record id in lexicographic order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::io::evidence::{is_gap_note, ApprovalVerdict, EvidenceBundle, EvidencePayload, EvidenceRecord};
use crate::model::{Requirement, VerifiableRequirement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerdictStatus {
    Satisfied,
    Pending,
    Error,
    Violated,
}

impl VerdictStatus {
    /// Higher ranks dominate in roll-ups: Violated > Error > Pending > Satisfied.
    pub fn severity(self) -> u8 {
        match self {
            VerdictStatus::Satisfied => 0,
            VerdictStatus::Pending => 1,
            VerdictStatus::Error => 2,
            VerdictStatus::Violated => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredValue {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub explanation: String,
    pub evidence_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measured: Vec<MeasuredValue>,
    /// Conditions, instances or approvers behind a violation.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failing: Vec<String>,
    /// Conditions or documents still lacking evidence.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing: Vec<String>,
}

impl Verdict {
    fn new(status: VerdictStatus, explanation: impl Into<String>) -> Self {
        Verdict {
            status,
            explanation: explanation.into(),
            evidence_ids: Vec::new(),
            measured: Vec::new(),
            failing: Vec::new(),
            missing: Vec::new(),
        }
    }

    fn with_evidence<'a>(mut self, records: impl IntoIterator<Item = &'a EvidenceRecord>) -> Self {
        self.evidence_ids = records.into_iter().map(|r| r.id.clone()).collect();
        self
    }

    fn measure(mut self, label: impl Into<String>, value: f64) -> Self {
        self.measured.push(MeasuredValue {
            label: label.into(),
            value,
        });
        self
    }
}

type Recency<'a> = (chrono::DateTime<chrono::Utc>, &'a str);

fn recency(r: &EvidenceRecord) -> Recency<'_> {
    (r.timestamp, r.id.as_str())
}

fn latest<'a>(records: impl IntoIterator<Item = &'a EvidenceRecord>) -> Option<&'a EvidenceRecord> {
    records.into_iter().max_by(|a, b| recency(a).cmp(&recency(b)))
}

/// `Ok` when the record can serve as evidence for the requirement.
fn usable(req: &Requirement, payload: &EvidencePayload) -> Result<(), String> {
    let wrong_kind = || format!("{} cannot evidence a {} requirement", payload.kind_name(), req.kind());
    match (req, payload) {
        (
            Requirement::MetricThreshold { metric_id, dataset_id, .. },
            EvidencePayload::MetricResult {
                metric_id: m,
                dataset_ids,
                config_note,
                ..
            },
        ) => {
            if m != metric_id {
                Err(format!("metric {m} does not match required {metric_id}"))
            } else if dataset_ids.len() != 1 || &dataset_ids[0] != dataset_id || is_gap_note(config_note) {
                Err(format!("result for {dataset_ids:?} is not bound to dataset {dataset_id}"))
            } else {
                Ok(())
            }
        }
        (
            Requirement::MetricGap {
                metric_id,
                dataset_id_a,
                dataset_id_b,
                ..
            },
            EvidencePayload::MetricResult {
                metric_id: m,
                dataset_ids,
                config_note,
                ..
            },
        ) => {
            if m != metric_id {
                return Err(format!("metric {m} does not match required {metric_id}"));
            }
            let ids: BTreeSet<&str> = dataset_ids.iter().map(String::as_str).collect();
            let ok = if is_gap_note(config_note) {
                dataset_ids.len() == 2 && ids == BTreeSet::from([dataset_id_a.as_str(), dataset_id_b.as_str()])
            } else {
                dataset_ids.len() == 1 && (ids.contains(dataset_id_a.as_str()) || ids.contains(dataset_id_b.as_str()))
            };
            if ok {
                Ok(())
            } else {
                Err(format!("result for {dataset_ids:?} does not match gap {dataset_id_a}/{dataset_id_b}"))
            }
        }
        (
            Requirement::PerCondition { metric_id, conditions },
            EvidencePayload::MetricResult {
                metric_id: m,
                dataset_ids,
                config_note,
                ..
            },
        ) => {
            if m != metric_id {
                Err(format!("metric {m} does not match required {metric_id}"))
            } else if dataset_ids.len() == 1
                && !is_gap_note(config_note)
                && conditions.iter().any(|c| c.dataset_id == dataset_ids[0])
            {
                Ok(())
            } else {
                Err(format!("result for {dataset_ids:?} matches no condition dataset"))
            }
        }
        (Requirement::ReviewFraction { dataset_id, .. }, EvidencePayload::ReviewLog { dataset_id: d, .. })
        | (Requirement::FlagResolution { dataset_id, .. }, EvidencePayload::FlagResolutionLog { dataset_id: d, .. }) => {
            if d == dataset_id {
                Ok(())
            } else {
                Err(format!("log for dataset {d} does not match {dataset_id}"))
            }
        }
        (
            Requirement::FlagResolution { metric_id, dataset_id, .. },
            EvidencePayload::MetricResult {
                metric_id: m, dataset_ids, ..
            },
        ) => {
            // informational: the flagging run itself
            if m == metric_id && dataset_ids.iter().any(|d| d == dataset_id) {
                Ok(())
            } else {
                Err(wrong_kind())
            }
        }
        (
            Requirement::QualitativeApproval { .. },
            EvidencePayload::ApprovalRecord { .. } | EvidencePayload::DocumentRecord { .. },
        ) => Ok(()),
        _ => Err(wrong_kind()),
    }
}

fn metric_value(r: &EvidenceRecord) -> f64 {
    match &r.payload {
        EvidencePayload::MetricResult { value, .. } => *value,
        _ => unreachable!("only metric results reach value extraction"),
    }
}

fn fmt_value(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0');
    s.strip_suffix('.').unwrap_or(s).to_string()
}

pub fn evaluate_vr(vr: &VerifiableRequirement, bundle: &EvidenceBundle, fingerprint: &str) -> Verdict {
    let addressed: Vec<&EvidenceRecord> = bundle.records.iter().filter(|r| r.vr_id == vr.id).collect();
    if addressed.is_empty() {
        return Verdict::new(VerdictStatus::Pending, "no evidence");
    }
    let (fresh, stale): (Vec<&EvidenceRecord>, Vec<&EvidenceRecord>) =
        addressed.into_iter().partition(|r| r.landscape_fingerprint == fingerprint);
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for r in fresh {
        match usable(&vr.requirement, &r.payload) {
            Ok(()) => good.push(r),
            Err(reason) => bad.push((r, reason)),
        }
    }
    if good.is_empty() {
        if let Some((_, reason)) = bad.first() {
            return Verdict::new(VerdictStatus::Error, format!("unusable evidence: {reason}"))
                .with_evidence(bad.iter().map(|(r, _)| *r));
        }
        return Verdict::new(
            VerdictStatus::Error,
            "stale evidence: recorded against a different landscape fingerprint",
        )
        .with_evidence(stale);
    }

    match &vr.requirement {
        Requirement::MetricThreshold {
            comparator, threshold, ..
        } => {
            let rec = latest(good).expect("non-empty");
            let value = metric_value(rec);
            let ok = comparator.holds(value, *threshold);
            let status = if ok { VerdictStatus::Satisfied } else { VerdictStatus::Violated };
            Verdict::new(
                status,
                format!(
                    "value {} {} threshold {}: {}",
                    fmt_value(value),
                    comparator.symbol(),
                    fmt_value(*threshold),
                    if ok { "holds" } else { "fails" }
                ),
            )
            .with_evidence([rec])
            .measure("value", value)
        }
        Requirement::MetricGap {
            dataset_id_a,
            dataset_id_b,
            epsilon,
            ..
        } => evaluate_gap(&good, dataset_id_a, dataset_id_b, *epsilon),
        Requirement::PerCondition { conditions, .. } => {
            let mut used = Vec::new();
            let mut v = Verdict::new(VerdictStatus::Satisfied, "");
            for c in conditions {
                let rec = latest(good.iter().copied().filter(|r| match &r.payload {
                    EvidencePayload::MetricResult { dataset_ids, .. } => dataset_ids[0] == c.dataset_id,
                    _ => false,
                }));
                match rec {
                    None => v.missing.push(c.condition_id.clone()),
                    Some(rec) => {
                        let value = metric_value(rec);
                        used.push(rec);
                        v = v.measure(c.condition_id.clone(), value);
                        if value < c.threshold {
                            v.failing.push(c.condition_id.clone());
                        }
                    }
                }
            }
            v.status = if !v.failing.is_empty() {
                VerdictStatus::Violated
            } else if !v.missing.is_empty() {
                VerdictStatus::Pending
            } else {
                VerdictStatus::Satisfied
            };
            let mut parts = Vec::new();
            if !v.failing.is_empty() {
                parts.push(format!("below threshold: {}", v.failing.join(", ")));
            }
            if !v.missing.is_empty() {
                parts.push(format!("no evidence for: {}", v.missing.join(", ")));
            }
            if parts.is_empty() {
                parts.push(format!("all {} conditions meet their thresholds", conditions.len()));
            }
            v.explanation = parts.join("; ");
            v.with_evidence(used)
        }
        Requirement::ReviewFraction { min_fraction, .. } => {
            let rec = latest(good).expect("non-empty");
            let EvidencePayload::ReviewLog {
                total_items,
                reviewed_items,
                ..
            } = &rec.payload
            else {
                unreachable!("review fraction accepts only review logs")
            };
            if *total_items == 0 {
                return Verdict::new(VerdictStatus::Error, "empty dataset: review log has 0 items").with_evidence([rec]);
            }
            let fraction = *reviewed_items as f64 / *total_items as f64;
            let ok = fraction >= *min_fraction;
            Verdict::new(
                if ok { VerdictStatus::Satisfied } else { VerdictStatus::Violated },
                format!(
                    "{reviewed_items} of {total_items} reviewed ({}) vs required {}",
                    fmt_value(fraction),
                    fmt_value(*min_fraction)
                ),
            )
            .with_evidence([rec])
            .measure("reviewed_fraction", fraction)
        }
        Requirement::FlagResolution { .. } => {
            let logs = good
                .iter()
                .copied()
                .filter(|r| matches!(r.payload, EvidencePayload::FlagResolutionLog { .. }));
            let Some(rec) = latest(logs) else {
                return Verdict::new(VerdictStatus::Pending, "no flag resolution log").with_evidence(good);
            };
            let EvidencePayload::FlagResolutionLog { flagged_ids, entries, .. } = &rec.payload else {
                unreachable!()
            };
            let resolved: BTreeSet<&str> = entries.iter().map(|e| e.instance_id.as_str()).collect();
            let unresolved: Vec<String> = flagged_ids
                .iter()
                .filter(|id| !resolved.contains(id.as_str()))
                .cloned()
                .collect();
            let mut v = if unresolved.is_empty() {
                Verdict::new(
                    VerdictStatus::Satisfied,
                    format!("all {} flagged instances excluded or revised", flagged_ids.len()),
                )
            } else {
                Verdict::new(VerdictStatus::Violated, format!("unresolved flagged instances: {}", unresolved.join(", ")))
            };
            v.failing = unresolved;
            v.with_evidence([rec])
        }
        Requirement::QualitativeApproval {
            required_approvals,
            required_documents,
        } => evaluate_approval(&good, *required_approvals, required_documents),
    }
}

fn evaluate_gap(good: &[&EvidenceRecord], a: &str, b: &str, epsilon: f64) -> Verdict {
    let gap_rec = latest(good.iter().copied().filter(|r| match &r.payload {
        EvidencePayload::MetricResult { config_note, .. } => is_gap_note(config_note),
        _ => false,
    }));
    let single = |ds: &str| {
        latest(good.iter().copied().filter(|r| match &r.payload {
            EvidencePayload::MetricResult {
                dataset_ids,
                config_note,
                ..
            } => !is_gap_note(config_note) && dataset_ids[0] == ds,
            _ => false,
        }))
    };
    let pair = single(a).zip(single(b));
    let use_pair = match (gap_rec, pair) {
        (None, None) => {
            let missing: Vec<String> = [a, b]
                .into_iter()
                .filter(|d| single(d).is_none())
                .map(String::from)
                .collect();
            let mut v = Verdict::new(VerdictStatus::Pending, format!("missing values for: {}", missing.join(", ")))
                .with_evidence(good.iter().copied());
            v.missing = missing;
            return v;
        }
        (Some(_), None) => false,
        (None, Some(_)) => true,
        (Some(g), Some((ra, rb))) => recency(ra).max(recency(rb)) > recency(g),
    };
    let (gap, used, mut v) = if use_pair {
        let (ra, rb) = pair.expect("checked");
        let (va, vb) = (metric_value(ra), metric_value(rb));
        let gap = (va - vb).abs();
        let v = Verdict::new(VerdictStatus::Satisfied, "")
            .measure(a, va)
            .measure(b, vb)
            .measure("gap", gap);
        (gap, vec![ra, rb], v)
    } else {
        let g = gap_rec.expect("checked");
        let gap = metric_value(g).abs();
        (gap, vec![g], Verdict::new(VerdictStatus::Satisfied, "").measure("gap", gap))
    };
    let ok = gap <= epsilon;
    v.status = if ok { VerdictStatus::Satisfied } else { VerdictStatus::Violated };
    v.explanation = format!(
        "gap {} {} epsilon {}",
        fmt_value(gap),
        if ok { "<=" } else { ">" },
        fmt_value(epsilon)
    );
    v.with_evidence(used)
}

fn evaluate_approval(good: &[&EvidenceRecord], required: u32, documents: &[String]) -> Verdict {
    let mut per_approver: HashMap<&str, &EvidenceRecord> = HashMap::new();
    let mut doc_kinds: BTreeMap<&str, &EvidenceRecord> = BTreeMap::new();
    for &r in good {
        match &r.payload {
            EvidencePayload::ApprovalRecord { approver_id, .. } => {
                let e = per_approver.entry(approver_id.as_str()).or_insert(r);
                if recency(r) > recency(e) {
                    *e = r;
                }
            }
            EvidencePayload::DocumentRecord { document_kind, .. } => {
                let e = doc_kinds.entry(document_kind.as_str()).or_insert(r);
                if recency(r) > recency(e) {
                    *e = r;
                }
            }
            _ => {}
        }
    }
    let mut approvers: Vec<(&str, &EvidenceRecord)> = per_approver.into_iter().collect();
    approvers.sort_by(|x, y| x.0.cmp(y.0));
    let verdict_of = |r: &EvidenceRecord| match &r.payload {
        EvidencePayload::ApprovalRecord { verdict, .. } => *verdict,
        _ => unreachable!(),
    };
    let rejected: Vec<String> = approvers
        .iter()
        .filter(|(_, r)| verdict_of(r) == ApprovalVerdict::Rejected)
        .map(|(id, _)| id.to_string())
        .collect();
    let approved: Vec<&EvidenceRecord> = approvers
        .iter()
        .filter(|(_, r)| verdict_of(r) == ApprovalVerdict::Approved)
        .map(|(_, r)| *r)
        .collect();
    let missing_docs: Vec<String> = documents
        .iter()
        .filter(|d| !doc_kinds.contains_key(d.as_str()))
        .cloned()
        .collect();
    let mut used: Vec<&EvidenceRecord> = approvers.iter().map(|(_, r)| *r).collect();
    used.extend(documents.iter().filter_map(|d| doc_kinds.get(d.as_str()).copied()));

    if !rejected.is_empty() {
        let mut v = Verdict::new(VerdictStatus::Violated, format!("rejected by: {}", rejected.join(", ")));
        v.failing = rejected;
        return v.with_evidence(used);
    }
    let mut parts = Vec::new();
    if (approved.len() as u64) < required as u64 {
        parts.push(format!("{} distinct approver{} of {required} required", approved.len(), if approved.len() == 1 { "" } else { "s" }));
    }
    if !missing_docs.is_empty() {
        parts.push(format!("missing documents: {}", missing_docs.join(", ")));
    }
    let mut v = if parts.is_empty() {
        Verdict::new(
            VerdictStatus::Satisfied,
            format!(
                "approved by {} distinct approver{}; all required documents present",
                approved.len(),
                if approved.len() == 1 { "" } else { "s" }
            ),
        )
    } else {
        Verdict::new(VerdictStatus::Pending, parts.join("; "))
    };
    v.missing = missing_docs;
    v.measure("distinct_approvals", approved.len() as f64).with_evidence(used)
}
