//! Shipped case-study data: the track-detector landscape and a matching
//! evidence bundle in which every requirement is met.

use crate::io::evidence::{
    parse_timestamp, ApprovalVerdict, EvidenceBundle, EvidencePayload, EvidenceRecord, Resolution, ResolutionEntry,
};
use crate::io::{parse_evidence, parse_landscape};
use crate::model::{Landscape, Requirement};

pub const TRAIN_TRACK_DETECTOR_JSON: &str = include_str!("../fixtures/train_track_detector.laisc.json");
pub const ALL_SATISFIED_EVIDENCE_JSON: &str = include_str!("../fixtures/all_satisfied.evidence.json");

pub fn train_track_detector() -> Landscape {
    parse_landscape(TRAIN_TRACK_DETECTOR_JSON).expect("shipped fixture is valid")
}

pub fn all_satisfied_evidence() -> EvidenceBundle {
    parse_evidence(ALL_SATISFIED_EVIDENCE_JSON).expect("shipped fixture is valid")
}

/// Builds evidence satisfying every requirement of `landscape`, stamped with
/// its current fingerprint.
pub fn satisfying_evidence(landscape: &Landscape, timestamp: &str) -> EvidenceBundle {
    let ts = parse_timestamp(timestamp).expect("valid timestamp");
    let fp = landscape.fingerprint().to_string();
    let mut bundle = EvidenceBundle::new(format!("generated for {}", landscape.name()));
    let mut add = |vr_id: &str, payload: EvidencePayload| {
        let id = bundle.next_record_id();
        bundle
            .push(EvidenceRecord {
                id,
                vr_id: vr_id.to_string(),
                landscape_fingerprint: fp.clone(),
                timestamp: ts,
                payload,
            })
            .expect("fresh id");
    };
    for vr in landscape.vr_ids_in_order() {
        let vr = landscape.vr(vr).expect("listed");
        match &vr.requirement {
            Requirement::MetricThreshold {
                metric_id,
                dataset_id,
                comparator,
                threshold,
            } => {
                let value = match comparator {
                    crate::model::Comparator::Ge => (threshold + 0.05).min(1.0).max(*threshold),
                    crate::model::Comparator::Le => (threshold - 0.05).max(0.0).min(*threshold),
                };
                add(
                    &vr.id,
                    EvidencePayload::MetricResult {
                        metric_id: *metric_id,
                        dataset_ids: vec![dataset_id.clone()],
                        value,
                        config_note: String::new(),
                        warnings: vec![],
                    },
                );
            }
            Requirement::MetricGap {
                metric_id,
                dataset_id_a,
                dataset_id_b,
                epsilon,
            } => {
                add(
                    &vr.id,
                    EvidencePayload::MetricResult {
                        metric_id: *metric_id,
                        dataset_ids: vec![dataset_id_a.clone(), dataset_id_b.clone()],
                        value: epsilon / 2.0,
                        config_note: "gap".into(),
                        warnings: vec![],
                    },
                );
            }
            Requirement::PerCondition { metric_id, conditions } => {
                for c in conditions {
                    add(
                        &vr.id,
                        EvidencePayload::MetricResult {
                            metric_id: *metric_id,
                            dataset_ids: vec![c.dataset_id.clone()],
                            value: (c.threshold + 0.05).min(1.0).max(c.threshold),
                            config_note: format!("condition={}", c.condition_id),
                            warnings: vec![],
                        },
                    );
                }
            }
            Requirement::ReviewFraction { dataset_id, min_fraction } => {
                let total = 1000u64;
                add(
                    &vr.id,
                    EvidencePayload::ReviewLog {
                        dataset_id: dataset_id.clone(),
                        total_items: total,
                        reviewed_items: ((min_fraction * total as f64).ceil() as u64).min(total),
                    },
                );
            }
            Requirement::FlagResolution { dataset_id, .. } => {
                add(
                    &vr.id,
                    EvidencePayload::FlagResolutionLog {
                        dataset_id: dataset_id.clone(),
                        flagged_ids: vec!["img-0007".into(), "img-0009".into()],
                        entries: vec![
                            ResolutionEntry {
                                instance_id: "img-0007".into(),
                                resolution: Resolution::Excluded,
                            },
                            ResolutionEntry {
                                instance_id: "img-0009".into(),
                                resolution: Resolution::Revised,
                            },
                        ],
                    },
                );
            }
            Requirement::QualitativeApproval {
                required_approvals,
                required_documents,
            } => {
                for kind in required_documents {
                    add(
                        &vr.id,
                        EvidencePayload::DocumentRecord {
                            document_kind: kind.clone(),
                            document_ref: format!("docs/{kind}.pdf"),
                        },
                    );
                }
                for n in 1..=*required_approvals {
                    add(
                        &vr.id,
                        EvidencePayload::ApprovalRecord {
                            approver_id: format!("expert-{n}"),
                            approver_role: "reviewer".into(),
                            verdict: ApprovalVerdict::Approved,
                            document_ref: required_documents
                                .first()
                                .map(|k| format!("docs/{k}.pdf"))
                                .unwrap_or_default(),
                        },
                    );
                }
            }
        }
    }
    bundle
}
