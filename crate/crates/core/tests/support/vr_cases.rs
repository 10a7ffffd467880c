//! Table of requirement/evidence cases with their exact expected verdicts.
//! Shared by the engine test suite and the acceptance target.

use chrono::{DateTime, TimeZone, Utc};
use laisc_core::engine::{evaluate_vr, Verdict, VerdictStatus};
use laisc_core::io::evidence::{
    ApprovalVerdict, EvidenceBundle, EvidencePayload, EvidenceRecord, Resolution, ResolutionEntry,
};
use laisc_core::metrics::MetricId;
use laisc_core::model::{Comparator, Condition, Requirement, VerifiableRequirement};

pub const FP: &str = "fp-current";
pub const OLD_FP: &str = "fp-previous";

use VerdictStatus::*;

pub struct Case {
    pub kind: &'static str,
    pub name: &'static str,
    pub requirement: Requirement,
    pub records: Vec<EvidenceRecord>,
    pub status: VerdictStatus,
    pub failing: &'static [&'static str],
    pub missing: &'static [&'static str],
    /// Substring the explanation must contain.
    pub says: &'static str,
}

pub fn ts(minute: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 5, 1, 12, minute, 0).unwrap()
}

pub fn rec(id: &str, minute: u32, payload: EvidencePayload) -> EvidenceRecord {
    EvidenceRecord {
        id: id.into(),
        vr_id: "VR-T".into(),
        landscape_fingerprint: FP.into(),
        timestamp: ts(minute),
        payload,
    }
}

pub fn stale(id: &str, minute: u32, payload: EvidencePayload) -> EvidenceRecord {
    EvidenceRecord {
        landscape_fingerprint: OLD_FP.into(),
        ..rec(id, minute, payload)
    }
}

pub fn metric(m: MetricId, datasets: &[&str], value: f64, note: &str) -> EvidencePayload {
    EvidencePayload::MetricResult {
        metric_id: m,
        dataset_ids: datasets.iter().map(|d| d.to_string()).collect(),
        value,
        config_note: note.into(),
        warnings: vec![],
    }
}

fn review(dataset: &str, total: u64, reviewed: u64) -> EvidencePayload {
    EvidencePayload::ReviewLog {
        dataset_id: dataset.into(),
        total_items: total,
        reviewed_items: reviewed,
    }
}

fn flag_log(dataset: &str, flagged: &[&str], resolved: &[(&str, Resolution)]) -> EvidencePayload {
    EvidencePayload::FlagResolutionLog {
        dataset_id: dataset.into(),
        flagged_ids: flagged.iter().map(|s| s.to_string()).collect(),
        entries: resolved
            .iter()
            .map(|(id, r)| ResolutionEntry {
                instance_id: id.to_string(),
                resolution: *r,
            })
            .collect(),
    }
}

fn approval(approver: &str, verdict: ApprovalVerdict) -> EvidencePayload {
    EvidencePayload::ApprovalRecord {
        approver_id: approver.into(),
        approver_role: "domain expert".into(),
        verdict,
        document_ref: "docs/labeling-guidelines.pdf".into(),
    }
}

fn document(kind: &str) -> EvidencePayload {
    EvidencePayload::DocumentRecord {
        document_kind: kind.into(),
        document_ref: format!("docs/{kind}.pdf"),
    }
}

fn threshold_req() -> Requirement {
    Requirement::MetricThreshold {
        metric_id: MetricId::Miou,
        dataset_id: "d_cf".into(),
        comparator: Comparator::Ge,
        threshold: 0.75,
    }
}

pub fn gap_req(a: &str, b: &str) -> Requirement {
    Requirement::MetricGap {
        metric_id: MetricId::Miou,
        dataset_id_a: a.into(),
        dataset_id_b: b.into(),
        epsilon: 0.05,
    }
}

fn condition_req() -> Requirement {
    let cond = |id: &str, t: f64| Condition {
        condition_id: id.into(),
        dataset_id: format!("d_{id}"),
        threshold: t,
    };
    Requirement::PerCondition {
        metric_id: MetricId::Miou,
        conditions: vec![cond("fog", 0.80), cond("noise", 0.80)],
    }
}

fn review_req() -> Requirement {
    Requirement::ReviewFraction {
        dataset_id: "d_train_labels".into(),
        min_fraction: 0.9,
    }
}

fn flag_req() -> Requirement {
    Requirement::FlagResolution {
        metric_id: MetricId::ClmFlags,
        dataset_id: "d_train_probs".into(),
        flag_threshold: 0.5,
    }
}

fn approval_req() -> Requirement {
    Requirement::QualitativeApproval {
        required_approvals: 2,
        required_documents: vec!["labeling-guidelines".into()],
    }
}

#[allow(clippy::too_many_arguments)]
fn case(
    kind: &'static str,
    name: &'static str,
    requirement: Requirement,
    records: Vec<EvidenceRecord>,
    status: VerdictStatus,
    failing: &'static [&'static str],
    missing: &'static [&'static str],
    says: &'static str,
) -> Case {
    Case {
        kind,
        name,
        requirement,
        records,
        status,
        failing,
        missing,
        says,
    }
}

pub fn cases() -> Vec<Case> {
    use ApprovalVerdict::{Approved, Rejected};
    use MetricId::{ClmFlags, Miou, NapDistance};
    use Resolution::{Excluded, Revised};
    let mt = "MetricThreshold";
    let mg = "MetricGap";
    let pc = "PerCondition";
    let rf = "ReviewFraction";
    let fr = "FlagResolution";
    let qa = "QualitativeApproval";
    vec![
        // MetricThreshold: mIoU(d_cf) >= 0.75
        case(mt, "above threshold", threshold_req(), vec![rec("e1", 0, metric(Miou, &["d_cf"], 0.80, ""))], Satisfied, &[], &[], "holds"),
        case(mt, "exactly at threshold", threshold_req(), vec![rec("e1", 0, metric(Miou, &["d_cf"], 0.75, ""))], Satisfied, &[], &[], "0.75 >= threshold 0.75"),
        case(mt, "below threshold", threshold_req(), vec![rec("e1", 0, metric(Miou, &["d_cf"], 0.70, ""))], Violated, &[], &[], "fails"),
        case(mt, "no evidence", threshold_req(), vec![], Pending, &[], &[], "no evidence"),
        case(mt, "wrong record kind", threshold_req(), vec![rec("e1", 0, review("d_cf", 10, 10))], Error, &[], &[], "cannot evidence"),
        case(mt, "wrong dataset", threshold_req(), vec![rec("e1", 0, metric(Miou, &["d_real"], 0.9, ""))], Error, &[], &[], "not bound"),
        case(mt, "wrong metric", threshold_req(), vec![rec("e1", 0, metric(NapDistance, &["d_cf"], 0.9, ""))], Error, &[], &[], "does not match"),
        case(mt, "only stale record", threshold_req(), vec![stale("e1", 0, metric(Miou, &["d_cf"], 0.9, ""))], Error, &[], &[], "stale evidence"),
        case(
            mt,
            "newer failing measurement supersedes",
            threshold_req(),
            vec![rec("e1", 0, metric(Miou, &["d_cf"], 0.9, "")), rec("e2", 5, metric(Miou, &["d_cf"], 0.7, ""))],
            Violated,
            &[],
            &[],
            "0.7",
        ),
        case(
            mt,
            "newer stale record ignored",
            threshold_req(),
            vec![rec("e1", 0, metric(Miou, &["d_cf"], 0.8, "")), stale("e2", 5, metric(Miou, &["d_cf"], 0.5, ""))],
            Satisfied,
            &[],
            &[],
            "0.8",
        ),
        case(
            mt,
            "timestamp tie broken by record id",
            threshold_req(),
            vec![rec("ev-b", 0, metric(Miou, &["d_cf"], 0.9, "")), rec("ev-a", 0, metric(Miou, &["d_cf"], 0.5, ""))],
            Satisfied,
            &[],
            &[],
            "0.9",
        ),
        case(
            mt,
            "upper bound comparator",
            Requirement::MetricThreshold {
                metric_id: NapDistance,
                dataset_id: "d_cf".into(),
                comparator: Comparator::Le,
                threshold: 0.1,
            },
            vec![rec("e1", 0, metric(NapDistance, &["d_cf"], 0.12, ""))],
            Violated,
            &[],
            &[],
            "0.12 <= threshold 0.1",
        ),
        // MetricGap: |mIoU(d_real) - mIoU(d_synth)| <= 0.05
        case(
            mg,
            "real vs synthetic within epsilon",
            gap_req("d_real", "d_synth"),
            vec![rec("e1", 0, metric(Miou, &["d_real"], 0.86, "")), rec("e2", 0, metric(Miou, &["d_synth"], 0.88, ""))],
            Satisfied,
            &[],
            &[],
            "gap 0.02 <= epsilon 0.05",
        ),
        case(
            mg,
            "gap exceeds epsilon",
            gap_req("d_real", "d_synth"),
            vec![rec("e1", 0, metric(Miou, &["d_real"], 0.80, "")), rec("e2", 0, metric(Miou, &["d_synth"], 0.90, ""))],
            Violated,
            &[],
            &[],
            "gap 0.1 > epsilon 0.05",
        ),
        case(mg, "precomputed gap record", gap_req("d_real", "d_synth"), vec![rec("e1", 0, metric(Miou, &["d_synth", "d_real"], 0.03, "gap"))], Satisfied, &[], &[], "gap 0.03"),
        case(mg, "precomputed gap too large", gap_req("d_real", "d_synth"), vec![rec("e1", 0, metric(Miou, &["d_real", "d_synth"], 0.07, "gap; run=2"))], Violated, &[], &[], "gap 0.07"),
        case(mg, "one side missing", gap_req("d_real", "d_synth"), vec![rec("e1", 0, metric(Miou, &["d_real"], 0.86, ""))], Pending, &[], &["d_synth"], "missing values for: d_synth"),
        case(mg, "no evidence", gap_req("d_real", "d_synth"), vec![], Pending, &[], &[], "no evidence"),
        case(mg, "wrong metric", gap_req("d_real", "d_synth"), vec![rec("e1", 0, metric(NapDistance, &["d_real"], 0.1, ""))], Error, &[], &[], "does not match"),
        case(mg, "gap record over other datasets", gap_req("d_real", "d_synth"), vec![rec("e1", 0, metric(Miou, &["d_real", "d_cf"], 0.01, "gap"))], Error, &[], &[], "does not match gap"),
        case(
            mg,
            "only stale records",
            gap_req("d_real", "d_synth"),
            vec![stale("e1", 0, metric(Miou, &["d_real"], 0.86, "")), stale("e2", 0, metric(Miou, &["d_synth"], 0.88, ""))],
            Error,
            &[],
            &[],
            "stale evidence",
        ),
        case(
            mg,
            "newer pair supersedes older gap record",
            gap_req("d_real", "d_synth"),
            vec![
                rec("e1", 0, metric(Miou, &["d_real", "d_synth"], 0.2, "gap")),
                rec("e2", 5, metric(Miou, &["d_real"], 0.86, "")),
                rec("e3", 6, metric(Miou, &["d_synth"], 0.88, "")),
            ],
            Satisfied,
            &[],
            &[],
            "gap 0.02",
        ),
        case(
            mg,
            "newer gap record supersedes pair",
            gap_req("d_real", "d_synth"),
            vec![
                rec("e1", 0, metric(Miou, &["d_real"], 0.86, "")),
                rec("e2", 1, metric(Miou, &["d_synth"], 0.88, "")),
                rec("e3", 5, metric(Miou, &["d_real", "d_synth"], 0.2, "gap")),
            ],
            Violated,
            &[],
            &[],
            "gap 0.2",
        ),
        // PerCondition: fog >= 0.80, noise >= 0.80
        case(
            pc,
            "one condition below threshold",
            condition_req(),
            vec![rec("e1", 0, metric(Miou, &["d_fog"], 0.85, "")), rec("e2", 0, metric(Miou, &["d_noise"], 0.78, ""))],
            Violated,
            &["noise"],
            &[],
            "below threshold: noise",
        ),
        case(
            pc,
            "all conditions met",
            condition_req(),
            vec![rec("e1", 0, metric(Miou, &["d_fog"], 0.85, "")), rec("e2", 0, metric(Miou, &["d_noise"], 0.80, ""))],
            Satisfied,
            &[],
            &[],
            "all 2 conditions",
        ),
        case(pc, "condition without evidence", condition_req(), vec![rec("e1", 0, metric(Miou, &["d_fog"], 0.85, ""))], Pending, &[], &["noise"], "no evidence for: noise"),
        case(pc, "violation outranks missing", condition_req(), vec![rec("e1", 0, metric(Miou, &["d_fog"], 0.70, ""))], Violated, &["fog"], &["noise"], "below threshold: fog"),
        case(pc, "no evidence", condition_req(), vec![], Pending, &[], &[], "no evidence"),
        case(pc, "dataset outside conditions", condition_req(), vec![rec("e1", 0, metric(Miou, &["d_rain"], 0.9, ""))], Error, &[], &[], "matches no condition"),
        case(pc, "only stale record", condition_req(), vec![stale("e1", 0, metric(Miou, &["d_fog"], 0.9, ""))], Error, &[], &[], "stale evidence"),
        case(
            pc,
            "re-measurement after mitigation",
            condition_req(),
            vec![
                rec("e1", 0, metric(Miou, &["d_fog"], 0.85, "")),
                rec("e2", 0, metric(Miou, &["d_noise"], 0.78, "")),
                rec("e3", 9, metric(Miou, &["d_noise"], 0.82, "")),
            ],
            Satisfied,
            &[],
            &[],
            "all 2 conditions",
        ),
        // ReviewFraction: at least 90% of labels reviewed
        case(rf, "95 of 100 reviewed", review_req(), vec![rec("e1", 0, review("d_train_labels", 100, 95))], Satisfied, &[], &[], "95 of 100"),
        case(rf, "exactly at fraction", review_req(), vec![rec("e1", 0, review("d_train_labels", 100, 90))], Satisfied, &[], &[], "0.9"),
        case(rf, "too few reviewed", review_req(), vec![rec("e1", 0, review("d_train_labels", 100, 80))], Violated, &[], &[], "0.8"),
        case(rf, "empty dataset", review_req(), vec![rec("e1", 0, review("d_train_labels", 0, 0))], Error, &[], &[], "empty dataset"),
        case(rf, "no evidence", review_req(), vec![], Pending, &[], &[], "no evidence"),
        case(rf, "log for another dataset", review_req(), vec![rec("e1", 0, review("d_test", 100, 100))], Error, &[], &[], "does not match"),
        case(rf, "wrong record kind", review_req(), vec![rec("e1", 0, metric(Miou, &["d_train_labels"], 0.95, ""))], Error, &[], &[], "cannot evidence"),
        case(rf, "only stale record", review_req(), vec![stale("e1", 0, review("d_train_labels", 100, 100))], Error, &[], &[], "stale evidence"),
        // FlagResolution: every flagged instance excluded or revised
        case(
            fr,
            "one flagged instance unresolved",
            flag_req(),
            vec![rec("e1", 0, flag_log("d_train_probs", &["img7", "img9"], &[("img7", Excluded)]))],
            Violated,
            &["img9"],
            &[],
            "unresolved flagged instances: img9",
        ),
        case(
            fr,
            "all flagged instances resolved",
            flag_req(),
            vec![rec("e1", 0, flag_log("d_train_probs", &["img7", "img9"], &[("img7", Excluded), ("img9", Revised)]))],
            Satisfied,
            &[],
            &[],
            "all 2 flagged",
        ),
        case(fr, "nothing flagged", flag_req(), vec![rec("e1", 0, flag_log("d_train_probs", &[], &[]))], Satisfied, &[], &[], "all 0 flagged"),
        case(fr, "metric run without resolution log", flag_req(), vec![rec("e1", 0, metric(ClmFlags, &["d_train_probs"], 2.0, ""))], Pending, &[], &[], "no flag resolution log"),
        case(fr, "no evidence", flag_req(), vec![], Pending, &[], &[], "no evidence"),
        case(fr, "log for another dataset", flag_req(), vec![rec("e1", 0, flag_log("d_other", &["img1"], &[]))], Error, &[], &[], "does not match"),
        case(fr, "wrong record kind", flag_req(), vec![rec("e1", 0, approval("a", Approved))], Error, &[], &[], "cannot evidence"),
        case(fr, "only stale record", flag_req(), vec![stale("e1", 0, flag_log("d_train_probs", &[], &[]))], Error, &[], &[], "stale evidence"),
        case(
            fr,
            "later log resolves remaining flags",
            flag_req(),
            vec![
                rec("e1", 0, flag_log("d_train_probs", &["img7", "img9"], &[("img7", Excluded)])),
                rec("e2", 3, flag_log("d_train_probs", &["img7", "img9"], &[("img7", Excluded), ("img9", Revised)])),
            ],
            Satisfied,
            &[],
            &[],
            "all 2 flagged",
        ),
        // QualitativeApproval: two distinct approvers plus the guidelines document
        case(
            qa,
            "same approver twice",
            approval_req(),
            vec![rec("e0", 0, document("labeling-guidelines")), rec("e1", 1, approval("x", Approved)), rec("e2", 2, approval("x", Approved))],
            Pending,
            &[],
            &[],
            "1 distinct approver of 2 required",
        ),
        case(
            qa,
            "two distinct approvers with document",
            approval_req(),
            vec![rec("e0", 0, document("labeling-guidelines")), rec("e1", 1, approval("x", Approved)), rec("e2", 2, approval("y", Approved))],
            Satisfied,
            &[],
            &[],
            "approved by 2 distinct approvers",
        ),
        case(
            qa,
            "required document missing",
            approval_req(),
            vec![rec("e1", 1, approval("x", Approved)), rec("e2", 2, approval("y", Approved))],
            Pending,
            &[],
            &["labeling-guidelines"],
            "missing documents: labeling-guidelines",
        ),
        case(
            qa,
            "explicit rejection",
            approval_req(),
            vec![
                rec("e0", 0, document("labeling-guidelines")),
                rec("e1", 1, approval("x", Approved)),
                rec("e2", 2, approval("y", Approved)),
                rec("e3", 3, approval("z", Rejected)),
            ],
            Violated,
            &["z"],
            &[],
            "rejected by: z",
        ),
        case(
            qa,
            "rejection withdrawn by the same approver",
            approval_req(),
            vec![
                rec("e0", 0, document("labeling-guidelines")),
                rec("e1", 1, approval("x", Rejected)),
                rec("e2", 2, approval("y", Approved)),
                rec("e3", 3, approval("x", Approved)),
            ],
            Satisfied,
            &[],
            &[],
            "approved by 2",
        ),
        case(qa, "no evidence", approval_req(), vec![], Pending, &[], &[], "no evidence"),
        case(qa, "wrong record kind", approval_req(), vec![rec("e1", 0, review("d", 1, 1))], Error, &[], &[], "cannot evidence"),
        case(
            qa,
            "only stale approvals",
            approval_req(),
            vec![stale("e0", 0, document("labeling-guidelines")), stale("e1", 1, approval("x", Approved)), stale("e2", 2, approval("y", Approved))],
            Error,
            &[],
            &[],
            "stale evidence",
        ),
    ]
}

pub fn vr_for(requirement: &Requirement) -> VerifiableRequirement {
    VerifiableRequirement {
        id: "VR-T".into(),
        goal_id: "G-T".into(),
        stage_id: "data-prep".into(),
        statement: String::new(),
        mm_ids: vec![],
        requirement: requirement.clone(),
    }
}

pub fn run(case: &Case) -> Verdict {
    let bundle = EvidenceBundle {
        source: "cases".into(),
        records: case.records.clone(),
    };
    evaluate_vr(&vr_for(&case.requirement), &bundle, FP)
}

/// `Err` describes the first mismatch between the verdict and the case.
pub fn check(case: &Case) -> Result<(), String> {
    let v = run(case);
    let strs = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    if v.status != case.status {
        return Err(format!("status {:?}, expected {:?} ({})", v.status, case.status, v.explanation));
    }
    if v.failing != strs(case.failing) {
        return Err(format!("failing {:?}, expected {:?}", v.failing, case.failing));
    }
    if v.missing != strs(case.missing) {
        return Err(format!("missing {:?}, expected {:?}", v.missing, case.missing));
    }
    if !v.explanation.contains(case.says) {
        return Err(format!("explanation `{}` lacks `{}`", v.explanation, case.says));
    }
    Ok(())
}
