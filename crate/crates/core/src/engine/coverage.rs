//! Structural blind spots in a landscape.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::Landscape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoverageGapKind {
    ConcernWithoutGoal,
    #[serde(rename = "GoalWithoutVR")]
    GoalWithoutVr,
    #[serde(rename = "VRWithoutMM")]
    VrWithoutMm,
    #[serde(rename = "MMWithoutStage")]
    MmWithoutStage,
}

impl std::fmt::Display for CoverageGapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoverageGapKind::ConcernWithoutGoal => "ConcernWithoutGoal",
            CoverageGapKind::GoalWithoutVr => "GoalWithoutVR",
            CoverageGapKind::VrWithoutMm => "VRWithoutMM",
            CoverageGapKind::MmWithoutStage => "MMWithoutStage",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoverageGap {
    pub kind: CoverageGapKind,
    pub subject: String,
}

impl std::fmt::Display for CoverageGap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({})", self.kind, self.subject)
    }
}

/// Gaps along every concern -> goal -> VR -> M&M -> stage chain that starts at
/// a relevant concern, sorted by kind then subject id.
pub fn coverage(landscape: &Landscape) -> Vec<CoverageGap> {
    let mut gaps = BTreeSet::new();
    let mut gap = |kind, subject: &str| {
        gaps.insert(CoverageGap {
            kind,
            subject: subject.to_string(),
        });
    };
    for concern in landscape.concerns().iter().filter(|c| c.relevant) {
        if concern.goal_ids.is_empty() {
            gap(CoverageGapKind::ConcernWithoutGoal, &concern.id);
        }
        for goal in concern.goal_ids.iter().filter_map(|g| landscape.goal(g)) {
            if goal.vr_ids.is_empty() {
                gap(CoverageGapKind::GoalWithoutVr, &goal.id);
            }
            for vr in goal.vr_ids.iter().filter_map(|v| landscape.vr(v)) {
                if vr.mm_ids.is_empty() {
                    gap(CoverageGapKind::VrWithoutMm, &vr.id);
                }
                for mm in vr.mm_ids.iter().filter_map(|m| landscape.mitigation_measure(m)) {
                    if mm.stage_id.is_none() {
                        gap(CoverageGapKind::MmWithoutStage, &mm.id);
                    }
                }
            }
        }
    }
    gaps.into_iter().collect()
}
