//! Confident-learning label scoring.
//!
//! The per-instance score is the self-confidence `p(observed label | x)`.
//! Flagging compares that score against a threshold. The confident joint is
//! computed alongside as an advisory estimate of observed-vs-true labels:
//! class threshold `t_j` is the mean self-confidence of instances observed
//! as `j`, and an instance observed as `y` is counted at `C[y][j]` for the
//! highest-probability class `j` with `p_j >= t_j` (lowest index on ties).
//! Classes nobody is observed as have no threshold and never qualify.

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::io::data::ProbabilityTable;

pub fn clm_scores(t: &ProbabilityTable) -> Vec<(String, f64)> {
    t.rows()
        .iter()
        .map(|r| (r.instance_id.clone(), r.probabilities[r.observed_label]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceAssignment {
    pub instance_id: String,
    pub observed_label: usize,
    /// Estimated true label, if any class cleared its threshold.
    pub assigned_label: Option<usize>,
    /// Assigned label differs from the observed one.
    pub off_diagonal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClmFlags {
    pub threshold: f64,
    /// Instance ids with score below the threshold, in table order.
    pub flagged: Vec<String>,
    pub class_thresholds: Vec<Option<f64>>,
    /// `confident_joint[observed][assigned]` counts.
    pub confident_joint: Vec<Vec<u64>>,
    pub assignments: Vec<InstanceAssignment>,
}

pub fn clm_flags(t: &ProbabilityTable, threshold: f64) -> Result<ClmFlags, MetricError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(MetricError::InvalidThreshold(threshold));
    }
    let k = t.num_classes();
    let flagged = clm_scores(t)
        .into_iter()
        .filter(|(_, s)| *s < threshold)
        .map(|(id, _)| id)
        .collect();

    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for r in t.rows() {
        sums[r.observed_label] += r.probabilities[r.observed_label];
        counts[r.observed_label] += 1;
    }
    let class_thresholds: Vec<Option<f64>> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &n)| (n > 0).then(|| s / n as f64))
        .collect();

    let mut joint = vec![vec![0u64; k]; k];
    let mut assignments = Vec::with_capacity(t.rows().len());
    for r in t.rows() {
        let mut best: Option<usize> = None;
        for (j, &p) in r.probabilities.iter().enumerate() {
            let qualifies = class_thresholds[j].is_some_and(|tj| p >= tj);
            if qualifies && best.is_none_or(|b| p > r.probabilities[b]) {
                best = Some(j);
            }
        }
        if let Some(j) = best {
            joint[r.observed_label][j] += 1;
        }
        assignments.push(InstanceAssignment {
            instance_id: r.instance_id.clone(),
            observed_label: r.observed_label,
            assigned_label: best,
            off_diagonal: best.is_some_and(|j| j != r.observed_label),
        });
    }

    Ok(ClmFlags {
        threshold,
        flagged,
        class_thresholds,
        confident_joint: joint,
        assignments,
    })
}
