//! Segmentation performance: IoU, mIoU and performance gaps.

use super::MetricError;
use crate::io::data::LabeledGrid;

fn check_binary(g: &LabeledGrid) -> Result<(), MetricError> {
    match g.values().iter().find(|&&v| v > 1) {
        Some(&v) => Err(MetricError::NotBinary(v)),
        None => Ok(()),
    }
}

/// Intersection over union of two binary masks. Two empty masks agree
/// perfectly and score 1.0.
pub fn iou(pred: &LabeledGrid, truth: &LabeledGrid) -> Result<f64, MetricError> {
    if !pred.same_shape(truth) {
        return Err(MetricError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            pred.height(),
            pred.width(),
            truth.height(),
            truth.width()
        )));
    }
    check_binary(pred)?;
    check_binary(truth)?;
    let (mut inter, mut union) = (0u64, 0u64);
    for (&p, &t) in pred.values().iter().zip(truth.values()) {
        inter += (p & t) as u64;
        union += (p | t) as u64;
    }
    if union == 0 {
        Ok(1.0)
    } else {
        Ok(inter as f64 / union as f64)
    }
}

/// Mean of per-pair IoU, accumulated in list order.
pub fn miou(preds: &[LabeledGrid], truths: &[LabeledGrid]) -> Result<f64, MetricError> {
    if preds.is_empty() || truths.is_empty() {
        return Err(MetricError::EmptyDataset);
    }
    if preds.len() != truths.len() {
        return Err(MetricError::DimensionMismatch(format!(
            "{} predictions vs {} ground-truth masks",
            preds.len(),
            truths.len()
        )));
    }
    let mut sum = 0.0;
    for (i, (p, t)) in preds.iter().zip(truths).enumerate() {
        sum += iou(p, t).map_err(|e| match e {
            MetricError::DimensionMismatch(m) => MetricError::DimensionMismatch(format!("pair {i}: {m}")),
            other => other,
        })?;
    }
    Ok(sum / preds.len() as f64)
}

pub fn performance_gap(pi_a: f64, pi_b: f64) -> Result<f64, MetricError> {
    if !pi_a.is_finite() || !pi_b.is_finite() {
        return Err(MetricError::NonFinite);
    }
    Ok((pi_a - pi_b).abs())
}
