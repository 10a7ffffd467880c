//! Controlled label corruption for label-sensitivity studies.

use serde::{Deserialize, Serialize};

use super::rng::SplitMix64;
use super::MetricError;
use crate::io::data::LabeledGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LabelAugmentationSpec {
    /// Flip each pixel independently with probability `rate`, row-major.
    RandomPixelFlip { rate: f64, seed: u64 },
    /// Square structuring element of side `2 * radius + 1`.
    MaskDilate { radius: usize },
    MaskErode { radius: usize },
    /// Positive `dx` moves content right, positive `dy` moves it down.
    MaskTranslate { dx: i64, dy: i64 },
}

/// Value at (r + dr, c + dc), or 0 outside the grid.
fn at(g: &LabeledGrid, r: usize, c: usize, dr: i64, dc: i64) -> u8 {
    let (rr, cc) = (r as i64 + dr, c as i64 + dc);
    if rr < 0 || cc < 0 || rr >= g.height() as i64 || cc >= g.width() as i64 {
        0
    } else {
        g.get(rr as usize, cc as usize)
    }
}

fn morph(mask: &LabeledGrid, radius: usize, dilate: bool) -> LabeledGrid {
    let rad = radius as i64;
    let mut out = mask.clone();
    for r in 0..mask.height() {
        for c in 0..mask.width() {
            let mut any = false;
            let mut all = true;
            for dr in -rad..=rad {
                for dc in -rad..=rad {
                    let v = at(mask, r, c, dr, dc) != 0;
                    any |= v;
                    all &= v;
                }
            }
            out.set(r, c, if dilate { any } else { all } as u8);
        }
    }
    out
}

pub fn augment_labels(mask: &LabeledGrid, spec: &LabelAugmentationSpec) -> Result<LabeledGrid, MetricError> {
    if let Some(&v) = mask.values().iter().find(|&&v| v > 1) {
        return Err(MetricError::NotBinary(v));
    }
    let out = match *spec {
        LabelAugmentationSpec::RandomPixelFlip { rate, seed } => {
            if !(0.0..=1.0).contains(&rate) {
                return Err(MetricError::InvalidParameter(format!("flip rate {rate} outside [0, 1]")));
            }
            let mut rng = SplitMix64::new(seed);
            let values = mask
                .values()
                .iter()
                .map(|&v| if rng.next_f64() < rate { 1 - v } else { v })
                .collect();
            LabeledGrid::new(mask.height(), mask.width(), values).expect("shape preserved")
        }
        LabelAugmentationSpec::MaskDilate { radius } => morph(mask, radius, true),
        LabelAugmentationSpec::MaskErode { radius } => morph(mask, radius, false),
        LabelAugmentationSpec::MaskTranslate { dx, dy } => {
            let mut out = mask.clone();
            for r in 0..mask.height() {
                for c in 0..mask.width() {
                    out.set(r, c, at(mask, r, c, -dy, -dx));
                }
            }
            out
        }
    };
    Ok(out)
}
