//! Analytic image perturbations simulating operating conditions.
//!
//! Photometric kinds change only the image. Geometric kinds apply the same
//! transform to image and mask.

use serde::{Deserialize, Serialize};

use super::rng::SplitMix64;
use super::MetricError;
use crate::io::data::LabeledGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSpec {
    BrightnessShift { delta: i32 },
    ContrastScale { factor: f64 },
    GaussianNoise { sigma: f64, seed: u64 },
    OcclusionPatch { x: usize, y: usize, w: usize, h: usize },
    HorizontalFlip,
    /// Clockwise quarter turns, `k` in 1..=3.
    Rotate90 { k: u8 },
}

impl PerturbationSpec {
    pub fn applies_to_mask(&self) -> bool {
        matches!(self, PerturbationSpec::HorizontalFlip | PerturbationSpec::Rotate90 { .. })
    }

    fn validate(&self, image: &LabeledGrid) -> Result<(), MetricError> {
        match *self {
            PerturbationSpec::ContrastScale { factor } if !(factor.is_finite() && factor > 0.0) => {
                Err(MetricError::InvalidParameter(format!("contrast factor {factor} must be > 0")))
            }
            PerturbationSpec::GaussianNoise { sigma, .. } if !(sigma.is_finite() && sigma >= 0.0) => {
                Err(MetricError::InvalidParameter(format!("noise sigma {sigma} must be >= 0")))
            }
            PerturbationSpec::Rotate90 { k } if !(1..=3).contains(&k) => {
                Err(MetricError::InvalidParameter(format!("rotation k={k} must be 1, 2 or 3")))
            }
            PerturbationSpec::OcclusionPatch { w, h, .. } if w == 0 || h == 0 => {
                Err(MetricError::InvalidParameter("occlusion patch must be non-empty".into()))
            }
            PerturbationSpec::OcclusionPatch { x, y, w, h }
                if x.checked_add(w).is_none_or(|e| e > image.width())
                    || y.checked_add(h).is_none_or(|e| e > image.height()) =>
            {
                Err(MetricError::PatchOutOfBounds {
                    x,
                    y,
                    w,
                    h,
                    width: image.width(),
                    height: image.height(),
                })
            }
            _ => Ok(()),
        }
    }
}

fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn map_pixels(image: &LabeledGrid, mut f: impl FnMut(u8) -> u8) -> LabeledGrid {
    let values = image.values().iter().map(|&p| f(p)).collect();
    LabeledGrid::new(image.height(), image.width(), values).expect("shape preserved")
}

fn flip(g: &LabeledGrid) -> LabeledGrid {
    let mut out = g.clone();
    for r in 0..g.height() {
        for c in 0..g.width() {
            out.set(r, c, g.get(r, g.width() - 1 - c));
        }
    }
    out
}

fn rotate_cw(g: &LabeledGrid) -> LabeledGrid {
    let (h, w) = (g.height(), g.width());
    let mut values = vec![0u8; h * w];
    // out has h' = w rows and w' = h columns; out[r][c] = in[h-1-c][r]
    for r in 0..w {
        for c in 0..h {
            values[r * h + c] = g.get(h - 1 - c, r);
        }
    }
    LabeledGrid::new(w, h, values).expect("shape preserved")
}

pub fn perturb(image: &LabeledGrid, mask: &LabeledGrid, spec: &PerturbationSpec) -> Result<(LabeledGrid, LabeledGrid), MetricError> {
    if !image.same_shape(mask) {
        return Err(MetricError::DimensionMismatch(format!(
            "image {}x{} vs mask {}x{}",
            image.height(),
            image.width(),
            mask.height(),
            mask.width()
        )));
    }
    spec.validate(image)?;
    let out = match *spec {
        PerturbationSpec::BrightnessShift { delta } => {
            let img = map_pixels(image, |p| (p as i64 + delta as i64).clamp(0, 255) as u8);
            (img, mask.clone())
        }
        PerturbationSpec::ContrastScale { factor } => {
            let mut sum = 0.0;
            for &p in image.values() {
                sum += p as f64;
            }
            let mean = sum / image.values().len() as f64;
            let img = map_pixels(image, |p| clamp_u8(mean + factor * (p as f64 - mean)));
            (img, mask.clone())
        }
        PerturbationSpec::GaussianNoise { sigma, seed } => {
            let mut rng = SplitMix64::new(seed);
            let img = map_pixels(image, |p| clamp_u8(p as f64 + sigma * rng.next_normal()));
            (img, mask.clone())
        }
        PerturbationSpec::OcclusionPatch { x, y, w, h } => {
            let mut img = image.clone();
            for r in y..y + h {
                for c in x..x + w {
                    img.set(r, c, 0);
                }
            }
            (img, mask.clone())
        }
        PerturbationSpec::HorizontalFlip => (flip(image), flip(mask)),
        PerturbationSpec::Rotate90 { k } => {
            let (mut img, mut m) = (image.clone(), mask.clone());
            for _ in 0..k {
                img = rotate_cw(&img);
                m = rotate_cw(&m);
            }
            (img, m)
        }
    };
    Ok(out)
}
