//! Quantitative metrics and data generators that produce evidence values.
//!
//! All accumulations run in fixed sequential index order so results do not
//! depend on how callers schedule independent metric calls.

mod augment;
mod clm;
mod nap;
mod perturb;
pub mod rng;
mod segmentation;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use augment::{augment_labels, LabelAugmentationSpec};
pub use clm::{clm_flags, clm_scores, ClmFlags, InstanceAssignment};
pub use nap::{hellinger, nap_distance, NAP_BINS};
pub use perturb::{perturb, PerturbationSpec};
pub use segmentation::{iou, miou, performance_gap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("empty activation table")]
    EmptyTable,
    #[error("neuron count mismatch: {0} vs {1}")]
    NeuronCountMismatch(usize, usize),
    #[error("non-finite input")]
    NonFinite,
    #[error("invalid threshold {0}: must lie in [0, 1]")]
    InvalidThreshold(f64),
    #[error("grid is not a binary mask (value {0} found)")]
    NotBinary(u8),
    #[error("occlusion patch {x},{y} {w}x{h} exceeds {width}x{height} image")]
    PatchOutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Closed registry of metric identifiers usable in requirements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    Miou,
    Gap,
    NapDistance,
    ClmFlags,
    ReviewFractionPassthrough,
}

impl MetricId {
    pub const ALL: [MetricId; 5] = [
        MetricId::Miou,
        MetricId::Gap,
        MetricId::NapDistance,
        MetricId::ClmFlags,
        MetricId::ReviewFractionPassthrough,
    ];

    pub fn as_str(self) -> &'static str {
        self.descriptor().id
    }

    pub fn descriptor(self) -> &'static MetricDescriptor {
        &REGISTRY[self as usize]
    }
}

impl std::fmt::Display for MetricId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MetricId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricDescriptor {
    pub id: &'static str,
    /// Number of datasets consumed.
    pub arity: usize,
    pub input_formats: &'static [&'static str],
    pub description: &'static str,
}

/// Every shipped metric yields a dimensionless real in [0, 1].
pub static REGISTRY: [MetricDescriptor; 5] = [
    MetricDescriptor {
        id: "miou",
        arity: 1,
        input_formats: &["grid-dir (predictions)", "grid-dir (ground truth)"],
        description: "mean intersection over union of binary segmentation masks",
    },
    MetricDescriptor {
        id: "gap",
        arity: 2,
        input_formats: &["real", "real"],
        description: "absolute difference of two performance indicator values",
    },
    MetricDescriptor {
        id: "nap_distance",
        arity: 2,
        input_formats: &["acts-csv", "acts-csv"],
        description: "mean per-neuron Hellinger distance of activation histograms",
    },
    MetricDescriptor {
        id: "clm_flags",
        arity: 1,
        input_formats: &["probs-csv"],
        description: "self-confidence label score; flags instances below threshold",
    },
    MetricDescriptor {
        id: "review_fraction_passthrough",
        arity: 1,
        input_formats: &["review log"],
        description: "reviewed fraction reported by a manual inspection log",
    },
];

/// Default minimum sample count before a significance warning is attached.
pub const DEFAULT_MIN_SAMPLES: usize = 30;

/// A metric value with the number of samples it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub value: f64,
    pub sample_size: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Measurement {
    /// Attaches a statistical-significance warning when `sample_size` is
    /// below `min_samples`. The value is never altered.
    pub fn new(value: f64, sample_size: usize, min_samples: usize) -> Self {
        let mut warnings = Vec::new();
        if sample_size < min_samples {
            warnings.push(format!(
                "statistical significance: {sample_size} samples < minimum {min_samples}"
            ));
        }
        Measurement {
            value,
            sample_size,
            warnings,
        }
    }
}
