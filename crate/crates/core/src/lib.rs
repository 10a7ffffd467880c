//! Landscape of AI safety concerns: model, evidence evaluation, metrics and
//! reporting.

pub mod engine;
pub mod fixtures;
pub mod io;
pub mod metrics;
pub mod model;
pub mod report;

pub use engine::{apply_filter, evaluate, EvaluationReport, Filter, Status, Verdict, VerdictStatus};
pub use model::{build_landscape, Landscape, LandscapeDefinition};
