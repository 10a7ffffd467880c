//! Landscape domain model.
//!
//! A [`Landscape`] ties together safety concerns, the goals they decompose
//! into, the verifiable requirements attached to each goal, the mitigation
//! measures producing evidence, the life-cycle stages and system components.
//! Concerns, goals and requirements form a strict three-level tree; every
//! other reference is by id.
//!
//! [`build_landscape`] is the only way to obtain a `Landscape`, so every value
//! of the type satisfies the structural invariants.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::metrics::MetricId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("dangling reference: `{id}` referenced by {referrer} does not exist")]
    DanglingReference { id: String, referrer: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("invalid payload in {vr_id}: {reason}")]
    InvalidPayload { vr_id: String, reason: String },
    #[error("tree violation at `{id}`: {reason}")]
    TreeViolation { id: String, reason: String },
    #[error("invalid stage ordering: {0}")]
    InvalidStageOrder(String),
    #[error("concern `{0}` is marked not relevant but has no rationale")]
    MissingRationale(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifecycleStage {
    pub id: String,
    pub name: String,
    /// 0-based rank within the life cycle.
    pub order: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemComponent {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetyConcern {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub relevant: bool,
    /// Why the concern was kept or filtered out. Required when not relevant.
    #[serde(default)]
    pub relevance_rationale: String,
    #[serde(default)]
    pub component_ids: Vec<String>,
    #[serde(default)]
    pub goal_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Goal {
    pub id: String,
    pub concern_id: String,
    /// Short label used in the decomposition column, e.g. "Quality assured
    /// labeling process". Falls back to `statement` when empty.
    #[serde(default)]
    pub title: String,
    pub statement: String,
    #[serde(default)]
    pub vr_ids: Vec<String>,
}

impl Goal {
    /// Decomposition cell text: `"<title> (<id>)"`.
    pub fn decomposition(&self) -> String {
        let label = if self.title.is_empty() {
            &self.statement
        } else {
            &self.title
        };
        format!("{label} ({})", self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "GE")]
    Ge,
    #[serde(rename = "LE")]
    Le,
}

impl Comparator {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Ge => value >= threshold,
            Comparator::Le => value <= threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Ge => ">=",
            Comparator::Le => "<=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Condition {
    pub condition_id: String,
    pub dataset_id: String,
    pub threshold: f64,
}

/// Kind-specific content of a verifiable requirement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Requirement {
    MetricThreshold {
        metric_id: MetricId,
        dataset_id: String,
        comparator: Comparator,
        threshold: f64,
    },
    MetricGap {
        metric_id: MetricId,
        dataset_id_a: String,
        dataset_id_b: String,
        epsilon: f64,
    },
    PerCondition {
        metric_id: MetricId,
        conditions: Vec<Condition>,
    },
    ReviewFraction {
        dataset_id: String,
        min_fraction: f64,
    },
    FlagResolution {
        metric_id: MetricId,
        dataset_id: String,
        flag_threshold: f64,
    },
    QualitativeApproval {
        required_approvals: u32,
        #[serde(default)]
        required_documents: Vec<String>,
    },
}

/// Discriminant of [`Requirement`], used for display and kind matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RequirementKind {
    MetricThreshold,
    MetricGap,
    PerCondition,
    ReviewFraction,
    FlagResolution,
    QualitativeApproval,
}

impl std::fmt::Display for RequirementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

impl Requirement {
    pub fn kind(&self) -> RequirementKind {
        match self {
            Requirement::MetricThreshold { .. } => RequirementKind::MetricThreshold,
            Requirement::MetricGap { .. } => RequirementKind::MetricGap,
            Requirement::PerCondition { .. } => RequirementKind::PerCondition,
            Requirement::ReviewFraction { .. } => RequirementKind::ReviewFraction,
            Requirement::FlagResolution { .. } => RequirementKind::FlagResolution,
            Requirement::QualitativeApproval { .. } => RequirementKind::QualitativeApproval,
        }
    }

    /// Every dataset id the requirement is bound to.
    pub fn dataset_ids(&self) -> Vec<&str> {
        match self {
            Requirement::MetricThreshold { dataset_id, .. }
            | Requirement::ReviewFraction { dataset_id, .. }
            | Requirement::FlagResolution { dataset_id, .. } => vec![dataset_id],
            Requirement::MetricGap {
                dataset_id_a,
                dataset_id_b,
                ..
            } => vec![dataset_id_a, dataset_id_b],
            Requirement::PerCondition { conditions, .. } => {
                conditions.iter().map(|c| c.dataset_id.as_str()).collect()
            }
            Requirement::QualitativeApproval { .. } => Vec::new(),
        }
    }

    fn check(&self) -> Result<(), String> {
        fn finite(name: &str, v: f64) -> Result<(), String> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be finite"))
            }
        }
        match self {
            Requirement::MetricThreshold { threshold, .. } => finite("threshold", *threshold),
            Requirement::MetricGap {
                dataset_id_a,
                dataset_id_b,
                epsilon,
                ..
            } => {
                finite("epsilon", *epsilon)?;
                if *epsilon < 0.0 {
                    return Err("epsilon must be >= 0".into());
                }
                if dataset_id_a == dataset_id_b {
                    return Err("gap datasets must differ".into());
                }
                Ok(())
            }
            Requirement::PerCondition { conditions, .. } => {
                if conditions.is_empty() {
                    return Err("at least one condition is required".into());
                }
                let mut seen = HashSet::new();
                for c in conditions {
                    finite(&format!("threshold of {}", c.condition_id), c.threshold)?;
                    if !seen.insert(c.condition_id.as_str()) {
                        return Err(format!("condition `{}` listed twice", c.condition_id));
                    }
                }
                Ok(())
            }
            Requirement::ReviewFraction { min_fraction, .. } => {
                if (0.0..=1.0).contains(min_fraction) {
                    Ok(())
                } else {
                    Err("min_fraction must lie in [0, 1]".into())
                }
            }
            Requirement::FlagResolution { flag_threshold, .. } => {
                if (0.0..=1.0).contains(flag_threshold) {
                    Ok(())
                } else {
                    Err("flag_threshold must lie in [0, 1]".into())
                }
            }
            Requirement::QualitativeApproval {
                required_approvals, ..
            } => {
                if *required_approvals >= 1 {
                    Ok(())
                } else {
                    Err("required_approvals must be >= 1".into())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifiableRequirement {
    pub id: String,
    pub goal_id: String,
    /// Life-cycle stage at which the evidence is produced.
    pub stage_id: String,
    #[serde(default)]
    pub statement: String,
    #[serde(default)]
    pub mm_ids: Vec<String>,
    pub requirement: Requirement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MitigationMeasure {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// `None` is a coverage gap, not a structural error.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetDescriptor {
    pub path: String,
    pub format: String,
    #[serde(default)]
    pub role: String,
}

/// Unvalidated landscape content, exactly as stored on disk.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandscapeDefinition {
    pub name: String,
    #[serde(default)]
    pub version: String,
    #[serde(default)]
    pub stages: Vec<LifecycleStage>,
    #[serde(default)]
    pub components: Vec<SystemComponent>,
    #[serde(default)]
    pub concerns: Vec<SafetyConcern>,
    #[serde(default)]
    pub goals: Vec<Goal>,
    #[serde(default)]
    pub vrs: Vec<VerifiableRequirement>,
    #[serde(default)]
    pub mitigation_measures: Vec<MitigationMeasure>,
    #[serde(default)]
    pub datasets: BTreeMap<String, DatasetDescriptor>,
}

/// A validated landscape. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    def: LandscapeDefinition,
    fingerprint: String,
    stage_idx: HashMap<String, usize>,
    component_idx: HashMap<String, usize>,
    concern_idx: HashMap<String, usize>,
    goal_idx: HashMap<String, usize>,
    vr_idx: HashMap<String, usize>,
    mm_idx: HashMap<String, usize>,
}

/// One row of the tabular landscape view: a (VR x M&M) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LandscapeRow {
    pub concern_id: String,
    pub concern_name: String,
    pub stage_id: String,
    pub stage_name: String,
    pub goal_id: String,
    pub decomposition: String,
    pub vr_id: String,
    /// Empty when the requirement has no mitigation measure.
    pub mm_id: String,
    pub mm_name: String,
    pub component_ids: Vec<String>,
}

fn index_unique<T>(items: &[T], id: impl Fn(&T) -> &str, seen: &mut HashSet<String>) -> Result<HashMap<String, usize>, ModelError> {
    let mut idx = HashMap::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let id = id(item);
        if !seen.insert(id.to_string()) {
            return Err(ModelError::DuplicateId(id.to_string()));
        }
        idx.insert(id.to_string(), i);
    }
    Ok(idx)
}

fn resolve(idx: &HashMap<String, usize>, id: &str, referrer: impl FnOnce() -> String) -> Result<usize, ModelError> {
    idx.get(id).copied().ok_or_else(|| ModelError::DanglingReference {
        id: id.to_string(),
        referrer: referrer(),
    })
}

/// Validates a definition and computes its fingerprint.
pub fn build_landscape(def: LandscapeDefinition) -> Result<Landscape, ModelError> {
    // Stages and components live in their own namespaces; the concern/goal/VR
    // tree and M&Ms share one so that node ids in reports never collide.
    let stage_idx = index_unique(&def.stages, |s| &s.id, &mut HashSet::new())?;
    let component_idx = index_unique(&def.components, |c| &c.id, &mut HashSet::new())?;
    let mut tree_ids = HashSet::new();
    let concern_idx = index_unique(&def.concerns, |c| &c.id, &mut tree_ids)?;
    let goal_idx = index_unique(&def.goals, |g| &g.id, &mut tree_ids)?;
    let vr_idx = index_unique(&def.vrs, |v| &v.id, &mut tree_ids)?;
    let mm_idx = index_unique(&def.mitigation_measures, |m| &m.id, &mut tree_ids)?;

    let mut orders: Vec<u32> = def.stages.iter().map(|s| s.order).collect();
    orders.sort_unstable();
    for (expected, got) in orders.iter().enumerate() {
        if *got as usize != expected {
            return Err(ModelError::InvalidStageOrder(format!(
                "orders must be unique and contiguous from 0, found {orders:?}"
            )));
        }
    }

    // Dangling references are reported before any tree-shape mismatch.
    for g in &def.goals {
        resolve(&concern_idx, &g.concern_id, || format!("goal {}", g.id))?;
    }
    for v in &def.vrs {
        resolve(&goal_idx, &v.goal_id, || format!("vr {}", v.id))?;
    }

    for c in &def.concerns {
        if !c.relevant && c.relevance_rationale.trim().is_empty() {
            return Err(ModelError::MissingRationale(c.id.clone()));
        }
        for comp in &c.component_ids {
            resolve(&component_idx, comp, || format!("concern {}", c.id))?;
        }
        let mut seen = HashSet::new();
        for g in &c.goal_ids {
            let gi = resolve(&goal_idx, g, || format!("concern {}", c.id))?;
            if !seen.insert(g) {
                return Err(ModelError::TreeViolation {
                    id: g.clone(),
                    reason: format!("listed twice under concern {}", c.id),
                });
            }
            if def.goals[gi].concern_id != c.id {
                return Err(ModelError::TreeViolation {
                    id: g.clone(),
                    reason: format!(
                        "listed under concern {} but its parent is {}",
                        c.id, def.goals[gi].concern_id
                    ),
                });
            }
        }
    }

    for g in &def.goals {
        let ci = resolve(&concern_idx, &g.concern_id, || format!("goal {}", g.id))?;
        if !def.concerns[ci].goal_ids.contains(&g.id) {
            return Err(ModelError::TreeViolation {
                id: g.id.clone(),
                reason: format!("not listed in goal_ids of concern {}", g.concern_id),
            });
        }
        let mut seen = HashSet::new();
        for v in &g.vr_ids {
            let vi = resolve(&vr_idx, v, || format!("goal {}", g.id))?;
            if !seen.insert(v) {
                return Err(ModelError::TreeViolation {
                    id: v.clone(),
                    reason: format!("listed twice under goal {}", g.id),
                });
            }
            if def.vrs[vi].goal_id != g.id {
                return Err(ModelError::TreeViolation {
                    id: v.clone(),
                    reason: format!("listed under goal {} but its parent is {}", g.id, def.vrs[vi].goal_id),
                });
            }
        }
    }

    for v in &def.vrs {
        let gi = resolve(&goal_idx, &v.goal_id, || format!("vr {}", v.id))?;
        if !def.goals[gi].vr_ids.contains(&v.id) {
            return Err(ModelError::TreeViolation {
                id: v.id.clone(),
                reason: format!("not listed in vr_ids of goal {}", v.goal_id),
            });
        }
        resolve(&stage_idx, &v.stage_id, || format!("vr {}", v.id))?;
        let mut seen = HashSet::new();
        for m in &v.mm_ids {
            resolve(&mm_idx, m, || format!("vr {}", v.id))?;
            if !seen.insert(m) {
                return Err(ModelError::InvalidPayload {
                    vr_id: v.id.clone(),
                    reason: format!("mitigation measure `{m}` listed twice"),
                });
            }
        }
        v.requirement.check().map_err(|reason| ModelError::InvalidPayload {
            vr_id: v.id.clone(),
            reason,
        })?;
        for ds in v.requirement.dataset_ids() {
            if !def.datasets.contains_key(ds) {
                return Err(ModelError::DanglingReference {
                    id: ds.to_string(),
                    referrer: format!("vr {} (dataset manifest)", v.id),
                });
            }
        }
    }

    for m in &def.mitigation_measures {
        if let Some(stage) = &m.stage_id {
            resolve(&stage_idx, stage, || format!("mitigation measure {}", m.id))?;
        }
    }

    let fingerprint = compute_fingerprint(&def);
    Ok(Landscape {
        def,
        fingerprint,
        stage_idx,
        component_idx,
        concern_idx,
        goal_idx,
        vr_idx,
        mm_idx,
    })
}

#[derive(Serialize)]
struct FingerprintInput<'a> {
    vrs: BTreeMap<&'a str, &'a Requirement>,
    datasets: BTreeMap<&'a str, (&'a str, &'a str)>,
}

/// SHA-256 over the canonical JSON of requirement payloads and dataset
/// bindings. Prose fields do not contribute.
fn compute_fingerprint(def: &LandscapeDefinition) -> String {
    let input = FingerprintInput {
        vrs: def.vrs.iter().map(|v| (v.id.as_str(), &v.requirement)).collect(),
        datasets: def
            .datasets
            .iter()
            .map(|(k, d)| (k.as_str(), (d.path.as_str(), d.format.as_str())))
            .collect(),
    };
    let bytes = serde_json::to_vec(&input).expect("fingerprint input is always serializable");
    hex::encode(Sha256::digest(bytes))
}

impl Landscape {
    pub fn definition(&self) -> &LandscapeDefinition {
        &self.def
    }

    pub fn into_definition(self) -> LandscapeDefinition {
        self.def
    }

    pub fn name(&self) -> &str {
        &self.def.name
    }

    pub fn version(&self) -> &str {
        &self.def.version
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn stages(&self) -> &[LifecycleStage] {
        &self.def.stages
    }

    pub fn components(&self) -> &[SystemComponent] {
        &self.def.components
    }

    pub fn concerns(&self) -> &[SafetyConcern] {
        &self.def.concerns
    }

    pub fn goals(&self) -> &[Goal] {
        &self.def.goals
    }

    pub fn vrs(&self) -> &[VerifiableRequirement] {
        &self.def.vrs
    }

    pub fn mitigation_measures(&self) -> &[MitigationMeasure] {
        &self.def.mitigation_measures
    }

    pub fn datasets(&self) -> &BTreeMap<String, DatasetDescriptor> {
        &self.def.datasets
    }

    pub fn stage(&self, id: &str) -> Option<&LifecycleStage> {
        self.stage_idx.get(id).map(|&i| &self.def.stages[i])
    }

    pub fn component(&self, id: &str) -> Option<&SystemComponent> {
        self.component_idx.get(id).map(|&i| &self.def.components[i])
    }

    pub fn concern(&self, id: &str) -> Option<&SafetyConcern> {
        self.concern_idx.get(id).map(|&i| &self.def.concerns[i])
    }

    pub fn goal(&self, id: &str) -> Option<&Goal> {
        self.goal_idx.get(id).map(|&i| &self.def.goals[i])
    }

    pub fn vr(&self, id: &str) -> Option<&VerifiableRequirement> {
        self.vr_idx.get(id).map(|&i| &self.def.vrs[i])
    }

    pub fn mitigation_measure(&self, id: &str) -> Option<&MitigationMeasure> {
        self.mm_idx.get(id).map(|&i| &self.def.mitigation_measures[i])
    }

    /// Concern owning a requirement, via its goal.
    pub fn concern_of_vr(&self, vr: &VerifiableRequirement) -> &SafetyConcern {
        let goal = self.goal(&vr.goal_id).expect("validated");
        self.concern(&goal.concern_id).expect("validated")
    }

    /// Requirement ids in canonical row order.
    pub fn vr_ids_in_order(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for row in rows(self) {
            if seen.insert(row.vr_id.clone()) {
                out.push(self.vr(&row.vr_id).expect("validated").id.as_str());
            }
        }
        out
    }
}

type RowKey = (String, u32, String, String, String);

/// Canonical landscape rows: one per (VR x M&M), sorted by concern id, stage
/// order, goal id, VR id, then M&M id.
pub fn rows(landscape: &Landscape) -> Vec<LandscapeRow> {
    let mut keyed: Vec<(RowKey, LandscapeRow)> = Vec::new();
    for vr in landscape.vrs() {
        let goal = landscape.goal(&vr.goal_id).expect("validated");
        let concern = landscape.concern(&goal.concern_id).expect("validated");
        let stage = landscape.stage(&vr.stage_id).expect("validated");
        let mut mms: Vec<Option<&MitigationMeasure>> = vr
            .mm_ids
            .iter()
            .map(|id| Some(landscape.mitigation_measure(id).expect("validated")))
            .collect();
        if mms.is_empty() {
            mms.push(None);
        }
        for mm in mms {
            let (mm_id, mm_name) = mm.map_or((String::new(), String::new()), |m| (m.id.clone(), m.name.clone()));
            let key = (
                concern.id.clone(),
                stage.order,
                goal.id.clone(),
                vr.id.clone(),
                mm_id.clone(),
            );
            keyed.push((
                key,
                LandscapeRow {
                    concern_id: concern.id.clone(),
                    concern_name: concern.name.clone(),
                    stage_id: stage.id.clone(),
                    stage_name: stage.name.clone(),
                    goal_id: goal.id.clone(),
                    decomposition: goal.decomposition(),
                    vr_id: vr.id.clone(),
                    mm_id,
                    mm_name,
                    component_ids: concern.component_ids.clone(),
                },
            ));
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, r)| r).collect()
}

pub fn fingerprint(landscape: &Landscape) -> &str {
    landscape.fingerprint()
}
