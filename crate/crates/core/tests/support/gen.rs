//! Seeded random landscapes, plus link deletions with the gaps they induce.

use std::collections::{BTreeMap, BTreeSet};

use laisc_core::engine::CoverageGapKind;
use laisc_core::metrics::rng::SplitMix64;
use laisc_core::metrics::MetricId;
use laisc_core::model::{
    Comparator, Condition, DatasetDescriptor, Goal, LandscapeDefinition, LifecycleStage, MitigationMeasure,
    Requirement, SafetyConcern, SystemComponent, VerifiableRequirement,
};

fn below(rng: &mut SplitMix64, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

fn chance(rng: &mut SplitMix64, p: f64) -> bool {
    rng.next_f64() < p
}

const WORDS: &[&str] = &["data", "label", "drift", "noise", "Spur", "fog", "glare", "Okklusion", "ÄÖÜ", "naïve", "\"quoted\"", "tab\tsep", "back\\slash", "élan"];

fn words(rng: &mut SplitMix64) -> String {
    let n = 1 + below(rng, 3);
    (0..n).map(|_| WORDS[below(rng, WORDS.len())]).collect::<Vec<_>>().join(" ")
}

fn requirement(rng: &mut SplitMix64, datasets: &[String]) -> Requirement {
    let ds = |rng: &mut SplitMix64| datasets[below(rng, datasets.len())].clone();
    let metric = |rng: &mut SplitMix64| MetricId::ALL[below(rng, MetricId::ALL.len())];
    match below(rng, 6) {
        0 => Requirement::MetricThreshold {
            metric_id: metric(rng),
            dataset_id: ds(rng),
            comparator: if chance(rng, 0.5) { Comparator::Ge } else { Comparator::Le },
            threshold: rng.next_f64(),
        },
        1 => {
            let a = below(rng, datasets.len());
            let b = (a + 1 + below(rng, datasets.len() - 1)) % datasets.len();
            Requirement::MetricGap {
                metric_id: metric(rng),
                dataset_id_a: datasets[a].clone(),
                dataset_id_b: datasets[b].clone(),
                epsilon: rng.next_f64() * 0.2,
            }
        }
        2 => Requirement::PerCondition {
            metric_id: metric(rng),
            conditions: (0..1 + below(rng, 4))
                .map(|i| Condition {
                    condition_id: format!("cond{i}"),
                    dataset_id: ds(rng),
                    threshold: rng.next_f64(),
                })
                .collect(),
        },
        3 => Requirement::ReviewFraction {
            dataset_id: ds(rng),
            min_fraction: rng.next_f64(),
        },
        4 => Requirement::FlagResolution {
            metric_id: MetricId::ClmFlags,
            dataset_id: ds(rng),
            flag_threshold: rng.next_f64(),
        },
        _ => Requirement::QualitativeApproval {
            required_approvals: 1 + below(rng, 3) as u32,
            required_documents: (0..below(rng, 3)).map(|i| format!("doc-{i}")).collect(),
        },
    }
}

/// A structurally complete random landscape: every relevant chain ends in a
/// staged M&M. Some concerns are not relevant; some M&Ms are unreferenced.
pub fn landscape(seed: u64) -> LandscapeDefinition {
    let mut rng = SplitMix64::new(seed);
    let rng = &mut rng;
    let stages: Vec<LifecycleStage> = (0..1 + below(rng, 4))
        .map(|i| LifecycleStage {
            id: format!("st{i}"),
            name: format!("Stage {i} {}", words(rng)),
            order: i as u32,
        })
        .collect();
    let components: Vec<SystemComponent> = (0..1 + below(rng, 3))
        .map(|i| SystemComponent {
            id: format!("comp{i}"),
            name: words(rng),
            description: String::new(),
        })
        .collect();
    let dataset_ids: Vec<String> = (0..2 + below(rng, 4)).map(|i| format!("ds{i}")).collect();
    let datasets: BTreeMap<String, DatasetDescriptor> = dataset_ids
        .iter()
        .map(|d| {
            (
                d.clone(),
                DatasetDescriptor {
                    path: format!("data/{d}.grid"),
                    format: "grid".into(),
                    role: words(rng),
                },
            )
        })
        .collect();

    let mut def = LandscapeDefinition {
        name: format!("generated {seed}"),
        version: format!("0.{}", below(rng, 10)),
        stages,
        components,
        datasets,
        ..LandscapeDefinition::default()
    };
    for c in 0..1 + below(rng, 4) {
        let cid = format!("C{c}");
        let relevant = chance(rng, 0.8);
        let mut concern = SafetyConcern {
            id: cid.clone(),
            name: words(rng),
            description: words(rng),
            relevant,
            relevance_rationale: if relevant { String::new() } else { "out of scope".into() },
            component_ids: vec![def.components[below(rng, def.components.len())].id.clone()],
            goal_ids: vec![],
        };
        for g in 0..1 + below(rng, 3) {
            let gid = format!("G{c}.{g}");
            let mut goal = Goal {
                id: gid.clone(),
                concern_id: cid.clone(),
                title: words(rng),
                statement: words(rng),
                vr_ids: vec![],
            };
            for v in 0..1 + below(rng, 3) {
                let vid = format!("VR{c}.{g}.{v}");
                let mut mm_ids = vec![];
                for m in 0..1 + below(rng, 2) {
                    let mid = format!("mm-{c}-{g}-{v}-{m}");
                    def.mitigation_measures.push(MitigationMeasure {
                        id: mid.clone(),
                        name: words(rng),
                        description: String::new(),
                        stage_id: Some(def.stages[below(rng, def.stages.len())].id.clone()),
                    });
                    mm_ids.push(mid);
                }
                def.vrs.push(VerifiableRequirement {
                    id: vid.clone(),
                    goal_id: gid.clone(),
                    stage_id: def.stages[below(rng, def.stages.len())].id.clone(),
                    statement: words(rng),
                    mm_ids,
                    requirement: requirement(rng, &dataset_ids),
                });
                goal.vr_ids.push(vid);
            }
            concern.goal_ids.push(gid);
            def.goals.push(goal);
        }
        def.concerns.push(concern);
    }
    for i in 0..below(rng, 2) {
        def.mitigation_measures.push(MitigationMeasure {
            id: format!("mm-orphan-{i}"),
            name: words(rng),
            description: String::new(),
            stage_id: if chance(rng, 0.5) { Some(def.stages[0].id.clone()) } else { None },
        });
    }
    def
}

pub type Gap = (CoverageGapKind, String);

/// Deletes random links from `def` and returns the gaps that must be
/// reported. Deletions never nest, so each deletion induces exactly one
/// gap, and deletions under irrelevant concerns induce none.
pub fn delete_links(def: &mut LandscapeDefinition, seed: u64) -> BTreeSet<Gap> {
    let mut rng = SplitMix64::new(seed ^ 0x5eed);
    let rng = &mut rng;
    let mut expected = BTreeSet::new();
    let concern_ids: Vec<(String, bool)> = def.concerns.iter().map(|c| (c.id.clone(), c.relevant)).collect();
    for (cid, relevant) in concern_ids {
        if chance(rng, 0.15) {
            let goals = std::mem::take(&mut def.concerns.iter_mut().find(|c| c.id == cid).unwrap().goal_ids);
            def.goals.retain(|g| !goals.contains(&g.id));
            def.vrs.retain(|v| !goals.contains(&v.goal_id));
            if relevant {
                expected.insert((CoverageGapKind::ConcernWithoutGoal, cid.clone()));
            }
            continue;
        }
        let goal_ids: Vec<String> = def.goals.iter().filter(|g| g.concern_id == cid).map(|g| g.id.clone()).collect();
        for gid in goal_ids {
            if chance(rng, 0.15) {
                let vrs = std::mem::take(&mut def.goals.iter_mut().find(|g| g.id == gid).unwrap().vr_ids);
                def.vrs.retain(|v| !vrs.contains(&v.id));
                if relevant {
                    expected.insert((CoverageGapKind::GoalWithoutVr, gid.clone()));
                }
                continue;
            }
            let vr_ids: Vec<String> = def.vrs.iter().filter(|v| v.goal_id == gid).map(|v| v.id.clone()).collect();
            for vid in vr_ids {
                let vr = def.vrs.iter_mut().find(|v| v.id == vid).unwrap();
                if chance(rng, 0.15) {
                    vr.mm_ids.clear();
                    if relevant {
                        expected.insert((CoverageGapKind::VrWithoutMm, vid.clone()));
                    }
                    continue;
                }
                for mid in vr.mm_ids.clone() {
                    if chance(rng, 0.15) {
                        def.mitigation_measures.iter_mut().find(|m| m.id == mid).unwrap().stage_id = None;
                        if relevant {
                            expected.insert((CoverageGapKind::MmWithoutStage, mid));
                        }
                    }
                }
            }
        }
    }
    expected
}
