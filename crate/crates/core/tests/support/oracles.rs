//! Brute-force reference implementations and seeded input generators for the
//! metric checks.

use laisc_core::io::data::{ActivationRow, ActivationTable, LabeledGrid, ProbabilityRow, ProbabilityTable};
use laisc_core::metrics::rng::SplitMix64;

fn below(rng: &mut SplitMix64, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// Pair of same-shape binary masks, each side 1..=8.
pub fn mask_pair(rng: &mut SplitMix64) -> (LabeledGrid, LabeledGrid) {
    let h = 1 + below(rng, 8);
    let w = 1 + below(rng, 8);
    let density = rng.next_f64();
    let cells = |rng: &mut SplitMix64| (0..h * w).map(|_| u8::from(rng.next_f64() < density)).collect::<Vec<u8>>();
    let a = cells(rng);
    let b = cells(rng);
    (LabeledGrid::new(h, w, a).unwrap(), LabeledGrid::new(h, w, b).unwrap())
}

/// (intersection, union) by visiting every pixel coordinate.
pub fn iou_counts(pred: &LabeledGrid, truth: &LabeledGrid) -> (u64, u64) {
    let mut inter = 0;
    let mut union = 0;
    for row in 0..pred.height() {
        for col in 0..pred.width() {
            let p = pred.get(row, col) == 1;
            let t = truth.get(row, col) == 1;
            if p && t {
                inter += 1;
            }
            if p || t {
                union += 1;
            }
        }
    }
    (inter, union)
}

pub fn activation_pair(rng: &mut SplitMix64) -> (ActivationTable, ActivationTable) {
    let neurons = 1 + below(rng, 5);
    let scale = [0.0, 1e-3, 1.0, 50.0][below(rng, 4)];
    let table = |rng: &mut SplitMix64, shift: f64| {
        let rows = (0..1 + below(rng, 40))
            .map(|i| ActivationRow {
                sample_id: format!("s{i}"),
                activations: (0..neurons).map(|_| shift + scale * rng.next_normal()).collect(),
            })
            .collect();
        ActivationTable::new(neurons, rows).unwrap()
    };
    let shift = rng.next_f64() * 2.0;
    let a = table(rng, 0.0);
    let b = table(rng, shift);
    (a, b)
}

/// Up to 10 instances over K in {2, 3}; probabilities are coarse fractions
/// so that threshold ties and argmax ties occur.
pub fn prob_table(rng: &mut SplitMix64) -> ProbabilityTable {
    let k = 2 + below(rng, 2);
    let n = 1 + below(rng, 10);
    let rows = (0..n)
        .map(|i| {
            let mut w: Vec<u32> = (0..k).map(|_| below(rng, 6) as u32).collect();
            if w.iter().all(|&x| x == 0) {
                w[below(rng, k)] = 1;
            }
            let total: u32 = w.iter().sum();
            ProbabilityRow {
                instance_id: format!("i{i}"),
                observed_label: below(rng, k),
                probabilities: w.iter().map(|&x| x as f64 / total as f64).collect(),
            }
        })
        .collect();
    ProbabilityTable::new(k, rows).unwrap()
}

/// Confident joint by direct application of the rules: per-class mean
/// self-confidence thresholds, then for each instance the most probable
/// class among those reaching their threshold, lowest index on ties.
pub fn confident_joint(t: &ProbabilityTable) -> Vec<Vec<u64>> {
    let k = t.num_classes();
    let mut thresholds: Vec<Option<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let labeled: Vec<f64> = t
            .rows()
            .iter()
            .filter(|r| r.observed_label == j)
            .map(|r| r.probabilities[j])
            .collect();
        thresholds.push(if labeled.is_empty() {
            None
        } else {
            Some(labeled.iter().sum::<f64>() / labeled.len() as f64)
        });
    }
    let mut joint = vec![vec![0u64; k]; k];
    for r in t.rows() {
        let mut best: Option<usize> = None;
        for (j, tj) in thresholds.iter().enumerate() {
            let Some(tj) = *tj else { continue };
            if r.probabilities[j] < tj {
                continue;
            }
            match best {
                Some(b) if r.probabilities[b] >= r.probabilities[j] => {}
                _ => best = Some(j),
            }
        }
        if let Some(b) = best {
            joint[r.observed_label][b] += 1;
        }
    }
    joint
}

/// The six-instance, two-class table: labels 0 with p_0 = 0.9, 0.8, 0.4 and
/// labels 1 with p_1 = 0.9, 0.7, 0.6.
pub fn six_instance_table() -> ProbabilityTable {
    let row = |id: &str, label: usize, p0: f64| ProbabilityRow {
        instance_id: id.into(),
        observed_label: label,
        probabilities: vec![p0, 1.0 - p0],
    };
    ProbabilityTable::new(
        2,
        vec![
            row("a", 0, 0.9),
            row("b", 0, 0.8),
            row("c", 0, 0.4),
            row("d", 1, 0.1),
            row("e", 1, 0.3),
            row("f", 1, 0.4),
        ],
    )
    .unwrap()
}
