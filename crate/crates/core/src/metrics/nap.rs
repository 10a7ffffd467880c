//! Distance between neural activation pattern distributions.

use super::MetricError;
use crate::io::data::ActivationTable;

/// Equal-width bins per neuron histogram.
pub const NAP_BINS: usize = 32;

/// Hellinger distance `sqrt(1 - sum_k sqrt(p_k q_k))` between two probability
/// vectors of equal length, clamped to [0, 1].
pub fn hellinger(p: &[f64], q: &[f64]) -> Result<f64, MetricError> {
    if p.len() != q.len() {
        return Err(MetricError::DimensionMismatch(format!("{} vs {} bins", p.len(), q.len())));
    }
    if p.iter().chain(q).any(|v| !v.is_finite()) {
        return Err(MetricError::NonFinite);
    }
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    Ok((1.0 - bc).max(0.0).sqrt().min(1.0))
}

/// Hellinger distance computed directly from bin counts, so that identical
/// histograms give exactly zero.
fn hellinger_counts(a: &[u64], na: u64, b: &[u64], nb: u64) -> f64 {
    let mut overlap = 0.0;
    for (&ca, &cb) in a.iter().zip(b) {
        overlap += ((ca * cb) as f64).sqrt();
    }
    let bc = overlap / ((na * nb) as f64).sqrt();
    (1.0 - bc).max(0.0).sqrt().min(1.0)
}

fn bin_of(x: f64, lo: f64, hi: f64) -> usize {
    if hi <= lo {
        return 0;
    }
    let pos = ((x - lo) / (hi - lo) * NAP_BINS as f64).floor();
    (pos.max(0.0) as usize).min(NAP_BINS - 1)
}

/// Mean over neurons of the Hellinger distance between the two tables'
/// per-neuron histograms. Bins span the combined range of each neuron; a
/// degenerate range collapses to a single bin.
pub fn nap_distance(a: &ActivationTable, b: &ActivationTable) -> Result<f64, MetricError> {
    if a.num_neurons() != b.num_neurons() {
        return Err(MetricError::NeuronCountMismatch(a.num_neurons(), b.num_neurons()));
    }
    if a.rows().is_empty() || b.rows().is_empty() {
        return Err(MetricError::EmptyTable);
    }
    let (na, nb) = (a.rows().len() as u64, b.rows().len() as u64);
    let mut total = 0.0;
    for j in 0..a.num_neurons() {
        let column = |t: &ActivationTable| t.rows().iter().map(move |r| r.activations[j]).collect::<Vec<_>>();
        let (xa, xb) = (column(a), column(b));
        let lo = xa.iter().chain(&xb).copied().fold(f64::INFINITY, f64::min);
        let hi = xa.iter().chain(&xb).copied().fold(f64::NEG_INFINITY, f64::max);
        let mut ha = [0u64; NAP_BINS];
        let mut hb = [0u64; NAP_BINS];
        for &x in &xa {
            ha[bin_of(x, lo, hi)] += 1;
        }
        for &x in &xb {
            hb[bin_of(x, lo, hi)] += 1;
        }
        total += hellinger_counts(&ha, na, &hb, nb);
    }
    Ok(total / a.num_neurons() as f64)
}
