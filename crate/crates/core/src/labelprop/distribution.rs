use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Probabilities closer than this to the row maximum count as tied.
pub const MAX_TIE_TOLERANCE: f64 = 1e-12;

const SUM_TOLERANCE: f64 = 1e-9;

/// Sparse probability row over labels, sorted by label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    entries: Vec<(NodeId, f64)>,
}

impl LabelDistribution {
    /// Validates and sorts `entries`. Probabilities must be positive, labels
    /// unique, and the total 1 within 1e-9.
    pub fn new(mut entries: Vec<(NodeId, f64)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        if entries.is_empty() {
            return Err(Error::InvalidDistribution("no entries".into()));
        }
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution(format!(
                "label {} appears twice",
                w[0].0
            )));
        }
        if let Some(&(label, p)) = entries.iter().find(|e| !(e.1 > 0.0 && e.1 <= 1.0)) {
            return Err(Error::InvalidDistribution(format!(
                "label {label} has probability {p}"
            )));
        }
        let total: f64 = entries.iter().map(|e| e.1).sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(LabelDistribution { entries })
    }

    /// Normalizes positive masses into a distribution.
    pub fn from_weights(masses: Vec<(NodeId, f64)>) -> Result<Self> {
        let total: f64 = masses.iter().map(|e| e.1).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "total mass {total} cannot be normalized"
            )));
        }
        LabelDistribution::new(masses.into_iter().map(|(l, w)| (l, w / total)).collect())
    }

    pub fn single(label: NodeId) -> Self {
        LabelDistribution {
            entries: vec![(label, 1.0)],
        }
    }

    /// Caller guarantees sorted unique labels and positive masses.
    pub(crate) fn from_sorted_masses(mut entries: Vec<(NodeId, f64)>) -> Self {
        let total: f64 = entries.iter().map(|e| e.1).sum();
        for e in &mut entries {
            e.1 /= total;
        }
        LabelDistribution { entries }
    }

    pub fn entries(&self) -> &[(NodeId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, label: NodeId) -> f64 {
        self.entries
            .binary_search_by_key(&label, |e| e.0)
            .map_or(0.0, |k| self.entries[k].1)
    }

    pub fn labels(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Drops labels rejected by `keep` and renormalizes. `None` when nothing
    /// survives.
    pub(crate) fn retain_labels(&self, mut keep: impl FnMut(NodeId) -> bool) -> Option<Self> {
        let kept: Vec<_> = self.entries.iter().copied().filter(|e| keep(e.0)).collect();
        if kept.is_empty() {
            None
        } else if kept.len() == self.entries.len() {
            Some(self.clone())
        } else {
            Some(LabelDistribution::from_sorted_masses(kept))
        }
    }
}

/// Labels whose probability equals the row maximum, ascending.
pub fn max_label_set(row: &LabelDistribution) -> Vec<NodeId> {
    let max = row.entries.iter().map(|e| e.1).fold(f64::MIN, f64::max);
    row.entries
        .iter()
        .filter(|e| e.1 >= max - MAX_TIE_TOLERANCE)
        .map(|e| e.0)
        .collect()
}

/// Raises every probability to `exponent` and renormalizes.
pub fn inflate(row: &LabelDistribution, exponent: f64) -> Result<LabelDistribution> {
    if !(exponent >= 1.0 && exponent.is_finite()) {
        return Err(Error::param(
            "inflation",
            format!("exponent must be a finite number >= 1, got {exponent}"),
        ));
    }
    Ok(inflate_unchecked(row, exponent))
}

pub(crate) fn inflate_unchecked(row: &LabelDistribution, exponent: f64) -> LabelDistribution {
    if exponent == 1.0 || row.len() == 1 {
        return row.clone();
    }
    let raised = row
        .entries
        .iter()
        .map(|&(l, p)| (l, p.powf(exponent)))
        .collect();
    LabelDistribution::from_sorted_masses(raised)
}

/// Removes entries below `threshold` and renormalizes. When nothing reaches
/// the threshold the best entry (smallest label on ties) is kept alone.
pub fn cutoff(row: &LabelDistribution, threshold: f64) -> LabelDistribution {
    let kept = row.entries.iter().filter(|e| e.1 >= threshold).count();
    if kept == row.len() {
        return row.clone();
    }
    if kept == 0 {
        return LabelDistribution::single(max_label_set(row)[0]);
    }
    let survivors = row
        .entries
        .iter()
        .copied()
        .filter(|e| e.1 >= threshold)
        .collect();
    LabelDistribution::from_sorted_masses(survivors)
}
