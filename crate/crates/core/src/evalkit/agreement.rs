//! Inter-rater agreement.

use super::EvalError;
use std::collections::{BTreeMap, BTreeSet};

/// Cohen's kappa of two raters' labels over the same items.
///
/// Returns 1 when chance agreement is 1 (both raters used one and the same
/// label throughout).
pub fn cohen_kappa<T: Ord>(labels_a: &[T], labels_b: &[T]) -> Result<f64, EvalError> {
    if labels_a.len() != labels_b.len() {
        return Err(EvalError::LengthMismatch {
            left: labels_a.len(),
            right: labels_b.len(),
        });
    }
    if labels_a.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let n = labels_a.len() as f64;
    let observed = labels_a
        .iter()
        .zip(labels_b)
        .filter(|(a, b)| a == b)
        .count() as f64
        / n;
    let mut marginals: BTreeMap<&T, (usize, usize)> = BTreeMap::new();
    for a in labels_a {
        marginals.entry(a).or_default().0 += 1;
    }
    for b in labels_b {
        marginals.entry(b).or_default().1 += 1;
    }
    let chance: f64 = marginals
        .values()
        .map(|(a, b)| (*a as f64 / n) * (*b as f64 / n))
        .sum();
    if (1.0 - chance).abs() < f64::EPSILON {
        return Ok(1.0);
    }
    Ok((observed - chance) / (1.0 - chance))
}

/// Share of false-positive findings both raters agree on: |A∩B| / |A∪B|,
/// 1 when both sets are empty.
pub fn percent_fp_agreement<T: Ord>(fp_a: &BTreeSet<T>, fp_b: &BTreeSet<T>) -> f64 {
    let union = fp_a.union(fp_b).count();
    if union == 0 {
        return 1.0;
    }
    fp_a.intersection(fp_b).count() as f64 / union as f64
}
