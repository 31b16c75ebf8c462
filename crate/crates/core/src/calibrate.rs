//! Threshold sweeps of an embedding aspect against a reference store,
//! typically the exact topology or author relation.

use crate::embedding::{AspectId, AspectVectors};
use crate::simstore::{pair_cosine, AspectPairStore, SimError, TriState};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub aspect: AspectId,
    pub reference_positives: u64,
    pub rows: Vec<SweepRow>,
    /// Row with the highest F1 (lowest threshold on ties).
    pub best: Option<SweepRow>,
}

/// Evenly spaced thresholds `from, from + step, ..., <= to`.
pub fn threshold_grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    let k = ((to - from) / step + 1e-9).floor() as usize;
    (0..=k)
        .map(|i| ((from + i as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

/// Treats a pair as predicted similar when its cosine reaches the threshold
/// and as truly similar when the reference store classifies it similar.
pub fn sweep(
    vectors: &AspectVectors,
    reference: &AspectPairStore,
    grid: &[f64],
) -> Result<SweepTable, SimError> {
    let n = vectors.len();
    if reference.n() != n {
        return Err(SimError::Inconsistent(
            "reference store covers a different article set".into(),
        ));
    }
    // Per threshold: (tp, fp); false negatives follow from the positive total.
    let counts = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut c = vec![(0u64, 0u64); grid.len()];
            for j in i + 1..n {
                let s = pair_cosine(vectors.get(i), vectors.get(j));
                let positive = reference.class(i, j) == TriState::Similar;
                for (k, &t) in grid.iter().enumerate() {
                    if s >= t && !(vectors.get(i).is_null() || vectors.get(j).is_null()) {
                        if positive {
                            c[k].0 += 1;
                        } else {
                            c[k].1 += 1;
                        }
                    }
                }
            }
            c
        })
        .reduce(
            || vec![(0, 0); grid.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| {
                    x.0 += y.0;
                    x.1 += y.1;
                });
                a
            },
        );
    let positives = reference.counts().similar;
    let rows: Vec<SweepRow> = grid
        .iter()
        .zip(counts)
        .map(|(&t, (tp, fp))| {
            let fnn = positives - tp;
            let precision = if tp + fp == 0 {
                0.0
            } else {
                tp as f64 / (tp + fp) as f64
            };
            let recall = if positives == 0 {
                0.0
            } else {
                tp as f64 / positives as f64
            };
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            SweepRow {
                threshold: t,
                true_positives: tp,
                false_positives: fp,
                false_negatives: fnn,
                precision,
                recall,
                f1,
            }
        })
        .collect();
    let best = rows
        .iter()
        .copied()
        .fold(None, |best: Option<SweepRow>, r| match best {
            Some(b) if b.f1 >= r.f1 => Some(b),
            _ => Some(r),
        });
    Ok(SweepTable {
        aspect: vectors.aspect,
        reference_positives: positives,
        rows,
        best,
    })
}
