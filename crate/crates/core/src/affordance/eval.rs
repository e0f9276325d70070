//! Classifier evaluation: accuracy, confusion counts, rank-based AUC.

use serde::{Deserialize, Serialize};

use super::{AffordanceModel, AffordanceSample};
use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: f64,
    pub auc: f64,
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

/// Score every sample and summarize at a 0.5 decision threshold.
pub fn evaluate(model: &AffordanceModel, samples: &[AffordanceSample]) -> Result<EvalReport> {
    let mut scored = Vec::with_capacity(samples.len());
    let (mut tp, mut fp, mut tn, mut fneg) = (0usize, 0usize, 0usize, 0usize);
    for s in samples {
        let p = model.query(&s.local_map, f64::from(s.qx), f64::from(s.qy), s.heading_bin)?;
        let predicted = p > 0.5;
        match (predicted, s.label == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fneg += 1,
        }
        scored.push((p, s.label));
    }
    Ok(EvalReport {
        n: samples.len(),
        accuracy: (tp + tn) as f64 / samples.len().max(1) as f64,
        auc: auc_from_scores(&mut scored),
        true_pos: tp,
        false_pos: fp,
        true_neg: tn,
        false_neg: fneg,
    })
}

/// Mann-Whitney AUC with tied scores sharing average ranks. Returns 0.5 when
/// only one class is present.
pub fn auc_from_scores(scored: &mut [(f64, u8)]) -> f64 {
    let n_pos = scored.iter().filter(|(_, l)| *l == 1).count();
    let n_neg = scored.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return 0.5;
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite scores"));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < scored.len() {
        let mut j = i;
        while j < scored.len() && scored[j].0 == scored[i].0 {
            j += 1;
        }
        // Ranks are 1-based; tied block shares the average rank.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for s in &scored[i..j] {
            if s.1 == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    u / (n_pos as f64 * n_neg as f64)
}

/// Deterministic train/held-out split by index stride.
pub fn split_dataset(samples: &[AffordanceSample], held_out_every: usize) -> (Vec<AffordanceSample>, Vec<AffordanceSample>) {
    let mut train = Vec::new();
    let mut held = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        if held_out_every > 0 && i % held_out_every == 0 {
            held.push(s.clone());
        } else {
            train.push(s.clone());
        }
    }
    (train, held)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_of_perfect_separation_is_one() {
        let mut scored = vec![(0.9, 1), (0.8, 1), (0.2, 0), (0.1, 0)];
        assert_eq!(auc_from_scores(&mut scored), 1.0);
    }

    #[test]
    fn auc_of_reversed_scores_is_zero() {
        let mut scored = vec![(0.1, 1), (0.2, 1), (0.8, 0), (0.9, 0)];
        assert_eq!(auc_from_scores(&mut scored), 0.0);
    }

    #[test]
    fn auc_of_constant_scores_is_half() {
        let mut scored = vec![(0.5, 1), (0.5, 0), (0.5, 1), (0.5, 0)];
        assert_eq!(auc_from_scores(&mut scored), 0.5);
    }

    #[test]
    fn auc_degenerate_class_is_half() {
        let mut scored = vec![(0.9, 1), (0.7, 1)];
        assert_eq!(auc_from_scores(&mut scored), 0.5);
    }

    #[test]
    fn split_keeps_every_sample_once() {
        let samples: Vec<AffordanceSample> = (0..10)
            .map(|i| AffordanceSample {
                crop_cells: 1,
                local_map: vec![i as f32],
                qx: 0.5,
                qy: 0.5,
                heading_bin: 0,
                label: 0,
                return_value: 0.0,
            })
            .collect();
        let (train, held) = split_dataset(&samples, 5);
        assert_eq!(train.len() + held.len(), 10);
        assert_eq!(held.len(), 2);
    }
}
