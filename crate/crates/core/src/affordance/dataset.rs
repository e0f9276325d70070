//! Rollout-based dataset collection with class balancing.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::CROP_CELLS;
use super::{heading_bin_angle, AffordanceSample, HEADING_BINS};
use crate::embodiment::{rollout, AgentState, EmbodimentSpec, ROLLOUT_HORIZON_M};
use crate::error::{CoreError, Result};
use crate::seeds;
use crate::terrain::ElevationMap;

/// Attempts to place one sample before giving up on a terrain.
const PLACEMENT_ATTEMPTS: usize = 200;
/// Clearance beyond the rollout horizon kept inside the map, meters.
const ROLLOUT_MARGIN: f64 = 0.3;

/// Collection statistics, including the balancing outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollectReport {
    pub raw_samples: usize,
    pub raw_success: usize,
    pub raw_failure: usize,
    /// Heading-bin histogram of the raw draws (uniform by construction).
    pub raw_bin_counts: [usize; HEADING_BINS],
    /// Samples kept after downsampling the majority class.
    pub balanced: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Collect `n_samples` rollouts and balance by downsampling the majority
/// class. Deterministic given (terrains, spec, seed).
pub fn collect_dataset(
    terrains: &[ElevationMap],
    spec: &EmbodimentSpec,
    n_samples: usize,
    seed: u64,
) -> Result<(Vec<AffordanceSample>, CollectReport)> {
    if terrains.is_empty() {
        return Err(CoreError::EmptyInput("no terrains to sample from".into()));
    }
    if n_samples == 0 {
        return Err(CoreError::InvalidParam("n_samples must be >= 1".into()));
    }
    spec.validate()?;
    let mut rng = seeds::stream_rng(seed, "collect/rollouts");
    let mut raw = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        if let Some(sample) = raw_sample(&mut rng, terrains, spec) {
            raw.push(sample);
        }
    }
    let mut balance_rng = seeds::stream_rng(seed, "collect/balance");
    Ok(balance(raw, None, &mut balance_rng))
}

/// Keep collecting until the balanced dataset reaches `target` samples (or a
/// raw budget of 20x target is exhausted).
pub fn collect_balanced(
    terrains: &[ElevationMap],
    spec: &EmbodimentSpec,
    target: usize,
    seed: u64,
) -> Result<(Vec<AffordanceSample>, CollectReport)> {
    if terrains.is_empty() {
        return Err(CoreError::EmptyInput("no terrains to sample from".into()));
    }
    if target == 0 {
        return Err(CoreError::InvalidParam("target must be >= 1".into()));
    }
    spec.validate()?;
    let mut rng = seeds::stream_rng(seed, "collect/rollouts");
    let per_class = target.div_ceil(2);
    let budget = target.saturating_mul(20);
    let mut raw = Vec::new();
    let mut successes = 0usize;
    while raw.len() < budget {
        if let Some(sample) = raw_sample(&mut rng, terrains, spec) {
            successes += usize::from(sample.label == 1);
            raw.push(sample);
            let failures = raw.len() - successes;
            if successes >= per_class && failures >= per_class {
                break;
            }
        }
    }
    let mut balance_rng = seeds::stream_rng(seed, "collect/balance");
    Ok(balance(raw, Some(per_class), &mut balance_rng))
}

/// One rollout sample: heading bin first (keeping bins exactly uniform),
/// then a start position rejection-sampled so both the crop window and the
/// rollout envelope stay inside the map.
fn raw_sample(
    rng: &mut ChaCha8Rng,
    terrains: &[ElevationMap],
    spec: &EmbodimentSpec,
) -> Option<AffordanceSample> {
    let map = &terrains[rng.gen_range(0..terrains.len())];
    let bin = rng.gen_range(0..HEADING_BINS) as u8;
    let direction = heading_bin_angle(bin);
    let (ox, oy) = map.origin();
    let (ex, ey) = map.extent();
    let crop_margin = (CROP_CELLS / 2 + 1) as f64 * map.resolution();
    let reach = ROLLOUT_HORIZON_M + ROLLOUT_MARGIN;

    for _ in 0..PLACEMENT_ATTEMPTS {
        let x = ox + crop_margin + rng.gen::<f64>() * (ex - 2.0 * crop_margin);
        let y = oy + crop_margin + rng.gen::<f64>() * (ey - 2.0 * crop_margin);
        let end = (x + reach * direction.cos(), y + reach * direction.sin());
        if !map.contains(end.0, end.1) || !map.crop_fits(x, y, CROP_CELLS) {
            continue;
        }
        let Ok(start) = AgentState::on_terrain(map, x, y, direction, spec) else {
            continue;
        };
        let outcome = rollout(map, spec, &start, direction, ROLLOUT_HORIZON_M);
        let crop = map
            .crop_local(x, y, CROP_CELLS)
            .expect("crop checked above");
        let span = CROP_CELLS as f64 * map.resolution();
        return Some(AffordanceSample {
            crop_cells: CROP_CELLS,
            local_map: crop.heights().to_vec(),
            qx: ((x - crop.origin().0) / span) as f32,
            qy: ((y - crop.origin().1) / span) as f32,
            heading_bin: bin,
            label: u8::from(outcome.success),
            return_value: outcome.return_value as f32,
        });
    }
    None
}

/// Downsample the majority class; `per_class_cap` additionally trims both
/// classes to an exact half-target each.
fn balance(
    raw: Vec<AffordanceSample>,
    per_class_cap: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> (Vec<AffordanceSample>, CollectReport) {
    let raw_samples = raw.len();
    let mut raw_bin_counts = [0usize; HEADING_BINS];
    for s in &raw {
        raw_bin_counts[usize::from(s.heading_bin)] += 1;
    }
    let (mut pos, mut neg): (Vec<_>, Vec<_>) = raw.into_iter().partition(|s| s.label == 1);
    let (raw_success, raw_failure) = (pos.len(), neg.len());

    let mut keep = raw_success.min(raw_failure);
    if let Some(cap) = per_class_cap {
        keep = keep.min(cap);
    }
    let mut warning = None;
    if keep == 0 {
        warning = Some(format!(
            "degenerate collection: {raw_success} successes / {raw_failure} failures; balanced dataset is empty"
        ));
    } else if let Some(cap) = per_class_cap {
        if keep < cap {
            warning = Some(format!(
                "insufficient minority class: requested {cap} per class, got {keep}"
            ));
        }
    }

    pos.shuffle(rng);
    neg.shuffle(rng);
    pos.truncate(keep);
    neg.truncate(keep);
    let mut balanced: Vec<AffordanceSample> = pos.into_iter().chain(neg).collect();
    balanced.shuffle(rng);

    let report = CollectReport {
        raw_samples,
        raw_success,
        raw_failure,
        raw_bin_counts,
        balanced: balanced.len(),
        warning,
    };
    (balanced, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{generate_simple_stairs, StairsParams, TerrainFamily};

    fn flat_terrain() -> ElevationMap {
        ElevationMap::flat(100, 100, 0.1, TerrainFamily::Composed, 0).unwrap()
    }

    fn steep_stairs() -> ElevationMap {
        generate_simple_stairs(
            3,
            &StairsParams {
                rise_range: (0.12, 0.15),
                ..StairsParams::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn all_flat_terrain_degenerates_with_warning() {
        let terrains = vec![flat_terrain()];
        let (samples, report) =
            collect_dataset(&terrains, &EmbodimentSpec::legged(), 50, 1).unwrap();
        assert_eq!(report.raw_failure, 0);
        assert!(samples.is_empty());
        assert!(report.warning.is_some());
    }

    #[test]
    fn mixed_terrain_balances_to_even_labels() {
        let terrains = vec![flat_terrain(), steep_stairs()];
        let (samples, report) =
            collect_dataset(&terrains, &EmbodimentSpec::wheeled(), 400, 2).unwrap();
        assert!(report.balanced > 50, "balanced only {}", report.balanced);
        let mean: f64 = samples.iter().map(|s| f64::from(s.label)).sum::<f64>() / samples.len() as f64;
        assert!((mean - 0.5).abs() <= 0.02, "label mean {mean}");
    }

    #[test]
    fn collect_balanced_hits_target_exactly() {
        let terrains = vec![flat_terrain(), steep_stairs()];
        let (samples, report) =
            collect_balanced(&terrains, &EmbodimentSpec::wheeled(), 200, 3).unwrap();
        assert_eq!(samples.len(), 200);
        assert!(report.warning.is_none());
    }

    #[test]
    fn heading_bins_are_uniform_chi_squared() {
        // The sampler draws the bin before rejection-sampling the position,
        // so raw bins are uniform (balancing afterwards correlates with
        // terrain difficulty by design).
        let terrains = vec![flat_terrain(), steep_stairs()];
        let (_, report) =
            collect_dataset(&terrains, &EmbodimentSpec::wheeled(), 10_000, 5).unwrap();
        assert!(report.raw_samples >= 9_900);
        let expected = report.raw_samples as f64 / HEADING_BINS as f64;
        let chi2: f64 = report
            .raw_bin_counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 7 degrees of freedom, alpha = 0.001 -> 24.32.
        assert!(chi2 < 24.32, "chi2 {chi2} over bins {:?}", report.raw_bin_counts);
    }

    #[test]
    fn collection_is_deterministic() {
        let terrains = vec![flat_terrain(), steep_stairs()];
        let (a, _) = collect_dataset(&terrains, &EmbodimentSpec::wheeled(), 100, 7).unwrap();
        let (b, _) = collect_dataset(&terrains, &EmbodimentSpec::wheeled(), 100, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn samples_are_recentred_and_centered_queries() {
        let terrains = vec![steep_stairs()];
        let (samples, _) = collect_dataset(&terrains, &EmbodimentSpec::legged(), 100, 8).unwrap();
        for s in &samples {
            assert_eq!(s.local_map.len(), CROP_CELLS * CROP_CELLS);
            // The query point sits in the center cell of its crop.
            assert!((f64::from(s.qx) - 0.5).abs() < 0.03);
            assert!((f64::from(s.qy) - 0.5).abs() < 0.03);
            // Center cell is exactly zero after re-centering.
            let mid = CROP_CELLS / 2;
            assert_eq!(s.local_map[mid * CROP_CELLS + mid], 0.0);
        }
    }
}
