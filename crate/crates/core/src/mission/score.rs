//! Path scoring (cumulative-minimum affordance) and selection.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{SelectionConfig, SelectionMode};
use crate::affordance::{snap_heading_to_bin, AffordanceModel};
use crate::error::{CoreError, Result};
use crate::pathspace::CandidatePath;
use crate::terrain::ElevationMap;

/// Score every waypoint and set the cumulative (minimum) affordance.
///
/// Per-point headings come from consecutive waypoints snapped to the eight
/// training bins; the last point reuses the previous bearing. Waypoints
/// outside the map, or too close to its edge for a crop, score 0: they are
/// untraversable by convention.
pub fn score_path(
    model: &AffordanceModel,
    map: &ElevationMap,
    path: &CandidatePath,
) -> Result<CandidatePath> {
    if path.is_empty() {
        return Err(CoreError::EmptyInput("cannot score an empty path".into()));
    }
    let bins = waypoint_heading_bins(&path.world_points);
    let mut scores = Vec::with_capacity(path.len());
    for (&(x, y), &bin) in path.world_points.iter().zip(&bins) {
        let score = match model.score_point(map, x, y, bin) {
            Ok(s) => s,
            Err(CoreError::OutOfBounds { .. }) | Err(CoreError::CropOutOfBounds { .. }) => 0.0,
            Err(other) => return Err(other),
        };
        scores.push(score);
    }
    Ok(path.clone().with_scores(scores))
}

/// Heading bin per waypoint from consecutive segment bearings.
pub(crate) fn waypoint_heading_bins(points: &[(f64, f64)]) -> Vec<u8> {
    let mut bins = Vec::with_capacity(points.len());
    let mut last_bearing = 0.0;
    for i in 0..points.len() {
        let bearing = if i + 1 < points.len() {
            let dx = points[i + 1].0 - points[i].0;
            let dy = points[i + 1].1 - points[i].1;
            if dx.abs() < 1e-12 && dy.abs() < 1e-12 {
                last_bearing
            } else {
                dy.atan2(dx)
            }
        } else {
            last_bearing
        };
        last_bearing = bearing;
        bins.push(snap_heading_to_bin(bearing));
    }
    bins
}

/// Pick a candidate among those at or above the rejection threshold.
///
/// Greedy takes the argmax (ties to the lowest index); softmax samples with
/// probability proportional to exp(score / beta), deterministic given the
/// RNG state. Errors with [`CoreError::NoFeasiblePlan`] when every candidate
/// falls below the threshold.
pub fn select_path(
    scored: &[CandidatePath],
    config: &SelectionConfig,
    rng: &mut ChaCha8Rng,
) -> Result<usize> {
    if !(config.beta > 0.0) {
        return Err(CoreError::InvalidParam("beta must be positive".into()));
    }
    let eligible: Vec<(usize, f64)> = scored
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let s = c
                .cumulative_affordance
                .expect("select_path needs scored candidates");
            (s >= config.theta_rej).then_some((i, s))
        })
        .collect();
    if eligible.is_empty() {
        return Err(CoreError::NoFeasiblePlan);
    }
    match config.mode {
        SelectionMode::Greedy => {
            let mut best = eligible[0];
            for &(i, s) in &eligible[1..] {
                if s > best.1 {
                    best = (i, s);
                }
            }
            Ok(best.0)
        }
        SelectionMode::Softmax => {
            let max = eligible.iter().map(|&(_, s)| s).fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = eligible
                .iter()
                .map(|&(_, s)| ((s - max) / config.beta).exp())
                .collect();
            let total: f64 = weights.iter().sum();
            let mut u = rng.gen::<f64>() * total;
            for (&(i, _), w) in eligible.iter().zip(&weights) {
                u -= w;
                if u <= 0.0 {
                    return Ok(i);
                }
            }
            Ok(eligible[eligible.len() - 1].0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;

    fn scored(scores: &[f64]) -> Vec<CandidatePath> {
        scores
            .iter()
            .map(|&s| CandidatePath::new(vec![(0.0, 0.0)]).with_scores(vec![s]))
            .collect()
    }

    fn cfg(mode: SelectionMode, beta: f64) -> SelectionConfig {
        SelectionConfig {
            mode,
            beta,
            theta_rej: 0.0,
        }
    }

    #[test]
    fn greedy_takes_argmax_with_low_index_ties() {
        let mut rng = seeds::stream_rng(0, "sel");
        let c = scored(&[0.9, 0.1]);
        assert_eq!(select_path(&c, &cfg(SelectionMode::Greedy, 1.0), &mut rng).unwrap(), 0);
        let tie = scored(&[0.4, 0.7, 0.7]);
        assert_eq!(select_path(&tie, &cfg(SelectionMode::Greedy, 1.0), &mut rng).unwrap(), 1);
    }

    #[test]
    fn cold_softmax_concentrates_on_the_best() {
        let mut rng = seeds::stream_rng(1, "sel");
        let c = scored(&[0.9, 0.1]);
        let config = cfg(SelectionMode::Softmax, 1e-4);
        let mut first = 0;
        for _ in 0..10_000 {
            if select_path(&c, &config, &mut rng).unwrap() == 0 {
                first += 1;
            }
        }
        assert!(first as f64 / 10_000.0 > 0.999, "{first}");
    }

    #[test]
    fn symmetric_softmax_splits_evenly() {
        let mut rng = seeds::stream_rng(2, "sel");
        let c = scored(&[0.5, 0.5]);
        let config = cfg(SelectionMode::Softmax, 0.7);
        let mut first = 0;
        for _ in 0..10_000 {
            if select_path(&c, &config, &mut rng).unwrap() == 0 {
                first += 1;
            }
        }
        let frac = first as f64 / 10_000.0;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
    }

    #[test]
    fn all_below_threshold_is_no_feasible_plan() {
        let mut rng = seeds::stream_rng(3, "sel");
        let c = scored(&[0.1, 0.2]);
        let config = SelectionConfig {
            theta_rej: 0.3,
            ..SelectionConfig::default()
        };
        assert!(matches!(
            select_path(&c, &config, &mut rng),
            Err(CoreError::NoFeasiblePlan)
        ));
    }

    #[test]
    fn greedy_invariant_under_positive_scaling() {
        let mut rng = seeds::stream_rng(4, "sel");
        let base = [0.2, 0.8, 0.5, 0.6];
        let a = select_path(&scored(&base), &cfg(SelectionMode::Greedy, 1.0), &mut rng).unwrap();
        let scaled: Vec<f64> = base.iter().map(|s| s * 0.37).collect();
        let b = select_path(&scored(&scaled), &cfg(SelectionMode::Greedy, 1.0), &mut rng).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn softmax_invariant_under_common_shift() {
        // Same RNG stream both times: the sampled index must match because
        // the selection probabilities are shift-invariant.
        let base = [0.2, 0.5, 0.4];
        let shifted: Vec<f64> = base.iter().map(|s| s + 0.3).collect();
        let config = cfg(SelectionMode::Softmax, 0.25);
        for seed in 0..50 {
            let mut rng_a = seeds::stream_rng(seed, "shift");
            let mut rng_b = seeds::stream_rng(seed, "shift");
            let a = select_path(&scored(&base), &config, &mut rng_a).unwrap();
            let b = select_path(&scored(&shifted), &config, &mut rng_b).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn heading_bins_follow_segments() {
        let bins = waypoint_heading_bins(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        // +x, +y, -x; the last point reuses the -x bearing.
        assert_eq!(bins, vec![0, 2, 4, 4]);
    }

    #[test]
    fn min_rule_dominates_every_point() {
        use rand::Rng;
        let mut rng = seeds::stream_rng(5, "minrule");
        for _ in 0..200 {
            let n = rng.gen_range(1..8);
            let scores: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            let path = CandidatePath::new(vec![(0.0, 0.0); n]).with_scores(scores.clone());
            let cum = path.cumulative_affordance.unwrap();
            assert!(scores.iter().all(|&s| cum <= s));
            // Inserting a lower point lowers (or keeps) the cumulative score.
            let mut worse = scores.clone();
            worse.push(cum - 0.1);
            let worse_path = CandidatePath::new(vec![(0.0, 0.0); n + 1]).with_scores(worse);
            assert!(worse_path.cumulative_affordance.unwrap() <= cum);
        }
    }
}
