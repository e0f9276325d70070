//! Offline trajectory similarity metrics.
//!
//! Pointwise L2 metrics require equal-length paths; discrete Fréchet and
//! normalized DTW accept any non-empty pair, with "full" variants comparing
//! a 5-point prediction against the dense reference.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::pathspace::dist;

type P = (f64, f64);

fn check_nonempty(a: &[P], b: &[P]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(CoreError::EmptyInput("metric on empty path".into()));
    }
    Ok(())
}

fn check_equal_len(a: &[P], b: &[P]) -> Result<()> {
    check_nonempty(a, b)?;
    if a.len() != b.len() {
        return Err(CoreError::InvalidParam(format!(
            "pointwise metric needs equal lengths, got {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Mean pointwise distance.
pub fn mean_l2(a: &[P], b: &[P]) -> Result<f64> {
    check_equal_len(a, b)?;
    Ok(a.iter().zip(b).map(|(&x, &y)| dist(x, y)).sum::<f64>() / a.len() as f64)
}

/// Max pointwise distance.
pub fn max_l2(a: &[P], b: &[P]) -> Result<f64> {
    check_equal_len(a, b)?;
    Ok(a.iter().zip(b).map(|(&x, &y)| dist(x, y)).fold(0.0, f64::max))
}

/// Distance between the final points.
pub fn last_point_error(a: &[P], b: &[P]) -> Result<f64> {
    check_equal_len(a, b)?;
    Ok(dist(a[a.len() - 1], b[b.len() - 1]))
}

/// Discrete Fréchet distance by dynamic programming.
pub fn frechet(a: &[P], b: &[P]) -> Result<f64> {
    check_nonempty(a, b)?;
    let (n, m) = (a.len(), b.len());
    let mut dp = vec![0.0f64; n * m];
    for i in 0..n {
        for j in 0..m {
            let d = dist(a[i], b[j]);
            let reach = match (i, j) {
                (0, 0) => d,
                (_, 0) => dp[(i - 1) * m].max(d),
                (0, _) => dp[j - 1].max(d),
                (_, _) => {
                    let pred = dp[(i - 1) * m + j]
                        .min(dp[(i - 1) * m + j - 1])
                        .min(dp[i * m + j - 1]);
                    pred.max(d)
                }
            };
            dp[i * m + j] = reach;
        }
    }
    Ok(dp[n * m - 1])
}

/// DTW cost and the length of its optimal warping path.
///
/// Among minimum-cost alignments the shortest path length is taken, making
/// the normalization denominator well defined.
pub fn dtw(a: &[P], b: &[P]) -> Result<(f64, usize)> {
    check_nonempty(a, b)?;
    let (n, m) = (a.len(), b.len());
    // (cost, steps) with lexicographic minimization.
    let mut dp = vec![(f64::INFINITY, usize::MAX); n * m];
    for i in 0..n {
        for j in 0..m {
            let d = dist(a[i], b[j]);
            let cell = match (i, j) {
                (0, 0) => (d, 1),
                (_, 0) => {
                    let p = dp[(i - 1) * m];
                    (d + p.0, p.1 + 1)
                }
                (0, _) => {
                    let p = dp[j - 1];
                    (d + p.0, p.1 + 1)
                }
                (_, _) => {
                    let mut best = dp[(i - 1) * m + j];
                    for cand in [dp[(i - 1) * m + j - 1], dp[i * m + j - 1]] {
                        if cand.0 < best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                            best = cand;
                        }
                    }
                    (d + best.0, best.1 + 1)
                }
            };
            dp[i * m + j] = cell;
        }
    }
    Ok(dp[n * m - 1])
}

/// DTW cost divided by its warping-path length.
pub fn dtw_normalized(a: &[P], b: &[P]) -> Result<f64> {
    let (cost, steps) = dtw(a, b)?;
    Ok(cost / steps as f64)
}

/// One metric-report line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricRow {
    pub model: String,
    pub dataset: String,
    pub metric: String,
    pub value: f64,
}

/// The full suite for one prediction against subsampled and dense references.
pub fn metric_suite(pred: &[P], reference_sub: &[P], reference_full: &[P]) -> Result<Vec<(String, f64)>> {
    Ok(vec![
        ("mean_l2".into(), mean_l2(pred, reference_sub)?),
        ("max_l2".into(), max_l2(pred, reference_sub)?),
        ("last_point_error".into(), last_point_error(pred, reference_sub)?),
        ("frechet_sub".into(), frechet(pred, reference_sub)?),
        ("frechet_full".into(), frechet(pred, reference_full)?),
        ("dtw_sub".into(), dtw_normalized(pred, reference_sub)?),
        ("dtw_full".into(), dtw_normalized(pred, reference_full)?),
    ])
}

/// CSV with one row per (model, dataset, metric).
pub fn write_metrics_csv<W: Write>(rows: &[MetricRow], mut w: W) -> Result<()> {
    writeln!(w, "model,dataset,metric,value")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.model, r.dataset, r.metric, r.value)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn identical_paths_score_zero_everywhere() {
        let p: Vec<P> = (0..5).map(|i| (i as f64, (i * i) as f64 * 0.1)).collect();
        for (name, v) in metric_suite(&p, &p, &p).unwrap() {
            assert_eq!(v, 0.0, "{name}");
        }
    }

    #[test]
    fn constant_offset_paths_score_the_offset() {
        let a: Vec<P> = (0..5).map(|i| (i as f64, 0.0)).collect();
        let b: Vec<P> = (0..5).map(|i| (i as f64, 0.2)).collect();
        assert!((mean_l2(&a, &b).unwrap() - 0.2).abs() < 1e-12);
        assert!((max_l2(&a, &b).unwrap() - 0.2).abs() < 1e-12);
        assert!((last_point_error(&a, &b).unwrap() - 0.2).abs() < 1e-12);
        assert!((frechet(&a, &b).unwrap() - 0.2).abs() < 1e-12);
        assert!((dtw_normalized(&a, &b).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn pointwise_metrics_reject_length_mismatch() {
        let a: Vec<P> = vec![(0.0, 0.0), (1.0, 0.0)];
        let b: Vec<P> = vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)];
        assert!(mean_l2(&a, &b).is_err());
        assert!(max_l2(&a, &b).is_err());
        assert!(last_point_error(&a, &b).is_err());
        assert!(frechet(&a, &b).is_ok());
        assert!(dtw_normalized(&a, &b).is_ok());
    }

    #[test]
    fn metrics_are_nonnegative_and_symmetric() {
        let mut rng = crate::seeds::stream_rng(6, "metric");
        for _ in 0..100 {
            let n = rng.gen_range(2..8);
            let m = rng.gen_range(2..8);
            let a: Vec<P> = (0..n).map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect();
            let b: Vec<P> = (0..m).map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect();
            let f_ab = frechet(&a, &b).unwrap();
            let f_ba = frechet(&b, &a).unwrap();
            assert!(f_ab >= 0.0);
            assert_eq!(f_ab.to_bits(), f_ba.to_bits(), "frechet symmetric");
            let d_ab = dtw(&a, &b).unwrap();
            let d_ba = dtw(&b, &a).unwrap();
            assert!(d_ab.0 >= 0.0);
            assert_eq!(d_ab.0.to_bits(), d_ba.0.to_bits(), "dtw symmetric");
            assert_eq!(d_ab.1, d_ba.1);

            // Hausdorff lower-bounds the Frechet distance.
            let hausdorff_one_way = |p: &[P], q: &[P]| {
                p.iter()
                    .map(|&x| q.iter().map(|&y| dist(x, y)).fold(f64::INFINITY, f64::min))
                    .fold(0.0, f64::max)
            };
            let h = hausdorff_one_way(&a, &b).max(hausdorff_one_way(&b, &a));
            assert!(f_ab >= h - 1e-12, "frechet {f_ab} below hausdorff {h}");
        }
    }

    #[test]
    fn csv_report_has_one_line_per_row() {
        let rows = vec![
            MetricRow {
                model: "m1".into(),
                dataset: "d1".into(),
                metric: "mean_l2".into(),
                value: 0.25,
            },
            MetricRow {
                model: "m1".into(),
                dataset: "d1".into(),
                metric: "frechet_sub".into(),
                value: 0.5,
            },
        ];
        let mut buf = Vec::new();
        write_metrics_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("m1,d1,mean_l2,0.25"));
    }
}
