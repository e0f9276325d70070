//! The offline training-data pipeline: hindsight labeling of odometry logs
//! into pixel-path examples, curvature filtering, horizon mixing, and the
//! trajectory metric suite.

pub mod metrics;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::embodiment::AgentState;
use crate::error::{CoreError, Result};
use crate::pathspace::{curvature, format_goal_prompt, CameraModel};
use crate::seeds;

/// Log sampling rate, Hz.
pub const LOG_HZ: f64 = 10.0;
/// Points kept per labeled example.
pub const LABEL_POINTS: usize = 5;

/// One ground pose of the robot.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OdomPose {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Ground-contact height.
    pub z: f64,
    pub heading: f64,
}

/// A time-ordered ground-pose stream with its camera rig.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OdometryLog {
    pub poses: Vec<OdomPose>,
    /// Camera mount height above the ground pose, meters.
    pub camera_height: f64,
    /// Camera downward pitch, radians.
    pub camera_pitch: f64,
    pub provenance: String,
}

impl OdometryLog {
    pub fn new(poses: Vec<OdomPose>, camera_height: f64, camera_pitch: f64, provenance: &str) -> Result<Self> {
        if poses.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(CoreError::InvalidParam(
                "log timestamps must strictly increase".into(),
            ));
        }
        Ok(Self {
            poses,
            camera_height,
            camera_pitch,
            provenance: provenance.to_string(),
        })
    }

    /// The camera rig at a log frame.
    pub fn camera_at(&self, frame: usize) -> CameraModel {
        let p = self.poses[frame];
        CameraModel::standard([p.x, p.y, p.z + self.camera_height], p.heading, self.camera_pitch)
    }
}

/// Resample a mission trace into a 10 Hz odometry log (pose z is the ground
/// height, body ride height removed).
pub fn log_from_trace(
    trace: &[AgentState],
    ride_height: f64,
    camera_height: f64,
    camera_pitch: f64,
    provenance: &str,
) -> Result<OdometryLog> {
    if trace.is_empty() {
        return Err(CoreError::EmptyInput("empty trace".into()));
    }
    let period = 1.0 / LOG_HZ;
    let mut poses = Vec::new();
    let mut next_t = trace[0].t;
    for s in trace {
        if s.t + 1e-9 >= next_t {
            poses.push(OdomPose {
                t: s.t,
                x: s.x,
                y: s.y,
                z: s.z - ride_height,
                heading: s.heading,
            });
            next_t = s.t + period;
        }
    }
    OdometryLog::new(poses, camera_height, camera_pitch, provenance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonTag {
    Short,
    Long,
}

/// One hindsight-labeled training example.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledExample {
    pub frame: usize,
    /// Five normalized pixel points; out-of-frame points are `None`.
    pub pixel_path: Vec<Option<(f64, f64)>>,
    pub goal: (f64, f64),
    pub horizon: HorizonTag,
    pub horizon_m: f64,
    pub curvature: f64,
    /// The log ended before the requested horizon.
    pub truncated: bool,
    pub prompt: String,
}

/// Label one frame by projecting the robot's future ground poses into that
/// frame's camera and subsampling five points.
pub fn hindsight_label(
    log: &OdometryLog,
    frame: usize,
    horizon_m: f64,
    tag: HorizonTag,
) -> Result<LabeledExample> {
    if frame + 2 >= log.poses.len() {
        return Err(CoreError::InvalidParam(format!(
            "frame {frame} has fewer than 2 future poses"
        )));
    }
    // Future poses until the traveled distance reaches the horizon.
    let mut future: Vec<OdomPose> = Vec::new();
    let mut dist = 0.0;
    let mut truncated = true;
    for w in log.poses[frame..].windows(2) {
        dist += ((w[1].x - w[0].x).powi(2) + (w[1].y - w[0].y).powi(2)).sqrt();
        future.push(w[1]);
        if dist >= horizon_m {
            truncated = false;
            break;
        }
    }
    if future.len() < 2 {
        return Err(CoreError::InvalidParam(
            "fewer than 2 future poses within the horizon".into(),
        ));
    }
    let ground: Vec<(f64, f64)> = future.iter().map(|p| (p.x, p.y)).collect();
    let curvature = curvature(&ground)
        .map_err(|_| CoreError::InvalidParam("stationary log: no displacement".into()))?;

    // Project everything, then subsample among the in-frame poses (the
    // near-field of the camera is blind below the image bottom).
    let camera = log.camera_at(frame);
    let visible: Vec<(f64, f64)> = future
        .iter()
        .filter_map(|p| camera.project_to_pixel([p.x, p.y, p.z]))
        .collect();
    if visible.len() < 2 {
        return Err(CoreError::Unusable(format!(
            "frame {frame}: fewer than 2 future poses in frame"
        )));
    }
    let picks = subsample_indices(visible.len(), LABEL_POINTS);
    let pixel_path: Vec<Option<(f64, f64)>> = picks.iter().map(|&i| Some(visible[i])).collect();
    let goal = visible[visible.len() - 1];
    Ok(LabeledExample {
        frame,
        pixel_path,
        goal,
        horizon: tag,
        horizon_m,
        curvature,
        truncated,
        prompt: format_goal_prompt(goal.0, goal.1)?,
    })
}

/// Uniform index subsample covering both endpoints.
fn subsample_indices(len: usize, count: usize) -> Vec<usize> {
    if len <= count {
        return (0..len).collect();
    }
    (0..count)
        .map(|i| ((i as f64) * (len - 1) as f64 / (count - 1) as f64).round() as usize)
        .collect()
}

/// Drop the top `outlier_frac` by curvature as odometry noise, then keep the
/// `keep_n` most curved of the remainder (most salient first). Ties keep
/// input order.
pub fn curvature_filter(
    examples: Vec<LabeledExample>,
    keep_n: usize,
    outlier_frac: f64,
) -> (Vec<LabeledExample>, Option<String>) {
    let mut ranked = examples;
    ranked.sort_by(|a, b| b.curvature.partial_cmp(&a.curvature).expect("finite curvature"));
    let drop = ((ranked.len() as f64) * outlier_frac).floor() as usize;
    let remainder = ranked.split_off(drop.min(ranked.len()));
    let mut kept = remainder;
    let warning = if keep_n > kept.len() {
        Some(format!(
            "requested {keep_n} examples but only {} remain after outlier filtering",
            kept.len()
        ))
    } else {
        kept.truncate(keep_n);
        None
    };
    (kept, warning)
}

/// Horizon-mix statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixReport {
    pub short: usize,
    pub long: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Label frames at two horizons, interleaved 1:1.
///
/// Frames are visited in a seeded shuffle; the requested tag alternates per
/// emitted example. A long request that the log cannot satisfy untruncated
/// falls back to a short label, so short logs come out all-short with a
/// ratio warning.
pub fn mix_horizons(
    log: &OdometryLog,
    h_short: f64,
    h_long: f64,
    max_examples: usize,
    seed: u64,
) -> Result<(Vec<LabeledExample>, MixReport)> {
    if !(h_short < h_long) {
        return Err(CoreError::InvalidParam(format!(
            "short horizon {h_short} must be below long horizon {h_long}"
        )));
    }
    use rand::seq::SliceRandom;
    let mut frames: Vec<usize> = (0..log.poses.len().saturating_sub(2)).collect();
    let mut rng = seeds::stream_rng(seed, "datapipe/mix");
    frames.shuffle(&mut rng);

    // A log that cannot serve any untruncated long label emits all-short.
    let long_possible = frames.iter().any(|&f| {
        matches!(hindsight_label(log, f, h_long, HorizonTag::Long), Ok(e) if !e.truncated)
    });

    let mut out = Vec::new();
    let (mut short, mut long) = (0usize, 0usize);
    let mut want_long = false;
    for frame in frames {
        if out.len() >= max_examples {
            break;
        }
        let example = if long_possible && want_long {
            // Strict alternation: a frame that cannot serve the long
            // horizon is skipped, not downgraded.
            match hindsight_label(log, frame, h_long, HorizonTag::Long) {
                Ok(e) if !e.truncated => e,
                _ => continue,
            }
        } else {
            match hindsight_label(log, frame, h_short, HorizonTag::Short) {
                Ok(e) => e,
                _ => continue,
            }
        };
        match example.horizon {
            HorizonTag::Short => short += 1,
            HorizonTag::Long => long += 1,
        }
        want_long = !want_long;
        out.push(example);
    }
    let warning = (short.abs_diff(long) > 1).then(|| {
        format!("horizon ratio off balance: {short} short vs {long} long")
    });
    Ok((out, MixReport { short, long, warning }))
}

/// JSON-lines export of labeled examples.
pub fn write_examples_jsonl<W: Write>(examples: &[LabeledExample], mut w: W) -> Result<()> {
    for e in examples {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A straight walk along +x on flat ground.
    fn straight_log(n: usize) -> OdometryLog {
        let poses = (0..n)
            .map(|i| OdomPose {
                t: i as f64 / LOG_HZ,
                x: i as f64 * 0.1,
                y: 0.0,
                z: 0.0,
                heading: 0.0,
            })
            .collect();
        OdometryLog::new(poses, 0.6, 20.0_f64.to_radians(), "test").unwrap()
    }

    #[test]
    fn straight_log_labels_toward_principal_column() {
        let log = straight_log(120);
        let example = hindsight_label(&log, 0, 5.0, HorizonTag::Short).unwrap();
        assert_eq!(example.pixel_path.len(), 5);
        assert!(!example.truncated);
        let points: Vec<(f64, f64)> = example.pixel_path.iter().map(|p| p.unwrap()).collect();
        for p in &points {
            assert!((p.0 - 0.5).abs() < 1e-9, "straight path stays on the principal column");
        }
        // Farther points sit higher in the image (smaller v).
        for pair in points.windows(2) {
            assert!(pair[1].1 < pair[0].1);
        }
        assert!((example.curvature - 1.0).abs() < 1e-9);
        assert!(example.prompt.starts_with("Navigate to x=<loc0512>"));
    }

    #[test]
    fn stationary_log_errors() {
        let poses = (0..40)
            .map(|i| OdomPose {
                t: i as f64 / LOG_HZ,
                x: 1.0,
                y: 1.0,
                z: 0.0,
                heading: 0.0,
            })
            .collect();
        let log = OdometryLog::new(poses, 0.6, 0.3, "test").unwrap();
        assert!(hindsight_label(&log, 0, 5.0, HorizonTag::Short).is_err());
    }

    #[test]
    fn horizon_past_log_end_flags_truncation() {
        let log = straight_log(30);
        let example = hindsight_label(&log, 0, 50.0, HorizonTag::Long).unwrap();
        assert!(example.truncated);
        assert_eq!(example.pixel_path.len(), 5);
    }

    #[test]
    fn curvature_filter_matches_rank_arithmetic() {
        // 100 examples with curvature 1.00..1.99.
        let log = straight_log(200);
        let template = hindsight_label(&log, 0, 5.0, HorizonTag::Short).unwrap();
        let examples: Vec<LabeledExample> = (0..100)
            .map(|i| {
                let mut e = template.clone();
                e.curvature = 1.0 + i as f64 / 100.0;
                e
            })
            .collect();
        let (kept, warning) = curvature_filter(examples, 10, 0.03);
        assert!(warning.is_none());
        assert_eq!(kept.len(), 10);
        let values: Vec<f64> = kept.iter().map(|e| e.curvature).collect();
        assert_eq!(values[0], 1.96);
        assert_eq!(values[9], 1.87);
    }

    #[test]
    fn curvature_filter_zero_outliers_is_pure_top_n() {
        let log = straight_log(200);
        let template = hindsight_label(&log, 0, 5.0, HorizonTag::Short).unwrap();
        let examples: Vec<LabeledExample> = (0..20)
            .map(|i| {
                let mut e = template.clone();
                e.curvature = 1.0 + i as f64;
                e
            })
            .collect();
        let (kept, _) = curvature_filter(examples, 5, 0.0);
        assert_eq!(kept[0].curvature, 20.0);
        assert_eq!(kept.len(), 5);
    }

    #[test]
    fn curvature_filter_warns_when_keep_exceeds_remainder() {
        let log = straight_log(200);
        let template = hindsight_label(&log, 0, 5.0, HorizonTag::Short).unwrap();
        let examples = vec![template; 5];
        let (kept, warning) = curvature_filter(examples, 10, 0.0);
        assert_eq!(kept.len(), 5);
        assert!(warning.is_some());
    }

    #[test]
    fn mix_emits_even_ratio_on_long_logs() {
        let log = straight_log(400); // 40 m of travel
        let (examples, report) = mix_horizons(&log, 5.0, 15.0, 100, 9).unwrap();
        assert_eq!(examples.len(), 100);
        assert_eq!(report.short, 50);
        assert_eq!(report.long, 50);
        assert!(report.warning.is_none());
    }

    #[test]
    fn mix_on_short_log_falls_back_to_short() {
        let log = straight_log(60); // < 6 m of travel
        let (examples, report) = mix_horizons(&log, 2.0, 15.0, 40, 9).unwrap();
        assert!(!examples.is_empty());
        assert_eq!(report.long, 0);
        assert!(report.warning.is_some());
    }

    #[test]
    fn mix_is_deterministic_given_seed() {
        let log = straight_log(300);
        let (a, _) = mix_horizons(&log, 5.0, 15.0, 60, 4).unwrap();
        let (b, _) = mix_horizons(&log, 5.0, 15.0, 60, 4).unwrap();
        let frames_a: Vec<usize> = a.iter().map(|e| e.frame).collect();
        let frames_b: Vec<usize> = b.iter().map(|e| e.frame).collect();
        assert_eq!(frames_a, frames_b);
    }

    #[test]
    fn authored_pixel_path_round_trips_through_the_pipeline() {
        // Author five pixels, lift them to the ground plane, log the ground
        // path, and re-label: the original pixels come back.
        let camera_height = 0.6;
        let camera_pitch = 20.0_f64.to_radians();
        let camera = CameraModel::standard([0.0, 0.0, camera_height], 0.0, camera_pitch);
        let authored = [
            (0.50, 0.95),
            (0.52, 0.85),
            (0.48, 0.78),
            (0.50, 0.72),
            (0.50, 0.68),
        ];
        let ground: Vec<(f64, f64)> = authored
            .iter()
            .map(|&(u, v)| camera.backproject_to_ground(u, v).expect("below horizon"))
            .collect();

        let mut poses = vec![OdomPose {
            t: 0.0,
            x: 0.0,
            y: 0.0,
            z: 0.0,
            heading: 0.0,
        }];
        for (i, &(x, y)) in ground.iter().enumerate() {
            poses.push(OdomPose {
                t: (i + 1) as f64 / LOG_HZ,
                x,
                y,
                z: 0.0,
                heading: 0.0,
            });
        }
        let log = OdometryLog::new(poses, camera_height, camera_pitch, "authored").unwrap();
        let example = hindsight_label(&log, 0, 1e6, HorizonTag::Long).unwrap();
        for (got, want) in example.pixel_path.iter().zip(authored.iter()) {
            let got = got.expect("in frame");
            assert!(
                (got.0 - want.0).abs() < 1e-6 && (got.1 - want.1).abs() < 1e-6,
                "{got:?} vs {want:?}"
            );
        }
    }

    #[test]
    fn jsonl_export_emits_one_line_each() {
        let log = straight_log(100);
        let examples: Vec<LabeledExample> = (0..4)
            .map(|f| hindsight_label(&log, f, 5.0, HorizonTag::Short).unwrap())
            .collect();
        let mut buf = Vec::new();
        write_examples_jsonl(&examples, &mut buf).unwrap();
        assert_eq!(buf.split(|&b| b == b'\n').filter(|l| !l.is_empty()).count(), 4);
        let first: LabeledExample =
            serde_json::from_slice(buf.split(|&b| b == b'\n').next().unwrap()).unwrap();
        assert_eq!(first.frame, 0);
    }
}
