//! The affordance function: training, querying, and grid evaluation.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::mlp::{accumulate_sample, sigmoid, Adam, Grads, Mlp, Scratch};
use super::{AffordanceSample, HEADING_BINS};
use crate::error::{CoreError, Result};
use crate::seeds;
use crate::terrain::ElevationMap;

/// Default local-crop side length in cells (2.5 m at 0.1 m/cell).
pub const CROP_CELLS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    /// Binary cross-entropy on rollout success labels.
    Classification,
    /// Squared error on discounted returns.
    Regression,
}

/// Training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub mode: TrainMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: vec![128, 64],
            learning_rate: 1e-3,
            batch_size: 256,
            epochs: 20,
            mode: TrainMode::Classification,
        }
    }
}

/// Training metadata kept with the model (and mirrored in the AFM sidecar).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub seed: u64,
    pub samples: usize,
    pub initial_loss: f64,
    pub epoch_losses: Vec<f64>,
}

/// A trained affordance function.
#[derive(Debug, Clone)]
pub struct AffordanceModel {
    pub crop_cells: usize,
    pub mode: TrainMode,
    pub config: TrainConfig,
    pub report: TrainReport,
    pub(crate) net: Mlp,
}

impl AffordanceModel {
    pub fn input_dim(&self) -> usize {
        self.crop_cells * self.crop_cells + 2 + HEADING_BINS
    }

    /// Affordance score for one local crop and query.
    ///
    /// `local_map` is the re-centered crop, row-major, `crop_cells` squared
    /// entries; `(qx, qy)` the normalized query position within the crop.
    /// Classification returns the traversal probability; regression returns
    /// its predicted return squashed into [0, 1].
    pub fn query(&self, local_map: &[f32], qx: f64, qy: f64, heading_bin: u8) -> Result<f64> {
        if local_map.len() != self.crop_cells * self.crop_cells {
            return Err(CoreError::LayoutMismatch(format!(
                "crop has {} cells, model expects {}",
                local_map.len(),
                self.crop_cells * self.crop_cells
            )));
        }
        if usize::from(heading_bin) >= HEADING_BINS {
            return Err(CoreError::LayoutMismatch(format!(
                "heading bin {heading_bin} out of range"
            )));
        }
        if !(0.0..=1.0).contains(&qx) || !(0.0..=1.0).contains(&qy) {
            return Err(CoreError::LayoutMismatch(format!(
                "query ({qx}, {qy}) outside [0,1]^2"
            )));
        }
        let x = assemble_features(local_map, qx, qy, heading_bin);
        let z = self.net.logit(&x);
        Ok(match self.mode {
            TrainMode::Classification => sigmoid(z),
            TrainMode::Regression => (1.0 + z).clamp(0.0, 1.0),
        })
    }

    /// Score a world point by cropping the map around it.
    ///
    /// Errors when the crop window does not fit the map.
    pub fn score_point(&self, map: &ElevationMap, x: f64, y: f64, heading_bin: u8) -> Result<f64> {
        let crop = map.crop_local(x, y, self.crop_cells)?;
        let span = self.crop_cells as f64 * map.resolution();
        let qx = (x - crop.origin().0) / span;
        let qy = (y - crop.origin().1) / span;
        self.query(crop.heights(), qx.clamp(0.0, 1.0), qy.clamp(0.0, 1.0), heading_bin)
    }
}

pub(crate) fn assemble_features(local_map: &[f32], qx: f64, qy: f64, heading_bin: u8) -> Vec<f64> {
    let mut x = Vec::with_capacity(local_map.len() + 2 + HEADING_BINS);
    x.extend(local_map.iter().map(|&h| f64::from(h)));
    x.push(qx);
    x.push(qy);
    for bin in 0..HEADING_BINS {
        x.push(f64::from(bin == usize::from(heading_bin)));
    }
    x
}

fn sample_features(s: &AffordanceSample) -> Vec<f64> {
    assemble_features(&s.local_map, f64::from(s.qx), f64::from(s.qy), s.heading_bin)
}

/// Train an affordance model. Deterministic given (dataset, config, seed).
pub fn train(dataset: &[AffordanceSample], config: &TrainConfig, seed: u64) -> Result<AffordanceModel> {
    if dataset.is_empty() {
        return Err(CoreError::EmptyInput("training dataset is empty".into()));
    }
    let crop_cells = dataset[0].crop_cells;
    if dataset.iter().any(|s| s.crop_cells != crop_cells) {
        return Err(CoreError::LayoutMismatch("mixed crop sizes in dataset".into()));
    }
    let input_dim = crop_cells * crop_cells + 2 + HEADING_BINS;

    let mut sizes = vec![input_dim];
    sizes.extend_from_slice(&config.hidden);
    sizes.push(1);

    let mut init_rng = seeds::stream_rng(seed, "train/init");
    let mut net = Mlp::with_random_weights(&sizes, &mut init_rng);
    let mut adam = Adam::new(&net, config.learning_rate);

    let features: Vec<Vec<f64>> = dataset.iter().map(sample_features).collect();
    let targets: Vec<f64> = dataset
        .iter()
        .map(|s| match config.mode {
            TrainMode::Classification => f64::from(s.label),
            TrainMode::Regression => f64::from(s.return_value),
        })
        .collect();

    let mut scratch = Scratch::default();
    let mut grads = Grads::zeros_like(&net);

    // Mean loss at initialization, for the improvement contract.
    let initial_loss = {
        let mut g = Grads::zeros_like(&net);
        let total: f64 = features
            .iter()
            .zip(&targets)
            .map(|(x, &y)| accumulate_sample(&net, x, y, config.mode, &mut scratch, &mut g))
            .sum();
        total / dataset.len() as f64
    };

    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut shuffle_rng = seeds::stream_rng(seed, "train/shuffle");
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size.max(1)) {
            grads.reset();
            let mut batch_loss = 0.0;
            for &i in batch {
                batch_loss +=
                    accumulate_sample(&net, &features[i], targets[i], config.mode, &mut scratch, &mut grads);
            }
            if !batch_loss.is_finite() {
                return Err(CoreError::Diverged(format!(
                    "non-finite loss in epoch {epoch}"
                )));
            }
            grads.scale(1.0 / batch.len() as f64);
            adam.step(&mut net, &grads);
            epoch_loss += batch_loss;
        }
        epoch_losses.push(epoch_loss / dataset.len() as f64);
    }

    net.quantize_f32();
    Ok(AffordanceModel {
        crop_cells,
        mode: config.mode,
        config: config.clone(),
        report: TrainReport {
            seed,
            samples: dataset.len(),
            initial_loss,
            epoch_losses,
        },
        net,
    })
}

/// A scored lattice over a map, aligned with its cells at a fixed stride.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffordanceGrid {
    pub width: usize,
    pub height: usize,
    pub stride: usize,
    /// Row-major scores; cells whose crop window leaves the map score 0.
    pub values: Vec<f32>,
}

impl AffordanceGrid {
    /// Mean score over the lattice points falling inside a world rectangle.
    pub fn region_mean(&self, map: &ElevationMap, x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for gy in 0..self.height {
            for gx in 0..self.width {
                let (wx, wy) = map.cell_center(gx * self.stride, gy * self.stride);
                if wx >= x0 && wx < x1 && wy >= y0 && wy < y1 {
                    sum += f64::from(self.values[gy * self.width + gx]);
                    n += 1;
                }
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// Evaluate the model on a cell lattice for heatmap export.
pub fn affordance_grid(
    model: &AffordanceModel,
    map: &ElevationMap,
    heading_bin: u8,
    stride: usize,
) -> Result<AffordanceGrid> {
    if stride == 0 {
        return Err(CoreError::InvalidParam("stride must be >= 1".into()));
    }
    let width = map.width_cells().div_ceil(stride);
    let height = map.height_cells().div_ceil(stride);
    let mut values = Vec::with_capacity(width * height);
    for gy in 0..height {
        for gx in 0..width {
            let (x, y) = map.cell_center(gx * stride, gy * stride);
            let score = if map.crop_fits(x, y, model.crop_cells) {
                model.score_point(map, x, y, heading_bin)? as f32
            } else {
                0.0
            };
            values.push(score);
        }
    }
    Ok(AffordanceGrid {
        width,
        height,
        stride,
        values,
    })
}
