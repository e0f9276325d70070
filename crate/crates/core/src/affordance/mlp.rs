//! A small fully-connected network trained with Adam.
//!
//! Weights train in f64 and are quantized to f32 values once training ends,
//! so the in-memory model and its AFM serialization agree bit-for-bit.

use rand_chacha::ChaCha8Rng;

use super::TrainMode;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Layer {
    pub rows: usize,
    pub cols: usize,
    /// Row-major rows x cols weight matrix.
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Mlp {
    pub layers: Vec<Layer>,
}

impl Mlp {
    /// He-initialized network; `sizes` runs input..output, output size 1.
    pub fn with_random_weights(sizes: &[usize], rng: &mut ChaCha8Rng) -> Mlp {
        assert!(sizes.len() >= 2);
        let layers = sizes
            .windows(2)
            .map(|io| {
                let (cols, rows) = (io[0], io[1]);
                let scale = (2.0 / cols as f64).sqrt();
                let w = (0..rows * cols).map(|_| normal(rng) * scale).collect();
                Layer {
                    rows,
                    cols,
                    w,
                    b: vec![0.0; rows],
                }
            })
            .collect();
        Mlp { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].cols
    }

    /// Forward pass to the raw output logit.
    pub fn logit(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.input_dim());
        let mut act = x.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            let last = i == self.layers.len() - 1;
            let mut next = vec![0.0; layer.rows];
            for r in 0..layer.rows {
                let row = &layer.w[r * layer.cols..(r + 1) * layer.cols];
                let mut sum = layer.b[r];
                for (wv, av) in row.iter().zip(act.iter()) {
                    sum += wv * av;
                }
                next[r] = if last { sum } else { sum.max(0.0) };
            }
            act = next;
        }
        act[0]
    }

    /// Round every parameter to its nearest f32 value.
    pub fn quantize_f32(&mut self) {
        for layer in &mut self.layers {
            for w in &mut layer.w {
                *w = f64::from(*w as f32);
            }
            for b in &mut layer.b {
                *b = f64::from(*b as f32);
            }
        }
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    crate::seeds::normal_sample(rng)
}

/// Per-parameter gradient accumulator matching a network's shape.
#[derive(Debug, Clone)]
pub(crate) struct Grads {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Grads {
    pub fn zeros_like(net: &Mlp) -> Grads {
        Grads {
            layers: net
                .layers
                .iter()
                .map(|l| (vec![0.0; l.w.len()], vec![0.0; l.b.len()]))
                .collect(),
        }
    }

    pub fn reset(&mut self) {
        for (w, b) in &mut self.layers {
            w.iter_mut().for_each(|v| *v = 0.0);
            b.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    pub fn scale(&mut self, k: f64) {
        for (w, b) in &mut self.layers {
            w.iter_mut().for_each(|v| *v *= k);
            b.iter_mut().for_each(|v| *v *= k);
        }
    }
}

/// Reusable forward/backward buffers.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    /// Post-activation per layer, activations[0] being the input copy.
    acts: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

/// Loss of one sample; gradients accumulate into `grads`.
pub(crate) fn accumulate_sample(
    net: &Mlp,
    x: &[f64],
    target: f64,
    mode: TrainMode,
    scratch: &mut Scratch,
    grads: &mut Grads,
) -> f64 {
    let n_layers = net.layers.len();
    if scratch.acts.len() != n_layers + 1 {
        scratch.acts = Vec::with_capacity(n_layers + 1);
        scratch.acts.push(x.to_vec());
        for l in &net.layers {
            scratch.acts.push(vec![0.0; l.rows]);
        }
        scratch.deltas = net.layers.iter().map(|l| vec![0.0; l.rows]).collect();
    } else {
        scratch.acts[0].copy_from_slice(x);
    }

    // Forward, keeping post-activations.
    for (i, layer) in net.layers.iter().enumerate() {
        let last = i == n_layers - 1;
        let (input, output) = {
            let (a, b) = scratch.acts.split_at_mut(i + 1);
            (&a[i], &mut b[0])
        };
        for r in 0..layer.rows {
            let row = &layer.w[r * layer.cols..(r + 1) * layer.cols];
            let mut sum = layer.b[r];
            for (wv, av) in row.iter().zip(input.iter()) {
                sum += wv * av;
            }
            output[r] = if last { sum } else { sum.max(0.0) };
        }
    }

    let z = scratch.acts[n_layers][0];
    let (loss, dz) = match mode {
        TrainMode::Classification => {
            // BCE with logits, numerically stable.
            let loss = z.max(0.0) - z * target + (1.0 + (-z.abs()).exp()).ln();
            (loss, sigmoid(z) - target)
        }
        TrainMode::Regression => {
            let err = z - target;
            (err * err, 2.0 * err)
        }
    };

    // Backward. ReLU derivative reads the stored post-activation.
    scratch.deltas[n_layers - 1][0] = dz;
    for i in (0..n_layers).rev() {
        let layer = &net.layers[i];
        let (gw, gb) = &mut grads.layers[i];
        // Split so the current delta is readable while writing the previous one.
        let (deltas_prev, deltas_cur) = scratch.deltas.split_at_mut(i);
        let delta = &deltas_cur[0];
        let input = &scratch.acts[i];
        for r in 0..layer.rows {
            let d = delta[r];
            if d == 0.0 {
                continue;
            }
            gb[r] += d;
            let grow = &mut gw[r * layer.cols..(r + 1) * layer.cols];
            for (g, av) in grow.iter_mut().zip(input.iter()) {
                *g += d * av;
            }
        }
        if i > 0 {
            let prev = &mut deltas_prev[i - 1];
            let prev_act = &scratch.acts[i];
            for (c, p) in prev.iter_mut().enumerate() {
                let mut sum = 0.0;
                for r in 0..layer.rows {
                    sum += delta[r] * layer.w[r * layer.cols + c];
                }
                // ReLU gate from the stored activation.
                *p = if prev_act[c] > 0.0 { sum } else { 0.0 };
            }
        }
    }
    loss
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Adam optimizer state.
#[derive(Debug)]
pub(crate) struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: i32,
    m: Grads,
    v: Grads,
}

impl Adam {
    pub fn new(net: &Mlp, lr: f64) -> Adam {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: Grads::zeros_like(net),
            v: Grads::zeros_like(net),
        }
    }

    pub fn step(&mut self, net: &mut Mlp, grads: &Grads) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t);
        let bc2 = 1.0 - self.beta2.powi(self.t);
        for (li, layer) in net.layers.iter_mut().enumerate() {
            let (gw, gb) = &grads.layers[li];
            let (mw, mb) = &mut self.m.layers[li];
            let (vw, vb) = &mut self.v.layers[li];
            update(&mut layer.w, gw, mw, vw, self.lr, self.beta1, self.beta2, self.eps, bc1, bc2);
            update(&mut layer.b, gb, mb, vb, self.lr, self.beta1, self.beta2, self.eps, bc1, bc2);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    bc1: f64,
    bc2: f64,
) {
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let mhat = m[i] / bc1;
        let vhat = v[i] / bc2;
        params[i] -= lr * mhat / (vhat.sqrt() + eps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for mode in [TrainMode::Classification, TrainMode::Regression] {
            let mut net = Mlp::with_random_weights(&[6, 4, 3, 1], &mut rng);
            let batch: Vec<(Vec<f64>, f64)> = (0..5)
                .map(|i| {
                    let x: Vec<f64> = (0..6).map(|_| normal(&mut rng)).collect();
                    (x, f64::from(i % 2 == 0))
                })
                .collect();

            let mut grads = Grads::zeros_like(&net);
            let mut scratch = Scratch::default();
            let mut total = 0.0;
            for (x, y) in &batch {
                total += accumulate_sample(&net, x, *y, mode, &mut scratch, &mut grads);
            }
            let _ = total;

            let loss_of = |net: &Mlp| -> f64 {
                let mut s = Scratch::default();
                let mut g = Grads::zeros_like(net);
                batch
                    .iter()
                    .map(|(x, y)| accumulate_sample(net, x, *y, mode, &mut s, &mut g))
                    .sum()
            };

            let h = 1e-5;
            for li in 0..net.layers.len() {
                for wi in 0..net.layers[li].w.len() {
                    let orig = net.layers[li].w[wi];
                    net.layers[li].w[wi] = orig + h;
                    let up = loss_of(&net);
                    net.layers[li].w[wi] = orig - h;
                    let down = loss_of(&net);
                    net.layers[li].w[wi] = orig;
                    let numeric = (up - down) / (2.0 * h);
                    let analytic = grads.layers[li].0[wi];
                    // Relative 1e-4; absolute slack covers ReLU-kink noise on
                    // near-zero gradients.
                    let denom = analytic.abs().max(numeric.abs()).max(1.0);
                    assert!(
                        (analytic - numeric).abs() / denom < 1e-4,
                        "{mode:?} layer {li} w{wi}: analytic {analytic} vs numeric {numeric}"
                    );
                }
                for bi in 0..net.layers[li].b.len() {
                    let orig = net.layers[li].b[bi];
                    net.layers[li].b[bi] = orig + h;
                    let up = loss_of(&net);
                    net.layers[li].b[bi] = orig - h;
                    let down = loss_of(&net);
                    net.layers[li].b[bi] = orig;
                    let numeric = (up - down) / (2.0 * h);
                    let analytic = grads.layers[li].1[bi];
                    let denom = analytic.abs().max(numeric.abs()).max(1.0);
                    assert!(
                        (analytic - numeric).abs() / denom < 1e-4,
                        "{mode:?} layer {li} b{bi}: analytic {analytic} vs numeric {numeric}"
                    );
                }
            }
        }
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(800.0), 1.0);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-15);
    }
}
