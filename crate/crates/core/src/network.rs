//! Dense feedforward network with ReLU hidden layers and a linear output.
//!
//! Weights are row-major `(outputs, inputs)`. The loss throughout is squared
//! error on a single scalar output; batch losses and gradients are means over
//! the batch.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Activation {
    Relu,
    Linear,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => relu(x),
            Activation::Linear => x,
        }
    }

    /// Derivative w.r.t. the pre-activation. ReLU uses 0 at the kink.
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Linear => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Linear => "linear",
        }
    }
}

pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    fn forward_into(&self, input: &[f64], pre: &mut Vec<f64>, post: &mut Vec<f64>) {
        pre.clear();
        post.clear();
        for (row, &b) in self.weights.chunks_exact(self.inputs).zip(&self.biases) {
            let z = row.iter().zip(input).fold(b, |acc, (w, x)| acc + w * x);
            pre.push(z);
            post.push(self.activation.apply(z));
        }
    }
}

/// Pre- and post-activation values of every layer for one input.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ForwardCache {
    /// `activations[0]` is the input; `activations[k + 1]` is layer `k`'s output.
    pub activations: Vec<Vec<f64>>,
    pub pre_activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> f64 {
        self.activations.last().map_or(0.0, |a| a[0])
    }
}

/// Parameter-shaped buffers: gradients, or optimizer accumulators.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Self {
            weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            biases: net.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
        }
    }

    pub fn fill_zero(&mut self) {
        self.weights
            .iter_mut()
            .chain(self.biases.iter_mut())
            .for_each(|v| v.fill(0.0));
    }

    pub fn scale(&mut self, factor: f64) {
        self.weights
            .iter_mut()
            .chain(self.biases.iter_mut())
            .flat_map(|v| v.iter_mut())
            .for_each(|g| *g *= factor);
    }

    pub fn matches(&self, net: &Network) -> bool {
        self.weights.len() == net.layers.len()
            && self.biases.len() == net.layers.len()
            && net
                .layers
                .iter()
                .zip(&self.weights)
                .all(|(l, w)| w.len() == l.weights.len())
            && net
                .layers
                .iter()
                .zip(&self.biases)
                .all(|(l, b)| b.len() == l.biases.len())
    }

    /// All values, weights of every layer first, then biases.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights.iter().chain(&self.biases).flat_map(|v| v.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layers: Vec<DenseLayer>,
}

impl Network {
    /// He-style uniform init in `±sqrt(6 / fan_in)`, zero biases. Hidden layers
    /// use ReLU and the last layer is linear.
    pub fn init(layer_dims: &[usize], seed: u64) -> Result<Self> {
        if layer_dims.len() < 2 {
            return Err(Error::BadDims(format!(
                "need at least 2 dims, got {}",
                layer_dims.len()
            )));
        }
        if layer_dims.contains(&0) {
            return Err(Error::BadDims(format!("dims must be positive: {layer_dims:?}")));
        }
        let mut rng = SplitMix64::stream(seed, 0x1417);
        let n = layer_dims.len() - 1;
        let layers = layer_dims
            .windows(2)
            .enumerate()
            .map(|(k, pair)| {
                let (inputs, outputs) = (pair[0], pair[1]);
                let bound = libm::sqrt(6.0 / inputs as f64);
                DenseLayer {
                    inputs,
                    outputs,
                    weights: (0..inputs * outputs).map(|_| rng.uniform(-bound, bound)).collect(),
                    biases: vec![0.0; outputs],
                    activation: if k + 1 == n {
                        Activation::Linear
                    } else {
                        Activation::Relu
                    },
                }
            })
            .collect();
        Ok(Self { layers })
    }

    /// Builds a network from explicit layers, checking shapes and activations.
    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        let last = layers.last().ok_or_else(|| Error::BadDims("no layers".into()))?;
        if last.outputs != 1 || last.activation != Activation::Linear {
            return Err(Error::BadDims("output layer must be a single linear unit".into()));
        }
        for (k, l) in layers.iter().enumerate() {
            if l.inputs == 0 || l.outputs == 0 {
                return Err(Error::BadDims(format!("layer {k} has a zero dimension")));
            }
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::BadDims(format!("layer {k} parameter count mismatch")));
            }
            if k + 1 < layers.len() && l.outputs != layers[k + 1].inputs {
                return Err(Error::BadDims(format!("layer {k} outputs do not feed layer {}", k + 1)));
            }
        }
        Ok(Self { layers })
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.layers.len() + 1);
        dims.push(self.input_dim());
        dims.extend(self.layers.iter().map(|l| l.outputs));
        dims
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.inputs)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn forward(&self, input: &[f64]) -> Result<(f64, ForwardCache)> {
        let mut cache = ForwardCache::default();
        self.forward_cached(input, &mut cache)?;
        Ok((cache.output(), cache))
    }

    /// Forward pass writing into a reusable cache.
    pub fn forward_cached(&self, input: &[f64], cache: &mut ForwardCache) -> Result<f64> {
        if input.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: input.len(),
            });
        }
        let n = self.layers.len();
        cache.activations.resize_with(n + 1, Vec::new);
        cache.pre_activations.resize_with(n, Vec::new);
        cache.activations[0].clear();
        cache.activations[0].extend_from_slice(input);
        for (k, layer) in self.layers.iter().enumerate() {
            let (done, rest) = cache.activations.split_at_mut(k + 1);
            layer.forward_into(&done[k], &mut cache.pre_activations[k], &mut rest[0]);
        }
        Ok(cache.output())
    }

    pub fn predict(&self, input: &[f64]) -> Result<f64> {
        self.forward(input).map(|(y, _)| y)
    }

    /// Gradient of `(y - target)²` for the cached sample.
    pub fn backward(&self, cache: &ForwardCache, target: f64) -> Result<Gradients> {
        let mut grads = Gradients::zeros_like(self);
        self.accumulate_gradients(cache, 2.0 * (cache.output() - target), &mut grads)?;
        Ok(grads)
    }

    /// Adds `d_output · ∂y/∂θ` into `grads`.
    pub fn accumulate_gradients(&self, cache: &ForwardCache, d_output: f64, grads: &mut Gradients) -> Result<()> {
        let n = self.layers.len();
        let cache_ok =
            cache.activations.len() == n + 1
                && cache.pre_activations.len() == n
                && self.layers.iter().enumerate().all(|(k, l)| {
                    cache.activations[k].len() == l.inputs && cache.pre_activations[k].len() == l.outputs
                });
        if !cache_ok {
            return Err(Error::StaleCache);
        }
        if !grads.matches(self) {
            return Err(Error::ShapeMismatch);
        }
        // delta holds ∂loss/∂(pre-activation) of the current layer.
        let mut delta: Vec<f64> = vec![
            d_output
                * self.layers[n - 1]
                    .activation
                    .derivative(cache.pre_activations[n - 1][0]),
        ];
        let mut next = Vec::new();
        for k in (0..n).rev() {
            let layer = &self.layers[k];
            let input = &cache.activations[k];
            let gw = &mut grads.weights[k];
            let gb = &mut grads.biases[k];
            for (o, &d) in delta.iter().enumerate() {
                gb[o] += d;
                if d != 0.0 {
                    for (g, &x) in gw[o * layer.inputs..(o + 1) * layer.inputs].iter_mut().zip(input) {
                        *g += d * x;
                    }
                }
            }
            if k == 0 {
                break;
            }
            let below = &self.layers[k - 1];
            next.clear();
            next.resize(layer.inputs, 0.0);
            for (o, &d) in delta.iter().enumerate() {
                if d != 0.0 {
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (acc, &w) in next.iter_mut().zip(row) {
                        *acc += d * w;
                    }
                }
            }
            for (acc, &z) in next.iter_mut().zip(&cache.pre_activations[k - 1]) {
                *acc *= below.activation.derivative(z);
            }
            core::mem::swap(&mut delta, &mut next);
        }
        Ok(())
    }

    /// Mean squared error and its gradient over a batch.
    pub fn batch_gradients(&self, inputs: &[&[f64]], targets: &[f64]) -> Result<(f64, Gradients)> {
        let mut grads = Gradients::zeros_like(self);
        let mut cache = ForwardCache::default();
        let loss = self.batch_gradients_into(inputs, targets, &mut cache, &mut grads)?;
        Ok((loss, grads))
    }

    pub(crate) fn batch_gradients_into(
        &self,
        inputs: &[&[f64]],
        targets: &[f64],
        cache: &mut ForwardCache,
        grads: &mut Gradients,
    ) -> Result<f64> {
        if inputs.len() != targets.len() {
            return Err(Error::LengthMismatch {
                left: inputs.len(),
                right: targets.len(),
            });
        }
        if inputs.is_empty() {
            return Err(Error::Empty);
        }
        grads.fill_zero();
        let scale = 1.0 / inputs.len() as f64;
        let mut loss = 0.0;
        for (x, &t) in inputs.iter().zip(targets) {
            let y = self.forward_cached(x, cache)?;
            let r = y - t;
            loss += r * r;
            self.accumulate_gradients(cache, 2.0 * r * scale, grads)?;
        }
        Ok(loss * scale)
    }

    pub fn batch_loss(&self, inputs: &[&[f64]], targets: &[f64]) -> Result<f64> {
        let preds = inputs.iter().map(|x| self.predict(x)).collect::<Result<Vec<_>>>()?;
        mse_loss(&preds, targets)
    }

    /// Visits every parameter mutably in [`Gradients::iter`] order.
    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        let (ws, bs): (Vec<_>, Vec<_>) = self.layers.iter_mut().map(|l| (&mut l.weights, &mut l.biases)).unzip();
        ws.into_iter().chain(bs).flat_map(|v| v.iter_mut())
    }
}

pub fn mse_loss(preds: &[f64], targets: &[f64]) -> Result<f64> {
    if preds.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: targets.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::Empty);
    }
    let sse: f64 = preds.iter().zip(targets).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(sse / preds.len() as f64)
}

/// Central-difference estimate of the batch-mean squared-error gradient.
///
/// Independent of [`Network::accumulate_gradients`]: it only calls the
/// forward pass.
pub fn finite_diff_gradients(net: &Network, inputs: &[&[f64]], targets: &[f64], h: f64) -> Result<Gradients> {
    if !(h > 0.0) {
        return Err(Error::InvalidConfig("finite-difference step must be positive"));
    }
    let mut probe = net.clone();
    let mut grads = Gradients::zeros_like(net);
    for k in 0..net.layers.len() {
        for i in 0..net.layers[k].weights.len() {
            let theta = net.layers[k].weights[i];
            probe.layers[k].weights[i] = theta + h;
            let up = probe.batch_loss(inputs, targets)?;
            probe.layers[k].weights[i] = theta - h;
            let down = probe.batch_loss(inputs, targets)?;
            probe.layers[k].weights[i] = theta;
            grads.weights[k][i] = (up - down) / (2.0 * h);
        }
        for i in 0..net.layers[k].biases.len() {
            let theta = net.layers[k].biases[i];
            probe.layers[k].biases[i] = theta + h;
            let up = probe.batch_loss(inputs, targets)?;
            probe.layers[k].biases[i] = theta - h;
            let down = probe.batch_loss(inputs, targets)?;
            probe.layers[k].biases[i] = theta;
            grads.biases[k][i] = (up - down) / (2.0 * h);
        }
    }
    Ok(grads)
}

/// `|a - b| / max(|a|, |b|, 1e-8)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}
