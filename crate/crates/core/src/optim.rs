//! RMSProp: each step divides the gradient by the root of a decayed running
//! mean of its squares.
//!
//! ```text
//! s ← rho·s + (1 − rho)·g²
//! θ ← θ − lr·g / (√s + epsilon)
//! ```

use crate::error::{Error, Result};
use crate::network::{Gradients, Network};

pub const DEFAULT_LEARNING_RATE: f64 = 0.001;
pub const DEFAULT_RHO: f64 = 0.9;
pub const DEFAULT_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RmsProp {
    pub learning_rate: f64,
    pub rho: f64,
    pub epsilon: f64,
    /// Running mean of squared gradients, parameter-shaped.
    pub accumulator: Gradients,
}

impl RmsProp {
    pub fn new(net: &Network, learning_rate: f64, rho: f64, epsilon: f64) -> Result<Self> {
        if !(learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning rate must be positive"));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidConfig("rho must lie in (0, 1)"));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidConfig("epsilon must be positive"));
        }
        Ok(Self {
            learning_rate,
            rho,
            epsilon,
            accumulator: Gradients::zeros_like(net),
        })
    }

    pub fn with_defaults(net: &Network) -> Self {
        Self::new(net, DEFAULT_LEARNING_RATE, DEFAULT_RHO, DEFAULT_EPSILON).expect("defaults are valid")
    }

    pub fn step(&mut self, net: &mut Network, grads: &Gradients) -> Result<()> {
        if !grads.matches(net) || !self.accumulator.matches(net) {
            return Err(Error::ShapeMismatch);
        }
        let (lr, rho, eps) = (self.learning_rate, self.rho, self.epsilon);
        for (k, layer) in net.layers.iter_mut().enumerate() {
            let pairs = [
                (&mut layer.weights, &grads.weights[k], &mut self.accumulator.weights[k]),
                (&mut layer.biases, &grads.biases[k], &mut self.accumulator.biases[k]),
            ];
            for (params, g, s) in pairs {
                for ((theta, &g), s) in params.iter_mut().zip(g.iter()).zip(s.iter_mut()) {
                    *s = rho * *s + (1.0 - rho) * g * g;
                    *theta -= lr * g / (libm::sqrt(*s) + eps);
                }
            }
        }
        Ok(())
    }
}
