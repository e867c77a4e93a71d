//! Minibatch RMSProp training with early stopping on validation loss.

use alloc::vec::Vec;

use crate::dataset::{NormStats, SampleRow};
use crate::error::{Error, Result};
use crate::network::{ForwardCache, Gradients, Network};
use crate::optim::{RmsProp, DEFAULT_EPSILON, DEFAULT_LEARNING_RATE, DEFAULT_RHO};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    pub learning_rate: f64,
    /// Epochs without a new best validation loss before stopping.
    pub patience: usize,
    pub shuffle_seed: u64,
    pub init_seed: u64,
    pub rho: f64,
    pub epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 10,
            max_epochs: 1000,
            learning_rate: DEFAULT_LEARNING_RATE,
            patience: 50,
            shuffle_seed: 0,
            init_seed: 0,
            rho: DEFAULT_RHO,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl TrainConfig {
    pub fn check(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be at least 1"));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidConfig("max_epochs must be at least 1"));
        }
        if self.patience == 0 {
            return Err(Error::InvalidConfig("patience must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be positive"));
        }
        Ok(())
    }
}

/// Normalized inputs, stored row-major, with their targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Examples {
    pub dim: usize,
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
}

impl Examples {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            inputs: Vec::new(),
            targets: Vec::new(),
        }
    }

    pub fn from_rows(rows: &[SampleRow], stats: &NormStats) -> Self {
        let mut ex = Self::new(crate::mixture::FEATURE_COUNT);
        for row in rows {
            ex.push(&stats.apply(&row.features), row.target_rut_mm);
        }
        ex
    }

    pub fn push(&mut self, input: &[f64], target: f64) {
        assert_eq!(input.len(), self.dim, "example width");
        self.inputs.extend_from_slice(input);
        self.targets.push(target);
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn predictions(&self, net: &Network) -> Result<Vec<f64>> {
        (0..self.len()).map(|i| net.predict(self.input(i))).collect()
    }

    pub fn mse(&self, net: &Network) -> Result<f64> {
        crate::network::mse_loss(&self.predictions(net)?, &self.targets)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochLoss {
    /// Mean squared error over the epoch's minibatches, measured before each update.
    pub train_loss: f64,
    pub validation_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainHistory {
    pub epochs: Vec<EpochLoss>,
    /// 1-based epoch whose parameters were returned.
    pub best_epoch: usize,
    /// 1-based last epoch run.
    pub stopped_epoch: usize,
    pub best_validation_loss: f64,
}

/// Trains on `train`, early-stopping on mean squared error over `validation`,
/// and returns the best-epoch parameters.
pub fn fit(
    net: Network,
    train: &Examples,
    validation: &Examples,
    cfg: &TrainConfig,
) -> Result<(Network, TrainHistory)> {
    if validation.is_empty() {
        return Err(Error::EmptyDataset);
    }
    fit_monitored(net, train, cfg, |n| validation.mse(n))
}

/// As [`fit`], with the per-epoch validation loss supplied by `monitor`.
pub fn fit_monitored<M>(
    mut net: Network,
    train: &Examples,
    cfg: &TrainConfig,
    mut monitor: M,
) -> Result<(Network, TrainHistory)>
where
    M: FnMut(&Network) -> Result<f64>,
{
    cfg.check()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if train.dim != net.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: net.input_dim(),
            found: train.dim,
        });
    }
    let mut optimizer = RmsProp::new(&net, cfg.learning_rate, cfg.rho, cfg.epsilon)?;
    let mut rng = SplitMix64::stream(cfg.shuffle_seed, 0x5E1F);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut grads = Gradients::zeros_like(&net);
    let mut cache = ForwardCache::default();
    let mut batch_inputs: Vec<&[f64]> = Vec::with_capacity(cfg.batch_size);
    let mut batch_targets: Vec<f64> = Vec::with_capacity(cfg.batch_size);

    let mut history = TrainHistory {
        epochs: Vec::new(),
        best_epoch: 0,
        stopped_epoch: 0,
        best_validation_loss: f64::INFINITY,
    };
    let mut best_net = net.clone();

    for epoch in 1..=cfg.max_epochs {
        rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            batch_inputs.clear();
            batch_targets.clear();
            for &i in chunk {
                batch_inputs.push(train.input(i));
                batch_targets.push(train.targets[i]);
            }
            let loss = net.batch_gradients_into(&batch_inputs, &batch_targets, &mut cache, &mut grads)?;
            loss_sum += loss * chunk.len() as f64;
            optimizer.step(&mut net, &grads)?;
        }
        let validation_loss = monitor(&net)?;
        history.epochs.push(EpochLoss {
            train_loss: loss_sum / train.len() as f64,
            validation_loss,
        });
        history.stopped_epoch = epoch;
        if history.best_epoch == 0 || validation_loss < history.best_validation_loss {
            history.best_epoch = epoch;
            history.best_validation_loss = validation_loss;
            best_net.clone_from(&net);
        }
        if epoch - history.best_epoch >= cfg.patience {
            break;
        }
    }
    Ok((best_net, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_task(n: usize, seed: u64) -> Examples {
        let mut rng = SplitMix64::new(seed);
        let mut ex = Examples::new(2);
        for _ in 0..n {
            let x = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
            ex.push(&x, 3.0 * x[0]);
        }
        ex
    }

    #[test]
    fn config_validation() {
        let net = Network::init(&[2, 1], 0).unwrap();
        let ex = linear_task(10, 0);
        let cfg = TrainConfig {
            max_epochs: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(fit(net.clone(), &ex, &ex, &cfg), Err(Error::InvalidConfig(_))));
        let cfg = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(fit(net.clone(), &ex, &ex, &cfg).is_err());
        let cfg = TrainConfig {
            max_epochs: 1,
            ..TrainConfig::default()
        };
        assert_eq!(fit(net.clone(), &Examples::new(2), &ex, &cfg), Err(Error::EmptyDataset));
        assert_eq!(fit(net.clone(), &ex, &Examples::new(2), &cfg), Err(Error::EmptyDataset));
        let (_, h) = fit(net, &ex, &ex, &cfg).unwrap();
        assert_eq!(h.epochs.len(), 1);
        assert_eq!((h.best_epoch, h.stopped_epoch), (1, 1));
    }

    #[test]
    fn learns_a_linear_target() {
        let train = linear_task(500, 1);
        let val = linear_task(100, 2);
        let net = Network::init(&[2, 8, 1], 3).unwrap();
        let cfg = TrainConfig {
            max_epochs: 200,
            patience: 200,
            ..TrainConfig::default()
        };
        let (net, history) = fit(net, &train, &val, &cfg).unwrap();
        let mse = train.mse(&net).unwrap();
        assert!(mse < 1e-3, "train mse {mse} after {} epochs", history.stopped_epoch);
        assert!(history.epochs.len() <= 200);
    }

    #[test]
    fn short_last_batch_is_used() {
        // 7 rows with batch 3: batches of 3, 3, 1. One epoch must touch the
        // lone row, so its loss contribution appears in the epoch mean.
        let train = linear_task(7, 4);
        let net = Network::init(&[2, 1], 0).unwrap();
        let cfg = TrainConfig {
            max_epochs: 1,
            batch_size: 3,
            ..TrainConfig::default()
        };
        let (_, h) = fit_monitored(net, &train, &cfg, |_| Ok(0.0)).unwrap();
        assert!(h.epochs[0].train_loss > 0.0);
    }

    #[test]
    fn stops_after_plateau_and_restores_best() {
        let train = linear_task(200, 5);
        let val = linear_task(50, 6);
        let net = Network::init(&[2, 4, 1], 7).unwrap();
        let plateau_after = 12;
        let patience = 5;
        let cfg = TrainConfig {
            max_epochs: 500,
            patience,
            ..TrainConfig::default()
        };
        let mut epoch = 0;
        let (best, h) = fit_monitored(net, &train, &cfg, |n| {
            epoch += 1;
            let loss = val.mse(n)?;
            // Past the plateau every epoch looks worse than anything before.
            Ok(if epoch > plateau_after { loss + 1e6 } else { loss })
        })
        .unwrap();
        assert!(h.stopped_epoch <= plateau_after + patience);
        assert!(h.stopped_epoch <= h.best_epoch + patience);
        let min = h.epochs.iter().map(|e| e.validation_loss).fold(f64::INFINITY, f64::min);
        assert_eq!(min, h.best_validation_loss);
        assert!((val.mse(&best).unwrap() - min).abs() < 1e-12);
    }

    #[test]
    fn training_is_bit_reproducible() {
        let train = linear_task(120, 8);
        let val = linear_task(30, 9);
        let cfg = TrainConfig {
            max_epochs: 15,
            shuffle_seed: 4,
            ..TrainConfig::default()
        };
        let run = || fit(Network::init(&[2, 6, 1], 1).unwrap(), &train, &val, &cfg).unwrap();
        let (a, ha) = run();
        let (b, hb) = run();
        let bits = |n: &Network| {
            n.layers
                .iter()
                .flat_map(|l| l.weights.iter().chain(&l.biases))
                .map(|v| v.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(ha, hb);
    }
}
