//! CSV in, trained [`ModelArtifact`] out.

use rutnet_core::dataset::{expand_rows, fit_normalizer, split, SplitFractions, SplitMode};
use rutnet_core::metrics::{evaluate, evaluate_rows, EvalReport};
use rutnet_core::mixture::{FeatureRanges, FEATURE_COUNT};
use rutnet_core::network::Network;
use rutnet_core::optim::{DEFAULT_EPSILON, DEFAULT_LEARNING_RATE, DEFAULT_RHO};
use rutnet_core::predict::Model;
use rutnet_core::synth::{generate_dataset, SynthConfig};
use rutnet_core::train::{fit, Examples, TrainConfig, TrainHistory};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::artifact::{DatasetInfo, HistorySummary, ModelArtifact, Provenance, SplitInfo};
use crate::csv_format::{parse_hwtt_csv, to_csv_string};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub split_mode: SplitMode,
    pub fractions: SplitFractions,
    /// Seeds the split, the weight initialization and the minibatch order.
    pub seed: u64,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub patience: usize,
    pub hidden: Vec<usize>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            split_mode: SplitMode::Row,
            fractions: SplitFractions::default(),
            seed: 7,
            max_epochs: 1000,
            batch_size: 10,
            learning_rate: DEFAULT_LEARNING_RATE,
            patience: 50,
            hidden: vec![64, 64],
        }
    }
}

impl TrainOptions {
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = vec![FEATURE_COUNT];
        dims.extend(&self.hidden);
        dims.push(1);
        dims
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            batch_size: self.batch_size,
            max_epochs: self.max_epochs,
            learning_rate: self.learning_rate,
            patience: self.patience,
            shuffle_seed: self.seed,
            init_seed: self.seed,
            rho: DEFAULT_RHO,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// Written next to the model as `<MODEL>.summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub history: TrainHistory,
    pub evaluation: EvalReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub artifact: ModelArtifact,
    pub history: TrainHistory,
}

impl TrainOutcome {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            history: self.history.clone(),
            evaluation: self.artifact.provenance.evaluation.clone(),
        }
    }
}

pub fn fingerprint(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// Synthetic-oracle dataset as CSV text.
pub fn generate_csv(cfg: &SynthConfig) -> Result<String> {
    Ok(to_csv_string(&generate_dataset(cfg)?))
}

/// Parses, splits, normalizes, trains and evaluates. Deterministic in
/// `(csv, opts)`.
pub fn train_from_csv(csv: &[u8], opts: &TrainOptions) -> Result<TrainOutcome> {
    let curves = parse_hwtt_csv(csv)?;
    let rows = expand_rows(&curves)?;
    let parts = split(&rows, opts.seed, opts.fractions, opts.split_mode)?;
    let norm = fit_normalizer(&parts.train)?;
    let train_set = Examples::from_rows(&parts.train, &norm);
    let validation_set = Examples::from_rows(&parts.validation, &norm);
    let cfg = opts.train_config();
    let net = Network::init(&opts.layer_dims(), cfg.init_seed)?;
    let (net, history) = fit(net, &train_set, &validation_set, &cfg)?;
    let model = Model::new(net, norm)?;
    let evaluation = if parts.test.is_empty() {
        evaluate_partial(&model, &parts)?
    } else {
        evaluate(&model, &parts)?
    };
    let provenance = Provenance {
        train_config: cfg,
        split: SplitInfo {
            mode: opts.split_mode,
            seed: opts.seed,
            fractions: opts.fractions,
            train_rows: parts.train.len(),
            validation_rows: parts.validation.len(),
            test_rows: parts.test.len(),
        },
        history: HistorySummary::of(&history),
        evaluation,
        dataset: DatasetInfo {
            fingerprint: fingerprint(csv),
            rows: rows.len(),
            curves: curves.len(),
        },
    };
    Ok(TrainOutcome {
        artifact: ModelArtifact {
            model,
            ranges: FeatureRanges::default(),
            provenance,
        },
        history,
    })
}

fn evaluate_partial(model: &Model, parts: &rutnet_core::dataset::Split) -> Result<EvalReport> {
    let partitions = [("train", &parts.train), ("validation", &parts.validation)]
        .into_iter()
        .map(|(name, rows)| evaluate_rows(model, name, rows))
        .collect::<rutnet_core::Result<_>>()?;
    Ok(EvalReport { partitions })
}

/// Metrics over every row of `csv` as the single partition `all`.
pub fn evaluate_csv(artifact: &ModelArtifact, csv: &[u8]) -> Result<EvalReport> {
    let rows = expand_rows(&parse_hwtt_csv(csv)?)?;
    Ok(EvalReport {
        partitions: vec![evaluate_rows(&artifact.model, "all", &rows)?],
    })
}
