//! Core numerics for predicting Hamburg wheel-tracking (HWTT) rut-depth curves.
//!
//! Everything in this crate is pure computation over `alloc` collections, so it
//! builds without `std`. File formats, the CLI and the HTTP service live in the
//! companion `rutnet` crate.
//!
//! The pipeline, bottom up:
//!
//! - [`mixture`]: the 13-feature input schema and its categorical encodings.
//! - [`dataset`]: curves, per-pass sample rows, 70/15/15 splitting, z-score
//!   normalization.
//! - [`network`], [`optim`], [`train`]: a dense ReLU network with analytic
//!   backpropagation, RMSProp, and an early-stopped minibatch trainer.
//! - [`metrics`]: R² (squared Pearson correlation), RMSE and MAE.
//! - [`predict`]: point and curve prediction, one-factor sweeps and
//!   performance-space-diagram classification.
//! - [`synth`]: a seeded generator of curves with closed-form ground truth.
#![no_std]
#![forbid(unsafe_code)]
// `!(x >= lo)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dataset;
pub mod error;
pub mod metrics;
pub mod mixture;
pub mod network;
pub mod optim;
pub mod predict;
pub mod rng;
pub mod synth;
pub mod train;

pub use dataset::{
    expand_rows, fit_normalizer, split, CurvePoint, HwttCurve, NormStats, SampleRow, Split, SplitFractions, SplitMode,
};
pub use error::{Error, Result};
pub use metrics::{evaluate, mae, r2, rmse, EvalReport, PartitionMetrics};
pub use mixture::{
    compute_uti, encode, validate, AggregateType, FeatureRanges, FeatureVector, Gradation, MixType, MixtureDesign,
    RangeViolation, FEATURE_COUNT, FEATURE_NAMES, MAX_PASS,
};
pub use network::{Activation, DenseLayer, ForwardCache, Gradients, Network};
pub use optim::RmsProp;
pub use predict::{
    Factor, FactorValue, Model, PointPrediction, PredictedCurve, PsdPoint, PsdThresholds, Quadrant, SweepResult,
};
pub use rng::SplitMix64;
pub use synth::SynthConfig;
pub use train::{Examples, TrainConfig, TrainHistory};
