//! Versioned JSON model file.
//!
//! Parameters and normalization statistics are written as decimal strings
//! with 17 significant digits, which round-trip every `f64` exactly, so a
//! load followed by a save reproduces the file byte for byte.

use std::fs;
use std::path::Path;

use rutnet_core::dataset::{NormStats, SplitFractions, SplitMode};
use rutnet_core::metrics::EvalReport;
use rutnet_core::mixture::{AggregateType, FeatureRanges, Gradation, MixType, FEATURE_COUNT, FEATURE_NAMES};
use rutnet_core::network::{Activation, DenseLayer, Network};
use rutnet_core::predict::Model;
use rutnet_core::train::{TrainConfig, TrainHistory};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub mode: SplitMode,
    pub seed: u64,
    pub fractions: SplitFractions,
    pub train_rows: usize,
    pub validation_rows: usize,
    pub test_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistorySummary {
    pub best_epoch: usize,
    pub stopped_epoch: usize,
    pub best_validation_loss: f64,
    pub final_train_loss: Option<f64>,
}

impl HistorySummary {
    pub fn of(history: &TrainHistory) -> Self {
        Self {
            best_epoch: history.best_epoch,
            stopped_epoch: history.stopped_epoch,
            best_validation_loss: history.best_validation_loss,
            final_train_loss: history.epochs.last().map(|e| e.train_loss),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    /// `sha256:<hex>` of the training CSV bytes.
    pub fingerprint: String,
    pub rows: usize,
    pub curves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub train_config: TrainConfig,
    pub split: SplitInfo,
    pub history: HistorySummary,
    pub evaluation: EvalReport,
    pub dataset: DatasetInfo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelArtifact {
    pub model: Model,
    pub ranges: FeatureRanges,
    pub provenance: Provenance,
}

// On-disk layout.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryCodes {
    mix_type: Vec<(String, u8)>,
    gradation: Vec<(String, u8)>,
    agg_type: Vec<(String, u8)>,
}

impl CategoryCodes {
    fn current() -> Self {
        fn codes<T: Copy + std::fmt::Display>(all: [T; 2], code: fn(T) -> f64) -> Vec<(String, u8)> {
            all.iter().map(|&v| (v.to_string(), code(v) as u8)).collect()
        }
        Self {
            mix_type: codes(MixType::ALL, MixType::code),
            gradation: codes(Gradation::ALL, Gradation::code),
            agg_type: codes(AggregateType::ALL, AggregateType::code),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FeatureSchema {
    features: Vec<String>,
    categorical_codes: CategoryCodes,
}

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    inputs: usize,
    outputs: usize,
    activation: Activation,
    /// Row-major, `outputs × inputs`.
    weights: Vec<String>,
    biases: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct NormDoc {
    mean: Vec<String>,
    std: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RangeDoc {
    feature: String,
    min: f64,
    max: f64,
}

#[derive(Serialize, Deserialize)]
struct ArtifactDoc {
    format_version: u64,
    feature_schema: FeatureSchema,
    layer_dims: Vec<usize>,
    layers: Vec<LayerDoc>,
    normalization: NormDoc,
    feature_ranges: Vec<RangeDoc>,
    provenance: Provenance,
}

/// Prefixes an IO error with the path it concerns.
pub fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn encode_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn encode_all(vs: &[f64]) -> Vec<String> {
    vs.iter().copied().map(encode_f64).collect()
}

fn decode_all(what: &str, vs: &[String]) -> Result<Vec<f64>> {
    vs.iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Schema(format!("{what}: '{s}' is not a decimal number")))
        })
        .collect()
}

fn decode_array(what: &str, vs: &[String]) -> Result<[f64; FEATURE_COUNT]> {
    decode_all(what, vs)?
        .try_into()
        .map_err(|v: Vec<f64>| Error::Schema(format!("{what}: expected {FEATURE_COUNT} values, found {}", v.len())))
}

impl ModelArtifact {
    pub fn feature_names() -> [&'static str; FEATURE_COUNT] {
        FEATURE_NAMES
    }

    fn to_doc(&self) -> ArtifactDoc {
        let net = &self.model.network;
        ArtifactDoc {
            format_version: FORMAT_VERSION,
            feature_schema: FeatureSchema {
                features: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
                categorical_codes: CategoryCodes::current(),
            },
            layer_dims: net.dims(),
            layers: net
                .layers
                .iter()
                .map(|l| LayerDoc {
                    inputs: l.inputs,
                    outputs: l.outputs,
                    activation: l.activation,
                    weights: encode_all(&l.weights),
                    biases: encode_all(&l.biases),
                })
                .collect(),
            normalization: NormDoc {
                mean: encode_all(&self.model.norm.mean),
                std: encode_all(&self.model.norm.std),
            },
            feature_ranges: FEATURE_NAMES
                .iter()
                .zip(self.ranges.bounds)
                .map(|(name, (min, max))| RangeDoc {
                    feature: name.to_string(),
                    min,
                    max,
                })
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    fn from_doc(doc: ArtifactDoc) -> Result<Self> {
        if doc.feature_schema.features != FEATURE_NAMES {
            return Err(Error::Schema(format!(
                "feature_schema.features must be {FEATURE_NAMES:?}, found {:?}",
                doc.feature_schema.features
            )));
        }
        let layers = doc
            .layers
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                Ok(DenseLayer {
                    inputs: l.inputs,
                    outputs: l.outputs,
                    weights: decode_all(&format!("layers[{i}].weights"), &l.weights)?,
                    biases: decode_all(&format!("layers[{i}].biases"), &l.biases)?,
                    activation: l.activation,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let network = Network::from_layers(layers).map_err(|e| Error::Schema(format!("layers: {e}")))?;
        if network.dims() != doc.layer_dims {
            return Err(Error::Schema(format!(
                "layer_dims {:?} disagree with layers {:?}",
                doc.layer_dims,
                network.dims()
            )));
        }
        let norm = NormStats {
            mean: decode_array("normalization.mean", &doc.normalization.mean)?,
            std: decode_array("normalization.std", &doc.normalization.std)?,
        };
        let model = Model::new(network, norm).map_err(|e| Error::Schema(format!("layers: {e}")))?;
        if doc.feature_ranges.len() != FEATURE_COUNT
            || doc
                .feature_ranges
                .iter()
                .zip(FEATURE_NAMES)
                .any(|(r, n)| r.feature != n)
        {
            return Err(Error::Schema(
                "feature_ranges must list every feature in schema order".into(),
            ));
        }
        let mut bounds = [(0.0, 0.0); FEATURE_COUNT];
        for (b, r) in bounds.iter_mut().zip(&doc.feature_ranges) {
            *b = (r.min, r.max);
        }
        let ranges = FeatureRanges::new(bounds).map_err(|e| Error::Schema(format!("feature_ranges: {e}")))?;
        Ok(Self {
            model,
            ranges,
            provenance: doc.provenance,
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_doc()).expect("artifact serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Schema(format!("not a complete JSON document: {e}")))?;
        let found = value
            .get("format_version")
            .ok_or_else(|| Error::Schema("missing field `format_version`".into()))?;
        let found = found
            .as_u64()
            .ok_or_else(|| Error::Schema(format!("format_version must be an unsigned integer, found {found}")))?;
        if found != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found,
                expected: FORMAT_VERSION,
            });
        }
        let doc: ArtifactDoc = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| with_path(e, path))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| with_path(e, path))?)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rutnet_core::metrics::PartitionMetrics;

    pub(crate) fn sample_artifact(seed: u64) -> ModelArtifact {
        let network = Network::init(&[13, 6, 4, 1], seed).unwrap();
        let mut norm = NormStats {
            mean: [0.0; FEATURE_COUNT],
            std: [1.0; FEATURE_COUNT],
        };
        for i in 0..FEATURE_COUNT {
            norm.mean[i] = 0.1 * i as f64 + 1.0 / 3.0;
            norm.std[i] = 1.0 + (i as f64).sqrt();
        }
        norm.std[0] = 0.0;
        ModelArtifact {
            model: Model::new(network, norm).unwrap(),
            ranges: FeatureRanges::default(),
            provenance: Provenance {
                train_config: TrainConfig::default(),
                split: SplitInfo {
                    mode: SplitMode::Row,
                    seed,
                    fractions: SplitFractions::default(),
                    train_rows: 7,
                    validation_rows: 2,
                    test_rows: 1,
                },
                history: HistorySummary {
                    best_epoch: 3,
                    stopped_epoch: 5,
                    best_validation_loss: 0.1,
                    final_train_loss: Some(0.2),
                },
                evaluation: EvalReport {
                    partitions: vec![PartitionMetrics::compute("test", &[1.0, 2.0, 3.0], &[1.1, 2.0, 2.7]).unwrap()],
                },
                dataset: DatasetInfo {
                    fingerprint: "sha256:00".into(),
                    rows: 10,
                    curves: 1,
                },
            },
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let a = sample_artifact(3);
        let text = a.to_json();
        let b = ModelArtifact::from_json(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_json(), text);
    }

    #[test]
    fn seventeen_digit_strings() {
        assert_eq!(encode_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(encode_f64(-2.0), "-2.0000000000000000e0");
        for v in [0.1, 1.0 / 3.0, f64::MIN_POSITIVE, 1e300, -7.25e-9] {
            assert_eq!(encode_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn version_mismatch_names_both_versions() {
        let text = sample_artifact(1)
            .to_json()
            .replacen("\"format_version\": 1", "\"format_version\": 2", 1);
        let err = ModelArtifact::from_json(&text).unwrap_err();
        assert!(matches!(err, Error::VersionMismatch { found: 2, expected: 1 }));
        let msg = err.to_string();
        assert!(msg.contains('2') && msg.contains('1'), "{msg}");
    }

    #[test]
    fn truncated_and_incomplete_files_are_schema_errors() {
        let text = sample_artifact(1).to_json();
        for cut in [0, 1, text.len() / 3, text.len() / 2, text.len() - 3] {
            let err = ModelArtifact::from_json(&text[..cut]).unwrap_err();
            assert_eq!(err.code(), "SchemaError", "cut at {cut}: {err}");
        }
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value.as_object_mut().unwrap().remove("normalization");
        let err = ModelArtifact::from_json(&value.to_string()).unwrap_err();
        assert_eq!(err.code(), "SchemaError");
        assert!(err.to_string().contains("normalization"), "{err}");
    }

    #[test]
    fn corrupted_parameters_are_schema_errors() {
        let a = sample_artifact(1);
        let mut value: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
        value["layers"][0]["weights"][0] = "abc".into();
        assert_eq!(
            ModelArtifact::from_json(&value.to_string()).unwrap_err().code(),
            "SchemaError"
        );
        let mut value: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
        value["layers"][0]["weights"].as_array_mut().unwrap().pop();
        assert_eq!(
            ModelArtifact::from_json(&value.to_string()).unwrap_err().code(),
            "SchemaError"
        );
    }
}
