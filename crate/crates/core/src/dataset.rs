//! Curves, per-pass sample rows, train/validation/test splitting and z-score
//! normalization.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mixture::{encode, FeatureVector, MixtureDesign, FEATURE_COUNT};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    pub pass: u32,
    pub rut_mm: f64,
}

/// One Hamburg test: a mixture at one temperature and its rut-depth trace.
#[derive(Debug, Clone, PartialEq)]
pub struct HwttCurve {
    pub mix_id: String,
    pub design: MixtureDesign,
    pub temp_c: f64,
    /// ABR as recorded in the source data; `None` means RAP + RAS.
    pub abr_pct: Option<f64>,
    /// Strictly increasing in pass.
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub features: FeatureVector,
    pub target_rut_mm: f64,
    pub curve_id: String,
}

/// One row per curve point.
pub fn expand_rows(curves: &[HwttCurve]) -> Result<Vec<SampleRow>> {
    let mut rows = Vec::with_capacity(curves.iter().map(|c| c.points.len()).sum());
    for curve in curves {
        for point in &curve.points {
            let mut features = encode(&curve.design, curve.temp_c, point.pass)?;
            if let Some(abr) = curve.abr_pct {
                features = features.with_abr(abr);
            }
            rows.push(SampleRow {
                features,
                target_rut_mm: point.rut_mm,
                curve_id: curve.mix_id.clone(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SplitMode {
    /// Shuffle individual rows.
    #[default]
    Row,
    /// Shuffle curve ids and keep each curve inside one partition.
    Curve,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitFractions {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self {
            train: 0.70,
            validation: 0.15,
            test: 0.15,
        }
    }
}

impl SplitFractions {
    fn check(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|f| !(*f >= 0.0)) || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidFractions);
        }
        Ok(())
    }

    /// Item counts for `n` units: train and validation are rounded, test takes the rest.
    fn counts(&self, n: usize) -> (usize, usize) {
        let train = libm::round(self.train * n as f64) as usize;
        let train = train.min(n);
        let validation = (libm::round(self.validation * n as f64) as usize).min(n - train);
        (train, validation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<SampleRow>,
    pub validation: Vec<SampleRow>,
    pub test: Vec<SampleRow>,
    pub seed: u64,
    pub mode: SplitMode,
}

/// Deterministic shuffled 3-way partition of `rows`.
pub fn split(rows: &[SampleRow], seed: u64, fractions: SplitFractions, mode: SplitMode) -> Result<Split> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    fractions.check()?;
    let mut rng = SplitMix64::stream(seed, 0x5911);
    let (train, validation, test) = match mode {
        SplitMode::Row => {
            let mut order: Vec<usize> = (0..rows.len()).collect();
            rng.shuffle(&mut order);
            let (n_train, n_val) = fractions.counts(rows.len());
            let take = |idx: &[usize]| idx.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>();
            (
                take(&order[..n_train]),
                take(&order[n_train..n_train + n_val]),
                take(&order[n_train + n_val..]),
            )
        }
        SplitMode::Curve => {
            // Curve ids in first-appearance order, independent of hashing.
            let mut ids: Vec<&str> = Vec::new();
            let mut seen = BTreeMap::new();
            for row in rows {
                seen.entry(row.curve_id.as_str()).or_insert_with(|| {
                    ids.push(row.curve_id.as_str());
                });
            }
            rng.shuffle(&mut ids);
            let (n_train, n_val) = fractions.counts(ids.len());
            let partition: BTreeMap<&str, u8> = ids
                .iter()
                .enumerate()
                .map(|(pos, id)| {
                    let part = if pos < n_train {
                        0
                    } else if pos < n_train + n_val {
                        1
                    } else {
                        2
                    };
                    (*id, part)
                })
                .collect();
            let mut parts = (Vec::new(), Vec::new(), Vec::new());
            for row in rows {
                match partition[row.curve_id.as_str()] {
                    0 => parts.0.push(row.clone()),
                    1 => parts.1.push(row.clone()),
                    _ => parts.2.push(row.clone()),
                }
            }
            parts
        }
    };
    Ok(Split {
        train,
        validation,
        test,
        seed,
        mode,
    })
}

/// Below this sample standard deviation a feature is treated as constant.
pub const CONSTANT_STD: f64 = 1e-12;

/// Per-feature mean and sample (n - 1) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormStats {
    pub mean: [f64; FEATURE_COUNT],
    pub std: [f64; FEATURE_COUNT],
}

impl NormStats {
    pub fn is_constant(&self, feature: usize) -> bool {
        !(self.std[feature] >= CONSTANT_STD)
    }

    /// `(x - mean) / std`; constant features map to 0.
    pub fn apply(&self, v: &FeatureVector) -> [f64; FEATURE_COUNT] {
        let mut z = [0.0; FEATURE_COUNT];
        for (i, out) in z.iter_mut().enumerate() {
            if !self.is_constant(i) {
                *out = (v.0[i] - self.mean[i]) / self.std[i];
            }
        }
        z
    }

    /// Inverse of [`NormStats::apply`]; constant features come back as their mean.
    pub fn invert(&self, z: &[f64; FEATURE_COUNT]) -> FeatureVector {
        let mut v = self.mean;
        for (i, x) in v.iter_mut().enumerate() {
            if !self.is_constant(i) {
                *x = z[i] * self.std[i] + self.mean[i];
            }
        }
        FeatureVector(v)
    }
}

/// Fits statistics on the training partition only.
pub fn fit_normalizer(train: &[SampleRow]) -> Result<NormStats> {
    if train.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: train.len(),
        });
    }
    let n = train.len() as f64;
    let mut mean = [0.0; FEATURE_COUNT];
    for row in train {
        for (m, x) in mean.iter_mut().zip(row.features.0) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut std = [0.0; FEATURE_COUNT];
    for row in train {
        for i in 0..FEATURE_COUNT {
            let d = row.features.0[i] - mean[i];
            std[i] += d * d;
        }
    }
    std.iter_mut().for_each(|s| *s = libm::sqrt(*s / (n - 1.0)));
    Ok(NormStats { mean, std })
}
