//! Accuracy indices over observed (`O`) and predicted (`t`) rut depths.
//!
//! [`r2`] is the squared Pearson correlation between the two series, so it is
//! blind to affine bias in the predictions. [`coefficient_of_determination`]
//! (`1 − SSE/SST`) is provided alongside as a diagnostic that is not.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dataset::{SampleRow, Split};
use crate::error::{Error, Result};
use crate::predict::Model;

fn check_pair(observed: &[f64], predicted: &[f64]) -> Result<()> {
    if observed.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: observed.len(),
            right: predicted.len(),
        });
    }
    if observed.is_empty() {
        return Err(Error::Empty);
    }
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// `(Σ(O−Ō)(t−t̄))² / (Σ(O−Ō)² · Σ(t−t̄)²)`.
pub fn r2(observed: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(observed, predicted)?;
    if observed.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: observed.len(),
        });
    }
    let (mo, mt) = (mean(observed), mean(predicted));
    let (mut cross, mut so, mut st) = (0.0, 0.0, 0.0);
    for (o, t) in observed.iter().zip(predicted) {
        let (a, b) = (o - mo, t - mt);
        cross += a * b;
        so += a * a;
        st += b * b;
    }
    if so == 0.0 || st == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok(cross * cross / (so * st))
}

pub fn rmse(observed: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(observed, predicted)?;
    let sse: f64 = observed.iter().zip(predicted).map(|(o, t)| (o - t) * (o - t)).sum();
    Ok(libm::sqrt(sse / observed.len() as f64))
}

pub fn mae(observed: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(observed, predicted)?;
    let sae: f64 = observed.iter().zip(predicted).map(|(o, t)| (o - t).abs()).sum();
    Ok(sae / observed.len() as f64)
}

/// `1 − SSE/SST`. Diagnostic only; may be negative.
pub fn coefficient_of_determination(observed: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(observed, predicted)?;
    let mo = mean(observed);
    let sst: f64 = observed.iter().map(|o| (o - mo) * (o - mo)).sum();
    if sst == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let sse: f64 = observed.iter().zip(predicted).map(|(o, t)| (o - t) * (o - t)).sum();
    Ok(1.0 - sse / sst)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PartitionMetrics {
    pub partition: String,
    pub n: usize,
    /// `None` when R² is undefined; the reason is in `r2_error`.
    pub r2: Option<f64>,
    pub r2_error: Option<String>,
    pub rmse_mm: f64,
    pub mae_mm: f64,
    pub determination: Option<f64>,
}

impl PartitionMetrics {
    pub fn compute(partition: &str, observed: &[f64], predicted: &[f64]) -> Result<Self> {
        let rmse_mm = rmse(observed, predicted)?;
        let mae_mm = mae(observed, predicted)?;
        let (r2, r2_error) = match r2(observed, predicted) {
            Ok(v) => (Some(v), None),
            Err(e @ (Error::DegenerateVariance | Error::InsufficientData { .. })) => (None, Some(e.code().to_string())),
            Err(e) => return Err(e),
        };
        Ok(Self {
            partition: partition.to_string(),
            n: observed.len(),
            r2,
            r2_error,
            rmse_mm,
            mae_mm,
            determination: coefficient_of_determination(observed, predicted).ok(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub partitions: Vec<PartitionMetrics>,
}

impl EvalReport {
    pub fn get(&self, partition: &str) -> Option<&PartitionMetrics> {
        self.partitions.iter().find(|p| p.partition == partition)
    }
}

/// Observed targets and raw (unclamped) predictions for `rows`.
pub fn observed_and_predicted(model: &Model, rows: &[SampleRow]) -> Result<(Vec<f64>, Vec<f64>)> {
    let observed = rows.iter().map(|r| r.target_rut_mm).collect();
    let predicted = rows
        .iter()
        .map(|r| model.predict_features(&r.features))
        .collect::<Result<_>>()?;
    Ok((observed, predicted))
}

pub fn evaluate_rows(model: &Model, partition: &str, rows: &[SampleRow]) -> Result<PartitionMetrics> {
    let (o, t) = observed_and_predicted(model, rows)?;
    PartitionMetrics::compute(partition, &o, &t)
}

/// Metrics for the train, validation and test partitions.
pub fn evaluate(model: &Model, split: &Split) -> Result<EvalReport> {
    let parts = [
        ("train", &split.train),
        ("validation", &split.validation),
        ("test", &split.test),
    ];
    let partitions = parts
        .into_iter()
        .map(|(name, rows)| evaluate_rows(model, name, rows))
        .collect::<Result<_>>()?;
    Ok(EvalReport { partitions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn r2_examples() {
        assert_eq!(r2(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), Ok(1.0));
        assert!((r2(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((r2(&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0]).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(r2(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]), Err(Error::DegenerateVariance));
        assert!(matches!(r2(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn rmse_and_mae_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]), Ok(0.0));
        assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 3.53553).abs() < 1e-5);
        assert_eq!(rmse(&[0.0, 0.0], &[3.0, 4.0]), Ok(libm::sqrt(12.5)));
        assert_eq!(mae(&[0.0, 0.0], &[3.0, 4.0]), Ok(3.5));
        assert_eq!(mae(&[5.0], &[5.0]), Ok(0.0));
        assert_eq!(mae(&[], &[]), Err(Error::Empty));
        assert_eq!(
            mae(&[1.0, 7.0, -2.0], &[0.5, 9.0, 1.0]),
            mae(&[11.0, 17.0, 8.0], &[10.5, 19.0, 11.0])
        );
    }

    #[test]
    fn rmse_dominates_mae_on_random_pairs() {
        let mut rng = SplitMix64::new(21);
        for _ in 0..100 {
            let o: Vec<f64> = (0..20).map(|_| rng.uniform(0.0, 20.0)).collect();
            let t: Vec<f64> = (0..20).map(|_| rng.uniform(-2.0, 22.0)).collect();
            assert!(rmse(&o, &t).unwrap() >= mae(&o, &t).unwrap());
        }
    }

    #[test]
    fn determination_penalizes_bias() {
        let o = [1.0, 2.0, 3.0, 4.0];
        let biased = [3.0, 4.0, 5.0, 6.0];
        assert!((r2(&o, &biased).unwrap() - 1.0).abs() < 1e-15);
        assert!(coefficient_of_determination(&o, &biased).unwrap() < 0.0);
        assert_eq!(coefficient_of_determination(&o, &o), Ok(1.0));
    }

    #[test]
    fn constant_predictions_report_degenerate_r2() {
        let m = PartitionMetrics::compute("test", &[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(m.r2, None);
        assert_eq!(m.r2_error.as_deref(), Some("DegenerateVariance"));
        assert!((m.rmse_mm - libm::sqrt(2.0 / 3.0)).abs() < 1e-15);
        assert!((m.mae_mm - 2.0 / 3.0).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
            (3usize..40).prop_flat_map(|n| {
                (
                    prop::collection::vec(0.0f64..20.0, n),
                    prop::collection::vec(0.0f64..20.0, n),
                )
            })
        }

        proptest! {
            #[test]
            fn r2_is_affine_invariant((o, t) in pairs(), a in 0.1f64..10.0, b in -5.0f64..5.0) {
                let base = r2(&o, &t).unwrap();
                let shifted: Vec<f64> = t.iter().map(|x| a * x + b).collect();
                prop_assert!((r2(&o, &shifted).unwrap() - base).abs() < 1e-12);
                prop_assert!((0.0..=1.0 + 1e-12).contains(&base));
            }

            #[test]
            fn rmse_squared_times_n_is_sse((o, t) in pairs()) {
                let sse: f64 = o.iter().zip(&t).map(|(a, b)| (a - b) * (a - b)).sum();
                let r = rmse(&o, &t).unwrap();
                prop_assert!((r * r * o.len() as f64 - sse).abs() <= 1e-12 * sse.max(1.0));
                prop_assert!(r >= mae(&o, &t).unwrap());
            }

            #[test]
            fn metrics_ignore_pair_order((o, t) in pairs(), seed in any::<u64>()) {
                let mut idx: Vec<usize> = (0..o.len()).collect();
                SplitMix64::new(seed).shuffle(&mut idx);
                let po: Vec<f64> = idx.iter().map(|&i| o[i]).collect();
                let pt: Vec<f64> = idx.iter().map(|&i| t[i]).collect();
                prop_assert!((r2(&o, &t).unwrap() - r2(&po, &pt).unwrap()).abs() < 1e-12);
                prop_assert!((rmse(&o, &t).unwrap() - rmse(&po, &pt).unwrap()).abs() < 1e-12);
                prop_assert!((mae(&o, &t).unwrap() - mae(&po, &pt).unwrap()).abs() < 1e-12);
            }
        }
    }
}
