//! Point, curve, sweep and performance-space-diagram predictions from a
//! trained model.
//!
//! Raw network outputs are kept for evaluation; `clamped` values
//! (`max(0, raw)`) are what gets displayed and classified.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dataset::NormStats;
use crate::error::{Error, Result};
use crate::mixture::{
    encode, AggregateType, FeatureVector, Gradation, MixType, MixtureDesign, FEATURE_COUNT, MAX_PASS,
};
use crate::network::Network;

/// Trained network plus the statistics its inputs were normalized with.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub network: Network,
    pub norm: NormStats,
}

impl Model {
    pub fn new(network: Network, norm: NormStats) -> Result<Self> {
        if network.input_dim() != FEATURE_COUNT {
            return Err(Error::DimensionMismatch {
                expected: FEATURE_COUNT,
                found: network.input_dim(),
            });
        }
        Ok(Self { network, norm })
    }

    /// Raw (unclamped) prediction for an encoded row.
    pub fn predict_features(&self, features: &FeatureVector) -> Result<f64> {
        self.network.predict(&self.norm.apply(features))
    }
}

pub fn clamp_rut(raw_mm: f64) -> f64 {
    if raw_mm > 0.0 {
        raw_mm
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointPrediction {
    pub raw_mm: f64,
    pub clamped_mm: f64,
}

pub fn predict_point(model: &Model, mix: &MixtureDesign, temp_c: f64, pass: u32) -> Result<PointPrediction> {
    let raw_mm = model.predict_features(&encode(mix, temp_c, pass)?)?;
    Ok(PointPrediction {
        raw_mm,
        clamped_mm: clamp_rut(raw_mm),
    })
}

/// `100, 200, …, 20000`: 200 points.
pub fn default_grid() -> Vec<u32> {
    (1..=200).map(|k| k * 100).collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PredictedCurve {
    pub mix: MixtureDesign,
    pub temp_c: f64,
    pub grid: Vec<u32>,
    pub raw_mm: Vec<f64>,
    pub clamped_mm: Vec<f64>,
    /// Set for the default grid: displays should prepend the physical point (0, 0),
    /// which is not a model evaluation.
    pub display_origin: bool,
}

impl PredictedCurve {
    pub fn display_points(&self) -> Vec<(u32, f64)> {
        let origin = self.display_origin.then_some((0, 0.0));
        origin
            .into_iter()
            .chain(self.grid.iter().copied().zip(self.clamped_mm.iter().copied()))
            .collect()
    }

    pub fn final_clamped(&self) -> Option<f64> {
        self.clamped_mm.last().copied()
    }
}

fn check_grid(grid: &[u32]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::BadGrid("grid is empty".into()));
    }
    if let Some(&p) = grid.iter().find(|&&p| p > MAX_PASS) {
        return Err(Error::BadGrid(format!("pass {p} exceeds {MAX_PASS}")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadGrid("passes must be strictly ascending".into()));
    }
    Ok(())
}

/// Predicts along `grid`, or along [`default_grid`] when `None`.
pub fn predict_curve(model: &Model, mix: &MixtureDesign, temp_c: f64, grid: Option<&[u32]>) -> Result<PredictedCurve> {
    let (grid, display_origin) = match grid {
        Some(g) => {
            check_grid(g)?;
            (g.to_vec(), false)
        }
        None => (default_grid(), true),
    };
    let mut raw_mm = Vec::with_capacity(grid.len());
    let mut clamped_mm = Vec::with_capacity(grid.len());
    for &pass in &grid {
        let p = predict_point(model, mix, temp_c, pass)?;
        raw_mm.push(p.raw_mm);
        clamped_mm.push(p.clamped_mm);
    }
    Ok(PredictedCurve {
        mix: *mix,
        temp_c,
        grid,
        raw_mm,
        clamped_mm,
        display_origin,
    })
}

/// A mixture or test input that a sensitivity sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Factor {
    /// Binder grade pair `high-low`, e.g. `64-22`; UTI and HTPG follow.
    Grade,
    /// High grade only, low grade held; UTI follows.
    HtpgC,
    AcPct,
    /// ABR follows.
    RapPct,
    /// ABR follows.
    RasPct,
    CrcPct,
    NmasMm,
    Gradation,
    AggType,
    MixType,
    TempC,
}

impl Factor {
    pub const ALL: [Factor; 11] = [
        Factor::Grade,
        Factor::HtpgC,
        Factor::AcPct,
        Factor::RapPct,
        Factor::RasPct,
        Factor::CrcPct,
        Factor::NmasMm,
        Factor::Gradation,
        Factor::AggType,
        Factor::MixType,
        Factor::TempC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Factor::Grade => "grade",
            Factor::HtpgC => "htpg_c",
            Factor::AcPct => "ac_pct",
            Factor::RapPct => "rap_pct",
            Factor::RasPct => "ras_pct",
            Factor::CrcPct => "crc_pct",
            Factor::NmasMm => "nmas_mm",
            Factor::Gradation => "gradation",
            Factor::AggType => "agg_type",
            Factor::MixType => "mix_type",
            Factor::TempC => "temp_c",
        }
    }

    fn bad(self, value: &str) -> Error {
        Error::BadFactorValue {
            factor: self.name(),
            value: value.to_string(),
        }
    }

    /// Parses a value written as on the command line: a number, a grade pair
    /// `64-22` (or `64/-22`), or a category name.
    pub fn parse_value(self, text: &str) -> Result<FactorValue> {
        let s = text.trim();
        let category = |ok: Option<FactorValue>| ok.ok_or_else(|| self.bad(text));
        match self {
            Factor::Grade => {
                let (high, low) = parse_grade(s).ok_or_else(|| self.bad(text))?;
                Ok(FactorValue::Grade { high, low })
            }
            Factor::Gradation => category(s.parse().ok().map(FactorValue::Gradation)),
            Factor::AggType => category(s.parse().ok().map(FactorValue::AggType)),
            Factor::MixType => category(s.parse().ok().map(FactorValue::MixType)),
            _ => s
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(FactorValue::Number)
                .ok_or_else(|| self.bad(text)),
        }
    }

    /// The factor's current value in `(mix, temp_c)`.
    pub fn current(self, mix: &MixtureDesign, temp_c: f64) -> FactorValue {
        use FactorValue::Number;
        match self {
            Factor::Grade => FactorValue::Grade {
                high: mix.htpg_c,
                low: mix.ltpg_c,
            },
            Factor::HtpgC => Number(mix.htpg_c),
            Factor::AcPct => Number(mix.ac_pct),
            Factor::RapPct => Number(mix.rap_pct),
            Factor::RasPct => Number(mix.ras_pct),
            Factor::CrcPct => Number(mix.crc_pct),
            Factor::NmasMm => Number(mix.nmas_mm),
            Factor::Gradation => FactorValue::Gradation(mix.gradation),
            Factor::AggType => FactorValue::AggType(mix.agg_type),
            Factor::MixType => FactorValue::MixType(mix.mix_type),
            Factor::TempC => Number(temp_c),
        }
    }

    /// Returns `(mix, temp_c)` with only this factor replaced.
    pub fn apply(self, mix: &MixtureDesign, temp_c: f64, value: FactorValue) -> Result<(MixtureDesign, f64)> {
        let mut m = *mix;
        let mut t = temp_c;
        match (self, value) {
            (Factor::Grade, FactorValue::Grade { high, low }) => {
                m.htpg_c = high;
                m.ltpg_c = low;
            }
            (Factor::HtpgC, FactorValue::Number(v)) => m.htpg_c = v,
            (Factor::AcPct, FactorValue::Number(v)) => m.ac_pct = v,
            (Factor::RapPct, FactorValue::Number(v)) => m.rap_pct = v,
            (Factor::RasPct, FactorValue::Number(v)) => m.ras_pct = v,
            (Factor::CrcPct, FactorValue::Number(v)) => m.crc_pct = v,
            (Factor::NmasMm, FactorValue::Number(v)) => m.nmas_mm = v,
            (Factor::TempC, FactorValue::Number(v)) => t = v,
            (Factor::Gradation, FactorValue::Gradation(g)) => m.gradation = g,
            (Factor::AggType, FactorValue::AggType(a)) => m.agg_type = a,
            (Factor::MixType, FactorValue::MixType(x)) => m.mix_type = x,
            (f, v) => return Err(f.bad(&v.to_string())),
        }
        Ok((m, t))
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Factor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Factor::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownFactor(s.to_string()))
    }
}

/// `"64-22"` → `(64, -22)`; also accepts `"64/-22"` and `"PG 64-22"`.
pub fn parse_grade(s: &str) -> Option<(f64, f64)> {
    let s = s.trim();
    let s = s
        .strip_prefix("PG")
        .or_else(|| s.strip_prefix("pg"))
        .unwrap_or(s)
        .trim();
    let (high, low) = if let Some((h, l)) = s.split_once('/') {
        (h.trim().parse::<f64>().ok()?, l.trim().parse::<f64>().ok()?)
    } else {
        // The low grade is written without its sign: 64-22 means (64, -22).
        let (h, l) = s.split_once('-')?;
        (h.trim().parse::<f64>().ok()?, -l.trim().parse::<f64>().ok()?)
    };
    (high.is_finite() && low.is_finite()).then_some((high, low))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum FactorValue {
    Number(f64),
    Grade { high: f64, low: f64 },
    Gradation(Gradation),
    AggType(AggregateType),
    MixType(MixType),
}

impl fmt::Display for FactorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorValue::Number(v) => write!(f, "{v}"),
            FactorValue::Grade { high, low } => write!(f, "{high}-{}", -low),
            FactorValue::Gradation(g) => write!(f, "{g}"),
            FactorValue::AggType(a) => write!(f, "{a}"),
            FactorValue::MixType(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepEntry {
    pub value: FactorValue,
    pub curve: PredictedCurve,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepResult {
    pub factor: Factor,
    pub base_value: FactorValue,
    pub base: PredictedCurve,
    pub entries: Vec<SweepEntry>,
}

/// One-factor-at-a-time sweep over the default grid: every other input is
/// held at its `base` value.
pub fn sensitivity_sweep(
    model: &Model,
    base: &MixtureDesign,
    temp_c: f64,
    factor: Factor,
    values: &[FactorValue],
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let base_curve = predict_curve(model, base, temp_c, None)?;
    let entries = values
        .iter()
        .map(|&value| {
            let (mix, t) = factor.apply(base, temp_c, value)?;
            Ok(SweepEntry {
                value,
                curve: predict_curve(model, &mix, t, None)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        factor,
        base_value: factor.current(base, temp_c),
        base: base_curve,
        entries,
    })
}

/// Default Hamburg pass criterion, mm of rut depth at 20,000 passes.
pub const DEFAULT_RUT_THRESHOLD_MM: f64 = 12.5;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PsdThresholds {
    pub rut_mm: f64,
    /// Minimum DC(T) fracture energy, J/m². No universal default exists.
    pub fracture_energy: Option<f64>,
}

impl Default for PsdThresholds {
    fn default() -> Self {
        Self {
            rut_mm: DEFAULT_RUT_THRESHOLD_MM,
            fracture_energy: None,
        }
    }
}

/// Rutting verdict first, cracking verdict second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Quadrant {
    #[cfg_attr(feature = "serde", serde(rename = "pass-pass"))]
    PassPass,
    #[cfg_attr(feature = "serde", serde(rename = "pass-fail"))]
    PassFail,
    #[cfg_attr(feature = "serde", serde(rename = "fail-pass"))]
    FailPass,
    #[cfg_attr(feature = "serde", serde(rename = "fail-fail"))]
    FailFail,
}

impl Quadrant {
    /// Ties pass on both axes.
    pub fn classify(rut_mm: f64, rut_threshold: f64, fracture_energy: f64, fe_threshold: f64) -> Self {
        match (rut_mm <= rut_threshold, fracture_energy >= fe_threshold) {
            (true, true) => Quadrant::PassPass,
            (true, false) => Quadrant::PassFail,
            (false, true) => Quadrant::FailPass,
            (false, false) => Quadrant::FailFail,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Quadrant::PassPass => "pass-pass",
            Quadrant::PassFail => "pass-fail",
            Quadrant::FailPass => "fail-pass",
            Quadrant::FailFail => "fail-fail",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PsdPoint {
    pub rut_at_20000_mm: f64,
    pub fracture_energy_j_per_m2: f64,
    pub rut_threshold_mm: f64,
    pub fe_threshold: f64,
    pub quadrant: Quadrant,
}

/// Places a mixture on the Hamburg / DC(T) performance-space diagram. The
/// fracture energy is measured or predicted elsewhere and passed through.
pub fn psd_point(
    model: &Model,
    mix: &MixtureDesign,
    temp_c: f64,
    fracture_energy: f64,
    thresholds: &PsdThresholds,
) -> Result<PsdPoint> {
    if !(fracture_energy >= 0.0) {
        return Err(Error::NegativeFractureEnergy(fracture_energy));
    }
    let fe_threshold = thresholds.fracture_energy.ok_or(Error::MissingThreshold)?;
    let rut = predict_point(model, mix, temp_c, MAX_PASS)?.clamped_mm;
    Ok(PsdPoint {
        rut_at_20000_mm: rut,
        fracture_energy_j_per_m2: fracture_energy,
        rut_threshold_mm: thresholds.rut_mm,
        fe_threshold,
        quadrant: Quadrant::classify(rut, thresholds.rut_mm, fracture_energy, fe_threshold),
    })
}

/// Helper for sweeps where the values are given as text.
pub fn parse_values(factor: Factor, texts: &[&str]) -> Result<Vec<FactorValue>> {
    texts.iter().map(|t| factor.parse_value(t)).collect()
}

/// Short human label for a sweep value, used in table headers.
pub fn value_label(factor: Factor, value: &FactorValue) -> String {
    format!("{}={}", factor.name(), value)
}
