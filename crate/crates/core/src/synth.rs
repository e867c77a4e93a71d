//! Synthetic Hamburg curves with closed-form ground truth.
//!
//! A mixture's *severity* `a` is a clipped linear score of its inputs; the
//! curve is
//!
//! ```text
//! rut(p) = a·(1 − e^(−p/3000)) + (a/40000)·p + 0.0005·max(0, a − 4)·(max(0, p − 10000)/1000)²
//! ```
//!
//! capped at 20 mm. Severity rises with temperature, NMAS, asphalt content,
//! lab production; it falls with stiffer binder, recycled binder, rubber, SMA
//! gradation and granite aggregate. The last term only switches on for severe
//! mixes late in the test, giving a stripping-like upturn.
//!
//! Sampling uses two [`SplitMix64`] streams of the seed: stream 1 draws the
//! mixtures, stream 2 the per-point Gaussian noise. Draw order per mixture is
//! documented on [`sample_mixture`] so the dataset can be regenerated
//! elsewhere bit for bit.

use alloc::format;
use alloc::vec::Vec;

use crate::dataset::{CurvePoint, HwttCurve};
use crate::mixture::{AggregateType, Gradation, MixType, MixtureDesign, MAX_PASS};
use crate::rng::SplitMix64;

/// Test-termination ceiling, mm.
pub const MAX_RUT_MM: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthConfig {
    pub n_mixes: usize,
    pub points_per_curve: usize,
    pub noise_std_mm: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_mixes: 50,
            points_per_curve: 200,
            noise_std_mm: 0.05,
            seed: 7,
        }
    }
}

impl SynthConfig {
    pub fn check(&self) -> crate::Result<()> {
        if self.n_mixes == 0 {
            return Err(crate::Error::InvalidConfig("n_mixes must be at least 1"));
        }
        if self.points_per_curve < 2 {
            return Err(crate::Error::InvalidConfig("points_per_curve must be at least 2"));
        }
        if !(self.noise_std_mm >= 0.0) {
            return Err(crate::Error::InvalidConfig("noise_std_mm must be non-negative"));
        }
        Ok(())
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn severity(mix: &MixtureDesign, temp_c: f64) -> f64 {
    let score = 2.0 + 0.12 * (temp_c - 50.0)
        - 0.10 * (mix.htpg_c - 58.0)
        - 0.04 * (mix.rap_pct + mix.ras_pct)
        - 0.06 * mix.crc_pct
        + 0.03 * (mix.nmas_mm - 12.5)
        + 0.30 * (mix.ac_pct - 5.5)
        + 0.20 * indicator(mix.mix_type == MixType::Lab)
        - 0.50 * indicator(mix.gradation == Gradation::Sma)
        - 0.30 * indicator(mix.agg_type == AggregateType::Granite);
    score.max(0.3)
}

/// Noiseless rut depth at one pass count.
pub fn noiseless_rut(severity: f64, pass: u32) -> f64 {
    let a = severity;
    let p = pass as f64;
    let late = (p - 10_000.0).max(0.0) / 1000.0;
    let rut = a * (1.0 - libm::exp(-p / 3000.0)) + (a / 40_000.0) * p + 0.0005 * (a - 4.0).max(0.0) * late * late;
    rut.min(MAX_RUT_MM)
}

pub fn noiseless_curve(severity: f64, grid: &[u32]) -> Vec<f64> {
    grid.iter().map(|&p| noiseless_rut(severity, p)).collect()
}

/// `round(20000·k/n)` for `k = 1..=n`; 100, 200, …, 20000 for `n = 200`.
pub fn pass_grid(points: usize) -> Vec<u32> {
    (1..=points as u64)
        .map(|k| ((k * MAX_PASS as u64 * 2 + points as u64) / (2 * points as u64)) as u32)
        .collect()
}

// Binder grades in the study set, (high, low) °C.
const GRADES: [(f64, f64); 7] = [
    (76.0, -22.0),
    (70.0, -22.0),
    (70.0, -28.0),
    (64.0, -22.0),
    (64.0, -34.0),
    (58.0, -28.0),
    (46.0, -34.0),
];
const NMAS: [f64; 4] = [4.75, 9.5, 12.5, 19.0];
const TEMPS: [f64; 5] = [40.0, 46.0, 50.0, 58.0, 64.0];

/// Draws one mixture and its test temperature. Draw order:
///
/// 1. mix type: Lab if `u < 0.4`
/// 2. grade: `below(7)` into the grade list
/// 3. AC: `(51 + below(29)) / 10` %
/// 4. NMAS: `below(4)` into {4.75, 9.5, 12.5, 19}
/// 5. RAP: 0 if `u < 0.2`, else `below(354) / 10` %
/// 6. RAS: 0 if `u < 0.5`, else `below(m + 1) / 10` % with
///    `m = min(330, 483 − 10·RAP)` (total ABR stays below 48.4)
/// 7. gradation: SMA if `u < 0.25`
/// 8. aggregate: Granite if `u < 0.25`
/// 9. CRC: 0 if `u < 0.5`, else `(1 + below(20))` %
/// 10. temperature: `below(5)` into {40, 46, 50, 58, 64}
///
/// Steps 5 and 6 both consume the conditional draw only when not zero.
pub fn sample_mixture(rng: &mut SplitMix64) -> (MixtureDesign, f64) {
    let mix_type = if rng.next_f64() < 0.4 {
        MixType::Lab
    } else {
        MixType::Plant
    };
    let (htpg_c, ltpg_c) = GRADES[rng.below(GRADES.len())];
    let ac_pct = (51 + rng.below(29)) as f64 / 10.0;
    let nmas_mm = NMAS[rng.below(NMAS.len())];
    let rap_tenths = if rng.next_f64() < 0.2 { 0 } else { rng.below(354) };
    let ras_tenths = if rng.next_f64() < 0.5 {
        0
    } else {
        let limit = 330.min(483 - rap_tenths);
        rng.below(limit + 1)
    };
    let gradation = if rng.next_f64() < 0.25 {
        Gradation::Sma
    } else {
        Gradation::Dense
    };
    let agg_type = if rng.next_f64() < 0.25 {
        AggregateType::Granite
    } else {
        AggregateType::Limestone
    };
    let crc_pct = if rng.next_f64() < 0.5 {
        0.0
    } else {
        (1 + rng.below(20)) as f64
    };
    let temp_c = TEMPS[rng.below(TEMPS.len())];
    (
        MixtureDesign {
            mix_type,
            htpg_c,
            ltpg_c,
            ac_pct,
            nmas_mm,
            rap_pct: rap_tenths as f64 / 10.0,
            ras_pct: ras_tenths as f64 / 10.0,
            gradation,
            agg_type,
            crc_pct,
        },
        temp_c,
    )
}

/// One curve per mixture, ids `SYN001`, `SYN002`, …
///
/// Each point gets independent `N(0, noise_std²)` noise; the noisy trace is
/// clamped to `[0, 20]` and then made non-decreasing with a running maximum.
pub fn generate_dataset(cfg: &SynthConfig) -> crate::Result<Vec<HwttCurve>> {
    cfg.check()?;
    let mut mixes = SplitMix64::stream(cfg.seed, 1);
    let mut noise = SplitMix64::stream(cfg.seed, 2);
    let grid = pass_grid(cfg.points_per_curve);
    let curves = (0..cfg.n_mixes)
        .map(|i| {
            let (design, temp_c) = sample_mixture(&mut mixes);
            let a = severity(&design, temp_c);
            let mut floor = 0.0f64;
            let points = grid
                .iter()
                .map(|&pass| {
                    let noisy = noiseless_rut(a, pass) + cfg.noise_std_mm * noise.next_gaussian();
                    floor = floor.max(noisy.clamp(0.0, MAX_RUT_MM));
                    CurvePoint { pass, rut_mm: floor }
                })
                .collect();
            HwttCurve {
                mix_id: format!("SYN{:03}", i + 1),
                design,
                temp_c,
                abr_pct: None,
                points,
            }
        })
        .collect();
    Ok(curves)
}
