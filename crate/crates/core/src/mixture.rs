//! Asphalt-mixture inputs and their 13-feature encoding.
//!
//! Feature order is fixed:
//! `[mix_type, UTI, HTPG, AC, NMAS, ABR, RAP, RAS, G, AT, CRC, T, Pass]`.
//! Categoricals are coded 1/2 (Plant/Lab, Dense/SMA, Limestone/Granite).

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

pub const FEATURE_COUNT: usize = 13;

/// Test termination: a Hamburg run never exceeds this many wheel passes.
pub const MAX_PASS: u32 = 20_000;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "mix_type",
    "uti_c",
    "htpg_c",
    "ac_pct",
    "nmas_mm",
    "abr_pct",
    "rap_pct",
    "ras_pct",
    "gradation",
    "agg_type",
    "crc_pct",
    "temp_c",
    "pass",
];

pub(crate) const IDX_ABR: usize = 5;
pub(crate) const IDX_PASS: usize = 12;

macro_rules! categorical {
    ($(#[$meta:meta])* $name:ident { $first:ident = $first_label:literal, $second:ident = $second_label:literal }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        #[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
        pub enum $name {
            #[cfg_attr(feature = "serde", serde(rename = $first_label))]
            $first,
            #[cfg_attr(feature = "serde", serde(rename = $second_label))]
            $second,
        }

        impl $name {
            pub const ALL: [$name; 2] = [$name::$first, $name::$second];

            pub fn code(self) -> f64 {
                match self {
                    $name::$first => 1.0,
                    $name::$second => 2.0,
                }
            }

            pub fn label(self) -> &'static str {
                match self {
                    $name::$first => $first_label,
                    $name::$second => $second_label,
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }

        /// Case-insensitive.
        impl FromStr for $name {
            type Err = ();

            fn from_str(s: &str) -> core::result::Result<Self, ()> {
                let s = s.trim();
                if s.eq_ignore_ascii_case($first_label) {
                    Ok($name::$first)
                } else if s.eq_ignore_ascii_case($second_label) {
                    Ok($name::$second)
                } else {
                    Err(())
                }
            }
        }
    };
}

categorical!(
    /// Plant-produced lab-compacted versus lab-produced lab-compacted.
    MixType { Plant = "Plant", Lab = "Lab" }
);
categorical!(Gradation { Dense = "Dense", Sma = "SMA" });
categorical!(AggregateType { Limestone = "Limestone", Granite = "Granite" });

/// Mixture-level inputs. UTI and ABR are derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MixtureDesign {
    pub mix_type: MixType,
    /// High-temperature performance grade, °C (64 for PG 64-22).
    pub htpg_c: f64,
    /// Low-temperature performance grade, °C (-22 for PG 64-22).
    pub ltpg_c: f64,
    pub ac_pct: f64,
    pub nmas_mm: f64,
    /// Binder replacement from reclaimed asphalt pavement, %.
    pub rap_pct: f64,
    /// Binder replacement from recycled asphalt shingles, %.
    pub ras_pct: f64,
    pub gradation: Gradation,
    pub agg_type: AggregateType,
    /// Crumb rubber, % of virgin binder.
    pub crc_pct: f64,
}

impl MixtureDesign {
    pub fn abr_pct(&self) -> f64 {
        self.rap_pct + self.ras_pct
    }

    pub fn uti_c(&self) -> Result<f64> {
        compute_uti(self.htpg_c, self.ltpg_c)
    }

    /// Checks the structural invariants (positive grade interval, non-negative contents).
    pub fn check(&self) -> Result<()> {
        compute_uti(self.htpg_c, self.ltpg_c)?;
        let non_negative = [
            ("ac_pct", self.ac_pct),
            ("rap_pct", self.rap_pct),
            ("ras_pct", self.ras_pct),
            ("crc_pct", self.crc_pct),
        ];
        for (field, value) in non_negative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidMixture {
                    field,
                    requirement: "finite and >= 0",
                    value,
                });
            }
        }
        if !(self.nmas_mm > 0.0) || !self.nmas_mm.is_finite() {
            return Err(Error::InvalidMixture {
                field: "nmas_mm",
                requirement: "finite and > 0",
                value: self.nmas_mm,
            });
        }
        Ok(())
    }

    /// The 12 pass-independent features, no validity checks.
    fn raw_features(&self, temp_c: f64) -> [f64; FEATURE_COUNT] {
        [
            self.mix_type.code(),
            self.htpg_c - self.ltpg_c,
            self.htpg_c,
            self.ac_pct,
            self.nmas_mm,
            self.abr_pct(),
            self.rap_pct,
            self.ras_pct,
            self.gradation.code(),
            self.agg_type.code(),
            self.crc_pct,
            temp_c,
            0.0,
        ]
    }
}

/// Useful temperature interval, `htpg - ltpg`.
pub fn compute_uti(htpg_c: f64, ltpg_c: f64) -> Result<f64> {
    // Negated comparison so NaN is rejected too.
    if !(htpg_c > ltpg_c) {
        return Err(Error::InvalidGrade {
            high: htpg_c,
            low: ltpg_c,
        });
    }
    Ok(htpg_c - ltpg_c)
}

/// One model input row in the fixed feature order.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn abr(&self) -> f64 {
        self.0[IDX_ABR]
    }

    pub fn pass(&self) -> f64 {
        self.0[IDX_PASS]
    }

    /// Replaces the ABR slot, for datasets that state ABR explicitly.
    pub fn with_abr(mut self, abr_pct: f64) -> Self {
        self.0[IDX_ABR] = abr_pct;
        self
    }
}

pub fn encode(mix: &MixtureDesign, temp_c: f64, pass: u32) -> Result<FeatureVector> {
    mix.check()?;
    if pass > MAX_PASS {
        return Err(Error::OutOfBoundsPass(pass));
    }
    let mut values = mix.raw_features(temp_c);
    values[IDX_PASS] = pass as f64;
    Ok(FeatureVector(values))
}

/// Inclusive per-feature bounds of the training envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureRanges {
    pub bounds: [(f64, f64); FEATURE_COUNT],
}

impl Default for FeatureRanges {
    /// The envelope of the 29 study mixtures. HTPG reaches 76 (PG 76-22 is in
    /// the grade list) and ABR starts at 0 (virgin mixes were tested).
    fn default() -> Self {
        Self {
            bounds: [
                (1.0, 2.0),
                (80.0, 98.0),
                (46.0, 76.0),
                (5.1, 7.9),
                (4.75, 19.0),
                (0.0, 48.4),
                (0.0, 35.3),
                (0.0, 33.0),
                (1.0, 2.0),
                (1.0, 2.0),
                (0.0, 20.0),
                (40.0, 64.0),
                (0.0, 20000.0),
            ],
        }
    }
}

impl FeatureRanges {
    pub fn new(bounds: [(f64, f64); FEATURE_COUNT]) -> Result<Self> {
        if bounds.iter().any(|&(lo, hi)| !(lo <= hi)) {
            return Err(Error::InvalidConfig("feature range min must not exceed max"));
        }
        Ok(Self { bounds })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RangeViolation {
    pub feature: &'static str,
    pub value: f64,
    pub min: f64,
    pub max: f64,
}

/// Reports every pass-independent feature outside `ranges`. Never fails:
/// extrapolation is allowed, only flagged.
pub fn validate(mix: &MixtureDesign, temp_c: f64, ranges: &FeatureRanges) -> Vec<RangeViolation> {
    let values = mix.raw_features(temp_c);
    (0..IDX_PASS)
        .filter_map(|i| {
            let (min, max) = ranges.bounds[i];
            let value = values[i];
            (!(value >= min && value <= max)).then_some(RangeViolation {
                feature: FEATURE_NAMES[i],
                value,
                min,
                max,
            })
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn mix(htpg: f64, ltpg: f64, ac: f64, nmas: f64, rap: f64, ras: f64, crc: f64) -> MixtureDesign {
        MixtureDesign {
            mix_type: MixType::Plant,
            htpg_c: htpg,
            ltpg_c: ltpg,
            ac_pct: ac,
            nmas_mm: nmas,
            rap_pct: rap,
            ras_pct: ras,
            gradation: Gradation::Dense,
            agg_type: AggregateType::Limestone,
            crc_pct: crc,
        }
    }

    /// The six plant mixtures listed with full-curve comparisons.
    pub fn table3() -> [(&'static str, MixtureDesign); 6] {
        [
            ("MO13_1", mix(70.0, -22.0, 5.7, 9.5, 17.0, 0.0, 0.0)),
            ("US54_1", mix(58.0, -28.0, 5.2, 12.5, 0.0, 33.0, 0.0)),
            ("1807", mix(46.0, -34.0, 6.2, 19.0, 34.4, 14.0, 0.0)),
            ("1818", mix(64.0, -22.0, 5.7, 9.5, 20.4, 0.0, 0.0)),
            ("1829", mix(70.0, -28.0, 7.9, 4.75, 17.8, 9.3, 10.0)),
            ("1835", mix(46.0, -34.0, 5.9, 12.5, 25.0, 16.1, 10.0)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn uti_examples() {
        assert_eq!(compute_uti(64.0, -22.0), Ok(86.0));
        assert_eq!(compute_uti(46.0, -34.0), Ok(80.0));
        for x in [-10.0, 0.0, 58.0] {
            assert!(matches!(compute_uti(x, x), Err(Error::InvalidGrade { .. })));
        }
        assert!(compute_uti(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn encodes_mo13_1() {
        let (_, m) = table3()[0];
        let v = encode(&m, 50.0, 20_000).unwrap();
        assert_eq!(
            v.0,
            [1.0, 92.0, 70.0, 5.7, 9.5, 17.0, 17.0, 0.0, 1.0, 1.0, 0.0, 50.0, 20000.0]
        );
    }

    #[test]
    fn abr_of_1829_is_rap_plus_ras() {
        let (_, m) = table3()[4];
        let v = encode(&m, 50.0, 100).unwrap();
        assert_eq!(v.abr(), 17.8 + 9.3);
        assert!((v.abr() - 27.1).abs() < 1e-12);
        assert_eq!(v, encode(&m, 50.0, 100).unwrap());
    }

    #[test]
    fn encode_errors() {
        let m = mix(58.0, 58.0, 5.5, 12.5, 0.0, 0.0, 0.0);
        assert!(matches!(encode(&m, 50.0, 0), Err(Error::InvalidGrade { .. })));
        let ok = mix(58.0, -28.0, 5.5, 12.5, 0.0, 0.0, 0.0);
        assert_eq!(encode(&ok, 50.0, 20_001), Err(Error::OutOfBoundsPass(20_001)));
        let neg = mix(58.0, -28.0, 5.5, 12.5, -1.0, 0.0, 0.0);
        assert!(matches!(
            encode(&neg, 50.0, 0),
            Err(Error::InvalidMixture { field: "rap_pct", .. })
        ));
        let zero_nmas = mix(58.0, -28.0, 5.5, 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            encode(&zero_nmas, 50.0, 0),
            Err(Error::InvalidMixture { field: "nmas_mm", .. })
        ));
    }

    #[test]
    fn validate_examples() {
        let ranges = FeatureRanges::default();
        let (_, m) = table3()[3];
        assert!(validate(&m, 50.0, &ranges).iter().all(|v| v.feature != "temp_c"));

        let mut rich = m;
        rich.ac_pct = 9.0;
        let violations = validate(&rich, 50.0, &ranges);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].feature, "ac_pct");
        assert_eq!(violations[0].max, 7.9);

        let hot = validate(&m, 70.0, &ranges);
        assert_eq!(hot.len(), 1);
        assert_eq!(hot[0].feature, "temp_c");
    }

    #[test]
    fn validate_is_inclusive_at_minima() {
        let mut ranges = FeatureRanges::default();
        // Make the minima mutually consistent: UTI = HTPG - LTPG.
        let m = MixtureDesign {
            mix_type: MixType::Plant,
            htpg_c: 46.0,
            ltpg_c: -34.0,
            ac_pct: 5.1,
            nmas_mm: 4.75,
            rap_pct: 0.0,
            ras_pct: 0.0,
            gradation: Gradation::Dense,
            agg_type: AggregateType::Limestone,
            crc_pct: 0.0,
        };
        assert!(validate(&m, 40.0, &ranges).is_empty());
        ranges.bounds[0] = (1.0, 1.0);
        assert!(validate(&m, 40.0, &ranges).is_empty());
    }

    #[test]
    fn table3_mixes_lie_in_default_envelope() {
        let ranges = FeatureRanges::default();
        for (id, m) in table3() {
            assert!(validate(&m, 50.0, &ranges).is_empty(), "{id}");
        }
    }

    #[test]
    fn categorical_parsing_ignores_case() {
        assert_eq!("plant".parse::<MixType>(), Ok(MixType::Plant));
        assert_eq!("sma".parse::<Gradation>(), Ok(Gradation::Sma));
        assert_eq!(" GRANITE ".parse::<AggregateType>(), Ok(AggregateType::Granite));
        assert!("basalt".parse::<AggregateType>().is_err());
        assert_eq!(Gradation::Sma.code(), 2.0);
    }

    #[test]
    fn rejects_inverted_ranges() {
        let mut b = FeatureRanges::default().bounds;
        b[3] = (8.0, 5.0);
        assert!(FeatureRanges::new(b).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_mix() -> impl Strategy<Value = MixtureDesign> {
            (
                30.0f64..90.0,
                1.0f64..50.0,
                0.0f64..10.0,
                1.0f64..25.0,
                0.0f64..50.0,
                0.0f64..50.0,
                0.0f64..25.0,
                any::<bool>(),
            )
                .prop_map(|(h, span, ac, nmas, rap, ras, crc, lab)| MixtureDesign {
                    mix_type: if lab { MixType::Lab } else { MixType::Plant },
                    htpg_c: h,
                    ltpg_c: h - span,
                    ac_pct: ac,
                    nmas_mm: nmas,
                    rap_pct: rap,
                    ras_pct: ras,
                    gradation: Gradation::Dense,
                    agg_type: AggregateType::Granite,
                    crc_pct: crc,
                })
        }

        proptest! {
            #[test]
            fn abr_slot_is_rap_plus_ras(m in any_mix(), t in 30.0f64..70.0, p in 0u32..=20_000) {
                let v = encode(&m, t, p).unwrap();
                prop_assert_eq!(v.0[5], v.0[6] + v.0[7]);
                prop_assert_eq!(v, encode(&m, t, p).unwrap());
            }

            #[test]
            fn uti_plus_low_is_high(h in -100i32..100, span in 1i32..100) {
                let (h, l) = (h as f64, (h - span) as f64);
                prop_assert_eq!(compute_uti(h, l).unwrap() + l, h);
            }
        }
    }
}
