//! Command-line mixture strings: comma-separated `key=value` pairs using the
//! CSV column names.
//!
//! ```text
//! htpg_c=46,ltpg_c=-34,ac_pct=5.9,nmas_mm=12.5,rap_pct=25,ras_pct=16.1,crc_pct=10
//! grade=64-22,ac_pct=5.5,nmas_mm=9.5,gradation=SMA
//! ```
//!
//! Required: the binder grade (`grade`, or both `htpg_c` and `ltpg_c`),
//! `ac_pct` and `nmas_mm`. Defaults: `mix_type=Plant`, `gradation=Dense`,
//! `agg_type=Limestone`, and `rap_pct`, `ras_pct`, `crc_pct` at 0.

use rutnet_core::mixture::{AggregateType, Gradation, MixType, MixtureDesign};
use rutnet_core::predict::parse_grade;

use crate::error::{Error, Result};

pub const KEYS: [&str; 11] = [
    "mix_type",
    "grade",
    "htpg_c",
    "ltpg_c",
    "ac_pct",
    "nmas_mm",
    "rap_pct",
    "ras_pct",
    "gradation",
    "agg_type",
    "crc_pct",
];

fn usage(msg: String) -> Error {
    Error::Usage(format!("mix spec: {msg}"))
}

fn number(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| usage(format!("{key}: '{value}' is not a number")))
}

fn category<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| usage(format!("{key}: unknown value '{value}'")))
}

/// Parses a spec and checks the mixture invariants.
pub fn parse_mix_spec(spec: &str) -> Result<MixtureDesign> {
    let mut htpg = None;
    let mut ltpg = None;
    let mut ac = None;
    let mut nmas = None;
    let mut mix = MixtureDesign {
        mix_type: MixType::Plant,
        htpg_c: 0.0,
        ltpg_c: 0.0,
        ac_pct: 0.0,
        nmas_mm: 0.0,
        rap_pct: 0.0,
        ras_pct: 0.0,
        gradation: Gradation::Dense,
        agg_type: AggregateType::Limestone,
        crc_pct: 0.0,
    };
    let mut seen = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("'{part}' is not key=value")))?;
        let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
        if seen.contains(&key) {
            return Err(usage(format!("{key} given twice")));
        }
        match key.as_str() {
            "mix_type" => mix.mix_type = category(&key, value)?,
            "gradation" => mix.gradation = category(&key, value)?,
            "agg_type" => mix.agg_type = category(&key, value)?,
            "grade" => {
                let (h, l) = parse_grade(value).ok_or_else(|| usage(format!("grade: '{value}' is not like 64-22")))?;
                if htpg.is_some() || ltpg.is_some() {
                    return Err(usage("give either grade or htpg_c/ltpg_c, not both".into()));
                }
                htpg = Some(h);
                ltpg = Some(l);
            }
            "htpg_c" | "ltpg_c" => {
                if seen.iter().any(|k| k == "grade") {
                    return Err(usage("give either grade or htpg_c/ltpg_c, not both".into()));
                }
                let v = Some(number(&key, value)?);
                if key == "htpg_c" {
                    htpg = v;
                } else {
                    ltpg = v;
                }
            }
            "ac_pct" => ac = Some(number(&key, value)?),
            "nmas_mm" => nmas = Some(number(&key, value)?),
            "rap_pct" => mix.rap_pct = number(&key, value)?,
            "ras_pct" => mix.ras_pct = number(&key, value)?,
            "crc_pct" => mix.crc_pct = number(&key, value)?,
            _ => {
                return Err(usage(format!(
                    "unknown key '{key}' (expected one of {})",
                    KEYS.join(", ")
                )))
            }
        }
        seen.push(key);
    }
    let require = |v: Option<f64>, key: &str| v.ok_or_else(|| usage(format!("missing {key}")));
    mix.htpg_c = require(htpg, "htpg_c (or grade)")?;
    mix.ltpg_c = require(ltpg, "ltpg_c (or grade)")?;
    mix.ac_pct = require(ac, "ac_pct")?;
    mix.nmas_mm = require(nmas, "nmas_mm")?;
    mix.check()?;
    Ok(mix)
}
