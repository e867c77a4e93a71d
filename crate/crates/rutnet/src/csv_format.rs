//! Hamburg curve CSV: one curve point per row, rows of a curve grouped by
//! `(mix_id, temp_c)`.
//!
//! ```text
//! mix_id,mix_type,htpg_c,ltpg_c,ac_pct,nmas_mm,abr_pct,rap_pct,ras_pct,gradation,agg_type,crc_pct,temp_c,pass,rut_mm
//! MO13_1,Plant,70,-22,5.7,9.5,,17,0,Dense,Limestone,0,50,100,0.41
//! ```
//!
//! An empty `abr_pct` means RAP + RAS. Categoricals are case-insensitive on
//! input; decimals use `.`. Numbers are written in Rust's shortest
//! round-trip form, so parse → write → parse is lossless.

use std::io::{Read, Write};

use rutnet_core::dataset::{CurvePoint, HwttCurve};
use rutnet_core::mixture::{MixtureDesign, MAX_PASS};
use rutnet_core::synth::MAX_RUT_MM;

use crate::error::{Error, Result};

pub const HEADER: &str =
    "mix_id,mix_type,htpg_c,ltpg_c,ac_pct,nmas_mm,abr_pct,rap_pct,ras_pct,gradation,agg_type,crc_pct,temp_c,pass,rut_mm";

fn malformed(line: u64, message: impl Into<String>) -> Error {
    Error::MalformedRow {
        line,
        message: message.into(),
    }
}

struct Row {
    mix_id: String,
    design: MixtureDesign,
    abr_pct: Option<f64>,
    temp_c: f64,
    point: CurvePoint,
}

fn parse_row(record: &csv::StringRecord, line: u64) -> Result<Row> {
    let columns: Vec<&str> = HEADER.split(',').collect();
    if record.len() != columns.len() {
        return Err(malformed(
            line,
            format!("expected {} fields, found {}", columns.len(), record.len()),
        ));
    }
    let field = |i: usize| record[i].trim();
    let number = |i: usize| -> Result<f64> {
        field(i)
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| malformed(line, format!("{}: '{}' is not a number", columns[i], field(i))))
    };
    let category = |i: usize, ok: bool| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(malformed(line, format!("{}: unknown value '{}'", columns[i], field(i))))
        }
    };

    let mix_id = field(0).to_string();
    if mix_id.is_empty() {
        return Err(malformed(line, "mix_id is empty"));
    }
    let mix_type = field(1).parse();
    category(1, mix_type.is_ok())?;
    let gradation = field(9).parse();
    category(9, gradation.is_ok())?;
    let agg_type = field(10).parse();
    category(10, agg_type.is_ok())?;
    let abr_pct = if field(6).is_empty() { None } else { Some(number(6)?) };
    let pass: u32 = field(13)
        .parse()
        .map_err(|_| malformed(line, format!("pass: '{}' is not a whole number", field(13))))?;
    if pass > MAX_PASS {
        return Err(malformed(line, format!("pass {pass} exceeds {MAX_PASS}")));
    }
    let rut_mm = number(14)?;
    if !(0.0..=MAX_RUT_MM).contains(&rut_mm) {
        return Err(malformed(line, format!("rut_mm {rut_mm} outside [0, {MAX_RUT_MM}]")));
    }
    Ok(Row {
        mix_id,
        design: MixtureDesign {
            mix_type: mix_type.unwrap(),
            htpg_c: number(2)?,
            ltpg_c: number(3)?,
            ac_pct: number(4)?,
            nmas_mm: number(5)?,
            rap_pct: number(7)?,
            ras_pct: number(8)?,
            gradation: gradation.unwrap(),
            agg_type: agg_type.unwrap(),
            crc_pct: number(11)?,
        },
        abr_pct,
        temp_c: number(12)?,
        point: CurvePoint { pass, rut_mm },
    })
}

/// Parses the CSV into curves in order of first appearance, points sorted by pass.
pub fn parse_hwtt_csv<R: Read>(input: R) -> Result<Vec<HwttCurve>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let header = reader.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    let found = header.iter().collect::<Vec<_>>().join(",");
    if found != HEADER {
        return Err(Error::HeaderMismatch {
            expected: HEADER.to_string(),
            found,
        });
    }

    let mut curves: Vec<HwttCurve> = Vec::new();
    let mut index: std::collections::HashMap<(String, u64), usize> = std::collections::HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = parse_row(&record, line)?;
        let key = (row.mix_id.clone(), row.temp_c.to_bits());
        match index.get(&key) {
            Some(&i) => {
                let curve = &mut curves[i];
                if curve.design != row.design || curve.abr_pct != row.abr_pct {
                    return Err(malformed(
                        line,
                        format!("mixture fields differ from earlier rows of {}", row.mix_id),
                    ));
                }
                curve.points.push(row.point);
            }
            None => {
                index.insert(key, curves.len());
                curves.push(HwttCurve {
                    mix_id: row.mix_id,
                    design: row.design,
                    temp_c: row.temp_c,
                    abr_pct: row.abr_pct,
                    points: vec![row.point],
                });
            }
        }
    }
    for curve in &mut curves {
        curve.points.sort_by_key(|p| p.pass);
        if curve.points.windows(2).any(|w| w[0].pass == w[1].pass) {
            return Err(Error::NonmonotonicCurve(curve.mix_id.clone()));
        }
    }
    Ok(curves)
}

pub fn parse_hwtt_str(text: &str) -> Result<Vec<HwttCurve>> {
    parse_hwtt_csv(text.as_bytes())
}

pub fn write_hwtt_csv<W: Write>(curves: &[HwttCurve], output: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(output);
    writer.write_record(HEADER.split(',')).map_err(csv_io)?;
    for curve in curves {
        let d = &curve.design;
        let abr = curve.abr_pct.map(|v| v.to_string()).unwrap_or_default();
        for p in &curve.points {
            writer
                .write_record([
                    curve.mix_id.clone(),
                    d.mix_type.to_string(),
                    d.htpg_c.to_string(),
                    d.ltpg_c.to_string(),
                    d.ac_pct.to_string(),
                    d.nmas_mm.to_string(),
                    abr.clone(),
                    d.rap_pct.to_string(),
                    d.ras_pct.to_string(),
                    d.gradation.to_string(),
                    d.agg_type.to_string(),
                    d.crc_pct.to_string(),
                    curve.temp_c.to_string(),
                    p.pass.to_string(),
                    p.rut_mm.to_string(),
                ])
                .map_err(csv_io)?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn to_csv_string(curves: &[HwttCurve]) -> String {
    let mut buf = Vec::new();
    write_hwtt_csv(curves, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
