//! Dataset schemas.
//!
//! CSV files start with one `# spec: {...}` comment line holding the fully
//! resolved experiment as JSON, followed by a header and one row per point:
//!
//! ```text
//! # spec: {"title":"...","unit":"nats","series":[...]}
//! series,point,mc_mean,mc_stderr,analytic,trials,jensen
//! random M=20 N=20,20,1.1495,0.0093,1.1040,10000,0.0
//! ```
//!
//! JSON files hold `{"spec": {...}, "rows": [...]}` with the same row fields.
//! `analytic` is empty (CSV) or `null` (JSON) when no formula applies.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{EssrEstimate, ExperimentSpec, Table1Row};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Nats,
    Bits,
}

impl Unit {
    /// Multiplier from nats to this unit.
    pub fn factor(self) -> f64 {
        match self {
            Unit::Nats => 1.0,
            Unit::Bits => std::f64::consts::LOG2_E,
        }
    }
}

impl std::str::FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(Unit::Nats),
            "bits" => Ok(Unit::Bits),
            _ => Err(Error::config(
                "unit",
                format!("unknown unit `{s}`; use nats or bits"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::config(
                "format",
                format!("unknown format `{s}`; use csv or json"),
            )),
        }
    }
}

/// A named experiment inside a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub name: String,
    pub spec: ExperimentSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub series: String,
    pub point: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub analytic: Option<f64>,
    pub trials: u64,
    pub jensen: f64,
}

impl DatasetRow {
    pub fn new(series: &str, e: &EssrEstimate) -> Self {
        Self {
            series: series.to_string(),
            point: e.point,
            mc_mean: e.mc_mean,
            mc_stderr: e.mc_stderr,
            analytic: e.analytic,
            trials: e.trials,
            jensen: e.jensen,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub title: String,
    pub unit: Unit,
    pub series: Vec<SeriesSpec>,
}

/// Rows of one or more experiments plus the specs that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub spec: DatasetSpec,
    pub rows: Vec<DatasetRow>,
}

impl Dataset {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            spec: DatasetSpec {
                title: title.into(),
                unit: Unit::Nats,
                series: Vec::new(),
            },
            rows: Vec::new(),
        }
    }

    pub fn push_series(&mut self, name: &str, spec: ExperimentSpec, estimates: &[EssrEstimate]) {
        self.rows
            .extend(estimates.iter().map(|e| DatasetRow::new(name, e)));
        self.spec.series.push(SeriesSpec {
            name: name.to_string(),
            spec,
        });
    }

    /// Rows of one series.
    pub fn series(&self, name: &str) -> Vec<&DatasetRow> {
        self.rows.iter().filter(|r| r.series == name).collect()
    }

    /// Copy with rate columns expressed in `unit`. Stored values are nats.
    pub fn in_unit(&self, unit: Unit) -> Dataset {
        let f = unit.factor() / self.spec.unit.factor();
        let mut out = self.clone();
        out.spec.unit = unit;
        for r in &mut out.rows {
            r.mc_mean *= f;
            r.mc_stderr *= f;
            r.analytic = r.analytic.map(|a| a * f);
            r.jensen *= f;
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# spec: {}", serde_json::to_string(&self.spec)?)?;
        let mut csv = csv::Writer::from_writer(w);
        for r in &self.rows {
            csv.serialize(r)?;
        }
        if self.rows.is_empty() {
            csv.write_record([
                "series",
                "point",
                "mc_mean",
                "mc_stderr",
                "analytic",
                "trials",
                "jensen",
            ])?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, w: W, format: OutputFormat) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(w),
            OutputFormat::Json => self.write_json(w),
        }
    }

    /// Parses the CSV layout written by [`Dataset::write_csv`].
    pub fn read_csv(text: &str) -> Result<Dataset> {
        let (first, body) = text
            .split_once('\n')
            .ok_or_else(|| Error::domain("empty dataset"))?;
        let json = first
            .strip_prefix("# spec: ")
            .ok_or_else(|| Error::domain("dataset is missing its `# spec:` line"))?;
        let spec: DatasetSpec = serde_json::from_str(json)?;
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let rows = reader
            .deserialize()
            .collect::<std::result::Result<Vec<DatasetRow>, _>>()?;
        Ok(Dataset { spec, rows })
    }
}

#[derive(Serialize)]
struct Table1Spec {
    #[serde(rename = "K")]
    users: usize,
    trials: u64,
    master_seed: u64,
}

pub fn write_table1_csv<W: Write>(
    rows: &[Table1Row],
    users: usize,
    trials: u64,
    master_seed: u64,
    mut w: W,
) -> Result<()> {
    let spec = Table1Spec {
        users,
        trials,
        master_seed,
    };
    writeln!(w, "# spec: {}", serde_json::to_string(&spec)?)?;
    let mut csv = csv::Writer::from_writer(w);
    for r in rows {
        csv.serialize(r)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_table1_json<W: Write>(
    rows: &[Table1Row],
    users: usize,
    trials: u64,
    master_seed: u64,
    mut w: W,
) -> Result<()> {
    #[derive(Serialize)]
    struct Doc<'a> {
        spec: Table1Spec,
        rows: &'a [Table1Row],
    }
    let doc = Doc {
        spec: Table1Spec {
            users,
            trials,
            master_seed,
        },
        rows,
    };
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::Regime;
    use crate::channel::SystemConfig;
    use crate::selection::Strategy;

    fn sample() -> Dataset {
        let spec = ExperimentSpec::point(
            SystemConfig::new(4, 4, 8, 2, 10.0).unwrap(),
            Strategy::Random,
            Regime::HighSnr,
        );
        let est = [EssrEstimate {
            point: 2.0,
            mc_mean: 0.5,
            mc_stderr: 0.01,
            analytic: None,
            trials: 10,
            jensen: 0.0,
        }];
        let mut d = Dataset::new("t");
        d.push_series("a", spec, &est);
        d
    }

    #[test]
    fn csv_round_trip() {
        let d = sample();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# spec: {"));
        assert_eq!(
            lines.next().unwrap(),
            "series,point,mc_mean,mc_stderr,analytic,trials,jensen"
        );
        assert_eq!(lines.next().unwrap(), "a,2.0,0.5,0.01,,10,0.0");
        assert_eq!(Dataset::read_csv(&text).unwrap(), d);
    }

    #[test]
    fn bits_conversion() {
        let d = sample().in_unit(Unit::Bits);
        assert!((d.rows[0].mc_mean - 0.5 / std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(d.rows[0].point, 2.0);
        let back = d.in_unit(Unit::Nats);
        assert!((back.rows[0].mc_mean - 0.5).abs() < 1e-15);
    }

    #[test]
    fn json_has_spec_and_rows() {
        let mut buf = Vec::new();
        sample().write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["spec"]["series"][0]["spec"]["trials"], 10_000);
        assert_eq!(v["rows"][0]["analytic"], serde_json::Value::Null);
    }
}
