//! CSV ingestion and export of multi-channel sensor logs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::SensorSample;
use crate::error::{Error, Result};

/// `value = scale · raw + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCalibration {
    pub scale: f64,
    pub offset: f64,
}

impl LinearCalibration {
    pub fn apply(&self, raw: f64) -> f64 {
        self.scale * raw + self.offset
    }
}

/// Column names and optional raw-voltage calibrations for a log file.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMap {
    pub time: String,
    pub pressure: String,
    /// Degrees after calibration.
    pub angle: String,
    /// Kelvin after calibration.
    pub temperature: String,
    pub heater: String,
    /// Optional logged heater current, A.
    pub current: Option<String>,
    pub angle_calibration: Option<LinearCalibration>,
    pub temperature_calibration: Option<LinearCalibration>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            time: "time_s".into(),
            pressure: "pressure_gauge_pa".into(),
            angle: "angle_deg".into(),
            temperature: "temperature_k".into(),
            heater: "heater_v".into(),
            current: None,
            angle_calibration: None,
            temperature_calibration: None,
        }
    }
}

pub fn load_timeseries(path: &Path, columns: &ColumnMap) -> Result<Vec<SensorSample>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader.headers().map_err(|e| csv_error(path, 1, e))?.clone();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema {
                column: name.to_string(),
                path: path.to_path_buf(),
            })
    };
    let i_time = index(&columns.time)?;
    let i_pressure = index(&columns.pressure)?;
    let i_angle = index(&columns.angle)?;
    let i_temperature = index(&columns.temperature)?;
    let i_heater = index(&columns.heater)?;
    let i_current = columns.current.as_deref().map(index).transpose()?;

    let mut samples = Vec::new();
    for (k, record) in reader.records().enumerate() {
        // Row numbers count the header as row 1.
        let row = k + 2;
        let record = record.map_err(|e| csv_error(path, row, e))?;
        let field = |i: usize, name: &str| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            let v: f64 = raw.parse().map_err(|_| Error::Data {
                row,
                path: path.to_path_buf(),
                message: format!("column `{name}`: cannot parse `{raw}` as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Data {
                    row,
                    path: path.to_path_buf(),
                    message: format!("column `{name}` is not finite"),
                });
            }
            Ok(v)
        };
        let t = field(i_time, &columns.time)?;
        let mut angle_deg = field(i_angle, &columns.angle)?;
        if let Some(cal) = columns.angle_calibration {
            angle_deg = cal.apply(angle_deg);
        }
        let mut temperature = field(i_temperature, &columns.temperature)?;
        if let Some(cal) = columns.temperature_calibration {
            temperature = cal.apply(temperature);
        }
        let sample = SensorSample {
            t,
            pressure_gauge: field(i_pressure, &columns.pressure)?,
            angle: angle_deg.to_radians(),
            temperature,
            heater_voltage: field(i_heater, &columns.heater)?,
            heater_current: match (i_current, &columns.current) {
                (Some(i), Some(name)) => Some(field(i, name)?),
                _ => None,
            },
        };
        if t < 0.0 {
            return Err(Error::Data {
                row,
                path: path.to_path_buf(),
                message: format!("negative time {t}"),
            });
        }
        if let Some(prev) = samples.last().map(|s: &SensorSample| s.t) {
            if t < prev {
                return Err(Error::Data {
                    row,
                    path: path.to_path_buf(),
                    message: format!("time goes backwards ({t} s after {prev} s)"),
                });
            }
        }
        samples.push(sample);
    }
    Ok(samples)
}

fn csv_error(path: &Path, row: usize, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Data {
            row,
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

/// Writes samples with the default column names. Angles are written in
/// degrees; numbers use the shortest exact representation.
pub fn write_timeseries(path: &Path, samples: &[SensorSample]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let cols = ColumnMap::default();
    let with_current = samples.iter().any(|s| s.heater_current.is_some());
    let mut write = || -> std::io::Result<()> {
        write!(
            w,
            "{},{},{},{},{}",
            cols.time, cols.pressure, cols.angle, cols.temperature, cols.heater
        )?;
        if with_current {
            write!(w, ",heater_a")?;
        }
        writeln!(w)?;
        for s in samples {
            write!(
                w,
                "{},{},{},{},{}",
                s.t,
                s.pressure_gauge,
                s.angle.to_degrees(),
                s.temperature,
                s.heater_voltage
            )?;
            if with_current {
                write!(w, ",{}", s.heater_current.unwrap_or(0.0))?;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}
