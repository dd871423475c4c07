use std::fs;

use softheat::analysis::{load_timeseries, ColumnMap, LinearCalibration};
use softheat::Error;

const HEADER: &str = "time_s,pressure_gauge_pa,angle_deg,temperature_k,heater_v";

fn write(body: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.csv");
    fs::write(&path, body).unwrap();
    (dir, path)
}

#[test]
fn loads_and_converts_degrees() {
    let (_d, path) = write(&format!(
        "{HEADER}\n0,100,1.5,300,0\n0.02,101,1.6,300.1,4\n"
    ));
    let s = load_timeseries(&path, &ColumnMap::default()).unwrap();
    assert_eq!(s.len(), 2);
    assert!((s[0].angle - 1.5f64.to_radians()).abs() < 1e-15);
    assert_eq!(s[1].heater_voltage, 4.0);
    assert!(s[0].heater_current.is_none());
}

#[test]
fn missing_column_is_a_schema_error() {
    let (_d, path) = write("time_s,pressure_gauge_pa,angle_deg,temperature_k\n0,1,2,3\n");
    match load_timeseries(&path, &ColumnMap::default()) {
        Err(Error::Schema { column, .. }) => assert_eq!(column, "heater_v"),
        other => panic!("expected schema error, got {other:?}"),
    }
}

#[test]
fn bad_rows_report_their_number() {
    for (body, row) in [
        (format!("{HEADER}\n0,1,2,3,4\n0.1,x,2,3,4\n"), 3),
        (
            format!("{HEADER}\n0,1,2,3,4\n0.2,1,2,3,4\n0.1,1,2,3,4\n"),
            4,
        ),
        (format!("{HEADER}\n-1,1,2,3,4\n"), 2),
        (format!("{HEADER}\n0,NaN,2,3,4\n"), 2),
    ] {
        let (_d, path) = write(&body);
        match load_timeseries(&path, &ColumnMap::default()) {
            Err(Error::Data { row: r, .. }) => assert_eq!(r, row, "{body}"),
            other => panic!("expected data error, got {other:?}"),
        }
    }
}

#[test]
fn custom_columns_calibration_and_current() {
    let (_d, path) = write("t,p,pot,tc,relay,amps\n0,5,0.5,1.0,4,0.9\n");
    let cols = ColumnMap {
        time: "t".into(),
        pressure: "p".into(),
        angle: "pot".into(),
        temperature: "tc".into(),
        heater: "relay".into(),
        current: Some("amps".into()),
        angle_calibration: Some(LinearCalibration {
            scale: 2.0,
            offset: 0.0,
        }),
        temperature_calibration: Some(LinearCalibration {
            scale: 10.0,
            offset: 290.0,
        }),
    };
    let s = load_timeseries(&path, &cols).unwrap();
    assert!((s[0].angle - 1f64.to_radians()).abs() < 1e-15);
    assert_eq!(s[0].temperature, 300.0);
    assert_eq!(s[0].heater_current, Some(0.9));
}

#[test]
fn missing_file_is_io() {
    let r = load_timeseries(
        std::path::Path::new("/no/such/log.csv"),
        &ColumnMap::default(),
    );
    assert!(matches!(r, Err(Error::Io { .. })));
}
