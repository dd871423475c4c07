//! Experimental log analysis: ingestion, smoothing, heater-cycle
//! segmentation, per-cycle work/heat/efficiency, and actuator
//! characterization estimates.

mod characterize;
mod io;
mod signal;
mod synthetic;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub use characterize::{
    characterize, check_ratio_plausibility, expansion_ratio_isothermal,
    predict_isentropic_pressure_change, predicted_otto_efficiency, CharacterizationInputs,
    CharacterizationReport, PlausibilityWarning, SpanComparison, DEFAULT_RATIO_PLAUSIBILITY_LIMIT,
};
pub use io::{load_timeseries, write_timeseries, ColumnMap, LinearCalibration};
pub use signal::{segment_cycles, smooth_angle, DEFAULT_HEATER_THRESHOLD};
pub use synthetic::{generate_synthetic, GroundTruth, NoiseLevels, SyntheticConfig, SyntheticLog};

use crate::compare::format_sig;
use crate::error::{Error, Result};
use crate::rig::{
    net_cycle_work, stroke_displacement, LoadMode, STANDARD_ATMOSPHERE, STANDARD_GRAVITY,
};

/// One timestamped reading of all channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSample {
    /// s
    pub t: f64,
    /// Pa gauge
    pub pressure_gauge: f64,
    /// rad
    pub angle: f64,
    /// K
    pub temperature: f64,
    /// Relay voltage, V
    pub heater_voltage: f64,
    /// Heater current when logged, A
    pub heater_current: Option<f64>,
}

/// One heater period of a log, rising edge to next rising edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSegment<'a> {
    pub samples: &'a [SensorSample],
    /// Index of the first sample in the full log.
    pub start_index: usize,
    pub heater_on_duration: f64,
    /// Time integral of logged heater current while on, A·s, when the log
    /// carries a current channel.
    pub heater_charge: Option<f64>,
    pub theta_min: f64,
    pub theta_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl<'a> CycleSegment<'a> {
    pub(crate) fn new(
        samples: &'a [SensorSample],
        start_index: usize,
        heater_on_duration: f64,
        heater_charge: Option<f64>,
    ) -> Self {
        let fold = |f: fn(&SensorSample) -> f64| {
            samples
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                })
        };
        let (theta_min, theta_max) = fold(|s| s.angle);
        let (p_min, p_max) = fold(|s| s.pressure_gauge);
        let (t_min, t_max) = fold(|s| s.temperature);
        Self {
            samples,
            start_index,
            heater_on_duration,
            heater_charge,
            theta_min,
            theta_max,
            p_min,
            p_max,
            t_min,
            t_max,
        }
    }
}

/// Masses loading the lever during a test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoadCase {
    /// Hung mass swapped between expansion and restoring loads.
    ConstantLoad { m2_expand: f64, m2_restore: f64 },
    /// Fixed restoring mass `m1` plus hung mass `m2` during expansion.
    Otto { m1: f64, m2: f64 },
}

impl LoadCase {
    /// Mass effectively raised once per cycle.
    pub fn lift_mass(&self) -> f64 {
        match *self {
            LoadCase::ConstantLoad {
                m2_expand,
                m2_restore,
            } => m2_expand - m2_restore,
            LoadCase::Otto { m2, .. } => m2,
        }
    }

    pub fn mode(&self) -> LoadMode {
        match self {
            LoadCase::ConstantLoad { .. } => LoadMode::ConstantLoad,
            LoadCase::Otto { .. } => LoadMode::Otto,
        }
    }
}

/// Heater supply. Heat input is `volts · amps · on-time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeaterPower {
    pub volts: f64,
    pub amps: f64,
}

impl HeaterPower {
    pub fn watts(&self) -> f64 {
        self.volts * self.amps
    }
}

impl Default for HeaterPower {
    fn default() -> Self {
        Self {
            volts: 3.92,
            amps: 0.91,
        }
    }
}

/// Metrics of one analyzed cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleResult {
    pub start_time: f64,
    /// rad
    pub stroke: f64,
    /// m
    pub displacement: f64,
    /// J
    pub work: f64,
    /// J
    pub heat_in: f64,
    pub efficiency: f64,
    pub heater_on_duration: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

/// Work from the lifted mass over the smoothed stroke; heat from the heater
/// on-time. `r_mx2` is the hang distance of the lifted mass.
pub fn cycle_metrics(
    segment: &CycleSegment<'_>,
    load: &LoadCase,
    r_mx2: f64,
    g: f64,
    heater: HeaterPower,
) -> Result<CycleResult> {
    let stroke = segment.theta_max - segment.theta_min;
    let displacement = stroke_displacement(r_mx2, segment.theta_min, segment.theta_max);
    let work = net_cycle_work(load.lift_mass(), displacement, g);
    let heat_in = match segment.heater_charge {
        Some(charge) => heater.volts * charge,
        None => heater.watts() * segment.heater_on_duration,
    };
    if !(heat_in > 0.0) {
        return Err(Error::UndefinedEfficiency(format!(
            "cycle at t = {} s received no heat",
            segment.samples.first().map_or(0.0, |s| s.t)
        )));
    }
    Ok(CycleResult {
        start_time: segment.samples[0].t,
        stroke,
        displacement,
        work,
        heat_in,
        efficiency: work / heat_in,
        heater_on_duration: segment.heater_on_duration,
        p_min: segment.p_min,
        p_max: segment.p_max,
        t_min: segment.t_min,
        t_max: segment.t_max,
    })
}

/// Parameters of the log analysis pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub load: LoadCase,
    pub r_mx2: f64,
    pub g: f64,
    pub heater: HeaterPower,
    pub heater_threshold: f64,
    pub smoothing_window_s: f64,
    /// Leading complete cycles ignored while the rig warms up.
    pub warmup_skip: usize,
    pub ambient_pressure: f64,
}

impl AnalysisConfig {
    pub fn new(load: LoadCase, r_mx2: f64) -> Self {
        Self {
            load,
            r_mx2,
            g: STANDARD_GRAVITY,
            heater: HeaterPower::default(),
            heater_threshold: DEFAULT_HEATER_THRESHOLD,
            smoothing_window_s: 1.0,
            warmup_skip: 2,
            ambient_pressure: STANDARD_ATMOSPHERE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub mode: LoadMode,
    pub cycles: Vec<CycleResult>,
    /// Complete cycles found before the warm-up skip.
    pub segments_found: usize,
    pub mean_work: f64,
    pub mean_heat_in: f64,
    pub mean_efficiency: f64,
    pub mean_stroke: f64,
    pub ambient_pressure: f64,
}

/// Smooths, segments and evaluates a log.
pub fn analyze(samples: &[SensorSample], config: &AnalysisConfig) -> Result<ExperimentReport> {
    let smoothed = smooth_angle(samples, config.smoothing_window_s);
    let segments = segment_cycles(&smoothed, config.heater_threshold);
    let cycles = segments
        .iter()
        .skip(config.warmup_skip)
        .map(|seg| cycle_metrics(seg, &config.load, config.r_mx2, config.g, config.heater))
        .collect::<Result<Vec<_>>>()?;
    if cycles.is_empty() {
        return Err(Error::NoCycles {
            found: segments.len(),
            skipped: config.warmup_skip,
        });
    }
    let mean = |f: fn(&CycleResult) -> f64| cycles.iter().map(f).sum::<f64>() / cycles.len() as f64;
    Ok(ExperimentReport {
        mode: config.load.mode(),
        segments_found: segments.len(),
        mean_work: mean(|c| c.work),
        mean_heat_in: mean(|c| c.heat_in),
        mean_efficiency: mean(|c| c.efficiency),
        mean_stroke: mean(|c| c.stroke),
        ambient_pressure: config.ambient_pressure,
        cycles,
    })
}

/// Improvement factor quoted alongside the reference experiments. It is not
/// the quotient of the quoted mean efficiencies (0.032 % / 0.0021 % ≈ 15.2).
pub const REFERENCE_IMPROVEMENT_FACTOR: f64 = 11.3;

/// Otto-over-constant-load efficiency comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Improvement {
    pub quotient_of_means: f64,
    /// Cycle-by-cycle quotients, paired in log order.
    pub per_cycle: Vec<f64>,
}

pub fn compare_reports(
    constant_load: &ExperimentReport,
    otto: &ExperimentReport,
) -> Result<Improvement> {
    if !(constant_load.mean_efficiency > 0.0) {
        return Err(Error::UndefinedEfficiency(
            "constant-load mean efficiency is zero; no quotient".into(),
        ));
    }
    Ok(Improvement {
        quotient_of_means: otto.mean_efficiency / constant_load.mean_efficiency,
        per_cycle: constant_load
            .cycles
            .iter()
            .zip(&otto.cycles)
            .filter(|(c, _)| c.efficiency > 0.0)
            .map(|(c, o)| o.efficiency / c.efficiency)
            .collect(),
    })
}

/// Per-cycle CSV: `cycle_index, stroke_deg, displacement_m, work_j, heat_j, efficiency`.
pub fn report_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("cycle_index,stroke_deg,displacement_m,work_j,heat_j,efficiency\n");
    for (i, c) in report.cycles.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            i,
            format_sig(c.stroke.to_degrees(), 9),
            format_sig(c.displacement, 9),
            format_sig(c.work, 9),
            format_sig(c.heat_in, 9),
            format_sig(c.efficiency, 9)
        );
    }
    out
}

pub fn write_report_csv(report: &ExperimentReport, path: &Path) -> Result<()> {
    fs::write(path, report_csv(report)).map_err(|e| Error::io(path, e))
}

/// Human-readable table. Efficiencies are shown as percentages here only.
pub fn report_text(report: &ExperimentReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} log: {} complete cycles, {} analyzed",
        report.mode.name(),
        report.segments_found,
        report.cycles.len()
    );
    let _ = writeln!(
        s,
        "{:>5} {:>10} {:>14} {:>12} {:>10} {:>12} {:>16} {:>12}",
        "cycle", "stroke[°]", "displ[mm]", "work[J]", "heat[J]", "eff[%]", "P gauge[kPa]", "T[K]"
    );
    for (i, c) in report.cycles.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:>5} {:>10.3} {:>14.4} {:>12.5} {:>10.2} {:>12.5} {:>7.2}..{:<7.2} {:>5.1}..{:<5.1}",
            i,
            c.stroke.to_degrees(),
            c.displacement * 1e3,
            c.work,
            c.heat_in,
            c.efficiency * 100.0,
            c.p_min / 1e3,
            c.p_max / 1e3,
            c.t_min,
            c.t_max
        );
    }
    let _ = writeln!(
        s,
        "mean: stroke {:.3}°, work {:.5} J, heat {:.2} J, efficiency {:.5} %",
        report.mean_stroke.to_degrees(),
        report.mean_work,
        report.mean_heat_in,
        report.mean_efficiency * 100.0
    );
    let _ = writeln!(
        s,
        "note: heat input is the electrical heater energy, an upper bound on heat reaching the gas; \
         ambient pressure assumed {} Pa.",
        report.ambient_pressure
    );
    if report.mode == LoadMode::ConstantLoad {
        let _ = writeln!(
            s,
            "note: temperatures may be under-reported if the thermocouple moved between test series; \
             no correction is applied."
        );
    }
    s
}

pub fn improvement_text(imp: &Improvement) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "otto / constant-load efficiency: {:.2} (quotient of mean efficiencies)",
        imp.quotient_of_means
    );
    if !imp.per_cycle.is_empty() {
        let list: Vec<String> = imp.per_cycle.iter().map(|q| format!("{q:.2}")).collect();
        let _ = writeln!(s, "per-cycle quotients: {}", list.join(", "));
    }
    let _ = writeln!(
        s,
        "footnote: the reference improvement factor of {REFERENCE_IMPROVEMENT_FACTOR} is not reproduced by \
         the quotient of the reference mean efficiencies (0.032 % / 0.0021 % = {:.1}); it is reported here \
         as a documented discrepancy.",
        0.032 / 0.0021
    );
    s
}
