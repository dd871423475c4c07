//! Seeded synthetic sensor logs with known per-cycle ground truth.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{AnalysisConfig, HeaterPower, LoadCase, SensorSample};
use crate::error::{Error, Result};
use crate::rig::{net_cycle_work, stroke_displacement, STANDARD_GRAVITY};

/// Additive Gaussian noise standard deviations per channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseLevels {
    pub angle_deg: f64,
    pub pressure_pa: f64,
    pub temperature_k: f64,
    pub heater_v: f64,
}

/// Shape of a synthetic test. Each cycle starts with the heater switching on;
/// the lever sits at `theta_min_deg`, ramps up at `rise_start_s`, holds for
/// `hold_high_s`, ramps back and rests until the next cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub rate_hz: f64,
    pub cycles: usize,
    pub lead_in_s: f64,
    pub period_s: f64,
    pub heating_s: f64,
    pub rise_start_s: f64,
    pub ramp_s: f64,
    pub hold_high_s: f64,
    pub theta_min_deg: f64,
    pub stroke_deg: f64,
    pub p_low_gauge: f64,
    pub p_high_gauge: f64,
    pub t_low: f64,
    pub t_high: f64,
    pub heater_on_v: f64,
    pub noise: NoiseLevels,
    pub seed: u64,
    pub load: LoadCase,
    pub r_mx2: f64,
    pub g: f64,
    pub heater: HeaterPower,
}

impl SyntheticConfig {
    /// Constant-load test: 0.282 kg net lift at 200 mm, 1.2° stroke, 153.6 s
    /// of heating per cycle.
    pub fn constant_load_reference() -> Self {
        Self {
            rate_hz: 50.0,
            cycles: 5,
            lead_in_s: 2.0,
            period_s: 240.0,
            heating_s: 153.6,
            rise_start_s: 100.0,
            ramp_s: 10.0,
            hold_high_s: 60.0,
            theta_min_deg: 0.0,
            stroke_deg: 1.2,
            p_low_gauge: 10.6e3,
            p_high_gauge: 15.0e3,
            t_low: 300.0,
            t_high: 317.0,
            heater_on_v: 4.0,
            noise: NoiseLevels::default(),
            seed: 0,
            load: LoadCase::ConstantLoad {
                m2_expand: 1.643,
                m2_restore: 1.361,
            },
            r_mx2: 0.200,
            g: STANDARD_GRAVITY,
            heater: HeaterPower::default(),
        }
    }

    /// Decreasing-load test: 1.00 kg at 28 mm, 1.3° stroke, 5.5 s of heating
    /// followed by a rapid expansion.
    pub fn otto_reference() -> Self {
        Self {
            period_s: 20.0,
            heating_s: 5.5,
            rise_start_s: 5.5,
            ramp_s: 0.5,
            hold_high_s: 4.0,
            stroke_deg: 1.3,
            p_low_gauge: 7.4e3,
            p_high_gauge: 14.6e3,
            t_low: 310.0,
            t_high: 321.0,
            load: LoadCase::Otto { m1: 13.6, m2: 1.0 },
            r_mx2: 0.028,
            ..Self::constant_load_reference()
        }
    }

    /// Pipeline settings that match how the log was generated.
    pub fn analysis_config(&self) -> AnalysisConfig {
        AnalysisConfig {
            g: self.g,
            heater: self.heater,
            ..AnalysisConfig::new(self.load, self.r_mx2)
        }
    }

    fn samples_per_period(&self) -> usize {
        (self.period_s * self.rate_hz).round() as usize
    }

    fn heating_samples(&self) -> usize {
        (self.heating_s * self.rate_hz).round() as usize
    }

    fn angle_deg(&self, phase: f64) -> f64 {
        let up = self.rise_start_s;
        let top = up + self.ramp_s;
        let down = top + self.hold_high_s;
        let bottom = down + self.ramp_s;
        let frac = if phase < up {
            0.0
        } else if phase < top {
            (phase - up) / self.ramp_s
        } else if phase < down {
            1.0
        } else if phase < bottom {
            1.0 - (phase - down) / self.ramp_s
        } else {
            0.0
        };
        self.theta_min_deg + frac * self.stroke_deg
    }

    fn pressure(&self, phase: f64) -> f64 {
        let release = self.rise_start_s + self.ramp_s + self.hold_high_s;
        let frac = if phase < self.rise_start_s {
            phase / self.rise_start_s.max(f64::MIN_POSITIVE)
        } else if phase < release {
            1.0
        } else {
            (1.0 - (phase - release) / self.ramp_s.max(f64::MIN_POSITIVE)).max(0.0)
        };
        self.p_low_gauge + frac * (self.p_high_gauge - self.p_low_gauge)
    }

    fn temperature(&self, phase: f64) -> f64 {
        let span = self.t_high - self.t_low;
        if phase < self.heating_s {
            self.t_low + span * phase / self.heating_s
        } else {
            let tau = ((self.period_s - self.heating_s) / 4.0).max(f64::MIN_POSITIVE);
            self.t_low + span * (-(phase - self.heating_s) / tau).exp()
        }
    }

    pub fn ground_truth(&self) -> GroundTruth {
        let theta_min = self.theta_min_deg.to_radians();
        let theta_max = (self.theta_min_deg + self.stroke_deg).to_radians();
        let displacement = stroke_displacement(self.r_mx2, theta_min, theta_max);
        let work = net_cycle_work(self.load.lift_mass(), displacement, self.g);
        let heater_on_duration = self.heating_samples() as f64 / self.rate_hz;
        let heat_in = self.heater.watts() * heater_on_duration;
        GroundTruth {
            stroke: theta_max - theta_min,
            displacement,
            work,
            heat_in,
            efficiency: work / heat_in,
            heater_on_duration,
        }
    }
}

/// Per-cycle metrics a noise-free analysis should recover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    pub stroke: f64,
    pub displacement: f64,
    pub work: f64,
    pub heat_in: f64,
    pub efficiency: f64,
    pub heater_on_duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticLog {
    pub samples: Vec<SensorSample>,
    /// One entry per generated cycle, identical for every cycle.
    pub truth: Vec<GroundTruth>,
}

/// Emits a lead-in with the heater off, `cycles` full periods, and one closing
/// sample where the next cycle's heater switches on so every generated cycle
/// is complete.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<SyntheticLog> {
    if !(cfg.rate_hz > 0.0) || !(cfg.period_s > 0.0) {
        return Err(Error::domain("sample rate and period must be positive"));
    }
    if !(cfg.heating_s > 0.0 && cfg.heating_s < cfg.period_s) {
        return Err(Error::domain(format!(
            "heating time {} s must lie inside the {} s period",
            cfg.heating_s, cfg.period_s
        )));
    }
    let normal = |sd: f64, name: &str| {
        let bad = || {
            Error::domain(format!(
                "{name} noise must be a finite non-negative deviation"
            ))
        };
        if !(sd >= 0.0) {
            return Err(bad());
        }
        Normal::new(0.0, sd).map_err(|_| bad())
    };
    let n_angle = normal(cfg.noise.angle_deg, "angle")?;
    let n_pressure = normal(cfg.noise.pressure_pa, "pressure")?;
    let n_temperature = normal(cfg.noise.temperature_k, "temperature")?;
    let n_heater = normal(cfg.noise.heater_v, "heater")?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let lead = (cfg.lead_in_s * cfg.rate_hz).round() as usize;
    let spp = cfg.samples_per_period();
    let heating = cfg.heating_samples();
    let total = lead + cfg.cycles * spp + 1;

    let mut samples = Vec::with_capacity(total);
    for k in 0..total {
        let (phase, heater_on) = if k < lead {
            // Lever resting before the first cycle.
            (cfg.period_s, false)
        } else {
            let kc = (k - lead) % spp;
            (kc as f64 / cfg.rate_hz, kc < heating)
        };
        let heater = if heater_on { cfg.heater_on_v } else { 0.0 };
        let angle_deg = cfg.angle_deg(phase) + n_angle.sample(&mut rng);
        samples.push(SensorSample {
            t: k as f64 / cfg.rate_hz,
            pressure_gauge: cfg.pressure(phase) + n_pressure.sample(&mut rng),
            angle: angle_deg.to_radians(),
            temperature: cfg.temperature(phase) + n_temperature.sample(&mut rng),
            heater_voltage: heater + n_heater.sample(&mut rng),
            heater_current: None,
        });
    }

    Ok(SyntheticLog {
        samples,
        truth: vec![cfg.ground_truth(); cfg.cycles],
    })
}
