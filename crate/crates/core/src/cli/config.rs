//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};

use crate::analysis::{AnalysisConfig, HeaterPower, LoadCase, DEFAULT_HEATER_THRESHOLD};
use crate::cycles::require_same_gas;
use crate::rig::{LeverRig, STANDARD_ATMOSPHERE, STANDARD_GRAVITY};
use crate::thermo::GasProperties;

use super::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma: f64,
    pub c_v: f64,
    pub area: f64,
    /// No default: the lever contact distance depends on the build.
    pub r_a: Option<f64>,
    pub r_mx1: f64,
    pub r_my1: f64,
    pub g: f64,
    pub wall_force: f64,
    pub ambient_pressure: f64,
    pub smoothing_window_s: f64,
    pub heater_volts: f64,
    pub heater_amps: f64,
    pub heater_threshold_v: f64,
    pub warmup_skip: usize,
    pub output_dir: PathBuf,
    pub cl_m2_expand: f64,
    pub cl_m2_restore: f64,
    pub cl_r_mx2: f64,
    pub otto_m1: f64,
    pub otto_m2: f64,
    pub otto_r_mx2: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            c_v: 2.5,
            area: LeverRig::nominal_area(),
            r_a: None,
            r_mx1: 0.0,
            r_my1: 0.0,
            g: STANDARD_GRAVITY,
            wall_force: 0.0,
            ambient_pressure: STANDARD_ATMOSPHERE,
            smoothing_window_s: 1.0,
            heater_volts: 3.92,
            heater_amps: 0.91,
            heater_threshold_v: DEFAULT_HEATER_THRESHOLD,
            warmup_skip: 2,
            output_dir: PathBuf::from("out"),
            cl_m2_expand: 1.643,
            cl_m2_restore: 1.361,
            cl_r_mx2: 0.200,
            otto_m1: 13.6,
            otto_m2: 1.0,
            otto_r_mx2: 0.028,
        }
    }
}

pub const KEYS: &[&str] = &[
    "gas.gamma",
    "gas.c_v",
    "rig.A",
    "rig.r_a",
    "rig.r_mx1",
    "rig.r_my1",
    "rig.g",
    "rig.wall_force",
    "ambient_pressure",
    "smoothing_window_s",
    "heater.volts",
    "heater.amps",
    "heater.threshold_v",
    "warmup_skip",
    "output_dir",
    "constant_load.m2_expand",
    "constant_load.m2_restore",
    "constant_load.r_mx2",
    "otto.m1",
    "otto.m2",
    "otto.r_mx2",
];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text, &path.display().to_string())?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{origin}:{}: expected `key = value`", i + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::Usage(format!("{origin}:{}: {e}", i + 1)))?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("--set expects key=value, got `{assignment}`"))
        })?;
        self.set(key.trim(), value.trim()).map_err(CliError::Usage)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = || -> Result<f64, String> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{key}`: `{value}` is not a finite number"))
        };
        match key {
            "gas.gamma" => self.gamma = num()?,
            "gas.c_v" => self.c_v = num()?,
            "rig.A" => self.area = num()?,
            "rig.r_a" => self.r_a = Some(num()?),
            "rig.r_mx1" => self.r_mx1 = num()?,
            "rig.r_my1" => self.r_my1 = num()?,
            "rig.g" => self.g = num()?,
            "rig.wall_force" => self.wall_force = num()?,
            "ambient_pressure" => self.ambient_pressure = num()?,
            "smoothing_window_s" => self.smoothing_window_s = num()?,
            "heater.volts" => self.heater_volts = num()?,
            "heater.amps" => self.heater_amps = num()?,
            "heater.threshold_v" => self.heater_threshold_v = num()?,
            "warmup_skip" => {
                self.warmup_skip = value
                    .parse()
                    .map_err(|_| format!("`{key}`: `{value}` is not a non-negative integer"))?
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "constant_load.m2_expand" => self.cl_m2_expand = num()?,
            "constant_load.m2_restore" => self.cl_m2_restore = num()?,
            "constant_load.r_mx2" => self.cl_r_mx2 = num()?,
            "otto.m1" => self.otto_m1 = num()?,
            "otto.m2" => self.otto_m2 = num()?,
            "otto.r_mx2" => self.otto_r_mx2 = num()?,
            _ => return Err(format!("unknown configuration key `{key}`")),
        }
        Ok(())
    }

    /// Checks the gas and physical fields shared by every command.
    pub fn validate(&self) -> crate::Result<()> {
        require_same_gas(self.gamma, self.c_v)?;
        let positive = [
            ("ambient_pressure", self.ambient_pressure),
            ("rig.A", self.area),
            ("rig.g", self.g),
            ("smoothing_window_s", self.smoothing_window_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(crate::Error::Domain(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        let non_negative = [
            ("heater.volts", self.heater_volts),
            ("heater.amps", self.heater_amps),
            ("constant_load.m2_expand", self.cl_m2_expand),
            ("constant_load.m2_restore", self.cl_m2_restore),
            ("constant_load.r_mx2", self.cl_r_mx2),
            ("otto.m1", self.otto_m1),
            ("otto.m2", self.otto_m2),
            ("otto.r_mx2", self.otto_r_mx2),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) {
                return Err(crate::Error::Domain(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn gas(&self) -> crate::Result<GasProperties> {
        GasProperties::new(self.c_v, self.gamma)
    }

    /// Lever rig for the given hang distance. Requires `rig.r_a`.
    pub fn rig(&self, r_mx2: f64) -> Result<LeverRig, CliError> {
        let r_a = self.r_a.ok_or_else(|| {
            CliError::Usage("`rig.r_a` must be set in the config file or with --set".into())
        })?;
        let mut rig = LeverRig::new(self.area, r_a)?
            .with_fixed_mass_offsets(self.r_mx1, self.r_my1)
            .with_hang_distance(r_mx2);
        rig.g = self.g;
        rig.p_atm = self.ambient_pressure;
        rig.wall_force = self.wall_force;
        rig.validate()?;
        Ok(rig)
    }

    pub fn heater(&self) -> HeaterPower {
        HeaterPower {
            volts: self.heater_volts,
            amps: self.heater_amps,
        }
    }

    pub fn constant_load_case(&self) -> LoadCase {
        LoadCase::ConstantLoad {
            m2_expand: self.cl_m2_expand,
            m2_restore: self.cl_m2_restore,
        }
    }

    pub fn otto_case(&self) -> LoadCase {
        LoadCase::Otto {
            m1: self.otto_m1,
            m2: self.otto_m2,
        }
    }

    pub fn analysis(&self, load: LoadCase) -> AnalysisConfig {
        let r_mx2 = match load {
            LoadCase::ConstantLoad { .. } => self.cl_r_mx2,
            LoadCase::Otto { .. } => self.otto_r_mx2,
        };
        AnalysisConfig {
            g: self.g,
            heater: self.heater(),
            heater_threshold: self.heater_threshold_v,
            smoothing_window_s: self.smoothing_window_s,
            warmup_skip: self.warmup_skip,
            ambient_pressure: self.ambient_pressure,
            ..AnalysisConfig::new(load, r_mx2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_keys() {
        let mut cfg = RunConfig::default();
        cfg.apply_text(
            "# rig\nrig.r_a = 0.05  # contact\n\ngas.gamma = 1.6666666666666667\ngas.c_v=1.5\nwarmup_skip = 1\n",
            "test",
        )
        .unwrap();
        assert_eq!(cfg.r_a, Some(0.05));
        assert_eq!(cfg.c_v, 1.5);
        assert_eq!(cfg.warmup_skip, 1);
        cfg.validate().unwrap();
    }

    #[test]
    fn every_listed_key_is_accepted() {
        let mut cfg = RunConfig::default();
        for key in KEYS {
            let value = if *key == "output_dir" || *key == "warmup_skip" {
                "3"
            } else {
                "0.5"
            };
            cfg.set(key, value).unwrap();
        }
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let mut cfg = RunConfig::default();
        assert!(matches!(
            cfg.apply_text("rig.B = 1", "t"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            cfg.apply_text("rig.A 1", "t"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            cfg.apply_text("rig.A = x", "t"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            cfg.apply_override("rig.A"),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn inconsistent_gas_is_a_domain_error() {
        let mut cfg = RunConfig::default();
        cfg.set("gas.gamma", "1.3").unwrap();
        assert!(matches!(
            cfg.validate(),
            Err(crate::Error::Consistency { .. })
        ));
    }

    #[test]
    fn rig_requires_contact_distance() {
        let cfg = RunConfig::default();
        assert!(matches!(cfg.rig(0.1), Err(CliError::Usage(_))));
        let cfg = RunConfig {
            r_a: Some(0.05),
            ..cfg
        };
        assert_eq!(cfg.rig(0.1).unwrap().r_mx2, 0.1);
    }
}
