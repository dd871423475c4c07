//! Actuator characterization: isothermal expansion ratio from a pressure
//! drop, adiabatic pressure-change estimates, and the ideal efficiency at the
//! measured ratio.

use std::fmt::Write as _;

use crate::compare::format_sig;
use crate::cycles::efficiency_otto_ideal;
use crate::error::{Error, Result};
use crate::rig::STANDARD_ATMOSPHERE;

/// Ratios above this are almost certainly gauge pressures passed as absolute.
pub const DEFAULT_RATIO_PLAUSIBILITY_LIMIT: f64 = 1.5;

/// Relative gap between predicted and observed spans above which the report
/// notes unmodeled heat exchange.
const HEAT_LOSS_FLAG_FRACTION: f64 = 0.05;

/// `P1/P2 = V2/V1` for an isothermal expansion, pressures absolute.
pub fn expansion_ratio_isothermal(p1_abs: f64, p2_abs: f64) -> Result<f64> {
    if !(p1_abs > 0.0 && p2_abs > 0.0) || !p1_abs.is_finite() || !p2_abs.is_finite() {
        return Err(Error::domain(format!(
            "absolute pressures must be positive (got {p1_abs} Pa, {p2_abs} Pa)"
        )));
    }
    if p1_abs < p2_abs {
        return Err(Error::domain(format!(
            "pressure rose from {p1_abs} Pa to {p2_abs} Pa; an expansion needs P1 >= P2"
        )));
    }
    Ok(p1_abs / p2_abs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlausibilityWarning {
    pub ratio: f64,
    pub limit: f64,
}

impl std::fmt::Display for PlausibilityWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "expansion ratio {} exceeds {}; were gauge pressures passed instead of absolute?",
            format_sig(self.ratio, 6),
            self.limit
        )
    }
}

pub fn check_ratio_plausibility(ratio: f64, limit: f64) -> Option<PlausibilityWarning> {
    (ratio > limit).then_some(PlausibilityWarning { ratio, limit })
}

/// Absolute-pressure change `P1·(ratio^γ − 1)` for an adiabatic volume change
/// where `ratio = V_start/V_end` (> 1 compresses, < 1 expands).
pub fn predict_isentropic_pressure_change(p1_abs: f64, ratio: f64, gamma: f64) -> Result<f64> {
    if !(ratio > 0.0) {
        return Err(Error::domain(format!(
            "volume ratio must be positive (got {ratio})"
        )));
    }
    Ok(p1_abs * (ratio.powf(gamma) - 1.0))
}

/// Ideal Otto efficiency at a measured expansion ratio.
pub fn predicted_otto_efficiency(ratio: f64, gamma: f64) -> Result<f64> {
    if !(ratio >= 1.0) {
        return Err(Error::domain(format!(
            "expansion ratio must be at least 1 (got {ratio})"
        )));
    }
    efficiency_otto_ideal(ratio, gamma)
}

/// Gauge pressures in Pa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterizationInputs {
    pub ambient_pressure: f64,
    /// Gauge pressure before the isothermal expansion.
    pub p_before_gauge: f64,
    /// Gauge pressure after the gas has returned to the starting temperature.
    pub p_after_gauge: f64,
    /// Peak pressure the decreasing load should hold at full compression.
    pub otto_target_gauge: f64,
    pub observed_compression_rise: f64,
    pub observed_expansion_span: f64,
    pub cl_expand_target_gauge: f64,
    pub cl_restore_target_gauge: f64,
    pub gamma: f64,
    pub plausibility_limit: f64,
}

impl Default for CharacterizationInputs {
    fn default() -> Self {
        Self {
            ambient_pressure: STANDARD_ATMOSPHERE,
            p_before_gauge: 6_900.0,
            p_after_gauge: 4_055.0,
            otto_target_gauge: 14_000.0,
            observed_compression_rise: 5_000.0,
            observed_expansion_span: 4_500.0,
            cl_expand_target_gauge: 13_000.0,
            cl_restore_target_gauge: 11_000.0,
            gamma: 1.4,
            plausibility_limit: DEFAULT_RATIO_PLAUSIBILITY_LIMIT,
        }
    }
}

/// A predicted adiabatic pressure change set against the observed one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanComparison {
    /// Magnitude of the predicted change, Pa.
    pub predicted: f64,
    /// Magnitude of the observed change, Pa.
    pub observed: f64,
    /// `(observed − predicted) / observed`.
    pub residual: f64,
    /// Set when the residual is large enough to attribute to heat exchange.
    pub heat_loss_flag: bool,
}

impl SpanComparison {
    fn new(predicted: f64, observed: f64) -> Self {
        let predicted = predicted.abs();
        let observed = observed.abs();
        let residual = if observed > 0.0 {
            (observed - predicted) / observed
        } else {
            0.0
        };
        Self {
            predicted,
            observed,
            residual,
            heat_loss_flag: residual.abs() > HEAT_LOSS_FLAG_FRACTION,
        }
    }

    pub fn within(&self, fraction: f64) -> bool {
        self.residual.abs() <= fraction
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationReport {
    pub inputs: CharacterizationInputs,
    pub p_before_abs: f64,
    pub p_after_abs: f64,
    pub expansion_ratio: f64,
    pub warning: Option<PlausibilityWarning>,
    pub compression: SpanComparison,
    pub expansion: SpanComparison,
    pub predicted_efficiency: f64,
    pub text: String,
}

pub fn characterize(inputs: &CharacterizationInputs) -> Result<CharacterizationReport> {
    let gauges = [
        ("before", inputs.p_before_gauge),
        ("after", inputs.p_after_gauge),
        ("Otto target", inputs.otto_target_gauge),
        ("constant-load expand target", inputs.cl_expand_target_gauge),
        (
            "constant-load restore target",
            inputs.cl_restore_target_gauge,
        ),
    ];
    for (name, p) in gauges {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::domain(format!(
                "{name} gauge pressure must be non-negative (got {p} Pa)"
            )));
        }
    }
    if !(inputs.ambient_pressure > 0.0) {
        return Err(Error::domain("ambient pressure must be positive"));
    }
    if !(inputs.gamma > 1.0) {
        return Err(Error::domain(format!(
            "gamma must exceed 1 (got {})",
            inputs.gamma
        )));
    }

    let amb = inputs.ambient_pressure;
    let p_before_abs = inputs.p_before_gauge + amb;
    let p_after_abs = inputs.p_after_gauge + amb;
    let ratio = expansion_ratio_isothermal(p_before_abs, p_after_abs)?;
    let warning = check_ratio_plausibility(ratio, inputs.plausibility_limit);

    let rise = predict_isentropic_pressure_change(p_before_abs, ratio, inputs.gamma)?;
    let otto_peak_abs = inputs.otto_target_gauge + amb;
    let drop = predict_isentropic_pressure_change(otto_peak_abs, 1.0 / ratio, inputs.gamma)?;
    let compression = SpanComparison::new(rise, inputs.observed_compression_rise);
    let expansion = SpanComparison::new(drop, inputs.observed_expansion_span);
    let predicted_efficiency = predicted_otto_efficiency(ratio, inputs.gamma)?;

    let kpa = |p: f64| format!("{:.3} kPa", p / 1e3);
    let mut t = String::new();
    let _ = writeln!(t, "actuator characterization (ambient {} abs)", kpa(amb));
    let _ = writeln!(
        t,
        "1. isothermal expansion ratio  {}  ({} -> {} abs)",
        format_sig(ratio, 6),
        kpa(p_before_abs),
        kpa(p_after_abs)
    );
    if let Some(w) = warning {
        let _ = writeln!(t, "   warning: {w}");
    }
    let span_line = |t: &mut String, label: &str, c: SpanComparison| {
        let _ = writeln!(
            t,
            "{label}  predicted {}  observed {}  residual {:+.1}%{}",
            kpa(c.predicted),
            kpa(c.observed),
            100.0 * c.residual,
            if c.heat_loss_flag {
                "  (gap attributed to heat exchange with the surroundings)"
            } else {
                ""
            }
        );
    };
    span_line(&mut t, "2. compression pressure rise", compression);
    let _ = writeln!(
        t,
        "3. Otto maximum pressure target  {} gauge",
        kpa(inputs.otto_target_gauge)
    );
    span_line(&mut t, "4. expansion pressure span", expansion);
    let _ = writeln!(
        t,
        "5. constant-load expand target  {} gauge",
        kpa(inputs.cl_expand_target_gauge)
    );
    let _ = writeln!(
        t,
        "6. constant-load restore target  {} gauge",
        kpa(inputs.cl_restore_target_gauge)
    );
    let _ = writeln!(
        t,
        "predicted ideal Otto efficiency at this ratio  {:.3}%",
        100.0 * predicted_efficiency
    );

    Ok(CharacterizationReport {
        inputs: *inputs,
        p_before_abs,
        p_after_abs,
        expansion_ratio: ratio,
        warning,
        compression,
        expansion,
        predicted_efficiency,
        text: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn isothermal_ratio() {
        assert_relative_eq!(
            expansion_ratio_isothermal(108_225.0, 105_380.0).unwrap(),
            1.02699753273866,
            max_relative = 1e-12
        );
        assert_eq!(expansion_ratio_isothermal(1e5, 1e5).unwrap(), 1.0);
        assert!(expansion_ratio_isothermal(0.0, 1e5).is_err());
        assert!(expansion_ratio_isothermal(1e5, -1.0).is_err());
        assert!(expansion_ratio_isothermal(1e5, 2e5).is_err());
    }

    #[test]
    fn gauge_mistake_is_flagged() {
        let r = expansion_ratio_isothermal(6_900.0, 4_100.0).unwrap();
        assert_relative_eq!(r, 1.68292682926829, max_relative = 1e-12);
        assert!(check_ratio_plausibility(r, DEFAULT_RATIO_PLAUSIBILITY_LIMIT).is_some());
        assert!(check_ratio_plausibility(1.027, DEFAULT_RATIO_PLAUSIBILITY_LIMIT).is_none());
    }

    #[test]
    fn adiabatic_pressure_changes() {
        let up = predict_isentropic_pressure_change(108_225.0, 1.027, 1.4).unwrap();
        assert_relative_eq!(up, 4112.87, max_relative = 1e-4);
        let down = predict_isentropic_pressure_change(115_325.0, 1.0 / 1.027, 1.4).unwrap();
        assert_relative_eq!(down, -4222.26, max_relative = 1e-4);
        assert_eq!(
            predict_isentropic_pressure_change(1e5, 1.0, 1.4).unwrap(),
            0.0
        );
        assert!(predict_isentropic_pressure_change(1e5, 0.0, 1.4).is_err());
    }

    #[test]
    fn otto_prediction() {
        assert_relative_eq!(
            predicted_otto_efficiency(1.027, 1.4).unwrap(),
            0.0106002,
            max_relative = 1e-5
        );
        assert_eq!(predicted_otto_efficiency(1.0, 1.4).unwrap(), 0.0);
        assert!(predicted_otto_efficiency(0.9, 1.4).is_err());
    }

    #[test]
    fn default_report() {
        let rep = characterize(&CharacterizationInputs::default()).unwrap();
        assert!((rep.expansion_ratio - 1.027).abs() < 5e-4);
        assert!(rep.warning.is_none());
        assert!(rep.compression.within(0.25));
        assert!(rep.expansion.within(0.25));
        assert!(rep.compression.heat_loss_flag);
        assert!(rep.expansion.heat_loss_flag);
        assert!(rep.text.contains("heat exchange"));
        for item in ["1.", "2.", "3.", "4.", "5.", "6."] {
            assert!(rep.text.contains(item));
        }
    }

    #[test]
    fn identity_inputs() {
        let inputs = CharacterizationInputs {
            p_after_gauge: 6_900.0,
            ..Default::default()
        };
        let rep = characterize(&inputs).unwrap();
        assert_eq!(rep.expansion_ratio, 1.0);
        assert_eq!(rep.compression.predicted, 0.0);
        assert_eq!(rep.predicted_efficiency, 0.0);
    }

    #[test]
    fn negative_gauge_rejected() {
        let inputs = CharacterizationInputs {
            p_before_gauge: -10.0,
            ..Default::default()
        };
        assert!(matches!(characterize(&inputs), Err(Error::Domain(_))));
    }
}
