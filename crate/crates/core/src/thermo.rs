//! Ideal-gas states and the four quasi-static process primitives.
//!
//! Every process is parameterized by its endpoints only. Pressures are
//! absolute throughout; gauge readings are converted at the `rig` and
//! `analysis` boundaries.
//!
//! Energy bookkeeping follows the sign convention `Q = ΔU + W`, where `Q` is
//! heat flowing into the gas and `W` is work done by the gas.

use std::fmt;

use crate::error::{Error, Result};

/// Universal gas constant, J/(mol·K).
pub const R_MOLAR: f64 = 8.314462618;

/// Relative tolerance for state closure and first-law checks.
pub const INVARIANT_RTOL: f64 = 1e-9;

/// Relative tolerance when comparing closed-form isentropes against numerical
/// integration of `dU = -P dV`.
pub const INTEGRATION_RTOL: f64 = 1e-6;

/// Relative tolerance for `gamma = 1 + 1/c_v` when both are supplied.
pub const GAS_CONSISTENCY_RTOL: f64 = 1e-12;

/// Calorically perfect gas: constant molar heat capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasProperties {
    r_molar: f64,
    c_v: f64,
    gamma: f64,
}

impl GasProperties {
    /// Builds properties from both heat-capacity descriptions, rejecting pairs
    /// that do not describe the same ideal gas.
    pub fn new(c_v: f64, gamma: f64) -> Result<Self> {
        let props = Self::from_cv(c_v)?;
        if !(gamma > 1.0) || !relative_eq(props.gamma, gamma, GAS_CONSISTENCY_RTOL) {
            return Err(Error::Consistency { gamma, c_v });
        }
        Ok(props)
    }

    /// Dimensionless molar `c_v` (in units of R); gamma is derived.
    pub fn from_cv(c_v: f64) -> Result<Self> {
        if !(c_v > 0.0) || !c_v.is_finite() {
            return Err(Error::domain(format!("c_v must be positive, got {c_v}")));
        }
        Ok(Self {
            r_molar: R_MOLAR,
            c_v,
            gamma: 1.0 + 1.0 / c_v,
        })
    }

    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::domain(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self {
            r_molar: R_MOLAR,
            c_v: 1.0 / (gamma - 1.0),
            gamma,
        })
    }

    /// Diatomic air: `c_v = 5/2`, `gamma = 7/5`.
    pub fn air() -> Self {
        Self {
            r_molar: R_MOLAR,
            c_v: 2.5,
            gamma: 1.4,
        }
    }

    pub fn r_molar(&self) -> f64 {
        self.r_molar
    }

    pub fn c_v(&self) -> f64 {
        self.c_v
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for GasProperties {
    fn default() -> Self {
        Self::air()
    }
}

/// Checks `gamma = 1 + 1/c_v` to the given relative tolerance.
pub fn check_gas_consistency(gamma: f64, c_v: f64, rtol: f64) -> Result<()> {
    if !(c_v > 0.0) || !(gamma > 1.0) || !relative_eq(gamma, 1.0 + 1.0 / c_v, rtol) {
        return Err(Error::Consistency { gamma, c_v });
    }
    Ok(())
}

/// Equilibrium state of a fixed amount of ideal gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasState {
    n: f64,
    p: f64,
    v: f64,
    t: f64,
}

impl GasState {
    /// Amount of gas, mol.
    pub fn moles(&self) -> f64 {
        self.n
    }

    /// Absolute pressure, Pa.
    pub fn pressure(&self) -> f64 {
        self.p
    }

    /// Volume, m³.
    pub fn volume(&self) -> f64 {
        self.v
    }

    /// Temperature, K.
    pub fn temperature(&self) -> f64 {
        self.t
    }

    /// True when `P, V, T` agree with `other` to relative `rtol`.
    pub fn approx_eq(&self, other: &GasState, rtol: f64) -> bool {
        relative_eq(self.p, other.p, rtol)
            && relative_eq(self.v, other.v, rtol)
            && relative_eq(self.t, other.t, rtol)
            && relative_eq(self.n, other.n, rtol)
    }

    /// Builds a state at temperature `t` and volume `v` for the same gas amount.
    fn with_tv(&self, t: f64, v: f64, props: &GasProperties) -> GasState {
        GasState {
            n: self.n,
            p: self.n * props.r_molar * t / v,
            v,
            t,
        }
    }
}

impl fmt::Display for GasState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P = {:.6} Pa, V = {:.6e} m³, T = {:.6} K (n = {:.6e} mol)",
            self.p, self.v, self.t, self.n
        )
    }
}

/// Closes the ideal gas law for temperature.
pub fn state_from_pvn(p: f64, v: f64, n: f64, props: &GasProperties) -> Result<GasState> {
    for (name, value) in [("pressure", p), ("volume", v), ("amount", n)] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::domain(format!(
                "{name} must be positive, got {value}"
            )));
        }
    }
    Ok(GasState {
        n,
        p,
        v,
        t: p * v / (n * props.r_molar),
    })
}

/// State at temperature `t` and volume `v`; the gas amount is derived.
pub fn state_from_ptv(p: f64, t: f64, v: f64, props: &GasProperties) -> Result<GasState> {
    for (name, value) in [("pressure", p), ("temperature", t), ("volume", v)] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::domain(format!(
                "{name} must be positive, got {value}"
            )));
        }
    }
    Ok(GasState {
        n: p * v / (props.r_molar * t),
        p,
        v,
        t,
    })
}

/// `U = n·c_v·R·T`, with zero at 0 K.
pub fn internal_energy(s: &GasState, props: &GasProperties) -> f64 {
    s.n * props.c_v * props.r_molar * s.t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessKind {
    Isochoric,
    Isobaric,
    Isentropic,
    Isothermal,
}

impl ProcessKind {
    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::Isochoric => "isochoric",
            ProcessKind::Isobaric => "isobaric",
            ProcessKind::Isentropic => "isentropic",
            ProcessKind::Isothermal => "isothermal",
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One quasi-static process with its energy accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessStep {
    kind: ProcessKind,
    start: GasState,
    end: GasState,
    work_by_gas: f64,
    heat_into_gas: f64,
    delta_u: f64,
}

impl ProcessStep {
    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    pub fn start(&self) -> &GasState {
        &self.start
    }

    pub fn end(&self) -> &GasState {
        &self.end
    }

    pub fn work_by_gas(&self) -> f64 {
        self.work_by_gas
    }

    pub fn heat_into_gas(&self) -> f64 {
        self.heat_into_gas
    }

    pub fn delta_u(&self) -> f64 {
        self.delta_u
    }

    /// Intermediate equilibrium states along the path, endpoints included.
    ///
    /// Isochoric paths are parameterized by temperature, all others by volume.
    pub fn sample_path(&self, points: usize, props: &GasProperties) -> Vec<GasState> {
        let points = points.max(2);
        let (s, e) = (&self.start, &self.end);
        (0..points)
            .map(|i| {
                if i == 0 {
                    return *s;
                }
                if i == points - 1 {
                    return *e;
                }
                let f = i as f64 / (points - 1) as f64;
                let v = s.v + f * (e.v - s.v);
                match self.kind {
                    ProcessKind::Isochoric => s.with_tv(s.t + f * (e.t - s.t), s.v, props),
                    ProcessKind::Isobaric => GasState {
                        n: s.n,
                        p: s.p,
                        v,
                        t: s.t * v / s.v,
                    },
                    ProcessKind::Isentropic => {
                        s.with_tv(s.t * (s.v / v).powf(props.gamma - 1.0), v, props)
                    }
                    ProcessKind::Isothermal => s.with_tv(s.t, v, props),
                }
            })
            .collect()
    }
}

fn positive_target(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::domain(format!(
            "target {name} must be positive, got {value}"
        )));
    }
    Ok(())
}

/// Constant-volume heating or cooling to `t_target`.
pub fn advance_isochoric(
    s: &GasState,
    t_target: f64,
    props: &GasProperties,
) -> Result<ProcessStep> {
    positive_target("temperature", t_target)?;
    let end = GasState {
        n: s.n,
        p: s.p * (t_target / s.t),
        v: s.v,
        t: t_target,
    };
    let delta_u = s.n * props.c_v * props.r_molar * (t_target - s.t);
    Ok(ProcessStep {
        kind: ProcessKind::Isochoric,
        start: *s,
        end,
        work_by_gas: 0.0,
        heat_into_gas: delta_u,
        delta_u,
    })
}

/// Constant-pressure expansion or compression to `v_target`.
pub fn advance_isobaric(s: &GasState, v_target: f64, props: &GasProperties) -> Result<ProcessStep> {
    positive_target("volume", v_target)?;
    let t_end = s.t * (v_target / s.v);
    let end = GasState {
        n: s.n,
        p: s.p,
        v: v_target,
        t: t_end,
    };
    let work = s.p * (v_target - s.v);
    let delta_u = s.n * props.c_v * props.r_molar * (t_end - s.t);
    Ok(ProcessStep {
        kind: ProcessKind::Isobaric,
        start: *s,
        end,
        work_by_gas: work,
        heat_into_gas: delta_u + work,
        delta_u,
    })
}

/// Reversible adiabatic volume change to `v_target`: `T·V^(γ-1)` and `P·V^γ`
/// are conserved.
pub fn advance_isentropic(
    s: &GasState,
    v_target: f64,
    props: &GasProperties,
) -> Result<ProcessStep> {
    positive_target("volume", v_target)?;
    let ratio = s.v / v_target;
    let end = GasState {
        n: s.n,
        p: s.p * ratio.powf(props.gamma),
        v: v_target,
        t: s.t * ratio.powf(props.gamma - 1.0),
    };
    let delta_u = s.n * props.c_v * props.r_molar * (end.t - s.t);
    Ok(ProcessStep {
        kind: ProcessKind::Isentropic,
        start: *s,
        end,
        work_by_gas: -delta_u,
        heat_into_gas: 0.0,
        delta_u,
    })
}

pub fn advance_isothermal(
    s: &GasState,
    v_target: f64,
    props: &GasProperties,
) -> Result<ProcessStep> {
    positive_target("volume", v_target)?;
    let end = GasState {
        n: s.n,
        p: s.p * (s.v / v_target),
        v: v_target,
        t: s.t,
    };
    let work = s.n * props.r_molar * s.t * (v_target / s.v).ln();
    Ok(ProcessStep {
        kind: ProcessKind::Isothermal,
        start: *s,
        end,
        work_by_gas: work,
        heat_into_gas: work,
        delta_u: 0.0,
    })
}

/// Ideal-gas entropy change between the endpoints of a step, J/K.
pub fn entropy_change(step: &ProcessStep, props: &GasProperties) -> f64 {
    let (s, e) = (&step.start, &step.end);
    s.n * props.r_molar * (props.c_v * (e.t / s.t).ln() + (e.v / s.v).ln())
}

pub(crate) fn relative_eq(a: f64, b: f64, rtol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= rtol * a.abs().max(b.abs())
}
