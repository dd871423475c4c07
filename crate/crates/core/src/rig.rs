//! Statics of the lever test rig.
//!
//! The actuator pushes the lever at distance `r_a` from the axle with force
//! `P·A`. A removable mass `m₂` hangs at horizontal distance `r_mx2`; an
//! optional fixed mass `m₁` sits at `(r_mx1, r_my1)` so that its moment falls
//! as the lever rises, giving a decreasing load. The lever itself is rigid,
//! massless and frictionless. Pressures returned here are gauge pressures.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

pub const STANDARD_GRAVITY: f64 = 9.80665;
pub const STANDARD_ATMOSPHERE: f64 = 101_325.0;

/// Inner diameter of the lay-flat tube the actuator pouch is made from, m.
pub const NOMINAL_ACTUATOR_DIAMETER: f64 = 0.048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoadMode {
    ConstantLoad,
    Otto,
}

impl LoadMode {
    pub fn name(self) -> &'static str {
        match self {
            LoadMode::ConstantLoad => "constant-load",
            LoadMode::Otto => "otto",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeverRig {
    /// Effective actuator area, m².
    pub area: f64,
    /// Axle to actuator line of action, m.
    pub r_a: f64,
    pub r_mx1: f64,
    pub r_my1: f64,
    pub r_mx2: f64,
    pub g: f64,
    pub p_atm: f64,
    /// Force needed to deform the pouch walls, N. Zero disables the term.
    pub wall_force: f64,
}

impl LeverRig {
    /// Rig with the given actuator area and lever contact distance; mass
    /// offsets start at zero.
    pub fn new(area: f64, r_a: f64) -> Result<Self> {
        let rig = Self {
            area,
            r_a,
            r_mx1: 0.0,
            r_my1: 0.0,
            r_mx2: 0.0,
            g: STANDARD_GRAVITY,
            p_atm: STANDARD_ATMOSPHERE,
            wall_force: 0.0,
        };
        rig.validate()?;
        Ok(rig)
    }

    /// Area of a circle with the nominal actuator diameter.
    pub fn nominal_area() -> f64 {
        std::f64::consts::PI * (NOMINAL_ACTUATOR_DIAMETER / 2.0).powi(2)
    }

    pub fn with_fixed_mass_offsets(mut self, r_mx1: f64, r_my1: f64) -> Self {
        self.r_mx1 = r_mx1;
        self.r_my1 = r_my1;
        self
    }

    pub fn with_hang_distance(mut self, r_mx2: f64) -> Self {
        self.r_mx2 = r_mx2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area > 0.0) || !(self.r_a > 0.0) {
            return Err(Error::domain(format!(
                "actuator area and contact distance must be positive, got A = {}, r_a = {}",
                self.area, self.r_a
            )));
        }
        if !(self.g > 0.0) {
            return Err(Error::domain(format!(
                "gravity must be positive, got {}",
                self.g
            )));
        }
        let offsets = [self.r_mx1, self.r_my1, self.r_mx2, self.wall_force];
        if offsets.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(
                "mass offsets and wall force must be non-negative",
            ));
        }
        if !(self.p_atm > 0.0) {
            return Err(Error::domain(format!(
                "ambient pressure must be positive, got {}",
                self.p_atm
            )));
        }
        Ok(())
    }

    /// Pressure that balances a moment `torque` (N·m) about the axle.
    fn balance(&self, torque: f64) -> f64 {
        torque / (self.area * self.r_a) + self.wall_force / self.area
    }

    pub fn gauge_to_absolute(&self, gauge: f64) -> f64 {
        gauge + self.p_atm
    }

    pub fn absolute_to_gauge(&self, absolute: f64) -> f64 {
        absolute - self.p_atm
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if !(theta.abs() < FRAC_PI_2) {
        return Err(Error::domain(format!(
            "lever angle {theta} rad outside (-π/2, π/2)"
        )));
    }
    Ok(())
}

fn check_mass(name: &str, m: f64) -> Result<()> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::domain(format!(
            "{name} must be non-negative, got {m}"
        )));
    }
    Ok(())
}

/// Gauge pressure holding the hung mass `m2` at angle `theta`.
pub fn pressure_constant_load(rig: &LeverRig, theta: f64, m2: f64) -> Result<f64> {
    rig.validate()?;
    check_angle(theta)?;
    check_mass("m2", m2)?;
    Ok(rig.balance(m2 * rig.g * theta.cos() * rig.r_mx2))
}

/// Gauge pressure holding the fixed mass `m1` and hung mass `m2`. With
/// `m2 = 0` this is the restoring (compression) profile.
pub fn pressure_otto(rig: &LeverRig, theta: f64, m1: f64, m2: f64) -> Result<f64> {
    rig.validate()?;
    check_angle(theta)?;
    check_mass("m1", m1)?;
    check_mass("m2", m2)?;
    let (sin, cos) = theta.sin_cos();
    let torque =
        m1 * rig.g * cos * rig.r_mx1 - m1 * rig.g * sin * rig.r_my1 + m2 * rig.g * cos * rig.r_mx2;
    Ok(rig.balance(torque))
}

/// Sampled pressure-versus-angle load curve.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile {
    samples: Vec<(f64, f64)>,
    mode: LoadMode,
}

impl LoadProfile {
    /// `samples` are `(theta [rad], gauge pressure [Pa])` pairs.
    pub fn new(samples: Vec<(f64, f64)>, mode: LoadMode) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("load profile has no samples"));
        }
        if samples
            .iter()
            .any(|(t, p)| !t.is_finite() || !p.is_finite())
        {
            return Err(Error::domain("load profile contains non-finite values"));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::domain(
                "load profile angles must be strictly increasing",
            ));
        }
        if mode == LoadMode::Otto && samples.windows(2).any(|w| !(w[1].1 < w[0].1)) {
            return Err(Error::constraint(
                "an Otto load profile must decrease strictly as the lever rises",
            ));
        }
        Ok(Self { samples, mode })
    }

    pub fn constant_load(rig: &LeverRig, thetas: &[f64], m2: f64) -> Result<Self> {
        let samples = thetas
            .iter()
            .map(|&t| Ok((t, pressure_constant_load(rig, t, m2)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples, LoadMode::ConstantLoad)
    }

    pub fn otto(rig: &LeverRig, thetas: &[f64], m1: f64, m2: f64) -> Result<Self> {
        let samples = thetas
            .iter()
            .map(|&t| Ok((t, pressure_otto(rig, t, m1, m2)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples, LoadMode::Otto)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn mode(&self) -> LoadMode {
        self.mode
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }
}

/// `n` evenly spaced angles from `theta0` to `theta1` inclusive.
pub fn theta_grid(theta0: f64, theta1: f64, n: usize) -> Vec<f64> {
    crate::compare::linspace(theta0, theta1, n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveWorkCheck {
    pub positive: bool,
    /// Smallest pointwise `P_expand − P_restore`, Pa.
    pub margin: f64,
}

pub fn check_positive_work(
    expand: &LoadProfile,
    restore: &LoadProfile,
) -> Result<PositiveWorkCheck> {
    aligned(expand, restore)?;
    let margin = expand
        .samples
        .iter()
        .zip(&restore.samples)
        .map(|(e, r)| e.1 - r.1)
        .fold(f64::INFINITY, f64::min);
    Ok(PositiveWorkCheck {
        positive: margin > 0.0,
        margin,
    })
}

fn aligned(a: &LoadProfile, b: &LoadProfile) -> Result<()> {
    if a.samples.len() != b.samples.len() {
        return Err(Error::Alignment(format!(
            "{} samples versus {}",
            a.samples.len(),
            b.samples.len()
        )));
    }
    if let Some(i) = a.thetas().zip(b.thetas()).position(|(x, y)| x != y) {
        return Err(Error::Alignment(format!("angles differ at sample {i}")));
    }
    Ok(())
}

/// Hung mass `m2` reproducing `p_target` (gauge) at `theta`. `m1` is ignored
/// in constant-load mode.
pub fn solve_mass_for_pressure(
    rig: &LeverRig,
    theta: f64,
    p_target: f64,
    mode: LoadMode,
    m1: f64,
) -> Result<f64> {
    rig.validate()?;
    check_angle(theta)?;
    if !p_target.is_finite() {
        return Err(Error::domain(format!(
            "target pressure {p_target} is not finite"
        )));
    }
    let (sin, cos) = theta.sin_cos();
    let lever = rig.g * cos * rig.r_mx2;
    let fixed = match mode {
        LoadMode::ConstantLoad => 0.0,
        LoadMode::Otto => {
            check_mass("m1", m1)?;
            m1 * rig.g * (cos * rig.r_mx1 - sin * rig.r_my1)
        }
    };
    let needed = (p_target - rig.wall_force / rig.area) * rig.area * rig.r_a - fixed;
    if needed == 0.0 {
        return Ok(0.0);
    }
    if !(lever > 0.0) {
        return Err(Error::InfeasibleTarget(format!(
            "hung mass has no lever arm (r_mx2 = {})",
            rig.r_mx2
        )));
    }
    let m2 = needed / lever;
    if m2 < 0.0 {
        return Err(Error::InfeasibleTarget(format!(
            "{p_target} Pa at {:.4}° would need a negative hung mass ({m2:.6} kg)",
            theta.to_degrees()
        )));
    }
    Ok(m2)
}

/// Fixed mass `m1` whose restoring profile passes through `p_target` at
/// `theta` for the rig's `(r_mx1, r_my1)` geometry.
pub fn solve_fixed_mass_for_pressure(rig: &LeverRig, theta: f64, p_target: f64) -> Result<f64> {
    rig.validate()?;
    check_angle(theta)?;
    let (sin, cos) = theta.sin_cos();
    let arm = rig.g * (cos * rig.r_mx1 - sin * rig.r_my1);
    let needed = (p_target - rig.wall_force / rig.area) * rig.area * rig.r_a;
    if !(arm > 0.0) {
        return Err(Error::InfeasibleTarget(format!(
            "fixed mass geometry (r_mx1 = {}, r_my1 = {}) gives no restoring moment at {:.4}°",
            rig.r_mx1,
            rig.r_my1,
            theta.to_degrees()
        )));
    }
    let m1 = needed / arm;
    if m1 < 0.0 {
        return Err(Error::InfeasibleTarget(format!(
            "{p_target} Pa would need a negative fixed mass"
        )));
    }
    Ok(m1)
}

/// Vertical travel of a point at horizontal distance `r` when the lever turns
/// from `theta0` to `theta1`.
pub fn stroke_displacement(r: f64, theta0: f64, theta1: f64) -> f64 {
    r * (theta1.sin() - theta0.sin())
}

/// Work done lifting `lift_mass` through `displacement`.
pub fn net_cycle_work(lift_mass: f64, displacement: f64, g: f64) -> f64 {
    lift_mass * g * displacement
}

/// Net work delivered to the lever over a quasi-static expand/restore loop,
/// `∫(P_expand − P_restore)·A·r_a dθ`, by the trapezoidal rule on the shared
/// angle samples.
pub fn profile_work(expand: &LoadProfile, restore: &LoadProfile, rig: &LeverRig) -> Result<f64> {
    aligned(expand, restore)?;
    let diff: Vec<(f64, f64)> = expand
        .samples
        .iter()
        .zip(&restore.samples)
        .map(|(e, r)| (e.0, e.1 - r.1))
        .collect();
    let integral: f64 = diff
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum();
    Ok(integral * rig.area * rig.r_a)
}
