//! Closed cycles built from process primitives, and the closed-form
//! efficiency expressions for constant-load (rectangular) and Otto cycles.
//!
//! Corner numbering follows each cycle's own convention: the constant-load
//! cycle heats 1→2 at constant volume, the Otto cycle compresses 1→2. In both,
//! corner 1 is the coldest state and corner 3 the hottest.

use crate::error::{Error, Result};
use crate::thermo::{
    advance_isentropic, advance_isobaric, advance_isochoric, advance_isothermal,
    check_gas_consistency, internal_energy, relative_eq, GasProperties, GasState, ProcessStep,
    INVARIANT_RTOL,
};

/// An ordered, chained and closed sequence of process steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    label: String,
    steps: Vec<ProcessStep>,
}

impl Cycle {
    /// Rejects step lists that do not chain exactly or do not return to the
    /// first state within [`INVARIANT_RTOL`].
    pub fn new(label: impl Into<String>, steps: Vec<ProcessStep>) -> Result<Self> {
        let (first, last) = match (steps.first(), steps.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::constraint("a cycle needs at least one step")),
        };
        for (i, pair) in steps.windows(2).enumerate() {
            if pair[0].end() != pair[1].start() {
                return Err(Error::constraint(format!(
                    "step {} does not start where step {} ends",
                    i + 2,
                    i + 1
                )));
            }
        }
        if !last.end().approx_eq(first.start(), INVARIANT_RTOL) {
            return Err(Error::constraint(format!(
                "cycle is not closed: starts at [{}] but ends at [{}]",
                first.start(),
                last.end()
            )));
        }
        Ok(Self {
            label: label.into(),
            steps,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn steps(&self) -> &[ProcessStep] {
        &self.steps
    }

    /// The state at the start of each step, i.e. corners 1, 2, 3, ...
    pub fn corners(&self) -> Vec<GasState> {
        self.steps.iter().map(|s| *s.start()).collect()
    }
}

/// Net energetics and state extrema of a closed cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleMetrics {
    pub net_work: f64,
    /// Sum of heat over steps with `Q > 0`.
    pub heat_in: f64,
    /// Magnitude of the summed heat over steps with `Q < 0`.
    pub heat_out: f64,
    pub efficiency: f64,
    /// `∮dU`, zero up to rounding for a closed cycle.
    pub delta_u_sum: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

pub fn evaluate(c: &Cycle) -> Result<CycleMetrics> {
    let mut net_work = 0.0;
    let mut heat_in = 0.0;
    let mut heat_out = 0.0;
    let mut delta_u_sum = 0.0;
    let (mut t_min, mut t_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut p_min, mut p_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);

    for step in c.steps() {
        net_work += step.work_by_gas();
        delta_u_sum += step.delta_u();
        let q = step.heat_into_gas();
        if q > 0.0 {
            heat_in += q;
        } else {
            heat_out -= q;
        }
        for s in [step.start(), step.end()] {
            t_min = t_min.min(s.temperature());
            t_max = t_max.max(s.temperature());
            p_min = p_min.min(s.pressure());
            p_max = p_max.max(s.pressure());
            v_min = v_min.min(s.volume());
            v_max = v_max.max(s.volume());
        }
    }

    if !(heat_in > 0.0) {
        return Err(Error::UndefinedEfficiency(format!(
            "cycle `{}` absorbs no heat",
            c.label()
        )));
    }

    Ok(CycleMetrics {
        net_work,
        heat_in,
        heat_out,
        efficiency: net_work / heat_in,
        delta_u_sum,
        t_min,
        t_max,
        p_min,
        p_max,
        v_min,
        v_max,
    })
}

/// Rectangular cycle: isochoric heating to `p_high`, isobaric expansion by
/// `r`, isochoric cooling back to the start pressure, isobaric compression.
pub fn build_constant_load_cycle(
    start: &GasState,
    p_high: f64,
    r: f64,
    props: &GasProperties,
) -> Result<Cycle> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::constraint(format!(
            "expansion ratio must exceed 1, got {r}"
        )));
    }
    if !(p_high > start.pressure()) || !p_high.is_finite() {
        return Err(Error::constraint(format!(
            "high pressure {p_high} Pa must exceed start pressure {} Pa",
            start.pressure()
        )));
    }
    let x = p_high / start.pressure() * r;
    let r_max = max_expansion_ratio_cl(x)?;
    if r >= r_max {
        return Err(Error::constraint(format!(
            "expansion ratio {r} reaches the constant-load maximum expansion ratio {r_max}"
        )));
    }

    let t2 = start.temperature() * (p_high / start.pressure());
    let heat = advance_isochoric(start, t2, props)?;
    let expand = advance_isobaric(heat.end(), start.volume() * r, props)?;
    let t4 = expand.end().temperature() * (start.pressure() / expand.end().pressure());
    let cool = advance_isochoric(expand.end(), t4, props)?;
    let compress = advance_isobaric(cool.end(), start.volume(), props)?;
    Cycle::new("constant-load", vec![heat, expand, cool, compress])
}

/// High-side pressure of the constant-load cycle whose hottest corner is
/// `t_max` after expanding by `r`. Fails when `r` reaches the maximum
/// expansion ratio `t_max / T₁`.
pub fn constant_load_high_pressure(start: &GasState, t_max: f64, r: f64) -> Result<f64> {
    if !(t_max > 0.0) {
        return Err(Error::domain(format!(
            "maximum temperature must be positive, got {t_max}"
        )));
    }
    let x = t_max / start.temperature();
    if x <= 1.0 {
        return Err(Error::constraint(format!(
            "maximum temperature {t_max} K must exceed start temperature {} K",
            start.temperature()
        )));
    }
    let r_max = max_expansion_ratio_cl(x)?;
    if !(r > 1.0) || r >= r_max {
        return Err(Error::constraint(format!(
            "expansion ratio {r} outside (1, {r_max}); the maximum expansion ratio of a \
             constant-load cycle is the temperature ratio x = {x}"
        )));
    }
    Ok(start.pressure() * x / r)
}

/// Otto cycle starting at its coldest, largest-volume corner.
pub fn build_otto_cycle(
    start: &GasState,
    r: f64,
    t_max: f64,
    props: &GasProperties,
) -> Result<Cycle> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::constraint(format!(
            "expansion ratio must exceed 1, got {r}"
        )));
    }
    let t2 = start.temperature() * r.powf(props.gamma() - 1.0);
    if !(t_max > t2) || !t_max.is_finite() {
        return Err(Error::constraint(format!(
            "maximum temperature {t_max} K does not exceed the compression temperature {t2} K"
        )));
    }
    let compress = advance_isentropic(start, start.volume() / r, props)?;
    let heat = advance_isochoric(compress.end(), t_max, props)?;
    let expand = advance_isentropic(heat.end(), start.volume(), props)?;
    let reject = advance_isochoric(expand.end(), start.temperature(), props)?;
    Cycle::new("otto", vec![compress, heat, expand, reject])
}

/// Carnot cycle between `t_cold` (the start temperature) and `t_hot`,
/// expanding isothermally by `iso_ratio` on the hot side.
pub fn build_carnot_cycle(
    start: &GasState,
    t_hot: f64,
    iso_ratio: f64,
    props: &GasProperties,
) -> Result<Cycle> {
    let t_cold = start.temperature();
    if !(t_hot > t_cold) {
        return Err(Error::constraint(format!(
            "hot temperature {t_hot} K must exceed {t_cold} K"
        )));
    }
    if !(iso_ratio > 1.0) {
        return Err(Error::constraint(format!(
            "isothermal ratio must exceed 1, got {iso_ratio}"
        )));
    }
    let adiabatic = (t_cold / t_hot).powf(props.c_v());
    let compress = advance_isentropic(start, start.volume() * adiabatic, props)?;
    let hot = advance_isothermal(compress.end(), compress.end().volume() * iso_ratio, props)?;
    let expand = advance_isentropic(hot.end(), start.volume() * iso_ratio, props)?;
    let cold = advance_isothermal(expand.end(), start.volume(), props)?;
    Cycle::new("carnot", vec![compress, hot, expand, cold])
}

/// `(P₂−P₁)(V₃−V₂) / [P₂(V₃−V₂) + U₃ − U₁]`.
pub fn efficiency_cl_general(p1: f64, p2: f64, v2: f64, v3: f64, u1: f64, u3: f64) -> Result<f64> {
    if p2 < p1 || v3 < v2 {
        return Err(Error::domain(format!(
            "constant-load corners out of order: P1 = {p1}, P2 = {p2}, V2 = {v2}, V3 = {v3}"
        )));
    }
    let denom = p2 * (v3 - v2) + u3 - u1;
    if !(denom > 0.0) {
        return Err(Error::domain(format!(
            "heat input {denom} J is not positive"
        )));
    }
    Ok((p2 - p1) * (v3 - v2) / denom)
}

/// Ideal-gas constant-load efficiency for temperature ratio `x = T₃/T₁` and
/// expansion ratio `r = V₃/V₁`.
pub fn efficiency_cl_ideal(x: f64, r: f64, c_v: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::constraint(format!(
            "expansion ratio must exceed 1, got {r}"
        )));
    }
    if !(x > r) {
        return Err(Error::constraint(format!(
            "temperature ratio {x} must exceed the expansion ratio {r}"
        )));
    }
    if !(c_v > 0.0) {
        return Err(Error::domain(format!("c_v must be positive, got {c_v}")));
    }
    let q = x / r;
    Ok((q - 1.0) * (r - 1.0) / (q * (r - 1.0) + c_v * (x - 1.0)))
}

/// `1 − (U₄ − U₁)/(U₃ − U₂)` from the four Otto corner energies.
pub fn efficiency_otto_general(u1: f64, u2: f64, u3: f64, u4: f64) -> Result<f64> {
    if !(u3 > u2) {
        return Err(Error::domain(format!(
            "no heat addition: U3 = {u3} <= U2 = {u2}"
        )));
    }
    if u4 < u1 {
        return Err(Error::domain(format!(
            "heat rejection reversed: U4 = {u4} < U1 = {u1}"
        )));
    }
    Ok(1.0 - (u4 - u1) / (u3 - u2))
}

/// `1 − r^(1−γ)`.
pub fn efficiency_otto_ideal(r: f64, gamma: f64) -> Result<f64> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::domain(format!(
            "expansion ratio must be at least 1, got {r}"
        )));
    }
    if !(gamma > 1.0) {
        return Err(Error::domain(format!("gamma must exceed 1, got {gamma}")));
    }
    Ok(1.0 - r.powf(1.0 - gamma))
}

/// Exclusive upper bound on the constant-load expansion ratio: `x`.
pub fn max_expansion_ratio_cl(x: f64) -> Result<f64> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "temperature ratio must exceed 1, got {x}"
        )));
    }
    Ok(x)
}

/// Exclusive upper bound on the Otto expansion ratio: `x^(1/(γ−1))`.
pub fn max_expansion_ratio_otto(x: f64, gamma: f64) -> Result<f64> {
    max_expansion_ratio_cl(x)?;
    if !(gamma > 1.0) {
        return Err(Error::domain(format!("gamma must exceed 1, got {gamma}")));
    }
    Ok(x.powf(1.0 / (gamma - 1.0)))
}

pub fn carnot_efficiency(t1: f64, t3: f64) -> Result<f64> {
    if !(t1 > 0.0) || !(t3 > t1) {
        return Err(Error::domain(format!(
            "need T3 > T1 > 0, got T1 = {t1}, T3 = {t3}"
        )));
    }
    Ok(1.0 - t1 / t3)
}

/// Evaluates the general constant-load expression on a cycle produced by
/// [`build_constant_load_cycle`].
pub fn efficiency_cl_from_cycle(c: &Cycle, props: &GasProperties) -> Result<f64> {
    let corners = four_corners(c)?;
    let [s1, s2, s3, _] = corners;
    efficiency_cl_general(
        s1.pressure(),
        s2.pressure(),
        s2.volume(),
        s3.volume(),
        internal_energy(&s1, props),
        internal_energy(&s3, props),
    )
}

/// Evaluates the internal-energy Otto expression on a cycle produced by
/// [`build_otto_cycle`].
pub fn efficiency_otto_from_cycle(c: &Cycle, props: &GasProperties) -> Result<f64> {
    let [s1, s2, s3, s4] = four_corners(c)?;
    efficiency_otto_general(
        internal_energy(&s1, props),
        internal_energy(&s2, props),
        internal_energy(&s3, props),
        internal_energy(&s4, props),
    )
}

fn four_corners(c: &Cycle) -> Result<[GasState; 4]> {
    c.corners().try_into().map_err(|v: Vec<GasState>| {
        Error::domain(format!("expected 4 corners, cycle has {}", v.len()))
    })
}

/// Consistency gate for computations that use both `gamma` and `c_v`.
pub fn require_same_gas(gamma: f64, c_v: f64) -> Result<()> {
    check_gas_consistency(gamma, c_v, INVARIANT_RTOL)
}

/// True when `a` and `b` agree to relative `rtol`.
pub fn approx_equal(a: f64, b: f64, rtol: f64) -> bool {
    relative_eq(a, b, rtol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::state_from_ptv;
    use approx::assert_relative_eq;

    fn start(p: f64, t: f64) -> GasState {
        state_from_ptv(p, t, 1e-4, &GasProperties::air()).unwrap()
    }

    #[test]
    fn constant_load_rectangle() {
        let props = GasProperties::air();
        let s = start(100e3, 300.0);
        let c = build_constant_load_cycle(&s, 150e3, 1.2, &props).unwrap();
        assert_eq!(c.steps().len(), 4);
        let corners = c.corners();
        assert_relative_eq!(
            corners[2].temperature() / corners[0].temperature(),
            1.8,
            max_relative = 1e-12
        );

        let m = evaluate(&c).unwrap();
        let area = (150e3 - 100e3) * (1.2e-4 - 1e-4);
        assert_relative_eq!(m.net_work, area, max_relative = 1e-9);
        // W = 1 J; Q_in = 2.5·V1·ΔP + 3.5·P2·ΔV = 12.5 J + 10.5 J.
        assert_relative_eq!(m.efficiency, 1.0 / 23.0, max_relative = 1e-12);
        assert_relative_eq!(m.net_work, m.heat_in - m.heat_out, max_relative = 1e-9);
        assert!(m.delta_u_sum.abs() <= 1e-9 * m.heat_in);
    }

    #[test]
    fn constant_load_rejects_degenerate() {
        let props = GasProperties::air();
        let s = start(100e3, 300.0);
        assert!(matches!(
            build_constant_load_cycle(&s, 150e3, 1.0, &props),
            Err(Error::Constraint(_))
        ));
        assert!(matches!(
            build_constant_load_cycle(&s, 100e3, 1.2, &props),
            Err(Error::Constraint(_))
        ));
        assert!(constant_load_high_pressure(&s, 360.0, 1.2).is_err());
        let p = constant_load_high_pressure(&s, 450.0, 1.2).unwrap();
        assert_relative_eq!(p, 125e3, max_relative = 1e-12);
    }

    #[test]
    fn otto_corners_and_efficiency() {
        let props = GasProperties::air();
        let s = start(100e3, 300.0);
        let c = build_otto_cycle(&s, 2.0, 600.0, &props).unwrap();
        assert_relative_eq!(
            c.corners()[1].temperature(),
            395.852373231868,
            max_relative = 1e-12
        );

        let m = evaluate(&c).unwrap();
        assert_relative_eq!(m.efficiency, 0.242141716744801, max_relative = 1e-12);
        assert!(m.delta_u_sum.abs() <= 1e-9 * m.heat_in);
        assert_relative_eq!(
            efficiency_otto_from_cycle(&c, &props).unwrap(),
            efficiency_otto_ideal(2.0, 1.4).unwrap(),
            max_relative = 1e-12
        );

        let hotter = build_otto_cycle(&s, 2.0, 900.0, &props).unwrap();
        assert_relative_eq!(
            evaluate(&hotter).unwrap().efficiency,
            m.efficiency,
            max_relative = 1e-12
        );

        assert!(build_otto_cycle(&s, 1.0, 600.0, &props).is_err());
        assert!(build_otto_cycle(&s, 2.0, 390.0, &props).is_err());
    }

    #[test]
    fn carnot_self_test() {
        let props = GasProperties::air();
        let s = start(100e3, 300.0);
        let c = build_carnot_cycle(&s, 450.0, 1.5, &props).unwrap();
        let m = evaluate(&c).unwrap();
        assert_relative_eq!(m.efficiency, 1.0 - 300.0 / 450.0, max_relative = 1e-9);
        assert_relative_eq!(
            m.efficiency,
            carnot_efficiency(300.0, 450.0).unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn evaluate_rejects_heatless_cycle() {
        let props = GasProperties::air();
        let s = start(100e3, 300.0);
        let step = advance_isochoric(&s, 300.0, &props).unwrap();
        let c = Cycle::new("idle", vec![step]).unwrap();
        assert!(matches!(evaluate(&c), Err(Error::UndefinedEfficiency(_))));
    }

    #[test]
    fn cycle_must_close_and_chain() {
        let props = GasProperties::air();
        let s = start(100e3, 300.0);
        let a = advance_isochoric(&s, 400.0, &props).unwrap();
        assert!(Cycle::new("open", vec![a]).is_err());
        let b = advance_isochoric(&s, 300.0, &props).unwrap();
        assert!(Cycle::new("unchained", vec![a, b]).is_err());
        assert!(Cycle::new("empty", vec![]).is_err());
    }

    #[test]
    fn cl_general_examples() {
        assert_eq!(
            efficiency_cl_general(1e5, 1e5, 1e-4, 2e-4, 10.0, 20.0).unwrap(),
            0.0
        );
        assert_eq!(
            efficiency_cl_general(1e5, 2e5, 1e-4, 1e-4, 10.0, 20.0).unwrap(),
            0.0
        );
        assert!(efficiency_cl_general(1e5, 2e5, 1e-4, 1e-4, 20.0, 20.0).is_err());

        let props = GasProperties::air();
        let c = build_constant_load_cycle(&start(100e3, 300.0), 150e3, 1.2, &props).unwrap();
        assert_relative_eq!(
            efficiency_cl_from_cycle(&c, &props).unwrap(),
            evaluate(&c).unwrap().efficiency,
            max_relative = 1e-12
        );
    }

    #[test]
    fn cl_ideal_examples() {
        assert_relative_eq!(
            efficiency_cl_ideal(1.5, 1.2, 2.5).unwrap(),
            0.05 / 1.5,
            max_relative = 1e-12
        );
        assert!(matches!(
            efficiency_cl_ideal(1.2, 1.2, 2.5),
            Err(Error::Constraint(_))
        ));
        assert!(efficiency_cl_ideal(1.5, 1.0, 2.5).is_err());
        let eta = efficiency_cl_ideal(1.5, 1.2, 2.5).unwrap();
        assert!(eta < 1.0 - 1.2 / 1.5);
    }

    #[test]
    fn otto_general_examples() {
        assert_eq!(efficiency_otto_general(5.0, 6.0, 9.0, 5.0).unwrap(), 1.0);
        assert_eq!(efficiency_otto_general(5.0, 5.0, 9.0, 9.0).unwrap(), 0.0);
        assert!(efficiency_otto_general(5.0, 6.0, 6.0, 5.0).is_err());
    }

    #[test]
    fn otto_ideal_examples() {
        assert_eq!(efficiency_otto_ideal(1.0, 1.4).unwrap(), 0.0);
        assert_relative_eq!(
            efficiency_otto_ideal(1.027, 1.4).unwrap(),
            0.0106001901528069,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            efficiency_otto_ideal(2.0, 1.4).unwrap(),
            0.242141716744801,
            max_relative = 1e-12
        );
        assert!(efficiency_otto_ideal(0.9, 1.4).is_err());
    }

    #[test]
    fn expansion_ratio_bounds() {
        assert_eq!(max_expansion_ratio_cl(1.5).unwrap(), 1.5);
        assert_relative_eq!(
            max_expansion_ratio_otto(1.5, 1.4).unwrap(),
            2.75567596063108,
            max_relative = 1e-12
        );
        let near = 1.0 + 1e-12;
        assert!(max_expansion_ratio_cl(near).unwrap() - 1.0 < 1e-11);
        assert!(max_expansion_ratio_otto(near, 1.4).unwrap() - 1.0 < 1e-10);
        assert!(max_expansion_ratio_cl(2.0).unwrap() < max_expansion_ratio_otto(2.0, 1.4).unwrap());
        assert!(max_expansion_ratio_cl(1.0).is_err());
    }

    #[test]
    fn carnot_examples() {
        assert!(carnot_efficiency(300.0, 300.0).is_err());
        assert_eq!(carnot_efficiency(300.0, 600.0).unwrap(), 0.5);
        assert_relative_eq!(
            carnot_efficiency(300.0, 317.0).unwrap(),
            0.0536277602523659,
            max_relative = 1e-12
        );
    }

    #[test]
    fn same_gas_gate() {
        assert!(require_same_gas(1.4, 2.5).is_ok());
        assert!(require_same_gas(1.4, 1.5).is_err());
    }

    mod props {
        use super::super::*;
        use crate::thermo::state_from_ptv;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn cl_forms_agree(r in 1.01f64..3.0, s in 1.01f64..3.0, t1 in 250.0f64..400.0) {
                let props = GasProperties::air();
                let x = r * s;
                let st = state_from_ptv(1e5, t1, 1e-4, &props).unwrap();
                let c = build_constant_load_cycle(&st, 1e5 * s, r, &props).unwrap();
                let stepped = evaluate(&c).unwrap().efficiency;
                let general = efficiency_cl_from_cycle(&c, &props).unwrap();
                let ideal = efficiency_cl_ideal(x, r, props.c_v()).unwrap();
                prop_assert!(approx_equal(stepped, general, 1e-12));
                prop_assert!(approx_equal(ideal, general, 1e-12));
                prop_assert!(ideal < 1.0 - r / x);
            }

            #[test]
            fn otto_monotone(r in 1.001f64..10.0, dr in 1e-3f64..1.0, g in 1.05f64..1.9, dg in 1e-3f64..0.1) {
                let base = efficiency_otto_ideal(r, g).unwrap();
                prop_assert!(efficiency_otto_ideal(r + dr, g).unwrap() > base);
                prop_assert!(efficiency_otto_ideal(r, g + dg).unwrap() > base);
            }
        }
    }
}
