//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

/// Adaptive Runge-Kutta-Fehlberg 4(5) integration of `dy/dx = f(x, y)` from
/// `x0` to `x1`, with a relative local error target `rtol`.
pub fn rkf45(f: impl Fn(f64, f64) -> f64, x0: f64, y0: f64, x1: f64, rtol: f64) -> f64 {
    let span = x1 - x0;
    let mut x = x0;
    let mut y = y0;
    let mut h = span / 100.0;
    while (x1 - x) * span.signum() > 0.0 {
        if (x + h - x1) * span.signum() > 0.0 {
            h = x1 - x;
        }
        let k1 = h * f(x, y);
        let k2 = h * f(x + h / 4.0, y + k1 / 4.0);
        let k3 = h * f(x + 3.0 * h / 8.0, y + 3.0 * k1 / 32.0 + 9.0 * k2 / 32.0);
        let k4 = h * f(
            x + 12.0 * h / 13.0,
            y + 1932.0 * k1 / 2197.0 - 7200.0 * k2 / 2197.0 + 7296.0 * k3 / 2197.0,
        );
        let k5 = h * f(
            x + h,
            y + 439.0 * k1 / 216.0 - 8.0 * k2 + 3680.0 * k3 / 513.0 - 845.0 * k4 / 4104.0,
        );
        let k6 = h * f(
            x + h / 2.0,
            y - 8.0 * k1 / 27.0 + 2.0 * k2 - 3544.0 * k3 / 2565.0 + 1859.0 * k4 / 4104.0
                - 11.0 * k5 / 40.0,
        );
        let y4 = y + 25.0 * k1 / 216.0 + 1408.0 * k3 / 2565.0 + 2197.0 * k4 / 4104.0 - k5 / 5.0;
        let y5 = y + 16.0 * k1 / 135.0 + 6656.0 * k3 / 12825.0 + 28561.0 * k4 / 56430.0
            - 9.0 * k5 / 50.0
            + 2.0 * k6 / 55.0;
        let err = (y5 - y4).abs();
        let tol = rtol * y.abs().max(f64::MIN_POSITIVE);
        if err <= tol {
            x += h;
            y = y5;
        }
        let scale = if err == 0.0 {
            2.0
        } else {
            (0.84 * (tol / err).powf(0.25)).clamp(0.1, 2.0)
        };
        h *= scale;
    }
    y
}

/// Adiabatic reversible endpoint from `dU = −P dV`: integrates
/// `dT/dV = −T / (c_v · V)` and returns `(P, T)` at `v1`.
pub fn adiabatic_endpoint(p0: f64, v0: f64, t0: f64, v1: f64, c_v: f64) -> (f64, f64) {
    let t1 = rkf45(|v, t| -t / (c_v * v), v0, t0, v1, 1e-12);
    // n·R = P·V/T is fixed along the path.
    let nr = p0 * v0 / t0;
    (nr * t1 / v1, t1)
}

/// Work `∫P dV` along an isotherm by composite Simpson quadrature.
pub fn isothermal_work(p0: f64, v0: f64, v1: f64, intervals: usize) -> f64 {
    let c = p0 * v0;
    let n = intervals + intervals % 2;
    let h = (v1 - v0) / n as f64;
    let f = |v: f64| c / v;
    let mut s = f(v0) + f(v1);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(v0 + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn oracles_match_closed_forms() {
    let (p, t) = adiabatic_endpoint(1e5, 1e-3, 300.0, 0.5e-3, 2.5);
    assert!((t / (300.0 * 2f64.powf(0.4)) - 1.0).abs() < 1e-9);
    assert!((p / (1e5 * 2f64.powf(1.4)) - 1.0).abs() < 1e-9);
    let w = isothermal_work(1e5, 1e-3, 2e-3, 2000);
    assert!((w / (100.0 * 2f64.ln()) - 1.0).abs() < 1e-12);
}
