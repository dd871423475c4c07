//! Angle smoothing and heater-driven cycle segmentation.

use super::{CycleSegment, SensorSample};

/// Default heater on/off threshold, V. The relay reads about 4 V when on.
pub const DEFAULT_HEATER_THRESHOLD: f64 = 2.0;

/// Centered moving average of the angle channel over a `window_s` time window.
/// Windows shrink at the ends of the log; other channels are copied as is.
pub fn smooth_angle(samples: &[SensorSample], window_s: f64) -> Vec<SensorSample> {
    if samples.is_empty() || !(window_s > 0.0) {
        return samples.to_vec();
    }
    let half = 0.5 * window_s;
    // Absorbs rounding in sample timestamps at the window edge.
    let slack = 1e-9 * window_s;
    let mut lo = 0;
    let mut hi = 0;
    samples
        .iter()
        .map(|s| {
            while samples[lo].t < s.t - half - slack {
                lo += 1;
            }
            while hi + 1 < samples.len() && samples[hi + 1].t <= s.t + half + slack {
                hi += 1;
            }
            let window = &samples[lo..=hi];
            let mean = window.iter().map(|w| w.angle).sum::<f64>() / window.len() as f64;
            SensorSample { angle: mean, ..*s }
        })
        .collect()
}

/// Splits a log into heater periods, each running from one rising edge of the
/// heater signal to the next. The trailing period without a closing edge is
/// dropped. A log that starts with the heater already on does not count that
/// first sample as an edge.
pub fn segment_cycles(samples: &[SensorSample], heater_threshold: f64) -> Vec<CycleSegment<'_>> {
    let on = |s: &SensorSample| s.heater_voltage > heater_threshold;
    let edges: Vec<usize> = (1..samples.len())
        .filter(|&i| on(&samples[i]) && !on(&samples[i - 1]))
        .collect();

    edges
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let on_intervals = || {
                (a..b)
                    .filter(|&i| on(&samples[i]))
                    .map(|i| (i, samples[i + 1].t - samples[i].t))
            };
            let heater_on_duration = on_intervals().map(|(_, dt)| dt).sum();
            let heater_charge = on_intervals()
                .map(|(i, dt)| samples[i].heater_current.map(|amps| amps * dt))
                .sum::<Option<f64>>();
            CycleSegment::new(&samples[a..b], a, heater_on_duration, heater_charge)
        })
        .collect()
}
