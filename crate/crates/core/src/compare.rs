//! Constant-load to Otto efficiency ratio over matched temperature and
//! expansion ratios, with CSV and SVG heat-map export.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::cycles::{
    efficiency_cl_ideal, efficiency_otto_ideal, max_expansion_ratio_cl, max_expansion_ratio_otto,
    require_same_gas,
};
use crate::error::{Error, Result};

/// Axis ranges, resolution and gas for a ratio sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub nx: usize,
    pub nr: usize,
    pub gamma: f64,
    pub c_v: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_min: 1.05,
            x_max: 2.0,
            r_min: 1.01,
            r_max: 2.0,
            nx: 200,
            nr: 200,
            gamma: 1.4,
            c_v: 2.5,
        }
    }
}

/// Cell evaluation order. Results are identical for every variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    Serial,
    #[default]
    Parallel,
}

/// `cells[i][j]` holds `η_CL/η_O` at `(x_axis[i], r_axis[j])`, or `None` where
/// the expansion ratio violates the maximum expansion ratio constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioGrid {
    pub x_axis: Vec<f64>,
    pub r_axis: Vec<f64>,
    pub cells: Vec<Vec<Option<f64>>>,
    pub gamma: f64,
    pub c_v: f64,
}

impl RatioGrid {
    pub fn feasible_count(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_some()).count()
    }

    pub fn feasible_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.cells.iter().flatten().filter_map(|c| *c)
    }
}

/// Evenly spaced points, both endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * (i as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

/// Ratio at one `(x, r)` point, `None` outside either expansion-ratio bound.
pub fn ratio_cell(x: f64, r: f64, gamma: f64, c_v: f64) -> Result<Option<f64>> {
    if r >= max_expansion_ratio_cl(x)? || r >= max_expansion_ratio_otto(x, gamma)? {
        return Ok(None);
    }
    let cl = efficiency_cl_ideal(x, r, c_v)?;
    let otto = efficiency_otto_ideal(r, gamma)?;
    Ok(Some(cl / otto))
}

pub fn sweep_ratio_grid(spec: &GridSpec) -> Result<RatioGrid> {
    sweep_ratio_grid_with(spec, Evaluation::default())
}

pub fn sweep_ratio_grid_with(spec: &GridSpec, evaluation: Evaluation) -> Result<RatioGrid> {
    require_same_gas(spec.gamma, spec.c_v)?;
    if spec.nx < 2 || spec.nr < 2 {
        return Err(Error::domain(format!(
            "grid needs at least 2 points per axis, got {} x {}",
            spec.nx, spec.nr
        )));
    }
    if !(1.0 < spec.x_min && spec.x_min < spec.x_max) || !spec.x_max.is_finite() {
        return Err(Error::domain(format!(
            "temperature ratio range must satisfy 1 < x_min < x_max, got [{}, {}]",
            spec.x_min, spec.x_max
        )));
    }
    if !(1.0 < spec.r_min && spec.r_min < spec.r_max) || !spec.r_max.is_finite() {
        return Err(Error::domain(format!(
            "expansion ratio range must satisfy 1 < r_min < r_max, got [{}, {}]",
            spec.r_min, spec.r_max
        )));
    }

    let x_axis = linspace(spec.x_min, spec.x_max, spec.nx);
    let r_axis = linspace(spec.r_min, spec.r_max, spec.nr);
    let row = |x: &f64| -> Result<Vec<Option<f64>>> {
        r_axis
            .iter()
            .map(|&r| ratio_cell(*x, r, spec.gamma, spec.c_v))
            .collect()
    };
    // Rows are collected in index order either way.
    let cells = match evaluation {
        Evaluation::Serial => x_axis.iter().map(row).collect::<Result<Vec<_>>>()?,
        Evaluation::Parallel => x_axis.par_iter().map(row).collect::<Result<Vec<_>>>()?,
    };

    Ok(RatioGrid {
        x_axis,
        r_axis,
        cells,
        gamma: spec.gamma,
        c_v: spec.c_v,
    })
}

/// Formats like C's `%.{sig}g`: shortest of fixed or scientific notation,
/// trailing zeros trimmed.
pub fn format_sig(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= sig as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, v)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders the grid as CSV: a header of expansion ratios, one row per
/// temperature ratio, `NA` for infeasible cells.
pub fn grid_csv(g: &RatioGrid) -> String {
    let mut out = String::from("x\\r");
    for r in &g.r_axis {
        out.push(',');
        out.push_str(&format_sig(*r, 9));
    }
    out.push('\n');
    for (x, row) in g.x_axis.iter().zip(&g.cells) {
        out.push_str(&format_sig(*x, 9));
        for cell in row {
            out.push(',');
            match cell {
                Some(v) => out.push_str(&format_sig(*v, 9)),
                None => out.push_str("NA"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_grid_csv(g: &RatioGrid, path: &Path) -> Result<()> {
    fs::write(path, grid_csv(g)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn parse_hex(s: &str) -> Option<Rgb> {
        let s = s.strip_prefix('#').unwrap_or(s);
        if s.len() != 6 {
            return None;
        }
        let byte = |i: usize| u8::from_str_radix(&s[i..i + 2], 16).ok();
        Some(Rgb(byte(0)?, byte(2)?, byte(4)?))
    }

    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

/// Linear two-color map over `[min, max]`; values outside are clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorScale {
    pub min: f64,
    pub max: f64,
    pub low: Rgb,
    pub high: Rgb,
    pub infeasible: Rgb,
}

impl Default for ColorScale {
    fn default() -> Self {
        Self {
            min: 0.0,
            max: 1.0,
            low: Rgb(0x44, 0x01, 0x54),
            high: Rgb(0xfd, 0xe7, 0x25),
            infeasible: Rgb(0xff, 0xff, 0xff),
        }
    }
}

impl ColorScale {
    pub fn color(&self, value: f64) -> Rgb {
        let span = self.max - self.min;
        let f = if span > 0.0 {
            ((value - self.min) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let lerp = |a: u8, b: u8| (a as f64 + f * (b as f64 - a as f64)).round() as u8;
        Rgb(
            lerp(self.low.0, self.high.0),
            lerp(self.low.1, self.high.1),
            lerp(self.low.2, self.high.2),
        )
    }
}

const PLOT_W: f64 = 600.0;
const PLOT_H: f64 = 600.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 70.0;
const BAR_W: f64 = 20.0;
const MARGIN_R: f64 = 110.0;
const TICKS: usize = 5;

/// SVG heat map with expansion ratio on the horizontal axis and temperature
/// ratio increasing upwards. Every cell is a `<rect class="cell ...">`.
pub fn render_heatmap_svg_string(g: &RatioGrid, scale: &ColorScale) -> Result<String> {
    if g.feasible_count() == 0 {
        return Err(Error::EmptyRegion);
    }
    let nr = g.r_axis.len();
    let nx = g.x_axis.len();
    let cw = PLOT_W / nr as f64;
    let ch = PLOT_H / nx as f64;
    let width = MARGIN_L + PLOT_W + MARGIN_R;
    let height = MARGIN_T + PLOT_H + MARGIN_B;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<g id="cells" shape-rendering="crispEdges">"#);
    for (i, row) in g.cells.iter().enumerate() {
        let y = MARGIN_T + PLOT_H - (i + 1) as f64 * ch;
        for (j, cell) in row.iter().enumerate() {
            let x = MARGIN_L + j as f64 * cw;
            let (class, fill) = match cell {
                Some(v) => ("cell", scale.color(*v)),
                None => ("cell infeasible", scale.infeasible),
            };
            let _ = writeln!(
                s,
                r#"<rect class="{class}" x="{x:.3}" y="{y:.3}" width="{cw:.3}" height="{ch:.3}" fill="{}"/>"#,
                fill.hex()
            );
        }
    }
    let _ = writeln!(s, "</g>");

    // Axes
    let x0 = MARGIN_L;
    let y0 = MARGIN_T + PLOT_H;
    let _ = writeln!(s, r#"<g id="axes" stroke="black" fill="none">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{:.3}" y2="{y0:.3}"/>"#,
        x0 + PLOT_W
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x0:.3}" y2="{MARGIN_T:.3}"/>"#
    );
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g id="ticks" fill="black">"#);
    let (r_lo, r_hi) = (g.r_axis[0], g.r_axis[nr - 1]);
    let (x_lo, x_hi) = (g.x_axis[0], g.x_axis[nx - 1]);
    for k in 0..TICKS {
        let f = k as f64 / (TICKS - 1) as f64;
        let px = x0 + (0.5 + f * (nr - 1) as f64) * cw;
        let _ = writeln!(
            s,
            r#"<text x="{px:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            y0 + 18.0,
            format_sig(r_lo + f * (r_hi - r_lo), 4)
        );
        let py = y0 - (0.5 + f * (nx - 1) as f64) * ch;
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            py + 4.0,
            format_sig(x_lo + f * (x_hi - x_lo), 4)
        );
    }
    let _ = writeln!(
        s,
        r#"<text id="r-label" x="{:.3}" y="{:.3}" text-anchor="middle">expansion ratio r</text>"#,
        x0 + PLOT_W / 2.0,
        y0 + 45.0
    );
    let _ = writeln!(
        s,
        r#"<text id="x-label" x="20" y="{:.3}" text-anchor="middle" transform="rotate(-90 20 {:.3})">temperature ratio x</text>"#,
        MARGIN_T + PLOT_H / 2.0,
        MARGIN_T + PLOT_H / 2.0
    );
    let _ = writeln!(s, "</g>");

    // Color bar
    let bx = x0 + PLOT_W + 30.0;
    let _ = writeln!(s, r#"<g id="colorbar">"#);
    let _ = writeln!(
        s,
        "<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
    );
    let _ = writeln!(s, r#"<stop offset="0" stop-color="{}"/>"#, scale.low.hex());
    let _ = writeln!(s, r#"<stop offset="1" stop-color="{}"/>"#, scale.high.hex());
    let _ = writeln!(s, "</linearGradient></defs>");
    let _ = writeln!(
        s,
        r#"<rect class="colorbar" x="{bx:.3}" y="{MARGIN_T:.3}" width="{BAR_W:.3}" height="{PLOT_H:.3}" fill="url(#scale)" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}">{}</text>"#,
        bx + BAR_W + 5.0,
        y0,
        format_sig(scale.min, 4)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}">{}</text>"#,
        bx + BAR_W + 5.0,
        MARGIN_T + 10.0,
        format_sig(scale.max, 4)
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

pub fn render_heatmap_svg(g: &RatioGrid, path: &Path, scale: &ColorScale) -> Result<()> {
    let svg = render_heatmap_svg_string(g, scale)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small(nx: usize, nr: usize) -> GridSpec {
        GridSpec {
            nx,
            nr,
            ..GridSpec::default()
        }
    }

    #[test]
    fn reference_cells() {
        // η_CL = 0.05/1.5, η_O = 1 − 1.2^−0.4 = 0.0703328152251437
        let cell = ratio_cell(1.5, 1.2, 1.4, 2.5).unwrap().unwrap();
        assert_relative_eq!(cell, 0.473937140531477, max_relative = 1e-12);

        assert_eq!(ratio_cell(1.5, 1.5, 1.4, 2.5).unwrap(), None);
        assert_eq!(ratio_cell(1.5, 1.7, 1.4, 2.5).unwrap(), None);

        let near = ratio_cell(1.5, 1.001, 1.4, 2.5).unwrap().unwrap();
        assert_relative_eq!(near, 0.996506216498611, max_relative = 1e-9);
    }

    #[test]
    fn sweep_rejects_bad_specs() {
        let bad_gas = GridSpec {
            gamma: 1.67,
            ..GridSpec::default()
        };
        assert!(matches!(
            sweep_ratio_grid(&bad_gas),
            Err(Error::Consistency { .. })
        ));
        assert!(sweep_ratio_grid(&small(1, 10)).is_err());
        let inverted = GridSpec {
            x_min: 2.0,
            x_max: 1.5,
            ..small(5, 5)
        };
        assert!(sweep_ratio_grid(&inverted).is_err());
    }

    #[test]
    fn axes_include_endpoints() {
        let g = sweep_ratio_grid(&small(7, 9)).unwrap();
        assert_eq!(g.x_axis.first(), Some(&1.05));
        assert_eq!(g.x_axis.last(), Some(&2.0));
        assert_eq!(g.r_axis.first(), Some(&1.01));
        assert_eq!(g.r_axis.last(), Some(&2.0));
    }

    #[test]
    fn serial_and_parallel_agree() {
        let spec = small(40, 30);
        let a = sweep_ratio_grid_with(&spec, Evaluation::Serial).unwrap();
        let b = sweep_ratio_grid_with(&spec, Evaluation::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_layout() {
        let spec = GridSpec {
            x_min: 1.2,
            x_max: 1.5,
            r_min: 1.1,
            r_max: 1.4,
            ..small(2, 2)
        };
        let g = sweep_ratio_grid(&spec).unwrap();
        let csv = grid_csv(&g);
        let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.len() == 3));
        assert_eq!(rows[0], vec!["x\\r", "1.1", "1.4"]);
        assert_eq!(rows[1][0], "1.2");
        assert_eq!(rows[1][2], "NA");
        assert_ne!(rows[2][2], "NA");
        assert_eq!(csv, grid_csv(&sweep_ratio_grid(&spec).unwrap()));
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.473937140531477, 9), "0.473937141");
        assert_eq!(format_sig(1.05, 9), "1.05");
        assert_eq!(format_sig(2.0, 9), "2");
        assert_eq!(format_sig(1.234e-7, 9), "1.234e-7");
        assert_eq!(format_sig(123456789012.0, 9), "1.23456789e11");
        assert_eq!(format_sig(-0.5, 3), "-0.5");
    }

    #[test]
    fn svg_has_one_rect_per_cell() {
        let g = sweep_ratio_grid(&small(10, 10)).unwrap();
        let svg = render_heatmap_svg_string(&g, &ColorScale::default()).unwrap();
        assert_eq!(svg.matches("<rect class=\"cell").count(), 100);
        assert!(svg.contains("expansion ratio r"));
        assert!(svg.contains("temperature ratio x"));
        assert_eq!(
            svg,
            render_heatmap_svg_string(&g, &ColorScale::default()).unwrap()
        );
    }

    #[test]
    fn svg_mask_follows_bound() {
        let g = sweep_ratio_grid(&small(10, 10)).unwrap();
        let svg = render_heatmap_svg_string(&g, &ColorScale::default()).unwrap();
        let classes: Vec<bool> = svg
            .lines()
            .filter(|l| l.starts_with("<rect class=\"cell"))
            .map(|l| l.contains("infeasible"))
            .collect();
        for (i, x) in g.x_axis.iter().enumerate() {
            for (j, r) in g.r_axis.iter().enumerate() {
                assert_eq!(classes[i * 10 + j], *r >= *x, "cell ({i}, {j})");
            }
        }
    }

    #[test]
    fn color_endpoints() {
        let scale = ColorScale::default();
        assert_eq!(scale.color(scale.min), scale.low);
        assert_eq!(scale.color(scale.max), scale.high);
        assert_eq!(scale.color(-3.0), scale.low);
        assert_eq!(Rgb::parse_hex("#fde725"), Some(scale.high));
        assert_eq!(scale.high.hex(), "#fde725");
    }

    #[test]
    fn empty_region_is_an_error() {
        let g = RatioGrid {
            x_axis: vec![1.1, 1.2],
            r_axis: vec![1.5, 1.6],
            cells: vec![vec![None, None], vec![None, None]],
            gamma: 1.4,
            c_v: 2.5,
        };
        assert!(matches!(
            render_heatmap_svg_string(&g, &ColorScale::default()),
            Err(Error::EmptyRegion)
        ));
    }
}
