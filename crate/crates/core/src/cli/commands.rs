//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{
    AnalyzeArgs, CharacterizeArgs, Cli, CliError, Command, CycleType, DesignArgs, HeatmapArgs,
    RunConfig, SharedArgs, SimulateArgs,
};
use crate::analysis::{
    analyze, characterize, compare_reports, generate_synthetic, improvement_text, load_timeseries,
    report_csv, report_text, write_timeseries, CharacterizationInputs, ColumnMap, ExperimentReport,
    LoadCase, NoiseLevels, SyntheticConfig,
};
use crate::compare::{
    format_sig, grid_csv, render_heatmap_svg_string, sweep_ratio_grid_with, ColorScale, Evaluation,
    GridSpec,
};
use crate::cycles::{
    build_constant_load_cycle, build_otto_cycle, carnot_efficiency, constant_load_high_pressure,
    efficiency_cl_ideal, efficiency_otto_ideal, evaluate, max_expansion_ratio_cl,
    max_expansion_ratio_otto,
};
use crate::error::Error;
use crate::rig::{
    check_positive_work, profile_work, solve_fixed_mass_for_pressure, solve_mass_for_pressure,
    theta_grid, LoadMode, LoadProfile,
};
use crate::thermo::state_from_ptv;

/// Prints a summary unless `--quiet` was given.
macro_rules! say {
    ($quiet:expr, $($arg:tt)*) => {
        if !$quiet {
            print!($($arg)*);
        }
    };
}

pub(super) fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli.shared)?;
    let out = cli
        .shared
        .out
        .clone()
        .unwrap_or_else(|| cfg.output_dir.clone());
    let q = cli.shared.quiet;
    match &cli.command {
        Command::Simulate(a) => simulate(&cfg, &out, q, a),
        Command::Heatmap(a) => heatmap(&cfg, &out, q, cli.shared.threads, a),
        Command::Design(a) => design(&cfg, &out, q, a),
        Command::Analyze(a) => analyze_logs(&cfg, &out, q, cli.shared.seed, a),
        Command::Characterize(a) => characterize_cmd(&cfg, &out, q, a),
    }
}

fn load_config(shared: &SharedArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &shared.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    for assignment in &shared.overrides {
        cfg.apply_override(assignment)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn simulate(cfg: &RunConfig, out: &Path, quiet: bool, a: &SimulateArgs) -> Result<(), CliError> {
    let props = cfg.gas()?;
    let p_start = a.p_start.unwrap_or(cfg.ambient_pressure);
    let start = state_from_ptv(p_start, a.t_min, a.v_start, &props)?;
    let need_t_max = || CliError::Usage("--t-max is required for this cycle".into());
    let (cycle, closed_form) = match a.cycle {
        CycleType::ConstantLoad => {
            let p_high = match (a.p_high, a.t_max) {
                (Some(p), _) => p,
                (None, Some(t)) => constant_load_high_pressure(&start, t, a.ratio)?,
                (None, None) => {
                    return Err(CliError::Usage(
                        "constant-load needs --t-max or --p-high".into(),
                    ))
                }
            };
            let cycle = build_constant_load_cycle(&start, p_high, a.ratio, &props)?;
            let x = cycle.corners()[2].temperature() / start.temperature();
            let eta = efficiency_cl_ideal(x, a.ratio, props.c_v())?;
            (cycle, eta)
        }
        CycleType::Otto => {
            let t_max = a.t_max.ok_or_else(need_t_max)?;
            let cycle = build_otto_cycle(&start, a.ratio, t_max, &props)?;
            (cycle, efficiency_otto_ideal(a.ratio, props.gamma())?)
        }
    };
    let m = evaluate(&cycle)?;

    let mut trace = String::from("step,P_abs_pa,V_m3,T_k\n");
    for (i, step) in cycle.steps().iter().enumerate() {
        for s in step.sample_path(a.points as usize, &props) {
            let _ = writeln!(
                trace,
                "{},{},{},{}",
                i + 1,
                s.pressure(),
                s.volume(),
                s.temperature()
            );
        }
    }

    let x = m.t_max / m.t_min;
    let mut summary = String::new();
    let _ = writeln!(summary, "cycle: {}", cycle.label());
    let _ = writeln!(summary, "expansion ratio r: {}", format_sig(a.ratio, 9));
    let _ = writeln!(summary, "temperature ratio x: {}", format_sig(x, 9));
    for (i, (c, step)) in cycle.corners().iter().zip(cycle.steps()).enumerate() {
        let _ = writeln!(
            summary,
            "state {}: P = {} Pa, V = {} m3, T = {} K; then {} (W = {} J, Q = {} J)",
            i + 1,
            format_sig(c.pressure(), 9),
            format_sig(c.volume(), 9),
            format_sig(c.temperature(), 9),
            step.kind(),
            format_sig(step.work_by_gas(), 9),
            format_sig(step.heat_into_gas(), 9),
        );
    }
    let _ = writeln!(summary, "net work: {} J", format_sig(m.net_work, 9));
    let _ = writeln!(summary, "heat in: {} J", format_sig(m.heat_in, 9));
    let _ = writeln!(summary, "heat out: {} J", format_sig(m.heat_out, 9));
    let _ = writeln!(summary, "efficiency: {}", format_sig(m.efficiency, 9));
    let _ = writeln!(
        summary,
        "efficiency (closed form): {}",
        format_sig(closed_form, 9)
    );
    let _ = writeln!(
        summary,
        "Carnot bound: {}",
        format_sig(carnot_efficiency(m.t_min, m.t_max)?, 9)
    );
    let _ = writeln!(
        summary,
        "max expansion ratio at this x: constant-load {}, Otto {}",
        format_sig(max_expansion_ratio_cl(x)?, 9),
        format_sig(max_expansion_ratio_otto(x, props.gamma())?, 9)
    );

    let stem = format!("simulate_{}", a.cycle.file_stem());
    write_file(out, &format!("{stem}.csv"), &trace)?;
    write_file(out, &format!("{stem}.txt"), &summary)?;
    say!(quiet, "{summary}");
    Ok(())
}

fn heatmap(
    cfg: &RunConfig,
    out: &Path,
    quiet: bool,
    threads: Option<u64>,
    a: &HeatmapArgs,
) -> Result<(), CliError> {
    let spec = GridSpec {
        x_min: a.x_min,
        x_max: a.x_max,
        r_min: a.r_min,
        r_max: a.r_max,
        nx: a.nx as usize,
        nr: a.nr as usize,
        gamma: cfg.gamma,
        c_v: cfg.c_v,
    };
    let grid = match threads {
        None => sweep_ratio_grid_with(&spec, Evaluation::Parallel)?,
        Some(1) => sweep_ratio_grid_with(&spec, Evaluation::Serial)?,
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n as usize)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
            pool.install(|| sweep_ratio_grid_with(&spec, Evaluation::Parallel))?
        }
    };
    let svg = render_heatmap_svg_string(&grid, &ColorScale::default())?;
    let csv_path = write_file(out, "heatmap.csv", &grid_csv(&grid))?;
    let svg_path = write_file(out, "heatmap.svg", &svg)?;

    let (lo, hi) = grid
        .feasible_values()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    say!(
        quiet,
        "{} x {} cells, {} feasible; ratio range [{}, {}]\n",
        spec.nx,
        spec.nr,
        grid.feasible_count(),
        format_sig(lo, 6),
        format_sig(hi, 6)
    );
    say!(
        quiet,
        "wrote {} and {}\n",
        csv_path.display(),
        svg_path.display()
    );
    Ok(())
}

fn design(cfg: &RunConfig, out: &Path, quiet: bool, a: &DesignArgs) -> Result<(), CliError> {
    let theta0 = a.theta0_deg.to_radians();
    let thetas = theta_grid(theta0, a.theta1_deg.to_radians(), a.points as usize);
    let mut text = String::new();
    let (expand, restore, rig) = match a.mode {
        CycleType::ConstantLoad => {
            let rig = cfg.rig(cfg.cl_r_mx2)?;
            let p_expand = a.expand_kpa.unwrap_or(13.0) * 1e3;
            let p_restore = a.restore_kpa.unwrap_or(11.0) * 1e3;
            if !(p_restore < p_expand) {
                return Err(Error::InfeasibleTarget(format!(
                    "restoring target {p_restore} Pa must be below the expansion target {p_expand} Pa for positive work"
                ))
                .into());
            }
            let m2_expand =
                solve_mass_for_pressure(&rig, theta0, p_expand, LoadMode::ConstantLoad, 0.0)?;
            let m2_restore =
                solve_mass_for_pressure(&rig, theta0, p_restore, LoadMode::ConstantLoad, 0.0)?;
            let _ = writeln!(text, "mode: constant-load (hang distance {} m)", rig.r_mx2);
            let _ = writeln!(
                text,
                "expansion mass m2: {} kg for {} Pa",
                format_sig(m2_expand, 6),
                p_expand
            );
            let _ = writeln!(
                text,
                "restoring mass m2: {} kg for {} Pa",
                format_sig(m2_restore, 6),
                p_restore
            );
            let _ = writeln!(
                text,
                "net lifted mass: {} kg",
                format_sig(m2_expand - m2_restore, 6)
            );
            (
                LoadProfile::constant_load(&rig, &thetas, m2_expand)?,
                LoadProfile::constant_load(&rig, &thetas, m2_restore)?,
                rig,
            )
        }
        CycleType::Otto => {
            let rig = cfg.rig(cfg.otto_r_mx2)?;
            if !(rig.r_mx1 > 0.0) {
                return Err(Error::InfeasibleTarget(
                    "Otto design needs a fixed-mass offset rig.r_mx1 > 0".into(),
                )
                .into());
            }
            let m1 = match (a.m1, a.restore_kpa) {
                (Some(m1), _) => m1,
                (None, Some(kpa)) => solve_fixed_mass_for_pressure(&rig, theta0, kpa * 1e3)?,
                (None, None) => cfg.otto_m1,
            };
            let p_peak = a.expand_kpa.unwrap_or(14.0) * 1e3;
            let m2 = solve_mass_for_pressure(&rig, theta0, p_peak, LoadMode::Otto, m1)?;
            let _ = writeln!(
                text,
                "mode: Otto (fixed mass at r_mx1 = {} m, r_my1 = {} m; hang distance {} m)",
                rig.r_mx1, rig.r_my1, rig.r_mx2
            );
            let _ = writeln!(text, "fixed mass m1: {} kg", format_sig(m1, 6));
            let _ = writeln!(
                text,
                "hung mass m2: {} kg for a {} Pa peak",
                format_sig(m2, 6),
                p_peak
            );
            let expand = LoadProfile::otto(&rig, &thetas, m1, m2)?;
            let restore = LoadProfile::otto(&rig, &thetas, m1, 0.0)?;
            let _ = writeln!(text, "both profiles decrease strictly with angle");
            (expand, restore, rig)
        }
    };

    let check = check_positive_work(&expand, &restore)?;
    if !check.positive {
        return Err(Error::InfeasibleTarget(format!(
            "expansion profile does not stay above the restoring profile (margin {} Pa)",
            format_sig(check.margin, 6)
        ))
        .into());
    }
    let work = profile_work(&expand, &restore, &rig)?;
    let _ = writeln!(
        text,
        "positive-work margin: {} Pa",
        format_sig(check.margin, 6)
    );
    let _ = writeln!(text, "quasi-static loop work: {} J", format_sig(work, 6));

    let mut table = String::from("theta_deg,p_expand_gauge_pa,p_restore_gauge_pa\n");
    for (e, r) in expand.samples().iter().zip(restore.samples()) {
        let _ = writeln!(
            table,
            "{},{},{}",
            format_sig(e.0.to_degrees(), 9),
            format_sig(e.1, 9),
            format_sig(r.1, 9)
        );
    }
    let stem = format!("design_{}", a.mode.file_stem());
    write_file(out, &format!("{stem}.csv"), &table)?;
    write_file(out, &format!("{stem}.txt"), &text)?;
    say!(quiet, "{text}{table}");
    Ok(())
}

fn analyze_logs(
    cfg: &RunConfig,
    out: &Path,
    quiet: bool,
    seed: u64,
    a: &AnalyzeArgs,
) -> Result<(), CliError> {
    if !a.synthetic && a.cl_log.is_none() && a.otto_log.is_none() {
        return Err(CliError::Usage(
            "give --cl-log, --otto-log or --synthetic".into(),
        ));
    }
    let columns = ColumnMap {
        current: a.current_column.clone(),
        ..ColumnMap::default()
    };
    let run = |load: LoadCase,
               log: Option<&PathBuf>,
               preset: SyntheticConfig|
     -> Result<Option<ExperimentReport>, CliError> {
        let analysis = cfg.analysis(load);
        let stem = analysis.load.mode().name().replace('-', "_");
        let samples = if a.synthetic {
            let synth = SyntheticConfig {
                load,
                r_mx2: analysis.r_mx2,
                g: cfg.g,
                heater: cfg.heater(),
                seed,
                noise: NoiseLevels {
                    angle_deg: a.noise_angle_deg,
                    ..NoiseLevels::default()
                },
                ..preset
            };
            let log = generate_synthetic(&synth)?;
            ensure_dir(out)?;
            write_timeseries(&out.join(format!("synthetic_{stem}.csv")), &log.samples)?;
            log.samples
        } else if let Some(path) = log {
            load_timeseries(path, &columns)?
        } else {
            return Ok(None);
        };
        let report = analyze(&samples, &analysis)?;
        let text = report_text(&report);
        write_file(out, &format!("analysis_{stem}.csv"), &report_csv(&report))?;
        write_file(out, &format!("analysis_{stem}.txt"), &text)?;
        say!(quiet, "{text}\n");
        Ok(Some(report))
    };
    let cl = run(
        cfg.constant_load_case(),
        a.cl_log.as_ref(),
        SyntheticConfig::constant_load_reference(),
    )?;
    let otto = run(
        cfg.otto_case(),
        a.otto_log.as_ref(),
        SyntheticConfig::otto_reference(),
    )?;
    if let (Some(cl), Some(otto)) = (cl, otto) {
        let text = improvement_text(&compare_reports(&cl, &otto)?);
        write_file(out, "comparison.txt", &text)?;
        say!(quiet, "{text}");
    }
    Ok(())
}

fn characterize_cmd(
    cfg: &RunConfig,
    out: &Path,
    quiet: bool,
    a: &CharacterizeArgs,
) -> Result<(), CliError> {
    let inputs = CharacterizationInputs {
        ambient_pressure: cfg.ambient_pressure,
        p_before_gauge: a.before_kpa * 1e3,
        p_after_gauge: a.after_kpa * 1e3,
        otto_target_gauge: a.otto_target_kpa * 1e3,
        observed_compression_rise: a.observed_rise_kpa * 1e3,
        observed_expansion_span: a.observed_span_kpa * 1e3,
        cl_expand_target_gauge: a.cl_expand_kpa * 1e3,
        cl_restore_target_gauge: a.cl_restore_kpa * 1e3,
        gamma: cfg.gamma,
        ..CharacterizationInputs::default()
    };
    let report = characterize(&inputs)?;
    write_file(out, "characterize.txt", &report.text)?;
    say!(quiet, "{}", report.text);
    Ok(())
}
