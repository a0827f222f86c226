//! Batch front-end: argument parsing, subcommand dispatch, parallel sweeps,
//! CSV/report emission.
//!
//! ```text
//! simulate <subcommand> --config <path> --out <dir>
//!          [--margin <float>] [--cap-omega-t <float>] [--workers <n>]
//! ```
//!
//! Subcommands: `coherence`, `ci-gain`, `fringes`, `protocol`, `budget`,
//! `falsify`, `sweep`. The `QMI_OUT` environment variable, when set,
//! overrides the output directory. Exit codes: 2 parse, 3 domain, 4
//! resolution/cap. Identical inputs produce byte-identical artifacts.

use crate::config::{
    environment_from, gain_from, inflator_omega_from, plan_from, slit_from, sphere_from,
    sweep_axes_from, trap_omega_from, Config, SweepAxis,
};
use crate::decoherence::SourceKind;
use crate::dynamics::{
    ci_gain, max_coherent_gain, momentum_mapping_map, post_inflation_state, PhaseSpaceMap,
    DEFAULT_OMEGA_T_CAP,
};
use crate::error::{Error, Result};
use crate::feasibility::{
    budget, falsification_window, t_lambda, Budget, BudgetInputs, CoherenceCurve, DEFAULT_WINDOW_MARGIN,
};
use crate::interferometry::{
    blurred_pattern, ci_blur_scale, free_blur_scale, unblurred_pattern, with_measured_visibility,
    CatState, EvolutionKind, GridSpec,
};
use crate::protocol::{coherence_timeline, run_protocol};
use crate::report::{
    budget_pairs, fmt_g, pattern_meta_pairs, render_csv, render_kv, render_pattern_csv,
    render_trace_csv, trace_summary_pairs, window_pairs,
};
use crate::state::GaussianState;
use rayon::prelude::*;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Coherence,
    CiGain,
    Fringes,
    Protocol,
    Budget,
    Falsify,
    Sweep,
}

impl Subcommand {
    fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "coherence" => Subcommand::Coherence,
            "ci-gain" => Subcommand::CiGain,
            "fringes" => Subcommand::Fringes,
            "protocol" => Subcommand::Protocol,
            "budget" => Subcommand::Budget,
            "falsify" => Subcommand::Falsify,
            "sweep" => Subcommand::Sweep,
            other => {
                return Err(Error::Parse(format!(
                    "unknown subcommand '{other}' (expected coherence|ci-gain|fringes|protocol|budget|falsify|sweep)"
                )))
            }
        })
    }
}

/// Parsed invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub margin: Option<f64>,
    pub cap_omega_t: Option<f64>,
    pub workers: Option<usize>,
}

/// Parse CLI arguments (without the program name).
pub fn parse_args(args: &[String]) -> Result<RunConfig> {
    let mut it = args.iter();
    let sub = it
        .next()
        .ok_or_else(|| Error::Parse("missing subcommand".into()))
        .and_then(|s| Subcommand::parse(s))?;
    let mut config_path = None;
    let mut out_dir = None;
    let mut margin = None;
    let mut cap = None;
    let mut workers = None;
    while let Some(flag) = it.next() {
        let mut value = |name: &str| -> Result<&String> {
            it.next().ok_or_else(|| Error::Parse(format!("flag {name} needs a value")))
        };
        match flag.as_str() {
            "--config" => config_path = Some(PathBuf::from(value("--config")?)),
            "--out" => out_dir = Some(PathBuf::from(value("--out")?)),
            "--margin" => {
                margin = Some(value("--margin")?.parse::<f64>().map_err(|_| {
                    Error::Parse("--margin needs a number".into())
                })?)
            }
            "--cap-omega-t" => {
                cap = Some(value("--cap-omega-t")?.parse::<f64>().map_err(|_| {
                    Error::Parse("--cap-omega-t needs a number".into())
                })?)
            }
            "--workers" => {
                workers = Some(value("--workers")?.parse::<usize>().map_err(|_| {
                    Error::Parse("--workers needs an unsigned integer".into())
                })?)
            }
            other => return Err(Error::Parse(format!("unknown flag '{other}'"))),
        }
    }
    let config_path = config_path.ok_or_else(|| Error::Parse("--config is required".into()))?;
    // Environment override wins over the flag.
    let out_dir = match std::env::var_os("QMI_OUT") {
        Some(dir) => PathBuf::from(dir),
        None => out_dir.ok_or_else(|| Error::Parse("--out is required (or set QMI_OUT)".into()))?,
    };
    Ok(RunConfig { subcommand: sub, config_path, out_dir, margin, cap_omega_t: cap, workers: workers })
}

fn write_artifact(out_dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = out_dir.join(name);
    crate::report::write_text(&path, content)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn budget_inputs_from<'a>(
    cfg: &Config,
    sphere: &'a crate::quantities::Sphere,
    env: &'a crate::decoherence::Environment,
    include_gravity: bool,
) -> Result<BudgetInputs<'a>> {
    let slit_separation = if cfg.has_section("slit") { Some(slit_from(cfg)?.separation) } else { None };
    Ok(BudgetInputs {
        sphere,
        omega0: trap_omega_from(cfg)?,
        env,
        omega_i: inflator_omega_from(cfg)?,
        slit_separation,
        include_gravity,
        gain: gain_from(cfg)?,
    })
}

/// Fixed-schema budget row (sweep-stable): every standard source gets a
/// column, `inf` where it does not limit coherence.
fn budget_row(b: &Budget, with_gain_columns: bool) -> (Vec<String>, Vec<String>) {
    let kinds = [
        SourceKind::AirScattering,
        SourceKind::BlackbodyScattering,
        SourceKind::BlackbodyEmitAbsorb,
        SourceKind::Gravity,
    ];
    let mut header = Vec::new();
    let mut row = Vec::new();
    for kind in kinds {
        header.push(format!("t_lambda_{}_s", kind.label()));
        let t = b
            .t_lambda_per_source
            .iter()
            .find(|s| s.kind == kind)
            .map(|s| s.t_lambda)
            .unwrap_or(f64::INFINITY);
        row.push(fmt_g(t));
    }
    for (name, value) in [
        ("gamma_total_Hz", b.gamma_total),
        ("lambda_total_Hz_per_m2", b.lambda_total),
        ("t_star_s", b.t_star),
        ("xi_star_m", b.xi_star),
    ] {
        header.push(name.to_string());
        row.push(fmt_g(value));
    }
    if with_gain_columns {
        header.push("t_star_inflated_s".to_string());
        row.push(fmt_g(b.t_star_inflated.unwrap_or(f64::INFINITY)));
        header.push("xi_star_inflated_m".to_string());
        row.push(fmt_g(b.xi_star_inflated.unwrap_or(f64::INFINITY)));
    }
    for (name, value) in [
        ("g_star", b.g_star),
        ("g_p_star", b.g_p_star),
        ("s_xx_max_inflation_m2_per_Hz", b.s_xx_max_inflation),
        ("s_xx_max_fringes_m2_per_Hz", b.s_xx_max_fringes),
    ] {
        header.push(name.to_string());
        row.push(fmt_g(value));
    }
    (header, row)
}

fn run_budget(cfg: &Config, run: &RunConfig) -> Result<()> {
    let sphere = sphere_from(cfg)?;
    let env = environment_from(cfg)?;
    let include_gravity = cfg.bool_or("protocol", "include_gravity", false)?;
    let inputs = budget_inputs_from(cfg, &sphere, &env, include_gravity)?;
    let b = budget(&inputs)?;
    write_artifact(&run.out_dir, "budget.txt", &render_kv(&budget_pairs(&b)))?;
    let (header, row) = budget_row(&b, inputs.gain.is_some());
    write_artifact(&run.out_dir, "budget.csv", &render_csv(&header, &[row]))?;
    Ok(())
}

fn run_falsify(cfg: &Config, run: &RunConfig) -> Result<()> {
    let sphere = sphere_from(cfg)?;
    let env = environment_from(cfg)?;
    let inputs = budget_inputs_from(cfg, &sphere, &env, false)?;
    let margin = match run.margin {
        Some(m) => m,
        None => cfg.f64_or("falsify", "margin", DEFAULT_WINDOW_MARGIN)?,
    };
    let w = falsification_window(&inputs, margin)?;
    write_artifact(&run.out_dir, "falsify.txt", &render_kv(&window_pairs(&w)))?;
    Ok(())
}

fn run_protocol_cmd(cfg: &Config, run: &RunConfig) -> Result<()> {
    let plan = plan_from(cfg, run.cap_omega_t)?;
    let trace = run_protocol(&plan)?;
    write_artifact(&run.out_dir, "trace.csv", &render_trace_csv(&trace))?;
    write_artifact(&run.out_dir, "summary.txt", &render_kv(&trace_summary_pairs(&trace)))?;
    write_artifact(&run.out_dir, "pattern.csv", &render_pattern_csv(&trace.pattern))?;
    write_artifact(&run.out_dir, "pattern_meta.txt", &render_kv(&pattern_meta_pairs(&trace.pattern)))?;

    let samples = cfg.usize_or("protocol", "timeline_samples", 201)?;
    let points = coherence_timeline(&plan, samples)?;
    let header: Vec<String> =
        ["t_s", "xi_m", "xi_coherent_m", "purity"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| vec![fmt_g(p.t), fmt_g(p.xi), fmt_g(p.xi_coherent), fmt_g(p.purity)])
        .collect();
    write_artifact(&run.out_dir, "timeline.csv", &render_csv(&header, &rows))?;
    Ok(())
}

fn run_coherence(cfg: &Config, run: &RunConfig) -> Result<()> {
    let sphere = sphere_from(cfg)?;
    let omega0 = trap_omega_from(cfg)?;
    let lambda_tildes = cfg.f64_list("coherence", "lambda_tilde")?;
    let samples = cfg.usize_or("coherence", "samples", 600)?;
    let t_max_factor = cfg.f64_or("coherence", "t_max_factor", 3.0)?;
    if samples < 2 {
        return Err(Error::Parse("coherence needs samples >= 2".into()));
    }
    let ci = match (cfg.opt_f64("coherence", "ci_g_x")?, cfg.opt_f64("coherence", "ci_g_p")?) {
        (Some(gx), Some(gp)) => Some(crate::dynamics::CiGain { g: gx * gp, g_x: gx, g_p: gp }),
        (None, None) => None,
        _ => return Err(Error::Parse("ci_g_x and ci_g_p must be given together".into())),
    };

    let m = sphere.mass_kg();
    let ground = GaussianState::ground(m, omega0)?;
    let x0 = ground.v_x().sqrt();
    let mut curves: Vec<(String, CoherenceCurve)> = Vec::new();
    let mut peaks: Vec<(String, String)> = Vec::new();
    let mut wt_max: f64 = 10.0;
    for (i, lt) in lambda_tildes.iter().enumerate() {
        if !(*lt > 0.0) {
            return Err(Error::Domain(format!("lambda_tilde must be positive, got {lt:e}")));
        }
        let lambda = lt * omega0 / (x0 * x0);
        let tl = t_lambda(m, omega0, lambda)?;
        wt_max = wt_max.max(t_max_factor * omega0 * tl);
        curves.push((format!("xi_over_x0_lt{i}"), CoherenceCurve::new(ground, lambda)?));
        peaks.push((format!("lambda_tilde_{i}"), fmt_g(*lt)));
        peaks.push((format!("t_lambda_omega0_{i}"), fmt_g(omega0 * tl)));
        if let Some(gain) = &ci {
            let inflated = post_inflation_state(m, omega0, gain)?;
            curves.push((format!("ci_xi_over_x0_lt{i}"), CoherenceCurve::new(inflated, lambda)?));
        }
    }

    // Log-spaced reduced-time grid, shared across curves.
    let wt_min: f64 = 0.1;
    let mut header = vec!["t_omega0".to_string()];
    header.extend(curves.iter().map(|(name, _)| name.clone()));
    let mut rows = Vec::with_capacity(samples);
    for k in 0..samples {
        let f = k as f64 / (samples - 1) as f64;
        let wt = (wt_min.ln() + f * (wt_max.ln() - wt_min.ln())).exp();
        let t = wt / omega0;
        let mut row = vec![fmt_g(wt)];
        for (_, curve) in &curves {
            row.push(fmt_g(curve.xi_at(t)? / x0));
        }
        rows.push(row);
    }
    write_artifact(&run.out_dir, "coherence.csv", &render_csv(&header, &rows))?;
    write_artifact(&run.out_dir, "coherence_peaks.txt", &render_kv(&peaks))?;
    Ok(())
}

fn run_ci_gain(cfg: &Config, run: &RunConfig) -> Result<()> {
    let omega0 = trap_omega_from(cfg)?;
    let omega_i = inflator_omega_from(cfg)?;
    let from = cfg.require_f64("ci_gain", "t_i_from_s")?;
    let to = cfg.require_f64("ci_gain", "t_i_to_s")?;
    let count = cfg.usize_or("ci_gain", "t_i_count", 100)?;
    if count < 1 {
        return Err(Error::Parse("ci_gain needs t_i_count >= 1".into()));
    }
    let header: Vec<String> = ["t_i_s", "g", "g_x", "g_p"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let t_i = if count == 1 {
            from
        } else {
            from + (to - from) * k as f64 / (count - 1) as f64
        };
        let gain = ci_gain(omega0, omega_i, t_i)?;
        rows.push(vec![fmt_g(t_i), fmt_g(gain.g), fmt_g(gain.g_x), fmt_g(gain.g_p)]);
    }
    write_artifact(&run.out_dir, "ci_gain.csv", &render_csv(&header, &rows))?;

    // Coherence bound from the vibration channel when an environment and
    // sphere are configured.
    if cfg.has_section("environment") && cfg.has_section("sphere") {
        let sphere = sphere_from(cfg)?;
        let env = environment_from(cfg)?;
        if env.vibration_psd_m2_per_hz() > 0.0 {
            let vib = crate::decoherence::vibration_source(
                sphere.mass_kg(),
                omega_i,
                env.vibration_psd_m2_per_hz(),
            )?;
            let bound = max_coherent_gain(sphere.mass_kg(), omega0, omega_i, vib.lambda_loc())?;
            let pairs = vec![
                ("g_star".to_string(), fmt_g(bound.g_star)),
                ("g_p_star".to_string(), fmt_g((omega_i * bound.g_star / omega0).sqrt())),
                ("t_i_at_bound_s".to_string(), fmt_g(bound.t_i_at_bound)),
            ];
            write_artifact(&run.out_dir, "ci_gain_bound.txt", &render_kv(&pairs))?;
        }
    }
    Ok(())
}

fn run_fringes(cfg: &Config, run: &RunConfig) -> Result<()> {
    let sphere = sphere_from(cfg)?;
    let slit = slit_from(cfg)?;
    let m = sphere.mass_kg();
    let cat = CatState::new(slit.separation, slit.width, m)?;
    let lambda = cfg.f64_or("fringes", "lambda_Hz_per_m2", 0.0)?;
    let grid_points =
        cfg.usize_or("fringes", "grid_points", crate::interferometry::DEFAULT_GRID_POINTS)?;
    let cap = run.cap_omega_t.unwrap_or(DEFAULT_OMEGA_T_CAP);
    let evolution = cfg.require("fringes", "evolution")?;
    let (map, blur, kind) = match evolution {
        "free" => {
            let t = cfg.require_f64("fringes", "time_s")?;
            if !(t >= 0.0) {
                return Err(Error::Domain(format!("time must be >= 0, got {t:e}")));
            }
            let map = PhaseSpaceMap { a: 1.0, b: t / m, c: 0.0, d: 1.0 };
            (map, free_blur_scale(m, lambda, t)?, EvolutionKind::FreeExpansion)
        }
        "ci" => {
            let omega_i = inflator_omega_from(cfg)?;
            let wt = cfg.require_f64("fringes", "omega_i_t")?;
            if !(wt >= 0.0) {
                return Err(Error::Domain(format!("omega_i_t must be >= 0, got {wt:e}")));
            }
            let t = wt / omega_i;
            let map = momentum_mapping_map(m, omega_i, t);
            (map, ci_blur_scale(m, lambda, omega_i, t, cap)?, EvolutionKind::CiExpansion)
        }
        other => return Err(Error::Parse(format!("[fringes] evolution '{other}' must be free or ci"))),
    };
    let grid = GridSpec { points: grid_points, half_width: None, blur_hint: blur };
    let ideal = unblurred_pattern(&cat, &map, &grid, kind)?;
    let pattern = with_measured_visibility(blurred_pattern(&ideal, blur)?);
    write_artifact(&run.out_dir, "fringes.csv", &render_pattern_csv(&pattern))?;
    write_artifact(&run.out_dir, "fringes_meta.txt", &render_kv(&pattern_meta_pairs(&pattern)))?;
    Ok(())
}

/// Cap on the total number of sweep grid points.
pub const DEFAULT_SWEEP_CAP: usize = 1_000_000;

fn axis_indices(axes: &[SweepAxis], flat: usize) -> Vec<usize> {
    // Lexicographic: first axis slowest.
    let mut idx = vec![0; axes.len()];
    let mut rem = flat;
    for (k, axis) in axes.iter().enumerate().rev() {
        idx[k] = rem % axis.count;
        rem /= axis.count;
    }
    idx
}

fn run_sweep(cfg: &Config, run: &RunConfig) -> Result<()> {
    let axes = sweep_axes_from(cfg)?;
    let over = cfg.get("sweep", "over").unwrap_or("budget");
    if over != "budget" && over != "falsify" {
        return Err(Error::Parse(format!("[sweep] over '{over}' must be budget or falsify")));
    }
    let cap = cfg.usize_or("sweep", "max_points", DEFAULT_SWEEP_CAP)?;
    let total: usize = axes.iter().map(|a| a.count).product();
    if total > cap {
        return Err(Error::CapExceeded(format!("sweep has {total} points, cap is {cap}")));
    }
    let margin = match run.margin {
        Some(m) => m,
        None => cfg.f64_or("falsify", "margin", DEFAULT_WINDOW_MARGIN)?,
    };

    let evaluate = |flat: usize| -> Result<Vec<String>> {
        let idx = axis_indices(&axes, flat);
        let mut point_cfg = cfg.clone();
        let mut row = Vec::with_capacity(axes.len() + 8);
        for (axis, i) in axes.iter().zip(&idx) {
            let value = axis.value(*i);
            point_cfg.set(&axis.path, &fmt_g(value))?;
            row.push(fmt_g(value));
        }
        let sphere = sphere_from(&point_cfg)?;
        let env = environment_from(&point_cfg)?;
        let include_gravity = point_cfg.bool_or("protocol", "include_gravity", false)?;
        let inputs = budget_inputs_from(&point_cfg, &sphere, &env, include_gravity)?;
        match over {
            "budget" => {
                let b = budget(&inputs)?;
                let (_, cells) = budget_row(&b, inputs.gain.is_some());
                row.extend(cells);
            }
            _ => {
                let w = falsification_window(&inputs, margin)?;
                for (_, v) in window_pairs(&w) {
                    row.push(v);
                }
            }
        }
        Ok(row)
    };

    // Header from the first grid point's schema.
    let mut header: Vec<String> = axes.iter().map(|a| a.path.clone()).collect();
    {
        let mut probe_cfg = cfg.clone();
        for axis in &axes {
            probe_cfg.set(&axis.path, &fmt_g(axis.value(0)))?;
        }
        let sphere = sphere_from(&probe_cfg)?;
        let env = environment_from(&probe_cfg)?;
        let include_gravity = probe_cfg.bool_or("protocol", "include_gravity", false)?;
        let inputs = budget_inputs_from(&probe_cfg, &sphere, &env, include_gravity)?;
        match over {
            "budget" => {
                let b = budget(&inputs)?;
                let (names, _) = budget_row(&b, inputs.gain.is_some());
                header.extend(names);
            }
            _ => {
                let w = falsification_window(&inputs, margin)?;
                header.extend(window_pairs(&w).into_iter().map(|(k, _)| k));
            }
        }
    }

    // Points are independent; evaluation order cannot affect the output
    // because rows are collected by index.
    let rows: Vec<Vec<String>> = match run.workers {
        Some(n) if n >= 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            pool.install(|| (0..total).into_par_iter().map(evaluate).collect::<Result<Vec<_>>>())?
        }
        _ => (0..total).into_par_iter().map(evaluate).collect::<Result<Vec<_>>>()?,
    };
    write_artifact(&run.out_dir, "sweep.csv", &render_csv(&header, &rows))?;
    Ok(())
}

/// Execute a parsed invocation.
pub fn run(run_config: &RunConfig) -> Result<()> {
    let cfg = Config::load(&run_config.config_path)?;
    std::fs::create_dir_all(&run_config.out_dir)?;
    match run_config.subcommand {
        Subcommand::Coherence => run_coherence(&cfg, run_config),
        Subcommand::CiGain => run_ci_gain(&cfg, run_config),
        Subcommand::Fringes => run_fringes(&cfg, run_config),
        Subcommand::Protocol => run_protocol_cmd(&cfg, run_config),
        Subcommand::Budget => run_budget(&cfg, run_config),
        Subcommand::Falsify => run_falsify(&cfg, run_config),
        Subcommand::Sweep => run_sweep(&cfg, run_config),
    }
}

/// Full entry point used by the binary: parse, run, map errors to exit
/// codes with a one-line machine-parsable record on stderr.
pub fn main_with_args(args: &[String]) -> i32 {
    let parsed = match parse_args(args) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error kind={} exit={} msg=\"{e}\"", e.kind(), e.exit_code());
            return e.exit_code();
        }
    };
    match run(&parsed) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error kind={} exit={} msg=\"{e}\"", e.kind(), e.exit_code());
            e.exit_code()
        }
    }
}
