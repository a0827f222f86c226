//! Deterministic artifact emission: CSV tables and flat key-value reports.
//!
//! Every float is written in 17-significant-digit scientific notation, which
//! round-trips bit-exactly through f64 parsing; identical inputs therefore
//! produce byte-identical files.

use crate::error::Result;
use crate::feasibility::{Budget, FalsificationWindow};
use crate::interferometry::FringePattern;
use crate::protocol::{ProtocolTrace, StageState};
use std::fmt::Write as _;
use std::path::Path;

/// 17-significant-digit scientific notation (round-trip exact for f64).
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

/// Render rows of (key, value) as `key = value` lines.
pub fn render_kv(pairs: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

/// Render a CSV table.
pub fn render_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Pattern CSV: `x_m,probability_density_per_m`, one row per grid point.
pub fn render_pattern_csv(pattern: &FringePattern) -> String {
    let mut out = String::with_capacity(pattern.len() * 48);
    out.push_str("x_m,probability_density_per_m\n");
    for (i, p) in pattern.density().iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_g(pattern.x_at(i)), fmt_g(*p));
    }
    out
}

/// Pattern metadata sidecar.
pub fn pattern_meta_pairs(pattern: &FringePattern) -> Vec<(String, String)> {
    vec![
        ("fringe_separation_m".into(), fmt_g(pattern.fringe_separation)),
        ("blur_scale_m".into(), fmt_g(pattern.blur_scale)),
        (
            "visibility".into(),
            pattern.visibility.map(fmt_g).unwrap_or_else(|| "undefined".into()),
        ),
        ("evolution_kind".into(), pattern.evolution.label().to_string()),
        ("grid_points".into(), pattern.len().to_string()),
        ("grid_spacing_m".into(), fmt_g(pattern.dx())),
        ("integral".into(), fmt_g(pattern.integral())),
    ]
}

/// Budget report keys, in emission order. Field names match the budget
/// struct with SI units suffixed.
pub fn budget_pairs(b: &Budget) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    for entry in &b.t_lambda_per_source {
        pairs.push((format!("t_lambda_{}_s", entry.kind.label()), fmt_g(entry.t_lambda)));
        pairs.push((format!("lambda_{}_Hz_per_m2", entry.kind.label()), fmt_g(entry.lambda_loc)));
    }
    pairs.push(("gamma_total_Hz".into(), fmt_g(b.gamma_total)));
    pairs.push(("lambda_total_Hz_per_m2".into(), fmt_g(b.lambda_total)));
    pairs.push(("t_star_s".into(), fmt_g(b.t_star)));
    pairs.push(("xi_star_m".into(), fmt_g(b.xi_star)));
    if let (Some(t), Some(xi)) = (b.t_star_inflated, b.xi_star_inflated) {
        pairs.push(("t_star_inflated_s".into(), fmt_g(t)));
        pairs.push(("xi_star_inflated_m".into(), fmt_g(xi)));
    }
    pairs.push(("g_star".into(), fmt_g(b.g_star)));
    pairs.push(("g_p_star".into(), fmt_g(b.g_p_star)));
    pairs.push(("s_xx_max_inflation_m2_per_Hz".into(), fmt_g(b.s_xx_max_inflation)));
    pairs.push(("s_xx_max_fringes_m2_per_Hz".into(), fmt_g(b.s_xx_max_fringes)));
    pairs
}

pub fn window_pairs(w: &FalsificationWindow) -> Vec<(String, String)> {
    vec![
        ("xi_with_gravity_m".into(), fmt_g(w.xi_with_gravity)),
        ("xi_without_gravity_m".into(), fmt_g(w.xi_without_gravity)),
        ("d_low_m".into(), fmt_g(w.d_low)),
        ("d_high_m".into(), fmt_g(w.d_high)),
        ("window_ratio".into(), fmt_g(w.d_high / w.d_low)),
        ("margin".into(), fmt_g(w.margin)),
        ("conclusive".into(), w.conclusive.to_string()),
    ]
}

/// Per-step trace CSV.
pub fn render_trace_csv(trace: &ProtocolTrace) -> String {
    let header: Vec<String> = [
        "step",
        "name",
        "t_start_s",
        "t_end_s",
        "gamma_eff_Hz",
        "lambda_eff_Hz_per_m2",
        "sw_suppression",
        "v_x_m2",
        "v_p_kg2m2s2",
        "c_kgm2s",
        "purity",
        "xi_m",
        "sigma_blur_m",
        "note",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut rows = Vec::with_capacity(trace.steps.len());
    for step in &trace.steps {
        let (v_x, v_p, c, purity, xi, blur) = match &step.stage {
            StageState::Gaussian { v_x, v_p, c, purity, xi } => {
                (fmt_g(*v_x), fmt_g(*v_p), fmt_g(*c), fmt_g(*purity), fmt_g(*xi), String::new())
            }
            StageState::Cat { sigma_blur_to_date } => (
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                fmt_g(*sigma_blur_to_date),
            ),
        };
        rows.push(vec![
            step.index.to_string(),
            step.name.to_string(),
            fmt_g(step.t_start),
            fmt_g(step.t_end),
            fmt_g(step.pld.gamma_eff),
            fmt_g(step.pld.lambda_eff),
            fmt_g(step.sw_suppression),
            v_x,
            v_p,
            c,
            purity,
            xi,
            blur,
            step.note.clone().unwrap_or_default(),
        ]);
    }
    render_csv(&header, &rows)
}

/// Run summary with verdicts.
pub fn trace_summary_pairs(trace: &ProtocolTrace) -> Vec<(String, String)> {
    vec![
        ("xi_at_slit_m".into(), fmt_g(trace.xi_at_slit)),
        ("slit_feasible".into(), trace.slit_feasible.to_string()),
        ("slit_margin".into(), fmt_g(trace.slit_margin)),
        ("t_mapping_s".into(), fmt_g(trace.t_mapping)),
        ("mapping_capped".into(), trace.mapping_capped.to_string()),
        ("sigma_blur_m".into(), fmt_g(trace.sigma_blur)),
        ("fringe_separation_m".into(), fmt_g(trace.pattern.fringe_separation)),
        (
            "visibility".into(),
            trace.pattern.visibility.map(fmt_g).unwrap_or_else(|| "undefined".into()),
        ),
        ("sw_fringe_suppression".into(), fmt_g(trace.sw_fringe_suppression)),
        ("effective_visibility".into(), fmt_g(trace.effective_visibility)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [1.0, -2.5e-16, 3.141592653589793, 1e300, 5e-324] {
            let s = fmt_g(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_g(f64::INFINITY), "inf");
        assert_eq!(fmt_g(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_g(f64::NAN), "nan");
    }

    #[test]
    fn kv_and_csv_rendering() {
        let kv = render_kv(&[("a".into(), "1".into()), ("b".into(), "x".into())]);
        assert_eq!(kv, "a = 1\nb = x\n");
        let csv = render_csv(&["h1".into(), "h2".into()], &[vec!["1".into(), "2".into()]]);
        assert_eq!(csv, "h1,h2\n1,2\n");
    }
}
