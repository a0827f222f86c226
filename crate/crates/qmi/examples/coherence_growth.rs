//! Free-expansion coherence-length curves in reduced units, with and
//! without a preceding inflation stage.
//!
//! For each localization strength Λ̃ = Λx₀²/ω₀ the coherence length grows
//! linearly, peaks at ω₀t_Λ = [3/(4Λ̃)]^(1/3) with ξ_Λ/x₀ = [32/(3Λ̃²)]^(1/6),
//! and then decays as 1/√t. Inflating first (g_x = 500, g_p = 10) multiplies
//! the growth speed by g_p and pulls the peak earlier by g_p^(2/3).
//!
//! Writes `coherence_growth.csv` and prints a peak table.

use qmi::dynamics::{post_inflation_state, CiGain};
use qmi::feasibility::{t_lambda, CoherenceCurve};
use qmi::quantities::Sphere;
use qmi::state::GaussianState;
use std::f64::consts::PI;
use std::fmt::Write as _;

fn main() -> qmi::Result<()> {
    let sphere = Sphere::new(1e-6, 8570.0)?; // 1 μm niobium sphere
    let omega0 = 2.0 * PI * 1e5;
    let m = sphere.mass_kg();
    let ground = GaussianState::ground(m, omega0)?;
    let x0 = ground.v_x().sqrt();

    let gain = CiGain { g: 5000.0, g_x: 500.0, g_p: 10.0 };
    let inflated = post_inflation_state(m, omega0, &gain)?;

    let lambda_tildes = [1e-8, 1e-7, 1e-6, 1e-5];
    let mut curves = Vec::new();
    println!("{:>10} {:>14} {:>14} {:>14} {:>14}", "lambda~", "w0*t_peak", "xi_peak/x0", "formula_t", "formula_xi");
    let mut wt_max: f64 = 10.0;
    for lt in lambda_tildes {
        let lambda = lt * omega0 / (x0 * x0);
        let plain = CoherenceCurve::new(ground, lambda)?;
        let ci = CoherenceCurve::new(inflated, lambda)?;

        let tl = t_lambda(m, omega0, lambda)?;
        let peak = plain.peak(tl)?;
        let formula_t = (3.0 / (4.0 * lt)).cbrt();
        let formula_xi = (32.0 / (3.0 * lt * lt)).powf(1.0 / 6.0);
        println!(
            "{:>10.0e} {:>14.5e} {:>14.5e} {:>14.5e} {:>14.5e}",
            lt,
            omega0 * peak.t,
            peak.xi / x0,
            formula_t,
            formula_xi
        );
        println!("{:>10} {:>14.5e} (inflated peak, = plain/g_p^(2/3))", "+CI",
            omega0 * ci.peak(tl / gain.g_p.powf(2.0 / 3.0))?.t);
        wt_max = wt_max.max(3.0 * omega0 * tl);
        curves.push((lt, plain, ci));
    }

    // Shared log-spaced reduced-time grid.
    let samples = 500;
    let mut csv = String::from("t_omega0");
    for (lt, _, _) in &curves {
        let _ = write!(csv, ",xi_over_x0_lt{lt:.0e},ci_xi_over_x0_lt{lt:.0e}");
    }
    csv.push('\n');
    for k in 0..samples {
        let f = k as f64 / (samples - 1) as f64;
        let wt = (0.1_f64.ln() + f * (wt_max.ln() - 0.1_f64.ln())).exp();
        let _ = write!(csv, "{wt:.9e}");
        for (_, plain, ci) in &curves {
            let t = wt / omega0;
            let _ = write!(csv, ",{:.9e},{:.9e}", plain.xi_at(t)? / x0, ci.xi_at(t)? / x0);
        }
        csv.push('\n');
    }
    std::fs::write("coherence_growth.csv", csv)?;
    println!("\nwrote coherence_growth.csv");
    Ok(())
}
