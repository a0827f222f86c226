//! Inflation gain against time in the inverted potential, and the maximum
//! gain the vibration environment allows.
//!
//! The gain g = g_x·g_p grows as sinh(2ω_I t_I); keeping the stage coherent
//! requires the gain to stay well below g⋆ = ω_I²M/(2ħΛ_v), where Λ_v is the
//! localization parameter of the potential-center vibrations.

use qmi::decoherence::vibration_source;
use qmi::dynamics::{ci_gain, max_coherent_gain};
use qmi::quantities::Sphere;
use std::f64::consts::PI;

fn main() -> qmi::Result<()> {
    let sphere = Sphere::new(1e-6, 8570.0)?;
    let omega0 = 2.0 * PI * 1e5;
    let omega_i = 2.0 * PI * 50.0;
    let m = sphere.mass_kg();

    println!("{:>10} {:>14} {:>14} {:>14}", "t_I [s]", "g", "g_x", "g_p");
    for k in 0..=10 {
        let t_i = 2e-3 * k as f64;
        let gain = ci_gain(omega0, omega_i, t_i)?;
        println!("{:>10.4} {:>14.6e} {:>14.6e} {:>14.6e}", t_i, gain.g, gain.g_x, gain.g_p);
    }

    // Coherence bound for a 10^-18 m/sqrt(Hz) vibration floor.
    let s_xx = 1e-36;
    let vib = vibration_source(m, omega_i, s_xx)?;
    let bound = max_coherent_gain(m, omega0, omega_i, vib.lambda_loc())?;
    let g_p_star = (omega_i * bound.g_star / omega0).sqrt();
    println!("\nvibration PSD      = {s_xx:.1e} m^2/Hz");
    println!("Lambda_v           = {:.4e} Hz/m^2", vib.lambda_loc());
    println!("g_star             = {:.4e}", bound.g_star);
    println!("g_p_star           = {:.4e}", g_p_star);
    println!("t_I at bound       = {:.4e} s (inflation must stop well before)", bound.t_i_at_bound);
    Ok(())
}
