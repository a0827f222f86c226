//! Environmental budget for the cryogenic extreme-high-vacuum baseline:
//! which decoherence channel limits the coherence growth, how long the
//! coherent window lasts, and what vibration floor inflation tolerates.

use qmi::decoherence::{Environment, AIR_MASS_AMU};
use qmi::feasibility::{budget, BudgetInputs};
use qmi::quantities::si::AMU_KG;
use qmi::quantities::Sphere;
use qmi::report::{budget_pairs, render_kv};
use std::f64::consts::PI;

fn main() -> qmi::Result<()> {
    let sphere = Sphere::new(1e-6, 8570.0)?;
    let env = Environment::new(
        0.1,                  // K
        1e-16 * 100.0,        // 1e-16 mbar in Pa
        AIR_MASS_AMU * AMU_KG,
        1.0,                  // chi_real
        1.0,                  // chi_imag
        1e-36,                // (1e-18 m/sqrt(Hz))^2
    )?;
    let inputs = BudgetInputs {
        sphere: &sphere,
        omega0: 2.0 * PI * 1e5,
        env: &env,
        omega_i: 2.0 * PI * 50.0,
        slit_separation: Some(1e-6),
        include_gravity: false,
        gain: None,
    };
    let b = budget(&inputs)?;
    print!("{}", render_kv(&budget_pairs(&b)));

    println!();
    println!("interpretation:");
    println!("  coherent window t* = {:.3} s (gas-collision limited at this vacuum)", b.t_star);
    println!("  max coherence length without inflation = {:.1} nm", b.xi_star * 1e9);
    println!("  inflation momentum gain allowed by vibrations: g_p* = {:.3e}", b.g_p_star);
    println!(
        "  fringe-visibility vibration ceiling: sqrt(S_xx) << {:.2e} m/sqrt(Hz)",
        b.s_xx_max_fringes.sqrt()
    );
    Ok(())
}
