//! Parallel sweep of the coherence budget over the sphere radius.
//!
//! In the gas-rate-limited regime the maximum coherence length falls as
//! R^(-7/2): the collision rate grows as R² while the coherence speed
//! falls as R^(-3/2). Demonstrates driving the budget engine directly from
//! library code with rayon.

use qmi::decoherence::{Environment, AIR_MASS_AMU};
use qmi::feasibility::{budget, BudgetInputs};
use qmi::quantities::si::AMU_KG;
use qmi::quantities::Sphere;
use rayon::prelude::*;
use std::f64::consts::PI;

fn main() -> qmi::Result<()> {
    let env = Environment::new(0.1, 1e-16 * 100.0, AIR_MASS_AMU * AMU_KG, 1.0, 1.0, 1e-36)?;
    let radii: Vec<f64> = (0..9).map(|k| 0.25e-6 * 2f64.powf(k as f64 / 2.0)).collect();

    let rows: qmi::Result<Vec<(f64, f64, f64)>> = radii
        .par_iter()
        .map(|&r| {
            let sphere = Sphere::new(r, 8570.0)?;
            let b = budget(&BudgetInputs {
                sphere: &sphere,
                omega0: 2.0 * PI * 1e5,
                env: &env,
                omega_i: 2.0 * PI * 50.0,
                slit_separation: Some(1e-6),
                include_gravity: false,
                gain: None,
            })?;
            Ok((r, b.t_star, b.xi_star))
        })
        .collect();
    let rows = rows?;

    println!("{:>12} {:>14} {:>14} {:>16}", "R [um]", "t* [s]", "xi* [m]", "xi*·R^3.5 [a.u.]");
    for (r, t_star, xi_star) in &rows {
        println!(
            "{:>12.4} {:>14.5e} {:>14.5e} {:>16.5e}",
            r * 1e6,
            t_star,
            xi_star,
            xi_star * (r * 1e6).powf(3.5)
        );
    }
    println!("\n(the last column is flat where gas collisions dominate)");
    Ok(())
}
