//! Coherence-length diagnostics against the discretized-Wigner oracle:
//! integrate the Gaussian Wigner function over momentum on a grid, read the
//! position-space off-diagonal, and fit its Gaussian decay.

mod common;

use common::spectral::wigner_grid_coherence_length;
use common::{rel, TestRng};
use qmi::quantities::sphere_mass_kg;
use qmi::state::GaussianState;
use std::f64::consts::PI;

#[test]
fn coherence_length_matches_wigner_grid_fit() {
    let mut rng = TestRng::new(0xc0_ffee);
    let mass = sphere_mass_kg(1e-6, 8570.0).unwrap();
    let omega0 = 2.0 * PI * 1e5;
    let ground = GaussianState::ground(mass, omega0).unwrap();
    for case in 0..25 {
        // Random valid states: scaled spreads, correlated within Heisenberg.
        let kx = rng.log_range(1.0, 1e4);
        let kp = rng.log_range(1.0, 1e4);
        let v_x = ground.v_x() * kx;
        let v_p = ground.v_p() * kp;
        let c_max = (v_x * v_p - 0.26 * qmi::quantities::si::HBAR.powi(2)).max(0.0).sqrt();
        let c = c_max * rng.range(-0.9, 0.9);
        let state = GaussianState::new(mass, v_x, v_p, c).unwrap();
        let xi = state.diagnostics().unwrap().coherence_length;
        let oracle = wigner_grid_coherence_length(v_x, v_p, c);
        assert!(rel(xi, oracle) < 1e-6, "case {case}: xi {xi:e} vs oracle {oracle:e}");
    }
}

#[test]
fn off_diagonal_prefactor_matches_position_density() {
    // ⟨x/2|ρ̂|−x/2⟩ at x = 0 equals 1/√(2π v_x): cross-check the fitted
    // normalization of the oracle against the closed form.
    let mass = sphere_mass_kg(1e-6, 8570.0).unwrap();
    let omega0 = 2.0 * PI * 1e5;
    let s = GaussianState::ground(mass, omega0).unwrap();
    let det = s.uncertainty_product();
    // ρ(0,0) = ∫W(0,p)dp with the full Wigner normalization
    // 1/(2π√det)·exp(−x²v_p/2det − ...): at x = 0 the p-integral gives
    // 1/√(2π v_x).
    let p_sigma = (det / s.v_x()).sqrt();
    let n = 20001;
    let p_half = 12.0 * p_sigma;
    let dp = 2.0 * p_half / (n - 1) as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let p = -p_half + dp * i as f64;
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += w * (-p * p * s.v_x() / (2.0 * det)).exp();
    }
    let rho00 = acc * dp / (2.0 * PI * det.sqrt());
    assert!(rel(rho00, 1.0 / (2.0 * PI * s.v_x()).sqrt()) < 1e-9, "rho00 = {rho00:e}");
}
