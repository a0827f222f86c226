//! The analytic interference patterns against independent grid oracles:
//! a spectral propagator for the coherent density, direct quadrature for
//! the blur convolution, and the exact-characteristics master-equation
//! solver for the combined evolution + decoherence.

mod common;

use common::quadrature::blur_at;
use common::spectral::{free_spectral_density, MasterEquationOracle};
use common::{rel, TestRng};
use qmi::dynamics::PhaseSpaceMap;
use qmi::interferometry::{
    blurred_pattern, free_blur_scale, free_pattern, unblurred_pattern, visibility, CatState,
    EvolutionKind, GridSpec, PatternSynthesizer,
};
use qmi::quantities::si::HBAR;

const M_DESK: f64 = 1e-25;

#[test]
fn coherent_pattern_matches_spectral_propagator() {
    // Sample the initial cat on a grid, evolve with the spectral free
    // propagator, compare |ψ|² pointwise against the analytic density.
    for (d, sigma_frac, t) in [
        (1e-6, 0.05, 1e-3),
        (1e-6, 0.10, 1e-3),
        (2e-6, 0.02, 5e-4),
        (5e-7, 0.10, 2e-3),
    ] {
        let cat = CatState::new(d, sigma_frac * d, M_DESK).unwrap();
        let grid = GridSpec { points: 4096, half_width: None, blur_hint: 0.0 };
        let pattern = free_pattern(&cat, t, &grid).unwrap();
        let n = pattern.len();
        // Double the oracle domain at the same spacing so the FFT's periodic
        // images stay out of the compared window, then read the central
        // slice.
        let pad = n / 2;
        let oracle = free_spectral_density(
            &cat,
            t,
            pattern.x_at(0) - pad as f64 * pattern.dx(),
            pattern.dx(),
            2 * n,
        );
        let peak = pattern.peak();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            worst = worst.max((pattern.density()[i] - oracle[pad + i]).abs());
        }
        assert!(
            worst <= 1e-6 * peak,
            "d={d:e} σ/d={sigma_frac} t={t:e}: worst deviation {worst:e} vs peak {peak:e}"
        );
    }
}

#[test]
fn blurred_pattern_matches_direct_quadrature() {
    // The sampled convolution against adaptive quadrature of the continuous
    // kernel integral at 50 positions, at the 1e-8 absolute level (the
    // density is order one for this desk-scale geometry).
    let mass = 2.0 * std::f64::consts::PI * HBAR / 0.6; // x_f ≈ 0.3 m at t = 1
    let cat = CatState::new(2.0, 0.2, mass).unwrap();
    let t = 1.0;
    let pattern = free_pattern(&cat, t, &GridSpec { points: 8192, half_width: None, blur_hint: 0.0 })
        .unwrap();
    let sigma = pattern.fringe_separation / 10.0;
    let blurred = blurred_pattern(&pattern, sigma).unwrap();
    let synth = PatternSynthesizer::new(
        &cat,
        &PhaseSpaceMap { a: 1.0, b: t / mass, c: 0.0, d: 1.0 },
    )
    .unwrap();
    let p0 = |x: f64| synth.density_at(x);
    let mut worst: f64 = 0.0;
    let n = blurred.len();
    for j in 0..50 {
        let i = (n / 4) + j * (n / 2) / 50; // spread over the central half
        let x = blurred.x_at(i);
        let direct = blur_at(p0, sigma, x, 1e-12);
        worst = worst.max((blurred.density()[i] - direct).abs());
    }
    assert!(worst < 1e-8, "worst blur deviation {worst:e} (peak {})", blurred.peak());
}

#[test]
fn blurred_pattern_matches_master_equation_oracle() {
    // Analytic path (pattern + σ_Λ convolution) against the exact grid
    // solution of ρ̇ = [p̂²/2M, ρ̂]/(iħ) − Λ[x̂,[x̂,ρ̂]] for the sampled cat.
    let cases = [
        (1e-6, 1e-7, 1e-3, 1.0e15),
        (1e-6, 1e-7, 1e-3, 5.0e15),
        (1e-6, 5e-8, 1e-3, 2.0e15),
        (2e-6, 2e-7, 5e-4, 8.0e15),
        (1e-6, 1e-7, 2e-3, 2.5e14),
    ];
    for (case, (d, sigma, t, lambda)) in cases.iter().enumerate() {
        let cat = CatState::new(*d, *sigma, M_DESK).unwrap();
        let blur = free_blur_scale(M_DESK, *lambda, *t).unwrap();
        let pattern = free_pattern(&cat, *t, &GridSpec::with_blur_hint(blur)).unwrap();
        let blurred = blurred_pattern(&pattern, blur).unwrap();
        let peak = blurred.peak();
        assert!(blur > 0.05 * pattern.fringe_separation, "case {case}: blur too small to matter");

        let oracle = MasterEquationOracle::new(&cat, *lambda, *t, 4096, 4096);
        let n = blurred.len();
        let mut worst: f64 = 0.0;
        for j in 0..200 {
            let i = j * (n - 1) / 199;
            let x = blurred.x_at(i);
            let dev = (blurred.density()[i] - oracle.density_at(x)).abs();
            worst = worst.max(dev);
        }
        assert!(
            worst <= 1e-3 * peak,
            "case {case}: worst deviation {worst:e} vs peak {peak:e}"
        );
    }
}

#[test]
fn visibility_monotone_against_quadrature_blur() {
    // Monotone non-increasing contrast across 20 blur values, with the blur
    // itself validated by quadrature at a few points.
    let cat = CatState::new(1e-6, 1e-8, M_DESK).unwrap();
    let pattern = free_pattern(&cat, 1e-3, &GridSpec::default()).unwrap();
    let mut prev = f64::INFINITY;
    for k in 0..20 {
        let sigma = pattern.fringe_separation * (0.04 * k as f64);
        let blurred = blurred_pattern(&pattern, sigma).unwrap();
        let v = visibility(&blurred, None).unwrap();
        assert!(v <= prev + 1e-9, "visibility rose at k={k}: {v} > {prev}");
        prev = v;
    }
}

#[test]
fn randomized_cats_stay_normalized_through_map_and_blur() {
    let mut rng = TestRng::new(0xf21e);
    for _ in 0..30 {
        let d = rng.log_range(1e-7, 1e-5);
        let sigma = d * rng.range(0.02, 0.2);
        let cat = CatState::new(d, sigma, M_DESK).unwrap();
        let t = rng.log_range(1e-5, 1e-2);
        let x_f = 2.0 * std::f64::consts::PI * HBAR * t / (M_DESK * d);
        let pattern = match free_pattern(&cat, t, &GridSpec::with_blur_hint(0.2 * x_f)) {
            Ok(p) => p,
            Err(qmi::Error::Resolution(_)) => continue, // coarse-fringe draw
            Err(e) => panic!("unexpected error: {e}"),
        };
        let integral = pattern.integral();
        assert!((0.99..=1.0 + 1e-9).contains(&integral), "integral = {integral}");
        let blurred = blurred_pattern(&pattern, 0.2 * pattern.fringe_separation).unwrap();
        assert!((blurred.integral() - integral).abs() < 1e-6);
    }
}

#[test]
fn synthesizer_rejects_non_symplectic_maps() {
    let cat = CatState::new(1e-6, 1e-7, M_DESK).unwrap();
    let bad = PhaseSpaceMap { a: 1.1, b: 1e-3 / M_DESK, c: 0.0, d: 1.0 };
    assert!(matches!(
        unblurred_pattern(&cat, &bad, &GridSpec::default(), EvolutionKind::FreeExpansion),
        Err(qmi::Error::Domain(_))
    ));
}
