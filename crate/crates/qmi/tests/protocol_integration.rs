//! Pipeline-level invariants: coherent-limit visibility, scale covariance
//! of the piecewise-quadratic dynamics, vibration thresholds for the final
//! fringes, and the rate-limited coherence timeline.

mod common;

use common::rel;
use qmi::decoherence::{air_scattering, Environment, AIR_MASS_AMU};
use qmi::interferometry::{unblurred_pattern, visibility, CatState, EvolutionKind, GridSpec};
use qmi::protocol::{coherence_timeline, run_protocol, MappingStop, ProtocolPlan, SlitSpec, StageState};
use qmi::quantities::si::AMU_KG;
use qmi::quantities::Sphere;
use std::f64::consts::PI;

fn plan_with_env(env: Environment) -> ProtocolPlan {
    ProtocolPlan {
        sphere: Sphere::new(1e-6, 8570.0).unwrap(),
        omega0: 2.0 * PI * 1e5,
        omega_i: 2.0 * PI * 50.0,
        t_inflation: 0.015,
        free_time: 0.6,
        slit: SlitSpec::with_default_width(1e-6),
        t_rotation: None,
        mapping_stop: MappingStop::TargetFringe(100e-9),
        drift_time: 0.0,
        environment: env,
        include_gravity: false,
        grid_points: 4096,
        omega_t_cap: 30.0,
    }
}

fn silent_env() -> Environment {
    Environment::new(0.1, 0.0, AIR_MASS_AMU * AMU_KG, 0.0, 0.0, 0.0).unwrap()
}

#[test]
fn coherent_run_reproduces_ideal_cat_visibility() {
    let plan = plan_with_env(silent_env());
    let trace = run_protocol(&plan).unwrap();
    assert_eq!(trace.sigma_blur, 0.0);

    // Ideal pattern for the same geometry and the same final map.
    let m = plan.sphere.mass_kg();
    let cat = CatState::new(plan.slit.separation, plan.slit.width, m).unwrap();
    let map = qmi::dynamics::momentum_mapping_map(m, plan.omega_i, trace.t_mapping);
    let ideal = unblurred_pattern(&cat, &map, &GridSpec::default(), EvolutionKind::CiExpansion).unwrap();
    let v_ideal = visibility(&ideal, None).unwrap();
    let v_run = trace.pattern.visibility.unwrap();
    assert!((v_run - v_ideal).abs() < 1e-3, "run {v_run} vs ideal {v_ideal}");
}

#[test]
fn dimensionless_trace_is_scale_covariant() {
    // Scaling ω ↦ κω, t ↦ t/κ, lengths ↦ length/√κ, with the localization
    // parameters scaled to κ²Λ and rates to κγ, leaves every dimensionless
    // trace quantity unchanged. The environment dials realizing the source
    // scalings: pressure ↦ κP (γ_air ∝ P), χ_I ↦ κ²χ_I (Λ ∝ χ_I),
    // S_xx ↦ S_xx/κ² (Λ_v ∝ ω⁴S), χ_R = 0.
    let kappa: f64 = 2.0;
    let s = kappa.sqrt();
    let env1 = Environment::new(0.1, 1e-16 * 100.0, AIR_MASS_AMU * AMU_KG, 0.0, 0.04, 1e-36).unwrap();
    let env2 = Environment::new(
        0.1,
        kappa * 1e-16 * 100.0,
        AIR_MASS_AMU * AMU_KG,
        0.0,
        kappa * kappa * 0.04,
        1e-36 / (kappa * kappa),
    )
    .unwrap();
    let plan1 = ProtocolPlan {
        t_inflation: 0.012,
        free_time: 0.5,
        environment: env1,
        ..plan_with_env(silent_env())
    };
    let plan2 = ProtocolPlan {
        omega0: plan1.omega0 * kappa,
        omega_i: plan1.omega_i * kappa,
        t_inflation: plan1.t_inflation / kappa,
        free_time: plan1.free_time / kappa,
        slit: SlitSpec::new(plan1.slit.separation / s, plan1.slit.width / s),
        mapping_stop: MappingStop::TargetFringe(100e-9 / s),
        environment: env2,
        ..plan_with_env(silent_env())
    };

    let t1 = run_protocol(&plan1).unwrap();
    let t2 = run_protocol(&plan2).unwrap();

    for (a, b) in t1.steps.iter().zip(&t2.steps) {
        if let (StageState::Gaussian { purity: p1, xi: x1, .. }, StageState::Gaussian { purity: p2, xi: x2, .. }) =
            (&a.stage, &b.stage)
        {
            assert!((p1 - p2).abs() < 1e-6, "step {}: purity {p1} vs {p2}", a.index);
            // ξ is a length: ξ₂ = ξ₁/√κ.
            if *x1 > 0.0 {
                assert!(rel(x2 * s, *x1) < 1e-6, "step {}: xi {x1:e} vs {x2:e}", a.index);
            }
        }
        assert!((a.sw_suppression - b.sw_suppression).abs() < 1e-6, "step {} sw", a.index);
    }
    assert!(rel(t2.slit_margin, t1.slit_margin) < 1e-6);
    assert!(rel(t2.sigma_blur * s, t1.sigma_blur) < 1e-6);
    assert!(
        (t1.pattern.visibility.unwrap() - t2.pattern.visibility.unwrap()).abs() < 1e-6,
        "visibility {:?} vs {:?}",
        t1.pattern.visibility,
        t2.pattern.visibility
    );
    assert!((t1.effective_visibility - t2.effective_visibility).abs() < 1e-6);
}

#[test]
fn vibration_threshold_splits_visible_and_erased_fringes() {
    // S_xx two decades below the fringe ceiling keeps the contrast high;
    // two decades above erases it.
    let d = 1e-6;
    let sphere = Sphere::new(1e-6, 8570.0).unwrap();
    let omega_i = 2.0 * PI * 50.0;
    let s_ceiling = {
        let root = 4.0 * PI * qmi::quantities::si::HBAR
            / (d * sphere.mass_kg() * omega_i.powf(1.5));
        root * root
    };
    let run_with = |s_xx: f64| {
        let env = Environment::new(0.1, 1e-18 * 100.0, AIR_MASS_AMU * AMU_KG, 0.0, 0.01, s_xx).unwrap();
        run_protocol(&plan_with_env(env)).unwrap()
    };
    let quiet = run_with(s_ceiling / 100.0);
    assert!(quiet.slit_feasible);
    let v_quiet = quiet.pattern.visibility.unwrap();
    assert!(v_quiet >= 0.5, "quiet visibility {v_quiet}");

    let noisy = run_with(s_ceiling * 100.0);
    let v_noisy = noisy.pattern.visibility.unwrap_or(0.0);
    assert!(v_noisy < 0.05, "noisy visibility {v_noisy}");
}

#[test]
fn timeline_peak_follows_gas_rate_cutoff() {
    // With collisions dominating, ξ(t)·e^(−γt) peaks at t = 1/γ at the
    // value ξ⋆/e, consistent with the budget's rate-limited maximum.
    let env = Environment::new(0.1, 1e-16 * 100.0, AIR_MASS_AMU * AMU_KG, 0.0, 0.0, 0.0).unwrap();
    let mut plan = plan_with_env(env);
    plan.t_inflation = 0.0;
    let gamma = air_scattering(&plan.environment, plan.sphere.radius_m()).unwrap().gamma();
    plan.free_time = 5.0 / gamma;
    let points = coherence_timeline(&plan, 8001).unwrap();
    let peak = points.iter().max_by(|a, b| a.xi.partial_cmp(&b.xi).unwrap()).unwrap();
    assert!(rel(peak.t, 1.0 / gamma) < 5e-3, "peak t {} vs 1/γ {}", peak.t, 1.0 / gamma);

    let inputs = qmi::feasibility::BudgetInputs {
        sphere: &plan.sphere,
        omega0: plan.omega0,
        env: &plan.environment,
        omega_i: plan.omega_i,
        slit_separation: Some(plan.slit.separation),
        include_gravity: false,
        gain: None,
    };
    let b = qmi::feasibility::budget(&inputs).unwrap();
    assert!(rel(peak.xi, b.xi_star * (-1.0_f64).exp()) < 5e-3, "peak xi {} vs ξ⋆/e", peak.xi);
}

#[test]
fn gravity_lowers_the_pre_slit_coherence() {
    let env = Environment::new(0.1, 1e-18 * 100.0, AIR_MASS_AMU * AMU_KG, 1.0, 1.0, 0.0).unwrap();
    let plan_off = ProtocolPlan { free_time: 1.3, ..plan_with_env(env) };
    let plan_on = ProtocolPlan { include_gravity: true, ..plan_off.clone() };
    let off = run_protocol(&plan_off).unwrap();
    let on = run_protocol(&plan_on).unwrap();
    assert!(
        on.xi_at_slit < off.xi_at_slit,
        "gravity on {:e} should stay below off {:e}",
        on.xi_at_slit,
        off.xi_at_slit
    );
}
