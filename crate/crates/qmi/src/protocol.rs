//! The seven-step static-landscape interferometer, executed as a pipeline:
//!
//! 1. ground-state preparation in the ω₀ trap,
//! 2. coherent inflation in the inverted ω_I potential for t_I,
//! 3. free expansion growing the coherence length,
//! 4. the double slit (instantaneous, coherent Gaussian → cat replacement,
//!    feasible when the slit separation fits inside the coherence length),
//! 5. harmonic ω_I rotation for t_R = π/(4ω_I),
//! 6. inverted ω_I potential mapping momentum onto position,
//! 7. free drift to detection, pattern synthesis and blurring.
//!
//! Long-wavelength decoherence enters the Gaussian moments (steps 2–3) and
//! the accumulated pattern blur (steps 5–7); short-wavelength decoherence is
//! tracked as a multiplicative e^(−γt) coherence bookkeeping factor, not as
//! a moment modification.

use crate::decoherence::{
    air_scattering, blackbody_emit_absorb, blackbody_scattering, combine, gravity_source,
    vibration_source, Environment, PldSource,
};
use crate::dynamics::{
    momentum_mapping_map, propagate_with_cap, segment_noise, PhaseSpaceMap, Potential, Segment,
};
use crate::error::{Error, Result};
use crate::interferometry::{
    blurred_pattern, unblurred_pattern, with_measured_visibility, CatState, EvolutionKind,
    FringePattern, GridSpec,
};
use crate::quantities::si::HBAR;
use crate::quantities::Sphere;
use crate::state::GaussianState;
use std::f64::consts::PI;

/// Slit geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitSpec {
    pub separation: f64,
    pub width: f64,
}

impl SlitSpec {
    pub fn new(separation: f64, width: f64) -> Self {
        Self { separation, width }
    }

    /// Default slit width d/10.
    pub fn with_default_width(separation: f64) -> Self {
        Self { separation, width: separation / 10.0 }
    }
}

/// Stopping rule for the step-6 inverted mapping stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MappingStop {
    /// Run the inverted potential for a fixed time (must respect the cap).
    FixedDuration(f64),
    /// Run until the ideal fringe separation reaches this detectable size,
    /// clamping at the ω_I·t cap.
    TargetFringe(f64),
}

/// Default detectable fringe size for the mapping stop rule, m.
pub const DEFAULT_TARGET_FRINGE: f64 = 100e-9;

/// Full specification of one interferometer run.
#[derive(Debug, Clone)]
pub struct ProtocolPlan {
    pub sphere: Sphere,
    /// Preparation trap angular frequency, rad/s.
    pub omega0: f64,
    /// Inflation / mapping angular frequency, rad/s.
    pub omega_i: f64,
    /// Step-2 inflation time, s (0 disables inflation).
    pub t_inflation: f64,
    /// Step-3 free-expansion time, s.
    pub free_time: f64,
    pub slit: SlitSpec,
    /// Step-5 rotation time; `None` uses the standard π/(4ω_I). Overrides
    /// are honored but flagged nonstandard in the trace.
    pub t_rotation: Option<f64>,
    pub mapping_stop: MappingStop,
    /// Step-7 free drift, s.
    pub drift_time: f64,
    pub environment: Environment,
    /// Include gravitational decoherence among the active sources.
    pub include_gravity: bool,
    /// Pattern grid points.
    pub grid_points: usize,
    /// Guard on ω_I·t for inverted stages.
    pub omega_t_cap: f64,
}

impl ProtocolPlan {
    /// Step-5 rotation time actually used.
    pub fn rotation_time(&self) -> f64 {
        self.t_rotation.unwrap_or(PI / (4.0 * self.omega_i))
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) || !(self.omega_i > 0.0) {
            return Err(Error::Domain("plan needs positive omega0 and omega_i".into()));
        }
        if !(self.t_inflation >= 0.0) || !(self.free_time >= 0.0) || !(self.drift_time >= 0.0) {
            return Err(Error::Domain("plan durations must be >= 0".into()));
        }
        if let Some(t) = self.t_rotation {
            if !(t >= 0.0) {
                return Err(Error::Domain(format!("rotation time must be >= 0, got {t:e}")));
            }
        }
        Ok(())
    }
}

/// Decoherence channels active during one step, already reduced to
/// effective parameters at the slit coherence scale.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepPld {
    pub gamma_eff: f64,
    pub lambda_eff: f64,
}

/// What the state looks like after a step.
#[derive(Debug, Clone, PartialEq)]
pub enum StageState {
    Gaussian { v_x: f64, v_p: f64, c: f64, purity: f64, xi: f64 },
    Cat { sigma_blur_to_date: f64 },
}

/// One row of the protocol trace.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub index: usize,
    pub name: &'static str,
    pub t_start: f64,
    pub t_end: f64,
    pub pld: StepPld,
    /// Cumulative short-wavelength bookkeeping factor e^(−∫γ dt) since t = 0.
    pub sw_suppression: f64,
    pub stage: StageState,
    pub note: Option<String>,
}

/// Outcome of a full protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolTrace {
    pub steps: Vec<StepRecord>,
    /// Coherence length just before the slit, including SW suppression, m.
    pub xi_at_slit: f64,
    /// d ≤ ξ at the slit time.
    pub slit_feasible: bool,
    /// ξ_at_slit / d.
    pub slit_margin: f64,
    /// Final blurred pattern with measured visibility.
    pub pattern: FringePattern,
    /// Blur scale applied at detection (from steps 5–7 noise), m.
    pub sigma_blur: f64,
    /// e^(−γ·(t₅+t₆+t₇)) bookkeeping for the fringe stages.
    pub sw_fringe_suppression: f64,
    /// Pattern visibility × SW suppression.
    pub effective_visibility: f64,
    /// Duration of the step-6 inverted mapping stage, s.
    pub t_mapping: f64,
    /// True when the mapping stop rule hit the ω_I·t cap.
    pub mapping_capped: bool,
}

fn active_sources(plan: &ProtocolPlan, potential_on: bool) -> Result<Vec<PldSource>> {
    let r = plan.sphere.radius_m();
    let m = plan.sphere.mass_kg();
    let mut sources = vec![
        air_scattering(&plan.environment, r)?,
        blackbody_scattering(&plan.environment, r)?,
        blackbody_emit_absorb(&plan.environment, r)?,
    ];
    if potential_on {
        sources.push(vibration_source(m, plan.omega_i, plan.environment.vibration_psd_m2_per_hz())?);
    }
    if plan.include_gravity {
        sources.push(gravity_source(m, r)?);
    }
    Ok(sources)
}

/// Effective (γ, Λ) for a step at a given coherence scale: the largest
/// coherence length the stage reaches for the Gaussian steps, the slit
/// separation for the post-slit fringe stages.
fn step_pld(plan: &ProtocolPlan, potential_on: bool, coherence_scale: f64) -> Result<StepPld> {
    let sources = active_sources(plan, potential_on)?;
    let eff = combine(&sources, coherence_scale)?;
    Ok(StepPld { gamma_eff: eff.gamma_eff, lambda_eff: eff.lambda_eff })
}

/// Classification scale for a Gaussian step: the coherence length grows
/// monotonically through the coherent stages, so the decoherence-free
/// endpoint bounds the scale the state explores during the step.
fn gaussian_step_scale(
    state: &GaussianState,
    potential: Potential,
    duration: f64,
    cap: f64,
) -> Result<f64> {
    let xi_start = state.diagnostics()?.coherence_length;
    if duration == 0.0 {
        return Ok(xi_start);
    }
    let seg = Segment::new(potential, duration, 0.0, 0.0)?;
    let end = propagate_with_cap(state, &seg, cap)?;
    Ok(xi_start.max(end.diagnostics()?.coherence_length))
}

fn gaussian_stage(state: &GaussianState) -> Result<StageState> {
    let d = state.diagnostics()?;
    Ok(StageState::Gaussian {
        v_x: state.v_x(),
        v_p: state.v_p(),
        c: state.c(),
        purity: d.purity,
        xi: d.coherence_length,
    })
}

/// Solve the step-6 duration from the stop rule.
fn mapping_duration(plan: &ProtocolPlan) -> Result<(f64, bool)> {
    match plan.mapping_stop {
        MappingStop::FixedDuration(t) => {
            if !(t >= 0.0) {
                return Err(Error::Domain(format!("mapping duration must be >= 0, got {t:e}")));
            }
            if plan.omega_i * t > plan.omega_t_cap {
                return Err(Error::CapExceeded(format!(
                    "mapping stage omega_i*t = {:.3} > cap {}",
                    plan.omega_i * t,
                    plan.omega_t_cap
                )));
            }
            Ok((t, false))
        }
        MappingStop::TargetFringe(x_target) => {
            if !(x_target > 0.0) {
                return Err(Error::Domain(format!("target fringe must be positive, got {x_target:e}")));
            }
            // The composite rotate+invert map transfers momentum to position
            // with coefficient e^(ω_I t)/(√2 M ω_I), so the synthesized
            // fringe period is x_f(t) = e^(ω_I t)·√2·πħ/(M d ω_I); solve for
            // t and clamp at the cap.
            let m = plan.sphere.mass_kg();
            let base = std::f64::consts::SQRT_2 * PI * HBAR / (m * plan.slit.separation * plan.omega_i);
            let wt = (x_target / base).ln().max(0.0);
            if wt > plan.omega_t_cap {
                Ok((plan.omega_t_cap / plan.omega_i, true))
            } else {
                Ok((wt / plan.omega_i, false))
            }
        }
    }
}

/// Execute steps 1–7 and collect the trace.
pub fn run_protocol(plan: &ProtocolPlan) -> Result<ProtocolTrace> {
    plan.validate()?;
    let m = plan.sphere.mass_kg();
    let mut steps = Vec::with_capacity(7);
    let mut t_now = 0.0;
    let mut suppression = 1.0;

    // Step 1: ground-state preparation (instantaneous in this model).
    let mut state = GaussianState::ground(m, plan.omega0)?;
    steps.push(StepRecord {
        index: 1,
        name: "prepare_ground_state",
        t_start: 0.0,
        t_end: 0.0,
        pld: StepPld::default(),
        sw_suppression: suppression,
        stage: gaussian_stage(&state)?,
        note: None,
    });

    // Step 2: coherent inflation.
    let scale2 = gaussian_step_scale(
        &state,
        Potential::Inverted { omega: plan.omega_i },
        plan.t_inflation,
        plan.omega_t_cap,
    )?;
    let pld2 = step_pld(plan, true, scale2)?;
    if plan.t_inflation > 0.0 {
        let seg = Segment::inverted(plan.omega_i, plan.t_inflation, pld2.lambda_eff, pld2.gamma_eff)?;
        state = propagate_with_cap(&state, &seg, plan.omega_t_cap)?;
    }
    suppression *= (-pld2.gamma_eff * plan.t_inflation).exp();
    steps.push(StepRecord {
        index: 2,
        name: "coherent_inflation",
        t_start: t_now,
        t_end: t_now + plan.t_inflation,
        pld: pld2,
        sw_suppression: suppression,
        stage: gaussian_stage(&state)?,
        note: None,
    });
    t_now += plan.t_inflation;

    // Step 3: free expansion.
    let scale3 = gaussian_step_scale(&state, Potential::Free, plan.free_time, plan.omega_t_cap)?;
    let pld3 = step_pld(plan, false, scale3)?;
    if plan.free_time > 0.0 {
        let seg = Segment::free(plan.free_time, pld3.lambda_eff, pld3.gamma_eff)?;
        state = propagate_with_cap(&state, &seg, plan.omega_t_cap)?;
    }
    suppression *= (-pld3.gamma_eff * plan.free_time).exp();
    steps.push(StepRecord {
        index: 3,
        name: "free_expansion",
        t_start: t_now,
        t_end: t_now + plan.free_time,
        pld: pld3,
        sw_suppression: suppression,
        stage: gaussian_stage(&state)?,
        note: None,
    });
    t_now += plan.free_time;

    // Step 4: the slit. Instantaneous coherent replacement; the only
    // coupling to the prior dynamics is the feasibility check d ≤ ξ.
    let xi_at_slit = state.diagnostics()?.coherence_length * suppression;
    let slit_margin = xi_at_slit / plan.slit.separation;
    let slit_feasible = slit_margin >= 1.0;
    let cat = CatState::new(plan.slit.separation, plan.slit.width, m)?;
    steps.push(StepRecord {
        index: 4,
        name: "double_slit",
        t_start: t_now,
        t_end: t_now,
        pld: StepPld::default(),
        sw_suppression: suppression,
        stage: StageState::Cat { sigma_blur_to_date: 0.0 },
        note: Some(if slit_feasible {
            format!("feasible: xi/d = {slit_margin:.3}")
        } else {
            format!("infeasible: xi/d = {slit_margin:.3e} < 1; continuing with flag")
        }),
    });

    // Steps 5-7 act on the cat through linear maps; long-wavelength noise
    // accumulates into the detection blur.
    let t_rot = plan.rotation_time();
    let nonstandard_rotation = plan.t_rotation.is_some()
        && (t_rot - PI / (4.0 * plan.omega_i)).abs() > 1e-12 * t_rot.max(1.0 / plan.omega_i);
    let (t_map, mapping_capped) = mapping_duration(plan)?;
    let pld5 = step_pld(plan, true, plan.slit.separation)?;
    let pld6 = pld5;
    let pld7 = step_pld(plan, false, plan.slit.separation)?;

    let rot_pot = Potential::Harmonic { omega: plan.omega_i };
    let inv_pot = Potential::Inverted { omega: plan.omega_i };
    let map5 = PhaseSpaceMap::for_potential(rot_pot, m, t_rot);
    let map6 = PhaseSpaceMap::for_potential(inv_pot, m, t_map);
    let map7 = PhaseSpaceMap::for_potential(Potential::Free, m, plan.drift_time);
    // The rotation+inversion product collapses to a closed form that keeps
    // the exponentially small entries exact; fall back to the generic
    // product only for nonstandard rotation times.
    let map56 = if nonstandard_rotation {
        map5.then(&map6)
    } else {
        momentum_mapping_map(m, plan.omega_i, t_map)
    };
    let total_map = map56.then(&map7);

    let n5 = segment_noise(rot_pot, m, t_rot, pld5.lambda_eff);
    let n6 = segment_noise(inv_pot, m, t_map, pld6.lambda_eff);
    let n7 = segment_noise(Potential::Free, m, plan.drift_time, pld7.lambda_eff);
    let noise_at_detection =
        n5.through(&map6).through(&map7).add(&n6.through(&map7)).add(&n7);
    let sigma_blur = (2.0 * noise_at_detection.xx.max(0.0)).sqrt();

    suppression *= (-pld5.gamma_eff * t_rot).exp();
    steps.push(StepRecord {
        index: 5,
        name: "harmonic_rotation",
        t_start: t_now,
        t_end: t_now + t_rot,
        pld: pld5,
        sw_suppression: suppression,
        stage: StageState::Cat { sigma_blur_to_date: (2.0 * n5.xx).sqrt() },
        note: nonstandard_rotation.then(|| "nonstandard rotation time (not pi/(4 omega_i))".to_string()),
    });
    t_now += t_rot;

    suppression *= (-pld6.gamma_eff * t_map).exp();
    let blur6 = (2.0 * n5.through(&map6).add(&n6).xx.max(0.0)).sqrt();
    steps.push(StepRecord {
        index: 6,
        name: "inverted_mapping",
        t_start: t_now,
        t_end: t_now + t_map,
        pld: pld6,
        sw_suppression: suppression,
        stage: StageState::Cat { sigma_blur_to_date: blur6 },
        note: mapping_capped.then(|| {
            format!("mapping clamped at omega_i*t = {}", plan.omega_t_cap)
        }),
    });
    t_now += t_map;

    suppression *= (-pld7.gamma_eff * plan.drift_time).exp();
    steps.push(StepRecord {
        index: 7,
        name: "free_drift_detection",
        t_start: t_now,
        t_end: t_now + plan.drift_time,
        pld: pld7,
        sw_suppression: suppression,
        stage: StageState::Cat { sigma_blur_to_date: sigma_blur },
        note: None,
    });

    let grid = GridSpec { points: plan.grid_points, half_width: None, blur_hint: sigma_blur };
    let ideal = unblurred_pattern(&cat, &total_map, &grid, EvolutionKind::CiExpansion)?;
    let pattern = with_measured_visibility(blurred_pattern(&ideal, sigma_blur)?);

    let sw_fringe_suppression =
        (-(pld5.gamma_eff * t_rot + pld6.gamma_eff * t_map + pld7.gamma_eff * plan.drift_time)).exp();
    let effective_visibility = pattern.visibility.unwrap_or(0.0) * sw_fringe_suppression;

    Ok(ProtocolTrace {
        steps,
        xi_at_slit,
        slit_feasible,
        slit_margin,
        pattern,
        sigma_blur,
        sw_fringe_suppression,
        effective_visibility,
        t_mapping: t_map,
        mapping_capped,
    })
}

/// One sample of the pre-slit coherence timeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelinePoint {
    pub t: f64,
    /// Coherent (moment-level) coherence length, m.
    pub xi_coherent: f64,
    /// With the short-wavelength e^(−γt) bookkeeping applied.
    pub xi: f64,
    pub purity: f64,
}

/// Densely sampled coherence length across steps 1–3 (preparation,
/// inflation, free expansion).
pub fn coherence_timeline(plan: &ProtocolPlan, n_samples: usize) -> Result<Vec<TimelinePoint>> {
    plan.validate()?;
    if n_samples < 2 {
        return Err(Error::Domain(format!("timeline needs >= 2 samples, got {n_samples}")));
    }
    let m = plan.sphere.mass_kg();
    let ground = GaussianState::ground(m, plan.omega0)?;
    let scale2 = gaussian_step_scale(
        &ground,
        Potential::Inverted { omega: plan.omega_i },
        plan.t_inflation,
        plan.omega_t_cap,
    )?;
    let pld2 = step_pld(plan, true, scale2)?;
    let post_inflation = if plan.t_inflation > 0.0 {
        let seg = Segment::inverted(plan.omega_i, plan.t_inflation, pld2.lambda_eff, pld2.gamma_eff)?;
        propagate_with_cap(&ground, &seg, plan.omega_t_cap)?
    } else {
        ground
    };
    let scale3 =
        gaussian_step_scale(&post_inflation, Potential::Free, plan.free_time, plan.omega_t_cap)?;
    let pld3 = step_pld(plan, false, scale3)?;

    let total = plan.t_inflation + plan.free_time;
    let mut out = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let t = total * i as f64 / (n_samples - 1) as f64;
        let (state, damping) = if t <= plan.t_inflation && plan.t_inflation > 0.0 {
            let seg = Segment::inverted(plan.omega_i, t, pld2.lambda_eff, pld2.gamma_eff)?;
            (propagate_with_cap(&ground, &seg, plan.omega_t_cap)?, pld2.gamma_eff * t)
        } else {
            let dt = t - plan.t_inflation;
            let seg = Segment::free(dt, pld3.lambda_eff, pld3.gamma_eff)?;
            (
                propagate_with_cap(&post_inflation, &seg, plan.omega_t_cap)?,
                pld2.gamma_eff * plan.t_inflation + pld3.gamma_eff * dt,
            )
        };
        let diag = state.diagnostics()?;
        out.push(TimelinePoint {
            t,
            xi_coherent: diag.coherence_length,
            xi: diag.coherence_length * (-damping).exp(),
            purity: diag.purity,
        });
    }
    Ok(out)
}

/// Check whether a step uses a potential (for vibration toggling) — kept in
/// sync with `run_protocol`'s step ordering.
pub fn potential_on(step_index: usize) -> bool {
    matches!(step_index, 1 | 2 | 5 | 6)
}
