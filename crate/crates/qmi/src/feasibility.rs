//! Closed-form environmental budgets: decoherence timescales, maximum
//! coherence length, inflation gain bounds, vibration ceilings, and the
//! gravitational-decoherence falsification window.

use crate::decoherence::{
    air_scattering, blackbody_emit_absorb, blackbody_scattering, gravity_source, vibration_source,
    Environment, PldSource, Regime, SourceKind,
};
use crate::dynamics::{self, CiGain, Segment};
use crate::error::{Error, Result};
use crate::quantities::si::HBAR;
use crate::quantities::Sphere;
use crate::state::GaussianState;

/// Time at which long-wavelength decoherence caps the free-expansion
/// coherence growth: t_Λ = [3M/(2ħΛω₀)]^(1/3). ∞ for Λ = 0.
pub fn t_lambda(mass_kg: f64, omega0: f64, lambda: f64) -> Result<f64> {
    if !(mass_kg > 0.0) || !(omega0 > 0.0) {
        return Err(Error::Domain("t_lambda needs positive mass and trap frequency".into()));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("lambda must be >= 0, got {lambda:e}")));
    }
    if lambda == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((3.0 * mass_kg / (2.0 * HBAR * lambda * omega0)).cbrt())
}

/// Peak coherence length reached at t_Λ: ξ(t_Λ) = √(2/(Λ t_Λ)).
pub fn xi_at_t_lambda(lambda: f64, t_lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !(t_lambda > 0.0) {
        return Err(Error::Domain("xi_at_t_lambda needs positive lambda and time".into()));
    }
    Ok((2.0 / (lambda * t_lambda)).sqrt())
}

/// The coherence-length curve ξ(t) of a state expanding freely under a
/// long-wavelength localization parameter Λ.
#[derive(Debug, Clone, Copy)]
pub struct CoherenceCurve {
    state0: GaussianState,
    lambda: f64,
}

impl CoherenceCurve {
    pub fn new(state0: GaussianState, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("lambda must be >= 0, got {lambda:e}")));
        }
        Ok(Self { state0, lambda })
    }

    pub fn xi_at(&self, t: f64) -> Result<f64> {
        let seg = Segment::free(t, self.lambda, 0.0)?;
        Ok(dynamics::propagate(&self.state0, &seg)?.diagnostics()?.coherence_length)
    }

    /// Locate the maximum of ξ(t) by golden-section search in log-time.
    /// `t_guess` brackets the search three decades either side.
    pub fn peak(&self, t_guess: f64) -> Result<CoherencePeak> {
        if !(t_guess > 0.0) || !t_guess.is_finite() {
            return Err(Error::Domain(format!(
                "peak search needs a finite positive guess, got {t_guess:e}"
            )));
        }
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let mut lo = (t_guess * 1e-3).ln();
        let mut hi = (t_guess * 1e3).ln();
        let f = |u: f64| self.xi_at(u.exp());
        let mut m1 = hi - phi * (hi - lo);
        let mut m2 = lo + phi * (hi - lo);
        let mut f1 = f(m1)?;
        let mut f2 = f(m2)?;
        // 1e-8 absolute in log-time = 1e-8 relative in time.
        while (hi - lo) > 1e-8 {
            if f1 < f2 {
                lo = m1;
                m1 = m2;
                f1 = f2;
                m2 = lo + phi * (hi - lo);
                f2 = f(m2)?;
            } else {
                hi = m2;
                m2 = m1;
                f2 = f1;
                m1 = hi - phi * (hi - lo);
                f1 = f(m1)?;
            }
        }
        let t = ((lo + hi) / 2.0).exp();
        Ok(CoherencePeak { t, xi: self.xi_at(t)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePeak {
    pub t: f64,
    pub xi: f64,
}

/// Everything the budget engine needs about one scenario.
#[derive(Debug, Clone, Copy)]
pub struct BudgetInputs<'a> {
    pub sphere: &'a Sphere,
    /// Preparation trap angular frequency ω₀, rad/s.
    pub omega0: f64,
    pub env: &'a Environment,
    /// Inflation / mapping potential angular frequency ω_I, rad/s.
    pub omega_i: f64,
    /// Slit separation used as the coherence reference scale and in the
    /// fringe vibration ceiling; defaults to the sphere radius.
    pub slit_separation: Option<f64>,
    /// Include gravitational decoherence in the totals.
    pub include_gravity: bool,
    /// Inflation gain for the inflated-coherence entries.
    pub gain: Option<CiGain>,
}

/// Per-source long-wavelength timescale entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceTimescale {
    pub kind: SourceKind,
    pub lambda_loc: f64,
    pub t_lambda: f64,
}

/// Environmental budget for one scenario.
///
/// Sources limiting free coherence growth (thermal photons, residual gas,
/// optionally gravity) are classified at the slit-separation scale; the
/// white-noise vibration channel acts only while a potential is on, so it
/// enters through the gain bound and the two PSD ceilings instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    /// t_Λ per long-wavelength-classified source.
    pub t_lambda_per_source: Vec<SourceTimescale>,
    /// Σγ over short-wavelength-classified sources, Hz.
    pub gamma_total: f64,
    /// ΣΛ over long-wavelength-classified sources, Hz/m².
    pub lambda_total: f64,
    /// min(min_source t_Λ, 1/γ_total), s.
    pub t_star: f64,
    /// Coherence length of the free expansion at t⋆, m (∞ when nothing
    /// limits the growth).
    pub xi_star: f64,
    /// Same with the inflation gain applied first (peak time shortens by
    /// g_p^(2/3)); present when an inflation gain was supplied.
    pub t_star_inflated: Option<f64>,
    pub xi_star_inflated: Option<f64>,
    /// Maximum coherent gain ω_I²M/(2ħΛ_v) from the vibration channel.
    pub g_star: f64,
    /// g_p⋆ = √(ω_I g⋆/ω₀).
    pub g_p_star: f64,
    /// PSD at which g_p⋆ = 1: useful inflation needs S_xx well below this.
    pub s_xx_max_inflation: f64,
    /// PSD at which inflated fringes blur away: [4πħ/(d M ω_I^(3/2))]².
    pub s_xx_max_fringes: f64,
}

fn standard_sources(inputs: &BudgetInputs) -> Result<Vec<PldSource>> {
    let r = inputs.sphere.radius_m();
    let mut sources = vec![
        air_scattering(inputs.env, r)?,
        blackbody_scattering(inputs.env, r)?,
        blackbody_emit_absorb(inputs.env, r)?,
    ];
    if inputs.include_gravity {
        sources.push(gravity_source(inputs.sphere.mass_kg(), r)?);
    }
    Ok(sources)
}

/// Partial budget evaluated under one fixed classification.
struct BudgetPass {
    per_source: Vec<SourceTimescale>,
    gamma_total: f64,
    lambda_total: f64,
    t_star: f64,
    xi_star: f64,
}

fn budget_pass(
    sources: &[PldSource],
    xi_ref: f64,
    ground: &GaussianState,
    omega0: f64,
) -> Result<(BudgetPass, Vec<Regime>)> {
    let m = ground.mass_kg();
    let eff = crate::decoherence::combine(sources, xi_ref)?;
    let regimes: Vec<Regime> = eff.classifications.iter().map(|c| c.regime).collect();

    let mut per_source = Vec::new();
    for (src, class) in sources.iter().zip(&eff.classifications) {
        if class.regime == Regime::LongWavelength && src.lambda_loc() > 0.0 {
            per_source.push(SourceTimescale {
                kind: src.kind(),
                lambda_loc: src.lambda_loc(),
                t_lambda: t_lambda(m, omega0, src.lambda_loc())?,
            });
        }
    }
    let min_t_lambda = per_source.iter().map(|s| s.t_lambda).fold(f64::INFINITY, f64::min);
    let gamma_total = eff.gamma_eff;
    let inv_gamma = if gamma_total > 0.0 { 1.0 / gamma_total } else { f64::INFINITY };
    let t_star = min_t_lambda.min(inv_gamma);
    let curve = CoherenceCurve::new(*ground, eff.lambda_eff)?;
    let xi_star = if t_star.is_finite() { curve.xi_at(t_star)? } else { f64::INFINITY };
    Ok((
        BudgetPass { per_source, gamma_total, lambda_total: eff.lambda_eff, t_star, xi_star },
        regimes,
    ))
}

/// Assemble the environmental budget: per-source timescales, the combined
/// (γ, Λ), t⋆ and ξ⋆ evaluated on the propagated coherence curve, gain
/// bounds and both vibration ceilings.
///
/// The short/long-wavelength classification is iterated to a fixed point:
/// sources are first split at the initial coherence length, the reachable
/// ξ⋆ is computed, and the split is redone at that scale until it stops
/// changing (gas scattering flips to the saturated-rate regime as soon as
/// the coherence length passes the thermal de Broglie wavelength, while
/// thermal photons and gravity stay quadratic below their much longer
/// saturation scales).
pub fn budget(inputs: &BudgetInputs) -> Result<Budget> {
    let m = inputs.sphere.mass_kg();
    let d_ref = match inputs.slit_separation {
        Some(d) if d > 0.0 => d,
        Some(d) => return Err(Error::Domain(format!("slit separation must be positive, got {d:e}"))),
        None => inputs.sphere.radius_m(),
    };
    if !(inputs.omega0 > 0.0) || !(inputs.omega_i > 0.0) {
        return Err(Error::Domain("budget needs positive omega0 and omega_i".into()));
    }

    let sources = standard_sources(inputs)?;
    let ground = GaussianState::ground(m, inputs.omega0)?;
    let mut xi_ref = ground.diagnostics()?.coherence_length;
    let (mut pass, mut regimes) = budget_pass(&sources, xi_ref, &ground, inputs.omega0)?;
    for _ in 0..8 {
        if pass.xi_star.is_finite() && pass.xi_star > 0.0 {
            xi_ref = pass.xi_star;
        }
        let (next, next_regimes) = budget_pass(&sources, xi_ref, &ground, inputs.omega0)?;
        let stable = next_regimes == regimes;
        pass = next;
        regimes = next_regimes;
        if stable {
            break;
        }
    }
    let BudgetPass { per_source, gamma_total, lambda_total, t_star, xi_star } = pass;
    let min_t_lambda = per_source.iter().map(|s| s.t_lambda).fold(f64::INFINITY, f64::min);
    let inv_gamma = if gamma_total > 0.0 { 1.0 / gamma_total } else { f64::INFINITY };

    let (t_star_inflated, xi_star_inflated) = match &inputs.gain {
        Some(gain) => {
            let inflated = dynamics::post_inflation_state(m, inputs.omega0, gain)?;
            let inflated_curve = CoherenceCurve::new(inflated, lambda_total)?;
            let t = (min_t_lambda / gain.g_p.powf(2.0 / 3.0)).min(inv_gamma);
            let xi = if t.is_finite() { inflated_curve.xi_at(t)? } else { f64::INFINITY };
            (Some(t), Some(xi))
        }
        None => (None, None),
    };

    let vib = vibration_source(m, inputs.omega_i, inputs.env.vibration_psd_m2_per_hz())?;
    let max_gain = dynamics::max_coherent_gain(m, inputs.omega0, inputs.omega_i, vib.lambda_loc())?;
    let g_p_star = (inputs.omega_i * max_gain.g_star / inputs.omega0).sqrt();
    let s_xx_max_inflation = HBAR / (inputs.omega0 * m * inputs.omega_i);
    let s_xx_fringe_root = 4.0 * std::f64::consts::PI * HBAR / (d_ref * m * inputs.omega_i.powf(1.5));

    Ok(Budget {
        t_lambda_per_source: per_source,
        gamma_total,
        lambda_total,
        t_star,
        xi_star,
        t_star_inflated,
        xi_star_inflated,
        g_star: max_gain.g_star,
        g_p_star,
        s_xx_max_inflation,
        s_xx_max_fringes: s_xx_fringe_root * s_xx_fringe_root,
    })
}

/// Slit-separation window in which gravitational collapse is decidable:
/// separations above the gravity-limited coherence length but below the
/// standard-decoherence-limited one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FalsificationWindow {
    /// Pre-slit coherence length with gravitational decoherence added, m.
    pub xi_with_gravity: f64,
    /// Pre-slit coherence length from standard sources only, m.
    pub xi_without_gravity: f64,
    /// Window bounds: d_low = ξ_with, d_high = ξ_without.
    pub d_low: f64,
    pub d_high: f64,
    /// Margin factor operationalizing "well separated" on both sides.
    pub margin: f64,
    /// True when d_high/d_low ≥ margin.
    pub conclusive: bool,
}

/// Default width factor the window must span to count as conclusive.
pub const DEFAULT_WINDOW_MARGIN: f64 = 10.0;

/// Compute the pre-slit coherence lengths with and without the
/// gravitational channel, and whether they bracket a decisive window.
pub fn falsification_window(inputs: &BudgetInputs, margin: f64) -> Result<FalsificationWindow> {
    if !(margin >= 1.0) {
        return Err(Error::Domain(format!("window margin must be >= 1, got {margin:e}")));
    }
    let without = budget(&BudgetInputs { include_gravity: false, ..*inputs })?;
    let with = budget(&BudgetInputs { include_gravity: true, ..*inputs })?;
    let (xi_hi, xi_lo) = match inputs.gain {
        Some(_) => {
            (without.xi_star_inflated.expect("gain given"), with.xi_star_inflated.expect("gain given"))
        }
        None => (without.xi_star, with.xi_star),
    };
    Ok(FalsificationWindow {
        xi_with_gravity: xi_lo,
        xi_without_gravity: xi_hi,
        d_low: xi_lo,
        d_high: xi_hi,
        margin,
        conclusive: xi_hi / xi_lo >= margin,
    })
}
