//! Closed-form propagation of Gaussian second moments under piecewise
//! free / harmonic / inverted-harmonic dynamics with long-wavelength
//! momentum diffusion, plus the coherent-inflation gain algebra.
//!
//! The moment equations implied by the long-wavelength master equation
//! ρ̇ = [Ĥ,ρ̂]/(iħ) − Λ[x̂,[x̂,ρ̂]] are linear:
//!
//! ```text
//!   v̇_x = 2c/M,   ċ = v_p/M ∓ Mω² v_x,   v̇_p = ∓2Mω² c + 2ħ²Λ
//! ```
//!
//! (upper sign harmonic, lower sign inverted, ω = 0 free), so a segment maps
//! the covariance as Σ(t) = S Σ S† + N(t) with S the classical 2×2 flow and
//! N(t) the accumulated momentum-diffusion noise. Both are evaluated in
//! closed form here; an independent adaptive ODE integrator guards the
//! algebra from the test suite.

use crate::error::{Error, Result};
use crate::quantities::si::HBAR;
use crate::state::GaussianState;
use std::f64::consts::PI;

/// Default guard on ω·t for inverted segments: e^(ωt) overflows doubles near
/// ωt ≈ 700, and moment arithmetic degrades well before; stop far below with
/// a clear error.
pub const DEFAULT_OMEGA_T_CAP: f64 = 30.0;

/// The quadratic potential acting during one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Free,
    Harmonic { omega: f64 },
    Inverted { omega: f64 },
}

impl Potential {
    pub fn omega(&self) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } | Potential::Inverted { omega } => *omega,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Potential::Free => "free",
            Potential::Harmonic { .. } => "harmonic",
            Potential::Inverted { .. } => "inverted",
        }
    }
}

/// One stage of piecewise dynamics: a potential held for a duration with the
/// long-wavelength localization parameter Λ active, plus a short-wavelength
/// rate γ carried along for coherence bookkeeping (it does not alter the
/// moments; see [`crate::protocol`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub potential: Potential,
    pub duration: f64,
    /// Λ active during the segment, Hz/m².
    pub lw_lambda: f64,
    /// SW decay bookkeeping rate, Hz.
    pub sw_gamma: f64,
}

impl Segment {
    pub fn new(potential: Potential, duration: f64, lw_lambda: f64, sw_gamma: f64) -> Result<Self> {
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::Domain(format!("segment duration must be >= 0, got {duration:e}")));
        }
        if !(lw_lambda >= 0.0) {
            return Err(Error::Domain(format!("segment lambda must be >= 0, got {lw_lambda:e}")));
        }
        if !(sw_gamma >= 0.0) {
            return Err(Error::Domain(format!("segment gamma must be >= 0, got {sw_gamma:e}")));
        }
        match potential {
            Potential::Harmonic { omega } | Potential::Inverted { omega } if !(omega > 0.0) => {
                return Err(Error::Domain(format!("potential frequency must be positive, got {omega:e}")));
            }
            _ => {}
        }
        Ok(Self { potential, duration, lw_lambda, sw_gamma })
    }

    pub fn free(duration: f64, lw_lambda: f64, sw_gamma: f64) -> Result<Self> {
        Self::new(Potential::Free, duration, lw_lambda, sw_gamma)
    }

    pub fn harmonic(omega: f64, duration: f64, lw_lambda: f64, sw_gamma: f64) -> Result<Self> {
        Self::new(Potential::Harmonic { omega }, duration, lw_lambda, sw_gamma)
    }

    pub fn inverted(omega: f64, duration: f64, lw_lambda: f64, sw_gamma: f64) -> Result<Self> {
        Self::new(Potential::Inverted { omega }, duration, lw_lambda, sw_gamma)
    }
}

/// Linear phase-space map: x ↦ a·x + b·p, p ↦ c·x + d·p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PhaseSpaceMap {
    pub const IDENTITY: PhaseSpaceMap = PhaseSpaceMap { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// The classical flow of a segment potential over time `t` for mass `m`.
    pub fn for_potential(potential: Potential, mass_kg: f64, t: f64) -> PhaseSpaceMap {
        match potential {
            Potential::Free => PhaseSpaceMap { a: 1.0, b: t / mass_kg, c: 0.0, d: 1.0 },
            Potential::Harmonic { omega } => {
                let (s, c) = (omega * t).sin_cos();
                PhaseSpaceMap { a: c, b: s / (mass_kg * omega), c: -mass_kg * omega * s, d: c }
            }
            Potential::Inverted { omega } => {
                let th = omega * t;
                let (sh, ch) = (th.sinh(), th.cosh());
                PhaseSpaceMap { a: ch, b: sh / (mass_kg * omega), c: mass_kg * omega * sh, d: ch }
            }
        }
    }

    pub fn det(&self) -> f64 {
        // Kahan difference-of-products; the naive form cancels badly for
        // hyperbolic maps.
        let w = self.b * self.c;
        let e = f64::mul_add(-self.b, self.c, w);
        let f = f64::mul_add(self.a, self.d, -w);
        f + e
    }

    /// `later ∘ self` (apply `self` first).
    pub fn then(&self, later: &PhaseSpaceMap) -> PhaseSpaceMap {
        PhaseSpaceMap {
            a: later.a * self.a + later.b * self.c,
            b: later.a * self.b + later.b * self.d,
            c: later.c * self.a + later.d * self.c,
            d: later.c * self.b + later.d * self.d,
        }
    }
}

/// Accumulated second-moment noise (symmetric 2×2): Σ ← SΣS† + N.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseMatrix {
    pub xx: f64,
    pub xp: f64,
    pub pp: f64,
}

impl NoiseMatrix {
    pub const ZERO: NoiseMatrix = NoiseMatrix { xx: 0.0, xp: 0.0, pp: 0.0 };

    /// Transport through a later linear map: N ↦ B N B†.
    pub fn through(&self, map: &PhaseSpaceMap) -> NoiseMatrix {
        let PhaseSpaceMap { a, b, c, d } = *map;
        NoiseMatrix {
            xx: a * a * self.xx + 2.0 * a * b * self.xp + b * b * self.pp,
            xp: a * c * self.xx + (a * d + b * c) * self.xp + b * d * self.pp,
            pp: c * c * self.xx + 2.0 * c * d * self.xp + d * d * self.pp,
        }
    }

    pub fn add(&self, other: &NoiseMatrix) -> NoiseMatrix {
        NoiseMatrix { xx: self.xx + other.xx, xp: self.xp + other.xp, pp: self.pp + other.pp }
    }
}

/// sinh(u) − u without cancellation for small u.
pub(crate) fn sinh_minus_arg(u: f64) -> f64 {
    if u.abs() < 0.2 {
        let u2 = u * u;
        u * u2 / 6.0 * (1.0 + u2 / 20.0 * (1.0 + u2 / 42.0 * (1.0 + u2 / 72.0)))
    } else {
        u.sinh() - u
    }
}

/// u − sin(u) without cancellation for small u.
fn arg_minus_sin(u: f64) -> f64 {
    if u.abs() < 0.2 {
        let u2 = u * u;
        u * u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)))
    } else {
        u - u.sin()
    }
}

/// Momentum-diffusion noise accumulated over one segment,
/// N(t) = ∫₀ᵗ S(u) diag(0, 2ħ²Λ) S(u)† du in closed form.
pub fn segment_noise(potential: Potential, mass_kg: f64, t: f64, lw_lambda: f64) -> NoiseMatrix {
    if lw_lambda == 0.0 || t == 0.0 {
        return NoiseMatrix::ZERO;
    }
    let d = 2.0 * HBAR * HBAR * lw_lambda;
    let m = mass_kg;
    match potential {
        Potential::Free => NoiseMatrix {
            xx: d * t * t * t / (3.0 * m * m),
            xp: d * t * t / (2.0 * m),
            pp: d * t,
        },
        Potential::Harmonic { omega } => {
            let th = omega * t;
            let s = th.sin();
            NoiseMatrix {
                xx: d * arg_minus_sin(2.0 * th) / (4.0 * m * m * omega.powi(3)),
                xp: d * s * s / (2.0 * m * omega * omega),
                pp: d * (2.0 * th + (2.0 * th).sin()) / (4.0 * omega),
            }
        }
        Potential::Inverted { omega } => {
            let th = omega * t;
            let sh = th.sinh();
            NoiseMatrix {
                xx: d * sinh_minus_arg(2.0 * th) / (4.0 * m * m * omega.powi(3)),
                xp: d * sh * sh / (2.0 * m * omega * omega),
                pp: d * ((2.0 * th).sinh() + 2.0 * th) / (4.0 * omega),
            }
        }
    }
}

/// Determinant of the segment noise matrix in closed form.
///
/// The naive xx·pp − xp² cancels catastrophically for long inverted
/// segments (the hyperbolic quartics cancel analytically); the reduced
/// expressions below are exact.
pub fn segment_noise_det(potential: Potential, mass_kg: f64, t: f64, lw_lambda: f64) -> f64 {
    if lw_lambda == 0.0 || t == 0.0 {
        return 0.0;
    }
    let d = 2.0 * HBAR * HBAR * lw_lambda;
    let m2 = mass_kg * mass_kg;
    match potential {
        Potential::Free => d * d * t.powi(4) / (12.0 * m2),
        Potential::Harmonic { omega } => {
            let th = omega * t;
            // θ² − sin²θ = (θ − sinθ)(θ + sinθ)
            let diff = arg_minus_sin(th) * (th + th.sin());
            d * d * diff / (4.0 * m2 * omega.powi(4))
        }
        Potential::Inverted { omega } => {
            let th = omega * t;
            // sinh²θ − θ² = (sinhθ − θ)(sinhθ + θ)
            let diff = sinh_minus_arg(th) * (th.sinh() + th);
            d * d * diff / (4.0 * m2 * omega.powi(4))
        }
    }
}

fn check_cap(potential: Potential, duration: f64, cap: f64) -> Result<()> {
    if let Potential::Inverted { omega } = potential {
        let wt = omega * duration;
        if wt > cap {
            return Err(Error::CapExceeded(format!(
                "inverted segment has omega*t = {wt:.3} > cap {cap}; exponential growth guard"
            )));
        }
    }
    Ok(())
}

/// Propagate a Gaussian state through one segment using the closed forms,
/// with the default inverted-duration cap.
pub fn propagate(state: &GaussianState, segment: &Segment) -> Result<GaussianState> {
    propagate_with_cap(state, segment, DEFAULT_OMEGA_T_CAP)
}

/// Propagate with a caller-supplied ω·t cap for inverted segments.
pub fn propagate_with_cap(state: &GaussianState, segment: &Segment, cap: f64) -> Result<GaussianState> {
    check_cap(segment.potential, segment.duration, cap)?;
    let m = state.mass_kg();
    let s = PhaseSpaceMap::for_potential(segment.potential, m, segment.duration);
    let n = segment_noise(segment.potential, m, segment.duration, segment.lw_lambda);
    let (v_x, v_p, c) = (state.v_x(), state.v_p(), state.c());
    let PhaseSpaceMap { a, b, c: sc, d } = s;
    // Coherent part A = SΣS†.
    let a_xx = a * a * v_x + 2.0 * a * b * c + b * b * v_p;
    let a_xp = a * sc * v_x + (a * d + b * sc) * c + b * d * v_p;
    let a_pp = sc * sc * v_x + 2.0 * sc * d * c + d * d * v_p;
    // det(A + N) = det(A) + det(N) + (A_xx N_pp + A_pp N_xx − 2 A_xp N_xp),
    // and det(A) equals the incoming product exactly (det S = 1). Updating
    // the carried product additively keeps purity exact under coherent
    // evolution no matter how squeezed the moments are.
    let cross = a_xx * n.pp + a_pp * n.xx - 2.0 * a_xp * n.xp;
    let det_new = state.uncertainty_product()
        + segment_noise_det(segment.potential, m, segment.duration, segment.lw_lambda)
        + cross;
    GaussianState::with_product(m, a_xx + n.xx, a_pp + n.pp, a_xp + n.xp, det_new)
        .map_err(|e| Error::Internal(format!("propagation produced an invalid state: {e}")))
}

/// Coherent-inflation gain factors after a time t_I in the inverted
/// potential, starting from the ground state of the ω₀ trap:
/// v_x ↦ g_x² v_x, v_p ↦ g_p² v_p, 2c ↦ ħ√(g²−1), with g = g_x g_p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiGain {
    pub g: f64,
    pub g_x: f64,
    pub g_p: f64,
}

impl CiGain {
    pub const UNITY: CiGain = CiGain { g: 1.0, g_x: 1.0, g_p: 1.0 };
}

/// Total gain g = √(1 + [(ω_I²+ω₀²)/(2ω_Iω₀)]² sinh²(2 t_I ω_I)) and its
/// position/momentum split from the closed-form inverted-potential flow.
pub fn ci_gain(omega0: f64, omega_i: f64, t_i: f64) -> Result<CiGain> {
    if !(omega0 > 0.0) || !(omega_i > 0.0) {
        return Err(Error::Domain("ci_gain needs positive frequencies".into()));
    }
    if !(t_i >= 0.0) {
        return Err(Error::Domain(format!("inflation time must be >= 0, got {t_i:e}")));
    }
    let th = omega_i * t_i;
    let (sh, ch) = (th.sinh(), th.cosh());
    let g_x = (ch * ch + sh * sh * (omega0 / omega_i).powi(2)).sqrt();
    let g_p = (ch * ch + sh * sh * (omega_i / omega0).powi(2)).sqrt();
    let prefactor = (omega_i * omega_i + omega0 * omega0) / (2.0 * omega_i * omega0);
    let s2 = (2.0 * th).sinh();
    let g = (1.0 + (prefactor * s2).powi(2)).sqrt();
    let split = g_x * g_p;
    if (split - g).abs() > 1e-9 * g {
        return Err(Error::Internal(format!(
            "gain split inconsistent: g_x*g_p = {split:e} vs g = {g:e}"
        )));
    }
    Ok(CiGain { g, g_x, g_p })
}

/// The pure post-inflation state of a trap ground state:
/// (g_x² v_x(0), g_p² v_p(0), ħ√(g²−1)/2).
pub fn post_inflation_state(mass_kg: f64, omega0: f64, gain: &CiGain) -> Result<GaussianState> {
    let ground = GaussianState::ground(mass_kg, omega0)?;
    let c = 0.5 * HBAR * (gain.g * gain.g - 1.0).max(0.0).sqrt();
    // Inflation is unitary: the state is pure by construction.
    GaussianState::with_product(
        mass_kg,
        gain.g_x * gain.g_x * ground.v_x(),
        gain.g_p * gain.g_p * ground.v_p(),
        c,
        0.25 * HBAR * HBAR,
    )
}

/// Invert the gain relations: the (ω_I/ω₀, ω_I t_I) pair that realizes given
/// (g_x, g_p) targets. Exists for any g_x, g_p > 1.
pub fn gain_targets(g_x: f64, g_p: f64) -> Result<(f64, f64)> {
    if !(g_x > 1.0) || !(g_p > 1.0) {
        return Err(Error::Domain("gain targets must both exceed 1".into()));
    }
    let gx2 = g_x * g_x;
    let gp2 = g_p * g_p;
    // sinh²(ω_I t_I) and the frequency ratio from the split equations.
    let s2 = (gx2 - 1.0) * (gp2 - 1.0) / (gx2 + gp2 - 2.0);
    let r2 = s2 / (gx2 - 1.0 - s2);
    let omega_ratio = r2.sqrt();
    let omega_i_t = s2.sqrt().asinh();
    Ok((omega_ratio, omega_i_t))
}

/// The maximum coherent-inflation gain permitted by decoherence during the
/// inverted stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxGain {
    /// g⋆ = ω_I² M/(2ħΛ_I); ∞ when Λ_I = 0.
    pub g_star: f64,
    /// Inflation time at which sinh(2 t_I ω_I) reaches the coherence bound
    /// M ω_I³ ω₀ [ħΛ_I(ω_I²+ω₀²)]⁻¹; the "≪" margin is left to the caller.
    pub t_i_at_bound: f64,
}

pub fn max_coherent_gain(mass_kg: f64, omega0: f64, omega_i: f64, lambda_i: f64) -> Result<MaxGain> {
    if !(mass_kg > 0.0) || !(omega0 > 0.0) || !(omega_i > 0.0) {
        return Err(Error::Domain("max_coherent_gain needs positive mass and frequencies".into()));
    }
    if !(lambda_i >= 0.0) {
        return Err(Error::Domain(format!("lambda_i must be >= 0, got {lambda_i:e}")));
    }
    if lambda_i == 0.0 {
        return Ok(MaxGain { g_star: f64::INFINITY, t_i_at_bound: f64::INFINITY });
    }
    let g_star = omega_i * omega_i * mass_kg / (2.0 * HBAR * lambda_i);
    let sinh_bound =
        mass_kg * omega_i.powi(3) * omega0 / (HBAR * lambda_i * (omega_i * omega_i + omega0 * omega0));
    Ok(MaxGain { g_star, t_i_at_bound: sinh_bound.asinh() / (2.0 * omega_i) })
}

/// The rotate-then-invert momentum-to-position mapping stage: a quarter-of-
/// quarter-period harmonic rotation (t_R = π/(4ω_I)) followed by the inverted
/// potential. For this composite the p(t₀) → x(t) entry is exactly
/// e^(ω_I t)/(√2 M ω_I) with t the time spent in the inverted potential.
pub fn momentum_mapping_segments(
    omega_i: f64,
    inverted_duration: f64,
    lw_lambda: f64,
    sw_gamma: f64,
) -> Result<[Segment; 2]> {
    if !(omega_i > 0.0) {
        return Err(Error::Domain(format!("omega_i must be positive, got {omega_i:e}")));
    }
    Ok([
        Segment::harmonic(omega_i, PI / (4.0 * omega_i), lw_lambda, sw_gamma)?,
        Segment::inverted(omega_i, inverted_duration, lw_lambda, sw_gamma)?,
    ])
}

/// The exact composite map of the momentum-mapping stage.
///
/// Multiplying the rotation and hyperbolic matrices numerically destroys the
/// exponentially small entries (cosh − sinh cancels); the product reduces in
/// closed form to
///
/// ```text
///   [  e^(−ωt)/√2        e^(ωt)/(√2 M ω) ]
///   [ −M ω e^(−ωt)/√2    e^(ωt)/√2       ]
/// ```
///
/// which this constructor evaluates directly.
pub fn momentum_mapping_map(mass_kg: f64, omega_i: f64, t_inverted: f64) -> PhaseSpaceMap {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let grow = (omega_i * t_inverted).exp();
    let decay = (-omega_i * t_inverted).exp();
    PhaseSpaceMap {
        a: decay * inv_sqrt2,
        b: grow * inv_sqrt2 / (mass_kg * omega_i),
        c: -mass_kg * omega_i * decay * inv_sqrt2,
        d: grow * inv_sqrt2,
    }
}
