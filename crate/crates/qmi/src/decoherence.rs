//! Position-localization decoherence (PLD) sources.
//!
//! Every environmental mechanism is reduced to a triple (γ, Λ, λ): the
//! saturated decoherence rate γ (Hz), the localization parameter Λ (Hz/m²)
//! and the saturation distance λ = √(γ/Λ). Spatial coherences ⟨x|ρ̂|x′⟩
//! decay at the Gallis–Fleming rate Γ(x) = γ(1 − exp[−Λx²/γ]), which
//! interpolates between the long-wavelength limit Γ ≈ Λx² (separations well
//! below λ) and the short-wavelength limit Γ ≈ γ (separations beyond λ).

use crate::error::{Error, Result};
use crate::quantities::si::{BOLTZMANN, GRAVITATIONAL_CONSTANT, HBAR, LIGHT_SPEED};
use std::f64::consts::PI;

/// ζ(9), used in the thermal-photon scattering localization constant.
const ZETA_9: f64 = 1.002_008_392_826_082;

/// Provenance of a PLD source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceKind {
    AirScattering,
    BlackbodyScattering,
    BlackbodyEmitAbsorb,
    Vibration,
    Gravity,
    Custom,
}

impl SourceKind {
    /// Stable lowercase identifier used in reports and CSV keys.
    pub fn label(&self) -> &'static str {
        match self {
            SourceKind::AirScattering => "air_scattering",
            SourceKind::BlackbodyScattering => "blackbody_scattering",
            SourceKind::BlackbodyEmitAbsorb => "blackbody_emit_absorb",
            SourceKind::Vibration => "vibration",
            SourceKind::Gravity => "gravity",
            SourceKind::Custom => "custom",
        }
    }
}

/// One decoherence channel as a (γ, Λ, λ) triple.
///
/// Non-saturating channels (vibration: Γ = Λx² at every separation) carry
/// `saturation_length = ∞` rather than a fake large number, so regime
/// classification stays exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PldSource {
    kind: SourceKind,
    gamma: f64,
    lambda_loc: f64,
    saturation_length: f64,
}

impl PldSource {
    fn build(kind: SourceKind, gamma: f64, lambda_loc: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("decoherence rate must be >= 0 and finite, got {gamma:e}")));
        }
        if !(lambda_loc >= 0.0) || !lambda_loc.is_finite() {
            return Err(Error::Domain(format!(
                "localization parameter must be >= 0 and finite, got {lambda_loc:e}"
            )));
        }
        let saturation_length = if gamma > 0.0 && lambda_loc > 0.0 {
            (gamma / lambda_loc).sqrt()
        } else {
            // γ = 0 (non-saturating quadratic growth) or Λ = 0 (no spatial
            // localization at all): either way the exponential never bites.
            f64::INFINITY
        };
        Ok(Self { kind, gamma, lambda_loc, saturation_length })
    }

    /// A user-specified (γ, Λ) pair.
    pub fn custom(gamma: f64, lambda_loc: f64) -> Result<Self> {
        Self::build(SourceKind::Custom, gamma, lambda_loc)
    }

    /// Long-wavelength-only channel: Λ given, γ = 0, λ = ∞.
    pub fn lw_only(kind: SourceKind, lambda_loc: f64) -> Result<Self> {
        Self::build(kind, 0.0, lambda_loc)
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    /// Saturated rate γ, Hz.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Localization parameter Λ, Hz/m².
    pub fn lambda_loc(&self) -> f64 {
        self.lambda_loc
    }

    /// Saturation distance λ = √(γ/Λ), m; ∞ for non-saturating channels.
    pub fn saturation_length(&self) -> f64 {
        self.saturation_length
    }

    pub fn is_lw_only(&self) -> bool {
        self.saturation_length.is_infinite() && self.lambda_loc > 0.0
    }

    /// Decoherence function Γ(x) = γ(1 − exp[−Λx²/γ]); Λx² when γ = 0.
    pub fn decoherence_function(&self, separation_m: f64) -> f64 {
        let x2 = separation_m * separation_m;
        if self.lambda_loc == 0.0 {
            return 0.0;
        }
        if self.gamma == 0.0 {
            return self.lambda_loc * x2;
        }
        // -expm1 keeps the long-wavelength limit exact where the naive
        // 1 - exp(...) would lose all digits.
        -self.gamma * (-self.lambda_loc * x2 / self.gamma).exp_m1()
    }
}

/// Environmental conditions entering the source constructors.
///
/// `chi_real`/`chi_imag` are Re/Im of [ε(ω_T) − 1]/[ε(ω_T) + 2] at the
/// thermal frequency; they are material inputs, not computed here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    temperature_k: f64,
    pressure_pa: f64,
    gas_mass_kg: f64,
    chi_real: f64,
    chi_imag: f64,
    vibration_psd_m2_per_hz: f64,
}

/// Mean molecular mass of air, amu.
pub const AIR_MASS_AMU: f64 = 28.97;

impl Environment {
    pub fn new(
        temperature_k: f64,
        pressure_pa: f64,
        gas_mass_kg: f64,
        chi_real: f64,
        chi_imag: f64,
        vibration_psd_m2_per_hz: f64,
    ) -> Result<Self> {
        if !(temperature_k > 0.0) {
            return Err(Error::Domain(format!("temperature must be positive, got {temperature_k:e}")));
        }
        if !(pressure_pa >= 0.0) {
            return Err(Error::Domain(format!("pressure must be >= 0, got {pressure_pa:e}")));
        }
        if !(gas_mass_kg > 0.0) {
            return Err(Error::Domain(format!("gas mass must be positive, got {gas_mass_kg:e}")));
        }
        if !chi_real.is_finite() {
            return Err(Error::Domain("chi_real must be finite".into()));
        }
        if !(chi_imag >= 0.0) {
            return Err(Error::Domain(format!("chi_imag must be >= 0, got {chi_imag:e}")));
        }
        if !(vibration_psd_m2_per_hz >= 0.0) {
            return Err(Error::Domain(format!(
                "vibration PSD must be >= 0, got {vibration_psd_m2_per_hz:e}"
            )));
        }
        Ok(Self {
            temperature_k,
            pressure_pa,
            gas_mass_kg,
            chi_real,
            chi_imag,
            vibration_psd_m2_per_hz,
        })
    }

    pub fn temperature_k(&self) -> f64 {
        self.temperature_k
    }

    pub fn pressure_pa(&self) -> f64 {
        self.pressure_pa
    }

    pub fn gas_mass_kg(&self) -> f64 {
        self.gas_mass_kg
    }

    pub fn chi_real(&self) -> f64 {
        self.chi_real
    }

    pub fn chi_imag(&self) -> f64 {
        self.chi_imag
    }

    pub fn vibration_psd_m2_per_hz(&self) -> f64 {
        self.vibration_psd_m2_per_hz
    }
}

/// Maxwell–Boltzmann mean speed √(8 k_B T / (π m)).
pub fn mean_gas_speed(temperature_k: f64, gas_mass_kg: f64) -> f64 {
    (8.0 * BOLTZMANN * temperature_k / (PI * gas_mass_kg)).sqrt()
}

/// PLD from scattering of residual gas molecules.
///
/// Saturation distance is the thermal de Broglie wavelength
/// λ = 2πħ/√(2π m_a k_B T) (≈ 0.32 nm/√T[K] for air); the saturated rate is
/// γ = 8π√(2π) P R²/(v̄ m_a) with v̄ the Maxwell–Boltzmann mean speed,
/// equivalently γ = 4π² P R²/√(m_a k_B T). Λ = γ/λ².
pub fn air_scattering(env: &Environment, radius_m: f64) -> Result<PldSource> {
    if !(radius_m > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {radius_m:e}")));
    }
    let t = env.temperature_k;
    let m_a = env.gas_mass_kg;
    let de_broglie = 2.0 * PI * HBAR / (2.0 * PI * m_a * BOLTZMANN * t).sqrt();
    if env.pressure_pa == 0.0 {
        return PldSource::build(SourceKind::AirScattering, 0.0, 0.0);
    }
    let v_mean = mean_gas_speed(t, m_a);
    let gamma = 8.0 * PI * (2.0 * PI).sqrt() * env.pressure_pa * radius_m * radius_m / (v_mean * m_a);
    let lambda_loc = gamma / (de_broglie * de_broglie);
    PldSource::build(SourceKind::AirScattering, gamma, lambda_loc)
}

/// Thermal-photon wavelength scale λ = π^(2/3) ħc/(k_B T) (≈ 5 mm/T[K]).
fn blackbody_wavelength(temperature_k: f64) -> f64 {
    PI.powf(2.0 / 3.0) * HBAR * LIGHT_SPEED / (BOLTZMANN * temperature_k)
}

/// PLD from Rayleigh scattering of black-body photons:
/// Λ = 8!·8·ζ(9)·c R⁶ [k_B T/(ħc)]⁹ χ_R²/(9π), λ the thermal wavelength,
/// γ = Λλ².
pub fn blackbody_scattering(env: &Environment, radius_m: f64) -> Result<PldSource> {
    if !(radius_m > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {radius_m:e}")));
    }
    let kt_over_hbar_c = BOLTZMANN * env.temperature_k / (HBAR * LIGHT_SPEED);
    let fact8 = 40_320.0; // 8!
    let lambda_loc = fact8 * 8.0 * ZETA_9 * LIGHT_SPEED * radius_m.powi(6) * kt_over_hbar_c.powi(9)
        * env.chi_real
        * env.chi_real
        / (9.0 * PI);
    let wavelength = blackbody_wavelength(env.temperature_k);
    let gamma = lambda_loc * wavelength * wavelength;
    PldSource::build(SourceKind::BlackbodyScattering, gamma, lambda_loc)
}

/// PLD from emission and absorption of black-body photons (bulk assumed in
/// equilibrium with the environment): Λ = 16π⁵ c R³ [k_B T/(ħc)]⁶ χ_I/189,
/// λ the thermal wavelength, γ = Λλ².
pub fn blackbody_emit_absorb(env: &Environment, radius_m: f64) -> Result<PldSource> {
    if !(radius_m > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {radius_m:e}")));
    }
    let kt_over_hbar_c = BOLTZMANN * env.temperature_k / (HBAR * LIGHT_SPEED);
    let lambda_loc =
        16.0 * PI.powi(5) * LIGHT_SPEED * radius_m.powi(3) * kt_over_hbar_c.powi(6) * env.chi_imag / 189.0;
    let wavelength = blackbody_wavelength(env.temperature_k);
    let gamma = lambda_loc * wavelength * wavelength;
    PldSource::build(SourceKind::BlackbodyEmitAbsorb, gamma, lambda_loc)
}

/// PLD from white-noise vibrations of the potential center at the active
/// trap frequency: Λ_v = M² ω⁴ S_xx(ω)/(2ħ²). Purely long-wavelength.
pub fn vibration_source(mass_kg: f64, omega: f64, psd_m2_per_hz: f64) -> Result<PldSource> {
    if !(mass_kg >= 0.0) || !(omega >= 0.0) || !(psd_m2_per_hz >= 0.0) {
        return Err(Error::Domain("vibration source inputs must be >= 0".into()));
    }
    let lambda_loc = mass_kg * mass_kg * omega.powi(4) * psd_m2_per_hz / (2.0 * HBAR * HBAR);
    PldSource::build(SourceKind::Vibration, 0.0, lambda_loc)
}

/// Gravitationally-induced decoherence for a homogeneous sphere
/// (Diósi–Penrose): Λ_G = GM²/(2ħR³), λ_G = R, γ = Λ_G R².
pub fn gravity_source(mass_kg: f64, radius_m: f64) -> Result<PldSource> {
    if !(mass_kg > 0.0) || !(radius_m > 0.0) {
        return Err(Error::Domain("gravity source needs positive mass and radius".into()));
    }
    let lambda_loc = GRAVITATIONAL_CONSTANT * mass_kg * mass_kg / (2.0 * HBAR * radius_m.powi(3));
    let gamma = lambda_loc * radius_m * radius_m;
    PldSource::build(SourceKind::Gravity, gamma, lambda_loc)
}

/// Which limit of Γ(x) a source is in at a given coherence scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// ξ ≥ λ: the saturated rate γ applies.
    ShortWavelength,
    /// ξ < λ: the quadratic Λx² form applies.
    LongWavelength,
}

/// Per-source classification entry of [`combine`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceClassification {
    pub kind: SourceKind,
    pub gamma: f64,
    pub lambda_loc: f64,
    pub saturation_length: f64,
    pub regime: Regime,
    /// ξ/λ; `None` for non-saturating (λ = ∞) channels.
    pub coherence_ratio: Option<f64>,
    /// True when ξ/λ ∈ [0.1, 10]: the binary classification is marginal.
    pub borderline: bool,
}

/// Effective decoherence parameters after partitioning a source list at a
/// coherence scale ξ.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePld {
    /// Σγ over short-wavelength-classified sources, Hz.
    pub gamma_eff: f64,
    /// ΣΛ over long-wavelength-classified sources, Hz/m².
    pub lambda_eff: f64,
    pub classifications: Vec<SourceClassification>,
}

/// Partition sources into short-wavelength (ξ ≥ λ, contribute γ) and
/// long-wavelength (ξ < λ, contribute Λ) sets at coherence scale ξ.
///
/// The hard threshold mirrors the binary regime treatment; the report
/// exposes per-source ξ/λ ratios so marginal cases are visible.
pub fn combine(sources: &[PldSource], coherence_scale_m: f64) -> Result<EffectivePld> {
    if !(coherence_scale_m > 0.0) {
        return Err(Error::Domain(format!(
            "coherence scale must be positive, got {coherence_scale_m:e}"
        )));
    }
    let mut gamma_eff = 0.0;
    let mut lambda_eff = 0.0;
    let mut classifications = Vec::with_capacity(sources.len());
    for s in sources {
        let (regime, ratio) = if s.saturation_length.is_infinite() {
            (Regime::LongWavelength, None)
        } else if coherence_scale_m >= s.saturation_length {
            (Regime::ShortWavelength, Some(coherence_scale_m / s.saturation_length))
        } else {
            (Regime::LongWavelength, Some(coherence_scale_m / s.saturation_length))
        };
        match regime {
            Regime::ShortWavelength => gamma_eff += s.gamma,
            Regime::LongWavelength => lambda_eff += s.lambda_loc,
        }
        classifications.push(SourceClassification {
            kind: s.kind,
            gamma: s.gamma,
            lambda_loc: s.lambda_loc,
            saturation_length: s.saturation_length,
            regime,
            coherence_ratio: ratio,
            borderline: ratio.map(|r| (0.1..=10.0).contains(&r)).unwrap_or(false),
        });
    }
    Ok(EffectivePld { gamma_eff, lambda_eff, classifications })
}
