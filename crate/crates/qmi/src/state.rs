//! Gaussian center-of-mass states and their scalar diagnostics.
//!
//! A zero-mean Gaussian state is fully determined by the second moments
//! v_x = ⟨x̂²⟩, v_p = ⟨p̂²⟩ and the symmetrized cross moment
//! c = ⟨x̂p̂ + p̂x̂⟩/2, constrained by v_x v_p − c² ≥ ħ²/4. Derived scalars:
//! purity 𝒫 = ħ/(2√(v_x v_p − c²)) and coherence length ξ = 𝒫 √(8 v_x),
//! where ξ is the Gaussian decay scale of the position-space off-diagonal
//! ⟨x/2|ρ̂|−x/2⟩ = exp(−x²/ξ²)/√(2π v_x).
//!
//! The uncertainty product v_x v_p − c² is carried alongside the moments.
//! For squeezed or inflated states the naive difference cancels to nothing
//! in f64 (the products grow like g², the difference stays at ħ²/4), while
//! the product evolves additively under every dynamical segment, so the
//! propagator can update it at full precision.

use crate::error::{Error, Result};
use crate::quantities::si::HBAR;

/// Relative slack on the uncertainty product at construction. Closed-form
/// propagation accumulates rounding; hard equality would spuriously reject
/// pure-state evolution.
pub const HEISENBERG_SLACK: f64 = 1e-9;

/// Accurate v_x·v_p − c² via fused multiply-adds (Kahan's algorithm).
pub(crate) fn uncertainty_det(v_x: f64, v_p: f64, c: f64) -> f64 {
    let w = c * c;
    let e = f64::mul_add(-c, c, w);
    let f = f64::mul_add(v_x, v_p, -w);
    f + e
}

/// Tolerance floor reflecting the f64 representation error of the moments
/// themselves: for inflated states the product v_x v_p is only known to
/// ~ε·v_x·v_p, so violations smaller than that cannot be certified.
fn det_float_tolerance(v_x: f64, v_p: f64, c: f64) -> f64 {
    64.0 * f64::EPSILON * (v_x * v_p + c * c)
}

/// Immutable Gaussian second-moment state of a mass M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    mass: f64,
    v_x: f64,
    v_p: f64,
    c: f64,
    det: f64,
}

impl GaussianState {
    /// Validates positivity and the uncertainty relation
    /// v_x v_p − c² ≥ ħ²/4 (within relative slack plus the floating-point
    /// resolution of the moment products).
    pub fn new(mass_kg: f64, v_x: f64, v_p: f64, c: f64) -> Result<Self> {
        let det = uncertainty_det(v_x, v_p, c);
        Self::with_product(mass_kg, v_x, v_p, c, det)
    }

    /// Constructor for callers that know the uncertainty product to better
    /// precision than the moments can express (propagation, analytic pure
    /// states).
    pub(crate) fn with_product(mass_kg: f64, v_x: f64, v_p: f64, c: f64, det: f64) -> Result<Self> {
        if !(mass_kg > 0.0) || !mass_kg.is_finite() {
            return Err(Error::Domain(format!("mass must be positive and finite, got {mass_kg:e}")));
        }
        if !(v_x > 0.0) || !v_x.is_finite() {
            return Err(Error::Domain(format!("v_x must be positive and finite, got {v_x:e}")));
        }
        if !(v_p > 0.0) || !v_p.is_finite() {
            return Err(Error::Domain(format!("v_p must be positive and finite, got {v_p:e}")));
        }
        if !c.is_finite() {
            return Err(Error::Domain(format!("c must be finite, got {c:e}")));
        }
        let floor = 0.25 * HBAR * HBAR * (1.0 - HEISENBERG_SLACK) - det_float_tolerance(v_x, v_p, c);
        if !(det >= floor) {
            return Err(Error::Domain(format!(
                "uncertainty product violated: v_x v_p - c^2 = {det:e} < hbar^2/4 = {:e}",
                0.25 * HBAR * HBAR
            )));
        }
        Ok(Self { mass: mass_kg, v_x, v_p, c, det })
    }

    /// Ground state of a harmonic trap: v_x = ħ/(2Mω₀), v_p = ħMω₀/2, c = 0.
    pub fn ground(mass_kg: f64, trap_omega: f64) -> Result<Self> {
        if !(mass_kg > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass_kg:e}")));
        }
        if !(trap_omega > 0.0) {
            return Err(Error::Domain(format!("trap frequency must be positive, got {trap_omega:e}")));
        }
        let v_x = HBAR / (2.0 * mass_kg * trap_omega);
        let v_p = HBAR * mass_kg * trap_omega / 2.0;
        Self::with_product(mass_kg, v_x, v_p, 0.0, 0.25 * HBAR * HBAR)
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass
    }

    /// ⟨x̂²⟩, m².
    pub fn v_x(&self) -> f64 {
        self.v_x
    }

    /// ⟨p̂²⟩, kg² m² s⁻².
    pub fn v_p(&self) -> f64 {
        self.v_p
    }

    /// ⟨x̂p̂ + p̂x̂⟩/2, kg m² s⁻¹.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// v_x v_p − c², carried at full precision through propagation.
    pub fn uncertainty_product(&self) -> f64 {
        self.det
    }

    /// Purity, coherence length and position spread.
    pub fn diagnostics(&self) -> Result<StateDiagnostics> {
        if self.det <= 0.0 {
            return Err(Error::Internal(format!(
                "uncertainty product non-positive ({:e}); state numerically degenerate",
                self.det
            )));
        }
        let raw_purity = HBAR / (2.0 * self.det.sqrt());
        // Accepted states can give purity a hair above 1 through rounding.
        let tol = det_float_tolerance(self.v_x, self.v_p, self.c) / self.det + HEISENBERG_SLACK;
        if raw_purity > 1.0 + tol {
            return Err(Error::Internal(format!(
                "purity {raw_purity} exceeds 1 beyond numerical slack"
            )));
        }
        let purity = raw_purity.min(1.0);
        Ok(StateDiagnostics {
            purity,
            coherence_length: purity * (8.0 * self.v_x).sqrt(),
            position_stdev: self.v_x.sqrt(),
        })
    }

    /// Speed at which the coherence length grows in free flight, √(8 v_p)/M.
    pub fn coherence_speed(&self) -> f64 {
        (8.0 * self.v_p).sqrt() / self.mass
    }
}

/// Derived scalar diagnostics of a Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    /// tr[ρ̂²] ∈ (0, 1].
    pub purity: f64,
    /// ξ = 𝒫 √(8 v_x), m.
    pub coherence_length: f64,
    /// √v_x, m.
    pub position_stdev: f64,
}
