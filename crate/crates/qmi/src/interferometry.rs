//! Double-slit cat states, analytic interference patterns under linear
//! phase-space maps, decoherence blurring, and fringe metrics.
//!
//! The post-slit state is ⟨x|ψ⟩ = 𝒩[φ(x−d/2) + φ(x+d/2)] with
//! φ(x) = exp[−x²/(4σ²)]. Through any linear symplectic map
//! (x, p) ↦ (a·x + b·p, ...) each Gaussian component evolves in closed form,
//! so the position density needs no grid propagation:
//!
//! ```text
//!   P(x) = C·(exp(env+2w) + exp(env−2w) + 2·exp(env)·cos(2u))
//! ```
//!
//! two displaced packets plus an interference term, with env, u, w quadratic
//! and linear forms in x coming from the quadratic-propagator integral. The
//! long-wavelength decoherence accumulated up to detection enters as a
//! Gaussian convolution of the ideal density with kernel
//! exp(−y²/σ_Λ²)/(σ_Λ√π), where σ_Λ² is twice the position variance added by
//! the momentum diffusion.

use crate::dynamics::{sinh_minus_arg, PhaseSpaceMap};
use crate::error::{Error, Result};
use crate::quantities::si::HBAR;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Hard floor on fringe sampling: patterns with fewer grid points per fringe
/// period are rejected.
pub const MIN_SAMPLES_PER_FRINGE: f64 = 16.0;

/// Default grid length.
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// The symmetric two-packet state prepared by the double slit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatState {
    separation: f64,
    width: f64,
    mass: f64,
    narrow: bool,
}

impl CatState {
    /// Requires 0 < σ < d/2 (hard); σ ≤ d/4 is flagged via [`Self::is_narrow`].
    pub fn new(separation_m: f64, width_m: f64, mass_kg: f64) -> Result<Self> {
        if !(separation_m > 0.0) {
            return Err(Error::Domain(format!("slit separation must be positive, got {separation_m:e}")));
        }
        if !(width_m > 0.0) {
            return Err(Error::Domain(format!("slit width must be positive, got {width_m:e}")));
        }
        if !(mass_kg > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass_kg:e}")));
        }
        if width_m >= separation_m / 2.0 {
            return Err(Error::Domain(format!(
                "slit width {width_m:e} must stay below half the separation {separation_m:e}"
            )));
        }
        Ok(Self {
            separation: separation_m,
            width: width_m,
            mass: mass_kg,
            narrow: width_m <= separation_m / 4.0,
        })
    }

    /// Default slit width d/10.
    pub fn with_default_width(separation_m: f64, mass_kg: f64) -> Result<Self> {
        Self::new(separation_m, separation_m / 10.0, mass_kg)
    }

    pub fn separation_m(&self) -> f64 {
        self.separation
    }

    pub fn width_m(&self) -> f64 {
        self.width
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass
    }

    /// False for marginal slit widths d/4 < σ < d/2, where the two-packet
    /// overlap is no longer negligible.
    pub fn is_narrow(&self) -> bool {
        self.narrow
    }
}

/// Which expansion produced a pattern, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionKind {
    FreeExpansion,
    CiExpansion,
}

impl EvolutionKind {
    pub fn label(&self) -> &'static str {
        match self {
            EvolutionKind::FreeExpansion => "free_expansion",
            EvolutionKind::CiExpansion => "ci_expansion",
        }
    }
}

/// Sampling request for pattern synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Number of grid points (default 4096).
    pub points: usize,
    /// Override of the symmetric half-width; `None` auto-sizes to
    /// 5·(envelope scale) + 3·(expected blur).
    pub half_width: Option<f64>,
    /// Expected blur scale folded into the auto-sized window.
    pub blur_hint: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { points: DEFAULT_GRID_POINTS, half_width: None, blur_hint: 0.0 }
    }
}

impl GridSpec {
    pub fn with_blur_hint(blur_hint: f64) -> Self {
        Self { blur_hint, ..Self::default() }
    }
}

/// A sampled position probability density with fringe metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FringePattern {
    x0: f64,
    dx: f64,
    density: Vec<f64>,
    /// Ideal fringe period 2πħ|b|/d; ∞ when the map has no p → x transfer.
    pub fringe_separation: f64,
    /// Gaussian blur kernel scale already applied to the samples.
    pub blur_scale: f64,
    /// Michelson contrast over the central window, when measured.
    pub visibility: Option<f64>,
    pub evolution: EvolutionKind,
}

impl FringePattern {
    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Full grid extent (width of the sampled window).
    pub fn extent(&self) -> f64 {
        self.dx * (self.density.len() - 1) as f64
    }

    /// Trapezoid integral of the sampled density.
    pub fn integral(&self) -> f64 {
        if self.density.len() < 2 {
            return 0.0;
        }
        let interior: f64 = self.density[1..self.density.len() - 1].iter().sum();
        (interior + 0.5 * (self.density[0] + self.density[self.density.len() - 1])) * self.dx
    }

    pub fn peak(&self) -> f64 {
        self.density.iter().copied().fold(0.0, f64::max)
    }
}

/// Closed-form evaluator for a cat state pushed through a linear map.
///
/// Public so quadrature oracles and the pipeline can evaluate the continuous
/// density at arbitrary positions, not just on the emitted grid.
#[derive(Debug, Clone, Copy)]
pub struct PatternSynthesizer {
    cat: CatState,
    map: PhaseSpaceMap,
    /// None for maps with b = 0 (pure position rescaling).
    forms: Option<QuadraticForms>,
}

/// P(x) = c0·(e^(env+2w) + e^(env−2w) + 2 e^env cos 2u) with
/// env = e0 + e2·x², u = u1·x, w = w1·x.
#[derive(Debug, Clone, Copy)]
struct QuadraticForms {
    c0: f64,
    e0: f64,
    e2: f64,
    u1: f64,
    w1: f64,
}

impl PatternSynthesizer {
    pub fn new(cat: &CatState, map: &PhaseSpaceMap) -> Result<Self> {
        let det = map.det();
        if (det - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "phase-space map must be symplectic: det = {det} deviates from 1 beyond 1e-9"
            )));
        }
        let sigma2 = cat.width * cat.width;
        let overlap = (-cat.separation * cat.separation / (8.0 * sigma2)).exp();
        let forms = if map.b == 0.0 {
            None
        } else {
            let hb = HBAR * map.b;
            // Quadratic-propagator Gaussian integral per slit component:
            //   A = 1/(4σ²) − i a/(2ħb),  B±(x) = ±β − iχx,
            //   β = d/(4σ²), χ = 1/(ħb), component exponent B²/(4A).
            // The shared real part env(x) and the conjugate pair ±(u + i w)
            // give the three-term closed form in the module docs.
            let a_cplx = Complex64::new(1.0 / (4.0 * sigma2), -map.a / (2.0 * hb));
            let inv_a = a_cplx.inv();
            let beta = cat.separation / (4.0 * sigma2);
            let chi = 1.0 / hb;
            let norm2 = 1.0 / (2.0 * cat.width * (2.0 * PI).sqrt() * (1.0 + overlap));
            let c0 = norm2 / (2.0 * HBAR * map.b.abs() * a_cplx.norm());
            // The packet-overlap factor e^(−d²/(8σ²)) underflows for narrow
            // slits; keep its logarithm fused into the envelope exponent,
            // where it cancels against the +β²·Re(1/A)/2 term (e0 ≤ 0).
            let log_overlap = -cat.separation * cat.separation / (8.0 * sigma2);
            Some(QuadraticForms {
                c0,
                e0: beta * beta * inv_a.re / 2.0 + log_overlap,
                e2: -chi * chi * inv_a.re / 2.0,
                u1: beta * chi * inv_a.re / 2.0,
                w1: beta * chi * inv_a.im / 2.0,
            })
        };
        Ok(Self { cat: *cat, map: *map, forms })
    }

    pub fn map(&self) -> &PhaseSpaceMap {
        &self.map
    }

    /// Ideal fringe period of this map, 2πħ|b|/d (∞ for b = 0).
    pub fn fringe_separation(&self) -> f64 {
        if self.map.b == 0.0 {
            f64::INFINITY
        } else {
            2.0 * PI * HBAR * self.map.b.abs() / self.cat.separation
        }
    }

    /// Length scale containing the evolved pattern: displaced packet centers
    /// plus the evolved single-packet spread.
    pub fn envelope_scale(&self) -> f64 {
        let sigma2 = self.cat.width * self.cat.width;
        let spread =
            (self.map.a * self.map.a * sigma2 + self.map.b * self.map.b * HBAR * HBAR / (4.0 * sigma2)).sqrt();
        self.map.a.abs() * self.cat.separation / 2.0 + spread
    }

    /// Continuous position density at x.
    pub fn density_at(&self, x: f64) -> f64 {
        match &self.forms {
            Some(f) => {
                let env = f.e0 + f.e2 * x * x;
                let u = f.u1 * x;
                let w = f.w1 * x;
                let humps = (env + 2.0 * w).exp() + (env - 2.0 * w).exp();
                let cross = 2.0 * env.exp() * (2.0 * u).cos();
                (f.c0 * (humps + cross)).max(0.0)
            }
            None => {
                // Pure rescaling x ↦ a·x: P(x) = P₀(x/a)/|a|.
                let a = self.map.a;
                let x0 = x / a;
                let sigma2 = self.cat.width * self.cat.width;
                let overlap = (-self.cat.separation * self.cat.separation / (8.0 * sigma2)).exp();
                let norm2 = 1.0 / (2.0 * self.cat.width * (2.0 * PI).sqrt() * (1.0 + overlap));
                let phi_plus = (-(x0 - self.cat.separation / 2.0).powi(2) / (4.0 * sigma2)).exp();
                let phi_minus = (-(x0 + self.cat.separation / 2.0).powi(2) / (4.0 * sigma2)).exp();
                norm2 * (phi_plus + phi_minus).powi(2) / a.abs()
            }
        }
    }
}

/// Analytic interference density of a cat state pushed through a linear
/// symplectic map, sampled on a uniform grid.
///
/// Fails when the grid resolves a fringe period with fewer than
/// [`MIN_SAMPLES_PER_FRINGE`] samples, or when the window truncates more
/// than 1% of the probability mass.
pub fn unblurred_pattern(
    cat: &CatState,
    map: &PhaseSpaceMap,
    grid: &GridSpec,
    evolution: EvolutionKind,
) -> Result<FringePattern> {
    if grid.points < 32 {
        return Err(Error::Resolution(format!("grid needs at least 32 points, got {}", grid.points)));
    }
    let synth = PatternSynthesizer::new(cat, map)?;
    let half = match grid.half_width {
        Some(h) if h > 0.0 => h,
        Some(h) => return Err(Error::Domain(format!("grid half-width must be positive, got {h:e}"))),
        None => 5.0 * synth.envelope_scale() + 3.0 * grid.blur_hint.max(0.0),
    };
    let n = grid.points;
    let dx = 2.0 * half / (n - 1) as f64;
    let x_f = synth.fringe_separation();
    if x_f.is_finite() && x_f / dx < MIN_SAMPLES_PER_FRINGE {
        return Err(Error::Resolution(format!(
            "grid too coarse: {:.1} samples per fringe of {x_f:e} m (floor {MIN_SAMPLES_PER_FRINGE}); \
             increase points or shrink the window",
            x_f / dx
        )));
    }
    let x0 = -half;
    let density: Vec<f64> = (0..n).map(|i| synth.density_at(x0 + dx * i as f64)).collect();
    let pattern = FringePattern {
        x0,
        dx,
        density,
        fringe_separation: x_f,
        blur_scale: 0.0,
        visibility: None,
        evolution,
    };
    let integral = pattern.integral();
    if !(0.99..=1.0 + 1e-9).contains(&integral) {
        return Err(Error::Resolution(format!(
            "grid window truncates the pattern: integral = {integral} outside [0.99, 1]"
        )));
    }
    Ok(pattern)
}

/// Convenience: free expansion for a time t.
pub fn free_pattern(cat: &CatState, t: f64, grid: &GridSpec) -> Result<FringePattern> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t:e}")));
    }
    let map = PhaseSpaceMap { a: 1.0, b: t / cat.mass_kg(), c: 0.0, d: 1.0 };
    unblurred_pattern(cat, &map, grid, EvolutionKind::FreeExpansion)
}

/// Gaussian blur of a sampled pattern with kernel exp(−y²/σ²)/(σ√π).
///
/// The discrete kernel is renormalized to unit mass, so the sampled
/// probability is conserved exactly up to window truncation.
pub fn blurred_pattern(pattern: &FringePattern, sigma_blur: f64) -> Result<FringePattern> {
    if !(sigma_blur >= 0.0) || !sigma_blur.is_finite() {
        return Err(Error::Domain(format!("blur scale must be >= 0 and finite, got {sigma_blur:e}")));
    }
    if sigma_blur == 0.0 {
        return Ok(pattern.clone());
    }
    if sigma_blur > pattern.extent() / 6.0 {
        return Err(Error::Domain(format!(
            "blur scale {sigma_blur:e} exceeds a sixth of the grid extent {:e}",
            pattern.extent()
        )));
    }
    let dx = pattern.dx;
    let reach = (6.0 * sigma_blur / dx).ceil() as usize;
    let mut weights = Vec::with_capacity(2 * reach + 1);
    for j in -(reach as i64)..=reach as i64 {
        let y = j as f64 * dx;
        weights.push((-y * y / (sigma_blur * sigma_blur)).exp());
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let n = pattern.density.len();
    let mut density = vec![0.0; n];
    for (i, out) in density.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let j = i as i64 + k as i64 - reach as i64;
            if j >= 0 && (j as usize) < n {
                acc += w * pattern.density[j as usize];
            }
        }
        *out = acc;
    }
    Ok(FringePattern {
        x0: pattern.x0,
        dx,
        density,
        fringe_separation: pattern.fringe_separation,
        blur_scale: (pattern.blur_scale * pattern.blur_scale + sigma_blur * sigma_blur).sqrt(),
        visibility: None,
        evolution: pattern.evolution,
    })
}

/// Blur scale accumulated in free expansion: σ_Λ(t) = √(4ħ²Λt³/(3M²)).
pub fn free_blur_scale(mass_kg: f64, lambda: f64, t: f64) -> Result<f64> {
    if !(mass_kg > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass_kg:e}")));
    }
    if !(lambda >= 0.0) || !(t >= 0.0) {
        return Err(Error::Domain("lambda and t must be >= 0".into()));
    }
    Ok((4.0 * HBAR * HBAR * lambda * t.powi(3) / (3.0 * mass_kg * mass_kg)).sqrt())
}

/// Blur scale accumulated during inverted-potential expansion:
/// σ_Λ(t) = √(ħ²Λ_I/(M²ω_I³)·[sinh(2ω_I t) − 2ω_I t]).
pub fn ci_blur_scale(mass_kg: f64, lambda_i: f64, omega_i: f64, t: f64, cap: f64) -> Result<f64> {
    if !(mass_kg > 0.0) || !(omega_i > 0.0) {
        return Err(Error::Domain("mass and omega_i must be positive".into()));
    }
    if !(lambda_i >= 0.0) || !(t >= 0.0) {
        return Err(Error::Domain("lambda_i and t must be >= 0".into()));
    }
    if omega_i * t > cap {
        return Err(Error::CapExceeded(format!(
            "omega_i * t = {:.3} > cap {cap} in ci_blur_scale",
            omega_i * t
        )));
    }
    let bracket = sinh_minus_arg(2.0 * omega_i * t);
    Ok((HBAR * HBAR * lambda_i / (mass_kg * mass_kg * omega_i.powi(3)) * bracket).sqrt())
}

/// Fringe separation under inflated expansion:
/// x_f(t) = e^(ω_I t)·2πħ/(M d ω_I).
pub fn ci_fringe_separation(mass_kg: f64, separation_m: f64, omega_i: f64, t: f64, cap: f64) -> Result<f64> {
    if !(mass_kg > 0.0) || !(separation_m > 0.0) || !(omega_i > 0.0) {
        return Err(Error::Domain("mass, separation and omega_i must be positive".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t:e}")));
    }
    if omega_i * t > cap {
        return Err(Error::CapExceeded(format!(
            "omega_i * t = {:.3} > cap {cap} in ci_fringe_separation",
            omega_i * t
        )));
    }
    Ok((omega_i * t).exp() * 2.0 * PI * HBAR / (mass_kg * separation_m * omega_i))
}

/// Localization ceiling for visible inflated fringes: fringes survive when
/// Λ_I stays well below 8π²ω_I/d².
pub fn ci_visibility_lambda_ceiling(omega_i: f64, separation_m: f64) -> f64 {
    8.0 * PI * PI * omega_i / (separation_m * separation_m)
}

/// A refined pattern extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

fn refine(pattern: &FringePattern, i: usize) -> Extremum {
    let (pm, p0, pp) = (pattern.density[i - 1], pattern.density[i], pattern.density[i + 1]);
    let denom = pm - 2.0 * p0 + pp;
    if denom == 0.0 {
        return Extremum { x: pattern.x_at(i), value: p0 };
    }
    let delta = 0.5 * (pm - pp) / denom;
    Extremum { x: pattern.x_at(i) + delta * pattern.dx, value: p0 - 0.25 * (pm - pp) * delta }
}

/// Local maxima of the sampled density inside |x| ≤ window/2, positions and
/// values refined by parabolic interpolation.
pub fn fringe_maxima(pattern: &FringePattern, window: f64) -> Vec<Extremum> {
    let mut out = Vec::new();
    for i in 1..pattern.density.len() - 1 {
        if pattern.x_at(i).abs() > window / 2.0 {
            continue;
        }
        if pattern.density[i] > pattern.density[i - 1] && pattern.density[i] >= pattern.density[i + 1] {
            out.push(refine(pattern, i));
        }
    }
    out
}

fn fringe_minima(pattern: &FringePattern, window: f64) -> Vec<Extremum> {
    let mut out = Vec::new();
    for i in 1..pattern.density.len() - 1 {
        if pattern.x_at(i).abs() > window / 2.0 {
            continue;
        }
        if pattern.density[i] < pattern.density[i - 1] && pattern.density[i] <= pattern.density[i + 1] {
            out.push(refine(pattern, i));
        }
    }
    out
}

/// Michelson contrast (P_max − P_min)/(P_max + P_min) over the central
/// window, from parabolic sub-grid refinement of the extrema. The window
/// defaults to five fringe periods and must cover at least three.
pub fn visibility(pattern: &FringePattern, window: Option<f64>) -> Result<f64> {
    let x_f = pattern.fringe_separation;
    let window = match window {
        Some(w) => {
            if x_f.is_finite() && w < 3.0 * x_f {
                return Err(Error::Domain(format!(
                    "visibility window {w:e} covers fewer than 3 fringe periods of {x_f:e}"
                )));
            }
            w
        }
        None => {
            if !x_f.is_finite() {
                return Err(Error::UndefinedVisibility(
                    "pattern has no finite fringe separation (no momentum transfer in the map)".into(),
                ));
            }
            5.0 * x_f
        }
    };
    let window = window.min(pattern.extent());
    let maxima = fringe_maxima(pattern, window);
    if maxima.len() < 2 {
        return Err(Error::UndefinedVisibility(format!(
            "{} maxima found in the central window; need at least 2",
            maxima.len()
        )));
    }
    let left = maxima.iter().map(|e| e.x).fold(f64::INFINITY, f64::min);
    let right = maxima.iter().map(|e| e.x).fold(f64::NEG_INFINITY, f64::max);
    let minima = fringe_minima(pattern, window);
    let mut p_min = f64::INFINITY;
    for e in minima.iter().filter(|e| e.x > left && e.x < right) {
        p_min = p_min.min(e.value);
    }
    if !p_min.is_finite() {
        return Err(Error::UndefinedVisibility("no minima between the outermost maxima".into()));
    }
    let p_max = maxima.iter().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max);
    if p_max + p_min <= 0.0 {
        return Err(Error::UndefinedVisibility("degenerate extrema".into()));
    }
    Ok(((p_max - p_min) / (p_max + p_min)).clamp(0.0, 1.0))
}

/// Compute and store the Michelson visibility on the pattern, mapping an
/// undefined contrast (fringes fully erased) to zero.
pub fn with_measured_visibility(mut pattern: FringePattern) -> FringePattern {
    pattern.visibility = match visibility(&pattern, None) {
        Ok(v) => Some(v),
        Err(Error::UndefinedVisibility(_)) => Some(0.0),
        Err(_) => None,
    };
    pattern
}
