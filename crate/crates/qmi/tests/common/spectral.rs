//! Grid-based oracles for the interference patterns:
//!
//! * a split-free spectral propagator for the coherent двух-slit density
//!   (sample ψ₀, FFT, multiply the kinetic phase, inverse FFT, |ψ|²), and
//! * an exact-characteristics solver for the free master equation with
//!   momentum diffusion, working on the Fourier transform of the sampled
//!   density matrix: P̂(k, t) = ρ̂₀(k, −ħkt/M)·exp(−Λħ²k²t³/(3M²)).

use num_complex::Complex64;
use qmi::interferometry::CatState;
use qmi::quantities::si::HBAR;
use std::f64::consts::PI;

/// In-place radix-2 Cooley–Tukey FFT (n must be a power of two).
pub fn fft(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    // Bit reversal.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let wlen = Complex64::from_polar(1.0, ang);
        let mut i = 0;
        while i < n {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = data[i + k];
                let v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
            i += len;
        }
        len <<= 1;
    }
    if inverse {
        let scale = 1.0 / n as f64;
        for x in data.iter_mut() {
            *x *= scale;
        }
    }
}

/// Unnormalized cat wavefunction.
fn cat_psi(cat: &CatState, x: f64) -> f64 {
    let s2 = cat.width_m() * cat.width_m();
    (-(x - cat.separation_m() / 2.0).powi(2) / (4.0 * s2)).exp()
        + (-(x + cat.separation_m() / 2.0).powi(2) / (4.0 * s2)).exp()
}

/// Coherent free evolution of the sampled cat via the spectral propagator.
/// Returns the probability density at the grid points x_i = x0 + i·dx,
/// i < n, normalized with the exact (whole-line) cat norm so tails are
/// treated identically to the analytic path.
pub fn free_spectral_density(cat: &CatState, t: f64, x0: f64, dx: f64, n: usize) -> Vec<f64> {
    assert!(n.is_power_of_two());
    let sigma = cat.width_m();
    let overlap = (-cat.separation_m() * cat.separation_m() / (8.0 * sigma * sigma)).exp();
    let norm = 1.0 / (2.0 * sigma * (2.0 * PI).sqrt() * (1.0 + overlap)).sqrt();
    let mut psi: Vec<Complex64> =
        (0..n).map(|i| Complex64::new(norm * cat_psi(cat, x0 + dx * i as f64), 0.0)).collect();
    fft(&mut psi, false);
    let l = n as f64 * dx;
    for (j, amp) in psi.iter_mut().enumerate() {
        // FFT bin j ↦ wavenumber 2π·j̃/L with j̃ wrapped to ±n/2.
        let jj = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        let k = 2.0 * PI * jj / l;
        let phase = -HBAR * k * k * t / (2.0 * cat.mass_kg());
        *amp *= Complex64::from_polar(1.0, phase);
    }
    fft(&mut psi, true);
    psi.iter().map(|a| a.norm_sqr()).collect()
}

/// Exact-characteristics solution of the free long-wavelength master
/// equation for the sampled cat: evaluates P(x, t) at arbitrary positions by
/// direct quadrature, fully independent of the analytic production path.
pub struct MasterEquationOracle {
    k_grid: Vec<f64>,
    p_hat: Vec<Complex64>,
    dk: f64,
}

impl MasterEquationOracle {
    pub fn new(cat: &CatState, lambda: f64, t: f64, n_r: usize, n_k: usize) -> Self {
        let d = cat.separation_m();
        let sigma = cat.width_m();
        let m = cat.mass_kg();
        // Position support of the initial density matrix.
        let r_half = d / 2.0 + 10.0 * sigma;
        let dr = 2.0 * r_half / (n_r - 1) as f64;
        // k support: beyond |y*| = d + 12σ the off-diagonal is empty.
        let k_max = (d + 12.0 * sigma) * m / (HBAR * t);
        let dk = 2.0 * k_max / (n_k - 1) as f64;

        let mut k_grid = Vec::with_capacity(n_k);
        let mut p_hat = Vec::with_capacity(n_k);
        for ik in 0..n_k {
            let k = -k_max + dk * ik as f64;
            let y_star = -HBAR * k * t / m;
            // ρ̂₀(k, y*) = ∫ ψ₀(r + y*/2) ψ₀(r − y*/2) e^(−ikr) dr (trapezoid).
            let mut acc = Complex64::new(0.0, 0.0);
            for ir in 0..n_r {
                let r = -r_half + dr * ir as f64;
                let w = if ir == 0 || ir == n_r - 1 { 0.5 } else { 1.0 };
                let val = cat_psi(cat, r + y_star / 2.0) * cat_psi(cat, r - y_star / 2.0);
                acc += Complex64::from_polar(w * val, -k * r);
            }
            acc *= dr;
            let damping = (-lambda * (HBAR * k * t / m).powi(2) * t / 3.0).exp();
            k_grid.push(k);
            p_hat.push(acc * damping);
        }
        // Normalize so that P integrates to 1: P̂(0) must equal 1.
        let mid = Complex64::new(
            p_hat[n_k / 2].re,
            0.0,
        );
        // k = 0 sits exactly at the middle sample for odd n_k; interpolate
        // otherwise.
        let p0 = if n_k % 2 == 1 { mid.re } else { (p_hat[n_k / 2 - 1].re + p_hat[n_k / 2].re) / 2.0 };
        for v in p_hat.iter_mut() {
            *v /= p0;
        }
        Self { k_grid, p_hat, dk }
    }

    /// P(x, t) = (1/2π) ∫ P̂(k) e^{ikx} dk (trapezoid).
    pub fn density_at(&self, x: f64) -> f64 {
        let n = self.k_grid.len();
        let mut acc = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let z = self.p_hat[i] * Complex64::from_polar(1.0, self.k_grid[i] * x);
            acc += w * z.re;
        }
        acc * self.dk / (2.0 * PI)
    }
}

/// Coherence length of a Gaussian state measured from its discretized
/// Wigner function: integrate over momentum on a grid to obtain the
/// position-space off-diagonal ⟨y/2|ρ̂|−y/2⟩, then fit the Gaussian decay.
pub fn wigner_grid_coherence_length(v_x: f64, v_p: f64, c: f64) -> f64 {
    let det = v_x * v_p - c * c;
    // W(0, p) ∝ exp(−p²·v_x/(2 det)); ρ(0, y) = ∫ W(0, p) e^{ipy/ħ} dp.
    let p_sigma = (det / v_x).sqrt();
    let n = 8001;
    let p_half = 10.0 * p_sigma;
    let dp = 2.0 * p_half / (n - 1) as f64;
    let rho = |y: f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            let p = -p_half + dp * i as f64;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * (-p * p * v_x / (2.0 * det)).exp() * (p * y / HBAR).cos();
        }
        acc * dp
    };
    // ln ρ(0, y) = ln ρ(0, 0) − y²/ξ²: slope fit over a few sample points.
    let xi_guess = (2.0 * v_x * HBAR * HBAR / det).sqrt() * 2.0_f64.sqrt() / 2.0; // rough scale
    let r0 = rho(0.0);
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 1..=6 {
        let y = 0.3 * xi_guess * j as f64;
        let ratio = rho(y) / r0;
        num += -(ratio.ln()) * y * y;
        den += y.powi(4);
    }
    let inv_xi2 = num / den;
    (1.0 / inv_xi2).sqrt()
}
