//! Adaptive Simpson quadrature and the direct convolution oracle for the
//! decoherence blur.

/// Recursive adaptive Simpson integration.
pub fn adaptive_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Direct quadrature of the blur integral
/// ∫ P₀(x + y)·exp(−y²/σ²)/(σ√π) dy
/// for a continuous density P₀, independent of the sampled convolution.
pub fn blur_at<F: Fn(f64) -> f64 + Copy>(p0: F, sigma: f64, x: f64, tol: f64) -> f64 {
    let kernel = move |y: f64| p0(x + y) * (-y * y / (sigma * sigma)).exp();
    let reach = 8.0 * sigma;
    adaptive_simpson(kernel, -reach, reach, tol) / (sigma * std::f64::consts::PI.sqrt())
}
