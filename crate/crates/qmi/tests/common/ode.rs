//! Adaptive Dormand–Prince 5(4) integration of the Gaussian moment ODEs
//!
//!   v̇_x = 2c/M,  ċ = v_p/M − k·v_x,  v̇_p = −2k·c + 2ħ²Λ
//!
//! with k = ±Mω² (harmonic/inverted) or 0 (free). Used as the independent
//! oracle for the closed-form propagator.

use qmi::dynamics::Potential;
use qmi::quantities::si::HBAR;

type Y = [f64; 3]; // [v_x, c, v_p]

fn rhs(y: &Y, mass: f64, k: f64, lambda: f64) -> Y {
    [
        2.0 * y[1] / mass,
        y[2] / mass - k * y[0],
        -2.0 * k * y[1] + 2.0 * HBAR * HBAR * lambda,
    ]
}

fn axpy(y: &Y, steps: &[(f64, &Y)], h: f64) -> Y {
    let mut out = *y;
    for (a, dy) in steps {
        for i in 0..3 {
            out[i] += h * a * dy[i];
        }
    }
    out
}

/// Integrate the moment equations from `y0` over `[0, t_end]`.
pub fn integrate_moments(
    y0: Y,
    mass: f64,
    potential: Potential,
    lambda: f64,
    t_end: f64,
    rtol: f64,
) -> Y {
    if t_end == 0.0 {
        return y0;
    }
    let k = match potential {
        Potential::Free => 0.0,
        Potential::Harmonic { omega } => mass * omega * omega,
        Potential::Inverted { omega } => -mass * omega * omega,
    };
    // Dormand–Prince coefficients.
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 5179.0 / 57600.0;
    const E3: f64 = 7571.0 / 16695.0;
    const E4: f64 = 393.0 / 640.0;
    const E5: f64 = -92097.0 / 339200.0;
    const E6: f64 = 187.0 / 2100.0;
    const E7: f64 = 1.0 / 40.0;

    let mut t = 0.0;
    let mut y = y0;
    let mut h = t_end / 256.0;
    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        assert!(steps < 20_000_000, "oracle integrator exceeded its step budget");
        if t + h > t_end {
            h = t_end - t;
        }
        let k1 = rhs(&y, mass, k, lambda);
        let k2 = rhs(&axpy(&y, &[(A21, &k1)], h), mass, k, lambda);
        let k3 = rhs(&axpy(&y, &[(A31, &k1), (A32, &k2)], h), mass, k, lambda);
        let k4 = rhs(&axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h), mass, k, lambda);
        let k5 = rhs(
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
            mass,
            k,
            lambda,
        );
        let k6 = rhs(
            &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
            mass,
            k,
            lambda,
        );
        let y5 = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = rhs(&y5, mass, k, lambda);
        let y4 = axpy(&y, &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)], h);

        // Per-component error against mixed scales; c can cross zero, so it
        // borrows the geometric moment scale.
        let scale = [
            y[0].abs() + y5[0].abs(),
            (y[0].abs() * y[2].abs()).sqrt() + y[1].abs(),
            y[2].abs() + y5[2].abs(),
        ];
        let mut err: f64 = 0.0;
        for i in 0..3 {
            let tol = rtol * scale[i].max(f64::MIN_POSITIVE);
            err = err.max((y5[i] - y4[i]).abs() / tol);
        }
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        h *= factor;
    }
    y
}
