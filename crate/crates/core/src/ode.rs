//! Adaptive Dormand-Prince 5(4) integrator for autonomous complex scalar
//! equations `dy/dt = f(y)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default local error tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default step budget.
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

// Stage matrix; the last row doubles as the 5th-order weights.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    /// Absolute and relative local error tolerance.
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_steps: DEFAULT_MAX_STEPS }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Integrates `dy/dt = f(y)` from `y0` over a duration `t >= 0`.
pub fn integrate<F>(f: F, y0: Complex64, t: f64, opts: &OdeOptions) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut steps = 0;
    integrate_counting(&f, y0, 0.0, t, opts, &mut steps)
}

/// As [`integrate`] between absolute times `t0 <= t1`, adding the number of
/// accepted and rejected steps to `steps`.
pub(crate) fn integrate_counting<F>(
    f: &F,
    y0: Complex64,
    t0: f64,
    t1: f64,
    opts: &OdeOptions,
    steps: &mut usize,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {} must be positive", opts.tol)));
    }
    if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidArgument(format!("cannot integrate from {t0} to {t1}")));
    }
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let h_min = 1e-14 * t1.abs().max(1.0);
    let mut t = t0;
    let mut y = y0;
    let mut h = span.min(1e-2);
    let mut k = [Complex64::new(0.0, 0.0); 7];
    k[0] = f(y);
    while t < t1 {
        if *steps >= opts.max_steps {
            return Err(Error::MaxStepsExceeded(opts.max_steps));
        }
        *steps += 1;
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut acc = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += h * A[s][j] * kj;
            }
            k[s] = f(acc);
        }
        let y_new = y + h * (0..6).map(|j| A[6][j] * k[j]).sum::<Complex64>();
        let err_vec = h * (0..7).map(|j| E[j] * k[j]).sum::<Complex64>();
        let scale = opts.tol * (1.0 + y.norm().max(y_new.norm()));
        let err = err_vec.norm() / scale;
        if !err.is_finite() {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y_new;
            // FSAL: the last stage is the derivative at the new point.
            k[0] = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        let factor = if err > 1.0 { factor.min(1.0) } else { factor };
        h *= factor;
        if t < t1 && h < h_min {
            return Err(Error::StepSizeUnderflow { t, h });
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let z = Complex64::new(0.5, 0.2);
        let y = integrate(|y| -y, z, 1.0, &OdeOptions::default()).unwrap();
        assert!((y - z * (-1.0f64).exp()).norm() < 1e-10);
    }

    #[test]
    fn rotation() {
        let i = Complex64::new(0.0, 1.0);
        let y = integrate(|y| i * y, Complex64::new(1.0, 0.0), 2.0, &OdeOptions::default()).unwrap();
        assert!((y - Complex64::from_polar(1.0, 2.0)).norm() < 1e-9);
    }

    #[test]
    fn zero_duration_is_identity() {
        let z = Complex64::new(0.1, 0.1);
        assert_eq!(integrate(|y| y * y, z, 0.0, &OdeOptions::default()).unwrap(), z);
    }

    #[test]
    fn blow_up_reports_underflow() {
        // y' = y^2 from 1 blows up at t = 1.
        let r = integrate(|y| y * y, Complex64::new(1.0, 0.0), 2.0, &OdeOptions::default());
        assert!(matches!(r, Err(Error::StepSizeUnderflow { .. }) | Err(Error::MaxStepsExceeded(_))));
    }

    #[test]
    fn step_budget() {
        let opts = OdeOptions { tol: 1e-12, max_steps: 3 };
        let r = integrate(|y| Complex64::new(0.0, 50.0) * y, Complex64::new(1.0, 0.0), 10.0, &opts);
        assert_eq!(r, Err(Error::MaxStepsExceeded(3)));
    }

    #[test]
    fn rejects_bad_arguments() {
        let z = Complex64::new(0.1, 0.0);
        assert!(integrate(|y| y, z, -1.0, &OdeOptions::default()).is_err());
        assert!(integrate(|y| y, z, 1.0, &OdeOptions::with_tol(0.0)).is_err());
    }
}
