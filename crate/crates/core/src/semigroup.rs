//! Continuous monotone convolution semigroups `(K_t)_{t >= 0}` driven by a
//! generator: pointwise ODE evolution, the exact coefficient recursion, and
//! consistency checks between the two.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{check_in_disk, Error, Result};
use crate::generator::VectorField;
use crate::ode::{integrate_counting, OdeOptions};
use crate::series::TruncatedSeries;

/// Solves `dK/dt = v(K)`, `K_0 = z`, and returns `K_t(z)`.
pub fn evolve_pointwise<F: VectorField + ?Sized>(
    field: &F,
    t: f64,
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    check_in_disk(z)?;
    let mut steps = 0;
    let k = integrate_counting(&|w| field.v(w), z, 0.0, t, &OdeOptions::with_tol(tol), &mut steps)?;
    check_in_disk(k)?;
    Ok(k)
}

/// Pointwise values `K_t(z)` on a fixed grid at caller-supplied times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemigroupTrajectory {
    pub times: Vec<f64>,
    pub grid: Vec<Complex64>,
    /// `values[i][j] = K_{times[i]}(grid[j])`.
    pub values: Vec<Vec<Complex64>>,
}

impl SemigroupTrajectory {
    /// Rows `(t, z, K_t(z))` in time-major order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, Complex64, Complex64)> + '_ {
        self.times.iter().zip(&self.values).flat_map(move |(&t, row)| {
            self.grid.iter().zip(row).map(move |(&z, &k)| (t, z, k))
        })
    }
}

/// Evolves every grid point through the increasing sequence `times`,
/// restarting each leg from the previous snapshot.
pub fn evolve_trajectory<F: VectorField + ?Sized>(
    field: &F,
    times: &[f64],
    grid: &[Complex64],
    tol: f64,
) -> Result<SemigroupTrajectory> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be nondecreasing".into()));
    }
    for &z in grid {
        check_in_disk(z)?;
    }
    let opts = OdeOptions::with_tol(tol);
    let f = |w: Complex64| field.v(w);
    let mut values = Vec::with_capacity(times.len());
    let mut current = grid.to_vec();
    let mut last_t = 0.0;
    let mut steps = 0;
    for &t in times {
        for w in current.iter_mut() {
            *w = integrate_counting(&f, *w, last_t, t, &opts, &mut steps)?;
            check_in_disk(*w)?;
        }
        last_t = t;
        values.push(current.clone());
    }
    Ok(SemigroupTrajectory { times: times.to_vec(), grid: grid.to_vec(), values })
}

/// Taylor coefficients `f_0..f_n` of `K_t`, the unique solution of
/// `v(f(z)) = v(z) f'(z)` with `f(0) = 0` and `f'(0) = e^{-tβ}`.
///
/// Matching `z^m` gives
/// `v_1 (m-1) f_m = Σ_{j=2..m} v_j ([z^m] f^j - (m-j+1) f_{m-j+1})`,
/// where the right side only involves `f_1..f_{m-1}`.
pub fn k_t_coefficients<F: VectorField + ?Sized>(
    field: &F,
    t: f64,
    n: usize,
) -> Result<TruncatedSeries> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be nonnegative")));
    }
    let beta = field.beta();
    if beta.is_zero() {
        return Err(Error::UnsupportedGenerator);
    }
    let v = field.v_series(n);
    let v = v.coeffs();
    let mut f = vec![Complex64::zero(); n + 1];
    if n >= 1 {
        f[1] = (-t * beta).exp();
    }
    for m in 2..=n {
        // Powers of f_1 z + ... + f_{m-1} z^{m-1}, truncated at z^m.
        let base = TruncatedSeries::new(f[..=m].to_vec()).expect("non-empty");
        let mut power = base.clone();
        let mut rhs = Complex64::zero();
        for j in 2..=m {
            power = &power * &base;
            if v[j].is_zero() {
                continue;
            }
            rhs += v[j] * (power.coeffs()[m] - (m - j + 1) as f64 * f[m - j + 1]);
        }
        f[m] = rhs / (v[1] * (m - 1) as f64);
    }
    TruncatedSeries::new(f)
}

/// `max_z |K_{s+t}(z) - K_s(K_t(z))|` over `grid`.
pub fn semigroup_defect<F: VectorField + ?Sized>(
    field: &F,
    s: f64,
    t: f64,
    grid: &[Complex64],
    tol: f64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in grid {
        let direct = evolve_pointwise(field, s + t, z, tol)?;
        let composed = evolve_pointwise(field, s, evolve_pointwise(field, t, z, tol)?, tol)?;
        worst = worst.max((direct - composed).norm());
    }
    Ok(worst)
}

/// Recovers `u(z) = -(1/z) ∂_t K_t(z)|_{t=0}` from a flow by the one-sided
/// second-order difference `(-3K_0 + 4K_h - K_{2h}) / (2h)`.
pub fn generator_from_flow<G>(flow: G, z: Complex64, h: f64) -> Result<Complex64>
where
    G: Fn(f64, Complex64) -> Result<Complex64>,
{
    if z.is_zero() {
        return Err(Error::InvalidArgument("z must be nonzero".into()));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    let d = (-3.0 * flow(0.0, z)? + 4.0 * flow(h, z)? - flow(2.0 * h, z)?) / (2.0 * h);
    Ok(-d / z)
}

/// First moment of `μ_t` computed two ways against the prediction
/// `e^{-tβ}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstMoment {
    /// `K_t'(0)` by a discrete Cauchy integral of the ODE flow.
    pub contour: Complex64,
    /// `f_1` of [`k_t_coefficients`]; absent when `β = 0`.
    pub recursion: Option<Complex64>,
    pub predicted: Complex64,
}

impl FirstMoment {
    pub fn max_error(&self) -> f64 {
        let c = (self.contour - self.predicted).norm();
        self.recursion.map_or(c, |r| c.max((r - self.predicted).norm()))
    }
}

const CONTOUR_RADIUS: f64 = 0.5;
const CONTOUR_POINTS: usize = 32;

/// `m_1(μ_t) = K_t'(0)`, compared with `e^{-tβ}`.
///
/// The contour estimate averages `K_t(rω)/(rω)` over 32 points at `r = 1/2`;
/// aliasing contributes at most `r^32` relative to the coefficient bound.
pub fn first_moment_law<F: VectorField + ?Sized>(field: &F, t: f64, tol: f64) -> Result<FirstMoment> {
    let mut acc = Complex64::zero();
    for j in 0..CONTOUR_POINTS {
        let z = Complex64::from_polar(CONTOUR_RADIUS, TAU * j as f64 / CONTOUR_POINTS as f64);
        acc += evolve_pointwise(field, t, z, tol)? / z;
    }
    let recursion = match k_t_coefficients(field, t, 1) {
        Ok(s) => Some(s.coeffs()[1]),
        Err(Error::UnsupportedGenerator) => None,
        Err(e) => return Err(e),
    };
    Ok(FirstMoment {
        contour: acc / CONTOUR_POINTS as f64,
        recursion,
        predicted: (-t * field.beta()).exp(),
    })
}

/// `max_z |v(f(z)) - v(z) f'(z)|` for the coefficient series `f` of `K_t`.
pub fn flow_equation_defect<F: VectorField + ?Sized>(
    field: &F,
    t: f64,
    n: usize,
    grid: &[Complex64],
) -> Result<f64> {
    let f = k_t_coefficients(field, t, n)?;
    let mut worst = 0.0f64;
    for &z in grid {
        check_in_disk(z)?;
        let (w, dw) = f.eval_with_derivative(z);
        worst = worst.max((field.v(w) - field.v(z) * dw).norm());
    }
    Ok(worst)
}
