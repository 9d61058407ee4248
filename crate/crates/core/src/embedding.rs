//! Embedding a K-transform into a continuous semigroup.
//!
//! If `K = K_{t0}` for a semigroup with generator `u`, the Koenigs function
//! `h = lim K^n / K'(0)^n` linearises the flow and `-h/h' = -z u(z)/β` with
//! `β = u(0)`. The test iterates `K` on a grid, forms
//! `r_n = -K^n / (K^n)'`, and reads off `ũ = -r_∞/z ∝ u`. Positivity of the
//! real part of `βũ` for some logarithm `β t0 = -Log K'(0)` decides
//! embeddability.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{ClosedForm, KTransform};

/// Threshold below which `|K'|` counts as vanishing.
pub const DERIVATIVE_EPS: f64 = 1e-9;
/// Largest `|k|` tried for the branch `-Log K'(0) - 2πik`.
pub const MAX_BRANCH: i64 = 8;
/// Slack allowed in `Re(β ũ) >= 0`.
pub const POSITIVITY_SLACK: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 1000;
pub const DEFAULT_CONV_TOL: f64 = 1e-10;

// Orbit values below this are frozen to avoid underflow in the ratio.
const UNDERFLOW: f64 = 1e-280;

/// Points `r e^{2πij/m + offset}` on concentric circles.
///
/// With `m` equally spaced angles the mean over a circle of a holomorphic
/// `g` is `g_0 + g_m r^m + g_{2m} r^{2m} + ...`, which is what the
/// extrapolation of `ũ(0)` relies on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RingGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
    pub offset: f64,
}

impl Default for RingGrid {
    fn default() -> Self {
        Self { radii: vec![0.2, 0.4, 0.6], angles: 8, offset: 0.0 }
    }
}

impl RingGrid {
    pub fn new(radii: Vec<f64>, angles: usize, offset: f64) -> Result<Self> {
        if radii.is_empty() || angles == 0 {
            return Err(Error::InvalidArgument("grid needs radii and angles".into()));
        }
        if radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(Error::InvalidArgument("radii must lie in (0, 1)".into()));
        }
        let mut sorted = radii.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        if sorted.len() != radii.len() {
            return Err(Error::InvalidArgument("radii must be distinct".into()));
        }
        Ok(Self { radii, angles, offset })
    }

    /// Grid points, ring by ring.
    pub fn points(&self) -> Vec<Complex64> {
        self.radii
            .iter()
            .flat_map(|&r| {
                (0..self.angles).map(move |j| {
                    Complex64::from_polar(r, TAU * j as f64 / self.angles as f64 + self.offset)
                })
            })
            .collect()
    }

    /// Value at 0 of a holomorphic function sampled on the grid: the ring
    /// means are fitted by a polynomial in `r^m` and evaluated at 0.
    pub fn extrapolate_to_origin(&self, values: &[Complex64]) -> Complex64 {
        let m = self.angles;
        let xs: Vec<f64> = self.radii.iter().map(|r| r.powi(m as i32)).collect();
        let means: Vec<Complex64> =
            values.chunks(m).map(|ring| ring.iter().sum::<Complex64>() / m as f64).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &yi) in means.iter().enumerate() {
            let mut w = 1.0;
            for (j, &xj) in xs.iter().enumerate() {
                if i != j {
                    w *= xj / (xj - xs[i]);
                }
            }
            acc += w * yi;
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingReason {
    Ok,
    DerivativeVanishes,
    LimitDiverges,
    PositivityFails,
    DiracSpecialCase,
}

/// `ũ` at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridValue {
    pub z: Complex64,
    pub u: Complex64,
}

/// The embedding semigroups of a point mass `δ_{e^{iφ}}`:
/// `K_t(z) = e^{it(φ + 2πk)} z` for every integer `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiracFamily {
    pub angle: f64,
}

impl DiracFamily {
    /// Rotation rate `φ + 2πk` of member `k`.
    pub fn rate(&self, k: i64) -> f64 {
        self.angle + TAU * k as f64
    }

    /// Generator of member `k`: `u ≡ -i(φ + 2πk)`.
    pub fn generator(&self, k: i64) -> Complex64 {
        Complex64::new(0.0, -self.rate(k))
    }

    pub fn k_t(&self, k: i64, t: f64, z: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, t * self.rate(k)) * z
    }

    /// Rates of members `-kmax..=kmax`.
    pub fn rates(&self, kmax: i64) -> Vec<(i64, f64)> {
        (-kmax..=kmax).map(|k| (k, self.rate(k))).collect()
    }
}

/// The family of semigroups through `δ_{e^{iφ}}` at `t = 1`.
pub fn dirac_embedding(angle: f64) -> DiracFamily {
    DiracFamily { angle }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingVerdict {
    pub embeddable: bool,
    pub reason: EmbeddingReason,
    /// Normalised `ũ` with `ũ(0) = 1`; empty unless the limit converged.
    pub u_estimate: Vec<GridValue>,
    /// Extrapolated `-r_∞(z)/z` at 0 before normalisation (theory: 1).
    pub u0_raw: Option<Complex64>,
    /// Time parameter under the normalisation `Re β = 1`.
    pub t0: Option<f64>,
    /// Selected `k` in `β t0 = -Log K'(0) - 2πik`.
    pub branch_index: Option<i64>,
    pub beta: Option<Complex64>,
    /// Every branch in `|k| <= 8` passing the positivity check.
    pub accepted_branches: Vec<i64>,
    pub iterations: usize,
    pub dirac_family: Option<DiracFamily>,
}

impl EmbeddingVerdict {
    fn rejected(reason: EmbeddingReason, iterations: usize) -> Self {
        Self {
            embeddable: false,
            reason,
            u_estimate: Vec::new(),
            u0_raw: None,
            t0: None,
            branch_index: None,
            beta: None,
            accepted_branches: Vec::new(),
            iterations,
            dirac_family: None,
        }
    }

    /// Estimated generator `u = β ũ` on the grid.
    pub fn generator_estimate(&self) -> Option<Vec<GridValue>> {
        let beta = self.beta?;
        Some(self.u_estimate.iter().map(|g| GridValue { z: g.z, u: beta * g.u }).collect())
    }
}

/// Decides whether `k` is `K_{t0}` of a continuous monotone convolution
/// semigroup, from grid evidence.
pub fn embedding_test(
    k: &KTransform,
    max_iter: usize,
    grid: &RingGrid,
    conv_tol: f64,
) -> Result<EmbeddingVerdict> {
    if !(conv_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {conv_tol} must be positive")));
    }
    let c1 = k.derivative_at_zero();
    if let ClosedForm::Dirac(angle) = *k.closed_form() {
        return Ok(dirac_verdict(angle, grid));
    }
    // |K'(0)| = 1 forces a rotation by the Schwarz lemma.
    if (c1.norm() - 1.0).abs() < 1e-12 {
        return Ok(dirac_verdict(c1.arg(), grid));
    }
    let points = grid.points();
    if c1.norm() <= DERIVATIVE_EPS
        || points.iter().any(|&z| k.eval_with_derivative(z).1.norm() <= DERIVATIVE_EPS)
    {
        return Ok(EmbeddingVerdict::rejected(EmbeddingReason::DerivativeVanishes, 0));
    }

    let mut w = points.clone();
    let mut d = vec![Complex64::new(1.0, 0.0); points.len()];
    let mut frozen = vec![false; points.len()];
    let mut r: Vec<Complex64> = points.iter().map(|z| -z).collect();
    let mut converged = None;
    for n in 1..=max_iter {
        let mut delta = 0.0f64;
        for i in 0..points.len() {
            if frozen[i] {
                continue;
            }
            let (kw, dk) = k.eval_with_derivative(w[i]);
            d[i] *= dk;
            w[i] = kw;
            let next = -w[i] / d[i];
            if !next.is_finite() {
                return Ok(EmbeddingVerdict::rejected(EmbeddingReason::LimitDiverges, n));
            }
            delta = delta.max((next - r[i]).norm());
            r[i] = next;
            if w[i].norm() < UNDERFLOW || d[i].norm() < UNDERFLOW {
                frozen[i] = true;
            }
        }
        if delta < conv_tol {
            converged = Some(n);
            break;
        }
    }
    let Some(iterations) = converged else {
        return Ok(EmbeddingVerdict::rejected(EmbeddingReason::LimitDiverges, max_iter));
    };

    let raw: Vec<Complex64> = points.iter().zip(&r).map(|(z, ri)| -ri / z).collect();
    let u0 = grid.extrapolate_to_origin(&raw);
    let u_tilde: Vec<GridValue> =
        points.iter().zip(&raw).map(|(&z, &u)| GridValue { z, u: u / u0 }).collect();

    // β t0 = -Log c1 - 2πik with Re β = 1.
    let t0 = -c1.norm().ln();
    let principal = -c1.ln();
    let accepted: Vec<i64> = branch_order()
        .filter(|&b| {
            let beta = (principal - Complex64::new(0.0, TAU * b as f64)) / t0;
            u_tilde.iter().all(|g| (beta * g.u).re >= -POSITIVITY_SLACK)
        })
        .collect();
    let mut verdict = EmbeddingVerdict::rejected(EmbeddingReason::PositivityFails, iterations);
    verdict.u_estimate = u_tilde;
    verdict.u0_raw = Some(u0);
    verdict.t0 = Some(t0);
    if let Some(&b) = accepted.first() {
        verdict.embeddable = true;
        verdict.reason = EmbeddingReason::Ok;
        verdict.branch_index = Some(b);
        verdict.beta = Some((principal - Complex64::new(0.0, TAU * b as f64)) / t0);
    }
    verdict.accepted_branches = accepted;
    Ok(verdict)
}

/// 0, 1, -1, 2, -2, ...
fn branch_order() -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=MAX_BRANCH).flat_map(|k| [k, -k]))
}

fn dirac_verdict(angle: f64, grid: &RingGrid) -> EmbeddingVerdict {
    let family = dirac_embedding(angle);
    // Principal member: rate in (-π, π].
    let k0 = if angle > PI { -1 } else { 0 };
    let mut v = EmbeddingVerdict::rejected(EmbeddingReason::DiracSpecialCase, 0);
    v.embeddable = true;
    v.u_estimate =
        grid.points().into_iter().map(|z| GridValue { z, u: Complex64::new(1.0, 0.0) }).collect();
    v.u0_raw = Some(Complex64::new(1.0, 0.0));
    v.t0 = Some(1.0);
    v.branch_index = Some(k0);
    v.beta = Some(family.generator(k0));
    v.accepted_branches = branch_order().map(|b| b + k0).collect();
    v.dirac_family = Some(family);
    v
}
