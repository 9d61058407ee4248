//! Probability measures on the unit circle and their ψ- and K-transforms.
//!
//! For a measure μ the moment-generating function
//! `ψ(z) = ∫ zx/(1 - zx) dμ(x) = Σ_k m_k z^k` has the moments as its Taylor
//! coefficients, and the K-transform is `K = ψ / (1 + ψ)`. Every operation in
//! this crate consumes measures through their moments, so non-atomic measures
//! (e.g. Haar measure) are stored as moment sequences.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{geometric_tail_bound, TruncatedSeries};

/// Tolerance on the total mass of an atomic measure.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Smallest admissible Toeplitz eigenvalue.
pub const TOEPLITZ_EIG_TOL: f64 = -1e-9;
/// Slack on the Schur bound `|K(z)| < 1`.
pub const SCHUR_TOL: f64 = 1e-9;
/// Radii of the validation grid used by [`validate_k`].
pub const VALIDATION_RADII: [f64; 3] = [0.3, 0.6, 0.9];
/// Angles per radius on the validation grid.
pub const VALIDATION_ANGLES: usize = 64;

/// Maps an angle to `[0, 2π)`.
pub fn canonical_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// A point mass `weight · δ_{e^{i angle}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(angle: f64, weight: f64) -> Self {
        Self { angle, weight }
    }

    /// Location `e^{i angle}` on the circle.
    pub fn point(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Atomic(Vec<Atom>),
    Moments(Vec<Complex64>),
}

/// A probability measure on the unit circle, either atomic or given by its
/// moments `m_1..m_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleMeasure {
    repr: Repr,
}

impl CircleMeasure {
    /// Validated atomic measure; angles are canonicalized to `[0, 2π)`.
    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let mut total = 0.0;
        let mut canon = Vec::with_capacity(atoms.len());
        for a in atoms {
            if !a.angle.is_finite() || !a.weight.is_finite() {
                return Err(Error::InvalidMeasure("non-finite atom".into()));
            }
            if a.weight < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative weight {}", a.weight)));
            }
            total += a.weight;
            canon.push(Atom::new(canonical_angle(a.angle), a.weight));
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { repr: Repr::Atomic(canon) })
    }

    pub fn dirac(angle: f64) -> Self {
        Self { repr: Repr::Atomic(vec![Atom::new(canonical_angle(angle), 1.0)]) }
    }

    /// Uniform measure on the `m`-th roots of unity. For `m` larger than the
    /// working order this is the atomic quadrature of Haar measure.
    pub fn roots_of_unity(m: usize) -> Self {
        assert!(m >= 1, "need at least one root of unity");
        let w = 1.0 / m as f64;
        let atoms = (0..m).map(|j| Atom::new(TAU * j as f64 / m as f64, w)).collect();
        Self { repr: Repr::Atomic(atoms) }
    }

    /// Haar (uniform) measure, stored as `order` vanishing moments.
    pub fn haar(order: usize) -> Self {
        Self { repr: Repr::Moments(vec![Complex64::zero(); order]) }
    }

    /// Measure given by moments `m_1..m_N`. The moments must satisfy
    /// `|m_k| <= 1` and the Toeplitz positivity condition.
    pub fn from_moments(moments: Vec<Complex64>) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::InvalidMeasure("empty moment sequence".into()));
        }
        if let Some((k, m)) = moments
            .iter()
            .enumerate()
            .find(|(_, m)| !m.re.is_finite() || !m.im.is_finite() || m.norm() > 1.0 + 1e-12)
        {
            return Err(Error::InvalidMeasure(format!("moment m_{} = {m} has modulus > 1", k + 1)));
        }
        let eig = toeplitz_min_eigenvalue(&moments);
        if eig < TOEPLITZ_EIG_TOL {
            return Err(Error::InvalidMeasure(format!(
                "Toeplitz moment matrix is not positive semidefinite (min eigenvalue {eig:e})"
            )));
        }
        Ok(Self { repr: Repr::Moments(moments) })
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.repr {
            Repr::Atomic(a) => Some(a),
            Repr::Moments(_) => None,
        }
    }

    pub fn stored_moments(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Atomic(_) => None,
            Repr::Moments(m) => Some(m),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.repr, Repr::Atomic(_))
    }

    /// Moments `m_1..m_n`.
    pub fn moments(&self, n: usize) -> Result<Vec<Complex64>> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one moment".into()));
        }
        match &self.repr {
            Repr::Atomic(atoms) => Ok((1..=n)
                .map(|k| {
                    atoms
                        .iter()
                        .map(|a| a.weight * Complex64::from_polar(1.0, k as f64 * a.angle))
                        .sum()
                })
                .collect()),
            Repr::Moments(m) if n <= m.len() => Ok(m[..n].to_vec()),
            Repr::Moments(m) => {
                Err(Error::MomentsUnavailable { requested: n, available: m.len() })
            }
        }
    }

    /// Number of moments available, `None` for atomic measures (unbounded).
    pub fn moment_capacity(&self) -> Option<usize> {
        self.stored_moments().map(<[Complex64]>::len)
    }

    /// Image under the rotation `T_x(y) = xy`, `x = e^{i angle}`.
    pub fn rotate(&self, angle: f64) -> Self {
        match &self.repr {
            Repr::Atomic(atoms) => Self {
                repr: Repr::Atomic(
                    atoms
                        .iter()
                        .map(|a| Atom::new(canonical_angle(a.angle + angle), a.weight))
                        .collect(),
                ),
            },
            Repr::Moments(m) => Self {
                repr: Repr::Moments(
                    m.iter()
                        .enumerate()
                        .map(|(k, &mk)| mk * Complex64::from_polar(1.0, (k + 1) as f64 * angle))
                        .collect(),
                ),
            },
        }
    }

    fn closed_form(&self) -> ClosedForm {
        match &self.repr {
            Repr::Atomic(atoms) => {
                let support: Vec<&Atom> = atoms.iter().filter(|a| a.weight > 0.0).collect();
                if support.len() == 1 && (support[0].weight - 1.0).abs() <= WEIGHT_SUM_TOL {
                    return ClosedForm::Dirac(support[0].angle);
                }
                if let Some(m) = uniform_roots_order(atoms) {
                    return ClosedForm::Monomial(m);
                }
                ClosedForm::None
            }
            Repr::Moments(m) if m.iter().all(|c| c.is_zero()) => ClosedForm::Haar,
            Repr::Moments(_) => ClosedForm::None,
        }
    }

    pub fn to_spec(&self) -> MeasureSpec {
        match &self.repr {
            Repr::Atomic(a) => MeasureSpec::Atoms { atoms: a.clone() },
            Repr::Moments(m) => MeasureSpec::Moments { moments: m.clone() },
        }
    }
}

/// Detects the uniform measure on the `m`-th roots of unity.
fn uniform_roots_order(atoms: &[Atom]) -> Option<usize> {
    let m = atoms.len();
    if m < 2 {
        return None;
    }
    let w = 1.0 / m as f64;
    let mut seen = vec![false; m];
    for a in atoms {
        if (a.weight - w).abs() > WEIGHT_SUM_TOL {
            return None;
        }
        let pos = a.angle * m as f64 / TAU;
        let j = pos.round();
        if (pos - j).abs() > 1e-9 {
            return None;
        }
        let j = (j as usize) % m;
        if seen[j] {
            return None;
        }
        seen[j] = true;
    }
    Some(m)
}

/// JSON schema for measures:
/// `{"atoms": [{"angle": .., "weight": ..}, ..]}` or `{"moments": [[re, im], ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSpec {
    Atoms { atoms: Vec<Atom> },
    Moments { moments: Vec<Complex64> },
}

impl TryFrom<MeasureSpec> for CircleMeasure {
    type Error = Error;

    fn try_from(spec: MeasureSpec) -> Result<Self> {
        match spec {
            MeasureSpec::Atoms { atoms } => CircleMeasure::atomic(atoms),
            MeasureSpec::Moments { moments } => CircleMeasure::from_moments(moments),
        }
    }
}

/// Exact description of a K-transform, when one is known.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedForm {
    /// Only the truncated series is known.
    None,
    /// `K(z) = e^{i angle} z`.
    Dirac(f64),
    /// `K ≡ 0`.
    Haar,
    /// `K(z) = z^k`.
    Monomial(usize),
    /// The stored series is the whole function (a polynomial).
    Polynomial,
}

/// A holomorphic self-map of the disk fixing the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct KTransform {
    series: TruncatedSeries,
    closed_form: ClosedForm,
}

impl KTransform {
    /// Wraps a truncated series without validation; see [`validate_k`].
    pub fn from_series(series: TruncatedSeries) -> Self {
        Self { series, closed_form: ClosedForm::None }
    }

    /// Treats `series` as an exact polynomial.
    pub fn polynomial(series: TruncatedSeries) -> Self {
        Self { series, closed_form: ClosedForm::Polynomial }
    }

    pub fn dirac(angle: f64, order: usize) -> Self {
        let angle = canonical_angle(angle);
        Self {
            series: TruncatedSeries::monomial(1, Complex64::from_polar(1.0, angle), order),
            closed_form: ClosedForm::Dirac(angle),
        }
    }

    pub fn haar(order: usize) -> Self {
        Self { series: TruncatedSeries::zero(order), closed_form: ClosedForm::Haar }
    }

    pub fn monomial(k: usize, order: usize) -> Self {
        Self {
            series: TruncatedSeries::monomial(k, Complex64::new(1.0, 0.0), order),
            closed_form: ClosedForm::Monomial(k),
        }
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn closed_form(&self) -> &ClosedForm {
        &self.closed_form
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// Whether pointwise evaluation is exact rather than a truncation.
    pub fn is_exact(&self) -> bool {
        self.closed_form != ClosedForm::None
    }

    /// `K'(0)`, the first moment of the underlying measure.
    pub fn derivative_at_zero(&self) -> Complex64 {
        match self.closed_form {
            ClosedForm::Dirac(a) => Complex64::from_polar(1.0, a),
            ClosedForm::Monomial(1) => Complex64::new(1.0, 0.0),
            ClosedForm::Monomial(_) | ClosedForm::Haar => Complex64::zero(),
            _ => self.series.coeff(1).unwrap_or_else(|_| Complex64::zero()),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_with_derivative(z).0
    }

    /// `(K(z), K'(z))`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        match self.closed_form {
            ClosedForm::Dirac(a) => {
                let x = Complex64::from_polar(1.0, a);
                (x * z, x)
            }
            ClosedForm::Haar => (Complex64::zero(), Complex64::zero()),
            ClosedForm::Monomial(0) => (Complex64::new(1.0, 0.0), Complex64::zero()),
            ClosedForm::Monomial(k) => {
                let zk1 = z.powu(k as u32 - 1);
                (zk1 * z, zk1 * k as f64)
            }
            ClosedForm::None | ClosedForm::Polynomial => self.series.eval_with_derivative(z),
        }
    }

    /// Series through order `n`. Exact closed forms can be expanded to any
    /// order; a bare truncated series cannot be extended.
    pub fn series_to(&self, n: usize) -> Result<TruncatedSeries> {
        match self.closed_form {
            ClosedForm::Dirac(a) => {
                Ok(TruncatedSeries::monomial(1, Complex64::from_polar(1.0, a), n))
            }
            ClosedForm::Haar => Ok(TruncatedSeries::zero(n)),
            ClosedForm::Monomial(k) => {
                Ok(TruncatedSeries::monomial(k, Complex64::new(1.0, 0.0), n))
            }
            ClosedForm::Polynomial => {
                let mut c = self.series.coeffs().to_vec();
                c.resize(n + 1, Complex64::zero());
                TruncatedSeries::new(c)
            }
            ClosedForm::None if n <= self.series.order() => Ok(self.series.truncate(n)),
            ClosedForm::None => {
                Err(Error::BeyondOrder { index: n, order: self.series.order() })
            }
        }
    }

    /// Moments of the underlying measure, see [`measure_moments_from_k`].
    pub fn moments(&self, n: usize) -> Result<Vec<Complex64>> {
        measure_moments_from_k(self, n)
    }
}

/// ψ-transform series `Σ_{k=1}^n m_k z^k`.
pub fn psi_series(mu: &CircleMeasure, n: usize) -> Result<TruncatedSeries> {
    let mut coeffs = vec![Complex64::zero()];
    coeffs.extend(mu.moments(n)?);
    TruncatedSeries::new(coeffs)
}

/// `K = ψ / (1 + ψ)` from a ψ-series (which must vanish at the origin).
pub fn k_from_psi(psi: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !psi.coeffs()[0].is_zero() {
        return Err(Error::SeriesDomain("ψ must vanish at the origin".into()));
    }
    let one = TruncatedSeries::one(psi.order());
    let k = psi * &(&one + psi).reciprocal()?;
    Ok(zero_constant(k))
}

/// `ψ = K / (1 - K)` from a K-series (which must vanish at the origin).
pub fn psi_from_k(k: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !k.coeffs()[0].is_zero() {
        return Err(Error::InvalidKTransform(format!("K(0) = {} ≠ 0", k.coeffs()[0])));
    }
    let one = TruncatedSeries::one(k.order());
    let psi = k * &(&one - k).reciprocal()?;
    Ok(zero_constant(psi))
}

fn zero_constant(s: TruncatedSeries) -> TruncatedSeries {
    let mut c = s.into_coeffs();
    c[0] = Complex64::zero();
    TruncatedSeries::new(c).expect("non-empty")
}

/// K-transform of `mu` through order `n`.
pub fn k_transform(mu: &CircleMeasure, n: usize) -> Result<KTransform> {
    let series = k_from_psi(&psi_series(mu, n)?)?;
    Ok(KTransform { series, closed_form: mu.closed_form() })
}

/// Moments `m_1..m_n` of the measure whose K-transform is `k`, read off as
/// the coefficients of `K / (1 - K)`.
pub fn measure_moments_from_k(k: &KTransform, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one moment".into()));
    }
    let psi = psi_from_k(&k.series_to(n)?)?;
    Ok(psi.coeffs()[1..=n].to_vec())
}

/// Smallest eigenvalue of the Hermitian Toeplitz matrix `[m_{j-k}]` of size
/// `K + 1` with `K = ⌊N/2⌋`, where `m_0 = 1` and `m_{-k} = conj(m_k)`.
/// Positivity of the largest section implies positivity of all smaller ones.
pub fn toeplitz_min_eigenvalue(moments: &[Complex64]) -> f64 {
    let size = moments.len() / 2 + 1;
    let m = |d: isize| -> Complex64 {
        match d {
            0 => Complex64::new(1.0, 0.0),
            d if d > 0 => moments[d as usize - 1],
            d => moments[(-d) as usize - 1].conj(),
        }
    };
    let t = DMatrix::from_fn(size, size, |j, k| m(j as isize - k as isize));
    t.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Outcome of [`validate_k`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KValidation {
    pub k_at_zero_ok: bool,
    pub schur_bound_ok: bool,
    pub toeplitz_psd_ok: bool,
    /// Largest `|K(z)|` observed on the validation grid.
    pub max_modulus: f64,
    /// Smallest Toeplitz eigenvalue (`-inf` when the moments are undefined).
    pub min_toeplitz_eigenvalue: f64,
}

impl KValidation {
    pub fn all_ok(&self) -> bool {
        self.k_at_zero_ok && self.schur_bound_ok && self.toeplitz_psd_ok
    }
}

/// Runs the three K-transform checks: `K(0) = 0`, the Schur bound on the
/// validation grid, and Toeplitz positivity of the induced moments.
///
/// Exact K-transforms are evaluated pointwise. For a bare truncated series
/// the Schur check instead requires every coefficient to be bounded by one
/// (necessary for a self-map of the disk) and allows the geometric tail
/// bound of the neglected terms at each radius.
pub fn validate_k(k: &KTransform) -> KValidation {
    let c0 = k.series.coeffs()[0];
    let k_at_zero_ok = c0.norm() <= 1e-12 && k.eval(Complex64::zero()).norm() <= 1e-12;

    let mut schur_bound_ok = true;
    let mut max_modulus: f64 = 0.0;
    if !k.is_exact() && k.series.max_abs_coeff() > 1.0 + SCHUR_TOL {
        schur_bound_ok = false;
    }
    for &r in &VALIDATION_RADII {
        let slack = if k.is_exact() { 0.0 } else { geometric_tail_bound(r, k.order()) };
        for j in 0..VALIDATION_ANGLES {
            let z = Complex64::from_polar(r, TAU * j as f64 / VALIDATION_ANGLES as f64);
            let m = k.eval(z).norm();
            max_modulus = max_modulus.max(m);
            if m >= 1.0 + SCHUR_TOL + slack {
                schur_bound_ok = false;
            }
        }
    }

    let min_toeplitz_eigenvalue = if k_at_zero_ok {
        let n = k.order().max(1);
        match measure_moments_from_k(k, n) {
            Ok(m) => toeplitz_min_eigenvalue(&m),
            Err(_) => f64::NEG_INFINITY,
        }
    } else {
        f64::NEG_INFINITY
    };
    KValidation {
        k_at_zero_ok,
        schur_bound_ok,
        toeplitz_psd_ok: min_toeplitz_eigenvalue >= TOEPLITZ_EIG_TOL,
        max_modulus,
        min_toeplitz_eigenvalue,
    }
}

/// Poisson-smoothed density of `mu` (with respect to `dθ/2π`) on the grid
/// `θ_j = 2πj / grid_size`:
/// `p(θ) = 1 + 2 Σ_k Re(m_k r^k e^{-ikθ})`.
///
/// Atomic measures use as many moments as needed for `r^k` to drop below
/// `1e-17`; moment-represented measures use every stored moment.
pub fn poisson_density(mu: &CircleMeasure, r: f64, grid_size: usize) -> Result<Vec<f64>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("Poisson radius {r} not in (0, 1)")));
    }
    if grid_size == 0 {
        return Err(Error::InvalidArgument("empty density grid".into()));
    }
    let n = match mu.moment_capacity() {
        Some(cap) => cap,
        None => ((1e-17f64).ln() / r.ln()).ceil() as usize,
    };
    let moments = mu.moments(n.max(1))?;
    let weighted: Vec<Complex64> =
        moments.iter().enumerate().map(|(k, &m)| m * r.powi(k as i32 + 1)).collect();
    Ok((0..grid_size)
        .map(|j| {
            let theta = TAU * j as f64 / grid_size as f64;
            let s: f64 = weighted
                .iter()
                .enumerate()
                .map(|(k, &w)| (w * Complex64::from_polar(1.0, -((k + 1) as f64) * theta)).re)
                .sum();
            1.0 + 2.0 * s
        })
        .collect())
}
