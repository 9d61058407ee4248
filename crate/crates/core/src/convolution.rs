//! Multiplicative monotone convolution `μ ⊳ ν`, the measure whose K-transform
//! is `K_μ ∘ K_ν`.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::measure::{k_transform, measure_moments_from_k, CircleMeasure, KTransform};

/// Composition `K_μ ∘ K_ν` of two K-transforms through order `n`.
pub fn compose_k(outer: &KTransform, inner: &KTransform, n: usize) -> Result<KTransform> {
    let series = outer.series_to(n)?.compose(&inner.series_to(n)?)?;
    Ok(KTransform::from_series(series))
}

/// Moments `m_1..m_n` of `μ ⊳ ν`, returned as a moment-represented measure.
pub fn monotone_convolve(mu: &CircleMeasure, nu: &CircleMeasure, n: usize) -> Result<CircleMeasure> {
    let k = compose_k(&k_transform(mu, n)?, &k_transform(nu, n)?, n)?;
    CircleMeasure::from_moments(measure_moments_from_k(&k, n)?)
}

/// `μ ⊳ ν` computed as the mixture `Σ_j w_j (δ_{x_j} ⊳ ν)` over the atoms of
/// `μ`. Left convolution by `δ_x` multiplies the K-transform by `x`, so each
/// term needs only `K_ν`. Serves as a second route to [`monotone_convolve`].
pub fn affine_mixture_convolve(
    mu: &CircleMeasure,
    nu: &CircleMeasure,
    n: usize,
) -> Result<CircleMeasure> {
    let atoms = mu.atoms().ok_or_else(|| {
        Error::InvalidMeasure("affine mixture needs an atomic first argument".into())
    })?;
    let k_nu = k_transform(nu, n)?;
    let mut acc = vec![Complex64::zero(); n];
    for atom in atoms {
        let rotated = KTransform::from_series(k_nu.series_to(n)?.scale(atom.point()));
        for (a, m) in acc.iter_mut().zip(measure_moments_from_k(&rotated, n)?) {
            *a += atom.weight * m;
        }
    }
    CircleMeasure::from_moments(acc)
}

/// `μ^{⊳k}`; `k = 0` gives the unit `δ_1`.
pub fn monotone_power(mu: &CircleMeasure, k: usize, n: usize) -> Result<CircleMeasure> {
    let base = k_transform(mu, n)?;
    let mut acc = KTransform::dirac(0.0, n);
    for _ in 0..k {
        acc = compose_k(&acc, &base, n)?;
    }
    CircleMeasure::from_moments(measure_moments_from_k(&acc, n)?)
}
