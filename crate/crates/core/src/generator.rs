//! Generators of continuous monotone convolution semigroups.
//!
//! A generator is a holomorphic `u` on the disk with `Re u >= 0`, given here
//! through its Herglotz representation
//! `u(z) = ib + ∫ (w + z)/(w - z) dρ(w)`
//! with `ρ` a finite positive measure. The K-transforms of the semigroup
//! solve `dK_t/dt = v(K_t)` with `v(z) = -z u(z)`.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{check_in_disk, Error, Result};
use crate::measure::{canonical_angle, Atom};
use crate::series::TruncatedSeries;

/// Anything that drives a semigroup flow `dK/dt = v(K)` with `v(0) = 0`.
///
/// Implemented by [`HerglotzGenerator`] and by the branching generators of
/// [`crate::branching`].
pub trait VectorField {
    /// `u(z)` for `|z| < 1`.
    fn u(&self, z: Complex64) -> Complex64;

    /// `v(z) = -z u(z)`.
    fn v(&self, z: Complex64) -> Complex64 {
        -z * self.u(z)
    }

    /// Taylor series of `v` through order `n`.
    fn v_series(&self, n: usize) -> TruncatedSeries;

    /// `β = u(0) = -v'(0)`.
    fn beta(&self) -> Complex64;
}

/// Herglotz data `(b, ρ)`. The measure ρ is atomic plus an optional multiple
/// of Haar measure (which contributes a constant to `u`).
#[derive(Clone, Debug, PartialEq)]
pub struct HerglotzGenerator {
    b: f64,
    rho: Vec<Atom>,
    haar_mass: f64,
}

impl HerglotzGenerator {
    pub fn new(b: f64, rho: Vec<Atom>) -> Result<Self> {
        Self::with_haar_part(b, rho, 0.0)
    }

    /// `ρ = Σ atoms + haar_mass · Haar`.
    pub fn with_haar_part(b: f64, rho: Vec<Atom>, haar_mass: f64) -> Result<Self> {
        if !b.is_finite() || !haar_mass.is_finite() {
            return Err(Error::InvalidGenerator("non-finite parameter".into()));
        }
        if haar_mass < 0.0 {
            return Err(Error::InvalidGenerator(format!("negative Haar mass {haar_mass}")));
        }
        let mut atoms = Vec::with_capacity(rho.len());
        for a in rho {
            if !a.angle.is_finite() || !a.weight.is_finite() || a.weight < 0.0 {
                return Err(Error::InvalidGenerator(format!(
                    "atom weights must be finite and nonnegative, got {}",
                    a.weight
                )));
            }
            atoms.push(Atom::new(canonical_angle(a.angle), a.weight));
        }
        Ok(Self { b, rho: atoms, haar_mass })
    }

    /// `u ≡ c` for `c >= 0`, realised by a Haar component of mass `c`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::with_haar_part(0.0, Vec::new(), c)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn rho(&self) -> &[Atom] {
        &self.rho
    }

    pub fn haar_mass(&self) -> f64 {
        self.haar_mass
    }

    /// Total mass of ρ.
    pub fn total_mass(&self) -> f64 {
        self.haar_mass + self.rho.iter().map(|a| a.weight).sum::<f64>()
    }

    /// `u(z)`; fails outside the open disk.
    pub fn u_eval(&self, z: Complex64) -> Result<Complex64> {
        check_in_disk(z)?;
        Ok(self.u(z))
    }

    /// `v(z) = -z u(z)`; fails outside the open disk.
    pub fn v_eval(&self, z: Complex64) -> Result<Complex64> {
        check_in_disk(z)?;
        Ok(self.v(z))
    }

    /// Taylor series of `u` through order `n`: `u_0 = β` and
    /// `u_k = 2 Σ_j w_j conj(ω_j)^k` for `k >= 1`.
    pub fn u_series(&self, n: usize) -> TruncatedSeries {
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(self.beta());
        for k in 1..=n {
            let s: Complex64 = self
                .rho
                .iter()
                .map(|a| a.weight * Complex64::from_polar(1.0, -(k as f64) * a.angle))
                .sum();
            coeffs.push(2.0 * s);
        }
        TruncatedSeries::new(coeffs).expect("non-empty")
    }

    pub fn to_spec(&self) -> GeneratorSpec {
        GeneratorSpec { b: self.b, rho: self.rho.clone(), haar_mass: self.haar_mass }
    }
}

impl VectorField for HerglotzGenerator {
    fn u(&self, z: Complex64) -> Complex64 {
        if z.is_zero() {
            return self.beta();
        }
        let mut acc = Complex64::new(self.haar_mass, self.b);
        for a in &self.rho {
            let w = a.point();
            acc += a.weight * (w + z) / (w - z);
        }
        acc
    }

    fn v_series(&self, n: usize) -> TruncatedSeries {
        let u = self.u_series(n.saturating_sub(1));
        let mut coeffs = vec![Complex64::zero(); n + 1];
        for (c, &uk) in coeffs.iter_mut().skip(1).zip(u.coeffs()) {
            *c = -uk;
        }
        TruncatedSeries::new(coeffs).expect("non-empty")
    }

    fn beta(&self) -> Complex64 {
        Complex64::new(self.total_mass(), self.b)
    }
}

/// JSON schema: `{"b": .., "rho": [{"angle": .., "weight": ..}, ..]}` with an
/// optional `"haar_mass"` (default 0).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub b: f64,
    #[serde(default)]
    pub rho: Vec<Atom>,
    #[serde(default)]
    pub haar_mass: f64,
}

impl TryFrom<GeneratorSpec> for HerglotzGenerator {
    type Error = Error;

    fn try_from(spec: GeneratorSpec) -> Result<Self> {
        HerglotzGenerator::with_haar_part(spec.b, spec.rho, spec.haar_mass)
    }
}
