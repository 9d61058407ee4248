//! Finite-dimensional models of monotone independence.
//!
//! A [`MatrixModel`] is a state vector Ω with named operators. The monotone
//! product of two models lives on `H_1 ⊗ H_2` (standard Kronecker order, the
//! first factor indexing blocks) with `J_1(X) = X ⊗ P_2` and
//! `J_2(Y) = 1 ⊗ Y`, where `P_2` projects onto `Ω_2`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{k_from_psi, Atom, CircleMeasure};
use crate::series::TruncatedSeries;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance on `‖Ω‖ = 1`.
pub const STATE_NORM_TOL: f64 = 1e-12;
/// Relative tolerance of the power iteration in [`spectral_norm_estimate`].
pub const POWER_ITERATION_TOL: f64 = 1e-6;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixModel {
    state: CVector,
    operators: BTreeMap<String, CMatrix>,
}

impl MatrixModel {
    pub fn new(state: CVector, operators: BTreeMap<String, CMatrix>) -> Result<Self> {
        if state.is_empty() {
            return Err(Error::InvalidArgument("empty state vector".into()));
        }
        if (state.norm() - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvalidArgument(format!("state has norm {}", state.norm())));
        }
        let dim = state.len();
        for (name, op) in &operators {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::InvalidArgument(format!(
                    "operator {name} is {}x{}, expected {dim}x{dim}",
                    op.nrows(),
                    op.ncols()
                )));
            }
        }
        Ok(Self { state, operators })
    }

    /// Model with state `Ω` and no operators.
    pub fn with_state(state: CVector) -> Result<Self> {
        Self::new(state, BTreeMap::new())
    }

    pub fn with_operator(mut self, name: &str, op: CMatrix) -> Result<Self> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::InvalidArgument(format!("operator {name} has wrong shape")));
        }
        self.operators.insert(name.to_string(), op);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.state.len()
    }

    pub fn state(&self) -> &CVector {
        &self.state
    }

    pub fn operators(&self) -> &BTreeMap<String, CMatrix> {
        &self.operators
    }

    pub fn operator(&self, name: &str) -> Result<&CMatrix> {
        self.operators.get(name).ok_or_else(|| Error::UnknownOperator(name.to_string()))
    }

    /// `Φ(A) = ⟨Ω, AΩ⟩`.
    pub fn expectation(&self, a: &CMatrix) -> Complex64 {
        expectation(a, &self.state)
    }
}

/// `⟨Ω, AΩ⟩`.
pub fn expectation(a: &CMatrix, omega: &CVector) -> Complex64 {
    omega.dotc(&(a * omega))
}

/// Orthogonal projection onto `span{Ω}`.
pub fn projection(omega: &CVector) -> CMatrix {
    omega * omega.adjoint()
}

/// The monotone product model together with its two embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneProduct {
    pub model: MatrixModel,
    pub left_ops: Vec<String>,
    pub right_ops: Vec<String>,
    dims: (usize, usize),
    p2: CMatrix,
}

impl MonotoneProduct {
    /// `J_1(X) = X ⊗ P_2`.
    pub fn embed_left(&self, x: &CMatrix) -> CMatrix {
        x.kronecker(&self.p2)
    }

    /// `J_2(Y) = 1 ⊗ Y`.
    pub fn embed_right(&self, y: &CMatrix) -> CMatrix {
        CMatrix::identity(self.dims.0, self.dims.0).kronecker(y)
    }

    pub fn factor_dims(&self) -> (usize, usize) {
        self.dims
    }
}

/// Monotone product of two models. Operator names must be distinct across
/// the two models; they are kept unchanged.
pub fn monotone_product(m1: &MatrixModel, m2: &MatrixModel) -> Result<MonotoneProduct> {
    if let Some(name) = m1.operators.keys().find(|k| m2.operators.contains_key(*k)) {
        return Err(Error::InvalidArgument(format!("operator name {name} used by both models")));
    }
    let p2 = projection(&m2.state);
    let state = m1.state.kronecker(&m2.state);
    let mut ops = BTreeMap::new();
    let id1 = CMatrix::identity(m1.dim(), m1.dim());
    for (name, x) in &m1.operators {
        ops.insert(name.clone(), x.kronecker(&p2));
    }
    for (name, y) in &m2.operators {
        ops.insert(name.clone(), id1.kronecker(y));
    }
    Ok(MonotoneProduct {
        model: MatrixModel { state, operators: ops },
        left_ops: m1.operators.keys().cloned().collect(),
        right_ops: m2.operators.keys().cloned().collect(),
        dims: (m1.dim(), m2.dim()),
        p2,
    })
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Random products of 1..=`max_len` operators drawn from `names`.
fn random_word(model: &MatrixModel, names: &[String], max_len: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    let len = rng.gen_range(1..=max_len);
    let mut acc = CMatrix::identity(model.dim(), model.dim());
    for _ in 0..len {
        let name = &names[rng.gen_range(0..names.len())];
        acc *= model.operator(name)?;
    }
    Ok(acc)
}

/// Largest violation of the two monotone independence conditions over
/// `samples` random words of length up to `word_len` in each algebra:
/// `‖XYZ - Φ(Y)XZ‖` for `X, Z` left and `Y` right, and
/// `|Φ(XYZ) - Φ(X)Φ(Y)Φ(Z)|` for `Y` left and `X, Z` right.
pub fn check_monotone_independence(
    model: &MatrixModel,
    left_ops: &[String],
    right_ops: &[String],
    word_len: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    for name in left_ops.iter().chain(right_ops) {
        model.operator(name)?;
    }
    if left_ops.is_empty() || right_ops.is_empty() || word_len == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = random_word(model, left_ops, word_len, &mut rng)?;
        let y = random_word(model, right_ops, word_len, &mut rng)?;
        let z = random_word(model, left_ops, word_len, &mut rng)?;
        let a = &x * &y * &z - &x * &z * model.expectation(&y);
        worst = worst.max(operator_norm(&a));

        let x = random_word(model, right_ops, word_len, &mut rng)?;
        let y = random_word(model, left_ops, word_len, &mut rng)?;
        let z = random_word(model, right_ops, word_len, &mut rng)?;
        let lhs = model.expectation(&(&x * &y * &z));
        let rhs = model.expectation(&x) * model.expectation(&y) * model.expectation(&z);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Spectral norm by power iteration on `A*A`, stopping when successive
/// estimates agree to [`POWER_ITERATION_TOL`] relative.
pub fn spectral_norm_estimate(a: &CMatrix) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let ata = a.adjoint() * a;
    // Deterministic start with generic components.
    let mut v = CVector::from_iterator(n, (0..n).map(|j| Complex64::new(1.0, 0.1 * (j as f64 + 1.0).sqrt())));
    v /= c(v.norm());
    let mut est = 0.0;
    for _ in 0..10_000 {
        let w = &ata * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm.sqrt();
        v = w / c(norm);
        if (next - est).abs() <= POWER_ITERATION_TOL * next {
            return next;
        }
        est = next;
    }
    est
}

fn is_unitary(x: &CMatrix) -> bool {
    let n = x.nrows();
    (x.adjoint() * x - CMatrix::identity(n, n)).iter().all(|e| e.norm() < 1e-10)
}

/// `K_X(z) = ψ/(1+ψ)` with `ψ = ⟨Ω, zX(1 - zX)^{-1}Ω⟩`, for
/// `|z| < 1/‖X‖` or, for unitary `X`, `|z| < 1`.
pub fn k_operator(x: &CMatrix, omega: &CVector, z: Complex64) -> Result<Complex64> {
    if x.nrows() != x.ncols() || x.nrows() != omega.len() {
        return Err(Error::InvalidArgument("operator and state dimensions differ".into()));
    }
    let radius = if is_unitary(x) { 1.0 } else { 1.0 / spectral_norm_estimate(x) };
    if z.norm() >= radius {
        return Err(Error::InvalidArgument(format!(
            "|z| = {} outside the resolvent disk of radius {radius}",
            z.norm()
        )));
    }
    k_operator_unchecked(x, omega, z)
}

/// As [`k_operator`] without the radius gate; valid wherever `1 - zX` is
/// invertible.
pub(crate) fn k_operator_unchecked(x: &CMatrix, omega: &CVector, z: Complex64) -> Result<Complex64> {
    let n = x.nrows();
    let m = CMatrix::identity(n, n) - x * z;
    let w = m
        .lu()
        .solve(omega)
        .ok_or_else(|| Error::Singular(format!("1 - zX is singular at z = {z}")))?;
    let psi = omega.dotc(&(x * &w * z));
    Ok(psi / (Complex64::one() + psi))
}

/// `⟨Ω, X^k Ω⟩` for `k = 1..=n`.
pub fn operator_moments(x: &CMatrix, omega: &CVector, n: usize) -> Vec<Complex64> {
    let mut v = omega.clone();
    (0..n)
        .map(|_| {
            v = x * &v;
            omega.dotc(&v)
        })
        .collect()
}

/// Truncated K-series of the distribution of `X` in the state Ω.
pub fn k_series_of_operator(x: &CMatrix, omega: &CVector, n: usize) -> Result<TruncatedSeries> {
    let mut coeffs = vec![Complex64::zero()];
    coeffs.extend(operator_moments(x, omega, n));
    k_from_psi(&TruncatedSeries::new(coeffs)?)
}

/// `scalar · 1 + op`, with `op` the name of a left operator (or absent).
#[derive(Clone, Debug, PartialEq)]
pub struct LeftAffine {
    pub scalar: Complex64,
    pub op: Option<String>,
}

impl LeftAffine {
    pub fn scalar(s: Complex64) -> Self {
        Self { scalar: s, op: None }
    }

    pub fn new(scalar: Complex64, op: &str) -> Self {
        Self { scalar, op: Some(op.to_string()) }
    }

    fn matrix(&self, p: &MonotoneProduct) -> Result<CMatrix> {
        let n = p.model.dim();
        let mut m = CMatrix::identity(n, n) * self.scalar;
        if let Some(name) = &self.op {
            if !p.left_ops.contains(name) {
                return Err(Error::Hypothesis(format!("{name} is not a left operator")));
            }
            m += p.model.operator(name)?;
        }
        Ok(m)
    }
}

/// `max_z |K_{V_1 W V_2}(z) - K_{V_1 V_2}(K_W(z))|` over `z_grid`.
///
/// With `V_i = λ_i + A_i` and `A_i` in the left algebra,
/// `V_2 V_1 - 1 = λ_1 λ_2 - 1 + (left algebra)`; the left image contains
/// no nonzero scalar unless the second factor is one-dimensional, so the
/// hypothesis is `λ_1 λ_2 = 1` in that case.
pub fn verify_theorem_operators(
    p: &MonotoneProduct,
    v1: &LeftAffine,
    v2: &LeftAffine,
    w: &str,
    z_grid: &[Complex64],
) -> Result<f64> {
    if !p.right_ops.iter().any(|r| r == w) {
        return Err(Error::Hypothesis(format!("{w} is not a right operator")));
    }
    if p.dims.1 > 1 && (v1.scalar * v2.scalar - 1.0).norm() > 1e-12 {
        return Err(Error::Hypothesis(format!(
            "V2 V1 - 1 has scalar part {}",
            v1.scalar * v2.scalar - 1.0
        )));
    }
    let a = v1.matrix(p)?;
    let b = v2.matrix(p)?;
    let w = p.model.operator(w)?;
    let omega = p.model.state();
    let awb = &a * w * &b;
    let ab = &a * &b;
    let radius = (1.0 / spectral_norm_estimate(&awb)).min(1.0 / spectral_norm_estimate(w));
    let mut worst = 0.0f64;
    for &z in z_grid {
        if z.norm() >= radius {
            return Err(Error::InvalidArgument(format!("|z| = {} exceeds {radius}", z.norm())));
        }
        let lhs = k_operator_unchecked(&awb, omega, z)?;
        let rhs = k_operator_unchecked(&ab, omega, k_operator_unchecked(w, omega, z)?)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Principal square root of a Hermitian positive semidefinite matrix by
/// eigendecomposition.
pub fn hermitian_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let herm_err = (a - a.adjoint()).iter().map(|e| e.norm()).fold(0.0, f64::max);
    if herm_err > 1e-12 * (1.0 + operator_norm(a)) {
        return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
    }
    let eig = a.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().map(|l| l.abs()).fold(1.0, f64::max);
    let mut roots = Vec::with_capacity(eig.eigenvalues.len());
    for &l in eig.eigenvalues.iter() {
        if l < -1e-12 * scale {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {l}")));
        }
        roots.push(c(l.max(0.0).sqrt()));
    }
    let d = CMatrix::from_diagonal(&CVector::from_vec(roots));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Haar-distributed unitary from the QR factorisation of a complex Gaussian
/// matrix, with the phases of `diag R` absorbed into Q.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = random_gaussian(n, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::one() };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn random_gaussian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    let v = CVector::from_fn(n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let norm = v.norm();
    v / c(norm)
}

/// Gaussian matrix rescaled to spectral norm `norm`.
fn random_bounded(n: usize, norm: f64, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = random_gaussian(n, rng);
    let s = operator_norm(&g);
    if s == 0.0 {
        g
    } else {
        g * c(norm / s)
    }
}

/// Outcome of one randomised check of the operator identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremCase {
    pub seed: u64,
    pub dims: (usize, usize),
    pub theorem_defect: f64,
    pub independence_defect: f64,
}

/// Grid of 24 points on `|z| ∈ {0.05, 0.1, 0.2}`.
pub fn small_z_grid() -> Vec<Complex64> {
    let mut g = Vec::new();
    for r in [0.05, 0.1, 0.2] {
        for j in 0..8 {
            g.push(Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / 8.0 + 0.3));
        }
    }
    g
}

/// Builds a random monotone product with factor dimensions in `1..=6`,
/// `V_1 = e^{iθ} + A`, `V_2 = e^{-iθ} + B` and `W` in the right algebra, and
/// measures the defect of the operator identity on [`small_z_grid`].
pub fn random_theorem_case(seed: u64) -> Result<TheoremCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d1 = rng.gen_range(1..=6);
    let d2 = rng.gen_range(1..=6);
    let m1 = MatrixModel::with_state(random_state(d1, &mut rng))?
        .with_operator("A", random_bounded(d1, 0.5, &mut rng))?
        .with_operator("B", random_bounded(d1, 0.5, &mut rng))?;
    let m2 = MatrixModel::with_state(random_state(d2, &mut rng))?
        .with_operator("W", random_bounded(d2, 1.0, &mut rng))?
        .with_operator("W2", random_bounded(d2, 1.0, &mut rng))?;
    let p = monotone_product(&m1, &m2)?;
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let v1 = LeftAffine::new(Complex64::from_polar(1.0, theta), "A");
    let v2 = LeftAffine::new(Complex64::from_polar(1.0, -theta), "B");
    let theorem_defect = verify_theorem_operators(&p, &v1, &v2, "W", &small_z_grid())?;
    let independence_defect =
        check_monotone_independence(&p.model, &p.left_ops, &p.right_ops, 3, 20, seed)?;
    Ok(TheoremCase { seed, dims: (d1, d2), theorem_defect, independence_defect })
}

/// Summary over `cases` consecutive seeds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpsReport {
    pub seed: u64,
    pub cases: usize,
    pub max_theorem_defect: f64,
    pub max_independence_defect: f64,
    pub worst_case_seed: Option<u64>,
}

pub fn verify_random_cases(seed: u64, cases: usize) -> Result<OpsReport> {
    let mut report = OpsReport {
        seed,
        cases,
        max_theorem_defect: 0.0,
        max_independence_defect: 0.0,
        worst_case_seed: None,
    };
    for i in 0..cases as u64 {
        let case = random_theorem_case(seed.wrapping_add(i))?;
        if report.worst_case_seed.is_none() || case.theorem_defect > report.max_theorem_defect {
            report.worst_case_seed = Some(case.seed);
        }
        report.max_theorem_defect = report.max_theorem_defect.max(case.theorem_defect);
        report.max_independence_defect = report.max_independence_defect.max(case.independence_defect);
    }
    Ok(report)
}

/// Diagonal unitary model of an atomic circle measure: `U = diag(e^{iθ_j})`
/// with `Ω_j = sqrt(w_j)`.
pub fn unitary_model(atoms: &[Atom]) -> Result<(CMatrix, CVector)> {
    if atoms.is_empty() {
        return Err(Error::InvalidMeasure("no atoms".into()));
    }
    let u = CMatrix::from_diagonal(&CVector::from_iterator(atoms.len(), atoms.iter().map(|a| a.point())));
    let omega = CVector::from_iterator(atoms.len(), atoms.iter().map(|a| c(a.weight.sqrt())));
    Ok((u, omega))
}

/// Moments `m_1..m_n` of `UV` where `U - 1 = J_1(U_μ - 1)` and
/// `V = J_2(U_ν)` realise the atomic measures μ and ν.
pub fn unitary_product_moments(mu: &CircleMeasure, nu: &CircleMeasure, n: usize) -> Result<Vec<Complex64>> {
    let atoms = |m: &CircleMeasure| {
        m.atoms()
            .map(|a| a.to_vec())
            .ok_or_else(|| Error::InvalidMeasure("operator model needs atomic measures".into()))
    };
    let (u, o1) = unitary_model(&atoms(mu)?)?;
    let (v, o2) = unitary_model(&atoms(nu)?)?;
    let d1 = u.nrows();
    let m1 = MatrixModel::with_state(o1)?.with_operator("U-1", u - CMatrix::identity(d1, d1))?;
    let m2 = MatrixModel::with_state(o2)?.with_operator("V", v)?;
    let p = monotone_product(&m1, &m2)?;
    let dim = p.model.dim();
    let big_u = CMatrix::identity(dim, dim) + p.model.operator("U-1")?;
    let big_v = p.model.operator("V")?;
    Ok(operator_moments(&(big_u * big_v), p.model.state(), n))
}

/// `M(a) = [[1, a], [a, 1]]`.
pub fn m_matrix(a: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0), c(a), c(a), c(1.0)])
}

/// `sqrt(M(a))` by the explicit formula
/// `((√(1+a) ± √(1-a))/2)` on the diagonal and off-diagonal.
pub fn sqrt_m_explicit(a: f64) -> CMatrix {
    let (p, m) = ((1.0 + a).sqrt(), (1.0 - a).sqrt());
    let d = c((p + m) / 2.0);
    let o = c((p - m) / 2.0);
    CMatrix::from_row_slice(2, 2, &[d, o, o, d])
}

/// Permutation `e_i ⊗ e_j ↦ e_j ⊗ e_i` on `C^2 ⊗ C^2`.
fn swap_2x2() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            s[(2 * j + i, 2 * i + j)] = Complex64::one();
        }
    }
    s
}

/// The pair `X = 1 + J_1(M(a) - 1)`, `Y = J_2(M(b))` in the standard
/// Kronecker convention, with the state `e_2 ⊗ e_2 = e_4`.
pub fn counterexample_pair(a: f64, b: f64) -> Result<(CMatrix, CMatrix, MonotoneProduct)> {
    let omega = CVector::from_vec(vec![Complex64::zero(), Complex64::one()]);
    let m1 = MatrixModel::with_state(omega.clone())?
        .with_operator("M(a)-1", m_matrix(a) - CMatrix::identity(2, 2))?;
    let m2 = MatrixModel::with_state(omega)?.with_operator("M(b)", m_matrix(b))?;
    let p = monotone_product(&m1, &m2)?;
    let x = CMatrix::identity(4, 4) + p.model.operator("M(a)-1")?;
    let y = p.model.operator("M(b)")?.clone();
    Ok((x, y, p))
}

/// Block forms of `X`, `Y`, `√X`, `√Y`, in which the tensor factors are
/// written in the opposite order (the second factor indexes blocks).
fn swapped_block_forms(a: f64, b: f64) -> [CMatrix; 4] {
    let (pa, ma) = ((1.0 + a).sqrt(), (1.0 - a).sqrt());
    let (pb, mb) = ((1.0 + b).sqrt(), (1.0 - b).sqrt());
    let (sa, da) = ((pa + ma) / 2.0, (pa - ma) / 2.0);
    let (sb, db) = ((pb + mb) / 2.0, (pb - mb) / 2.0);
    let r = |v: [f64; 16]| CMatrix::from_row_slice(4, 4, &v.map(c));
    [
        r([1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, a, 0.0, 0.0, a, 1.0]),
        r([1.0, 0.0, b, 0.0, 0.0, 1.0, 0.0, b, b, 0.0, 1.0, 0.0, 0.0, b, 0.0, 1.0]),
        r([1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, sa, da, 0.0, 0.0, da, sa]),
        r([sb, 0.0, db, 0.0, 0.0, sb, 0.0, db, db, 0.0, sb, 0.0, 0.0, db, 0.0, sb]),
    ]
}

/// Closed-form spectrum `1 ± a/2 ± sqrt(a² + 4(1 ± a) b²)/2`, sorted.
pub fn counterexample_eigenvalues(a: f64, b: f64) -> Vec<f64> {
    let sp = (a * a + 4.0 * (1.0 + a) * b * b).sqrt();
    let sm = (a * a + 4.0 * (1.0 - a) * b * b).sqrt();
    let mut ev = vec![
        1.0 + a / 2.0 + sp / 2.0,
        1.0 + a / 2.0 - sp / 2.0,
        1.0 - a / 2.0 + sm / 2.0,
        1.0 - a / 2.0 - sm / 2.0,
    ];
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub a: f64,
    pub b: f64,
    /// `max |√M(a) - explicit formula|` entrywise.
    pub sqrt_formula_error: f64,
    /// Entrywise distance of `X, Y, √X, √Y` to their block forms after
    /// swapping tensor factors.
    pub block_form_error: f64,
    pub eigenvalues_sqrt_x_y_sqrt_x: Vec<f64>,
    pub eigenvalues_sqrt_y_x_sqrt_y: Vec<f64>,
    pub eigenvalues_formula: Vec<f64>,
    /// Largest deviation among the three eigenvalue lists.
    pub eigenvalue_error: f64,
    pub second_moment_sqrt_x_y_sqrt_x: f64,
    pub second_moment_sqrt_y_x_sqrt_y: f64,
    /// `1 + b² + a²`.
    pub predicted_sqrt_x_y_sqrt_x: f64,
    /// `1 + b² + (a²/2)(1 + sqrt(1 - b²))`.
    pub predicted_sqrt_y_x_sqrt_y: f64,
    /// `|K_{√XY√X}(z) - K_X(K_Y(z))|` maximised over a small grid.
    pub composition_defect: f64,
}

impl CounterexampleReport {
    pub fn second_moment_error(&self) -> f64 {
        (self.second_moment_sqrt_x_y_sqrt_x - self.predicted_sqrt_x_y_sqrt_x)
            .abs()
            .max((self.second_moment_sqrt_y_x_sqrt_y - self.predicted_sqrt_y_x_sqrt_y).abs())
    }
}

fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|e| e.norm()).fold(0.0, f64::max)
}

/// Two candidate multiplicative convolutions on `R_+`, `√X Y √X` and
/// `√Y X √Y`, share a spectrum but not their distributions.
pub fn spectral_counterexample(a: f64, b: f64) -> Result<CounterexampleReport> {
    for (name, v) in [("a", a), ("b", b)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidArgument(format!("{name} = {v} must lie in (0, 1)")));
        }
    }
    let (x, y, p) = counterexample_pair(a, b)?;
    let omega = p.model.state().clone();
    let sx = hermitian_sqrt(&x)?;
    let sy = hermitian_sqrt(&y)?;
    let sqrt_formula_error = max_entry_diff(&hermitian_sqrt(&m_matrix(a))?, &sqrt_m_explicit(a));

    let s = swap_2x2();
    let blocks = swapped_block_forms(a, b);
    let block_form_error = [&x, &y, &sx, &sy]
        .iter()
        .zip(&blocks)
        .map(|(m, d)| max_entry_diff(&(&s * *m * &s), d))
        .fold(0.0, f64::max);

    let xyx = &sx * &y * &sx;
    let yxy = &sy * &x * &sy;
    let e1 = hermitian_eigenvalues(&xyx);
    let e2 = hermitian_eigenvalues(&yxy);
    let ef = counterexample_eigenvalues(a, b);
    let eigenvalue_error = e1
        .iter()
        .zip(&e2)
        .zip(&ef)
        .map(|((p, q), r)| (p - q).abs().max((p - r).abs()).max((q - r).abs()))
        .fold(0.0, f64::max);

    let m2 = |m: &CMatrix| expectation(&(m * m), &omega).re;
    let composition_defect = small_z_grid()
        .iter()
        .map(|&z| -> Result<f64> {
            let lhs = k_operator_unchecked(&xyx, &omega, z)?;
            let rhs = k_operator_unchecked(&x, &omega, k_operator_unchecked(&y, &omega, z)?)?;
            Ok((lhs - rhs).norm())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    Ok(CounterexampleReport {
        a,
        b,
        sqrt_formula_error,
        block_form_error,
        eigenvalues_sqrt_x_y_sqrt_x: e1,
        eigenvalues_sqrt_y_x_sqrt_y: e2,
        eigenvalues_formula: ef,
        eigenvalue_error,
        second_moment_sqrt_x_y_sqrt_x: m2(&xyx),
        second_moment_sqrt_y_x_sqrt_y: m2(&yxy),
        predicted_sqrt_x_y_sqrt_x: 1.0 + b * b + a * a,
        predicted_sqrt_y_x_sqrt_y: 1.0 + b * b + a * a / 2.0 * (1.0 + (1.0 - b * b).sqrt()),
        composition_defect,
    })
}
