//! Product functionals on the free product `C[x_1] ⊔ C[x_2]` of two
//! one-generator algebras: the monotone product and the conditionally free
//! product, evaluated on words.

use std::collections::HashMap;
use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::CircleMeasure;

/// Longest word accepted by [`cfree_eval`].
pub const MAX_WORD_LEN: usize = 16;

/// `x_algebra^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub algebra: u8,
    pub power: u32,
}

impl Letter {
    pub fn new(algebra: u8, power: u32) -> Result<Self> {
        if algebra != 1 && algebra != 2 {
            return Err(Error::InvalidArgument(format!("algebra index {algebra} must be 1 or 2")));
        }
        Ok(Self { algebra, power })
    }
}

/// A word in canonical form: no unit letters, alternating algebras.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    /// Canonicalises: drops power-0 letters and merges equal-algebra
    /// neighbours.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if l.power == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.algebra == l.algebra => last.power += l.power,
                _ => out.push(l),
            }
        }
        Self { letters: out }
    }

    /// Builds a word from `(algebra, power)` pairs.
    pub fn from_pairs(pairs: &[(u8, u32)]) -> Result<Self> {
        let letters = pairs.iter().map(|&(a, p)| Letter::new(a, p)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(letters))
    }

    /// Parses e.g. `"x1^2 x2 x1"`; the empty string is the unit.
    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let bad = || Error::Input(format!("cannot parse letter {tok:?}"));
            let rest = tok.strip_prefix('x').ok_or_else(bad)?;
            let (alg, pow) = match rest.split_once('^') {
                Some((a, p)) => (a, p.parse::<u32>().map_err(|_| bad())?),
                None => (rest, 1),
            };
            letters.push(Letter::new(alg.parse().map_err(|_| bad())?, pow)?);
        }
        Ok(Self::new(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Swaps the algebra labels 1 and 2.
    pub fn mirror(&self) -> Self {
        Self {
            letters: self
                .letters
                .iter()
                .map(|l| Letter { algebra: 3 - l.algebra, power: l.power })
                .collect(),
        }
    }

    /// Total power of each algebra.
    pub fn degrees(&self) -> (u32, u32) {
        self.letters.iter().fold((0, 0), |(a, b), l| match l.algebra {
            1 => (a + l.power, b),
            _ => (a, b + l.power),
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if l.power == 1 {
                write!(f, "x{}", l.algebra)?;
            } else {
                write!(f, "x{}^{}", l.algebra, l.power)?;
            }
        }
        Ok(())
    }
}

/// Every canonical word with `1..=max_len` letters and powers in
/// `1..=max_power`.
pub fn canonical_words(max_len: usize, max_power: u32) -> Vec<Word> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            let algebras: &[u8] = match w.last() {
                None => &[1, 2],
                Some(l) if l.algebra == 1 => &[2],
                Some(_) => &[1],
            };
            for &a in algebras {
                for p in 1..=max_power {
                    let mut v = w.clone();
                    v.push(Letter { algebra: a, power: p });
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned().map(|letters| Word { letters }));
        frontier = next;
    }
    out
}

/// Unital functional on `C[x]` given by its moments `m_1..m_N`
/// (`m_0 = 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct MomentFunctional<T> {
    moments: Vec<T>,
}

impl<T: Clone + Num> MomentFunctional<T> {
    pub fn new(moments: Vec<T>) -> Self {
        Self { moments }
    }

    /// `δ(λ1 + a_0) = λ`: all moments vanish.
    pub fn delta(order: usize) -> Self {
        Self { moments: vec![T::zero(); order] }
    }

    pub fn order(&self) -> usize {
        self.moments.len()
    }

    pub fn moments(&self) -> &[T] {
        &self.moments
    }

    /// `m_k`, with `m_0 = 1`.
    pub fn get(&self, k: u32) -> Result<T> {
        let k = k as usize;
        if k == 0 {
            return Ok(T::one());
        }
        self.moments
            .get(k - 1)
            .cloned()
            .ok_or(Error::MomentOrderExceeded { requested: k, available: self.moments.len() })
    }
}

impl MomentFunctional<Complex64> {
    /// Moments of a circle measure.
    pub fn of_measure(mu: &CircleMeasure, order: usize) -> Result<Self> {
        Ok(Self::new(mu.moments(order)?))
    }

    /// Moments of `x - 1` from those of `x`:
    /// `φ((x - 1)^j) = Σ_i C(j, i) (-1)^{j-i} m_i`.
    pub fn shifted_by_one(&self) -> Self {
        let n = self.moments.len();
        let mut out = Vec::with_capacity(n);
        for j in 1..=n {
            let mut acc = Complex64::zero();
            let mut binom = 1.0;
            for i in 0..=j {
                let sign = if (j - i) % 2 == 0 { 1.0 } else { -1.0 };
                let m = if i == 0 { Complex64::one() } else { self.moments[i - 1] };
                acc += sign * binom * m;
                binom = binom * (j - i) as f64 / (i + 1) as f64;
            }
            out.push(acc);
        }
        Self::new(out)
    }
}

/// `φ_1 ▷ φ_2` on a word: the algebra-2 letters factor out through `φ_2`
/// and the algebra-1 letters (which have no unit part) multiply together
/// under `φ_1`.
pub fn monotone_eval<T: Clone + Num>(
    word: &Word,
    phi1: &MomentFunctional<T>,
    phi2: &MomentFunctional<T>,
) -> Result<T> {
    let (d1, _) = word.degrees();
    let mut acc = phi1.get(d1)?;
    for l in word.letters.iter().filter(|l| l.algebra == 2) {
        acc = acc * phi2.get(l.power)?;
    }
    Ok(acc)
}

/// Evaluates the conditionally free pair `(φ, ψ)` on words, memoising on
/// canonical words.
///
/// Writing each letter as `(a - ψ(a)) + ψ(a)` and expanding,
/// `φ(a_1⋯a_n) = Π(φ(a_i) - ψ(a_i)) - Σ_{∅≠R} (-1)^{|R|} Π_{i∈R} ψ(a_i) φ(a_{[n]∖R})`
/// and likewise for ψ with the leading product replaced by 0. Subsets `R`
/// containing a letter with `ψ(a_i) = 0` contribute nothing and are skipped.
pub struct CFreeEvaluator<'a, T> {
    phi: [&'a MomentFunctional<T>; 2],
    psi: [&'a MomentFunctional<T>; 2],
    memo: HashMap<Word, (T, T)>,
}

impl<'a, T: Clone + Num + Neg<Output = T>> CFreeEvaluator<'a, T> {
    pub fn new(
        phi1: &'a MomentFunctional<T>,
        psi1: &'a MomentFunctional<T>,
        phi2: &'a MomentFunctional<T>,
        psi2: &'a MomentFunctional<T>,
    ) -> Self {
        Self { phi: [phi1, phi2], psi: [psi1, psi2], memo: HashMap::new() }
    }

    /// `(φ(w), ψ(w))`.
    pub fn eval(&mut self, word: &Word) -> Result<(T, T)> {
        if word.len() > MAX_WORD_LEN {
            return Err(Error::WordTooLong { len: word.len(), max: MAX_WORD_LEN });
        }
        if let Some(v) = self.memo.get(word) {
            return Ok(v.clone());
        }
        let v = self.eval_uncached(word)?;
        self.memo.insert(word.clone(), v.clone());
        Ok(v)
    }

    fn eval_uncached(&mut self, word: &Word) -> Result<(T, T)> {
        let n = word.len();
        if n == 0 {
            return Ok((T::one(), T::one()));
        }
        let mut phis = Vec::with_capacity(n);
        let mut psis = Vec::with_capacity(n);
        for l in &word.letters {
            let i = (l.algebra - 1) as usize;
            phis.push(self.phi[i].get(l.power)?);
            psis.push(self.psi[i].get(l.power)?);
        }
        if n == 1 {
            return Ok((phis[0].clone(), psis[0].clone()));
        }
        let mut centered = T::one();
        for (p, q) in phis.iter().zip(&psis) {
            centered = centered * (p.clone() - q.clone());
        }
        let active: Vec<usize> = (0..n).filter(|&i| !psis[i].is_zero()).collect();
        let mut acc_phi = T::zero();
        let mut acc_psi = T::zero();
        for mask in 1u32..(1 << active.len()) {
            let mut coef = T::one();
            let mut keep = vec![true; n];
            for (bit, &i) in active.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    coef = coef * -psis[i].clone();
                    keep[i] = false;
                }
            }
            let sub = Word::new(word.letters.iter().zip(&keep).filter(|(_, k)| **k).map(|(l, _)| *l));
            let (p, q) = self.eval(&sub)?;
            acc_phi = acc_phi + coef.clone() * p;
            acc_psi = acc_psi + coef * q;
        }
        Ok((centered - acc_phi, T::zero() - acc_psi))
    }

    /// Number of memoised words.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

/// `(φ_1 _{ψ_1}*_{ψ_2} φ_2)(word)`.
pub fn cfree_eval<T: Clone + Num + Neg<Output = T>>(
    word: &Word,
    phi1: &MomentFunctional<T>,
    psi1: &MomentFunctional<T>,
    phi2: &MomentFunctional<T>,
    psi2: &MomentFunctional<T>,
) -> Result<T> {
    Ok(CFreeEvaluator::new(phi1, psi1, phi2, psi2).eval(word)?.0)
}

/// Seeded rational moments `p/q` with `|p| <= 6` and `q ∈ 1..=4`.
pub fn random_rational_moments(order: usize, rng: &mut ChaCha8Rng) -> MomentFunctional<BigRational> {
    MomentFunctional::new(
        (0..order)
            .map(|_| {
                BigRational::new(BigInt::from(rng.gen_range(-6i64..=6)), BigInt::from(rng.gen_range(1i64..=4)))
            })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecializationReport {
    pub seed: u64,
    pub max_len: usize,
    pub max_power: u32,
    pub words_checked: usize,
    /// Words where the c-free value with `(ψ_1, ψ_2) = (δ, φ_2)` differs from
    /// the monotone value (exact comparison).
    pub mismatches: usize,
    /// Largest `|difference|` as a float.
    pub max_defect: f64,
    pub first_mismatch: Option<String>,
}

/// Checks `φ_1 _δ*_{φ_2} φ_2 = φ_1 ▷ φ_2` exactly on every canonical word
/// up to the given length and power, with seeded rational moments.
pub fn check_monotone_specialization(seed: u64, max_len: usize, max_power: u32) -> Result<SpecializationReport> {
    let order = max_len * max_power as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi1 = random_rational_moments(order, &mut rng);
    let phi2 = random_rational_moments(order, &mut rng);
    let delta = MomentFunctional::delta(order);
    let mut ev = CFreeEvaluator::new(&phi1, &delta, &phi2, &phi2);
    let words = canonical_words(max_len, max_power);
    let mut report = SpecializationReport {
        seed,
        max_len,
        max_power,
        words_checked: words.len(),
        mismatches: 0,
        max_defect: 0.0,
        first_mismatch: None,
    };
    for w in &words {
        let c = ev.eval(w)?.0;
        let m = monotone_eval(w, &phi1, &phi2)?;
        if c != m {
            report.mismatches += 1;
            let d = rational_to_f64(&(c - m)).abs();
            report.max_defect = report.max_defect.max(d);
            if report.first_mismatch.is_none() {
                report.first_mismatch = Some(w.to_string());
            }
        }
    }
    Ok(report)
}

fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// Moments `Φ((UV)^k)`, `k = 1..=n`, of the monotone product of the moment
/// functionals of μ and ν, expanding `U = 1 + a` with `a = U - 1` in the
/// non-unital part and evaluating every resulting word with
/// [`monotone_eval`]. Agrees with the moments of `μ ▷ ν`.
pub fn unitary_product_moments_via_words(mu: &CircleMeasure, nu: &CircleMeasure, n: usize) -> Result<Vec<Complex64>> {
    if n > MAX_WORD_LEN {
        return Err(Error::WordTooLong { len: n, max: MAX_WORD_LEN });
    }
    let a_moments = MomentFunctional::of_measure(mu, n)?.shifted_by_one();
    let v_moments = MomentFunctional::of_measure(nu, n)?;
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = Complex64::zero();
        // Bit i set: the i-th U contributes `a`, otherwise `1`.
        for mask in 0u32..(1 << k) {
            let letters = (0..k).flat_map(|i| {
                [Letter { algebra: 1, power: (mask >> i) & 1 }, Letter { algebra: 2, power: 1 }]
            });
            acc += monotone_eval(&Word::new(letters), &a_moments, &v_moments)?;
        }
        out.push(acc);
    }
    Ok(out)
}
