//! Moments, K-transforms and validity checks for a few circle measures.

use std::f64::consts::PI;

use monoconv::measure::{k_transform, toeplitz_min_eigenvalue, validate_k, Atom, CircleMeasure};
use num_complex::Complex64;

fn main() -> monoconv::Result<()> {
    let mu = CircleMeasure::atomic(vec![Atom::new(0.0, 0.5), Atom::new(PI / 2.0, 0.5)])?;
    let m = mu.moments(8)?;
    println!("moments of (δ_1 + δ_i)/2:");
    for (k, mk) in m.iter().enumerate() {
        println!("  m_{} = {:+.6} {:+.6}i", k + 1, mk.re, mk.im);
    }
    println!("min Toeplitz eigenvalue: {:.3e}", toeplitz_min_eigenvalue(&m));

    let k = k_transform(&mu, 8)?;
    println!("K-transform coefficients:");
    for (j, c) in k.series().coeffs().iter().enumerate().skip(1) {
        println!("  [z^{j}] = {:+.6} {:+.6}i", c.re, c.im);
    }
    println!("validate_k: {}", validate_k(&k).all_ok());

    let c = |x: f64| Complex64::new(x, 0.0);
    let bad = CircleMeasure::from_moments(vec![c(1.0), c(0.0), c(2.0), c(0.0)]);
    println!("moments [1, 0, 2, 0] rejected: {}", bad.is_err());
    Ok(())
}
