//! Monotone convolution as composition of K-transforms.

use std::f64::consts::PI;

use monoconv::convolution::{monotone_convolve, monotone_power};
use monoconv::measure::{Atom, CircleMeasure};

fn main() -> monoconv::Result<()> {
    let two_point = CircleMeasure::atomic(vec![Atom::new(0.0, 0.5), Atom::new(PI, 0.5)])?;
    let sq = monotone_power(&two_point, 2, 12)?;
    println!("(two-point)^2, moments 1..12:");
    for (k, m) in sq.moments(12)?.iter().enumerate() {
        println!("  m_{:<2} = {:+.12}", k + 1, m.re);
    }

    let mu = CircleMeasure::atomic(vec![Atom::new(0.3, 0.25), Atom::new(2.0, 0.75)])?;
    let nu = CircleMeasure::dirac(1.1);
    let conv = monotone_convolve(&mu, &nu, 6)?;
    println!("μ ▷ δ_{{e^{{1.1i}}}}, first moments:");
    for (k, m) in conv.moments(6)?.iter().enumerate() {
        println!("  m_{} = {:+.9} {:+.9}i", k + 1, m.re, m.im);
    }
    Ok(())
}
