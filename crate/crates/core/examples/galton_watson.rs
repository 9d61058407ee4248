//! Monte-Carlo Galton-Watson generating functions against iterated pgfs.

use monoconv::branching::{gw_k_link, gw_simulate, OffspringLaw};
use monoconv::measure::validate_k;
use num_complex::Complex64;

fn main() -> monoconv::Result<()> {
    let law = OffspringLaw::new(vec![0.0, 0.5, 0.5])?;
    let zs: Vec<Complex64> = [0.3, 0.5, 0.8].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    println!("{:>5} {:>14} {:>14} {:>8}", "z", "empirical", "theory", "sigmas");
    for e in gw_simulate(&law, 5, 100_000, &zs, 7)? {
        println!("{:>5.2} {:>14.8} {:>14.8} {:>8.3}", e.z.re, e.empirical.re, e.theory.re, e.sigmas());
    }
    let k = gw_k_link(&law, 32)?;
    println!("pgf is a valid K-transform: {}", validate_k(&k).all_ok());
    Ok(())
}
