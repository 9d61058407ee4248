//! Integrate the Yule flow and compare it with the closed form and with
//! the coefficient recursion.

use monoconv::branching::{yule_closed_form, BranchingGenerator};
use monoconv::semigroup::{evolve_pointwise, first_moment_law, k_t_coefficients, semigroup_defect};
use num_complex::Complex64;

fn main() -> monoconv::Result<()> {
    let (alpha, k) = (1.0, 3);
    let gen = BranchingGenerator::yule(alpha, k)?;
    let t = 0.5;
    let coeffs = k_t_coefficients(&gen, t, 20)?;
    println!("{:>12} {:>30} {:>30} {:>30}", "z", "ode", "closed form", "series");
    for z in [Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.25), Complex64::new(-0.2, 0.1)] {
        let ode = evolve_pointwise(&gen, t, z, 1e-12)?;
        let exact = yule_closed_form(alpha, k, t, z);
        let series = coeffs.eval(z);
        let show = |w: Complex64| format!("{w:.13}");
        println!("{:>12} {:>30} {:>30} {:>30}", format!("{z:.2}"), show(ode), show(exact), show(series));
    }

    let grid: Vec<Complex64> = (0..8).map(|j| Complex64::from_polar(0.5, j as f64 * 0.785)).collect();
    println!("semigroup defect K_0.3∘K_0.7 vs K_1.0: {:.2e}", semigroup_defect(&gen, 0.3, 0.7, &grid, 1e-12)?);

    let fm = first_moment_law(&gen, t, 1e-12)?;
    println!("first moment: contour {:.12}, predicted {:.12}", fm.contour.re, fm.predicted.re);
    Ok(())
}
