//! Two positive products with identical spectra but different laws in the
//! vector state.

use monoconv::opmodel::spectral_counterexample;

fn main() -> monoconv::Result<()> {
    for (a, b) in [(0.3, 0.3), (0.5, 0.5), (0.9, 0.5)] {
        let r = spectral_counterexample(a, b)?;
        println!("a={a} b={b}");
        println!("  spectrum       {:.6?}", r.eigenvalues_sqrt_x_y_sqrt_x);
        println!("  second moments {:.10} vs {:.10}", r.second_moment_sqrt_x_y_sqrt_x, r.second_moment_sqrt_y_x_sqrt_y);
        println!("  formula errors {:.1e} (eigenvalues), {:.1e} (moments)", r.eigenvalue_error, r.second_moment_error());
    }
    Ok(())
}
