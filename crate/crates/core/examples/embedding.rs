//! Decide whether a K-transform sits in a continuous semigroup.

use monoconv::embedding::{embedding_test, RingGrid, DEFAULT_CONV_TOL, DEFAULT_MAX_ITER};
use monoconv::generator::HerglotzGenerator;
use monoconv::measure::{Atom, KTransform};
use monoconv::semigroup::k_t_coefficients;
use monoconv::series::TruncatedSeries;
use monoconv::Result;

fn report(name: &str, k: &KTransform) -> Result<()> {
    let v = embedding_test(k, DEFAULT_MAX_ITER, &RingGrid::default(), DEFAULT_CONV_TOL)?;
    println!(
        "{name:<14} embeddable={:<5} reason={:?} t0={:?} branch={:?}",
        v.embeddable, v.reason, v.t0, v.branch_index
    );
    Ok(())
}

fn main() -> Result<()> {
    report("0.5 z", &KTransform::polynomial(TruncatedSeries::from_real(&[0.0, 0.5])?))?;
    report("z^2", &KTransform::monomial(2, 32))?;

    let gen = HerglotzGenerator::new(0.2, vec![Atom::new(0.5, 0.6), Atom::new(3.0, 0.4)])?;
    let k = KTransform::from_series(k_t_coefficients(&gen, 0.7, 48)?);
    report("Herglotz flow", &k)?;
    Ok(())
}
