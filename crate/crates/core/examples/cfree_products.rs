//! c-free products of moment functionals, exactly, and the monotone special
//! case.

use monoconv::cfree::{cfree_eval, check_monotone_specialization, monotone_eval, MomentFunctional, Word};
use num_bigint::BigInt;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn main() -> monoconv::Result<()> {
    let phi1 = MomentFunctional::new(vec![q(1, 1), q(1, 2), q(1, 3), q(1, 4)]);
    let phi2 = MomentFunctional::new(vec![q(1, 1), q(2, 3), q(1, 5), q(1, 7)]);
    let delta = MomentFunctional::delta(3);
    for w in ["x1 x2 x1", "x2^2 x1 x2", "x1^2 x2^3"] {
        let word = Word::parse(w)?;
        let c = cfree_eval(&word, &phi1, &delta, &phi2, &phi2)?;
        let m = monotone_eval(&word, &phi1, &phi2)?;
        println!("{w:<12} c-free {c:<10} monotone {m}");
    }
    let r = check_monotone_specialization(1, 5, 3)?;
    println!("{} words up to length 5: {} mismatches", r.words_checked, r.mismatches);
    Ok(())
}
