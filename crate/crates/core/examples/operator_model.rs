//! Random monotone products of matrix models and the K-transform identity
//! for products of operators.

use monoconv::opmodel::{random_theorem_case, verify_random_cases};

fn main() -> monoconv::Result<()> {
    for seed in 0..5 {
        let case = random_theorem_case(seed)?;
        println!(
            "seed {seed}: dims {:?}, identity defect {:.2e}, independence defect {:.2e}",
            case.dims, case.theorem_defect, case.independence_defect
        );
    }
    let report = verify_random_cases(42, 20)?;
    println!(
        "20 cases: max defect {:.2e} / {:.2e}",
        report.max_theorem_defect, report.max_independence_defect
    );
    Ok(())
}
