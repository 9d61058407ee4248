//! End-to-end acceptance suite. Runs as a plain binary so every criterion
//! prints one PASS/FAIL line; exits nonzero if any criterion fails.

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use monoconv::branching::{gw_simulate, yule_closed_form, BranchingGenerator, OffspringLaw};
use monoconv::cfree::check_monotone_specialization;
use monoconv::convolution::{monotone_convolve, monotone_power};
use monoconv::embedding::{embedding_test, EmbeddingReason, RingGrid, DEFAULT_CONV_TOL, DEFAULT_MAX_ITER};
use monoconv::generator::{HerglotzGenerator, VectorField};
use monoconv::measure::{Atom, CircleMeasure, KTransform};
use monoconv::opmodel::{spectral_counterexample, counterexample_eigenvalues, random_theorem_case, small_z_grid, unitary_product_moments};
use monoconv::semigroup::{evolve_pointwise, first_moment_law, k_t_coefficients, semigroup_defect};
use monoconv::series::TruncatedSeries;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn random_atoms(rng: &mut ChaCha8Rng, count: usize) -> Vec<Atom> {
    let w: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|&wi| Atom::new(rng.gen_range(0.0..2.0 * PI), wi / total)).collect()
}

fn random_measure(rng: &mut ChaCha8Rng) -> CircleMeasure {
    let count = rng.gen_range(1..=4);
    CircleMeasure::atomic(random_atoms(rng, count)).unwrap()
}

fn random_generator(rng: &mut ChaCha8Rng) -> HerglotzGenerator {
    let b = rng.gen_range(-1.0..1.0);
    let count = rng.gen_range(1..=3);
    let rho: Vec<Atom> = random_atoms(rng, count)
        .into_iter()
        .map(|a| Atom::new(a.angle, a.weight * rng.gen_range(0.3..1.5)))
        .collect();
    HerglotzGenerator::new(b, rho).unwrap()
}

fn disk_grid(radius: f64, rings: usize, angles: usize) -> Vec<Complex64> {
    (1..=rings)
        .flat_map(|r| {
            (0..angles).map(move |j| Complex64::from_polar(radius * r as f64 / rings as f64, 2.0 * PI * (j as f64 + 0.5) / angles as f64))
        })
        .collect()
}

fn spectral_counterexample_criterion() -> Outcome {
    let start = Instant::now();
    let mut eig = 0.0f64;
    let mut mom = 0.0f64;
    for a in [0.3, 0.5, 0.9] {
        for b in [0.3, 0.5, 0.9] {
            let r = spectral_counterexample(a, b).map_err(|e| e.to_string())?;
            let formula = counterexample_eigenvalues(a, b);
            for list in [&r.eigenvalues_sqrt_x_y_sqrt_x, &r.eigenvalues_sqrt_y_x_sqrt_y] {
                for (x, y) in list.iter().zip(&formula) {
                    eig = eig.max((x - y).abs());
                }
            }
            mom = mom.max((r.second_moment_sqrt_x_y_sqrt_x - (1.0 + b * b + a * a)).abs());
            let second = 1.0 + b * b + 0.5 * a * a * (1.0 + (1.0 - b * b).sqrt());
            mom = mom.max((r.second_moment_sqrt_y_x_sqrt_y - second).abs());
        }
    }
    let t = start.elapsed();
    ensure(eig <= 1e-10 && mom <= 1e-10 && within(t, 1.0), format!("eigenvalue err {eig:.1e}, moment err {mom:.1e}, {t:.2?}"))
}

fn theorem_suite() -> Outcome {
    let start = Instant::now();
    let grid = small_z_grid();
    let mut worst = 0.0f64;
    let mut max_dim = 0;
    for seed in 0..100 {
        let case = random_theorem_case(seed).map_err(|e| e.to_string())?;
        worst = worst.max(case.theorem_defect);
        max_dim = max_dim.max(case.dims.0).max(case.dims.1);
    }
    let t = start.elapsed();
    let ok = worst <= 1e-10 && max_dim <= 6 && grid.len() >= 20 && grid.iter().all(|z| z.norm() <= 0.2) && within(t, 30.0);
    ensure(ok, format!("100 cases, max defect {worst:.1e}, {} grid points, {t:.2?}", grid.len()))
}

fn yule_triangle() -> Outcome {
    let start = Instant::now();
    let grid = disk_grid(0.3, 3, 8);
    let mut worst = 0.0f64;
    for k in [2, 3] {
        let gen = BranchingGenerator::yule(1.0, k).map_err(|e| e.to_string())?;
        for t in [0.25, 0.5, 1.0, 2.0] {
            let series = k_t_coefficients(&gen, t, 20).map_err(|e| e.to_string())?;
            for &z in &grid {
                let ode = evolve_pointwise(&gen, t, z, 1e-10).map_err(|e| e.to_string())?;
                let rec = series.eval(z);
                let closed = yule_closed_form(1.0, k, t, z);
                worst = worst.max((ode - rec).norm()).max((ode - closed).norm()).max((rec - closed).norm());
            }
        }
    }
    let t = start.elapsed();
    ensure(worst <= 1e-8 && within(t, 10.0), format!("max pairwise gap {worst:.1e}, {t:.2?}"))
}

fn semigroup_flow() -> Outcome {
    let grid = disk_grid(0.9, 3, 16);
    let yule = BranchingGenerator::yule(1.0, 2).map_err(|e| e.to_string())?;
    let unit = HerglotzGenerator::constant(1.0).map_err(|e| e.to_string())?;
    let fields: [&dyn VectorField; 2] = [&yule, &unit];
    let mut worst = 0.0f64;
    for field in fields {
        for s in [0.3, 0.7] {
            for t in [0.3, 0.7] {
                worst = worst.max(semigroup_defect(field, s, t, &grid, 1e-10).map_err(|e| e.to_string())?);
            }
        }
    }
    ensure(worst <= 1e-7, format!("max defect {worst:.1e}"))
}

fn exact_convolution() -> Outcome {
    let two_point = CircleMeasure::atomic(vec![Atom::new(0.0, 0.5), Atom::new(PI, 0.5)]).map_err(|e| e.to_string())?;
    let m = monotone_power(&two_point, 2, 16).and_then(|p| p.moments(16)).map_err(|e| e.to_string())?;
    let indicator = m
        .iter()
        .enumerate()
        .map(|(i, x)| (x - if (i + 1) % 4 == 0 { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut assoc = 0.0f64;
    for _ in 0..20 {
        let (a, b, c) = (random_measure(&mut rng), random_measure(&mut rng), random_measure(&mut rng));
        let run = || -> monoconv::Result<f64> {
            let left = monotone_convolve(&monotone_convolve(&a, &b, 16)?, &c, 16)?.moments(16)?;
            let right = monotone_convolve(&a, &monotone_convolve(&b, &c, 16)?, 16)?.moments(16)?;
            Ok(left.iter().zip(&right).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
        };
        assoc = assoc.max(run().map_err(|e| e.to_string())?);
    }
    ensure(indicator <= 1e-12 && assoc <= 1e-12, format!("indicator err {indicator:.1e}, associativity defect {assoc:.1e}"))
}

fn embedding_verdicts() -> Outcome {
    let grid = RingGrid::default();
    let run = |k: &KTransform| embedding_test(k, DEFAULT_MAX_ITER, &grid, DEFAULT_CONV_TOL).map_err(|e| e.to_string());

    let linear = KTransform::polynomial(TruncatedSeries::from_real(&[0.0, 0.5]).map_err(|e| e.to_string())?);
    let v = run(&linear)?;
    let t0_err = v.t0.map_or(f64::INFINITY, |t| (t - LN_2).abs());
    let u_err = if v.u_estimate.is_empty() {
        f64::INFINITY
    } else {
        v.u_estimate.iter().map(|g| (g.u - 1.0).norm()).fold(0.0, f64::max)
    };
    let linear_ok = v.embeddable && t0_err <= 1e-6 && u_err <= 1e-6;

    let square = run(&KTransform::monomial(2, 32))?;
    let square_ok = !square.embeddable && square.reason == EmbeddingReason::DerivativeVanishes;

    let gen = random_generator(&mut ChaCha8Rng::seed_from_u64(11));
    let k = KTransform::from_series(k_t_coefficients(&gen, 0.7, 64).map_err(|e| e.to_string())?);
    let v = run(&k)?;
    let truth = 0.7 * gen.beta();
    let rel = match (v.t0, v.beta) {
        (Some(t0), Some(beta)) if v.embeddable => (t0 * beta - truth).norm() / truth.norm(),
        _ => f64::INFINITY,
    };
    ensure(
        linear_ok && square_ok && rel <= 1e-3,
        format!("0.5z: t0 err {t0_err:.1e}, u err {u_err:.1e}; z^2: {:?}; Herglotz rel err {rel:.1e}", square.reason),
    )
}

fn first_moment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let gen = random_generator(&mut rng);
        for t in [0.5, 1.5] {
            let fm = first_moment_law(&gen, t, 1e-12).map_err(|e| e.to_string())?;
            worst = worst.max((fm.contour - (-t * gen.u(Complex64::new(0.0, 0.0))).exp()).norm());
        }
    }
    ensure(worst <= 1e-8, format!("max |m1 - exp(-t u(0))| = {worst:.1e}"))
}

fn galton_watson() -> Outcome {
    let start = Instant::now();
    let law = OffspringLaw::new(vec![0.0, 0.5, 0.5]).map_err(|e| e.to_string())?;
    let zs: Vec<Complex64> = [0.3, 0.5, 0.8].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let est = gw_simulate(&law, 5, 100_000, &zs, 2024).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let worst = est.iter().map(|e| e.sigmas()).fold(0.0, f64::max);
    let ok = est.iter().all(|e| (e.empirical - e.theory).norm() <= 4.0 * e.stderr) && within(t, 20.0);
    ensure(ok, format!("max deviation {worst:.2} stderr, {t:.2?}"))
}

fn cfree_specialization() -> Outcome {
    let r = check_monotone_specialization(0, 8, 4).map_err(|e| e.to_string())?;
    ensure(r.mismatches == 0, format!("{} words, {} mismatches", r.words_checked, r.mismatches))
}

fn moment_bridge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let (mu, nu) = (random_measure(&mut rng), random_measure(&mut rng));
        for n in 1..=12 {
            let ops = unitary_product_moments(&mu, &nu, n).map_err(|e| e.to_string())?;
            let conv = monotone_convolve(&mu, &nu, n).and_then(|m| m.moments(n)).map_err(|e| e.to_string())?;
            worst = ops.iter().zip(&conv).map(|(x, y)| (x - y).norm()).fold(worst, f64::max);
        }
    }
    ensure(worst <= 1e-10, format!("max moment gap {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("spectral counterexample", spectral_counterexample_criterion),
        ("operator identity suite", theorem_suite),
        ("Yule oracle triangle", yule_triangle),
        ("semigroup flow", semigroup_flow),
        ("exact convolution", exact_convolution),
        ("embedding verdicts", embedding_verdicts),
        ("first-moment law", first_moment),
        ("Galton-Watson Monte Carlo", galton_watson),
        ("c-free specialization", cfree_specialization),
        ("moment bridge", moment_bridge),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("[{:>2}] PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[{:>2}] FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
