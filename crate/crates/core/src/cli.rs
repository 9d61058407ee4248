//! Command-line front end. The `monoconv` binary is a thin wrapper around
//! [`main_with_args`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::branching::{gw_simulate, yule_closed_form, BranchingGenerator, BranchingSpec, OffspringLaw, OffspringLawSpec};
use crate::cfree::check_monotone_specialization;
use crate::convolution::monotone_convolve;
use crate::embedding::{embedding_test, RingGrid, DEFAULT_CONV_TOL, DEFAULT_MAX_ITER};
use crate::error::{Error, Result};
use crate::generator::{GeneratorSpec, HerglotzGenerator, VectorField};
use crate::measure::{CircleMeasure, KTransform, MeasureSpec};
use crate::ode::DEFAULT_TOL;
use crate::opmodel::{spectral_counterexample, verify_random_cases};
use crate::semigroup::evolve_trajectory;
use crate::series::{TruncatedSeries, DEFAULT_ORDER};

#[derive(Parser, Debug)]
#[command(name = "monoconv", version, about = "Multiplicative monotone convolution on the unit circle")]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Moments of μ ▷ ν.
    Convolve {
        mu: PathBuf,
        nu: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// K_t(z) on a grid by integrating the generator's flow.
    Evolve {
        generator: PathBuf,
        /// Comma-separated, nondecreasing times.
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        /// Text file with one `re,im` point per line.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Embeddability verdict for a K-transform.
    Embed {
        k: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = DEFAULT_CONV_TOL)]
        conv_tol: f64,
    },
    /// Monte-Carlo check of E(z^{Y_n}) against the iterated generating function.
    Gw {
        law: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated real sample points.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.3, 0.5, 0.8])]
        z: Vec<f64>,
    },
    /// The two positive-operator products with equal spectra but different laws.
    Counterexample {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
    /// Exact check that the c-free product with (δ, φ₂) is the monotone product.
    CfreeCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 4)]
        max_power: u32,
    },
    /// Randomised check of K_{V1 W V2} = K_{V1 V2} ∘ K_W on monotone products.
    VerifyOps {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

/// JSON schema for K-transforms: `{"coeffs": [[re, im], ...]}` starting at
/// `z^0`. The coefficients are taken as an exact polynomial unless
/// `"truncated": true`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KSpec {
    pub coeffs: Vec<Complex64>,
    #[serde(default)]
    pub truncated: bool,
}

impl TryFrom<KSpec> for KTransform {
    type Error = Error;

    fn try_from(spec: KSpec) -> Result<Self> {
        let s = TruncatedSeries::new(spec.coeffs)?;
        if s.coeffs()[0] != Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidKTransform("K(0) must be 0".into()));
        }
        Ok(if spec.truncated { KTransform::from_series(s) } else { KTransform::polynomial(s) })
    }
}

enum AnyGenerator {
    Branching(BranchingGenerator),
    Herglotz(HerglotzGenerator),
}

impl AnyGenerator {
    fn field(&self) -> &dyn VectorField {
        match self {
            AnyGenerator::Branching(g) => g,
            AnyGenerator::Herglotz(g) => g,
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Generator files hold either a branching generator (`{"lambda": {...}}`)
/// or Herglotz data (`{"b": .., "rho": [..], "haar_mass": ..}`).
fn read_generator(path: &Path) -> Result<AnyGenerator> {
    let value: serde_json::Value = read_json(path)?;
    let bad = |e: serde_json::Error| Error::Input(format!("{}: {e}", path.display()));
    if value.get("lambda").is_some() {
        let spec: BranchingSpec = serde_json::from_value(value).map_err(bad)?;
        Ok(AnyGenerator::Branching(spec.try_into()?))
    } else {
        let spec: GeneratorSpec = serde_json::from_value(value).map_err(bad)?;
        Ok(AnyGenerator::Herglotz(spec.try_into()?))
    }
}

fn read_grid(path: &Path) -> Result<Vec<Complex64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::Input(format!("{}:{}: expected `re,im`", path.display(), i + 1));
        let mut parts = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
        let re: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let im: f64 = match parts.next() {
            Some(s) => s.parse().map_err(|_| bad())?,
            None => 0.0,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
}

#[derive(Serialize)]
struct MomentsOut {
    order: usize,
    moments: Vec<Complex64>,
}

/// Runs one command and returns its output text.
pub fn execute(command: &Command) -> Result<String> {
    match command {
        Command::Convolve { mu, nu, order, format } => {
            let mu = CircleMeasure::try_from(read_json::<MeasureSpec>(mu)?)?;
            let nu = CircleMeasure::try_from(read_json::<MeasureSpec>(nu)?)?;
            let moments = monotone_convolve(&mu, &nu, *order)?.moments(*order)?;
            match format {
                Format::Json => to_json(&MomentsOut { order: *order, moments }),
                Format::Csv => {
                    let mut s = String::from("k,re,im\n");
                    for (k, m) in moments.iter().enumerate() {
                        let _ = writeln!(s, "{},{},{}", k + 1, num(m.re), num(m.im));
                    }
                    Ok(s)
                }
            }
        }
        Command::Evolve { generator, t, grid, tol } => {
            let gen = read_generator(generator)?;
            let grid = read_grid(grid)?;
            let traj = evolve_trajectory(gen.field(), t, &grid, *tol)?;
            let yule = match &gen {
                AnyGenerator::Branching(b) => b.as_yule(),
                AnyGenerator::Herglotz(_) => None,
            };
            let mut s = String::from("t,re_z,im_z,re_k,im_k");
            if yule.is_some() {
                s.push_str(",re_closed,im_closed");
            }
            s.push('\n');
            for (time, z, k) in traj.rows() {
                let _ = write!(s, "{},{},{},{},{}", num(time), num(z.re), num(z.im), num(k.re), num(k.im));
                if let Some((alpha, kk)) = yule {
                    let c = yule_closed_form(alpha, kk, time, z);
                    let _ = write!(s, ",{},{}", num(c.re), num(c.im));
                }
                s.push('\n');
            }
            Ok(s)
        }
        Command::Embed { k, max_iter, conv_tol } => {
            let k = KTransform::try_from(read_json::<KSpec>(k)?)?;
            to_json(&embedding_test(&k, *max_iter, &RingGrid::default(), *conv_tol)?)
        }
        Command::Gw { law, n, trials, seed, z } => {
            let law = OffspringLaw::try_from(read_json::<OffspringLawSpec>(law)?)?;
            let zs: Vec<Complex64> = z.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let est = gw_simulate(&law, *n, *trials, &zs, *seed)?;
            let mut s = String::from("re_z,im_z,re_empirical,im_empirical,stderr,re_theory,im_theory,sigmas\n");
            for e in est {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    num(e.z.re),
                    num(e.z.im),
                    num(e.empirical.re),
                    num(e.empirical.im),
                    num(e.stderr),
                    num(e.theory.re),
                    num(e.theory.im),
                    num(e.sigmas())
                );
            }
            Ok(s)
        }
        Command::Counterexample { a, b } => to_json(&spectral_counterexample(*a, *b)?),
        Command::CfreeCheck { seed, max_len, max_power } => {
            to_json(&check_monotone_specialization(*seed, *max_len, *max_power)?)
        }
        Command::VerifyOps { seed, cases } => to_json(&verify_random_cases(*seed, *cases)?),
    }
}

/// Parses arguments, runs the command and writes its output. Returns the
/// process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = execute(&cli.command).and_then(|text| match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}
