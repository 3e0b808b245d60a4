use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use ncsym::domains::{self, SimpleSet};
use ncsym::linalg::{self, tuple_from_json, tuple_to_json, DEFAULT_TOL};
use ncsym::parse::{self, Parsed};
use ncsym::{girard, sqrtlib, symbasis, verify, Chart, Error, FreePoly, MatrixTuple, Result};

#[derive(Parser)]
#[command(
    name = "ncsym",
    version,
    about = "Symmetric noncommutative polynomials, Newton-Girard formulae and matrix square roots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the power sum x^n + y^n as a rational expression in alpha, beta, gamma.
    Girard {
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        /// Check the identity on seeded random matrix pairs.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative residual bound; 1e-8 for n >= 0 and 1e-7 otherwise.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Write a symmetric polynomial in U, M0, M1, ... and in alpha, beta, gamma.
    Decompose {
        #[arg(long)]
        expr: String,
    },
    /// Decide whether a square root exists and optionally list every root in alg(x).
    Sqrt {
        /// Matrix-tuple JSON file holding one matrix.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        enumerate: bool,
        /// Eigenvalue clustering gap; chosen from the spectral radius when absent.
        #[arg(long)]
        gap: Option<f64>,
    },
    /// Print (u, v^2, v u v) for a pair.
    Pi {
        #[arg(long)]
        input: PathBuf,
    },
    /// Every pair with the same image under pi.
    Fiber {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = domains::FIBER_TOL)]
        tol: f64,
    },
    /// Run a seeded verification suite.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(verify::SUITES))]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Test membership in one of the domains.
    CheckDomain {
        #[arg(long, value_enum)]
        pred: Pred,
        #[arg(long)]
        input: PathBuf,
        /// Disc centers as complex literals, e.g. "1, -2+1i".
        #[arg(long, allow_hyphen_values = true)]
        centers: Option<String>,
        #[arg(long)]
        radius: Option<f64>,
        /// JSON file with a rectangular array of polynomial strings.
        #[arg(long)]
        delta: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Pred {
    #[value(name = "Bdelta")]
    Bdelta,
    #[value(name = "D")]
    D,
    #[value(name = "Q")]
    Q,
    #[value(name = "I")]
    I,
    #[value(name = "So")]
    So,
    #[value(name = "Ugamma")]
    Ugamma,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Ignores write failures so a closed pipe ends the process quietly.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json(v: &Value) {
    emit(&serde_json::to_string_pretty(v).expect("JSON values always serialize"));
}

fn read_tuple(path: &Path) -> Result<MatrixTuple> {
    tuple_from_json(&std::fs::read_to_string(path)?)
}

fn single_matrix(path: &Path) -> Result<ncsym::CMatrix> {
    let t = read_tuple(path)?;
    if t.d() != 1 {
        return Err(Error::Dimension(format!("expected one matrix, found d = {}", t.d())));
    }
    Ok(t.get(0).clone())
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Girard { n, verify, levels, trials, seed, tol } => {
            emit(&girard::format_girard(&girard::girard(n)));
            if !verify {
                return Ok(0);
            }
            let tol = tol.unwrap_or(if n >= 0 { 1e-8 } else { 1e-7 });
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rep = girard::verify_girard_random(&mut rng, n, &levels, trials, tol)?;
            rep.seed = Some(seed);
            print_json(&rep.to_json());
            Ok(if rep.passed() { 0 } else { 1 })
        }
        Command::Decompose { expr } => {
            let p = match parse::parse(&expr)? {
                Parsed::Poly(p) => p,
                Parsed::Gens(g) => g.expand_back(),
                Parsed::Rational(_) => {
                    return Err(Error::Precondition("decompose takes a polynomial, not a rational expression".into()))
                }
            };
            let g = symbasis::decompose_symmetric(&p)?;
            let reduced = symbasis::reduce_to_pi(&g);
            print_json(&json!({
                "generators": g.to_string(),
                "pi": reduced.to_string(),
            }));
            Ok(0)
        }
        Command::Sqrt { matrix, enumerate, gap } => {
            let x = single_matrix(&matrix)?;
            let exists = sqrtlib::sqrt_exists(&x, sqrtlib::RANK_TOL);
            let mut out = BTreeMap::new();
            out.insert("exists", Value::Bool(exists));
            if enumerate {
                let roots = if exists { sqrtlib::all_square_roots_with_gap(&x, gap)?.to_json() } else { Value::Null };
                out.insert("roots", roots);
            }
            print_json(&json!(out));
            Ok(0)
        }
        Command::Pi { input } => {
            let [a, b, g] = domains::pi(&read_tuple(&input)?)?;
            print_json(&tuple_to_json(&MatrixTuple::new(vec![a, b, g])?));
            Ok(0)
        }
        Command::Fiber { input, tol } => {
            let f = domains::fiber(&read_tuple(&input)?, tol)?;
            print_json(&json!({
                "count": f.len(),
                "pairs": f.iter().map(tuple_to_json).collect::<Vec<_>>(),
            }));
            Ok(0)
        }
        Command::Verify { suite, seed } => {
            let rep = verify::run_suite(&suite, seed)?;
            print_json(&rep.to_json());
            Ok(if rep.passed() { 0 } else { 1 })
        }
        Command::CheckDomain { pred, input, centers, radius, delta, tol } => {
            let (value, residuals) = check_domain(pred, &input, centers.as_deref(), radius, delta.as_deref(), tol)?;
            print_json(&json!({ "member": value, "residuals": residuals }));
            Ok(0)
        }
    }
}

fn simple_set(centers: Option<&str>, radius: Option<f64>) -> Result<SimpleSet> {
    let centers =
        parse::parse_complex_list(centers.ok_or_else(|| Error::Precondition("--centers is required".into()))?)?;
    let r = match radius {
        Some(r) => r,
        None => domains::default_radius(&centers)?,
    };
    SimpleSet::new(centers, r)
}

fn delta_letters(d: usize) -> Vec<String> {
    match d {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        _ => (1..=d).map(|j| format!("x{j}")).collect(),
    }
}

fn check_domain(
    pred: Pred,
    input: &Path,
    centers: Option<&str>,
    radius: Option<f64>,
    delta: Option<&Path>,
    tol: Option<f64>,
) -> Result<(bool, BTreeMap<&'static str, f64>)> {
    let t = read_tuple(input)?;
    let mut res = BTreeMap::new();
    let value = match pred {
        Pred::I => {
            let x = t.get(0);
            res.insert("rcond", linalg::rcond(x));
            linalg::in_I(x, tol.unwrap_or(DEFAULT_TOL))
        }
        Pred::Q => {
            let x = t.get(0);
            res.insert("min_pair_sum", linalg::min_pair_sum(x)?);
            linalg::in_Q(x, tol.unwrap_or(DEFAULT_TOL))?
        }
        Pred::So => {
            let v = linalg::half_difference(&t)?;
            res.insert("min_pair_sum", linalg::min_pair_sum(&v)?);
            domains::in_S_o(&t, tol.unwrap_or(DEFAULT_TOL))?
        }
        Pred::D => {
            let set = simple_set(centers, radius)?;
            res.insert("max_disc_distance", domains::disc_distance(t.get(0), &set)?);
            domains::in_D_gamma(t.get(0), &set)?
        }
        Pred::Ugamma => {
            if t.d() != 2 {
                return Err(Error::Dimension("Ugamma takes a pair (u, x)".into()));
            }
            let set = simple_set(centers, radius)?;
            res.insert("max_disc_distance", domains::disc_distance(t.get(1), &set)?);
            domains::in_U_gamma(t.get(0), t.get(1), &set, tol.unwrap_or(domains::COMMUTE_TOL))?
        }
        Pred::Bdelta => {
            let path = delta.ok_or_else(|| Error::Precondition("--delta is required".into()))?;
            let rows: Vec<Vec<String>> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let owned = delta_letters(t.d());
            let letters: Vec<&str> = owned.iter().map(String::as_str).collect();
            let delta = rows
                .iter()
                .map(|r| r.iter().map(|s| parse::parse_poly(s, &letters, Chart::Standard)).collect())
                .collect::<Result<Vec<Vec<FreePoly>>>>()?;
            res.insert("norm", linalg::op_norm(&linalg::eval_delta(&delta, &t)?));
            linalg::in_B_delta(&delta, &t)?
        }
    };
    Ok((value, res))
}
