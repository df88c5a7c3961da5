//! Command-line front end: build, evaluate and verify p-linear schemes.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or precondition
//! error.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use plinear::engine::checks::{
    gessel_check, lucas_check, two_state_power_check, verify_hasse_witt,
};
use plinear::engine::oracle::SequenceSpec;
use plinear::engine::{base_p_digits, eval_ct, eval_rat, parse_index, verify_scheme, Report};
use plinear::parse::parse_poly;
use plinear::scheme::{build_ct_scheme, build_rat_scheme, load_scheme, save_scheme, Scheme};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "plinear", version, about = "p-linear schemes mod p^r")]
struct Cli {
    /// Rayon thread count (also via PLINEAR_THREADS); default: all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BuildCommon {
    /// Comma-separated variable names, fixing the exponent order.
    #[arg(long, value_delimiter = ',', required = true)]
    vars: Vec<String>,
    /// Prime p.
    #[arg(long)]
    p: u64,
    /// Exponent r of the modulus p^r.
    #[arg(long)]
    r: u32,
    /// Output path for the scheme JSON.
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Build a constant-term scheme for ct[q g^k] mod p^r.
    BuildCt {
        /// Laurent polynomial g.
        #[arg(long)]
        poly: String,
        /// Numerator q (default 1); support must lie in the interior of the
        /// Newton polytope of g.
        #[arg(long, default_value = "1")]
        num: String,
        #[command(flatten)]
        common: BuildCommon,
    },
    /// Build a coefficient scheme for the power series Q/P mod p^r.
    BuildRat {
        /// Denominator polynomial P with P(0) not divisible by p.
        #[arg(long)]
        den: String,
        /// Numerator polynomial Q.
        #[arg(long, default_value = "1")]
        num: String,
        #[command(flatten)]
        common: BuildCommon,
    },
    /// Evaluate a scheme at an index.
    Eval {
        #[arg(long)]
        scheme: std::path::PathBuf,
        /// Decimal index (ct) or comma-separated decimal multi-index (rat).
        #[arg(long)]
        index: String,
        /// Print base-p digits and intermediate state vectors.
        #[arg(long)]
        trace: bool,
    },
    /// Verify a scheme against oracles, or run a congruence suite.
    Verify {
        #[arg(long, conflicts_with = "suite")]
        scheme: Option<std::path::PathBuf>,
        /// Largest index checked (scheme mode) or largest k (suite mode).
        #[arg(long, default_value_t = 100)]
        kmax: u64,
        /// One of: lucas, gessel, hasse-witt, power2.
        #[arg(long)]
        suite: Option<String>,
        /// Sequence for the lucas suite: central-binomial, franel,
        /// apery, multinomial-square, power-of-2.
        #[arg(long)]
        sequence: Option<String>,
        /// Parameter for franel (l) and multinomial-square (n).
        #[arg(long, default_value_t = 3)]
        param: u32,
        /// Prime for the gessel, power2 and hasse-witt suites.
        #[arg(long)]
        p: Option<u64>,
        /// Laurent polynomial for the hasse-witt suite.
        #[arg(long)]
        poly: Option<String>,
        /// Comma-separated variable names for --poly.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("PLINEAR_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        // Best effort; the pool can only be configured once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::BuildCt { poly, num, common } => {
            let g = parse_poly(&poly, &common.vars)?;
            let q = parse_poly(&num, &common.vars)?;
            let s = build_ct_scheme(&g, &q, common.p, common.r)?;
            println!(
                "ct scheme: {} states, rho = {}, state bound rho * |interior points| = {}",
                s.size(),
                s.rho,
                s.size()
            );
            std::fs::write(&common.out, save_scheme(&Scheme::Ct(s)))
                .with_context(|| format!("writing {}", common.out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::BuildRat { den, num, common } => {
            let pden = parse_poly(&den, &common.vars)?;
            let qnum = parse_poly(&num, &common.vars)?;
            let s = build_rat_scheme(&pden, &qnum, common.p, common.r)?;
            // Bound rho^n d_1 ... d_n with d_i = deg_{x_i} P.
            let n = common.vars.len();
            let mut bound = (s.rho as u128).pow(n as u32);
            for i in 0..n {
                let d = pden.support().map(|e| e.0[i]).max().unwrap_or(0).max(1) as u128;
                bound *= d;
            }
            println!(
                "rat scheme: {} states, rho = {}, state bound rho^n * d_1...d_n = {}",
                s.states.len(),
                s.rho,
                bound
            );
            std::fs::write(&common.out, save_scheme(&Scheme::Rat(Arc::new(s))))
                .with_context(|| format!("writing {}", common.out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            scheme,
            index,
            trace,
        } => {
            let text = std::fs::read_to_string(&scheme)
                .with_context(|| format!("reading {}", scheme.display()))?;
            match load_scheme(&text)? {
                Scheme::Ct(s) => {
                    let n = parse_index(&index)?;
                    if trace {
                        let mut digits = base_p_digits(&n, s.p);
                        digits.reverse();
                        println!("digits (most significant first): {digits:?}");
                        let m = s.modulus.value;
                        let mut v = s.init.clone();
                        println!("init: {v:?}");
                        for &d in &digits {
                            v = apply(&s.digit_matrix(d), &v, m);
                            println!("after digit {d}: {v:?}");
                        }
                    }
                    println!("{}", eval_ct(&s, &n));
                }
                Scheme::Rat(s) => {
                    let parts: Vec<BigUint> = index
                        .split(',')
                        .map(parse_index)
                        .collect::<Result<_, _>>()?;
                    if trace {
                        for (i, c) in parts.iter().enumerate() {
                            let mut d = base_p_digits(c, s.p);
                            d.reverse();
                            println!("component {i} digits (msd first): {d:?}");
                        }
                    }
                    println!("{}", eval_rat(&s, &parts)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            scheme,
            kmax,
            suite,
            sequence,
            param,
            p,
            poly,
            vars,
            json,
        } => {
            let report = match (scheme, suite.as_deref()) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let s = load_scheme(&text)?;
                    verify_scheme(&s, kmax)?
                }
                (None, Some("lucas")) => {
                    let spec = match sequence.as_deref() {
                        Some("central-binomial") | None => SequenceSpec::CentralBinomial,
                        Some("franel") => SequenceSpec::Franel(param),
                        Some("apery") => SequenceSpec::Apery,
                        Some("multinomial-square") => SequenceSpec::MultinomialSquare(param),
                        Some("power-of-2") => SequenceSpec::PowerOfTwo,
                        Some(other) => bail!("unknown sequence `{other}`"),
                    };
                    let p = p.context("--p is required for the lucas suite")?;
                    if !plinear::ring::is_prime(p) {
                        bail!("p = {p} is not prime");
                    }
                    lucas_check(&spec, p, kmax)
                }
                (None, Some("gessel")) => {
                    let p = p.context("--p is required for the gessel suite")?;
                    gessel_check(p, kmax)?
                }
                (None, Some("power2")) => {
                    let p = p.context("--p is required for the power2 suite")?;
                    two_state_power_check(p)?
                }
                (None, Some("hasse-witt")) => {
                    let p = p.context("--p is required for the hasse-witt suite")?;
                    let text = poly.context("--poly is required for the hasse-witt suite")?;
                    if vars.is_empty() {
                        bail!("--vars is required for the hasse-witt suite");
                    }
                    let g = parse_poly(&text, &vars)?;
                    verify_hasse_witt(&g, p, kmax)?
                }
                (None, Some(other)) => bail!("unknown suite `{other}`"),
                _ => bail!("pass exactly one of --scheme or --suite"),
            };
            print_report(&report, json);
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn print_report(report: &Report, json: bool) {
    if json {
        println!("{}", report.json());
    } else {
        print!("{report}");
    }
}

fn apply(m: &[Vec<u64>], v: &[u64], modulus: u64) -> Vec<u64> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).fold(0u64, |acc, (&a, &b)| {
                plinear::ring::add_mod(acc, plinear::ring::mul_mod(a, b, modulus), modulus)
            })
        })
        .collect()
}
