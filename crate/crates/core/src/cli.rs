//! The `gapcert` command line.
//!
//! Exit status is 0 on success, 1 when an operation rejects its input
//! (domain, validation or certificate errors, inadmissible tuples, missing
//! shifts) and 2 on usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::characters::make_character;
use crate::error::{Error, Result};
use crate::gaps::{
    hypothesis_margin, minimal_k_asymptotic, report_tables, theta_fi, LevelOfDistribution,
    ReportConfig, DATA_DIR_ENV, DEFAULT_R,
};
use crate::mk::{mk_asymptotic, mk_certificate_with};
use crate::quadrature::QuadConfig;
use crate::shift::{compute_h, find_coprime_base, find_negative_shift};
use crate::tuples::{
    construct_primes_tuple, is_admissible, narrow_best_window, narrow_end, parse_tuple, write_tuple,
    AdmissibleTuple,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "gapcert", version, about = "Certified inputs for conditional prime-gap bounds")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,

    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Seed for randomized procedures; every current command is deterministic.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,

    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Admissible k-tuples.
    #[command(subcommand)]
    Tuple(TupleCommand),
    /// Residue shifts on which a quadratic character is -1.
    #[command(subcommand)]
    Shift(ShiftCommand),
    /// Lower bounds for M_k.
    #[command(subcommand)]
    Mk(MkCommand),
    /// Smallest k meeting a threshold.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Exponent margin of the zero-free hypothesis.
    Margin(MarginArgs),
    /// Bound tables.
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Debug, Subcommand)]
pub enum TupleCommand {
    /// Verify admissibility of a tuple file.
    Check { file: PathBuf },
    /// Build an admissible tuple from consecutive primes.
    Make {
        #[arg(long)]
        k: usize,
    },
    /// Cut an admissible tuple down to k offsets.
    Narrow {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        /// Keep the narrowest contiguous window instead of the first k offsets.
        #[arg(long)]
        window: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum ShiftCommand {
    /// Find l with chi(l + h_i) = -1 for every offset.
    Find(ShiftArgs),
    /// Exact weighted count H and its Weil floor.
    Stats {
        #[command(flatten)]
        args: ShiftArgs,
        /// Base residue; defaults to the smallest coprime one.
        #[arg(long)]
        nprime: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct ShiftArgs {
    /// Tuple file.
    pub file: PathBuf,
    /// Fundamental discriminant.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: i64,
}

#[derive(Debug, Subcommand)]
pub enum MkCommand {
    /// Certified lower bound from the truncated polynomial weight.
    Bound {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        theta_poly: f64,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = QuadConfig::default().abs_tol)]
        abs_tol: f64,
        /// Replace tau = 1 - k mu.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// ln k - 2 ln ln k - 2.
    Asymptotic {
        #[arg(long)]
        k: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SolveCommand {
    /// Smallest k with ln k - 2 ln ln k - 2 > m / theta.
    K {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_R)]
        r: u64,
        /// Use the threshold 2m / theta, without prime doubling.
        #[arg(long)]
        undoubled: bool,
    },
}

#[derive(Debug, Args)]
pub struct MarginArgs {
    #[arg(long, default_value_t = DEFAULT_R)]
    pub r: u64,
    #[arg(long)]
    pub a: f64,
    /// Exponent L in x = D^L; defaults to 2r.
    #[arg(long)]
    pub l: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// H_m tables with the evidence behind each certified entry.
    Hm {
        /// Directory holding published tuple tables.
        #[arg(long, env = DATA_DIR_ENV)]
        data_dir: Option<PathBuf>,
    },
}

pub struct RunOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Output of a command that completed but rejected its input.
struct Rejection(String);

enum Outcome {
    Done(String),
    Rejected(String),
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                RunOutcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                RunOutcome {
                    code: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::Resource(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&cli),
    };
    let (code, body, stderr) = match result {
        Ok(Outcome::Done(body)) => (EXIT_OK, body, String::new()),
        Ok(Outcome::Rejected(body)) => (EXIT_REJECTED, body, String::new()),
        Err(e) => (EXIT_REJECTED, String::new(), format!("error: {e}\n")),
    };
    match (&cli.output, code) {
        (Some(path), EXIT_OK) => match std::fs::write(path, &body) {
            Ok(()) => RunOutcome {
                code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => RunOutcome {
                code: EXIT_REJECTED,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        _ => RunOutcome {
            code,
            stdout: body,
            stderr,
        },
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn read_admissible(path: &PathBuf) -> Result<std::result::Result<AdmissibleTuple, Rejection>> {
    let text = std::fs::read_to_string(path)?;
    let candidate = parse_tuple(&text)?;
    Ok(is_admissible(&candidate).map_err(|w| Rejection(format!("{}: {w}", path.display()))))
}

fn tuple_output(t: &AdmissibleTuple, format: Format) -> Result<String> {
    match format {
        Format::Text => Ok(write_tuple(t)),
        Format::Json => to_json(&json!({
            "k": t.k(),
            "diameter": t.diameter(),
            "sha256": t.content_hash(),
            "offsets": t.offsets(),
        })),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let format = cli.format;
    let done = |s: String| Ok(Outcome::Done(s));
    match &cli.command {
        Command::Tuple(TupleCommand::Check { file }) => {
            let text = std::fs::read_to_string(file)?;
            let candidate = parse_tuple(&text)?;
            match (is_admissible(&candidate), format) {
                (Ok(t), Format::Text) => done(format!(
                    "admissible: k = {}, diameter = {}, sha256 = {}\n",
                    t.k(),
                    t.diameter(),
                    t.content_hash()
                )),
                (Ok(t), Format::Json) => done(to_json(&json!({
                    "admissible": true,
                    "k": t.k(),
                    "diameter": t.diameter(),
                    "sha256": t.content_hash(),
                }))?),
                (Err(w), Format::Text) => Ok(Outcome::Rejected(format!(
                    "inadmissible: witness p = {} (residues {:?} all occupied)\n",
                    w.prime, w.residues
                ))),
                (Err(w), Format::Json) => Ok(Outcome::Rejected(to_json(&json!({
                    "admissible": false,
                    "witness": { "prime": w.prime, "residues": w.residues },
                }))?)),
            }
        }
        Command::Tuple(TupleCommand::Make { k }) => done(tuple_output(&construct_primes_tuple(*k)?, format)?),
        Command::Tuple(TupleCommand::Narrow { file, k, window }) => {
            let t = match read_admissible(file)? {
                Ok(t) => t,
                Err(Rejection(msg)) => return Ok(Outcome::Rejected(msg + "\n")),
            };
            let narrowed = if *window {
                narrow_best_window(&t, *k)?
            } else {
                narrow_end(&t, *k)?
            };
            done(tuple_output(&narrowed, format)?)
        }
        Command::Shift(cmd) => {
            let (args, nprime) = match cmd {
                ShiftCommand::Find(args) => (args, None),
                ShiftCommand::Stats { args, nprime } => (args, Some(*nprime)),
            };
            let chi = make_character(args.delta)?;
            let t = match read_admissible(&args.file)? {
                Ok(t) => t,
                Err(Rejection(msg)) => return Ok(Outcome::Rejected(msg + "\n")),
            };
            match nprime {
                None => {
                    let r = match find_negative_shift(&t, &chi) {
                        Ok(r) => r,
                        Err(e @ Error::ShiftNotFound(_)) => {
                            return Ok(Outcome::Rejected(format!("{e}\n")))
                        }
                        Err(e) => return Err(e),
                    };
                    match format {
                        Format::Text => done(format!(
                            "{chi}: l = {} (n' = {}, y' = {}), verified = {}\n",
                            r.l, r.nprime, r.yprime, r.verified
                        )),
                        Format::Json => done(to_json(&r)?),
                    }
                }
                Some(n) => {
                    let n = match n {
                        Some(n) => n,
                        None => find_coprime_base(t.offsets(), &chi)?,
                    };
                    let s = compute_h(t.offsets(), &chi, n)?;
                    match format {
                        Format::Text => done(format!(
                            "{chi}: g = {}, k = {}, n' = {}\nH = {}\nWeil floor = {}\nmeets floor = {}\nzero y count = {}\nall -1 count = {}\n",
                            s.g,
                            s.k,
                            s.nprime,
                            s.h,
                            s.weil_floor,
                            s.meets_weil_floor(),
                            s.zero_y_count,
                            s.all_minus_one_count
                        )),
                        Format::Json => done(to_json(&s)?),
                    }
                }
            }
        }
        Command::Mk(MkCommand::Bound {
            k,
            beta,
            theta_poly,
            abs_tol,
            tau,
        }) => {
            let cfg = QuadConfig::with_abs_tol(*abs_tol);
            let cert = mk_certificate_with(*k, *beta, *theta_poly, *tau, &cfg)?;
            match format {
                Format::Text => done(cert.to_text()),
                Format::Json => done(to_json(&cert)?),
            }
        }
        Command::Mk(MkCommand::Asymptotic { k }) => {
            let v = mk_asymptotic(*k)?;
            match format {
                Format::Text => done(format!("M_{k} >= {v}\n")),
                Format::Json => done(to_json(&json!({ "k": k, "bound": v }))?),
            }
        }
        Command::Solve(SolveCommand::K { m, r, undoubled }) => {
            let theta = theta_fi(*r)?;
            let res = minimal_k_asymptotic(*m, theta, !undoubled)?;
            match format {
                Format::Text => {
                    let mut s = String::new();
                    let _ = writeln!(s, "m = {m}, theta = {theta}, threshold = {}", res.threshold);
                    let _ = writeln!(s, "k = {}", res.k);
                    let _ = writeln!(s, "ln k = {}", res.ln_k);
                    let _ = writeln!(s, "bound(k) - threshold = {:e}", res.margin_at_k);
                    if let Some(prev) = res.margin_at_k_minus_1 {
                        let _ = writeln!(s, "bound(k-1) - threshold = {prev:e}");
                    }
                    done(s)
                }
                Format::Json => done(to_json(&res)?),
            }
        }
        Command::Margin(MarginArgs { r, a, l }) => {
            let l = l.unwrap_or(2.0 * *r as f64);
            let m = hypothesis_margin(*r, *a, l)?;
            match format {
                Format::Text => done(format!(
                    "r = {}, A = {}, L = {}\nln(r^r) = {}\nln(r^r + A) = {}\nln(r^r + A - 2) = {}\nexponent gap = {}\nln ln ln D threshold = {}\ndominates = {}\n",
                    m.r,
                    m.a,
                    m.l,
                    m.log_rr,
                    m.lhs_log_exponent,
                    m.rhs_log_exponent,
                    m.exponent_gap,
                    m.log_lnln_d_threshold,
                    m.dominates
                )),
                Format::Json => done(to_json(&m)?),
            }
        }
        Command::Report(ReportCommand::Hm { data_dir }) => {
            // validates r before any claim is assembled
            LevelOfDistribution::new(DEFAULT_R, true)?;
            let report = report_tables(&ReportConfig {
                data_dir: data_dir.clone(),
            })?;
            match format {
                Format::Text => done(report.render_text()?),
                Format::Json => {
                    let mut s = report.render_json()?;
                    s.push('\n');
                    done(s)
                }
            }
        }
    }
}
