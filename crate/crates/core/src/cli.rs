//! Command-line front end: one binary, JSON reports, exit codes
//! 0 (all checks pass), 1 (some check failed), 2 (invalid configuration).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::periods::HyperellipticCurve;
use crate::report::Report;
use crate::search::parse_target;
use crate::suite;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Seeded random draws per suite.
pub const COCYCLE_TRIPLES: usize = 50;
pub const FOCK_PAIRS: usize = 20;
pub const PHI_PAIRS: usize = 50;

#[derive(Parser, Debug)]
#[command(name = "current-lab", version, about = "Numerical checks for current algebras on the torus and genus-2 period data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Grid size (power of two); defaults: 64 for verify-cocycles and verify-phi, 16 for verify-fock
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Inner mode shell for verify-fock (1 or 2)
    #[arg(long, global = true, default_value_t = 1)]
    shell: usize,
    /// Particle cutoff for verify-fock
    #[arg(long = "P", global = true, default_value_t = 4)]
    p: usize,
    /// Curve parameters s,t,r for periods
    #[arg(long, global = true, default_value = "1,2,3")]
    curve: String,
    /// Target ratio p/q for search
    #[arg(long, global = true, default_value = "1/1")]
    target: String,
    /// Fixed branch point t for search
    #[arg(long, global = true, default_value_t = 2.0)]
    t: f64,
    /// Fixed branch point r for search
    #[arg(long, global = true, default_value_t = 3.0)]
    r: f64,
    /// Seed of the random test data
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Factor applied to every residual tolerance
    #[arg(long = "tol-scale", global = true, default_value_t = 1.0)]
    tol_scale: f64,
    /// Write the JSON report to this file instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also print the JSON report on standard output when --out is given
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Antisymmetry and cocycle condition of every central term
    VerifyCocycles,
    /// Fock-space operators: adjoints, commutator defects, block identity
    VerifyFock,
    /// Jumps of phi and the boundary-term consistency chain
    VerifyPhi,
    /// Torus and hyperelliptic periods with period-matrix checks
    Periods,
    /// Rational-ratio search and integrability report
    Search,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyCocycles => "verify-cocycles",
            Command::VerifyFock => "verify-fock",
            Command::VerifyPhi => "verify-phi",
            Command::Periods => "periods",
            Command::Search => "search",
        }
    }
}

/// Validated settings for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub subcommand: String,
    pub n: usize,
    pub shell: usize,
    pub p: usize,
    pub curve: HyperellipticCurve,
    pub target: (u64, u64),
    pub t: f64,
    pub r: f64,
    pub seed: u64,
    pub tol_scale: f64,
    pub out: Option<PathBuf>,
    pub print_json: bool,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self> {
        let default_n = if cli.command == Command::VerifyFock { 16 } else { 64 };
        if !(cli.tol_scale.is_finite() && cli.tol_scale > 0.0) {
            return Err(Error::Config(format!("--tol-scale must be positive, got {}", cli.tol_scale)));
        }
        if !(1..=2).contains(&cli.shell) {
            return Err(Error::Config(format!("--shell must be 1 or 2, got {}", cli.shell)));
        }
        let cfg = Self {
            subcommand: cli.command.name().into(),
            n: cli.n.unwrap_or(default_n),
            shell: cli.shell,
            p: cli.p,
            curve: HyperellipticCurve::parse(&cli.curve)?,
            target: parse_target(&cli.target)?,
            t: cli.t,
            r: cli.r,
            seed: cli.seed,
            tol_scale: cli.tol_scale,
            out: cli.out.clone(),
            print_json: cli.json || cli.out.is_none(),
        };
        if !(cfg.t > 0.0 && cfg.t < cfg.r && cfg.r.is_finite()) {
            return Err(Error::Config(format!("search needs 0 < t < r, got t = {}, r = {}", cfg.t, cfg.r)));
        }
        Ok(cfg)
    }
}

/// Run the suite selected by `cfg` and apply the tolerance scale.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let mut report = match cfg.subcommand.as_str() {
        "verify-cocycles" => suite::verify_cocycles(cfg.n, cfg.seed, COCYCLE_TRIPLES)?,
        "verify-fock" => suite::verify_fock(cfg.n, cfg.shell, cfg.p, cfg.seed, FOCK_PAIRS)?,
        "verify-phi" => suite::verify_phi(cfg.n, cfg.seed, PHI_PAIRS)?,
        "periods" => suite::periods(&cfg.curve)?,
        "search" => suite::search(cfg.target, cfg.t, cfg.r)?,
        other => return Err(Error::Config(format!("unknown subcommand '{other}'"))),
    };
    if cfg.tol_scale != 1.0 {
        report.scale_tolerances(cfg.tol_scale);
        report.insert("tol_scale", cfg.tol_scale);
    }
    Ok(report)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Numerical(_) | Error::NoSolution { .. } => EXIT_FAIL,
        _ => EXIT_CONFIG,
    }
}

/// Parse `args`, run, write the report and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let cfg = match RunConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let report = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code_for(&e);
        }
    };
    let json = report.to_json();
    if let Some(path) = &cfg.out {
        if let Err(e) = std::fs::write(path, format!("{json}\n")) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            return EXIT_CONFIG;
        }
    }
    if cfg.print_json {
        let _ = writeln!(stdout, "{json}");
    }
    let failures = report.failures();
    let total = report.checks.len();
    let _ = writeln!(stderr, "{}: {}/{} checks passed", report.command, total - failures.len(), total);
    for f in &failures {
        let _ = writeln!(stderr, "  FAIL {} value = [{:e}, {:e}] tolerance = {:e}", f.check, f.value[0], f.value[1], f.tolerance);
    }
    if failures.is_empty() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
