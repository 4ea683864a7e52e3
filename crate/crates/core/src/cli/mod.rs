//! Batch front-end: `confwave <command> [flags]`.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 on
//! input errors (unreadable or malformed files, bad flags, inputs the engine
//! rejects).

mod commands;
pub mod input;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{format_sig12, render_text, Check, Report};

#[derive(Debug, Parser)]
#[command(name = "confwave", version, about = "Lorentzian conformal geometry engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Also write the structured report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Args)]
pub struct Source {
    /// Metric definition file.
    #[arg(long, required_unless_present = "spec", conflicts_with = "spec")]
    pub metric: Option<PathBuf>,
    /// Plane-wave spec file; its Brinkmann metric is used.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Probe grid `lo,hi,count` per axis, axes joined by `x`.
    #[arg(long, allow_hyphen_values = true)]
    pub probes: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Curvature tensors at the probes and their algebraic identities.
    Curvature {
        #[command(flatten)]
        source: Source,
        /// Bound on the identity residuals (default 1e-8).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Conformal flatness by the Weyl tensor.
    Weyl {
        #[command(flatten)]
        source: Source,
        /// Bound on max |W| (default 1e-8).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Classifies a vector field as Killing, homothetic, conformal or none.
    KillingCheck {
        #[command(flatten)]
        source: Source,
        /// Components separated by `;`, in the chart's coordinates.
        #[arg(long, allow_hyphen_values = true)]
        field: String,
        /// Residual bound for `L_X g = λ g` (default 1e-8).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Plane-wave predicate and Killing-algebra characterization.
    PlanewaveVerify {
        #[arg(long, required_unless_present = "metric", conflicts_with = "metric")]
        spec: Option<PathBuf>,
        /// A metric file, checked against `--field` as the parallel null field.
        #[arg(long, requires = "field")]
        metric: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        field: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        probes: Option<String>,
        /// Bound on the plane-wave residuals (default 1e-7).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Penrose limit of a metric in adapted coordinates.
    Penrose {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        probes: Option<String>,
        /// Number of ε values in the rescaling ladder.
        #[arg(long, default_value_t = 8)]
        ladder: usize,
        /// Bound on the asymptotic convergence ratio (default 0.6).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Penrose limit of `e^σ g` against the limit of `g`.
    PenroseConformal {
        #[arg(long)]
        metric: PathBuf,
        /// Conformal exponent σ in the chart's coordinates.
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long, allow_hyphen_values = true)]
        probes: Option<String>,
        /// Bound on the comparison residuals (default 1e-8).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Brinkmann to Rosen conversion and the two limits of the wave.
    RosenConvert {
        #[arg(long)]
        spec: PathBuf,
        /// Bound on the pulled-back metric residual (default 1e-8).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Eigenspace decomposition under a derivation, or the grading of so(1, n+1).
    Grade {
        /// Transverse dimension for the grading of so(1, n+1) by A.
        #[arg(long, conflicts_with_all = ["algebra", "matrix"], required_unless_present = "algebra")]
        n: Option<usize>,
        #[arg(long, requires = "matrix")]
        algebra: Option<PathBuf>,
        /// An element of the algebra, or a derivation with `--derivation`.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Read `--matrix` as a derivation on the algebra's coordinates.
        #[arg(long)]
        derivation: bool,
        /// Bound on the bracket grading residual (default 1e-8).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Semisimple, unipotent, hyperbolic and elliptic parts of a matrix.
    Jordan {
        #[arg(long)]
        matrix: PathBuf,
        /// Bound on the reconstruction error (default 1e-10).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The multiset σ_B for a given α.
    Spectrum {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
    },
    /// Null lines invariant under every basis matrix of an algebra.
    NullLines {
        #[arg(long)]
        algebra: PathBuf,
        /// Bound on the invariance defect (default 1e-8).
        #[arg(long)]
        tol: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Curvature { .. } => "curvature",
            Command::Weyl { .. } => "weyl",
            Command::KillingCheck { .. } => "killing-check",
            Command::PlanewaveVerify { .. } => "planewave-verify",
            Command::Penrose { .. } => "penrose",
            Command::PenroseConformal { .. } => "penrose-conformal",
            Command::RosenConvert { .. } => "rosen-convert",
            Command::Grade { .. } => "grade",
            Command::Jordan { .. } => "jordan",
            Command::Spectrum { .. } => "spectrum",
            Command::NullLines { .. } => "null-lines",
        }
    }
}

/// Input-level failure: exit status 2.
#[derive(Debug, Clone)]
pub struct CliError(pub String);

impl CliError {
    pub fn input(msg: impl Into<String>) -> CliError {
        CliError(msg.into())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Parses `argv`, runs the command, writes the report. Returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let echo: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let start = Instant::now();
    let report = match commands::execute(&cli, echo) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", cli.command.name());
            return EXIT_INPUT;
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    let json = report.to_json();
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &json) {
            let _ = writeln!(stderr, "error: writing {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    let _ = match cli.format {
        Format::Structured => stdout.write_all(json.as_bytes()),
        Format::Text => stdout.write_all(render_text(&report, elapsed).as_bytes()),
    };
    if report.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
