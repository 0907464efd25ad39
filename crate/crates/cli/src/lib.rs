//! Command-line front end: weight inspection, inversion, functional calculus
//! and the counterexample reproductions.
//!
//! Exit codes: 0 on success, 1 when a remark check fails, 2 for bad input and
//! 3 when a numerical precondition fails.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use beurling::levy::{DEFAULT_NODES, POINTWISE_SAMPLES};
use beurling::series::parse_complex;
use beurling::wiener::{DEFAULT_EPSILON, DEFAULT_SAMPLES};
use beurling::{
    build_contour, levy_report, wiener_report, BeurlingElement, Complex64, Contour, Error,
    HolomorphicFn, InvertOptions, LaurentPolynomial, LevyOptions, WeightSpec,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod remark;

pub use remark::{cmd_remark, Check, Provenance, RemarkReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ARGUMENT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "beurling",
    version,
    about = "Weighted Wiener inversion and holomorphic functional calculus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(clap::Args, Debug)]
pub struct Common {
    /// Output format; text for scalars, json for reports by default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct Numerics {
    /// Margin parameter for the constructed weights, in (0, 1).
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub eps: f64,
    /// Coefficients are computed on [-N, N].
    #[arg(long, env = "BEURLING_DEFAULT_TRUNC", default_value_t = 64)]
    pub trunc: usize,
    /// Samples per circle (a power of two).
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the inner and outer radii rho2 rho1 of a weight.
    Rho {
        #[arg(long)]
        weight: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check the weight axioms on a finite window.
    CheckWeight {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 64)]
        window: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a Laurent polynomial at a point.
    Eval {
        /// Coefficient file, {"terms": [{"n": .., "re": .., "im": ..}]}.
        #[arg(long)]
        f: PathBuf,
        /// Point such as 1+0i, -2i or 0.5.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[command(flatten)]
        common: Common,
    },
    /// Invert f in the weighted algebra built for it.
    #[command(alias = "wiener")]
    Invert {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value = "const")]
        weight: String,
        #[command(flatten)]
        numerics: Numerics,
        #[command(flatten)]
        common: Common,
    },
    /// Compute phi(f) by contour integration of the resolvent.
    Levy {
        #[arg(long)]
        f: PathBuf,
        /// exp, recip, square, id or rational:<P>:<Q>.
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "const")]
        weight: String,
        /// circle:<cx>:<cy>:<r>; built around the range of f when omitted.
        #[arg(long, allow_hyphen_values = true)]
        contour: Option<String>,
        /// Quadrature nodes.
        #[arg(long = "Q", short = 'Q', default_value_t = DEFAULT_NODES)]
        q: usize,
        /// Distance kept from the range when the contour is built.
        #[arg(long)]
        clearance: Option<f64>,
        #[command(flatten)]
        numerics: Numerics,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce counterexample 1, 2 or 3.
    Remark {
        id: u8,
        #[command(flatten)]
        common: Common,
    },
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Checks(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Core(Error::Io(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::Core(Error::Json(e))
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            Self::Core(_) => EXIT_ARGUMENT,
            Self::Checks(_) => EXIT_CHECK_FAILED,
        }
    }
}

pub fn read_coefficients(path: &Path) -> beurling::Result<LaurentPolynomial> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// `circle:<cx>:<cy>:<r>`.
pub fn parse_contour(s: &str, q: usize) -> beurling::Result<Contour> {
    let parts: Vec<&str> = s.split(':').collect();
    let ["circle", cx, cy, r] = parts.as_slice() else {
        return Err(Error::Parse(format!(
            "bad contour `{s}` (expected circle:<cx>:<cy>:<r>)"
        )));
    };
    let num = |x: &str| {
        x.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number `{x}` in contour `{s}`")))
    };
    Contour::circle(Complex64::new(num(cx)?, num(cy)?), num(r)?, q)
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// Deterministic pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// `n, |c_n|, ω(n), |c_n| ω(n)` for every stored coefficient.
pub fn coefficient_csv(e: &BeurlingElement, w: &WeightSpec) -> beurling::Result<String> {
    let mut s = String::from("n,abs_c,omega,weighted\n");
    for (n, c) in e.coeffs.terms() {
        let om = w.eval(n)?;
        writeln!(s, "{n},{:e},{:e},{:e}", c.norm(), om, c.norm() * om).unwrap();
    }
    Ok(s)
}

fn write_out<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
    if let Some(path) = out {
        std::fs::write(path, to_json(value)?)
            .map_err(|e| Error::Argument(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RhoOutput {
    weight: WeightSpec,
    rho2: f64,
    rho1: f64,
    exactness: beurling::Exactness,
}

#[derive(Serialize)]
struct CheckWeightOutput {
    weight: WeightSpec,
    window: i64,
    submultiplicative: bool,
    violation: Option<beurling::weights::Violation>,
    symmetric: bool,
    constant: bool,
    rho2: f64,
    rho1: f64,
}

#[derive(Serialize)]
struct EvalOutput {
    z: Complex64,
    value: Complex64,
}

/// Runs one parsed command and returns what goes to stdout.
pub fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Rho { weight, common } => {
            let w: WeightSpec = weight.parse()?;
            let r = w.rho_bounds()?;
            let out = RhoOutput {
                weight: w,
                rho2: r.rho2,
                rho1: r.rho1,
                exactness: r.exactness,
            };
            write_out(&common.out, &out)?;
            Ok(match common.format.unwrap_or(Format::Text) {
                Format::Text => format!("{:.10} {:.10}\n", r.rho2, r.rho1),
                Format::Json => to_json(&out)?,
                Format::Csv => format!("rho2,rho1\n{},{}\n", r.rho2, r.rho1),
            })
        }
        Command::CheckWeight {
            weight,
            window,
            common,
        } => {
            let w: WeightSpec = weight.parse()?;
            let report = w.check_submultiplicative(window)?;
            let r = w.rho_bounds()?;
            let out = CheckWeightOutput {
                symmetric: w.is_symmetric(),
                constant: w.is_constant(),
                weight: w,
                window,
                submultiplicative: report.ok,
                violation: report.first_violation,
                rho2: r.rho2,
                rho1: r.rho1,
            };
            write_out(&common.out, &out)?;
            let text = match common.format.unwrap_or(Format::Text) {
                Format::Text => format!(
                    "submultiplicative {}\n{}symmetric {}\nconstant {}\nrho {:.10} {:.10}\n",
                    out.submultiplicative,
                    out.violation
                        .as_ref()
                        .map(|v| format!("violation {v:?}\n"))
                        .unwrap_or_default(),
                    out.symmetric,
                    out.constant,
                    out.rho2,
                    out.rho1
                ),
                Format::Json => to_json(&out)?,
                Format::Csv => format!(
                    "submultiplicative,symmetric,constant,rho2,rho1\n{},{},{},{},{}\n",
                    out.submultiplicative, out.symmetric, out.constant, out.rho2, out.rho1
                ),
            };
            if !out.submultiplicative {
                return Err(Failure::Core(Error::Argument(format!(
                    "{} is not a weight: {}\n{text}",
                    out.weight,
                    out.violation.map(|v| format!("{v:?}")).unwrap_or_default()
                ))));
            }
            Ok(text)
        }
        Command::Eval { f, z, common } => {
            let f = read_coefficients(&f)?;
            let z = parse_complex(&z)?;
            let value = f.evaluate(z)?;
            let out = EvalOutput { z, value };
            write_out(&common.out, &out)?;
            Ok(match common.format.unwrap_or(Format::Text) {
                Format::Text => format!("{}\n", format_complex(value)),
                Format::Json => to_json(&out)?,
                Format::Csv => format!("re,im\n{},{}\n", value.re, value.im),
            })
        }
        Command::Invert {
            f,
            weight,
            numerics,
            common,
        } => {
            let f = read_coefficients(&f)?;
            let w: WeightSpec = weight.parse()?;
            let opts = InvertOptions {
                trunc: numerics.trunc,
                samples: numerics.samples,
            };
            let report = wiener_report(&f, &w, numerics.eps, opts)?;
            write_out(&common.out, &report)?;
            Ok(match common.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Csv => coefficient_csv(&report.inverse, &w)?,
                Format::Text => {
                    let c = &report.construction;
                    format!(
                        "case {:?}\nnu {}\nr1 {}\nr2 {}\nnorm {}\nnorm_bound {}\nresidual {:e}\nclauses a={} b={} c={}\n",
                        c.case,
                        c.nu,
                        c.r1,
                        c.r2,
                        report.inverse.norm,
                        report.norm_bound.map_or("unbounded".into(), |b| b.to_string()),
                        report.residual,
                        report.clauses.a,
                        report.clauses.b,
                        report.clauses.c
                    )
                    .to_lowercase()
                }
            })
        }
        Command::Levy {
            f,
            phi,
            weight,
            contour,
            q,
            clearance,
            numerics,
            common,
        } => {
            let f = read_coefficients(&f)?;
            let phi: HolomorphicFn = phi.parse()?;
            let w: WeightSpec = weight.parse()?;
            let contour = match contour {
                Some(s) => parse_contour(&s, q)?,
                None => build_contour(&f, &phi, q, clearance)?,
            };
            let opts = LevyOptions {
                epsilon: numerics.eps,
                trunc: numerics.trunc,
                samples: numerics.samples,
            };
            let report = levy_report(&f, &phi, &contour, &w, opts)?;
            write_out(&common.out, &report)?;
            Ok(match common.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Csv => coefficient_csv(&report.result, &w)?,
                Format::Text => {
                    let c = &report.construction;
                    format!(
                        "phi {}\nchi {}\nr1 {}\nr2 {}\nnodes {}\nquadrature_delta {:e}\npointwise_error {:e} ({} points)\nclauses a={} b={} c={}\n",
                        report.phi,
                        c.chi,
                        c.r1,
                        c.r2,
                        report.contour.q,
                        report.quadrature_delta,
                        report.pointwise_error,
                        POINTWISE_SAMPLES,
                        report.clauses.a,
                        report.clauses.b,
                        report.clauses.c
                    )
                }
            })
        }
        Command::Remark { id, common } => {
            let mut report = cmd_remark(id)?;
            if let Some(path) = &common.out {
                report.artifacts.push(path.display().to_string());
            }
            write_out(&common.out, &report)?;
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Csv => {
                    let mut s = String::from("name,expected,computed,pass,provenance\n");
                    for c in &report.checks {
                        let q = |x: &str| format!("\"{}\"", x.replace('"', "\"\""));
                        writeln!(
                            s,
                            "{},{},{},{},{:?}",
                            q(&c.name),
                            q(&c.expected),
                            q(&c.computed),
                            c.pass,
                            c.provenance
                        )
                        .unwrap();
                    }
                    s.to_lowercase()
                }
                Format::Text => {
                    let mut s = String::new();
                    for c in &report.checks {
                        let status = if c.pass { "PASS" } else { "FAIL" };
                        writeln!(
                            s,
                            "{status} {}: expected {}, computed {}",
                            c.name, c.expected, c.computed
                        )
                        .unwrap();
                    }
                    s
                }
            };
            if !report.pass() {
                return Err(Failure::Checks(
                    report.failures().map(|c| c.name.clone()).collect(),
                ));
            }
            Ok(text)
        }
    }
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ARGUMENT
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match run(cli) {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(failure) => {
            match &failure {
                Failure::Core(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                }
                Failure::Checks(names) => {
                    for n in names {
                        let _ = writeln!(stderr, "check failed: {n}");
                    }
                }
            }
            failure.exit_code()
        }
    }
}
