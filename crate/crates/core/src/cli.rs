//! The `jcone` command-line front end.
//!
//! Every command reads and writes the canonical matrix encoding of
//! [`crate::matfile`]. The process exit code is one of
//!
//! * `0` when the command succeeded and every checked property held,
//! * `1` when an order relation or a checked property was violated,
//! * `2` on any input error (unreadable file, bad encoding, a matrix outside
//!   the cone, an out-of-range parameter).
//!
//! [`run`] takes explicit output streams so the front end can be driven in
//! process by tests.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::geometry::GeodesicPath;
use crate::jcalc::{pow_j, random_pj};
use crate::matfile::{to_canonical_json, MatrixFile};
use crate::means::{riccati_residual, riccati_solve, weighted_mean};
use crate::order::j_leq;
use crate::propcheck::run_suite;
use crate::{Complex64, Error, Field, JPositive, Matrix, Quaternion, ScalarField, Signature};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Default value of `--tol`.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "jcone", version, about = "Calculus on the cone of J-positive matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Signature of J = diag(Id_p, -Id_q), written p,q.
    #[arg(long, global = true, value_name = "P,Q", value_parser = parse_signature)]
    signature: Option<Signature>,

    /// Relative tolerance for membership and verdicts.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weighted J-geometric mean of two J-positive matrices.
    Mean(MeanArgs),
    /// Samples of the geodesic between two J-positive matrices.
    Geodesic(GeodesicArgs),
    /// Real J-power of a J-positive matrix.
    Pow(PowArgs),
    /// Decides X <=_J Y.
    Order(OrderArgs),
    /// Solves X A^{-1} X = B on the cone.
    Riccati(PairArgs),
    /// Draws a random J-positive matrix.
    Rand(RandArgs),
    /// Runs a randomized property suite.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long, value_name = "FILE")]
    a: PathBuf,
    #[arg(long, value_name = "FILE")]
    b: PathBuf,
}

#[derive(Debug, Args)]
struct MeanArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Weight in [0, 1].
    #[arg(short = 't', default_value_t = 0.5, allow_negative_numbers = true)]
    t: f64,
    /// Write (A #_t B) - A^{1-t}_J B^t_J instead of the mean.
    #[arg(long)]
    emit_diff: bool,
}

#[derive(Debug, Args)]
struct GeodesicArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Number of equally spaced samples, endpoints included.
    #[arg(long, value_name = "K", value_parser = clap::value_parser!(u64).range(2..))]
    samples: u64,
}

#[derive(Debug, Args)]
struct PowArgs {
    #[arg(long, value_name = "FILE")]
    x: PathBuf,
    /// Real exponent.
    #[arg(short = 't', allow_negative_numbers = true)]
    t: f64,
}

#[derive(Debug, Args)]
struct OrderArgs {
    #[arg(long, value_name = "FILE")]
    x: PathBuf,
    #[arg(long, value_name = "FILE")]
    y: PathBuf,
}

#[derive(Debug, Args)]
struct RandArgs {
    /// Matrix dimension; must equal p + q.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value = "R", value_parser = parse_field)]
    field: ScalarField,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// powers, order, geometry, means, inequalities, quaternion or all.
    #[arg(long)]
    suite: String,
    /// Matrix dimension; must equal p + q.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value = "R", value_parser = parse_field)]
    field: ScalarField,
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

fn parse_signature(s: &str) -> Result<Signature, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_field(s: &str) -> Result<ScalarField, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Why a command did not exit cleanly.
#[derive(Debug)]
enum Failure {
    Input(String),
    Violated(String),
}

impl Failure {
    fn input(context: impl AsRef<str>, err: impl std::fmt::Display) -> Self {
        Failure::Input(format!("{}: {err}", context.as_ref()))
    }
}

/// What a successful command produced.
struct Output {
    /// The document written to `--out`.
    primary: String,
    /// A report that always goes to standard output.
    side: Option<String>,
    violation: Option<String>,
}

impl Output {
    fn plain(primary: String) -> Self {
        Output { primary, side: None, violation: None }
    }
}

/// Runs the front end on `args` (program name first) and returns the exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_INPUT
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let result = execute(&cli).and_then(|output| emit(&cli, output, stdout));
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Violated(msg)) => {
            let _ = writeln!(stderr, "jcone: violated: {msg}");
            EXIT_VIOLATED
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "jcone: error: {msg}");
            EXIT_INPUT
        }
    }
}

fn emit(cli: &Cli, output: Output, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut primary = output.primary;
    if !primary.is_empty() {
        primary.push('\n');
    }
    match &cli.out {
        Some(path) => fs::write(path, primary).map_err(|e| Failure::input(format!("--out {}", path.display()), e))?,
        None => stdout.write_all(primary.as_bytes()).map_err(|e| Failure::input("standard output", e))?,
    }
    if let Some(side) = output.side {
        writeln!(stdout, "{side}").map_err(|e| Failure::input("standard output", e))?;
    }
    match output.violation {
        Some(msg) => Err(Failure::Violated(msg)),
        None => Ok(()),
    }
}

macro_rules! by_field {
    ($field:expr, $f:ident($($arg:expr),* $(,)?)) => {
        match $field {
            ScalarField::R => $f::<f64>($($arg),*),
            ScalarField::C => $f::<Complex64>($($arg),*),
            ScalarField::H => $f::<Quaternion>($($arg),*),
        }
    };
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::Input(format!("--tol {tol}: tolerance must be finite and nonnegative")));
    }
    match &cli.command {
        Command::Mean(args) => {
            let sig = required_signature(cli, "mean")?;
            let (a, b) = load_pair(&args.pair)?;
            by_field!(a.field.promote(b.field), mean_cmd(&a, &b, sig, args, tol))
        }
        Command::Geodesic(args) => {
            let sig = required_signature(cli, "geodesic")?;
            let (a, b) = load_pair(&args.pair)?;
            by_field!(a.field.promote(b.field), geodesic_cmd(&a, &b, sig, args.samples as usize, tol))
        }
        Command::Pow(args) => {
            let sig = required_signature(cli, "pow")?;
            let x = load(&args.x, "--x")?;
            by_field!(x.field, pow_cmd(&x, sig, args.t, tol))
        }
        Command::Order(args) => {
            let sig = required_signature(cli, "order")?;
            let x = load(&args.x, "--x")?;
            let y = load(&args.y, "--y")?;
            by_field!(x.field.promote(y.field), order_cmd(&x, &y, sig, tol))
        }
        Command::Riccati(args) => {
            let sig = required_signature(cli, "riccati")?;
            let (a, b) = load_pair(args)?;
            by_field!(a.field.promote(b.field), riccati_cmd(&a, &b, sig, tol))
        }
        Command::Rand(args) => {
            let sig = required_signature(cli, "rand")?;
            check_dim(args.dim, sig)?;
            by_field!(args.field, rand_cmd(sig, cli.seed))
        }
        Command::Check(args) => check_cmd(cli, args),
    }
}

fn required_signature(cli: &Cli, command: &str) -> Result<Signature, Failure> {
    cli.signature
        .ok_or_else(|| Failure::Input(format!("`{command}` requires --signature p,q")))
}

fn check_dim(dim: Option<usize>, sig: Signature) -> Result<(), Failure> {
    match dim {
        Some(d) if d != sig.n() => Err(Failure::Input(format!(
            "--dim {d} does not match signature {sig} (p + q = {})",
            sig.n()
        ))),
        _ => Ok(()),
    }
}

fn load(path: &Path, flag: &str) -> Result<MatrixFile, Failure> {
    let context = format!("{flag} {}", path.display());
    let text = fs::read_to_string(path).map_err(|e| Failure::input(&context, e))?;
    MatrixFile::parse(&text).map_err(|e| Failure::input(&context, e))
}

fn load_pair(args: &PairArgs) -> Result<(MatrixFile, MatrixFile), Failure> {
    Ok((load(&args.a, "--a")?, load(&args.b, "--b")?))
}

fn decode<T: Field>(file: &MatrixFile, flag: &str) -> Result<Matrix<T>, Failure> {
    file.to_matrix().map_err(|e| Failure::input(flag, e))
}

fn certify<T: Field>(file: &MatrixFile, sig: Signature, tol: f64, flag: &str) -> Result<JPositive<T>, Failure> {
    JPositive::new(decode(file, flag)?, sig, tol).map_err(|e| Failure::input(flag, e))
}

fn matrix_json<T: Field>(m: &Matrix<T>) -> Result<String, Failure> {
    MatrixFile::from_matrix(m)
        .and_then(|f| f.to_json())
        .map_err(|e| Failure::input("result", e))
}

fn json_line(value: &impl serde::Serialize) -> Result<String, Failure> {
    to_canonical_json(value).map_err(|e| Failure::input("result", e))
}

fn computation(e: Error) -> Failure {
    Failure::input("computation", e)
}

fn riccati_violation(residual: f64, b: &JPositive<impl Field>, tol: f64) -> Option<String> {
    let bound = tol * b.matrix().frobenius_norm().max(1.0);
    (!(residual <= bound)).then(|| format!("Riccati residual {residual:e} exceeds {bound:e}"))
}

fn mean_cmd<T: Field>(a: &MatrixFile, b: &MatrixFile, sig: Signature, args: &MeanArgs, tol: f64) -> Result<Output, Failure> {
    let a = certify::<T>(a, sig, tol, "--a")?;
    let b = certify::<T>(b, sig, tol, "--b")?;
    let t = args.t;
    let result = weighted_mean(&a, &b, t).map_err(|e| Failure::input("-t", e))?;
    let primary = if args.emit_diff {
        let naive = pow_j(&a, 1.0 - t).map_err(computation)?.matrix() * pow_j(&b, t).map_err(computation)?.matrix();
        matrix_json(&(result.mean.matrix() - &naive))?
    } else {
        matrix_json(result.mean.matrix())?
    };
    let side = match result.riccati_residual {
        Some(r) => Some(json_line(&json!({ "riccati_residual": r }))?),
        None => None,
    };
    let violation = result.riccati_residual.and_then(|r| riccati_violation(r, &b, tol));
    Ok(Output { primary, side, violation })
}

fn geodesic_cmd<T: Field>(a: &MatrixFile, b: &MatrixFile, sig: Signature, k: usize, tol: f64) -> Result<Output, Failure> {
    let a = certify::<T>(a, sig, tol, "--a")?;
    let b = certify::<T>(b, sig, tol, "--b")?;
    let path = GeodesicPath::new(a, b).map_err(computation)?;
    let files = path
        .samples(k)
        .map_err(computation)?
        .iter()
        .map(|x| MatrixFile::from_matrix(x.matrix()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(computation)?;
    Ok(Output::plain(json_line(&files)?))
}

fn pow_cmd<T: Field>(x: &MatrixFile, sig: Signature, t: f64, tol: f64) -> Result<Output, Failure> {
    let x = certify::<T>(x, sig, tol, "--x")?;
    let p = pow_j(&x, t).map_err(|e| Failure::input("-t", e))?;
    Ok(Output::plain(matrix_json(p.matrix())?))
}

fn order_cmd<T: Field>(x: &MatrixFile, y: &MatrixFile, sig: Signature, tol: f64) -> Result<Output, Failure> {
    let xm = decode::<T>(x, "--x")?;
    let ym = decode::<T>(y, "--y")?;
    let verdict = j_leq(&xm, &ym, sig, tol).map_err(|e| Failure::input("--x/--y", e))?;
    let violation = (!verdict.holds).then(|| format!("X <=_J Y fails (margin {:e})", verdict.margin));
    Ok(Output { primary: json_line(&verdict)?, side: None, violation })
}

fn riccati_cmd<T: Field>(a: &MatrixFile, b: &MatrixFile, sig: Signature, tol: f64) -> Result<Output, Failure> {
    let a = certify::<T>(a, sig, tol, "--a")?;
    let b = certify::<T>(b, sig, tol, "--b")?;
    let m = riccati_solve(&a, &b).map_err(computation)?;
    let residual = riccati_residual(m.matrix(), &a, &b).map_err(computation)?;
    let solution = MatrixFile::from_matrix(m.matrix()).map_err(computation)?;
    let primary = json_line(&json!({ "residual": residual, "solution": solution }))?;
    Ok(Output { primary, side: None, violation: riccati_violation(residual, &b, tol) })
}

fn rand_cmd<T: Field>(sig: Signature, seed: u64) -> Result<Output, Failure> {
    Ok(Output::plain(matrix_json(random_pj::<T>(sig, seed).matrix())?))
}

fn check_cmd(cli: &Cli, args: &CheckArgs) -> Result<Output, Failure> {
    let sig = match cli.signature {
        Some(sig) => sig,
        None => Signature::new(1, 1).map_err(computation)?,
    };
    check_dim(args.dim, sig)?;
    let reports = run_suite(&args.suite, sig, args.field, sig.n(), args.trials, cli.seed, cli.tol)
        .map_err(|e| Failure::input("--suite", e))?;
    let lines = reports
        .iter()
        .map(|r| r.to_json_line())
        .collect::<Result<Vec<_>, _>>()
        .map_err(computation)?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.property_id.as_str()).collect();
    let violation = (!failed.is_empty()).then(|| format!("properties failed: {}", failed.join(", ")));
    Ok(Output { primary: lines.join("\n"), side: None, violation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("jcone").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&[]).0, EXIT_INPUT);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["rand", "--signature", "1"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["geodesic", "--a", "x", "--b", "y", "--samples", "1", "--signature", "1,1"]).0, EXIT_INPUT);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("mean"));
    }

    #[test]
    fn rand_requires_signature_and_matching_dim() {
        let (code, _, err) = run_args(&["rand"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("--signature"));
        assert_eq!(run_args(&["rand", "--signature", "1,1", "--dim", "3"]).0, EXIT_INPUT);
    }

    #[test]
    fn rand_is_seeded() {
        let a = run_args(&["rand", "--signature", "2,1", "--field", "H", "--seed", "9"]);
        let b = run_args(&["--seed", "9", "rand", "--field", "H", "--signature", "2,1"]);
        assert_eq!(a.0, EXIT_OK);
        assert_eq!(a, b);
        let c = run_args(&["rand", "--signature", "2,1", "--field", "H", "--seed", "10"]);
        assert_ne!(a.1, c.1);
        let file = MatrixFile::parse(&a.1).unwrap();
        assert_eq!((file.field, file.rows), (ScalarField::H, 3));
    }

    #[test]
    fn check_rejects_unknown_suite() {
        let (code, _, err) = run_args(&["check", "--suite", "bogus"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("unknown suite"));
    }

    #[test]
    fn check_zero_trials_passes_silently() {
        let (code, out, _) = run_args(&["check", "--suite", "powers", "--trials", "0"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.is_empty());
    }
}
