use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use hof_core::formal::{basis, flaw, lemma38};
use hof_core::index::{dim_quotient, dims_table};
use hof_core::periods::{self, PeriodCache, Workbench};
use hof_core::poincare::{CheckParams, Identity, Lab};
use hof_core::qseries::CoeffFile;
use hof_core::shuffle::{enumerate_shuffles, verify_lemma_310};
use hof_core::VerificationReport;

/// Verification suites for higher-order cusp forms.
#[derive(Parser, Debug)]
#[command(name = "hof", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions of the quotients S_k^t / S_k^{t-1}.
    Dims(DimsArgs),
    /// Shuffles of the order-t difference operator into r and t-r+1 parts.
    Shuffles(ShufflesArgs),
    /// Run a symbolic or numeric verification suite.
    Verify {
        #[command(subcommand)]
        which: VerifyCommand,
    },
    /// Evaluate a q-expansion from a coefficient file.
    Qseries(QseriesArgs),
    /// Check a Poincaré series identity on truncated sums.
    Poincare(PoincareArgs),
}

#[derive(Args, Debug)]
struct DimsArgs {
    #[arg(long, allow_negative_numbers = true)]
    genus: i64,
    #[arg(long)]
    t: i64,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    weight: i64,
    /// dim S_k, required for weight >= 4.
    #[arg(long)]
    dim_sk: Option<u64>,
    /// Print the t x g table up to the given genus and order.
    #[arg(long)]
    table: bool,
}

#[derive(Args, Debug)]
struct ShufflesArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    t: usize,
    /// Verify the shuffle expansion for every r <= t' <= t instead of listing.
    #[arg(long)]
    verify_lemma: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    Symbolic(SymbolicArgs),
    Numeric(NumericArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SymbolicSuite {
    Flaw,
    Lemma310,
    Lemma38,
    Zbasis,
    Ybasis,
}

#[derive(Args, Debug)]
struct SymbolicArgs {
    #[arg(long, value_enum)]
    suite: SymbolicSuite,
    #[arg(long, default_value_t = 2)]
    g: u32,
    #[arg(long, default_value_t = 3)]
    t: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NumericSuite {
    /// Modularity (t = 1) or the cocycle law, plus annihilation for t >= 2.
    Cocycle,
    Periods,
    Growth,
    Bounded,
}

#[derive(Args, Debug)]
struct NumericArgs {
    #[arg(long, default_value_t = 11)]
    level: u64,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 200)]
    terms: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Defaults to 1e-10, 1e-8 or 1e-6 for t = 1, 2, 3+.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = NumericSuite::Cocycle)]
    suite: NumericSuite,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct QseriesArgs {
    #[arg(long)]
    file: PathBuf,
    /// Point x+yi in the upper half-plane.
    #[arg(long, allow_hyphen_values = true)]
    eval: String,
    #[arg(long)]
    terms: Option<usize>,
}

#[derive(Args, Debug)]
struct PoincareArgs {
    #[arg(long)]
    check: Identity,
    #[arg(long, default_value_t = 11)]
    level: u64,
    #[arg(long, default_value = "3", allow_hyphen_values = true)]
    s: String,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    k: i32,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value_t = 200.0)]
    cmax: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct Output {
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Outcome = Result<bool, UsageError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("HOF_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Ignored if a pool already exists; nothing has been spawned yet.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Dims(a) => dims(a),
        Command::Shuffles(a) => shuffles(a),
        Command::Verify { which: VerifyCommand::Symbolic(a) } => symbolic(a),
        Command::Verify { which: VerifyCommand::Numeric(a) } => numeric(a),
        Command::Qseries(a) => qseries(a),
        Command::Poincare(a) => poincare(a),
    }
}

fn emit(report: &VerificationReport, out: &Output) -> Outcome {
    let body = if out.json { report.to_json() + "\n" } else { report.to_text() };
    // A closed pipe (e.g. `| head`) is not a verification failure.
    let _ = std::io::stdout().write_all(body.as_bytes());
    if let Some(path) = &out.out {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    Ok(report.passed)
}

fn dims(a: DimsArgs) -> Outcome {
    if a.genus < 0 {
        return Err(UsageError(format!("genus must be nonnegative, got {}", a.genus)));
    }
    if a.t < 1 {
        return Err(UsageError(format!("order t must be at least 1, got {}", a.t)));
    }
    let (g, t) = (u32::try_from(a.genus)?, u32::try_from(a.t)?);
    let dim_sk = match (a.weight, a.dim_sk) {
        (2, _) => 0,
        (_, Some(d)) => d,
        (_, None) => return Err(UsageError("--dim-sk is required for weight >= 4".into())),
    };
    if !a.table {
        println!("{}", dim_quotient(g, t, a.weight, dim_sk)?);
        return Ok(true);
    }
    let header: Vec<String> = (1..=g).map(|g| format!("g={g}")).collect();
    println!("t\t{}", header.join("\t"));
    if a.weight == 2 {
        for (row, t) in dims_table(g, t).iter().zip(1..) {
            let cells: Vec<String> = row.iter().map(|d| d.to_string()).collect();
            println!("{t}\t{}", cells.join("\t"));
        }
    } else {
        for t in 2..=t {
            let cells = (1..=g)
                .map(|g| dim_quotient(g, t, a.weight, dim_sk).map(|d| d.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            println!("{t}\t{}", cells.join("\t"));
        }
    }
    Ok(true)
}

fn shuffles(a: ShufflesArgs) -> Outcome {
    if a.verify_lemma {
        return emit(&verify_lemma_310(a.t)?, &a.out);
    }
    let list = enumerate_shuffles(a.r, a.t)?;
    if a.out.json {
        println!("{}", serde_json::to_string(&list)?);
    } else {
        for s in &list {
            println!("phi={:?} psi={:?}", s.phi, s.psi);
        }
        println!("{} shuffles", list.len());
    }
    Ok(true)
}

fn symbolic(a: SymbolicArgs) -> Outcome {
    let report = match a.suite {
        SymbolicSuite::Flaw => flaw::verify_f_law(a.g, a.t)?,
        SymbolicSuite::Lemma310 => verify_lemma_310(a.t)?,
        SymbolicSuite::Lemma38 => lemma38::verify_lemma_3_8(a.g, a.t),
        SymbolicSuite::Zbasis => basis::verify_zbasis(a.g, a.t)?,
        SymbolicSuite::Ybasis => basis::verify_ybasis(a.g, a.t)?,
    };
    emit(&report, &a.out)
}

fn cache() -> Result<PeriodCache, UsageError> {
    match std::env::var_os("HOF_CACHE") {
        Some(path) => Ok(PeriodCache::open(PathBuf::from(path))?),
        None => Ok(PeriodCache::in_memory()),
    }
}

fn numeric(a: NumericArgs) -> Outcome {
    if a.level != 11 {
        return Err(UsageError(format!("only level 11 has a bundled newform, got {}", a.level)));
    }
    if a.t == 0 || a.t > 3 {
        return Err(UsageError(format!("t must be 1, 2 or 3, got {}", a.t)));
    }
    if a.terms < 10 {
        return Err(UsageError("at least 10 coefficients are needed".into()));
    }
    let tol = a.tol.unwrap_or(match a.t {
        1 => 1e-10,
        2 => 1e-8,
        _ => 1e-6,
    });
    let wb = Workbench::level11(a.terms);
    let report = match a.suite {
        NumericSuite::Cocycle => {
            let mut r = periods::verify_numeric_cocycle(&wb, a.t, a.trials, a.seed, tol)?;
            if a.t >= 2 {
                r.merge(periods::verify_annihilation(&wb, a.t, a.trials, a.seed, tol)?);
            }
            r
        }
        NumericSuite::Periods => periods::verify_period_structure(&wb, a.trials, a.seed, tol, 100)?,
        NumericSuite::Growth => {
            let v = vec![1u32; a.t];
            periods::growth_probe(&wb, &v, a.trials, a.seed)?
        }
        NumericSuite::Bounded => periods::boundedness_probe(&wb, 14, a.seed)?,
    };
    let report = report.param("terms", a.terms);
    emit(&report, &a.out)
}

fn qseries(a: QseriesArgs) -> Outcome {
    let file = CoeffFile::from_path(&a.file)?;
    for w in &file.warnings {
        eprintln!("warning: {w}");
    }
    let z = parse_complex(&a.eval)?;
    if !(z.im > 0.0) {
        return Err(UsageError(format!("{z} is not in the upper half-plane")));
    }
    let (value, tail) = file.to_qseries(a.terms).evaluate(z)?;
    println!("{} {:+.17e}i  (tail <= {tail:.3e})", fmt_f(value.re), value.im);
    Ok(true)
}

fn fmt_f(x: f64) -> String {
    format!("{x:.17e}")
}

fn poincare(a: PoincareArgs) -> Outcome {
    if a.level != 11 {
        return Err(UsageError(format!("only level 11 is configured, got {}", a.level)));
    }
    let s = parse_complex(&a.s)?;
    let lab = Lab::new(Workbench::level11(1000), cache()?, "11a");
    let params = CheckParams { s, k: a.k, m: a.m, c_max: a.cmax, tol: a.tol };
    let report = lab.check_identity(a.check, params)?;
    lab.cache.save()?;
    emit(&report, &a.out)
}

/// Parses `RE`, `RE+IMi`, `RE-IMi`, `IMi` and `i`.
fn parse_complex(s: &str) -> Result<Complex64, UsageError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || UsageError(format!("cannot parse complex number {s:?}"));
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let im_of = |x: &str| match x {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        x => x.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, im_of(&body[i..])?))
        }
        None => Ok(Complex64::new(0.0, im_of(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let p = |s: &str| parse_complex(s).ok().map(|z| (z.re, z.im));
        assert_eq!(p("3"), Some((3.0, 0.0)));
        assert_eq!(p("2+1i"), Some((2.0, 1.0)));
        assert_eq!(p("2.5-0.5i"), Some((2.5, -0.5)));
        assert_eq!(p("-0.1+0.8i"), Some((-0.1, 0.8)));
        assert_eq!(p("1e-3+2e+1i"), Some((1e-3, 20.0)));
        assert_eq!(p("i"), Some((0.0, 1.0)));
        assert_eq!(p("0.5i"), Some((0.0, 0.5)));
        assert_eq!(p("x"), None);
    }
}
