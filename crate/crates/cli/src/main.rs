//! `ceslab`: norms, duality reports and inequality checks from the shell.
//!
//! stdout carries only JSON or CSV. Diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 a check failed or a computation errored,
//! 2 bad arguments or unreadable input, 3 domain mismatch.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ceslab::duality::{duality_report, sinnamon_sup, DualityTheorem, Element};
use ceslab::inequalities::{
    check_hardy_power, check_hardy_unit_weighted, hardy_extremal_step, hardy_unit_edge_step, InequalityCheck,
};
use ceslab::interpolation::{k_functional, k_functional_weighted, weighted_product};
use ceslab::operators::{cesaro, majorant};
use ceslab::sampling::{par_samples, random_step, Family, StepOptions};
use ceslab::suite::{run_suite, SuiteConfig};
use ceslab::{norm, CesError, Domain, DomainKind, SpaceSpec, StepFunction};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "ceslab", version, about = "Cesàro spaces over exact step functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    Unit,
    Halfline,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Random,
    Extremal,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a step function in a space.
    Norm {
        #[arg(long)]
        space: String,
        #[arg(long)]
        input: PathBuf,
    },
    /// Sampled ratio report for one of the duality theorems (codes 2 to 8).
    DualReport {
        #[arg(long)]
        space: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=8))]
        theorem: u8,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the ratio table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// What goes to stdout when `--out` is absent.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// `sup_{h ≺ f} ∫hg` by linear programming next to `∫f·g̃`.
    Sinnamon {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Sampled Hardy inequality: unweighted or `x^α` on the half-line,
    /// the `x^α` vs `x^α(1−x)` form on [0, 1].
    Hardy {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, value_enum)]
        domain: DomainArg,
        #[arg(long, value_enum, default_value_t = FamilyArg::Random)]
        family: FamilyArg,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// `K(t, f; L¹(w), L∞(w))` both ways, with the optimal split.
    Kfun {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "pow 0", allow_hyphen_values = true)]
        weight: String,
        #[arg(long)]
        t: f64,
    },
    /// All acceptance checks; per-check JSON and a summary CSV.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides every check's own sample count.
        #[arg(long)]
        samples: Option<usize>,
        /// Overrides every check's own relative tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// `x, f(x), Cf(x), f̃(x)` on an evenly spaced grid.
    Plotdata {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        start: Option<f64>,
        /// Defaults to 1 on [0, 1] and twice the horizon on the half-line.
        #[arg(long)]
        end: Option<f64>,
    },
}

/// A failure with the exit code it maps to.
struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn usage(msg: impl Into<String>) -> Fail {
        Fail { code: 2, msg: msg.into() }
    }
}

impl From<CesError> for Fail {
    fn from(e: CesError) -> Fail {
        let code = match e {
            CesError::Parse(_) | CesError::InvalidInput(_) => 2,
            CesError::DomainMismatch(_) => 3,
            _ => 1,
        };
        Fail { code, msg: e.to_string() }
    }
}

type Out = Result<u8, Fail>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, body: &str) -> Result<(), Fail> {
    fs::write(path, body).map_err(|e| Fail::usage(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("results serialize") + "\n"
}

fn cmd_norm(space: &str, input: &Path) -> Out {
    let x = SpaceSpec::parse(space)?;
    let f: StepFunction = read_json(input)?;
    print!("{}", to_json(&norm(&f, &x)?));
    Ok(0)
}

fn cmd_dual_report(
    space: &str,
    theorem: u8,
    samples: usize,
    seed: u64,
    out: Option<&Path>,
    csv: Option<&Path>,
    format: Format,
) -> Out {
    let x = SpaceSpec::parse(space)?;
    let theorem = DualityTheorem::from_code(theorem).ok_or_else(|| Fail::usage(format!("no theorem {theorem}")))?;
    let report = duality_report(theorem, &x, samples, seed)?;
    if let Some(path) = csv {
        write_file(path, &report.to_csv())?;
    }
    match out {
        Some(path) => write_file(path, &to_json(&report))?,
        None if format == Format::Csv => print!("{}", report.to_csv()),
        None => print!("{}", to_json(&report)),
    }
    if !report.pass {
        eprintln!("ratios leave the proven interval");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_sinnamon(f: &Path, g: &Path) -> Out {
    let f: Element = read_json(f)?;
    let g: Element = read_json(g)?;
    print!("{}", to_json(&sinnamon_sup(&f, &g)?));
    Ok(0)
}

fn cmd_hardy(p: f64, alpha: f64, domain: DomainArg, family: FamilyArg, samples: usize, seed: u64) -> Out {
    let kind = match domain {
        DomainArg::Unit => DomainKind::UnitInterval,
        DomainArg::Halfline => DomainKind::HalfLine,
    };
    let checks = par_samples(samples, seed, |i, rng| -> Result<InequalityCheck, CesError> {
        let f = match (family, kind) {
            (FamilyArg::Random, _) => random_step(rng, kind, Family::for_index(i), &StepOptions::default()),
            // x^(−α−1/p+ε) with ε shrinking along the samples
            (FamilyArg::Extremal, DomainKind::HalfLine) => {
                let eps = 0.5 * (1.0 - alpha - 1.0 / p) * 0.8f64.powi(i as i32 + 1);
                hardy_extremal_step(p, alpha, eps.max(1e-4), 400, Domain::half_line(1.0)?)?
            }
            // (1 − x)^(−γ) with γ climbing towards 1 + 1/p
            (FamilyArg::Extremal, DomainKind::UnitInterval) => {
                let gamma = 1.0 + (1.0 - 0.8f64.powi(i as i32 + 1)) / p;
                hardy_unit_edge_step(gamma, 0.5, 1e-10, 200)?
            }
        };
        match kind {
            DomainKind::HalfLine => check_hardy_power(&f, p, alpha),
            DomainKind::UnitInterval => check_hardy_unit_weighted(&f, p, alpha),
        }
    });
    let mut csv = String::from("sample,lhs,rhs,margin\n");
    let mut failed = 0;
    for (i, c) in checks.into_iter().enumerate() {
        let c = c?;
        failed += usize::from(!c.pass);
        writeln!(csv, "{i},{:e},{:e},{:e}", c.lhs, c.rhs, c.margin).unwrap();
    }
    print!("{csv}");
    if failed > 0 {
        eprintln!("{failed} of {samples} samples violate the inequality");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_kfun(input: &Path, weight: &str, t: f64) -> Out {
    let f: StepFunction = read_json(input)?;
    let w = SpaceSpec::parse_weight(weight, f.domain().kind())?;
    let d = k_functional_weighted(&f, t, &w)?;
    let rhs = k_functional(&weighted_product(&f, &w)?, t)?;
    let body = json!({
        "t": t,
        "weight": weight,
        "lhs": d.value,
        "rhs": rhs,
        "relative_gap": if d.value == 0.0 && rhs == 0.0 { 0.0 } else { (d.value - rhs).abs() / d.value.abs().max(rhs.abs()) },
        "witness": d,
    });
    print!("{}", to_json(&body));
    Ok(0)
}

fn cmd_suite(seed: u64, samples: Option<usize>, tolerance: Option<f64>, out: Option<&Path>, format: Format) -> Out {
    if let Some(tol) = tolerance {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Fail::usage(format!("tolerance must be a finite nonnegative number, got {tol}")));
        }
    }
    if samples == Some(0) {
        return Err(Fail::usage("samples must be positive"));
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| Fail::usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    let cfg = SuiteConfig { seed, samples, tolerance };
    let report = run_suite(&cfg);
    if let Some(dir) = out {
        for c in &report.criteria {
            write_file(&dir.join(format!("criterion-{:02}-{}.json", c.id, c.name)), &to_json(c))?;
        }
        write_file(&dir.join("summary.csv"), &report.summary_csv())?;
    }
    match format {
        Format::Csv => print!("{}", report.summary_csv()),
        Format::Json => print!("{}", to_json(&report)),
    }
    for c in report.criteria.iter().filter(|c| !c.pass) {
        eprintln!("criterion {} ({}) failed: {}", c.id, c.name, c.summary);
    }
    Ok(if report.pass() { 0 } else { 1 })
}

fn cmd_plotdata(input: &Path, points: usize, start: Option<f64>, end: Option<f64>) -> Out {
    let f: StepFunction = read_json(input)?;
    if points == 0 {
        return Err(Fail::usage("need at least one point"));
    }
    let start = start.unwrap_or(0.0);
    let end = end.unwrap_or(match f.domain() {
        Domain::UnitInterval => 1.0,
        Domain::HalfLine { horizon } => 2.0 * horizon,
    });
    if !(start >= 0.0 && end >= start) || (f.domain() == Domain::UnitInterval && end > 1.0) {
        return Err(Fail::usage(format!("grid [{start}, {end}] does not fit the domain")));
    }
    let cf = cesaro(&f);
    let ft = majorant(&f);
    let mut csv = String::from("x,f,Cf,f_tilde\n");
    for i in 0..points {
        let x = if points == 1 { end } else { start + (end - start) * i as f64 / (points - 1) as f64 };
        let inside = x <= f.horizon();
        let fx = if inside { f.eval(x) } else { 0.0 };
        let tx = if inside { ft.eval(x) } else { 0.0 };
        writeln!(csv, "{x},{fx},{},{tx}", cf.eval(x)).unwrap();
    }
    print!("{csv}");
    Ok(0)
}

fn set_threads() -> Result<(), Fail> {
    let Ok(raw) = std::env::var("CESLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Fail::usage(format!("CESLAB_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Fail::usage(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Out {
    set_threads()?;
    match cli.command {
        Command::Norm { space, input } => cmd_norm(&space, &input),
        Command::DualReport {
            space,
            theorem,
            samples,
            seed,
            out,
            csv,
            format,
        } => cmd_dual_report(&space, theorem, samples, seed, out.as_deref(), csv.as_deref(), format),
        Command::Sinnamon { f, g } => cmd_sinnamon(&f, &g),
        Command::Hardy {
            p,
            alpha,
            domain,
            family,
            samples,
            seed,
        } => cmd_hardy(p, alpha, domain, family, samples, seed),
        Command::Kfun { input, weight, t } => cmd_kfun(&input, &weight, t),
        Command::Suite {
            seed,
            samples,
            tolerance,
            out,
            format,
        } => cmd_suite(seed, samples, tolerance, out.as_deref(), format),
        Command::Plotdata {
            input,
            points,
            start,
            end,
        } => cmd_plotdata(&input, points, start, end),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
