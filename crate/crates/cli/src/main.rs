//! `torus-pdo`: verification reports and symbol tables from the command line.

mod config;
mod expr;
mod symbol_spec;

use std::io::Write;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use torus_pdo::symbols::{poisson_conjugation_symbol, trace_symbol, ClassicalSymbol};
use torus_pdo::torus::{dirichlet_to_neumann, random_circle_field, CircleField};
use torus_pdo::verify::{self, VerificationReport, VerifyConfig};
use torus_pdo::{Complex64, Error};

use config::{CommonArgs, Format, RunConfig};
use symbol_spec::SymbolSpec;

#[derive(Debug, Parser)]
#[command(
    name = "torus-pdo",
    version,
    about = "Symbol calculus checks on the flat torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Theorem {
    LemmaExt,
    Thm1,
    Thm2,
    Thm3,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one verification and write its report
    Verify {
        #[arg(value_enum)]
        theorem: Theorem,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Dirichlet-to-Neumann eigenvalues against 2|n|
    DnSpectrum {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate the trace symbol (1/2π)∫a dη
    SymbolTrace {
        #[command(flatten)]
        table: TableArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate the symbol of P*AP
    Pconj {
        #[command(flatten)]
        table: TableArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, clap::Args)]
struct TableArgs {
    /// Comma-separated ζ values (default 1..=nmax)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    zeta: Option<Vec<f64>>,
    /// Comma-separated z values (default 0)
    #[arg(long = "z", value_delimiter = ',', allow_hyphen_values = true)]
    z: Option<Vec<f64>>,
}

/// Exit status with its message.
#[derive(Debug)]
enum Failure {
    /// Bad input or a violated precondition: exit 2.
    Usage(String),
    /// The computation itself failed: exit 1.
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergent(_) | Error::DegenerateFit(_) => Failure::Runtime(e.to_string()),
            Error::DegreeTooHigh { .. } => Failure::Usage(format!("precondition violated: {e}")),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn timestamp() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    secs.to_string()
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| Failure::Runtime(e.to_string()))
        }
    }
}

fn load_symbol(cfg: &RunConfig, default: &str) -> Result<ClassicalSymbol, Failure> {
    let src = cfg.symbol.as_deref().unwrap_or(default);
    let spec = SymbolSpec::parse(src, cfg.degree).map_err(usage)?;
    if let Some(w) = symbol_spec::homogeneity_warning(&spec) {
        eprintln!("{w}");
    }
    spec.build().map_err(usage)
}

fn range(lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi).collect()
}

fn doubling(lo: i64, hi: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut n = lo.max(1);
    while n <= hi {
        out.push(n);
        n *= 2;
    }
    out
}

fn verify_modes(cfg: &RunConfig, theorem: Theorem, symbol: Option<&ClassicalSymbol>) -> Vec<i64> {
    if let Some(m) = &cfg.modes {
        return m.clone();
    }
    let multiplier = symbol.map(|s| s.is_x_independent()).unwrap_or(true);
    match theorem {
        Theorem::Thm2 => {
            let (lo, hi) = (cfg.nmin.unwrap_or(3).max(1), cfg.nmax.unwrap_or(20));
            (-hi..=-lo).chain(lo..=hi).collect()
        }
        _ if !multiplier => doubling(cfg.nmin.unwrap_or(4), cfg.nmax.unwrap_or(32)),
        _ => range(cfg.nmin.unwrap_or(1).max(1), cfg.nmax.unwrap_or(20)),
    }
}

fn verify_config(cfg: &RunConfig) -> VerifyConfig {
    VerifyConfig {
        grid: cfg.grid,
        tol: cfg.tol,
        seed: cfg.seed,
        ..VerifyConfig::default()
    }
}

fn summarize(report: &VerificationReport) {
    let worst = report.errors.iter().copied().fold(0.0, f64::max);
    let slope = match report.fitted_slope {
        Some(s) => format!("{s:.3}"),
        None => "n/a".into(),
    };
    eprintln!(
        "{}: {} ({} modes, max error {worst:.3e}, fitted slope {slope})",
        report.theorem_id,
        if report.passed { "pass" } else { "FAIL" },
        report.modes.len()
    );
    for (n, ok) in report.modes.iter().zip(report.mode_passed()) {
        if !ok {
            eprintln!("  mode {n} outside tolerance");
        }
    }
    for c in report.metadata.checks.iter().filter(|c| !c.passed) {
        eprintln!(
            "  check failed: {} = {:e} (tolerance {:e})",
            c.name, c.value, c.tolerance
        );
    }
}

fn cmd_verify(theorem: Theorem, cfg: &RunConfig) -> Result<bool, Failure> {
    let vc = verify_config(cfg);
    let report = match theorem {
        Theorem::LemmaExt => {
            let band = cfg.nmax.unwrap_or(20);
            let f = random_circle_field(cfg.grid.n_z(), band, cfg.seed);
            verify::verify_lemma_ext(&f, &vc)?
        }
        Theorem::Thm1 => {
            let a = load_symbol(cfg, "resolvent(1)")?;
            verify::verify_theorem1(&a, &verify_modes(cfg, theorem, Some(&a)), &vc)?
        }
        Theorem::Thm2 => verify::verify_theorem2(&verify_modes(cfg, theorem, None), &vc)?,
        Theorem::Thm3 => {
            let a = load_symbol(cfg, "one")?;
            verify::verify_theorem3(&a, &verify_modes(cfg, theorem, Some(&a)), &vc)?
        }
    };
    let text = match cfg.format {
        Format::Json => report.clone().with_timestamp(timestamp()).to_json() + "\n",
        Format::Csv => report.to_csv(),
    };
    emit(cfg, &text)?;
    summarize(&report);
    Ok(report.passed)
}

#[derive(Serialize)]
struct SpectrumRow {
    n: i64,
    dn: f64,
    two_abs_n: f64,
    ratio_minus_1: Option<f64>,
}

fn cmd_dn_spectrum(cfg: &RunConfig) -> Result<bool, Failure> {
    let nmax = cfg.nmax.unwrap_or(20);
    let n_z = cfg.grid.n_z();
    let ones = CircleField::from_fn(n_z, |n| {
        if n.abs() <= nmax {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let dn = dirichlet_to_neumann(&ones);
    let ns: Vec<i64> = match &cfg.modes {
        Some(m) => m.clone(),
        None => range(-nmax, nmax),
    };
    let rows: Vec<SpectrumRow> = ns
        .into_iter()
        .map(|n| {
            let v = if n.abs() <= nmax {
                dn.coeff(n).re
            } else {
                dirichlet_to_neumann(&CircleField::mode(n_z, n).expect("checked mode"))
                    .coeff(n)
                    .re
            };
            let two = 2.0 * n.unsigned_abs() as f64;
            SpectrumRow {
                n,
                dn: v,
                two_abs_n: two,
                ratio_minus_1: (n != 0).then(|| v / two - 1.0),
            }
        })
        .collect();
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
        Format::Csv => {
            let mut s = String::from("n,dn,two_abs_n,ratio_minus_1\n");
            for r in &rows {
                let ratio = r
                    .ratio_minus_1
                    .map(|x| format!("{x:e}"))
                    .unwrap_or_default();
                s.push_str(&format!("{},{:e},{:e},{ratio}\n", r.n, r.dn, r.two_abs_n));
            }
            s
        }
    };
    emit(cfg, &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct SymbolRow {
    z: f64,
    zeta: f64,
    re: f64,
    im: f64,
}

fn symbol_table(table: &TableArgs, cfg: &RunConfig, conjugation: bool) -> Result<bool, Failure> {
    let a = load_symbol(cfg, if conjugation { "one" } else { "resolvent(1)" })?;
    let b = if conjugation {
        poisson_conjugation_symbol(&a, cfg.tol)?
    } else {
        trace_symbol(&a, cfg.tol)?
    };
    let zetas = table
        .zeta
        .clone()
        .unwrap_or_else(|| (1..=cfg.nmax.unwrap_or(20)).map(|n| n as f64).collect());
    let zs = table.z.clone().unwrap_or_else(|| vec![0.0]);
    if let Some(bad) = zetas.iter().chain(&zs).find(|v| !v.is_finite()) {
        return Err(usage(format!("table coordinate {bad} is not finite")));
    }
    let mut rows = Vec::new();
    for &z in &zs {
        for &zeta in &zetas {
            let v = b.eval(z, zeta)?;
            rows.push(SymbolRow {
                z,
                zeta,
                re: v.re,
                im: v.im,
            });
        }
    }
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
        Format::Csv => {
            let mut s = String::from("z,zeta,re,im\n");
            for r in &rows {
                s.push_str(&format!("{},{},{:e},{:e}\n", r.z, r.zeta, r.re, r.im));
            }
            s
        }
    };
    emit(cfg, &text)?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Verify { theorem, common } => {
            cmd_verify(theorem, &RunConfig::resolve(&common).map_err(usage)?)
        }
        Command::DnSpectrum { common } => {
            cmd_dn_spectrum(&RunConfig::resolve(&common).map_err(usage)?)
        }
        Command::SymbolTrace { table, common } => {
            symbol_table(&table, &RunConfig::resolve(&common).map_err(usage)?, false)
        }
        Command::Pconj { table, common } => {
            symbol_table(&table, &RunConfig::resolve(&common).map_err(usage)?, true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
