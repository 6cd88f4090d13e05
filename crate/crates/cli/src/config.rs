//! Run configuration: flags over an optional TOML file over defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use torus_pdo::torus::TorusGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with any of the flags below; flags given on the command line win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Grid size
    #[arg(long, value_name = "NZxNY")]
    pub grid: Option<String>,
    /// Smallest mode
    #[arg(long)]
    pub nmin: Option<i64>,
    /// Largest mode
    #[arg(long)]
    pub nmax: Option<i64>,
    /// Explicit comma-separated modes, overriding nmin/nmax
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub modes: Option<Vec<i64>>,
    /// Relative tolerance of the η-quadrature
    #[arg(long)]
    pub tol: Option<f64>,
    /// one | laplace | resolvent(k) | modulated-resolvent(k) | expression in z, zeta, eta
    #[arg(long)]
    pub symbol: Option<String>,
    /// Declared degree of an expression symbol
    #[arg(long, allow_hyphen_values = true)]
    pub degree: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout if absent)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed of the random test functions
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    grid: Option<String>,
    nmin: Option<i64>,
    nmax: Option<i64>,
    modes: Option<Vec<i64>>,
    tol: Option<f64>,
    symbol: Option<String>,
    degree: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: TorusGrid,
    pub tol: f64,
    pub nmin: Option<i64>,
    pub nmax: Option<i64>,
    pub modes: Option<Vec<i64>>,
    pub symbol: Option<String>,
    pub degree: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

pub const DEFAULT_TOL: f64 = 1e-12;

pub fn parse_grid(s: &str) -> Result<TorusGrid, String> {
    let (a, b) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid '{s}' must look like NZxNY"))?;
    let n_z: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad N_z in grid '{s}'"))?;
    let n_y: usize = b
        .trim()
        .parse()
        .map_err(|_| format!("bad N_y in grid '{s}'"))?;
    TorusGrid::new(n_z, n_y).map_err(|e| e.to_string())
}

fn read_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, String> {
        let file = match &args.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let grid = match args.grid.clone().or(file.grid) {
            Some(g) => parse_grid(&g)?,
            None => TorusGrid::default(),
        };
        let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(format!("tolerance must lie in (0, 1), got {tol}"));
        }
        let nmin = args.nmin.or(file.nmin);
        let nmax = args.nmax.or(file.nmax);
        if let Some(n) = nmin {
            if n < 0 {
                return Err(format!("nmin must be nonnegative, got {n}"));
            }
        }
        if let (Some(lo), Some(hi)) = (nmin, nmax) {
            if lo > hi {
                return Err(format!("nmin {lo} exceeds nmax {hi}"));
            }
        }
        let limit = (grid.n_z() / 2) as i64;
        if let Some(hi) = nmax {
            if hi < 0 || hi >= limit {
                return Err(format!(
                    "nmax must lie in [0, N_z/2) = [0, {limit}), got {hi}"
                ));
            }
        }
        let modes = args.modes.clone().or(file.modes);
        if let Some(m) = &modes {
            if m.is_empty() {
                return Err("--modes is empty".into());
            }
            if let Some(bad) = m.iter().find(|n| n.abs() >= limit) {
                return Err(format!("mode {bad} is outside the grid (|n| < {limit})"));
            }
        }
        Ok(Self {
            grid,
            tol,
            nmin,
            nmax,
            modes,
            symbol: args.symbol.clone().or(file.symbol),
            degree: args.degree.or(file.degree),
            format: args.format.or(file.format).unwrap_or(Format::Json),
            out: args.out.clone().or(file.out),
            seed: args.seed.or(file.seed).unwrap_or(0),
        })
    }
}
