//! Command-line front end: sweep datasets and single-shot analyses as CSV or JSON.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::gmi::{capacity, gamma_uniform, gmi_rate};
use crate::highres::{
    loading_estimate, mse_optimal_loading, rate_optimal_loading, scaling_law, SEARCH_FLOOR,
};
use crate::montecarlo::{estimate_moments, ChannelParams};
use crate::numerics::{db_to_linear, nats_to_bits, Tolerance};
use crate::quantizer::UniformSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

/// |z| above which an mc-validate cell counts as a failure.
pub const Z_FAIL: f64 = 5.0;

/// Points in the "auto" loading grid.
pub const AUTO_GRID_POINTS: usize = 60;

const FOUR_SIGMA: f64 = 4.0;
const MAX_BITS: u32 = 24;

#[derive(Debug, Parser)]
#[command(name = "quantrate", version, about = "GMI of quantized AWGN links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// GMI at the optimal loading factor over an SNR grid.
    RateSweep(SweepArgs),
    /// GMI as a function of the loading factor.
    LoadingSweep(SweepArgs),
    /// Optimal, estimated and MSE-optimal loading factors per resolution.
    OptimalLoading(SweepArgs),
    /// Monte Carlo GMI estimates against the analytic values.
    McValidate(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Bits,
    Nats,
}

impl Units {
    fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Bits => nats_to_bits(nats),
            Units::Nats => nats,
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Units::Bits => "bits",
            Units::Nats => "nats",
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Resolutions in bits: comma list, ranges as `a..b`.
    #[arg(long)]
    bits: Option<String>,
    /// SNR grid in dB: comma list or `start:step:stop`.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Loading factors: `auto` or a comma list of numbers, `star`, `hat`.
    #[arg(long)]
    loading: Option<String>,
    /// Monte Carlo samples per cell.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, value_enum, default_value_t = Units::Bits)]
    units: Units,
}

/// One loading-grid entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoadingChoice {
    Value(f64),
    Star,
    Hat,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadingGrid {
    Auto,
    List(Vec<LoadingChoice>),
}

/// Parsed and validated sweep parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub resolutions: Vec<u32>,
    pub snr_grid_db: Vec<f64>,
    pub loading_grid: LoadingGrid,
    pub samples: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub units: Units,
    pub seed: u64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

/// Parses `1,2,5..8` into `[1, 2, 5, 6, 7, 8]`.
pub fn parse_bits(s: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("invalid resolution '{t}'"))
        };
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(format!("empty range '{item}'"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse(item)?),
        }
    }
    if let Some(&b) = out.iter().find(|&&b| b == 0 || b > MAX_BITS) {
        return Err(format!("resolution must be in 1..={MAX_BITS}, got {b}"));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Parses a comma list of dB values or an inclusive `start:step:stop` range.
pub fn parse_snr_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("invalid number '{t}'"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if step <= 0.0 || b < a {
                return Err(format!("invalid range '{s}'"));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            if n > 100_000 {
                return Err(format!("range '{s}' has too many points"));
            }
            (0..=n).map(|i| a + i as f64 * step).collect()
        }
        [_] => s.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("invalid SNR grid '{s}'")),
    };
    if grid.is_empty() {
        return Err("SNR grid is empty".into());
    }
    Ok(grid)
}

/// Parses `auto` or a comma list of positive numbers and the keywords `star`, `hat`.
pub fn parse_loading(s: &str) -> Result<LoadingGrid, String> {
    if s.trim() == "auto" {
        return Ok(LoadingGrid::Auto);
    }
    s.split(',')
        .map(str::trim)
        .map(|t| match t {
            "star" => Ok(LoadingChoice::Star),
            "hat" => Ok(LoadingChoice::Hat),
            _ => t
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x > 0.0)
                .map(LoadingChoice::Value)
                .ok_or_else(|| format!("invalid loading factor '{t}'")),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(LoadingGrid::List)
}

/// `AUTO_GRID_POINTS` log-spaced loading factors on `[0.5, scaling_law + 3]`.
pub fn auto_loading_grid(levels: usize) -> Vec<f64> {
    let (lo, hi) = (SEARCH_FLOOR.ln(), (scaling_law(levels) + 3.0).ln());
    let n = AUTO_GRID_POINTS - 1;
    (0..=n)
        .map(|i| (lo + (hi - lo) * i as f64 / n as f64).exp())
        .collect()
}

struct Defaults {
    bits: &'static str,
    snr_db: &'static str,
    loading: &'static str,
}

impl SweepArgs {
    fn config(&self, d: Defaults) -> Result<SweepConfig, CliError> {
        let bits = self.bits.as_deref().unwrap_or(d.bits);
        let snr = self.snr_db.as_deref().unwrap_or(d.snr_db);
        let loading = self.loading.as_deref().unwrap_or(d.loading);
        Ok(SweepConfig {
            resolutions: parse_bits(bits).map_err(CliError::Usage)?,
            snr_grid_db: parse_snr_grid(snr).map_err(CliError::Usage)?,
            loading_grid: parse_loading(loading).map_err(CliError::Usage)?,
            samples: self.samples,
            output_path: self.out.clone(),
            format: self.format,
            units: self.units,
            seed: self.seed,
        })
    }
}

/// A tabular result: ordered column names and rows of JSON scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub command: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub params: Value,
}

impl Dataset {
    /// Renders the dataset as CSV with a header row.
    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            }))?;
        }
        w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
    }

    /// Renders `{command, params, rows}` with one object per row.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(r.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "command": self.command, "params": self.params, "rows": rows })
    }
}

fn levels_of(b: u32) -> usize {
    1usize << (b - 1)
}

fn num(x: f64) -> Value {
    json!(x)
}

fn config_params(cfg: &SweepConfig, with_samples: bool) -> Value {
    let loading = match &cfg.loading_grid {
        LoadingGrid::Auto => json!("auto"),
        LoadingGrid::List(items) => Value::Array(
            items
                .iter()
                .map(|c| match c {
                    LoadingChoice::Value(x) => json!(x),
                    LoadingChoice::Star => json!("star"),
                    LoadingChoice::Hat => json!("hat"),
                })
                .collect(),
        ),
    };
    let mut p = json!({
        "bits": cfg.resolutions,
        "snr_db": cfg.snr_grid_db,
        "loading": loading,
        "units": cfg.units.suffix(),
    });
    if with_samples {
        p["samples"] = json!(cfg.samples);
        p["seed"] = json!(cfg.seed);
    }
    p
}

/// Columns `b, snr_db, L_star, gmi_<u>, capacity_<u>`.
pub fn cmd_rate_sweep(cfg: &SweepConfig) -> crate::Result<Dataset> {
    let u = cfg.units;
    let tol = Tolerance::default();
    let stars = cfg
        .resolutions
        .par_iter()
        .map(|&b| {
            let k = levels_of(b);
            let l = rate_optimal_loading(k, &tol)?;
            Ok((b, l, gamma_uniform(&UniformSpec::from_loading(k, l)?)))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let cells: Vec<(u32, f64, f64, f64)> = stars
        .iter()
        .flat_map(|&(b, l, g)| cfg.snr_grid_db.iter().map(move |&s| (b, s, l, g)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(b, snr_db, l, g)| {
            let snr = db_to_linear(snr_db);
            Ok(vec![
                json!(b),
                num(snr_db),
                num(l),
                num(u.convert(gmi_rate(g, snr)?)),
                num(u.convert(capacity(snr)?)),
            ])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(Dataset {
        command: "rate-sweep",
        columns: vec![
            "b".into(),
            "snr_db".into(),
            "L_star".into(),
            format!("gmi_{}", u.suffix()),
            format!("capacity_{}", u.suffix()),
        ],
        rows,
        params: config_params(cfg, false),
    })
}

/// Columns `b, L, snr_db, gmi_<u>, marker`; marker rows sit at L*, L-hat and L = 4.
pub fn cmd_loading_sweep(cfg: &SweepConfig) -> crate::Result<Dataset> {
    let u = cfg.units;
    let tol = Tolerance::default();
    let mut points: Vec<(u32, f64, &'static str)> = Vec::new();
    for &b in &cfg.resolutions {
        let k = levels_of(b);
        let mut ls: Vec<(f64, &'static str)> = match &cfg.loading_grid {
            LoadingGrid::Auto => auto_loading_grid(k).into_iter().map(|l| (l, "")).collect(),
            LoadingGrid::List(items) => items
                .iter()
                .filter_map(|c| match c {
                    LoadingChoice::Value(x) => Some((*x, "")),
                    _ => None,
                })
                .collect(),
        };
        ls.push((rate_optimal_loading(k, &tol)?, "L_star"));
        if k >= 2 {
            ls.push((loading_estimate(k)?, "L_hat"));
        }
        ls.push((FOUR_SIGMA, "four_sigma"));
        ls.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
        points.extend(ls.into_iter().map(|(l, m)| (b, l, m)));
    }
    let cells: Vec<(u32, f64, &'static str, f64)> = points
        .iter()
        .flat_map(|&(b, l, m)| cfg.snr_grid_db.iter().map(move |&s| (b, l, m, s)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(b, l, marker, snr_db)| {
            let g = gamma_uniform(&UniformSpec::from_loading(levels_of(b), l)?);
            Ok(vec![
                json!(b),
                num(l),
                num(snr_db),
                num(u.convert(gmi_rate(g, db_to_linear(snr_db))?)),
                json!(marker),
            ])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(Dataset {
        command: "loading-sweep",
        columns: vec![
            "b".into(),
            "L".into(),
            "snr_db".into(),
            format!("gmi_{}", u.suffix()),
            "marker".into(),
        ],
        rows,
        params: config_params(cfg, false),
    })
}

/// Columns `K, b, L_star, L_hat, scaling_law, L_mse`; needs b >= 2.
pub fn cmd_optimal_loading_table(cfg: &SweepConfig) -> crate::Result<Dataset> {
    if let Some(b) = cfg.resolutions.iter().find(|&&b| b < 2) {
        return Err(Error::Parameter(format!(
            "optimal loading is undefined for b = {b}; use b >= 2"
        )));
    }
    let tol = Tolerance::default();
    let rows = cfg
        .resolutions
        .par_iter()
        .map(|&b| {
            let k = levels_of(b);
            Ok(vec![
                json!(k),
                json!(b),
                num(rate_optimal_loading(k, &tol)?),
                num(loading_estimate(k)?),
                num(scaling_law(k)),
                num(mse_optimal_loading(k, &tol)?),
            ])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(Dataset {
        command: "optimal-loading",
        columns: ["K", "b", "L_star", "L_hat", "scaling_law", "L_mse"]
            .map(String::from)
            .to_vec(),
        rows,
        params: json!({ "bits": cfg.resolutions }),
    })
}

/// Seed of cell `index`, derived from the base seed.
pub fn cell_seed(base: u64, index: usize) -> u64 {
    let mut z = base ^ (index as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Columns `b, L, snr_db, gmi_analytic_<u>, gmi_mc_<u>, std_err, z_score`.
pub fn cmd_mc_validate(cfg: &SweepConfig) -> crate::Result<Dataset> {
    let u = cfg.units;
    let tol = Tolerance::default();
    let mut cells = Vec::new();
    for &b in &cfg.resolutions {
        let k = levels_of(b);
        let mut ls = Vec::new();
        let choices = match &cfg.loading_grid {
            LoadingGrid::Auto => auto_loading_grid(k)
                .into_iter()
                .map(LoadingChoice::Value)
                .collect(),
            LoadingGrid::List(items) => items.clone(),
        };
        for c in choices {
            let l = match c {
                LoadingChoice::Value(x) => x,
                LoadingChoice::Star => rate_optimal_loading(k, &tol)?,
                LoadingChoice::Hat if k >= 2 => loading_estimate(k)?,
                LoadingChoice::Hat => continue,
            };
            ls.push(l);
        }
        for l in ls {
            for &s in &cfg.snr_grid_db {
                cells.push((b, l, s));
            }
        }
    }
    let rows = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(b, l, snr_db))| {
            let snr = db_to_linear(snr_db);
            let spec = UniformSpec::from_loading(levels_of(b), l)?;
            let analytic = gmi_rate(gamma_uniform(&spec), snr)?;
            let params = ChannelParams::from_snr(snr)?;
            let est = estimate_moments(&params, &spec.quantizer(), cfg.samples, cell_seed(cfg.seed, i))?;
            let z = (est.gmi_hat_nats - analytic) / est.std_err_gmi;
            Ok(vec![
                json!(b),
                num(l),
                num(snr_db),
                num(u.convert(analytic)),
                num(u.convert(est.gmi_hat_nats)),
                num(u.convert(est.std_err_gmi)),
                num(z),
            ])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(Dataset {
        command: "mc-validate",
        columns: vec![
            "b".into(),
            "L".into(),
            "snr_db".into(),
            format!("gmi_analytic_{}", u.suffix()),
            format!("gmi_mc_{}", u.suffix()),
            "std_err".into(),
            "z_score".into(),
        ],
        rows,
        params: config_params(cfg, true),
    })
}

/// JSON Schema of a subcommand's `--format json` output.
pub fn output_schema(command: &str) -> Option<&'static str> {
    match command {
        "rate-sweep" => Some(include_str!("../schemas/rate-sweep.schema.json")),
        "loading-sweep" => Some(include_str!("../schemas/loading-sweep.schema.json")),
        "optimal-loading" => Some(include_str!("../schemas/optimal-loading.schema.json")),
        "mc-validate" => Some(include_str!("../schemas/mc-validate.schema.json")),
        _ => None,
    }
}

/// Largest |z| in an mc-validate dataset.
pub fn max_abs_z(data: &Dataset) -> f64 {
    let idx = data.columns.iter().position(|c| c == "z_score");
    data.rows
        .iter()
        .filter_map(|r| idx.and_then(|i| r[i].as_f64()))
        .fold(0.0, |m, z| m.max(z.abs()))
}

fn emit(data: &Dataset, cfg: &SweepConfig) -> Result<(), CliError> {
    let bytes = match cfg.format {
        Format::Csv => data.to_csv()?,
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&data.to_json()).map_err(io::Error::other)?;
            v.push(b'\n');
            v
        }
    };
    match &cfg.output_path {
        Some(p) => File::create(p)?.write_all(&bytes)?,
        None => io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let (cfg, data) = match cli.command {
        Command::RateSweep(a) => {
            let cfg = a.config(Defaults { bits: "1..6", snr_db: "-10:1:40", loading: "star" })?;
            let d = cmd_rate_sweep(&cfg)?;
            (cfg, d)
        }
        Command::LoadingSweep(a) => {
            let cfg = a.config(Defaults { bits: "3,6,9", snr_db: "10", loading: "auto" })?;
            let d = cmd_loading_sweep(&cfg)?;
            (cfg, d)
        }
        Command::OptimalLoading(a) => {
            let cfg = a.config(Defaults { bits: "2..16", snr_db: "10", loading: "star" })?;
            let d = cmd_optimal_loading_table(&cfg)?;
            (cfg, d)
        }
        Command::McValidate(a) => {
            let cfg = a.config(Defaults {
                bits: "1..6",
                snr_db: "-10,0,10,20,30",
                loading: "star,4",
            })?;
            if let LoadingGrid::Auto = cfg.loading_grid {
                return usage("mc-validate needs an explicit loading list");
            }
            let d = cmd_mc_validate(&cfg)?;
            (cfg, d)
        }
    };
    emit(&data, &cfg)?;
    if data.command == "mc-validate" && max_abs_z(&data) > Z_FAIL {
        eprintln!("quantrate: some cells exceed |z| > {Z_FAIL}");
        return Ok(EXIT_VALIDATION);
    }
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("quantrate: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            eprintln!("quantrate: I/O error: {e}");
            EXIT_IO
        }
    }
}
