//! Experiment configuration from command-line flags and an optional flat
//! `key=value` file. Flags override file entries; unknown keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use roughvol::{ModelParams, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Moments,
    Price,
    Varred,
    Bench,
}

impl FromStr for Command {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simulate" => Command::Simulate,
            "moments" => Command::Moments,
            "price" => Command::Price,
            "varred" => Command::Varred,
            "bench" => Command::Bench,
            other => bail!("unknown command `{other}` (expected simulate, moments, price, varred or bench)"),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Simulate => "simulate",
            Command::Moments => "moments",
            Command::Price => "price",
            Command::Varred => "varred",
            Command::Bench => "bench",
        })
    }
}

/// Which path files `simulate` writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dump {
    None,
    Csv,
    Binary,
    Both,
}

impl FromStr for Dump {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => Dump::None,
            "csv" => Dump::Csv,
            "binary" => Dump::Binary,
            "both" => Dump::Both,
            other => bail!("unknown dump format `{other}` (expected none, csv, binary or both)"),
        })
    }
}

impl Dump {
    pub fn csv(self) -> bool {
        matches!(self, Dump::Csv | Dump::Both)
    }

    pub fn binary(self) -> bool {
        matches!(self, Dump::Binary | Dump::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub schemes: Vec<Scheme>,
    /// `model.hurst` equals `hursts[0]`.
    pub hursts: Vec<f64>,
    pub model: ModelParams,
    pub maturity: f64,
    /// Steps per unit of time; the grid of horizon `T` has `round(T n)` steps.
    pub steps_per_unit: Vec<usize>,
    pub paths: Vec<usize>,
    pub batches: usize,
    pub strikes: Vec<f64>,
    pub seed: u64,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub reps: usize,
    /// Number of random parameter combinations for `varred`; 0 runs the
    /// configured model only.
    pub sweep: usize,
    pub dump: Dump,
}

impl ExperimentConfig {
    pub fn scheme(&self) -> Scheme {
        self.schemes[0]
    }

    pub fn paths(&self) -> usize {
        self.paths[0]
    }

    pub fn steps_per_unit(&self) -> usize {
        self.steps_per_unit[0]
    }
}

pub const KEYS: [&str; 22] = [
    "command", "model", "scheme", "H", "alpha", "sigma0", "xi", "rho", "r", "S0", "T", "n", "P",
    "batches", "strikes", "seed", "out", "threads", "reps", "sweep", "dump", "config",
];

#[derive(Debug, Parser)]
#[command(name = "roughvol", version, about = "Rough volatility simulation and option pricing experiments")]
struct Flags {
    /// simulate | moments | price | varred | bench
    #[arg(long)]
    command: Option<String>,
    /// Parameter preset: spx | malfunction
    #[arg(long)]
    model: Option<String>,
    /// cholesky | hybrid | rdonsker, comma separated where several are allowed
    #[arg(long)]
    scheme: Option<String>,
    /// Hurst index, comma separated for moments and bench
    #[arg(long = "H")]
    hurst: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    sigma0: Option<String>,
    #[arg(long)]
    xi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<String>,
    #[arg(long = "r")]
    rate: Option<String>,
    #[arg(long = "S0")]
    spot: Option<String>,
    /// Horizon / maturity
    #[arg(long = "T")]
    maturity: Option<String>,
    /// Steps per unit of time, comma separated for bench
    #[arg(long = "n")]
    steps: Option<String>,
    /// Paths per batch, comma separated for bench
    #[arg(long = "P")]
    paths: Option<String>,
    #[arg(long)]
    batches: Option<String>,
    /// Comma separated list or `start:stop:step`
    #[arg(long)]
    strikes: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<String>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<String>,
    /// Timed repetitions per bench cell
    #[arg(long)]
    reps: Option<String>,
    /// Random parameter combinations for varred
    #[arg(long)]
    sweep: Option<String>,
    /// Path files written by simulate: none | csv | binary | both
    #[arg(long)]
    dump: Option<String>,
    /// Flat key=value file with the same keys
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn into_entries(self) -> (BTreeMap<&'static str, String>, Option<PathBuf>) {
        let pairs = [
            ("command", self.command),
            ("model", self.model),
            ("scheme", self.scheme),
            ("H", self.hurst),
            ("alpha", self.alpha),
            ("sigma0", self.sigma0),
            ("xi", self.xi),
            ("rho", self.rho),
            ("r", self.rate),
            ("S0", self.spot),
            ("T", self.maturity),
            ("n", self.steps),
            ("P", self.paths),
            ("batches", self.batches),
            ("strikes", self.strikes),
            ("seed", self.seed),
            ("out", self.out),
            ("threads", self.threads),
            ("reps", self.reps),
            ("sweep", self.sweep),
            ("dump", self.dump),
        ];
        let map = pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
        (map, self.config)
    }
}

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<&'static str, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value, found `{raw}`", lineno + 1))?;
        let key = key.trim().trim_start_matches("--");
        let known = KEYS
            .iter()
            .find(|k| **k == key && **k != "config")
            .ok_or_else(|| anyhow!("line {}: unknown key `{key}`", lineno + 1))?;
        if map.insert(*known, value.trim().to_string()).is_some() {
            bail!("line {}: key `{key}` given twice", lineno + 1);
        }
    }
    Ok(map)
}

/// Parses `argv` (program name first), merges the optional config file and
/// validates the result.
pub fn parse_config<I, T>(argv: I) -> Result<ExperimentConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let flags = Flags::try_parse_from(argv)?;
    let (cli, file) = flags.into_entries();
    let mut entries = match file {
        Some(path) => read_config_file(&path)?,
        None => BTreeMap::new(),
    };
    entries.extend(cli);
    build(&entries)
}

fn read_config_file(path: &Path) -> Result<BTreeMap<&'static str, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config file {}", path.display()))?;
    parse_config_file(&text).with_context(|| format!("in config file {}", path.display()))
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| anyhow!("invalid value `{value}` for --{key}: {e}"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    let items: Vec<T> = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_one(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        bail!("--{key} needs at least one value");
    }
    Ok(items)
}

/// `80,90,100` or `start:stop:step` (both ends included).
pub fn parse_strikes(value: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = value.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step): (f64, f64, f64) =
                (parse_one("strikes", start)?, parse_one("strikes", stop)?, parse_one("strikes", step)?);
            if !(step > 0.0 && stop >= start) {
                bail!("invalid strike range `{value}`: need start <= stop and step > 0");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            // Rounded to 12 decimals so that 0.5:1.6:0.1 yields 0.6, not 0.6000000000000001.
            Ok((0..=count)
                .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                .collect())
        }
        [_] => parse_list("strikes", value),
        _ => bail!("invalid strike list `{value}`"),
    }
}

fn build(entries: &BTreeMap<&'static str, String>) -> Result<ExperimentConfig> {
    let get = |k: &str| entries.get(k).map(String::as_str);
    let command: Command = parse_one("command", get("command").ok_or_else(|| anyhow!("--command is required"))?)?;
    let sweep: usize = get("sweep").map(|v| parse_one("sweep", v)).transpose()?.unwrap_or(0);

    let mut model = match get("model").unwrap_or("spx") {
        "spx" => ModelParams::spx(),
        "malfunction" => ModelParams::malfunction(),
        other => bail!("unknown model preset `{other}` (expected spx or malfunction)"),
    };
    if command == Command::Varred && sweep > 0 {
        model.spot = 1.0;
    }
    for (key, field) in [
        ("alpha", &mut model.alpha),
        ("sigma0", &mut model.sigma0),
        ("xi", &mut model.xi),
        ("rho", &mut model.rho),
        ("r", &mut model.rate),
        ("S0", &mut model.spot),
    ] {
        if let Some(v) = get(key) {
            *field = parse_one(key, v)?;
        }
    }

    let multi = matches!(command, Command::Moments | Command::Bench);
    let schemes: Vec<Scheme> = match get("scheme") {
        Some(v) => parse_list("scheme", v)?,
        None if multi => Scheme::ALL.to_vec(),
        None => vec![Scheme::Hybrid],
    };
    let hursts: Vec<f64> = match get("H") {
        Some(v) => parse_list("H", v)?,
        None if command == Command::Moments => vec![0.05, 0.15, 0.40],
        None => vec![model.hurst],
    };
    for &h in &hursts {
        if !(h > 0.0 && h < 1.0) {
            bail!("--H {h} is out of range: the Hurst index must lie in (0, 1)");
        }
    }
    model.hurst = hursts[0];
    model.validate()?;

    let maturity: f64 = get("T").map(|v| parse_one("T", v)).transpose()?.unwrap_or(1.0);
    if !(maturity.is_finite() && maturity > 0.0) {
        bail!("--T {maturity} must be positive");
    }
    let steps_per_unit: Vec<usize> = match get("n") {
        Some(v) => parse_list("n", v)?,
        None if command == Command::Bench => vec![250, 1000],
        None => vec![4 * 252],
    };
    let paths: Vec<usize> = match get("P") {
        Some(v) => parse_list("P", v)?,
        None => match command {
            Command::Simulate => vec![1000],
            Command::Moments | Command::Price => vec![10_000],
            Command::Varred if sweep > 0 => vec![1000],
            Command::Varred => vec![300],
            Command::Bench => vec![100, 1000, 2500, 10_000],
        },
    };
    if steps_per_unit.contains(&0) {
        bail!("--n must be positive");
    }
    if paths.contains(&0) {
        bail!("--P must be positive");
    }
    let batches: usize = match get("batches") {
        Some(v) => parse_one("batches", v)?,
        None => match command {
            Command::Moments | Command::Varred => 30,
            _ => 1,
        },
    };
    if batches == 0 {
        bail!("--batches must be positive");
    }
    let strikes = match get("strikes") {
        Some(v) => parse_strikes(v)?,
        None if command == Command::Varred && sweep > 0 => parse_strikes("0.5:1.6:0.1")?,
        None => parse_strikes("80:150:10")?,
    };
    if strikes.iter().any(|k| !(k.is_finite() && *k > 0.0)) || strikes.windows(2).any(|w| w[1] <= w[0]) {
        bail!("--strikes must be positive and strictly ascending");
    }
    let seed: u64 = get("seed").map(|v| parse_one("seed", v)).transpose()?.unwrap_or(1);
    let out = PathBuf::from(get("out").unwrap_or("out"));
    let threads: Option<usize> = get("threads").map(|v| parse_one("threads", v)).transpose()?;
    if threads == Some(0) {
        bail!("--threads must be positive");
    }
    let reps: usize = get("reps").map(|v| parse_one("reps", v)).transpose()?.unwrap_or(3);
    if reps < 3 {
        bail!("--reps {reps}: at least 3 repetitions are needed for a median");
    }
    let dump: Dump = get("dump").map(|v| parse_one("dump", v)).transpose()?.unwrap_or(Dump::Both);

    if !multi && schemes.len() > 1 {
        bail!("--scheme takes a single value for {command}");
    }
    if !multi && hursts.len() > 1 {
        bail!("--H takes a single value for {command}");
    }
    if command != Command::Bench && (paths.len() > 1 || steps_per_unit.len() > 1) {
        bail!("--P and --n take a single value for {command}");
    }
    if command == Command::Moments && batches < 2 {
        bail!("--batches must be at least 2 for moments");
    }
    if command == Command::Varred && batches < 2 {
        bail!("--batches must be at least 2 for varred");
    }
    if matches!(command, Command::Price | Command::Varred) && paths[0] < 2 {
        bail!("--P must be at least 2 for {command}");
    }
    if sweep > 0 && command != Command::Varred {
        bail!("--sweep only applies to varred");
    }

    Ok(ExperimentConfig {
        command,
        schemes,
        hursts,
        model,
        maturity,
        steps_per_unit,
        paths,
        batches,
        strikes,
        seed,
        out,
        threads,
        reps,
        sweep,
        dump,
    })
}
