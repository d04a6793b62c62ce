//! Runners for the five commands. Every runner writes into the output
//! directory and returns the paths of the files it produced.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use roughvol::csv::{fmt_f64, fmt_opt};
use roughvol::diagnostics::{coefficient_of_variation, moment_error_table, write_moment_table_csv, BatchStats};
use roughvol::fbm::{self, dump};
use roughvol::model::{euler_paths, write_curves_csv};
use roughvol::pricing::{mc_price, modify, turbo_price, write_prices_csv, PriceEstimate};
use roughvol::rng::NormalStream;
use roughvol::{GridSpec, ModelParams, PricingRequest, Scheme, SeedSpec};

use crate::config::{Command, ExperimentConfig};

/// Runs the configured command on a pool with `config.threads` workers, or
/// on the global pool when unset.
pub fn run(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .context("building the worker pool")?
            .install(|| dispatch(config)),
        None => dispatch(config),
    }
}

fn dispatch(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&config.out)
        .with_context(|| format!("creating output directory {}", config.out.display()))?;
    match config.command {
        Command::Simulate => run_simulate(config),
        Command::Moments => run_moments(config),
        Command::Price => run_price(config),
        Command::Varred => run_varred(config),
        Command::Bench => run_bench(config),
    }
}

fn grid_for(maturity: f64, steps_per_unit: usize) -> Result<GridSpec> {
    Ok(GridSpec::new(maturity, GridSpec::steps_for(maturity, steps_per_unit))?)
}

fn write_file(path: PathBuf, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<PathBuf> {
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    body(&mut out).with_context(|| format!("writing {}", path.display()))?;
    out.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// fBm batches, optional path dumps and the mean/std curves of `v` and `S`.
pub fn run_simulate(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let grid = grid_for(config.maturity, config.steps_per_unit())?;
    let generator = fbm::generator(config.scheme(), &grid, config.model.hurst)?;
    let paths = config.paths();
    let mut written = Vec::new();
    for b in 0..config.batches {
        let seed = SeedSpec::for_batch(config.seed, b as u64, paths);
        let batch = generator.generate(paths, seed)?;
        if config.dump.csv() {
            written.push(write_file(config.out.join(format!("paths_{b}.csv")), |out| {
                Ok(dump::write_csv(&batch, out)?)
            })?);
        }
        if config.dump.binary() {
            written.push(write_file(config.out.join(format!("paths_{b}.bin")), |out| {
                Ok(dump::write_binary(&batch, out)?)
            })?);
        }
        let model = euler_paths(&batch, &config.model)?;
        let curves = model.summary_curves();
        written.push(write_file(config.out.join(format!("curves_{b}.csv")), |out| {
            Ok(write_curves_csv(&curves, out)?)
        })?);
    }
    Ok(written)
}

pub const MOMENT_ORDERS: [u32; 7] = [0, 1, 2, 3, 4, 5, 6];

/// End-value moment errors for every `(H, scheme)` pair.
pub fn run_moments(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let grid = grid_for(config.maturity, config.steps_per_unit())?;
    let mut rows = Vec::new();
    for &h in &config.hursts {
        for &scheme in &config.schemes {
            rows.extend(moment_error_table(
                scheme,
                h,
                &MOMENT_ORDERS,
                config.batches,
                config.paths(),
                &grid,
                config.seed,
            )?);
        }
    }
    Ok(vec![write_file(config.out.join("moments.csv"), |out| {
        Ok(write_moment_table_csv(&rows, out)?)
    })?])
}

/// Standard, turbocharged and safeguarded estimates from one batch.
pub fn price_batch(
    params: &ModelParams,
    scheme: Scheme,
    grid: &GridSpec,
    paths: usize,
    request: &PricingRequest,
    seed: SeedSpec,
) -> Result<[Vec<PriceEstimate>; 3]> {
    let batch = fbm::simulate(scheme, grid, params.hurst, paths, seed)?;
    let model = euler_paths(&batch, params)?;
    let standard = mc_price(&model, request, params.rate)?;
    let turbo = turbo_price(&model, request, params)?;
    let modified = modify(&turbo, &standard, params.spot);
    Ok([standard, turbo, modified])
}

pub fn run_price(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let grid = grid_for(config.maturity, config.steps_per_unit())?;
    let request = PricingRequest::new(config.strikes.clone(), config.maturity)?;
    let mut rows = Vec::new();
    for b in 0..config.batches {
        let seed = SeedSpec::for_batch(config.seed, b as u64, config.paths());
        let estimates = price_batch(&config.model, config.scheme(), &grid, config.paths(), &request, seed)?;
        rows.extend(estimates.into_iter().flatten());
    }
    Ok(vec![write_file(config.out.join("prices.csv"), |out| {
        Ok(write_prices_csv(&rows, out)?)
    })?])
}

/// One parameter combination of the variance-reduction study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Combo {
    pub params: ModelParams,
    pub maturity: f64,
}

/// Per-batch prices (`[batch][strike]`) and their across-batch statistics.
#[derive(Debug, Clone)]
pub struct VarredOutcome {
    pub combo: Combo,
    pub strikes: Vec<f64>,
    pub standard: Vec<Vec<f64>>,
    pub turbo: Vec<Vec<f64>>,
    pub modified: Vec<Vec<f64>>,
    pub replaced: Vec<Vec<bool>>,
    pub turbo_stats: BatchStats,
    pub modified_stats: BatchStats,
}

/// Simulation settings shared by every combination of a study.
#[derive(Debug, Clone, Copy)]
pub struct StudySettings {
    pub scheme: Scheme,
    pub steps_per_unit: usize,
    pub paths: usize,
    pub batches: usize,
    pub seed: u64,
}

/// Runs `settings.batches` independent batches of one combination. Batch
/// `b` of combination `index` uses the streams of batch
/// `index * batches + b` of the master seed.
pub fn varred_combo(combo: &Combo, index: usize, strikes: &[f64], settings: &StudySettings) -> Result<VarredOutcome> {
    let grid = grid_for(combo.maturity, settings.steps_per_unit)?;
    let request = PricingRequest::new(strikes.to_vec(), combo.maturity)?;
    let generator = fbm::generator(settings.scheme, &grid, combo.params.hurst)?;
    let (mut standard, mut turbo, mut modified, mut replaced) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for b in 0..settings.batches {
        let stream = (index * settings.batches + b) as u64;
        let batch = generator.generate(settings.paths, SeedSpec::for_batch(settings.seed, stream, settings.paths))?;
        let model = euler_paths(&batch, &combo.params)?;
        let s = mc_price(&model, &request, combo.params.rate)?;
        let t = turbo_price(&model, &request, &combo.params)?;
        let m = modify(&t, &s, combo.params.spot);
        standard.push(s.iter().map(|e| e.price).collect());
        turbo.push(t.iter().map(|e| e.price).collect());
        replaced.push(m.iter().map(|e| e.safeguard_replaced).collect());
        modified.push(m.iter().map(|e| e.price).collect());
    }
    let turbo_stats = BatchStats::from_batches(strikes, &turbo, &standard)?;
    let modified_stats = BatchStats::from_batches(strikes, &modified, &standard)?;
    Ok(VarredOutcome {
        combo: *combo,
        strikes: strikes.to_vec(),
        standard,
        turbo,
        modified,
        replaced,
        turbo_stats,
        modified_stats,
    })
}

/// Random parameter combinations drawn uniformly from σ₀ ∈ (0, 1],
/// ξ ∈ (0, 3], ρ ∈ [−1, 1], H ∈ (0, 0.5], r ∈ [0, 0.05], T ∈ [0.25, 1.5] and
/// α ∈ {0, 1}. With `stratified`, even draws take ρ ∈ (0, 1], odd draws
/// ρ ∈ [−1, −0.05), and α alternates every two draws.
pub fn sweep_combos(count: usize, spot: f64, seed: u64, stratified: bool) -> Vec<Combo> {
    let mut u = NormalStream::new(SeedSpec::new(seed, u64::MAX));
    (0..count)
        .map(|i| {
            let sigma0 = u.next_uniform();
            let xi = 3.0 * u.next_uniform();
            let draw_rho = u.next_uniform();
            let rho = match (stratified, i % 2) {
                (false, _) => 2.0 * draw_rho - 1.0,
                (true, 0) => draw_rho,
                (true, _) => -1.0 + 0.95 * draw_rho,
            };
            let hurst = 0.5 * u.next_uniform();
            let rate = 0.05 * u.next_uniform();
            let maturity = 0.25 + 1.25 * u.next_uniform();
            let draw_alpha = u.next_uniform();
            let alpha = if stratified {
                ((i / 2) % 2) as f64
            } else if draw_alpha < 0.5 {
                0.0
            } else {
                1.0
            };
            Combo {
                params: ModelParams {
                    sigma0,
                    xi,
                    rho,
                    hurst,
                    alpha,
                    rate,
                    spot,
                },
                maturity,
            }
        })
        .collect()
}

pub const VARRED_HEADER: &str = "combo,sigma0,xi,rho,H,alpha,r,T,S0,strike,std_mean,turbo_mean,modified_mean,\
std_var,turbo_var,modified_var,var_reduction,modified_var_reduction,cov_standard,cov_turbo,cov_modified,\
abs_rel_error,modified_abs_rel_error,negative_turbo_batches,replaced_batches";

pub const VARRED_BATCHES_HEADER: &str = "combo,batch,strike,standard,turbo,modified_turbo,replaced";

pub fn write_varred_csv<W: Write>(outcomes: &[VarredOutcome], mut out: W) -> Result<()> {
    writeln!(out, "{VARRED_HEADER}")?;
    for (c, o) in outcomes.iter().enumerate() {
        let p = &o.combo.params;
        let (t, m) = (&o.turbo_stats, &o.modified_stats);
        for (k, strike) in o.strikes.iter().enumerate() {
            let column = |rows: &[Vec<f64>]| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
            let negative = o.turbo.iter().filter(|r| r[k] < 0.0).count();
            let replaced = o.replaced.iter().filter(|r| r[k]).count();
            writeln!(
                out,
                "{c},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{negative},{replaced}",
                fmt_f64(p.sigma0),
                fmt_f64(p.xi),
                fmt_f64(p.rho),
                fmt_f64(p.hurst),
                fmt_f64(p.alpha),
                fmt_f64(p.rate),
                fmt_f64(o.combo.maturity),
                fmt_f64(p.spot),
                fmt_f64(*strike),
                fmt_f64(t.std_means[k]),
                fmt_f64(t.means[k]),
                fmt_f64(m.means[k]),
                fmt_f64(t.std_variances[k]),
                fmt_f64(t.variances[k]),
                fmt_f64(m.variances[k]),
                fmt_opt(t.var_reduction[k]),
                fmt_opt(m.var_reduction[k]),
                fmt_opt(coefficient_of_variation(&column(&o.standard))),
                fmt_opt(t.coeff_variation[k]),
                fmt_opt(m.coeff_variation[k]),
                fmt_opt(t.abs_rel_error[k]),
                fmt_opt(m.abs_rel_error[k]),
            )?;
        }
    }
    Ok(())
}

pub fn write_varred_batches_csv<W: Write>(outcomes: &[VarredOutcome], mut out: W) -> Result<()> {
    writeln!(out, "{VARRED_BATCHES_HEADER}")?;
    for (c, o) in outcomes.iter().enumerate() {
        for b in 0..o.standard.len() {
            for (k, strike) in o.strikes.iter().enumerate() {
                writeln!(
                    out,
                    "{c},{b},{},{},{},{},{}",
                    fmt_f64(*strike),
                    fmt_f64(o.standard[b][k]),
                    fmt_f64(o.turbo[b][k]),
                    fmt_f64(o.modified[b][k]),
                    o.replaced[b][k]
                )?;
            }
        }
    }
    Ok(())
}

pub fn run_varred(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let combos = if config.sweep > 0 {
        sweep_combos(config.sweep, config.model.spot, config.seed, false)
    } else {
        vec![Combo {
            params: config.model,
            maturity: config.maturity,
        }]
    };
    let settings = StudySettings {
        scheme: config.scheme(),
        steps_per_unit: config.steps_per_unit(),
        paths: config.paths(),
        batches: config.batches,
        seed: config.seed,
    };
    let outcomes = combos
        .iter()
        .enumerate()
        .map(|(i, combo)| varred_combo(combo, i, &config.strikes, &settings).with_context(|| format!("combination {i}: {combo:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        write_file(config.out.join("varred.csv"), |out| write_varred_csv(&outcomes, out))?,
        write_file(config.out.join("varred_batches.csv"), |out| write_varred_batches_csv(&outcomes, out))?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuntimeCell {
    pub scheme: Scheme,
    pub paths: usize,
    pub steps: usize,
    pub hurst: f64,
    /// Median wall time in seconds.
    pub wall_time: f64,
}

/// Median of `reps` timed runs after one discarded warm-up. Each run
/// prepares the scheme and generates one batch on a single thread.
pub fn time_cell(scheme: Scheme, paths: usize, steps: usize, hurst: f64, reps: usize, seed: u64) -> Result<RuntimeCell> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build()?;
    let grid = GridSpec::unit(steps)?;
    let once = || -> Result<f64> {
        let start = Instant::now();
        let batch = fbm::generator(scheme, &grid, hurst)?.generate(paths, SeedSpec::new(seed, 0))?;
        let elapsed = start.elapsed().as_secs_f64();
        std::hint::black_box(batch);
        Ok(elapsed)
    };
    pool.install(|| -> Result<RuntimeCell> {
        once()?;
        let mut times = (0..reps).map(|_| once()).collect::<Result<Vec<_>>>()?;
        times.sort_by(f64::total_cmp);
        Ok(RuntimeCell {
            scheme,
            paths,
            steps,
            hurst,
            wall_time: median(&times),
        })
    })
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[m]
    } else {
        0.5 * (sorted[m - 1] + sorted[m])
    }
}

pub const BENCH_HEADER: &str = "scheme,P,n,H,wall_time";

pub fn write_bench_csv<W: Write>(cells: &[RuntimeCell], mut out: W) -> Result<()> {
    writeln!(out, "{BENCH_HEADER}")?;
    for c in cells {
        writeln!(out, "{},{},{},{},{}", c.scheme, c.paths, c.steps, fmt_f64(c.hurst), fmt_f64(c.wall_time))?;
    }
    Ok(())
}

pub fn run_bench(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let mut cells = Vec::new();
    for &h in &config.hursts {
        for &scheme in &config.schemes {
            for &n in &config.steps_per_unit {
                for &p in &config.paths {
                    cells.push(time_cell(scheme, p, n, h, config.reps, config.seed)?);
                }
            }
        }
    }
    Ok(vec![write_file(config.out.join("bench.csv"), |out| write_bench_csv(&cells, out))?])
}

/// Lines `<check>: ok|warn (...)` comparing scheme costs in a bench run:
/// Cholesky against Hybrid for `P ≥ 2500`, rDonsker against Hybrid everywhere.
pub fn runtime_report(cells: &[RuntimeCell]) -> Vec<(bool, String)> {
    let find = |scheme: Scheme, c: &RuntimeCell| {
        cells
            .iter()
            .find(|d| d.scheme == scheme && d.paths == c.paths && d.steps == c.steps && d.hurst == c.hurst)
            .map(|d| d.wall_time)
    };
    let mut report = Vec::new();
    for c in cells.iter().filter(|c| c.scheme == Scheme::Hybrid) {
        if let Some(cm) = find(Scheme::Cholesky, c).filter(|_| c.paths >= 2500) {
            report.push((
                cm < c.wall_time,
                format!("cholesky vs hybrid P={} n={} H={}: {cm:.4}s vs {:.4}s", c.paths, c.steps, c.hurst, c.wall_time),
            ));
        }
        if let Some(rds) = find(Scheme::RDonsker, c) {
            report.push((
                rds <= c.wall_time,
                format!("rdonsker vs hybrid P={} n={} H={}: {rds:.4}s vs {:.4}s", c.paths, c.steps, c.hurst, c.wall_time),
            ));
        }
    }
    report
}

/// Reads `bench.csv` back into cells.
pub fn read_bench_csv(path: &Path) -> Result<Vec<RuntimeCell>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    anyhow::ensure!(lines.next() == Some(BENCH_HEADER), "{}: unexpected header", path.display());
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            anyhow::ensure!(f.len() == 5, "{}: malformed row `{line}`", path.display());
            Ok(RuntimeCell {
                scheme: f[0].parse()?,
                paths: f[1].parse()?,
                steps: f[2].parse()?,
                hurst: f[3].parse()?,
                wall_time: f[4].parse()?,
            })
        })
        .collect()
}
