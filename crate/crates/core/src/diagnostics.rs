//! Moment-quality and variance-reduction statistics.

use std::io::Write;

use statrs::function::gamma::gamma;

use crate::csv::{fmt_f64, fmt_opt};
use crate::error::{check_hurst, Error, Result};
use crate::fbm::{self, PathBatch, Scheme};
use crate::grid::GridSpec;
use crate::rng::SeedSpec;

/// `E|B^H_t|^q = 2^{q/2} Γ((q+1)/2) / √π · t^{qH}`.
pub fn theoretical_abs_moment(q: u32, t: f64, hurst: f64) -> f64 {
    if q == 0 {
        return 1.0;
    }
    let q = q as f64;
    let constant = 2f64.powf(0.5 * q) * gamma(0.5 * (q + 1.0)) / std::f64::consts::PI.sqrt();
    constant * t.abs().powf(q * hurst)
}

/// `(1/P) Σ_j |Y^j_i|^q` at grid index `at_index`.
pub fn sample_abs_moment(batch: &PathBatch, q: u32, at_index: usize) -> Result<f64> {
    if at_index > batch.grid().steps() {
        return Err(Error::invalid(
            "at_index",
            format!("{at_index} exceeds the {} steps of the grid", batch.grid().steps()),
        ));
    }
    if q == 0 {
        return Ok(1.0);
    }
    let values = batch.values_at(at_index);
    Ok(values.iter().map(|y| y.abs().powi(q as i32)).sum::<f64>() / values.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub q: u32,
    pub t: f64,
    pub sample_value: f64,
    pub theoretical_value: f64,
    pub abs_error: f64,
}

impl MomentReport {
    pub fn measure(batch: &PathBatch, q: u32, at_index: usize) -> Result<Self> {
        let t = batch.grid().time(at_index);
        let sample_value = sample_abs_moment(batch, q, at_index)?;
        let theoretical_value = theoretical_abs_moment(q, t, batch.hurst());
        Ok(Self {
            q,
            t,
            sample_value,
            theoretical_value,
            abs_error: (sample_value - theoretical_value).abs(),
        })
    }

    /// Reports for every `q` at the end of the grid.
    pub fn end_values(batch: &PathBatch, qs: &[u32]) -> Result<Vec<Self>> {
        let n = batch.grid().steps();
        qs.iter().map(|&q| Self::measure(batch, q, n)).collect()
    }
}

/// One row of the across-batch summary of end-value moment errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentErrorRow {
    pub hurst: f64,
    pub scheme: Scheme,
    pub q: u32,
    pub mean_abs_err: f64,
    pub var_abs_err: f64,
}

/// Mean and sample variance (over `n_batches`) of the end-value absolute
/// moment errors. Batch `b` uses the streams of
/// [`SeedSpec::for_batch`]`(master_seed, b, paths)`.
pub fn moment_error_table(
    scheme: Scheme,
    hurst: f64,
    qs: &[u32],
    n_batches: usize,
    paths: usize,
    grid: &GridSpec,
    master_seed: u64,
) -> Result<Vec<MomentErrorRow>> {
    check_hurst(hurst)?;
    if n_batches < 2 {
        return Err(Error::invalid("batches", "at least two batches are required"));
    }
    let generator = fbm::generator(scheme, grid, hurst)?;
    let mut errors = vec![Vec::with_capacity(n_batches); qs.len()];
    for b in 0..n_batches {
        let batch = generator.generate(paths, SeedSpec::for_batch(master_seed, b as u64, paths))?;
        for (report, errs) in MomentReport::end_values(&batch, qs)?.iter().zip(&mut errors) {
            errs.push(report.abs_error);
        }
    }
    Ok(qs
        .iter()
        .zip(&errors)
        .map(|(&q, errs)| {
            let (mean_abs_err, var_abs_err) = mean_var(errs);
            MomentErrorRow {
                hurst,
                scheme,
                q,
                mean_abs_err,
                var_abs_err,
            }
        })
        .collect())
}

pub const MOMENT_TABLE_HEADER: &str = "H,scheme,q,mean_abs_err,var_abs_err";

pub fn write_moment_table_csv<W: Write>(rows: &[MomentErrorRow], mut out: W) -> Result<()> {
    writeln!(out, "{MOMENT_TABLE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.hurst),
            r.scheme,
            r.q,
            fmt_f64(r.mean_abs_err),
            fmt_f64(r.var_abs_err)
        )?;
    }
    Ok(())
}

/// Mean and unbiased sample variance; the variance is 0 for fewer than two
/// values.
pub fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// `Var(turbo) / Var(standard)` across batches; `None` when the standard
/// prices do not vary or fewer than two batches are given.
pub fn variance_reduction_factor(turbo_prices: &[f64], std_prices: &[f64]) -> Option<f64> {
    if turbo_prices.len() < 2 || std_prices.len() < 2 {
        return None;
    }
    let (_, vt) = mean_var(turbo_prices);
    let (_, vs) = mean_var(std_prices);
    (vs > 0.0).then(|| vt / vs)
}

/// Across-batch standard deviation over the across-batch mean. Negative
/// means give negative values.
pub fn coefficient_of_variation(prices: &[f64]) -> Option<f64> {
    if prices.len() < 2 {
        return None;
    }
    let (mean, var) = mean_var(prices);
    (mean != 0.0).then(|| var.sqrt() / mean)
}

/// `|turbo − standard| / standard`.
pub fn abs_relative_error(turbo_mean: f64, std_mean: f64) -> Option<f64> {
    (std_mean != 0.0).then(|| ((turbo_mean - std_mean) / std_mean).abs())
}

/// Per-strike statistics of an estimator against the standard one over a
/// sequence of independent batches.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchStats {
    pub n_batches: usize,
    pub strikes: Vec<f64>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub std_means: Vec<f64>,
    pub std_variances: Vec<f64>,
    pub var_reduction: Vec<Option<f64>>,
    pub coeff_variation: Vec<Option<f64>>,
    pub abs_rel_error: Vec<Option<f64>>,
}

impl BatchStats {
    /// `prices[b][k]` and `std_prices[b][k]` are the prices of batch `b` at
    /// strike `k`.
    pub fn from_batches(strikes: &[f64], prices: &[Vec<f64>], std_prices: &[Vec<f64>]) -> Result<Self> {
        let n_batches = prices.len();
        if n_batches < 2 || std_prices.len() != n_batches {
            return Err(Error::invalid(
                "batches",
                "need at least two batches of both estimators",
            ));
        }
        if prices.iter().chain(std_prices).any(|row| row.len() != strikes.len()) {
            return Err(Error::Shape("batch rows must have one price per strike".into()));
        }
        let column = |rows: &[Vec<f64>], k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
        let mut stats = Self {
            n_batches,
            strikes: strikes.to_vec(),
            means: Vec::new(),
            variances: Vec::new(),
            std_means: Vec::new(),
            std_variances: Vec::new(),
            var_reduction: Vec::new(),
            coeff_variation: Vec::new(),
            abs_rel_error: Vec::new(),
        };
        for k in 0..strikes.len() {
            let t = column(prices, k);
            let s = column(std_prices, k);
            let (mt, vt) = mean_var(&t);
            let (ms, vs) = mean_var(&s);
            stats.means.push(mt);
            stats.variances.push(vt);
            stats.std_means.push(ms);
            stats.std_variances.push(vs);
            stats.var_reduction.push(variance_reduction_factor(&t, &s));
            stats.coeff_variation.push(coefficient_of_variation(&t));
            stats.abs_rel_error.push(abs_relative_error(mt, ms));
        }
        Ok(stats)
    }
}

pub const BATCH_STATS_HEADER: &str =
    "strike,mean,variance,std_mean,std_variance,var_reduction,coeff_variation,abs_rel_error";

pub fn write_batch_stats_csv<W: Write>(stats: &BatchStats, mut out: W) -> Result<()> {
    writeln!(out, "{BATCH_STATS_HEADER}")?;
    for k in 0..stats.strikes.len() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(stats.strikes[k]),
            fmt_f64(stats.means[k]),
            fmt_f64(stats.variances[k]),
            fmt_f64(stats.std_means[k]),
            fmt_f64(stats.std_variances[k]),
            fmt_opt(stats.var_reduction[k]),
            fmt_opt(stats.coeff_variation[k]),
            fmt_opt(stats.abs_rel_error[k])
        )?;
    }
    Ok(())
}
