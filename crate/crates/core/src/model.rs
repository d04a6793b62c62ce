//! αRFSV model paths.
//!
//! The exponential Volterra process `v_t = σ₀ exp(ξ Y_t − ½ α ξ² t^{2H})` is
//! the instantaneous variance of the log-price, which follows the log-Euler
//! recursion
//!
//! ```text
//! X_i = X_{i-1} + (r − ½ v_{i-1}) Δt + √v_{i-1} (ρ ΔW_i + √(1−ρ²) ΔW̃_i)
//! ```
//!
//! `α = 0` is the RFSV model, `α = 1` rough Bergomi.

use std::io::Write;

use ndarray::{Array2, ArrayView2, Axis};
use rayon::prelude::*;

use crate::csv::fmt_f64;
use crate::error::{check_hurst, Error, Result};
use crate::fbm::PathBatch;
use crate::grid::GridSpec;
use crate::rng::NormalStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Initial instantaneous variance `σ₀`.
    pub sigma0: f64,
    /// Vol-of-vol `ξ`.
    pub xi: f64,
    /// Leverage `ρ`.
    pub rho: f64,
    pub hurst: f64,
    pub alpha: f64,
    pub rate: f64,
    pub spot: f64,
}

impl ModelParams {
    /// Rough Bergomi parameters fitted to SPX options:
    /// `σ₀ = 0.235², ξ = 1.9, ρ = −0.9, H = 0.07`, spot 100, zero rate.
    pub fn spx() -> Self {
        Self {
            sigma0: 0.235 * 0.235,
            xi: 1.9,
            rho: -0.9,
            hurst: 0.07,
            alpha: 1.0,
            rate: 0.0,
            spot: 100.0,
        }
    }

    /// A parameter set for which plain turbocharging misprices deep
    /// out-of-the-money calls.
    pub fn malfunction() -> Self {
        Self {
            sigma0: 0.62,
            xi: 0.18,
            rho: -0.05,
            hurst: 0.22,
            alpha: 1.0,
            rate: 0.0,
            spot: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{x} must be positive")))
            }
        };
        positive("sigma0", self.sigma0)?;
        positive("xi", self.xi)?;
        positive("S0", self.spot)?;
        check_hurst(self.hurst)?;
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::invalid("rho", format!("{} is outside [-1, 1]", self.rho)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid("alpha", format!("{} is outside [0, 1]", self.alpha)));
        }
        if !(self.rate.is_finite() && self.rate >= 0.0) {
            return Err(Error::invalid("r", format!("{} must be non-negative", self.rate)));
        }
        Ok(())
    }
}

/// `E[v_t^q] = σ₀^q exp(½ ξ² q (q − α) t^{2H})`.
pub fn theoretical_vol_moment(q: u32, t: f64, params: &ModelParams) -> f64 {
    let q = q as f64;
    params.sigma0.powf(q)
        * (0.5 * params.xi * params.xi * q * (q - params.alpha) * t.powf(2.0 * params.hurst)).exp()
}

fn check_same_hurst(batch: &PathBatch, params: &ModelParams) -> Result<()> {
    params.validate()?;
    if (batch.hurst() - params.hurst).abs() > 1e-12 {
        return Err(Error::invalid(
            "H",
            format!("batch was simulated with H = {} but the model has H = {}", batch.hurst(), params.hurst),
        ));
    }
    Ok(())
}

/// Variance paths `v_i = σ₀ exp(ξ Y_i − ½ α ξ² t_i^{2H})`, shape `P × (n+1)`.
pub fn variance_paths(batch: &PathBatch, params: &ModelParams) -> Result<Array2<f64>> {
    check_same_hurst(batch, params)?;
    let grid = batch.grid();
    let compensator: Vec<f64> = grid
        .times()
        .map(|t| 0.5 * params.alpha * params.xi * params.xi * t.powf(2.0 * params.hurst))
        .collect();
    let mut v = batch.paths().to_owned();
    for mut row in v.axis_iter_mut(Axis(0)) {
        for (x, c) in row.iter_mut().zip(&compensator) {
            *x = params.sigma0 * (params.xi * *x - c).exp();
        }
    }
    Ok(v)
}

/// Variance, log-price and price paths of one batch, with the per-path
/// quantities needed by the conditional estimators.
#[derive(Debug, Clone)]
pub struct ModelBatch {
    grid: GridSpec,
    spot: f64,
    variance_paths: Array2<f64>,
    log_price_paths: Array2<f64>,
    price_paths: Array2<f64>,
    integrated_variance: Vec<f64>,
    terminal_s1: Vec<f64>,
}

impl ModelBatch {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn maturity(&self) -> f64 {
        self.grid.horizon()
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn num_paths(&self) -> usize {
        self.price_paths.nrows()
    }

    pub fn variance_paths(&self) -> ArrayView2<'_, f64> {
        self.variance_paths.view()
    }

    pub fn log_price_paths(&self) -> ArrayView2<'_, f64> {
        self.log_price_paths.view()
    }

    pub fn price_paths(&self) -> ArrayView2<'_, f64> {
        self.price_paths.view()
    }

    pub fn terminal_prices(&self) -> Vec<f64> {
        self.price_paths.column(self.grid.steps()).to_vec()
    }

    /// Left-point sum `Σ v_{i-1} Δt` over `[0, T]`, one entry per path.
    pub fn integrated_variance(&self) -> &[f64] {
        &self.integrated_variance
    }

    /// Terminal value of the leg `S¹` driven by the fBm's own Brownian motion.
    pub fn terminal_s1(&self) -> &[f64] {
        &self.terminal_s1
    }

    /// Build a batch from terminal data only (no intermediate path values);
    /// the estimators read nothing else.
    pub fn from_terminal(
        maturity: f64,
        spot: f64,
        terminal_prices: Vec<f64>,
        integrated_variance: Vec<f64>,
        terminal_s1: Vec<f64>,
    ) -> Result<Self> {
        let p = terminal_prices.len();
        if p == 0 {
            return Err(Error::EmptyBatch);
        }
        if integrated_variance.len() != p || terminal_s1.len() != p {
            return Err(Error::Shape("terminal vectors differ in length".into()));
        }
        let grid = GridSpec::new(maturity, 1)?;
        let mut price_paths = Array2::from_elem((p, 2), spot);
        price_paths.column_mut(1).assign(&ndarray::Array1::from(terminal_prices));
        let log_price_paths = price_paths.mapv(f64::ln);
        let variance_paths = Array2::from_shape_fn((p, 2), |(j, _)| integrated_variance[j] / maturity);
        Ok(Self {
            grid,
            spot,
            variance_paths,
            log_price_paths,
            price_paths,
            integrated_variance,
            terminal_s1,
        })
    }

    /// Cross-sectional mean and standard deviation of `v` and `S` at every
    /// grid point.
    pub fn summary_curves(&self) -> Vec<CurvePoint> {
        let p = self.num_paths() as f64;
        let moments = |column: ndarray::ArrayView1<'_, f64>| {
            let mean = column.sum() / p;
            let var = if p > 1.0 {
                column.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (p - 1.0)
            } else {
                0.0
            };
            (mean, var.sqrt())
        };
        self.grid
            .times()
            .enumerate()
            .map(|(i, t)| {
                let (mean_v, std_v) = moments(self.variance_paths.column(i));
                let (mean_s, std_s) = moments(self.price_paths.column(i));
                CurvePoint {
                    t,
                    mean_v,
                    std_v,
                    mean_s,
                    std_s,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub mean_v: f64,
    pub std_v: f64,
    pub mean_s: f64,
    pub std_s: f64,
}

pub const CURVES_HEADER: &str = "t,mean_v,std_v,mean_S,std_S";

pub fn write_curves_csv<W: Write>(curves: &[CurvePoint], mut out: W) -> Result<()> {
    writeln!(out, "{CURVES_HEADER}")?;
    for c in curves {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(c.t),
            fmt_f64(c.mean_v),
            fmt_f64(c.std_v),
            fmt_f64(c.mean_s),
            fmt_f64(c.std_s)
        )?;
    }
    Ok(())
}

/// Log-Euler simulation of the price on the batch's grid.
///
/// The independent noise `W̃` of path `j` comes from stream
/// `batch.seed().offset(P + j)`, disjoint from the fBm streams. The leg `S¹`
/// follows `Δ ln S¹_i = (r − ½ρ² v_{i-1}) Δt + ρ √v_{i-1} ΔW_i`, `S¹_0 = S₀`.
pub fn euler_paths(batch: &PathBatch, params: &ModelParams) -> Result<ModelBatch> {
    let variance = variance_paths(batch, params)?;
    let grid = *batch.grid();
    let n = grid.steps();
    let p = batch.num_paths();
    let dt = grid.dt();
    let sqrt_dt = dt.sqrt();
    let rho = params.rho;
    let rho_bar = (1.0 - rho * rho).max(0.0).sqrt();
    let x0 = params.spot.ln();
    let increments = batch.wiener_increments();
    let noise_seed = batch.seed().offset(p as u64);

    let mut log_price = Array2::<f64>::zeros((p, n + 1));
    let mut integrated_variance = vec![0.0; p];
    let mut terminal_s1 = vec![0.0; p];

    log_price
        .as_slice_mut()
        .expect("standard layout")
        .par_chunks_mut(n + 1)
        .zip(integrated_variance.par_iter_mut())
        .zip(terminal_s1.par_iter_mut())
        .enumerate()
        .try_for_each(|(j, ((x, iv), s1))| {
            let v = variance.row(j);
            let dw = increments.row(j);
            let mut noise = NormalStream::new(noise_seed.offset(j as u64));
            let mut log_s1 = x0;
            let mut acc = 0.0;
            x[0] = x0;
            for i in 1..=n {
                let v_prev = v[i - 1];
                if !(v_prev.is_finite()) {
                    return Err(Error::NonFinite {
                        what: "variance",
                        path: j,
                        step: i - 1,
                    });
                }
                let vol = v_prev.sqrt();
                let dw_tilde = sqrt_dt * noise.next_normal();
                let dz = rho * dw[i - 1] + rho_bar * dw_tilde;
                x[i] = x[i - 1] + (params.rate - 0.5 * v_prev) * dt + vol * dz;
                log_s1 += (params.rate - 0.5 * rho * rho * v_prev) * dt + rho * vol * dw[i - 1];
                acc += v_prev * dt;
                if !x[i].is_finite() {
                    return Err(Error::NonFinite {
                        what: "log-price",
                        path: j,
                        step: i,
                    });
                }
            }
            *iv = acc;
            *s1 = log_s1.exp();
            Ok(())
        })?;

    let price = log_price.mapv(f64::exp);
    if let Some((idx, _)) = price.indexed_iter().find(|(_, s)| !s.is_finite()) {
        return Err(Error::NonFinite {
            what: "price",
            path: idx.0,
            step: idx.1,
        });
    }
    Ok(ModelBatch {
        grid,
        spot: params.spot,
        variance_paths: variance,
        log_price_paths: log_price,
        price_paths: price,
        integrated_variance,
        terminal_s1,
    })
}
