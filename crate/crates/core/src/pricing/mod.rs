//! European call estimators on a simulated [`ModelBatch`].
//!
//! * [`mc_price`]: discounted mean payoff.
//! * [`turbo_price`]: the mixed estimator `mean(X + ω̂Y) − ω̂ E[Y]`, where
//!   `X` is the Black-Scholes price conditional on the fBm's driving noise
//!   and `Y` a timer-style control with known mean.
//! * [`modified_turbo_price`]: turbocharging with suspicious prices replaced
//!   by the standard estimate from the same batch.

mod black_scholes;
mod safeguard;

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::csv::{fmt_f64, fmt_opt, parse_f64, parse_opt};
use crate::error::{Error, Result};
use crate::model::{ModelBatch, ModelParams};

pub use black_scholes::{black_scholes_call, norm_cdf};
pub use safeguard::screen_prices;

use black_scholes::call_unchecked;

#[derive(Debug, Clone, PartialEq)]
pub struct PricingRequest {
    strikes: Vec<f64>,
    maturity: f64,
}

impl PricingRequest {
    /// Strikes must be positive and strictly ascending.
    pub fn new(strikes: Vec<f64>, maturity: f64) -> Result<Self> {
        if !(maturity.is_finite() && maturity > 0.0) {
            return Err(Error::invalid("T", format!("{maturity} must be positive")));
        }
        if strikes.is_empty() {
            return Err(Error::invalid("strikes", "no strikes given"));
        }
        if let Some(k) = strikes.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(Error::invalid("strikes", format!("strike {k} must be positive")));
        }
        if strikes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("strikes", "strikes must be strictly ascending"));
        }
        Ok(Self { strikes, maturity })
    }

    pub fn strikes(&self) -> &[f64] {
        &self.strikes
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    /// Valuation always happens at time 0.
    pub fn valuation_time(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    Standard,
    Turbo,
    ModifiedTurbo,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Standard => "standard",
            Estimator::Turbo => "turbo",
            Estimator::ModifiedTurbo => "modified_turbo",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Estimator::Standard),
            "turbo" => Ok(Estimator::Turbo),
            "modified_turbo" => Ok(Estimator::ModifiedTurbo),
            other => Err(Error::Format(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceEstimate {
    pub strike: f64,
    pub price: f64,
    pub std_error: f64,
    pub estimator: Estimator,
    pub omega_hat: Option<f64>,
    pub q_hat: Option<f64>,
    /// The price was taken from the standard estimator.
    pub safeguard_replaced: bool,
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (count, sum) = values.clone().fold((0usize, 0.0), |(c, s), v| (c + 1, s + v));
    let mean = sum / count as f64;
    if count < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (count - 1) as f64).sqrt() / (count as f64).sqrt())
}

fn check_maturity(model: &ModelBatch, req: &PricingRequest) -> Result<()> {
    if model.num_paths() == 0 {
        return Err(Error::EmptyBatch);
    }
    let (a, b) = (model.maturity(), req.maturity());
    if (a - b).abs() > 1e-12 * a.max(b) {
        return Err(Error::invalid(
            "T",
            format!("request maturity {b} differs from the simulated horizon {a}"),
        ));
    }
    Ok(())
}

/// Standard estimator `e^{−rT} mean((S_T − K)⁺)` with standard error
/// `sd / √P`.
pub fn mc_price(model: &ModelBatch, req: &PricingRequest, rate: f64) -> Result<Vec<PriceEstimate>> {
    check_maturity(model, req)?;
    let terminal = model.terminal_prices();
    let discount = (-rate * req.maturity()).exp();
    Ok(req
        .strikes()
        .iter()
        .map(|&strike| {
            let (price, std_error) =
                mean_and_se(terminal.iter().map(|&s| discount * (s - strike).max(0.0)));
            PriceEstimate {
                strike,
                price,
                std_error,
                estimator: Estimator::Standard,
                omega_hat: None,
                q_hat: None,
                safeguard_replaced: false,
            }
        })
        .collect())
}

/// Per-path terms of the mixed estimator for one strike.
#[derive(Debug, Clone, PartialEq)]
pub struct TurboLegs {
    pub strike: f64,
    /// `X_i = BS(S¹_{T,i} e^{−rT}, K, (1−ρ²) IV_i)`.
    pub x: Vec<f64>,
    /// `Y_i = BS(S¹_{T,i} e^{−rT}, K, ρ² (Q̂ − IV_i))`.
    pub y: Vec<f64>,
    /// `E[Y] = BS(S₀, K, ρ² Q̂)`.
    pub expected_y: f64,
    /// `Q̂ = max_i IV_i`.
    pub q_hat: f64,
}

/// Builds the conditional Black-Scholes terms. `S¹` carries the drift `r`,
/// so it is discounted back over `T` before entering the formula, which
/// discounts the strike at `r` over `T`.
pub fn turbo_components(
    model: &ModelBatch,
    req: &PricingRequest,
    params: &ModelParams,
) -> Result<Vec<TurboLegs>> {
    check_maturity(model, req)?;
    params.validate()?;
    let maturity = req.maturity();
    let rate = params.rate;
    let rho2 = params.rho * params.rho;
    let iv = model.integrated_variance();
    let q_hat = iv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let discount = (-rate * maturity).exp();
    let s1: Vec<f64> = model.terminal_s1().iter().map(|s| s * discount).collect();

    Ok(req
        .strikes()
        .iter()
        .map(|&strike| {
            let x = s1
                .iter()
                .zip(iv)
                .map(|(&s, &v)| call_unchecked(s, strike, (1.0 - rho2) * v, rate, maturity))
                .collect();
            let y = s1
                .iter()
                .zip(iv)
                .map(|(&s, &v)| call_unchecked(s, strike, rho2 * (q_hat - v), rate, maturity))
                .collect();
            let expected_y = call_unchecked(model.spot(), strike, rho2 * q_hat, rate, maturity);
            TurboLegs {
                strike,
                x,
                y,
                expected_y,
                q_hat,
            }
        })
        .collect())
}

/// Choice of the control-variate weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Omega {
    /// `ω̂ = −Σ(X_i − X̄)(Y_i − Ȳ) / Σ(Y_i − Ȳ)²`.
    Regression,
    Fixed(f64),
}

pub fn turbo_price(
    model: &ModelBatch,
    req: &PricingRequest,
    params: &ModelParams,
) -> Result<Vec<PriceEstimate>> {
    turbo_price_with(model, req, params, Omega::Regression)
}

/// Mixed estimator with an explicit weight rule. A control with zero sample
/// variance cannot be regressed on; such strikes fall back to the standard
/// estimate and are flagged as replaced.
pub fn turbo_price_with(
    model: &ModelBatch,
    req: &PricingRequest,
    params: &ModelParams,
    omega: Omega,
) -> Result<Vec<PriceEstimate>> {
    if model.num_paths() < 2 {
        return Err(Error::invalid("P", "turbocharging needs at least two paths"));
    }
    let legs = turbo_components(model, req, params)?;
    let standard = mc_price(model, req, params.rate)?;
    Ok(legs
        .iter()
        .zip(standard)
        .map(|(leg, fallback)| {
            let p = leg.x.len() as f64;
            let x_bar = leg.x.iter().sum::<f64>() / p;
            let y_bar = leg.y.iter().sum::<f64>() / p;
            let syy: f64 = leg.y.iter().map(|y| (y - y_bar).powi(2)).sum();
            let w = match omega {
                Omega::Fixed(w) => Some(w),
                Omega::Regression if syy > 0.0 && syy.is_finite() => {
                    let sxy: f64 = leg
                        .x
                        .iter()
                        .zip(&leg.y)
                        .map(|(x, y)| (x - x_bar) * (y - y_bar))
                        .sum();
                    Some(-sxy / syy)
                }
                Omega::Regression => None,
            };
            match w {
                Some(w) => {
                    let (mean, std_error) =
                        mean_and_se(leg.x.iter().zip(&leg.y).map(|(x, y)| x + w * y));
                    PriceEstimate {
                        strike: leg.strike,
                        price: mean - w * leg.expected_y,
                        std_error,
                        estimator: Estimator::Turbo,
                        omega_hat: Some(w),
                        q_hat: Some(leg.q_hat),
                        safeguard_replaced: false,
                    }
                }
                None => PriceEstimate {
                    estimator: Estimator::Turbo,
                    q_hat: Some(leg.q_hat),
                    safeguard_replaced: true,
                    ..fallback
                },
            }
        })
        .collect())
}

/// Turbocharged prices screened by [`screen_prices`] against the standard
/// estimates of the same batch.
pub fn modified_turbo_price(
    model: &ModelBatch,
    req: &PricingRequest,
    params: &ModelParams,
) -> Result<Vec<PriceEstimate>> {
    let turbo = turbo_price(model, req, params)?;
    let standard = mc_price(model, req, params.rate)?;
    Ok(modify(&turbo, &standard, params.spot))
}

/// Applies the safeguard to already computed turbo and standard estimates.
pub fn modify(turbo: &[PriceEstimate], standard: &[PriceEstimate], spot: f64) -> Vec<PriceEstimate> {
    let t: Vec<f64> = turbo.iter().map(|e| e.price).collect();
    let s: Vec<f64> = standard.iter().map(|e| e.price).collect();
    let (prices, flags) = screen_prices(&t, &s, spot);
    turbo
        .iter()
        .zip(standard)
        .zip(prices.into_iter().zip(flags))
        .map(|((te, se), (price, replaced))| PriceEstimate {
            price,
            std_error: if replaced { se.std_error } else { te.std_error },
            estimator: Estimator::ModifiedTurbo,
            safeguard_replaced: replaced || te.safeguard_replaced,
            ..*te
        })
        .collect()
}

pub const PRICES_HEADER: &str = "strike,estimator,price,std_error,omega_hat,q_hat,replaced";

pub fn write_prices_csv<W: Write>(estimates: &[PriceEstimate], mut out: W) -> Result<()> {
    writeln!(out, "{PRICES_HEADER}")?;
    for e in estimates {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(e.strike),
            e.estimator,
            fmt_f64(e.price),
            fmt_f64(e.std_error),
            fmt_opt(e.omega_hat),
            fmt_opt(e.q_hat),
            e.safeguard_replaced
        )?;
    }
    Ok(())
}

pub fn read_prices_csv<R: BufRead>(input: R) -> Result<Vec<PriceEstimate>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != PRICES_HEADER {
        return Err(Error::Format(format!("expected header `{PRICES_HEADER}`")));
    }
    let mut out = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::Format(format!("expected 7 fields in `{line}`")));
        }
        out.push(PriceEstimate {
            strike: parse_f64(f[0])?,
            estimator: f[1].parse()?,
            price: parse_f64(f[2])?,
            std_error: parse_f64(f[3])?,
            omega_hat: parse_opt(f[4])?,
            q_hat: parse_opt(f[5])?,
            safeguard_replaced: f[6]
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("`{}` is not a boolean", f[6])))?,
        });
    }
    Ok(out)
}
