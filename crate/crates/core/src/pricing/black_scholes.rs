use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Black-Scholes call value parameterised by the total variance `w = σ²τ`
/// of the log-price over the remaining life `τ`; `rate` discounts the strike
/// over `τ`.
pub fn black_scholes_call(
    spot: f64,
    strike: f64,
    total_variance: f64,
    rate: f64,
    time_to_maturity: f64,
) -> Result<f64> {
    if !(spot > 0.0 && spot.is_finite()) {
        return Err(Error::invalid("spot", format!("{spot} must be positive")));
    }
    if !(strike >= 0.0 && strike.is_finite()) {
        return Err(Error::invalid("strike", format!("{strike} must be non-negative")));
    }
    if total_variance.is_nan() || total_variance < 0.0 {
        return Err(Error::invalid(
            "total_variance",
            format!("{total_variance} is negative"),
        ));
    }
    Ok(call_unchecked(spot, strike, total_variance, rate, time_to_maturity))
}

#[inline]
pub(crate) fn call_unchecked(spot: f64, strike: f64, w: f64, rate: f64, tau: f64) -> f64 {
    let discounted_strike = strike * (-rate * tau).exp();
    if discounted_strike == 0.0 {
        return spot;
    }
    if w == 0.0 {
        return (spot - discounted_strike).max(0.0);
    }
    let sd = w.sqrt();
    let d1 = ((spot / discounted_strike).ln() + 0.5 * w) / sd;
    let d2 = d1 - sd;
    spot * norm_cdf(d1) - discounted_strike * norm_cdf(d2)
}
