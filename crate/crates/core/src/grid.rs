use crate::error::{Error, Result};

/// Equidistant partition `t_i = i * horizon / steps`, `i = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    horizon: f64,
    steps: usize,
    dt: f64,
}

impl GridSpec {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::invalid("horizon", format!("{horizon} must be positive and finite")));
        }
        if steps == 0 {
            return Err(Error::invalid("steps", "at least one step is required"));
        }
        Ok(Self {
            horizon,
            steps,
            dt: horizon / steps as f64,
        })
    }

    /// Grid on `[0, 1]`, where all fBm schemes run before rescaling.
    pub fn unit(steps: usize) -> Result<Self> {
        Self::new(1.0, steps)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time of grid point `i`. The last point is exactly `horizon`.
    pub fn time(&self, i: usize) -> f64 {
        if i == self.steps {
            self.horizon
        } else {
            self.horizon * i as f64 / self.steps as f64
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |i| self.time(i))
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(horizon, self.steps)
    }

    /// Number of steps covering `horizon` at `per_unit` steps per unit time
    /// (at least one).
    pub fn steps_for(horizon: f64, per_unit: usize) -> usize {
        ((horizon * per_unit as f64).round() as usize).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::new(0.0, 10).is_err());
        assert!(GridSpec::new(-1.0, 10).is_err());
        assert!(GridSpec::new(f64::NAN, 10).is_err());
        assert!(GridSpec::new(1.0, 0).is_err());
    }

    #[test]
    fn endpoints_are_exact() {
        let g = GridSpec::new(0.6, 302).unwrap();
        assert_eq!(g.time(0), 0.0);
        assert_eq!(g.time(302), 0.6);
        assert_eq!(g.times().count(), 303);
        assert!((g.dt() * 302.0 - 0.6).abs() < 1e-15);
    }

    #[test]
    fn steps_per_unit_rounding() {
        assert_eq!(GridSpec::steps_for(0.6, 504), 302);
        assert_eq!(GridSpec::steps_for(1.0, 1008), 1008);
        assert_eq!(GridSpec::steps_for(1e-6, 10), 1);
    }
}
