//! Fractional Brownian motion on an equidistant grid, together with the
//! increments of the Wiener process that drives it.
//!
//! Three schemes are provided. [`CholeskyGenerator`] is exact in law;
//! [`HybridGenerator`] and [`RDonskerGenerator`] discretize the
//! Riemann-Liouville representation `Y_t = ∫ g(t - s) dW_s`,
//! `g(x) = √(2H) x^{H - 1/2}`, and evaluate the resulting discrete
//! convolution with an FFT. Every scheme runs on `[0, 1]` and the batch is
//! mapped to the requested horizon by self-similarity.

mod cholesky;
mod convolution;
pub mod dump;
mod hybrid;
mod rdonsker;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{check_hurst, Error, Result};
use crate::grid::GridSpec;
use crate::rng::SeedSpec;

pub use cholesky::{cholesky_simulate, CholeskyFactor, CholeskyGenerator, CovarianceMatrix};
pub use convolution::{CausalConvolver, ConvolutionBuffers};
pub use hybrid::{hybrid_kernel, hybrid_simulate, optimal_bk, HybridGenerator};
pub use rdonsker::{rdonsker_kernel, rdonsker_simulate, KernelWeights, RDonskerGenerator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Cholesky,
    Hybrid,
    RDonsker,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Cholesky, Scheme::Hybrid, Scheme::RDonsker];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Cholesky => "cholesky",
            Scheme::Hybrid => "hybrid",
            Scheme::RDonsker => "rdonsker",
        }
    }

    /// Identifier stored in binary path dumps.
    pub fn id(self) -> u64 {
        match self {
            Scheme::Cholesky => 0,
            Scheme::Hybrid => 1,
            Scheme::RDonsker => 2,
        }
    }

    pub fn from_id(id: u64) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.id() == id)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cholesky" | "cm" => Ok(Scheme::Cholesky),
            "hybrid" | "hs" => Ok(Scheme::Hybrid),
            "rdonsker" | "rds" => Ok(Scheme::RDonsker),
            other => Err(Error::invalid(
                "scheme",
                format!("unknown scheme `{other}` (expected cholesky, hybrid or rdonsker)"),
            )),
        }
    }
}

/// Riemann-Liouville kernel `g(x) = √(2H) x^{H - 1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbmKernel {
    hurst: f64,
}

impl FbmKernel {
    pub fn new(hurst: f64) -> Result<Self> {
        check_hurst(hurst)?;
        Ok(Self { hurst })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn eval(&self, x: f64) -> f64 {
        (2.0 * self.hurst).sqrt() * x.powf(self.hurst - 0.5)
    }

    /// `∫_a^b g(x)^2 dx = b^{2H} - a^{2H}`.
    pub fn squared_integral(&self, a: f64, b: f64) -> f64 {
        b.powf(2.0 * self.hurst) - a.powf(2.0 * self.hurst)
    }
}

/// Autocovariance of unit-step fractional Gaussian noise,
/// `γ(k) = ½(|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H})`.
pub fn fgn_autocovariance(k: usize, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) + (k - 1.0).abs().powf(h2) - 2.0 * k.powf(h2))
}

/// `r(t, s) = ½(t^{2H} + s^{2H} - |t - s|^{2H})`.
pub fn fbm_covariance(t: f64, s: f64, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (t.powf(h2) + s.powf(h2) - (t - s).abs().powf(h2))
}

/// `P` simulated paths on a grid: `paths` is `P × (n+1)` with a zero first
/// column, `wiener_increments` is `P × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    grid: GridSpec,
    hurst: f64,
    scheme: Scheme,
    seed: SeedSpec,
    paths: Array2<f64>,
    wiener_increments: Array2<f64>,
}

impl PathBatch {
    pub fn from_parts(
        grid: GridSpec,
        hurst: f64,
        scheme: Scheme,
        seed: SeedSpec,
        paths: Array2<f64>,
        wiener_increments: Array2<f64>,
    ) -> Result<Self> {
        check_hurst(hurst)?;
        let n = grid.steps();
        let p = paths.nrows();
        if p == 0 {
            return Err(Error::EmptyBatch);
        }
        if paths.ncols() != n + 1 || wiener_increments.dim() != (p, n) {
            return Err(Error::Shape(format!(
                "paths {:?} and increments {:?} do not fit {} paths on {} steps",
                paths.dim(),
                wiener_increments.dim(),
                p,
                n
            )));
        }
        if paths.column(0).iter().any(|&y| y != 0.0) {
            return Err(Error::Shape("paths must start at 0".into()));
        }
        Ok(Self {
            grid,
            hurst,
            scheme,
            seed,
            paths,
            wiener_increments,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Key of the first path's stream; path `j` uses `seed.offset(j)`.
    pub fn seed(&self) -> SeedSpec {
        self.seed
    }

    pub fn num_paths(&self) -> usize {
        self.paths.nrows()
    }

    pub fn paths(&self) -> ArrayView2<'_, f64> {
        self.paths.view()
    }

    pub fn wiener_increments(&self) -> ArrayView2<'_, f64> {
        self.wiener_increments.view()
    }

    pub fn path(&self, j: usize) -> ArrayView1<'_, f64> {
        self.paths.row(j)
    }

    /// Values of all paths at grid point `i`.
    pub fn values_at(&self, i: usize) -> ArrayView1<'_, f64> {
        self.paths.column(i)
    }

    pub fn end_values(&self) -> ArrayView1<'_, f64> {
        self.paths.column(self.grid.steps())
    }

    /// Terminal value of the driving Wiener process on every path.
    pub fn wiener_terminal(&self) -> Vec<f64> {
        self.wiener_increments.sum_axis(Axis(1)).to_vec()
    }
}

/// Map a batch simulated on `[0, 1]` to `[0, new_horizon]`: paths scale by
/// `new_horizon^H`, Wiener increments by `new_horizon^{1/2}`.
pub fn rescale_by_self_similarity(batch: PathBatch, new_horizon: f64) -> Result<PathBatch> {
    if !(new_horizon.is_finite() && new_horizon > 0.0) {
        return Err(Error::invalid(
            "horizon",
            format!("{new_horizon} must be positive and finite"),
        ));
    }
    if batch.grid.horizon() != 1.0 {
        return Err(Error::invalid(
            "horizon",
            format!("batch lives on [0, {}], expected the unit interval", batch.grid.horizon()),
        ));
    }
    if new_horizon == 1.0 {
        return Ok(batch);
    }
    let grid = batch.grid.with_horizon(new_horizon)?;
    let path_scale = new_horizon.powf(batch.hurst);
    let noise_scale = new_horizon.sqrt();
    let PathBatch {
        hurst,
        scheme,
        seed,
        mut paths,
        mut wiener_increments,
        ..
    } = batch;
    paths.mapv_inplace(|y| y * path_scale);
    wiener_increments.mapv_inplace(|w| w * noise_scale);
    Ok(PathBatch {
        grid,
        hurst,
        scheme,
        seed,
        paths,
        wiener_increments,
    })
}

/// A prepared scheme: kernels and factorizations are built once and shared
/// read-only across batches and threads.
pub trait PathGenerator: Send + Sync {
    fn scheme(&self) -> Scheme;

    fn hurst(&self) -> f64;

    /// Target grid of the generated batches.
    fn grid(&self) -> &GridSpec;

    /// `paths` paths on the unit interval with the target number of steps.
    fn generate_unit(&self, paths: usize, seed: SeedSpec) -> Result<PathBatch>;

    fn generate(&self, paths: usize, seed: SeedSpec) -> Result<PathBatch> {
        let batch = self.generate_unit(paths, seed)?;
        rescale_by_self_similarity(batch, self.grid().horizon())
    }
}

pub fn generator(scheme: Scheme, grid: &GridSpec, hurst: f64) -> Result<Box<dyn PathGenerator>> {
    Ok(match scheme {
        Scheme::Cholesky => Box::new(CholeskyGenerator::new(grid, hurst)?),
        Scheme::Hybrid => Box::new(HybridGenerator::new(grid, hurst)?),
        Scheme::RDonsker => Box::new(RDonskerGenerator::new(grid, hurst)?),
    })
}

pub fn simulate(
    scheme: Scheme,
    grid: &GridSpec,
    hurst: f64,
    paths: usize,
    seed: SeedSpec,
) -> Result<PathBatch> {
    generator(scheme, grid, hurst)?.generate(paths, seed)
}

pub(crate) fn check_paths(paths: usize) -> Result<()> {
    if paths == 0 {
        Err(Error::invalid("P", "at least one path is required"))
    } else {
        Ok(())
    }
}

pub(crate) const HALF_TOLERANCE: f64 = 1e-12;

/// Whether `H` is close enough to 1/2 for the Brownian short-circuit.
pub(crate) fn is_brownian(hurst: f64) -> bool {
    (hurst - 0.5).abs() < HALF_TOLERANCE
}
