use nalgebra::DMatrix;
use ndarray::Array2;
use rayon::prelude::*;

use super::{check_paths, fgn_autocovariance, PathBatch, PathGenerator, Scheme};
use crate::error::{check_hurst, Error, Result};
use crate::grid::GridSpec;
use crate::rng::{NormalStream, SeedSpec};

/// Paths generated per dense block; bounds the working set of one product.
const BLOCK_PATHS: usize = 512;
/// Row bands of the triangular product; band `b` only touches the first
/// `(b + 1) / BANDS` of the columns of the factor.
const BANDS: usize = 8;

/// Symmetric positive definite covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Toeplitz matrix `Γ_{ij} = γ(|i - j|)` of `order` consecutive
    /// unit-step fractional Gaussian noise values.
    pub fn fgn_toeplitz(order: usize, hurst: f64) -> Result<Self> {
        check_hurst(hurst)?;
        if order == 0 {
            return Err(Error::invalid("order", "covariance matrix must be non-empty"));
        }
        let gamma: Vec<f64> = (0..order).map(|k| fgn_autocovariance(k, hurst)).collect();
        Ok(Self {
            entries: DMatrix::from_fn(order, order, |i, j| gamma[i.abs_diff(j)]),
        })
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Lower Cholesky factor. On failure the diagonal is loaded with
    /// `1e-12 · trace / order` and the factorization retried once.
    pub fn cholesky(&self) -> Result<CholeskyFactor> {
        if let Some(c) = self.entries.clone().cholesky() {
            return Ok(CholeskyFactor {
                lower: c.unpack(),
                jitter: 0.0,
            });
        }
        let order = self.order();
        let jitter = 1e-12 * self.entries.trace() / order as f64;
        let mut loaded = self.entries.clone();
        for i in 0..order {
            loaded[(i, i)] += jitter;
        }
        loaded
            .cholesky()
            .map(|c| CholeskyFactor {
                lower: c.unpack(),
                jitter,
            })
            .ok_or(Error::NotPositiveDefinite { order })
    }
}

#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    lower: DMatrix<f64>,
    jitter: f64,
}

impl CholeskyFactor {
    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    /// Diagonal load that was needed for the factorization (0 if none).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Largest absolute entry of `L Lᵀ - Γ`.
    pub fn reconstruction_error(&self, target: &CovarianceMatrix) -> f64 {
        let product = &self.lower * self.lower.transpose();
        (product - target.entries())
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Exact simulation: the Toeplitz covariance of the `n` fractional Gaussian
/// noise increments is factored once, each path's `n` standard normals `V`
/// are mapped to increments `L V`, and the path is their cumulative sum.
/// The Brownian increments driving the path are `ΔW = V / √n`.
pub struct CholeskyGenerator {
    grid: GridSpec,
    hurst: f64,
    factor: CholeskyFactor,
}

impl CholeskyGenerator {
    pub fn new(grid: &GridSpec, hurst: f64) -> Result<Self> {
        let cov = CovarianceMatrix::fgn_toeplitz(grid.steps(), hurst)?;
        let factor = cov.cholesky()?;
        Ok(Self {
            grid: *grid,
            hurst,
            factor,
        })
    }

    pub fn factor(&self) -> &CholeskyFactor {
        &self.factor
    }

    fn fill_block(&self, first_path: usize, seed: SeedSpec, ys: &mut [f64], ws: &mut [f64]) {
        let n = self.grid.steps();
        let count = ws.len() / n;
        let mut normals = DMatrix::<f64>::zeros(n, count);
        for (j, column) in normals.as_mut_slice().chunks_mut(n).enumerate() {
            NormalStream::new(seed.offset((first_path + j) as u64)).fill(column);
        }

        let lower = &self.factor.lower;
        let mut noise = DMatrix::<f64>::zeros(n, count);
        let band = n.div_ceil(BANDS);
        let mut start = 0;
        while start < n {
            let end = (start + band).min(n);
            let mut rows = noise.view_mut((start, 0), (end - start, count));
            rows.gemm(
                1.0,
                &lower.view((start, 0), (end - start, end)),
                &normals.view((0, 0), (end, count)),
                0.0,
            );
            start = end;
        }

        let path_scale = (n as f64).powf(-self.hurst);
        let noise_scale = (1.0 / n as f64).sqrt();
        for j in 0..count {
            let y = &mut ys[j * (n + 1)..(j + 1) * (n + 1)];
            let w = &mut ws[j * n..(j + 1) * n];
            let fgn = noise.column(j);
            let v = normals.column(j);
            let mut acc = 0.0;
            y[0] = 0.0;
            for i in 0..n {
                acc += fgn[i];
                y[i + 1] = path_scale * acc;
                w[i] = noise_scale * v[i];
            }
        }
    }
}

impl PathGenerator for CholeskyGenerator {
    fn scheme(&self) -> Scheme {
        Scheme::Cholesky
    }

    fn hurst(&self) -> f64 {
        self.hurst
    }

    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn generate_unit(&self, paths: usize, seed: SeedSpec) -> Result<PathBatch> {
        check_paths(paths)?;
        let n = self.grid.steps();
        let mut values = Array2::<f64>::zeros((paths, n + 1));
        let mut increments = Array2::<f64>::zeros((paths, n));
        values
            .as_slice_mut()
            .expect("standard layout")
            .par_chunks_mut(BLOCK_PATHS * (n + 1))
            .zip(
                increments
                    .as_slice_mut()
                    .expect("standard layout")
                    .par_chunks_mut(BLOCK_PATHS * n),
            )
            .enumerate()
            .for_each(|(block, (ys, ws))| self.fill_block(block * BLOCK_PATHS, seed, ys, ws));

        PathBatch::from_parts(
            GridSpec::unit(n)?,
            self.hurst,
            Scheme::Cholesky,
            seed,
            values,
            increments,
        )
    }
}

pub fn cholesky_simulate(
    grid: &GridSpec,
    hurst: f64,
    paths: usize,
    seed: SeedSpec,
) -> Result<PathBatch> {
    CholeskyGenerator::new(grid, hurst)?.generate(paths, seed)
}
