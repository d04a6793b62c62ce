use ndarray::Array2;
use rayon::prelude::*;

use super::convolution::CausalConvolver;
use super::{check_paths, is_brownian, FbmKernel, PathBatch, PathGenerator, Scheme};
use crate::error::{check_hurst, Result};
use crate::grid::GridSpec;
use crate::rng::{NormalStream, SeedSpec};

/// How the kernel `g` is discretized on the cells `[(k-1)/n, k/n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelWeights {
    /// `g(k/n)`, the right end point of each cell.
    PointSample,
    /// `(n ∫_{cell} g²)^{1/2}`: each cell contributes its exact variance, so
    /// `Var Y_{t_i} = t_i^{2H}` holds exactly on the grid.
    #[default]
    VarianceMatched,
}

/// Convolution weights for the rDonsker sum `Y_i = Σ_{k=1}^{i} g_k ΔW_{i-k+1}`;
/// entry `m` holds `g_{m+1}`.
pub fn rdonsker_kernel(steps: usize, hurst: f64, weights: KernelWeights) -> Result<Vec<f64>> {
    let g = FbmKernel::new(hurst)?;
    let n = steps as f64;
    Ok((1..=steps)
        .map(|k| {
            if is_brownian(hurst) {
                return 1.0;
            }
            let (a, b) = ((k - 1) as f64 / n, k as f64 / n);
            match weights {
                KernelWeights::PointSample => g.eval(b),
                KernelWeights::VarianceMatched => (n * g.squared_integral(a, b)).sqrt(),
            }
        })
        .collect())
}

/// rDonsker scheme: kernel weights convolved with the Brownian increments.
pub struct RDonskerGenerator {
    grid: GridSpec,
    hurst: f64,
    weights: KernelWeights,
    convolver: CausalConvolver,
}

impl RDonskerGenerator {
    pub fn new(grid: &GridSpec, hurst: f64) -> Result<Self> {
        Self::with_weights(grid, hurst, KernelWeights::default())
    }

    pub fn with_weights(grid: &GridSpec, hurst: f64, weights: KernelWeights) -> Result<Self> {
        check_hurst(hurst)?;
        let kernel = rdonsker_kernel(grid.steps(), hurst, weights)?;
        Ok(Self {
            grid: *grid,
            hurst,
            weights,
            convolver: CausalConvolver::new(&kernel),
        })
    }

    pub fn weights(&self) -> KernelWeights {
        self.weights
    }
}

impl PathGenerator for RDonskerGenerator {
    fn scheme(&self) -> Scheme {
        Scheme::RDonsker
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
        let sd = (1.0 / n as f64).sqrt();
        let mut values = Array2::<f64>::zeros((paths, n + 1));
        let mut increments = Array2::<f64>::zeros((paths, n));

        let value_rows = values.as_slice_mut().expect("standard layout");
        let increment_rows = increments.as_slice_mut().expect("standard layout");
        value_rows
            .par_chunks_mut(2 * (n + 1))
            .zip(increment_rows.par_chunks_mut(2 * n))
            .enumerate()
            .for_each_init(
                || (self.convolver.buffers(), vec![0.0; 2 * n]),
                |(buffers, conv), (pair, (ys, ws))| {
                    let count = ws.len() / n;
                    for r in 0..count {
                        let mut stream = NormalStream::new(seed.offset((2 * pair + r) as u64));
                        for w in &mut ws[r * n..(r + 1) * n] {
                            *w = sd * stream.next_normal();
                        }
                    }
                    if count == 2 {
                        let (w_a, w_b) = ws.split_at(n);
                        let (c_a, c_b) = conv.split_at_mut(n);
                        self.convolver.convolve_pair(w_a, w_b, c_a, c_b, buffers);
                    } else {
                        self.convolver.convolve(&ws[..n], &mut conv[..n], buffers);
                    }
                    for r in 0..count {
                        let y = &mut ys[r * (n + 1)..(r + 1) * (n + 1)];
                        y[0] = 0.0;
                        y[1..].copy_from_slice(&conv[r * n..(r + 1) * n]);
                    }
                },
            );

        PathBatch::from_parts(
            GridSpec::unit(n)?,
            self.hurst,
            Scheme::RDonsker,
            seed,
            values,
            increments,
        )
    }
}

pub fn rdonsker_simulate(
    grid: &GridSpec,
    hurst: f64,
    paths: usize,
    seed: SeedSpec,
) -> Result<PathBatch> {
    RDonskerGenerator::new(grid, hurst)?.generate(paths, seed)
}
