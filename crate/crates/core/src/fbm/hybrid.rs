use ndarray::Array2;
use rayon::prelude::*;

use super::convolution::CausalConvolver;
use super::{check_paths, is_brownian, PathBatch, PathGenerator, Scheme};
use crate::error::{check_hurst, Error, Result};
use crate::grid::GridSpec;
use crate::rng::{hybrid_sigma, BivariateNormalSpec, NormalStream, SeedSpec};

/// Evaluation point `b_k*` in `[k-1, k]` minimising the mean square error of
/// the step-function approximation of the kernel on `[(k-1)/n, k/n]`.
///
/// Undefined at `H = 1/2`, where the kernel is constant and every weight is
/// one; [`hybrid_kernel`] handles that case separately.
pub fn optimal_bk(k: usize, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    if k < 2 {
        return Err(Error::invalid("k", format!("{k} < 2; the first cell is integrated exactly")));
    }
    if is_brownian(hurst) {
        return Err(Error::invalid("H", "b_k* is degenerate at H = 1/2"));
    }
    let a = hurst + 0.5;
    let k = k as f64;
    let mean = (k.powf(a) - (k - 1.0).powf(a)) / a;
    Ok(mean.powf(1.0 / (hurst - 0.5)))
}

/// Step-function weights `Γ_k = (b_k*/n)^{H - 1/2}` laid out for a causal
/// convolution: entry `m` holds `Γ_{m+1}`, with `Γ_1 = 0` because the first
/// cell is covered by the exact Wiener integral.
pub fn hybrid_kernel(steps: usize, hurst: f64) -> Result<Vec<f64>> {
    check_hurst(hurst)?;
    let n = steps as f64;
    let mut kernel = vec![0.0; steps];
    for (m, w) in kernel.iter_mut().enumerate().skip(1) {
        *w = if is_brownian(hurst) {
            1.0
        } else {
            (optimal_bk(m + 1, hurst)? / n).powf(hurst - 0.5)
        };
    }
    Ok(kernel)
}

/// Hybrid scheme with one exactly integrated cell (κ = 1).
///
/// For every step the pair `(W_{i,1}, W_{i,2})` holds the Brownian
/// increment over `[t_i, t_{i+1}]` and the Wiener integral of
/// `(t_{i+1} - s)^{H - 1/2}` over the same cell; their joint law is
/// [`hybrid_sigma`]. Then
/// `Y_i = √(2H) (W_{i-1,2} + Σ_{k=2}^{i} Γ_k W_{i-k,1})`.
pub struct HybridGenerator {
    grid: GridSpec,
    hurst: f64,
    sigma: BivariateNormalSpec,
    convolver: CausalConvolver,
}

impl HybridGenerator {
    pub fn new(grid: &GridSpec, hurst: f64) -> Result<Self> {
        check_hurst(hurst)?;
        let unit = GridSpec::unit(grid.steps())?;
        let sigma = hybrid_sigma(&unit, hurst)?;
        let kernel = hybrid_kernel(grid.steps(), hurst)?;
        Ok(Self {
            grid: *grid,
            hurst,
            sigma,
            convolver: CausalConvolver::new(&kernel),
        })
    }

    pub fn sigma(&self) -> &BivariateNormalSpec {
        &self.sigma
    }

    fn draw(&self, seed: SeedSpec, increments: &mut [f64], exact: &mut [f64]) {
        let factor = self.sigma.factor();
        let mut stream = NormalStream::new(seed);
        for (w1, w2) in increments.iter_mut().zip(exact.iter_mut()) {
            let z1 = stream.next_normal();
            let z2 = stream.next_normal();
            (*w1, *w2) = BivariateNormalSpec::transform(&factor, z1, z2);
        }
    }
}

impl PathGenerator for HybridGenerator {
    fn scheme(&self) -> Scheme {
        Scheme::Hybrid
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
        let scale = (2.0 * self.hurst).sqrt();
        let mut values = Array2::<f64>::zeros((paths, n + 1));
        let mut increments = Array2::<f64>::zeros((paths, n));

        let value_rows = values.as_slice_mut().expect("standard layout");
        let increment_rows = increments.as_slice_mut().expect("standard layout");
        value_rows
            .par_chunks_mut(2 * (n + 1))
            .zip(increment_rows.par_chunks_mut(2 * n))
            .enumerate()
            .for_each_init(
                || (self.convolver.buffers(), vec![0.0; 2 * n], vec![0.0; 2 * n]),
                |(buffers, exact, conv), (pair, (ys, ws))| {
                    let count = ws.len() / n;
                    for r in 0..count {
                        let stream = seed.offset((2 * pair + r) as u64);
                        self.draw(stream, &mut ws[r * n..(r + 1) * n], &mut exact[r * n..(r + 1) * n]);
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
                        let e = &exact[r * n..(r + 1) * n];
                        let c = &conv[r * n..(r + 1) * n];
                        y[0] = 0.0;
                        for i in 1..=n {
                            y[i] = scale * (e[i - 1] + c[i - 1]);
                        }
                    }
                },
            );

        PathBatch::from_parts(
            GridSpec::unit(n)?,
            self.hurst,
            Scheme::Hybrid,
            seed,
            values,
            increments,
        )
    }
}

pub fn hybrid_simulate(
    grid: &GridSpec,
    hurst: f64,
    paths: usize,
    seed: SeedSpec,
) -> Result<PathBatch> {
    HybridGenerator::new(grid, hurst)?.generate(paths, seed)
}
