//! Counter-based normal streams.
//!
//! Every path owns a ChaCha8 stream keyed by `(master_seed, stream_id)`.
//! Uniform counters are mapped to normals through the inverse CDF, so a
//! stream's values depend only on its key and position, never on how many
//! paths share a batch or how the work is scheduled across threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{check_hurst, Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Key of the `k`-th stream after this one.
    pub fn offset(self, k: u64) -> Self {
        Self {
            stream_id: self.stream_id.wrapping_add(k),
            ..self
        }
    }

    /// Base key for batch `index` of a sequence of batches of `paths` paths.
    ///
    /// Each batch reserves `2 * paths` streams: the first half drives the
    /// fBm, the second half the independent price noise.
    pub fn for_batch(master_seed: u64, index: u64, paths: usize) -> Self {
        Self::new(master_seed, index * 2 * paths as u64)
    }
}

/// Infinite stream of standard normal draws.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn new(seed: SeedSpec) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.master_seed);
        rng.set_stream(seed.stream_id);
        Self { rng }
    }

    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        // 53 random bits centred in their cell: strictly inside (0, 1).
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        inverse_normal_cdf(self.next_uniform())
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.next_normal();
        }
    }
}

impl Iterator for NormalStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_normal())
    }
}

pub fn standard_normals(seed: SeedSpec, count: usize) -> Vec<f64> {
    NormalStream::new(seed).take(count).collect()
}

/// Inverse of the standard normal CDF (Wichura, AS 241 `PPND16`), accurate
/// to about 1e-16 relative over the whole open unit interval.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2509.0809287301227 * r + 33430.57558358813) * r
            + 67265.7709270087)
            * r
            + 45921.95393154987)
            * r
            + 13731.69376550946)
            * r
            + 1971.5909503065514)
            * r
            + 133.14166789178438)
            * r
            + 3.3871328727963665;
        let den = ((((((5226.495278852546 * r + 28729.085735721943) * r
            + 39307.89580009271)
            * r
            + 21213.794301586596)
            * r
            + 5394.196021424751)
            * r
            + 687.1870074920579)
            * r
            + 42.31333070160091)
            * r
            + 1.0;
        return q * num / den;
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail.ln()).sqrt();
    let value = if r <= 5.0 {
        let r = r - 1.6;
        let num = ((((((7.745450142783414e-4 * r + 0.022723844989269184) * r
            + 0.2417807251774506)
            * r
            + 1.2704582524523684)
            * r
            + 3.6478483247632045)
            * r
            + 5.769497221460691)
            * r
            + 4.630337846156546)
            * r
            + 1.4234371107496835;
        let den = ((((((1.0507500716444168e-9 * r + 5.475938084995345e-4) * r
            + 0.015198666563616457)
            * r
            + 0.14810397642748008)
            * r
            + 0.6897673349851)
            * r
            + 1.6763848301838038)
            * r
            + 2.053191626637759)
            * r
            + 1.0;
        num / den
    } else {
        let r = r - 5.0;
        let num = ((((((2.0103343992922881e-7 * r + 2.7115555687434876e-5) * r
            + 0.0012426609473880784)
            * r
            + 0.026532189526576124)
            * r
            + 0.2965605718285049)
            * r
            + 1.7848265399172913)
            * r
            + 5.463784911164114)
            * r
            + 6.657904643501103;
        let den = ((((((2.0442631033899398e-15 * r + 1.421511758316446e-7) * r
            + 1.8463183175100548e-5)
            * r
            + 7.868691311456133e-4)
            * r
            + 0.014875361290850615)
            * r
            + 0.1369298809227358)
            * r
            + 0.5998322065558879)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -value
    } else {
        value
    }
}

/// Zero-mean bivariate normal law given by its covariance entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateNormalSpec {
    var1: f64,
    var2: f64,
    cov: f64,
}

impl BivariateNormalSpec {
    pub fn new(var1: f64, var2: f64, cov: f64) -> Result<Self> {
        if !(var1 > 0.0 && var1.is_finite()) {
            return Err(Error::invalid("var1", format!("{var1} must be positive")));
        }
        if !(var2 > 0.0 && var2.is_finite()) {
            return Err(Error::invalid("var2", format!("{var2} must be positive")));
        }
        // Relative slack so that exactly singular matrices (H = 1/2) pass.
        if cov * cov > var1 * var2 * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "cov",
                format!("cov^2 = {} exceeds var1 * var2 = {}", cov * cov, var1 * var2),
            ));
        }
        Ok(Self { var1, var2, cov })
    }

    pub fn var1(&self) -> f64 {
        self.var1
    }

    pub fn var2(&self) -> f64 {
        self.var2
    }

    pub fn cov(&self) -> f64 {
        self.cov
    }

    /// Lower Cholesky factor `[[a, 0], [b, c]]` of the covariance matrix.
    pub fn factor(&self) -> [f64; 3] {
        let a = self.var1.sqrt();
        let b = self.cov / a;
        let c = (self.var2 - b * b).max(0.0).sqrt();
        [a, b, c]
    }

    /// Map a pair of independent standard normals to one correlated pair.
    #[inline]
    pub fn transform(factor: &[f64; 3], z1: f64, z2: f64) -> (f64, f64) {
        (factor[0] * z1, factor[1] * z1 + factor[2] * z2)
    }
}

/// `count` pairs drawn from `spec`, consuming the stream two normals at a time.
pub fn bivariate_normals(
    seed: SeedSpec,
    count: usize,
    spec: &BivariateNormalSpec,
) -> (Vec<f64>, Vec<f64>) {
    let factor = spec.factor();
    let mut stream = NormalStream::new(seed);
    let mut first = Vec::with_capacity(count);
    let mut second = Vec::with_capacity(count);
    for _ in 0..count {
        let z1 = stream.next_normal();
        let z2 = stream.next_normal();
        let (w1, w2) = BivariateNormalSpec::transform(&factor, z1, z2);
        first.push(w1);
        second.push(w2);
    }
    (first, second)
}

/// Joint law of the Brownian increment over one step of length `1/n` and the
/// Wiener integral of the power kernel `(t_{i+1} - s)^{H - 1/2}` over it.
///
/// `n` is the number of steps of the grid, which the schemes always lay on
/// the unit interval.
pub fn hybrid_sigma(grid: &GridSpec, hurst: f64) -> Result<BivariateNormalSpec> {
    check_hurst(hurst)?;
    let n = grid.steps() as f64;
    let var1 = 1.0 / n;
    let cov = 1.0 / ((hurst + 0.5) * n.powf(hurst + 0.5));
    let var2 = 1.0 / (2.0 * hurst * n.powf(2.0 * hurst));
    BivariateNormalSpec::new(var1, var2, cov)
}
