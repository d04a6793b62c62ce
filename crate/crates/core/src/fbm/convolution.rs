use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Causal discrete convolution `out[i] = Σ_{m=0}^{i} kernel[m] · x[i - m]`
/// for `i < len`, evaluated with a zero-padded FFT.
///
/// Two real signals are packed into the real and imaginary parts of one
/// complex transform; the kernel is real, so the halves never mix.
pub struct CausalConvolver {
    len: usize,
    fft_len: usize,
    kernel_hat: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Per-thread working memory for [`CausalConvolver`].
pub struct ConvolutionBuffers {
    data: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl CausalConvolver {
    pub fn new(kernel: &[f64]) -> Self {
        let len = kernel.len();
        let fft_len = (2 * len.max(1) - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(fft_len);
        let inverse = planner.plan_fft_inverse(fft_len);

        let scale = 1.0 / fft_len as f64;
        let mut kernel_hat = vec![Complex64::new(0.0, 0.0); fft_len];
        for (slot, &k) in kernel_hat.iter_mut().zip(kernel) {
            *slot = Complex64::new(k * scale, 0.0);
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); forward.get_inplace_scratch_len()];
        forward.process_with_scratch(&mut kernel_hat, &mut scratch);

        Self {
            len,
            fft_len,
            kernel_hat,
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn buffers(&self) -> ConvolutionBuffers {
        let scratch_len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        ConvolutionBuffers {
            data: vec![Complex64::new(0.0, 0.0); self.fft_len],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    /// Convolve `a` and `b` with the kernel in a single transform pair.
    pub fn convolve_pair(
        &self,
        a: &[f64],
        b: &[f64],
        out_a: &mut [f64],
        out_b: &mut [f64],
        buffers: &mut ConvolutionBuffers,
    ) {
        let n = self.len;
        assert!(a.len() == n && b.len() == n && out_a.len() == n && out_b.len() == n);
        let data = &mut buffers.data;
        for i in 0..n {
            data[i] = Complex64::new(a[i], b[i]);
        }
        data[n..].fill(Complex64::new(0.0, 0.0));
        self.forward.process_with_scratch(data, &mut buffers.scratch);
        for (d, k) in data.iter_mut().zip(&self.kernel_hat) {
            *d *= k;
        }
        self.inverse.process_with_scratch(data, &mut buffers.scratch);
        for i in 0..n {
            out_a[i] = data[i].re;
            out_b[i] = data[i].im;
        }
    }

    pub fn convolve(&self, x: &[f64], out: &mut [f64], buffers: &mut ConvolutionBuffers) {
        let n = self.len;
        assert!(x.len() == n && out.len() == n);
        let data = &mut buffers.data;
        for i in 0..n {
            data[i] = Complex64::new(x[i], 0.0);
        }
        data[n..].fill(Complex64::new(0.0, 0.0));
        self.forward.process_with_scratch(data, &mut buffers.scratch);
        for (d, k) in data.iter_mut().zip(&self.kernel_hat) {
            *d *= k;
        }
        self.inverse.process_with_scratch(data, &mut buffers.scratch);
        for i in 0..n {
            out[i] = data[i].re;
        }
    }
}
