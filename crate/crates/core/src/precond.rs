//! Strang circulant preconditioner for `shift·I + scale·T`, `T` symmetric Toeplitz.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Inverse of Strang's circulant approximation, applied in O(n log n).
pub struct CirculantPreconditioner {
    // eigenvalues of the circulant approximation of T alone
    toeplitz_eig: Vec<f64>,
    inv_eig: Vec<f64>,
    scale: f64,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for CirculantPreconditioner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantPreconditioner")
            .field("n", &self.toeplitz_eig.len())
            .field("scale", &self.scale)
            .finish()
    }
}

impl CirculantPreconditioner {
    /// Builds the preconditioner for `shift·I + scale·T` from the first column of
    /// `T`. Returns `None` when any circulant eigenvalue is not strictly positive.
    pub fn strang(column: &[f64], scale: f64, shift: f64) -> Option<Self> {
        let n = column.len();
        if n == 0 {
            return None;
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);

        let mut col: Vec<Complex64> = (0..n)
            .map(|k| {
                let src = if k <= n / 2 { k } else { n - k };
                Complex64::new(column[src], 0.0)
            })
            .collect();
        fft.process(&mut col);
        let toeplitz_eig = col.iter().map(|z| z.re).collect();

        let scratch_len = fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len());
        let mut pre = Self {
            toeplitz_eig,
            inv_eig: vec![0.0; n],
            scale,
            fft,
            ifft,
            buf: vec![Complex64::new(0.0, 0.0); n],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        };
        pre.set_shift(shift).then_some(pre)
    }

    /// Replaces the diagonal shift. Returns false (leaving the old shift in
    /// place) if that would make an eigenvalue nonpositive.
    pub fn set_shift(&mut self, shift: f64) -> bool {
        let n = self.toeplitz_eig.len() as f64;
        let scale = self.scale;
        if self.toeplitz_eig.iter().any(|&lam| !(shift + scale * lam > 0.0)) {
            return false;
        }
        for (inv, &lam) in self.inv_eig.iter_mut().zip(&self.toeplitz_eig) {
            *inv = 1.0 / ((shift + scale * lam) * n);
        }
        true
    }

    /// Eigenvalues of the (non-inverted) circulant approximation.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.inv_eig.len() as f64;
        self.inv_eig.iter().map(|&v| 1.0 / (v * n)).collect()
    }

    pub fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        for (b, &x) in self.buf.iter_mut().zip(r) {
            *b = Complex64::new(x, 0.0);
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (b, &inv) in self.buf.iter_mut().zip(&self.inv_eig) {
            *b *= inv;
        }
        self.ifft.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (o, b) in z.iter_mut().zip(&self.buf) {
            *o = b.re;
        }
    }
}

#[derive(Debug, Default)]
pub enum Preconditioner {
    #[default]
    Identity,
    Circulant(CirculantPreconditioner),
}

impl Preconditioner {
    pub fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        match self {
            Preconditioner::Identity => z.copy_from_slice(r),
            Preconditioner::Circulant(c) => c.apply(r, z),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Preconditioner::Identity)
    }
}
