//! Discrete fractional Laplacian on a uniform grid with homogeneous exterior data.
//!
//! On interior nodes `x_1..x_{M-1}` the operator is `h^{-alpha} C`, where `C` is the
//! symmetric Toeplitz matrix with first column `c_0, ..., c_{M-2}`. The FFT path
//! embeds `C` into a circulant of length `L`, the smallest power of two with
//! `L >= 2(M-1)`, whose eigenvalues are precomputed once.

use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::kernel::{FractionalOrder, SymbolKernel};

/// Uniform partition of `[a, b]` into `m` subintervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    a: f64,
    b: f64,
    m: usize,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidGrid(format!(
                "need finite endpoints with b > a, got ({a}, {b})"
            )));
        }
        if m < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 subintervals, got {m}")));
        }
        Ok(Self { a, b, m })
    }

    /// Grid with mesh size `h`; `(b - a) / h` must be an integer up to rounding.
    pub fn with_spacing(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("mesh size must be positive, got {h}")));
        }
        let m = integer_ratio(b - a, h).ok_or_else(|| {
            Error::InvalidGrid(format!("domain length {} is not an integer multiple of h = {h}", b - a))
        })?;
        Self::new(a, b, m)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of subintervals `M`.
    pub fn subintervals(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.m as f64
    }

    /// Number of unknowns, `M - 1`.
    pub fn interior_len(&self) -> usize {
        self.m - 1
    }

    /// Node `x_j = a + j h`, `0 <= j <= M`.
    pub fn node(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h()
    }

    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.m).map(|j| self.node(j)).collect()
    }

    /// Same domain with every cell bisected.
    pub fn refined(&self) -> Self {
        Self {
            a: self.a,
            b: self.b,
            m: 2 * self.m,
        }
    }
}

/// Returns `round(num / den)` when the quotient is an integer to 1e-9 relative.
pub(crate) fn integer_ratio(num: f64, den: f64) -> Option<usize> {
    let q = num / den;
    let r = q.round();
    if r >= 1.0 && (q - r).abs() <= 1e-9 * r.max(1.0) {
        Some(r as usize)
    } else {
        None
    }
}

/// Caller-owned scratch for [`FracOperator::apply_fft_into`].
pub struct FftWorkspace {
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

/// `Δ_h^α`: scaled symmetric Toeplitz operator plus its energy quadratic form.
///
/// Immutable after construction and `Sync`; concurrent applications need one
/// [`FftWorkspace`] each.
pub struct FracOperator {
    kernel: SymbolKernel,
    grid: GridSpec,
    scale: f64,
    embed_len: usize,
    // real eigenvalues of the circulant embedding, already divided by embed_len
    embed_eig: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FracOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FracOperator")
            .field("alpha", &self.kernel.alpha())
            .field("grid", &self.grid)
            .field("embed_len", &self.embed_len)
            .finish()
    }
}

impl FracOperator {
    pub fn new(alpha: FractionalOrder, grid: GridSpec) -> Result<Self> {
        let n = grid.interior_len();
        let kernel = SymbolKernel::generate(alpha, n)?;
        let scale = grid.h().powf(-alpha.value());
        let embed_len = (2 * n).next_power_of_two();

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(embed_len);
        let ifft = planner.plan_fft_inverse(embed_len);

        // first column of the circulant: c_0..c_{n-1}, zeros, c_{n-1}..c_1
        let mut col = vec![Complex64::new(0.0, 0.0); embed_len];
        for (k, &c) in kernel.coeffs().iter().enumerate() {
            col[k].re = c;
            if k > 0 {
                col[embed_len - k].re = c;
            }
        }
        fft.process(&mut col);
        let inv_len = 1.0 / embed_len as f64;
        let embed_eig = col.iter().map(|z| z.re * inv_len).collect();

        Ok(Self {
            kernel,
            grid,
            scale,
            embed_len,
            embed_eig,
            fft,
            ifft,
        })
    }

    pub fn kernel(&self) -> &SymbolKernel {
        &self.kernel
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.kernel.alpha()
    }

    /// `h^{-alpha}`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.grid.interior_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Length of the circulant embedding used by the FFT path.
    pub fn embedding_len(&self) -> usize {
        self.embed_len
    }

    pub fn workspace(&self) -> FftWorkspace {
        let scratch_len = self
            .fft
            .get_inplace_scratch_len()
            .max(self.ifft.get_inplace_scratch_len());
        FftWorkspace {
            buf: vec![Complex64::new(0.0, 0.0); self.embed_len],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    /// Exact O(M²) evaluation of `h^{-alpha} C u`.
    pub fn apply_dense(&self, u: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        check_len(n, u.len())?;
        let c = self.kernel.coeffs();
        let out = (0..n)
            .map(|j| {
                let acc: f64 = u.iter().enumerate().map(|(k, &uk)| c[j.abs_diff(k)] * uk).sum();
                self.scale * acc
            })
            .collect();
        Ok(out)
    }

    pub fn apply_fft(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.apply_fft_into(u, &mut out, &mut self.workspace())?;
        Ok(out)
    }

    /// O(M log M) evaluation of `h^{-alpha} C u` into `out`.
    pub fn apply_fft_into(&self, u: &[f64], out: &mut [f64], ws: &mut FftWorkspace) -> Result<()> {
        let n = self.len();
        check_len(n, u.len())?;
        check_len(n, out.len())?;
        let FftWorkspace { buf, scratch } = ws;
        for (z, &x) in buf.iter_mut().zip(u) {
            *z = Complex64::new(x, 0.0);
        }
        buf[n..].fill(Complex64::new(0.0, 0.0));
        self.fft.process_with_scratch(buf, scratch);
        for (z, &lam) in buf.iter_mut().zip(&self.embed_eig) {
            *z *= lam;
        }
        self.ifft.process_with_scratch(buf, scratch);
        for (o, z) in out.iter_mut().zip(buf.iter()) {
            *o = self.scale * z.re;
        }
        Ok(())
    }

    /// `‖Λ^α u‖² = h (Δ_h^α u, u) = h^{1-alpha} uᵀ C u`.
    pub fn energy_seminorm_sq(&self, u: &[f64]) -> Result<f64> {
        let mut ws = self.workspace();
        self.energy_seminorm_sq_with(u, &mut ws)
    }

    pub fn energy_seminorm_sq_with(&self, u: &[f64], ws: &mut FftWorkspace) -> Result<f64> {
        let mut lu = vec![0.0; self.len()];
        self.apply_fft_into(u, &mut lu, ws)?;
        let h = self.grid.h();
        Ok(h * dot(&lu, u))
    }

    /// The Toeplitz matrix `C` (unscaled).
    pub fn toeplitz_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let c = self.kernel.coeffs();
        DMatrix::from_fn(n, n, |i, j| c[i.abs_diff(j)])
    }
}

#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
