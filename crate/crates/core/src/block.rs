//! Dense assembly of the full per-step block system in `Z = (U, V, W)` at the
//! half level, for small-size verification of the Schur-reduced solve.
//!
//! Rows, with `B = diag(𝓑(ũ))` and `Δ = Δ_h^α`:
//!
//! ```text
//!   U − (τ/2) V              = Uⁿ
//!   (τ/2) Δ U + V + (τ/2) B W = Vⁿ
//!   −(τ/2) B V + 2 W          = 2 Wⁿ
//! ```

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::operator::FracOperator;
use crate::scheme::{b_func, IeqState};

/// Largest grid (in subintervals) accepted by the dense block assembly.
pub const MAX_BLOCK_SUBINTERVALS: usize = 128;

#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

/// Assembles the block matrix and right-hand side; `u_tilde` is the point at
/// which the nonlinear coefficient `𝓑` is frozen.
pub fn assemble_block_system(op: &FracOperator, state: &IeqState, u_tilde: &[f64], tau: f64) -> Result<BlockSystem> {
    let m = op.grid().subintervals();
    if m > MAX_BLOCK_SUBINTERVALS {
        return Err(Error::SizeGuard {
            what: "dense block assembly",
            max: MAX_BLOCK_SUBINTERVALS,
            got: m,
        });
    }
    let n = op.len();
    check_len(n, state.u.len())?;
    check_len(n, u_tilde.len())?;

    let half = 0.5 * tau;
    let lap = op.toeplitz_matrix() * op.scale();
    let b: Vec<f64> = u_tilde.iter().map(|&x| b_func(x)).collect();

    let mut a = DMatrix::zeros(3 * n, 3 * n);
    for i in 0..n {
        a[(i, i)] = 1.0;
        a[(i, n + i)] = -half;

        for j in 0..n {
            a[(n + i, j)] = half * lap[(i, j)];
        }
        a[(n + i, n + i)] = 1.0;
        a[(n + i, 2 * n + i)] = half * b[i];

        a[(2 * n + i, n + i)] = -half * b[i];
        a[(2 * n + i, 2 * n + i)] = 2.0;
    }

    let mut rhs = DVector::zeros(3 * n);
    for i in 0..n {
        rhs[i] = state.u[i];
        rhs[n + i] = state.v[i];
        rhs[2 * n + i] = 2.0 * state.w[i];
    }
    Ok(BlockSystem { matrix: a, rhs })
}

impl BlockSystem {
    /// Solves by LU; returns the half-level vectors `(U, V, W)`.
    pub fn solve(&self) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let z = self
            .matrix
            .clone()
            .lu()
            .solve(&self.rhs)
            .ok_or_else(|| Error::Factorization("block system is singular".into()))?;
        let n = z.len() / 3;
        let z = z.as_slice();
        Ok((z[..n].to_vec(), z[n..2 * n].to_vec(), z[2 * n..].to_vec()))
    }

    /// `(A − Aᵀ)/2` and `(A + Aᵀ)/2`.
    pub fn split(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let t = self.matrix.transpose();
        ((&self.matrix - &t) * 0.5, (&self.matrix + &t) * 0.5)
    }
}
