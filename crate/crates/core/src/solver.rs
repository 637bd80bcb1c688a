//! Per-step linear solves for `M_sys = I + (τ²/4) Δ_h^α + diag(d)`.
//!
//! `Direct` assembles `M_sys` densely and factors it by Cholesky (the D-IEQ
//! path); `Cg` runs conjugate gradients with FFT mat-vecs (the F-IEQ path),
//! optionally preconditioned by a Strang circulant.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::operator::{dot, FftWorkspace, FracOperator};
use crate::precond::{CirculantPreconditioner, Preconditioner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Direct,
    Cg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PrecondKind {
    None,
    Circulant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub method: SolveMethod,
    pub cg_rel_tol: f64,
    /// `None` means `10 * (M - 1)`.
    pub cg_max_iter: Option<usize>,
    pub precond: PrecondKind,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            method: SolveMethod::Cg,
            cg_rel_tol: 1e-12,
            cg_max_iter: None,
            precond: PrecondKind::None,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cg_rel_tol.is_finite() && self.cg_rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "cg_rel_tol must be positive, got {}",
                self.cg_rel_tol
            )));
        }
        if self.cg_max_iter == Some(0) {
            return Err(Error::InvalidConfig("cg_max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn max_iter_for(&self, n: usize) -> usize {
        self.cg_max_iter.unwrap_or(10 * n.max(1))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    /// Relative residual `‖M x − b‖ / ‖b‖` at exit.
    pub residual: f64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Symmetric positive definite operator usable by [`pcg`].
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&mut self, x: &[f64], y: &mut [f64]);
}

/// `I + (τ²/4) Δ_h^α + diag(d)`, never formed explicitly on the FFT path.
pub struct StepMatrix {
    op: Arc<FracOperator>,
    tau: f64,
    diag: Vec<f64>,
    ws: FftWorkspace,
}

impl std::fmt::Debug for StepMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StepMatrix")
            .field("op", &self.op)
            .field("tau", &self.tau)
            .finish()
    }
}

impl StepMatrix {
    pub fn new(op: Arc<FracOperator>, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidConfig(format!("tau must be positive, got {tau}")));
        }
        let n = op.len();
        let ws = op.workspace();
        Ok(Self {
            op,
            tau,
            diag: vec![0.0; n],
            ws,
        })
    }

    pub fn with_diag(op: Arc<FracOperator>, tau: f64, diag: Vec<f64>) -> Result<Self> {
        let mut m = Self::new(op, tau)?;
        m.set_diag(&diag)?;
        Ok(m)
    }

    pub fn op(&self) -> &Arc<FracOperator> {
        &self.op
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn set_diag(&mut self, diag: &[f64]) -> Result<()> {
        check_len(self.diag.len(), diag.len())?;
        if diag.iter().any(|&d| !(d >= 0.0)) {
            return Err(Error::InvalidConfig("step matrix diagonal must be nonnegative".into()));
        }
        self.diag.copy_from_slice(diag);
        Ok(())
    }

    /// Coefficient of `Δ_h^α`, i.e. `τ²/4`.
    pub fn laplacian_weight(&self) -> f64 {
        0.25 * self.tau * self.tau
    }

    /// Dense `M_sys`, built from the exact Toeplitz entries.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let w = self.laplacian_weight() * self.op.scale();
        let mut m = self.op.toeplitz_matrix() * w;
        for (i, &d) in self.diag.iter().enumerate() {
            m[(i, i)] += 1.0 + d;
        }
        m
    }
}

impl LinearOperator for StepMatrix {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&mut self, x: &[f64], y: &mut [f64]) {
        self.op
            .apply_fft_into(x, y, &mut self.ws)
            .expect("step matrix applied to vector of wrong length");
        let w = self.laplacian_weight();
        for ((yi, &xi), &d) in y.iter_mut().zip(x).zip(&self.diag) {
            *yi = xi + w * *yi + d * xi;
        }
    }
}

/// Strang circulant preconditioner for a step matrix: the Toeplitz part is
/// approximated by its Strang circulant and the diagonal by its mean. Falls
/// back to the identity (with a warning) if the circulant is not SPD.
pub fn build_circulant_preconditioner(mat: &StepMatrix) -> Preconditioner {
    let n = mat.dim();
    let mean = if n == 0 {
        0.0
    } else {
        mat.diag.iter().sum::<f64>() / n as f64
    };
    let scale = mat.laplacian_weight() * mat.op.scale();
    match CirculantPreconditioner::strang(mat.op.kernel().coeffs(), scale, 1.0 + mean) {
        Some(p) => Preconditioner::Circulant(p),
        None => {
            log::warn!("circulant preconditioner has a nonpositive eigenvalue; using identity");
            Preconditioner::Identity
        }
    }
}

/// Preconditioned conjugate gradients. `x` holds the initial guess on entry
/// and the solution on exit. Convergence is declared on the true residual
/// `‖b − A x‖ ≤ tol ‖b‖`, recomputed whenever the recursive residual passes.
pub fn pcg<A: LinearOperator + ?Sized>(
    a: &mut A,
    precond: &mut Preconditioner,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats> {
    let n = a.dim();
    check_len(n, b.len())?;
    check_len(n, x.len())?;
    let start = Instant::now();

    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.fill(0.0);
        return Ok(SolveStats {
            iterations: 0,
            residual: 0.0,
            elapsed: start.elapsed(),
        });
    }
    let target = tol * bnorm;

    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];

    let true_residual = |a: &mut A, x: &[f64], r: &mut [f64], ap: &mut [f64]| {
        a.apply(x, ap);
        for ((ri, &bi), &ai) in r.iter_mut().zip(b).zip(ap.iter()) {
            *ri = bi - ai;
        }
        dot(r, r).sqrt()
    };

    let mut rnorm = true_residual(a, x, &mut r, &mut ap);
    let mut iterations = 0;
    'restart: loop {
        if rnorm <= target {
            return Ok(SolveStats {
                iterations,
                residual: rnorm / bnorm,
                elapsed: start.elapsed(),
            });
        }
        precond.apply(&r, &mut z);
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            iterations += 1;
            a.apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(Error::CgNotConverged {
                    iterations,
                    residual: rnorm / bnorm,
                });
            }
            let step = rz / pap;
            for ((xi, ri), (&pi, &api)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
                *xi += step * pi;
                *ri -= step * api;
            }
            rnorm = dot(&r, &r).sqrt();
            if rnorm <= target {
                rnorm = true_residual(a, x, &mut r, &mut ap);
                continue 'restart;
            }
            precond.apply(&r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for (pi, &zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }
        return Err(Error::CgNotConverged {
            iterations,
            residual: rnorm / bnorm,
        });
    }
}

/// Dense Cholesky solve of `M_sys x = b`.
pub fn solve_dense(mat: &StepMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_len(mat.dim(), b.len())?;
    dense_cholesky_solve(mat.to_dense(), b)
}

fn dense_cholesky_solve(m: DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Factorization("matrix is not positive definite".into()))?;
    let x = chol.solve(&DVector::from_column_slice(b));
    Ok(x.as_slice().to_vec())
}

/// One-shot solve of `mat x = rhs`.
pub fn solve(mat: &mut StepMatrix, rhs: &[f64], cfg: &SolveConfig) -> Result<(Vec<f64>, SolveStats)> {
    cfg.validate()?;
    let mut solver = LinearSolver::new(mat.op.clone(), mat.tau, *cfg)?;
    let mut x = vec![0.0; rhs.len()];
    let stats = solver.solve(&mat.diag, rhs, &mut x)?;
    Ok((x, stats))
}

/// Reusable per-run solver. Holds the step matrix, its FFT scratch, the
/// preconditioner, and (for `Direct`) the dense Toeplitz part.
pub struct LinearSolver {
    cfg: SolveConfig,
    mat: StepMatrix,
    precond: Preconditioner,
    dense_base: Option<DMatrix<f64>>,
}

impl std::fmt::Debug for LinearSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearSolver")
            .field("cfg", &self.cfg)
            .field("mat", &self.mat)
            .finish()
    }
}

impl LinearSolver {
    pub fn new(op: Arc<FracOperator>, tau: f64, cfg: SolveConfig) -> Result<Self> {
        cfg.validate()?;
        let mat = StepMatrix::new(op, tau)?;
        let precond = match (cfg.method, cfg.precond) {
            (SolveMethod::Cg, PrecondKind::Circulant) => build_circulant_preconditioner(&mat),
            _ => Preconditioner::Identity,
        };
        let dense_base = match cfg.method {
            SolveMethod::Direct => Some(mat.to_dense()),
            SolveMethod::Cg => None,
        };
        Ok(Self {
            cfg,
            mat,
            precond,
            dense_base,
        })
    }

    pub fn config(&self) -> &SolveConfig {
        &self.cfg
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Solves `(I + (τ²/4)Δ + diag) x = rhs`; `x` carries the initial guess for CG.
    pub fn solve(&mut self, diag: &[f64], rhs: &[f64], x: &mut [f64]) -> Result<SolveStats> {
        let n = self.dim();
        check_len(n, rhs.len())?;
        check_len(n, x.len())?;
        self.mat.set_diag(diag)?;
        match self.cfg.method {
            SolveMethod::Cg => {
                if let Preconditioner::Circulant(c) = &mut self.precond {
                    let mean = diag.iter().sum::<f64>() / n as f64;
                    if !c.set_shift(1.0 + mean) {
                        log::warn!("circulant preconditioner lost definiteness; using identity");
                        self.precond = Preconditioner::Identity;
                    }
                }
                let max_iter = self.cfg.max_iter_for(n);
                pcg(&mut self.mat, &mut self.precond, rhs, x, self.cfg.cg_rel_tol, max_iter)
            }
            SolveMethod::Direct => {
                let start = Instant::now();
                let mut m = self.dense_base.clone().expect("direct solver keeps its dense matrix");
                for (i, &d) in diag.iter().enumerate() {
                    m[(i, i)] += d;
                }
                let sol = dense_cholesky_solve(m, rhs)?;
                x.copy_from_slice(&sol);
                let bnorm = dot(rhs, rhs).sqrt();
                let residual = if bnorm == 0.0 {
                    0.0
                } else {
                    let mut ax = vec![0.0; n];
                    self.mat.apply(x, &mut ax);
                    let r: f64 = ax.iter().zip(rhs).map(|(a, b)| (a - b) * (a - b)).sum();
                    r.sqrt() / bnorm
                };
                Ok(SolveStats {
                    iterations: 0,
                    residual,
                    elapsed: start.elapsed(),
                })
            }
        }
    }
}
