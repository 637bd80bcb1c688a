//! Energies, error norms and convergence ladders.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::kernel::FractionalOrder;
use crate::operator::{FftWorkspace, FracOperator, GridSpec};
use crate::problems::{exact_breather, Problem};
use crate::scheme::{run, IeqState, Observer, SchemeConfig, StepReport};
use crate::solver::SolveConfig;

/// `Eⁿ = ½(‖V‖² + ‖Λ^α U‖² + 2‖W‖²)` with `(u, v) = h Σ u_j v_j`.
pub fn discrete_energy(state: &IeqState, op: &FracOperator) -> Result<f64> {
    discrete_energy_with(state, op, &mut op.workspace())
}

pub fn discrete_energy_with(state: &IeqState, op: &FracOperator, ws: &mut FftWorkspace) -> Result<f64> {
    let n = op.len();
    check_len(n, state.v.len())?;
    check_len(n, state.w.len())?;
    let h = op.grid().h();
    let kinetic: f64 = state.v.iter().map(|v| v * v).sum::<f64>() * h;
    let aux: f64 = state.w.iter().map(|w| w * w).sum::<f64>() * h;
    let potential = op.energy_seminorm_sq_with(&state.u, ws)?;
    Ok(0.5 * (kinetic + potential + 2.0 * aux))
}

/// Constant separating the quadratized discrete energy from the physical one:
/// `‖W‖² = h Σ (1 − cos U) + h (M − 1)` while `W = √(2 − cos U)`.
pub fn auxiliary_energy_offset(grid: &GridSpec) -> f64 {
    grid.h() * grid.interior_len() as f64
}

/// `½∫(u_t² + ((−Δ)^{α/4}u)² + 2(1 − cos u))` for grid data that vanish outside
/// the domain. Integrals are trapezoidal (boundary values are zero); the
/// fractional seminorm is evaluated spectrally on a zero-padded periodic
/// extension at least four times the domain length.
pub fn continuous_energy(u: &[f64], ut: &[f64], grid: &GridSpec, alpha: FractionalOrder) -> Result<f64> {
    let n = grid.interior_len();
    check_len(n, u.len())?;
    check_len(n, ut.len())?;
    let h = grid.h();
    let kinetic: f64 = ut.iter().map(|v| v * v).sum::<f64>() * h;
    let nonlinear: f64 = u.iter().map(|&x| 1.0 - x.cos()).sum::<f64>() * h;

    let len = (4 * (n + 1)).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (b, &x) in buf[1..].iter_mut().zip(u) {
        b.re = x;
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let period = len as f64 * h;
    let seminorm: f64 = buf
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let k = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
            let xi = 2.0 * std::f64::consts::PI * k / period;
            xi.abs().powf(alpha.value()) * z.norm_sqr()
        })
        .sum::<f64>()
        * h
        / len as f64;
    Ok(0.5 * (kinetic + seminorm + 2.0 * nonlinear))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEntry {
    pub n: usize,
    pub t: f64,
    pub energy: f64,
    pub rel_err: f64,
}

/// Energy history with `RE = |(Eⁿ − E⁰)/E⁰|`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergySeries {
    entries: Vec<EnergyEntry>,
}

impl EnergySeries {
    pub fn push(&mut self, n: usize, t: f64, energy: f64) -> Result<()> {
        let rel_err = match self.entries.first() {
            None => {
                if energy == 0.0 {
                    return Err(Error::InvalidConfig(
                        "relative energy error undefined for zero initial energy".into(),
                    ));
                }
                0.0
            }
            Some(first) => ((energy - first.energy) / first.energy).abs(),
        };
        if let Some(last) = self.entries.last() {
            if n <= last.n {
                return Err(Error::InvalidConfig(format!(
                    "energy entries must increase in n ({} after {})",
                    n, last.n
                )));
            }
        }
        self.entries.push(EnergyEntry { n, t, energy, rel_err });
        Ok(())
    }

    pub fn entries(&self) -> &[EnergyEntry] {
        &self.entries
    }

    pub fn initial(&self) -> Option<f64> {
        self.entries.first().map(|e| e.energy)
    }

    pub fn max_rel_err(&self) -> f64 {
        self.entries.iter().map(|e| e.rel_err).fold(0.0, f64::max)
    }
}

/// Records the discrete energy every `stride` levels (and at the final level
/// the caller reaches, if `stride` divides it).
pub struct EnergyRecorder {
    op: Arc<FracOperator>,
    ws: FftWorkspace,
    stride: usize,
    series: EnergySeries,
    max_drift: f64,
}

impl EnergyRecorder {
    pub fn new(op: Arc<FracOperator>, stride: usize) -> Self {
        let ws = op.workspace();
        Self {
            op,
            ws,
            stride: stride.max(1),
            series: EnergySeries::default(),
            max_drift: 0.0,
        }
    }

    pub fn series(&self) -> &EnergySeries {
        &self.series
    }

    pub fn into_series(self) -> EnergySeries {
        self.series
    }

    /// Largest `‖Wⁿ − √(2 − cos Uⁿ)‖_∞` seen at recorded levels.
    pub fn max_auxiliary_drift(&self) -> f64 {
        self.max_drift
    }
}

impl Observer for EnergyRecorder {
    fn observe(&mut self, state: &IeqState, _: &StepReport) -> Result<()> {
        if state.n % self.stride == 0 {
            let e = discrete_energy_with(state, &self.op, &mut self.ws)?;
            self.series.push(state.n, state.t, e)?;
            self.max_drift = self.max_drift.max(state.auxiliary_drift());
        }
        Ok(())
    }
}

/// Max-norm error against the breather, every `stride` levels (`alpha = 2` only).
pub struct BreatherErrorRecorder {
    grid: GridSpec,
    omega: f64,
    stride: usize,
    pub entries: Vec<(usize, f64, f64)>,
}

impl BreatherErrorRecorder {
    pub fn new(grid: GridSpec, omega: f64, stride: usize) -> Self {
        Self {
            grid,
            omega,
            stride: stride.max(1),
            entries: Vec::new(),
        }
    }
}

impl Observer for BreatherErrorRecorder {
    fn observe(&mut self, state: &IeqState, _: &StepReport) -> Result<()> {
        if state.n % self.stride == 0 {
            let e = max_norm_error_exact(&state.u, &self.grid, state.t, self.omega)?;
            self.entries.push((state.n, state.t, e));
        }
        Ok(())
    }
}

/// `max_j |u(x_j, t) − U_j|` against the breather.
pub fn max_norm_error_exact(numeric: &[f64], grid: &GridSpec, t: f64, omega: f64) -> Result<f64> {
    check_len(grid.interior_len(), numeric.len())?;
    numeric
        .iter()
        .enumerate()
        .map(|(i, &u)| Ok((exact_breather(grid.node(i + 1), t, omega)? - u).abs()))
        .try_fold(0.0, |acc: f64, e: Result<f64>| Ok(acc.max(e?)))
}

/// `max_j |U_{M,j} − U_{2M,2j}|` over coarse interior nodes.
pub fn max_norm_error_self(coarse: &[f64], coarse_grid: &GridSpec, fine: &[f64], fine_grid: &GridSpec) -> Result<f64> {
    if fine_grid != &coarse_grid.refined() {
        return Err(Error::IncompatibleGrids(format!(
            "fine grid {fine_grid:?} is not the bisection of {coarse_grid:?}"
        )));
    }
    check_len(coarse_grid.interior_len(), coarse.len())?;
    check_len(fine_grid.interior_len(), fine.len())?;
    // coarse interior index i (node i+1) sits at fine node 2i+2, index 2i+1
    Ok(coarse
        .iter()
        .enumerate()
        .map(|(i, &c)| (c - fine[2 * i + 1]).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    ExactSolution,
    SelfComparison,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub h: f64,
    pub tau: f64,
    pub error: f64,
    /// `log2(E_{i−1}/E_i)`, absent on the first row.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub mode: ErrorMode,
    pub rows: Vec<LadderRow>,
}

impl ErrorReport {
    pub fn from_errors(mode: ErrorMode, levels: &[(f64, f64, f64)]) -> Self {
        let rows = levels
            .iter()
            .enumerate()
            .map(|(i, &(h, tau, error))| LadderRow {
                h,
                tau,
                error,
                order: (i > 0).then(|| (levels[i - 1].2 / error).log2()),
            })
            .collect();
        Self { mode, rows }
    }

    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }
}

/// Refinement study: level `i` runs with `(h/2^i, τ/2^i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderSpec {
    pub problem: Problem,
    pub alpha: FractionalOrder,
    pub a: f64,
    pub b: f64,
    pub base_h: f64,
    pub base_tau: f64,
    pub levels: usize,
    pub t_final: f64,
    pub solve: SolveConfig,
}

impl LadderSpec {
    /// Exact-solution errors are available for the breather at `alpha = 2`.
    pub fn mode(&self) -> ErrorMode {
        match self.problem {
            Problem::Breather { .. } if self.alpha.is_classical() => ErrorMode::ExactSolution,
            _ => ErrorMode::SelfComparison,
        }
    }

    fn level_config(&self, level: usize) -> Result<SchemeConfig> {
        let f = (1u64 << level) as f64;
        let grid = GridSpec::with_spacing(self.a, self.b, self.base_h / f)?;
        let mut cfg = SchemeConfig::with_tau(grid, self.alpha, self.t_final, self.base_tau / f)?;
        cfg.solve = self.solve;
        Ok(cfg)
    }
}

pub fn convergence_ladder(spec: &LadderSpec) -> Result<ErrorReport> {
    if spec.levels < 1 {
        return Err(Error::InvalidConfig("a ladder needs at least one level".into()));
    }
    let mode = spec.mode();
    let runs = match mode {
        ErrorMode::ExactSolution => spec.levels,
        ErrorMode::SelfComparison => spec.levels + 1,
    };
    let configs = (0..runs).map(|l| spec.level_config(l)).collect::<Result<Vec<_>>>()?;

    let finals: Vec<(SchemeConfig, Vec<f64>)> = configs
        .par_iter()
        .enumerate()
        .map(|(level, cfg)| {
            run(&spec.problem, cfg, &mut [])
                .map(|out| (*cfg, out.state.u))
                .map_err(|e| Error::Level {
                    level,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    let mut levels = Vec::with_capacity(spec.levels);
    for l in 0..spec.levels {
        let (cfg, u) = &finals[l];
        let error = match mode {
            ErrorMode::ExactSolution => {
                let omega = spec.problem.omega().expect("breather has omega");
                max_norm_error_exact(u, &cfg.grid, cfg.t_final, omega)?
            }
            ErrorMode::SelfComparison => {
                let (fine_cfg, fine) = &finals[l + 1];
                max_norm_error_self(u, &cfg.grid, fine, &fine_cfg.grid)?
            }
        };
        levels.push((cfg.grid.h(), cfg.tau(), error));
    }
    Ok(ErrorReport::from_errors(mode, &levels))
}
