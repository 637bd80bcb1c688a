//! Linearly implicit Crank–Nicolson stepping of the quadratized system
//!
//! ```text
//!   u_t = v,   v_t = −Δ^α u − 𝓑(u) w,   w_t = ½ 𝓑(u) v,   𝓑(x) = sin x / √(2 − cos x)
//! ```
//!
//! with `w = √(2 − cos u)` at `t = 0`. Each step freezes `𝓑` at the extrapolated
//! midpoint `ũ = (3Uⁿ − Uⁿ⁻¹)/2`, eliminates `V` and `W`, and solves one SPD
//! system for `U^{n+1/2}`:
//!
//! ```text
//!   (I + τ²/4 Δ + τ²/8 𝓑²) U^{n+1/2} = Uⁿ + τ/2 Vⁿ − τ²/4 𝓑 Wⁿ + τ²/8 𝓑² Uⁿ
//! ```
//!
//! The first step has no `Uⁿ⁻¹`; it evaluates `𝓑` at `U^{1/2}` itself and
//! resolves the nonlinearity by fixed-point iteration.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::kernel::FractionalOrder;
use crate::operator::{integer_ratio, FracOperator, GridSpec};
use crate::problems::Problem;
use crate::solver::{LinearSolver, SolveConfig, SolveStats};

/// `sin x / √(2 − cos x)`; bounded by 1 in magnitude.
#[inline]
pub fn b_func(x: f64) -> f64 {
    x.sin() / (2.0 - x.cos()).sqrt()
}

/// Grid vectors `(U, V, W)` at time level `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IeqState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub t: f64,
    pub n: usize,
}

impl IeqState {
    /// Level-zero state with `W = √(2 − cos U)`.
    pub fn initial(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        check_len(u.len(), v.len())?;
        let w = u.iter().map(|&x| (2.0 - x.cos()).sqrt()).collect();
        Ok(Self { u, v, w, t: 0.0, n: 0 })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    fn check(&self, n: usize) -> Result<()> {
        check_len(n, self.u.len())?;
        check_len(n, self.v.len())?;
        check_len(n, self.w.len())
    }

    /// `max_j |W_j − √(2 − cos U_j)|`; zero at level 0, recorded but never corrected.
    pub fn auxiliary_drift(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.w)
            .map(|(&u, &w)| (w - (2.0 - u.cos()).sqrt()).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub grid: GridSpec,
    pub alpha: FractionalOrder,
    pub t_final: f64,
    pub steps: usize,
    pub solve: SolveConfig,
    pub startup_tol: f64,
    pub startup_max_iter: usize,
}

impl SchemeConfig {
    pub fn new(grid: GridSpec, alpha: FractionalOrder, t_final: f64, steps: usize) -> Result<Self> {
        let cfg = Self {
            grid,
            alpha,
            t_final,
            steps,
            solve: SolveConfig::default(),
            startup_tol: 1e-14,
            startup_max_iter: 200,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `T / tau` must be an integer up to rounding.
    pub fn with_tau(grid: GridSpec, alpha: FractionalOrder, t_final: f64, tau: f64) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidConfig(format!("T must be positive, got {t_final}")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidConfig(format!("tau must be positive, got {tau}")));
        }
        let steps = integer_ratio(t_final, tau)
            .ok_or_else(|| Error::InvalidConfig(format!("T = {t_final} is not an integer multiple of tau = {tau}")))?;
        Self::new(grid, alpha, t_final, steps)
    }

    pub fn tau(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "T must be positive, got {}",
                self.t_final
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("number of time steps must be at least 1".into()));
        }
        if !(self.startup_tol.is_finite() && self.startup_tol > 0.0) {
            return Err(Error::InvalidConfig("startup_tol must be positive".into()));
        }
        if self.startup_max_iter == 0 {
            return Err(Error::InvalidConfig("startup_max_iter must be at least 1".into()));
        }
        self.solve.validate()
    }
}

/// Solver work done by one time step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepReport {
    /// Linear solves performed (1 for a regular step, one per fixed-point sweep at startup).
    pub solves: usize,
    pub iterations: usize,
    pub max_residual: f64,
    /// Fixed-point sweeps (startup step only).
    pub fixed_point_iterations: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl StepReport {
    fn absorb(&mut self, s: &SolveStats) {
        self.solves += 1;
        self.iterations += s.iterations;
        self.max_residual = self.max_residual.max(s.residual);
    }
}

/// Owns the operator, the linear solver and per-step scratch vectors.
pub struct Integrator {
    op: Arc<FracOperator>,
    cfg: SchemeConfig,
    solver: LinearSolver,
    coef: Vec<f64>,
    diag: Vec<f64>,
    rhs: Vec<f64>,
}

impl std::fmt::Debug for Integrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Integrator").field("cfg", &self.cfg).finish()
    }
}

impl Integrator {
    pub fn new(cfg: SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        let op = Arc::new(FracOperator::new(cfg.alpha, cfg.grid)?);
        Self::with_operator(cfg, op)
    }

    pub fn with_operator(cfg: SchemeConfig, op: Arc<FracOperator>) -> Result<Self> {
        cfg.validate()?;
        if op.grid() != &cfg.grid || op.alpha() != cfg.alpha {
            return Err(Error::InvalidConfig(
                "operator does not match the scheme grid/order".into(),
            ));
        }
        let n = op.len();
        let solver = LinearSolver::new(op.clone(), cfg.tau(), cfg.solve)?;
        Ok(Self {
            op,
            cfg,
            solver,
            coef: vec![0.0; n],
            diag: vec![0.0; n],
            rhs: vec![0.0; n],
        })
    }

    pub fn operator(&self) -> &Arc<FracOperator> {
        &self.op
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    /// Fills `coef` with `𝓑` at `at`.
    fn freeze_coefficient(&mut self, at: &[f64]) {
        for (c, &x) in self.coef.iter_mut().zip(at) {
            *c = b_func(x);
        }
    }

    /// Solves the reduced system for `U^{n+1/2}` with the current `coef`; `x`
    /// carries the initial guess.
    fn solve_half_level(&mut self, cur: &IeqState, x: &mut [f64]) -> Result<SolveStats> {
        let tau = self.cfg.tau();
        let q = 0.125 * tau * tau;
        for j in 0..cur.len() {
            let b = self.coef[j];
            self.diag[j] = q * b * b;
            self.rhs[j] = cur.u[j] + 0.5 * tau * cur.v[j] - 2.0 * q * b * cur.w[j] + self.diag[j] * cur.u[j];
        }
        self.solver.solve(&self.diag, &self.rhs, x)
    }

    /// `X^{n+1} = 2 X^{n+1/2} − Xⁿ` with `V`, `W` recovered from `U^{n+1/2}`.
    fn advance(&self, cur: &IeqState, u_half: &[f64]) -> IeqState {
        let tau = self.cfg.tau();
        let n = cur.len();
        let mut next = IeqState {
            u: vec![0.0; n],
            v: vec![0.0; n],
            w: vec![0.0; n],
            t: (cur.n + 1) as f64 * tau,
            n: cur.n + 1,
        };
        #[allow(clippy::needless_range_loop)]
        for j in 0..n {
            let du = u_half[j] - cur.u[j];
            let v_half = 2.0 * du / tau;
            let w_half = cur.w[j] + 0.5 * self.coef[j] * du;
            next.u[j] = 2.0 * u_half[j] - cur.u[j];
            next.v[j] = 2.0 * v_half - cur.v[j];
            next.w[j] = 2.0 * w_half - cur.w[j];
        }
        next
    }

    /// Half-level `U` for the first step, by fixed-point iteration on
    /// `U^{1/2} ↦ solve(𝓑(U^{1/2}))`. Also leaves the matching `𝓑` in `coef`.
    pub fn startup_half_level(&mut self, s0: &IeqState) -> Result<(Vec<f64>, StepReport)> {
        s0.check(self.op.len())?;
        let start = Instant::now();
        let tau = self.cfg.tau();
        let mut report = StepReport::default();
        let mut iterate: Vec<f64> = s0.u.iter().zip(&s0.v).map(|(&u, &v)| u + 0.5 * tau * v).collect();
        let mut next = iterate.clone();
        let mut update = f64::INFINITY;
        for k in 1..=self.cfg.startup_max_iter {
            self.freeze_coefficient(&iterate);
            next.copy_from_slice(&iterate);
            let stats = self.solve_half_level(s0, &mut next)?;
            report.absorb(&stats);
            update = next
                .iter()
                .zip(&iterate)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            std::mem::swap(&mut iterate, &mut next);
            if update <= self.cfg.startup_tol {
                report.fixed_point_iterations = k;
                report.elapsed = start.elapsed();
                // `coef` still holds 𝓑 at the previous iterate, which is the one
                // the accepted solve used; keeping it makes E¹ = E⁰ exact.
                return Ok((iterate, report));
            }
        }
        Err(Error::StartupNotConverged {
            iterations: self.cfg.startup_max_iter,
            update,
        })
    }

    /// Conservative implicit midpoint step from level 0 to level 1.
    pub fn startup_step(&mut self, s0: &IeqState) -> Result<(IeqState, StepReport)> {
        let (u_half, report) = self.startup_half_level(s0)?;
        Ok((self.advance(s0, &u_half), report))
    }

    /// Half-level `U` of a regular step, with `𝓑` frozen at the extrapolation.
    pub fn cn_half_level(&mut self, prev: &IeqState, cur: &IeqState) -> Result<(Vec<f64>, StepReport)> {
        let n = self.op.len();
        prev.check(n)?;
        cur.check(n)?;
        let start = Instant::now();
        let mut x: Vec<f64> = cur.u.iter().zip(&prev.u).map(|(&c, &p)| 1.5 * c - 0.5 * p).collect();
        self.freeze_coefficient(&x);
        let stats = self.solve_half_level(cur, &mut x)?;
        let mut report = StepReport::default();
        report.absorb(&stats);
        report.elapsed = start.elapsed();
        Ok((x, report))
    }

    /// Linearly implicit step from level `n ≥ 1` to `n + 1`.
    pub fn cn_step(&mut self, prev: &IeqState, cur: &IeqState) -> Result<(IeqState, StepReport)> {
        let (u_half, report) = self.cn_half_level(prev, cur)?;
        Ok((self.advance(cur, &u_half), report))
    }
}

/// Step-by-step driver holding the two most recent levels.
pub struct Simulation {
    integrator: Integrator,
    prev: Option<IeqState>,
    cur: IeqState,
}

impl std::fmt::Debug for Simulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulation")
            .field("n", &self.cur.n)
            .field("t", &self.cur.t)
            .finish()
    }
}

impl Simulation {
    pub fn new(problem: &Problem, cfg: SchemeConfig) -> Result<Self> {
        problem.validate()?;
        let (phi, psi) = problem.initial_data(&cfg.grid);
        Self::from_initial(cfg, IeqState::initial(phi, psi)?)
    }

    pub fn from_initial(cfg: SchemeConfig, state0: IeqState) -> Result<Self> {
        let integrator = Integrator::new(cfg)?;
        state0.check(integrator.op.len())?;
        if state0.n != 0 {
            return Err(Error::InvalidConfig("initial state must be level 0".into()));
        }
        Ok(Self {
            integrator,
            prev: None,
            cur: state0,
        })
    }

    pub fn state(&self) -> &IeqState {
        &self.cur
    }

    pub fn previous(&self) -> Option<&IeqState> {
        self.prev.as_ref()
    }

    pub fn operator(&self) -> &Arc<FracOperator> {
        self.integrator.operator()
    }

    pub fn config(&self) -> &SchemeConfig {
        self.integrator.config()
    }

    pub fn is_finished(&self) -> bool {
        self.cur.n >= self.integrator.cfg.steps
    }

    /// Advances one level; the first call performs the startup step.
    pub fn step(&mut self) -> Result<StepReport> {
        if self.is_finished() {
            return Err(Error::InvalidConfig("simulation already reached T".into()));
        }
        let step = self.cur.n + 1;
        let (next, report) = match &self.prev {
            None => self.integrator.startup_step(&self.cur),
            Some(prev) => self.integrator.cn_step(prev, &self.cur),
        }
        .map_err(|e| Error::Step {
            step,
            source: Box::new(e),
        })?;
        self.prev = Some(std::mem::replace(&mut self.cur, next));
        Ok(report)
    }

    pub fn into_state(self) -> IeqState {
        self.cur
    }
}

/// Called with level 0 (default report) and after every step.
pub trait Observer {
    fn observe(&mut self, state: &IeqState, report: &StepReport) -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(&IeqState, &StepReport) -> Result<()>,
{
    fn observe(&mut self, state: &IeqState, report: &StepReport) -> Result<()> {
        self(state, report)
    }
}

/// Aggregate solver work over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RunTotals {
    pub steps: usize,
    pub linear_solves: usize,
    pub cg_iterations: usize,
    pub max_cg_iterations_per_step: usize,
    pub max_relative_residual: f64,
    pub startup_fixed_point_iterations: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: IeqState,
    pub totals: RunTotals,
    pub embedding_len: usize,
}

/// Startup step, then `N − 1` regular steps, notifying every observer at each level.
pub fn run(problem: &Problem, cfg: &SchemeConfig, observers: &mut [&mut dyn Observer]) -> Result<RunOutcome> {
    let start = Instant::now();
    let mut sim = Simulation::new(problem, *cfg)?;
    let mut totals = RunTotals::default();
    for obs in observers.iter_mut() {
        obs.observe(sim.state(), &StepReport::default())?;
    }
    while !sim.is_finished() {
        let report = sim.step()?;
        if sim.state().n == 1 {
            totals.startup_fixed_point_iterations = report.fixed_point_iterations;
        }
        totals.steps += 1;
        totals.linear_solves += report.solves;
        totals.cg_iterations += report.iterations;
        totals.max_cg_iterations_per_step = totals.max_cg_iterations_per_step.max(report.iterations);
        totals.max_relative_residual = totals.max_relative_residual.max(report.max_residual);
        for obs in observers.iter_mut() {
            obs.observe(sim.state(), &report)?;
        }
    }
    totals.elapsed = start.elapsed();
    let embedding_len = sim.operator().embedding_len();
    Ok(RunOutcome {
        state: sim.into_state(),
        totals,
        embedding_len,
    })
}
