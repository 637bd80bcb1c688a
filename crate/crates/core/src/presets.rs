//! Named experiment setups.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::Problem;

/// A single-run setup for `run` and the energy sweeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunPreset {
    pub name: &'static str,
    pub problem: Problem,
    pub alphas: &'static [f64],
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub tau: f64,
    pub t_final: f64,
}

/// A refinement study for `convergence`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderPreset {
    pub name: &'static str,
    pub problem: Problem,
    pub alphas: &'static [f64],
    pub a: f64,
    pub b: f64,
    pub base_h: f64,
    pub base_tau: f64,
    pub levels: usize,
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchPreset {
    pub problem: Problem,
    pub alphas: Vec<f64>,
    pub sizes: Vec<usize>,
    pub taus: Vec<f64>,
    pub h: f64,
    pub t_final: f64,
    pub reps: usize,
    pub cg_rel_tol: f64,
}

const BREATHER: Problem = Problem::Breather { omega: 1.1 };
const SOLITON: Problem = Problem::Breather { omega: 1.0 };

pub const TABLE1: LadderPreset = LadderPreset {
    name: "table1",
    problem: BREATHER,
    alphas: &[1.3, 1.75, 1.99, 2.0],
    a: -20.0,
    b: 20.0,
    base_h: 0.2,
    base_tau: 0.02,
    levels: 4,
    t_final: 1.0,
};

pub const TABLE2: LadderPreset = LadderPreset {
    name: "table2",
    problem: Problem::SechPulse,
    alphas: &[1.3, 1.6, 1.9, 2.0],
    ..TABLE1
};

pub const BREATHER_ENERGY: RunPreset = RunPreset {
    name: "breather-energy",
    problem: BREATHER,
    alphas: &[1.3, 1.75, 1.99, 2.0],
    a: -40.0,
    b: 40.0,
    h: 0.1,
    tau: 0.05,
    t_final: 50.0,
};

pub const PULSE_ENERGY: RunPreset = RunPreset {
    name: "pulse-energy",
    problem: Problem::SechPulse,
    alphas: &[1.3, 1.6, 1.9, 2.0],
    h: 0.05,
    ..BREATHER_ENERGY
};

pub const BREATHER_EVOLUTION: RunPreset = RunPreset {
    name: "breather-evolution",
    problem: SOLITON,
    alphas: &[1.1, 1.75, 1.99, 2.0],
    a: -100.0,
    b: 100.0,
    h: 0.1,
    tau: 0.05,
    t_final: 20.0,
};

pub const PULSE_EVOLUTION: RunPreset = RunPreset {
    name: "pulse-evolution",
    problem: Problem::SechPulse,
    alphas: &[1.3, 1.6, 1.9, 2.0],
    ..BREATHER_EVOLUTION
};

pub const RUN_PRESETS: &[&RunPreset] = &[&BREATHER_ENERGY, &PULSE_ENERGY, &BREATHER_EVOLUTION, &PULSE_EVOLUTION];

pub fn ladder_preset(name: &str) -> Result<&'static LadderPreset> {
    match name {
        "table1" => Ok(&TABLE1),
        "table2" => Ok(&TABLE2),
        other => Err(Error::InvalidConfig(format!(
            "unknown convergence preset {other:?} (expected table1 or table2)"
        ))),
    }
}

pub fn run_preset(name: &str) -> Result<&'static RunPreset> {
    let canonical = match name {
        "fig2" => "breather-energy",
        "fig3" => "breather-evolution",
        "fig4" => "pulse-energy",
        "fig5" => "pulse-evolution",
        other => other,
    };
    RUN_PRESETS
        .iter()
        .copied()
        .find(|p| p.name == canonical)
        .ok_or_else(|| {
            let names: Vec<_> = RUN_PRESETS.iter().map(|p| p.name).collect();
            Error::InvalidConfig(format!("unknown preset {name:?} (expected one of {names:?})"))
        })
}

impl Default for BenchPreset {
    fn default() -> Self {
        Self {
            problem: BREATHER,
            alphas: vec![1.3, 2.0],
            sizes: vec![100, 200, 400],
            taus: vec![0.1, 0.05, 0.025, 0.0125],
            h: 0.1,
            t_final: 10.0,
            reps: 3,
            cg_rel_tol: 1e-14,
        }
    }
}
