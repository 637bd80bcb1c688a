//! Command-line front end: argument and config-file resolution plus the
//! `run`, `convergence`, `energy` and `bench` commands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{convergence_ladder, EnergyRecorder, ErrorReport, LadderSpec};
use crate::error::{Error, Result};
use crate::kernel::FractionalOrder;
use crate::operator::GridSpec;
use crate::output::{self, BenchRow, SnapshotWriter};
use crate::presets::{self, BenchPreset};
use crate::problems::Problem;
use crate::scheme::{run, Observer, RunTotals, SchemeConfig};
use crate::solver::{PrecondKind, SolveConfig, SolveMethod};

#[derive(Debug, Parser)]
#[command(
    name = "fracsg",
    version,
    about = "Energy-preserving solver for the fractional sine-Gordon equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write snapshots, energy history and metadata.
    Run(RunArgs),
    /// Refinement study; writes convergence.csv.
    Convergence(ConvergenceArgs),
    /// Energy histories for every order of a preset; writes energy_<alpha>.csv.
    Energy(EnergyArgs),
    /// Wall-clock comparison of the dense direct and FFT-CG solvers; writes bench.csv.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum)]
    pub method: Option<SolveMethod>,
    #[arg(long, value_enum)]
    pub precond: Option<PrecondKind>,
    #[arg(long = "cg-tol")]
    pub cg_rel_tol: Option<f64>,
    #[arg(long = "cg-max-iter")]
    pub cg_max_iter: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// 5.1 (breather) or 5.2 (pulse).
    #[arg(long)]
    pub example: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long = "T", allow_negative_numbers = true)]
    pub t_final: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long = "startup-tol")]
    pub startup_tol: Option<f64>,
    #[arg(long = "startup-max-iter")]
    pub startup_max_iter: Option<usize>,
    /// Snapshot stride in steps (default N/100).
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConvergenceArgs {
    /// table1 or table2; other flags override individual fields.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub example: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
    #[arg(long)]
    pub h0: Option<f64>,
    #[arg(long)]
    pub tau0: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long = "T")]
    pub t_final: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyArgs {
    /// breather-energy (fig2) or pulse-energy (fig4); any run preset is accepted.
    #[arg(long, default_value = "breather-energy")]
    pub preset: String,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long = "T")]
    pub t_final: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Numbers of subintervals M; the domain is centred with length M·h.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long = "T")]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long = "cg-tol")]
    pub cg_rel_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub precond: Option<PrecondKind>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Keys accepted in a `run` config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub preset: Option<String>,
    pub example: Option<String>,
    pub alpha: Option<f64>,
    pub omega: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub h: Option<f64>,
    pub tau: Option<f64>,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    pub method: Option<SolveMethod>,
    pub precond: Option<PrecondKind>,
    pub cg_rel_tol: Option<f64>,
    pub cg_max_iter: Option<usize>,
    pub startup_tol: Option<f64>,
    pub startup_max_iter: Option<usize>,
    pub stride: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved and validated `run` configuration; serialized into `meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub problem: Problem,
    pub scheme: SchemeConfig,
    pub snapshot_stride: usize,
    pub out_dir: PathBuf,
    pub deterministic: bool,
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => RunFile::load(p)?,
            None => RunFile::default(),
        };
        let preset_name = args.preset.clone().or(file.preset.clone());
        let preset = preset_name.as_deref().map(presets::run_preset).transpose()?;

        let omega = args
            .omega
            .or(file.omega)
            .or(preset.and_then(|p| p.problem.omega()))
            .unwrap_or(1.1);
        let problem = match args.example.as_deref().or(file.example.as_deref()) {
            Some(name) => Problem::from_name(name, omega)?,
            None => match preset {
                Some(p) => match p.problem {
                    Problem::Breather { .. } => Problem::breather(omega)?,
                    other => other,
                },
                None => Problem::breather(omega)?,
            },
        };

        let alpha = args
            .alpha
            .or(file.alpha)
            .or(preset.map(|p| p.alphas[p.alphas.len() - 1]))
            .unwrap_or(2.0);
        let alpha = FractionalOrder::new(alpha)?;

        let (a, b) = match &args.domain {
            Some(d) => (d[0], d[1]),
            None => (
                file.a.or(preset.map(|p| p.a)).unwrap_or(-20.0),
                file.b.or(preset.map(|p| p.b)).unwrap_or(20.0),
            ),
        };
        let h = args.h.or(file.h).or(preset.map(|p| p.h)).unwrap_or(0.2);
        let tau = args.tau.or(file.tau).or(preset.map(|p| p.tau)).unwrap_or(0.02);
        let t_final = args
            .t_final
            .or(file.t_final)
            .or(preset.map(|p| p.t_final))
            .unwrap_or(1.0);

        let grid = GridSpec::with_spacing(a, b, h)?;
        let mut scheme = SchemeConfig::with_tau(grid, alpha, t_final, tau)?;
        scheme.solve = merge_solver(&args.solver, &file);
        if let Some(t) = args.startup_tol.or(file.startup_tol) {
            scheme.startup_tol = t;
        }
        if let Some(k) = args.startup_max_iter.or(file.startup_max_iter) {
            scheme.startup_max_iter = k;
        }
        scheme.validate()?;

        let snapshot_stride = args.stride.or(file.stride).unwrap_or((scheme.steps / 100).max(1));
        if snapshot_stride == 0 {
            return Err(Error::InvalidConfig("stride must be at least 1".into()));
        }
        let out_dir = args
            .out
            .clone()
            .or(file.out.clone())
            .unwrap_or_else(|| PathBuf::from("out"));

        Ok(Self {
            preset: preset.map(|p| p.name.to_string()),
            problem,
            scheme,
            snapshot_stride,
            out_dir,
            deterministic: true,
        })
    }
}

fn merge_solver(args: &SolverArgs, file: &RunFile) -> SolveConfig {
    let d = SolveConfig::default();
    SolveConfig {
        method: args.method.or(file.method).unwrap_or(d.method),
        cg_rel_tol: args.cg_rel_tol.or(file.cg_rel_tol).unwrap_or(d.cg_rel_tol),
        cg_max_iter: args.cg_max_iter.or(file.cg_max_iter).or(d.cg_max_iter),
        precond: args.precond.or(file.precond).unwrap_or(d.precond),
    }
}

fn solver_from_args(args: &SolverArgs) -> Result<SolveConfig> {
    let cfg = merge_solver(args, &RunFile::default());
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Serialize)]
struct Software {
    name: &'static str,
    version: &'static str,
}

const SOFTWARE: Software = Software {
    name: "fracsg",
    version: crate::VERSION,
};

#[derive(Debug, Serialize)]
struct RunMeta<'a> {
    software: Software,
    config: &'a RunConfig,
    grid_subintervals: usize,
    h: f64,
    tau: f64,
    fft_embedding_len: usize,
    cg_rel_tol: f64,
    startup_fixed_point_iterations: usize,
    solver_stats: RunTotals,
    initial_energy: f64,
    final_energy: f64,
    max_relative_energy_error: f64,
    max_auxiliary_drift: f64,
}

/// Summary returned by [`cmd_run`] for callers that want the numbers directly.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub config: RunConfig,
    pub totals: RunTotals,
    pub max_relative_energy_error: f64,
    pub snapshots: Vec<usize>,
}

pub fn cmd_run(args: &RunArgs) -> Result<RunSummary> {
    let cfg = RunConfig::resolve(args)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let op = std::sync::Arc::new(crate::operator::FracOperator::new(cfg.scheme.alpha, cfg.scheme.grid)?);
    let mut energy = EnergyRecorder::new(op, 1);
    let mut snaps = SnapshotWriter::new(&cfg.out_dir, cfg.scheme.grid, cfg.snapshot_stride, cfg.scheme.steps);
    let outcome = {
        let mut observers: [&mut dyn Observer; 2] = [&mut energy, &mut snaps];
        run(&cfg.problem, &cfg.scheme, &mut observers)?
    };
    output::write_energy(&cfg.out_dir.join("energy.csv"), energy.series())?;

    let series = energy.series();
    let meta = RunMeta {
        software: SOFTWARE,
        config: &cfg,
        grid_subintervals: cfg.scheme.grid.subintervals(),
        h: cfg.scheme.grid.h(),
        tau: cfg.scheme.tau(),
        fft_embedding_len: outcome.embedding_len,
        cg_rel_tol: cfg.scheme.solve.cg_rel_tol,
        startup_fixed_point_iterations: outcome.totals.startup_fixed_point_iterations,
        solver_stats: outcome.totals,
        initial_energy: series.initial().unwrap_or(f64::NAN),
        final_energy: series.entries().last().map(|e| e.energy).unwrap_or(f64::NAN),
        max_relative_energy_error: series.max_rel_err(),
        max_auxiliary_drift: energy.max_auxiliary_drift(),
    };
    output::write_json(&cfg.out_dir.join("meta.json"), &meta)?;
    Ok(RunSummary {
        max_relative_energy_error: series.max_rel_err(),
        totals: outcome.totals,
        snapshots: snaps.written,
        config: cfg,
    })
}

pub fn ladder_specs(args: &ConvergenceArgs) -> Result<Vec<LadderSpec>> {
    let preset = args.preset.as_deref().map(presets::ladder_preset).transpose()?;
    let omega = args.omega.or(preset.and_then(|p| p.problem.omega())).unwrap_or(1.1);
    let problem = match args.example.as_deref() {
        Some(name) => Problem::from_name(name, omega)?,
        None => match preset {
            Some(p) => match p.problem {
                Problem::Breather { .. } => Problem::breather(omega)?,
                other => other,
            },
            None => Problem::breather(omega)?,
        },
    };
    let alphas = match (&args.alpha, preset) {
        (Some(a), _) => a.clone(),
        (None, Some(p)) => p.alphas.to_vec(),
        (None, None) => vec![2.0],
    };
    let (a, b) = match &args.domain {
        Some(d) => (d[0], d[1]),
        None => preset.map(|p| (p.a, p.b)).unwrap_or((-20.0, 20.0)),
    };
    let solve = solver_from_args(&args.solver)?;
    alphas
        .into_iter()
        .map(|alpha| {
            Ok(LadderSpec {
                problem,
                alpha: FractionalOrder::new(alpha)?,
                a,
                b,
                base_h: args.h0.or(preset.map(|p| p.base_h)).unwrap_or(0.2),
                base_tau: args.tau0.or(preset.map(|p| p.base_tau)).unwrap_or(0.02),
                levels: args.levels.or(preset.map(|p| p.levels)).unwrap_or(4),
                t_final: args.t_final.or(preset.map(|p| p.t_final)).unwrap_or(1.0),
                solve,
            })
        })
        .collect()
}

pub fn cmd_convergence(args: &ConvergenceArgs) -> Result<Vec<(f64, ErrorReport)>> {
    let specs = ladder_specs(args)?;
    for s in &specs {
        if s.levels == 0 {
            return Err(Error::InvalidConfig("levels must be at least 1".into()));
        }
        GridSpec::with_spacing(s.a, s.b, s.base_h)?;
        SchemeConfig::with_tau(
            GridSpec::with_spacing(s.a, s.b, s.base_h)?,
            s.alpha,
            s.t_final,
            s.base_tau,
        )?;
    }
    let reports = specs
        .par_iter()
        .map(|s| convergence_ladder(s).map(|r| (s.alpha.value(), r)))
        .collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(&args.out)?;
    output::write_convergence(&args.out.join("convergence.csv"), &reports)?;
    Ok(reports)
}

pub fn cmd_energy(args: &EnergyArgs) -> Result<Vec<(f64, f64)>> {
    let preset = presets::run_preset(&args.preset)?;
    let alphas = args.alpha.clone().unwrap_or_else(|| preset.alphas.to_vec());
    let t_final = args.t_final.unwrap_or(preset.t_final);
    let solve = solver_from_args(&args.solver)?;
    let configs = alphas
        .iter()
        .map(|&alpha| {
            let grid = GridSpec::with_spacing(preset.a, preset.b, preset.h)?;
            let mut cfg = SchemeConfig::with_tau(grid, FractionalOrder::new(alpha)?, t_final, preset.tau)?;
            cfg.solve = solve;
            Ok((alpha, cfg))
        })
        .collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(&args.out)?;
    configs
        .par_iter()
        .map(|(alpha, cfg)| {
            let op = std::sync::Arc::new(crate::operator::FracOperator::new(cfg.alpha, cfg.grid)?);
            let mut rec = EnergyRecorder::new(op, args.stride);
            run(&preset.problem, cfg, &mut [&mut rec])?;
            let path = args.out.join(format!("energy_{alpha}.csv"));
            output::write_energy(&path, rec.series())?;
            Ok((*alpha, rec.series().max_rel_err()))
        })
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times `reps` runs of each solver on one setup; returns (direct, fft, max |ΔU|).
pub fn bench_case(problem: &Problem, cfg: &SchemeConfig, reps: usize) -> Result<(f64, f64, f64)> {
    let timed = |method: SolveMethod| -> Result<(f64, Vec<f64>)> {
        let mut c = *cfg;
        c.solve.method = method;
        let mut times = Vec::with_capacity(reps);
        let mut last = Vec::new();
        for _ in 0..reps {
            let start = Instant::now();
            let out = run(problem, &c, &mut [])?;
            times.push(start.elapsed().as_secs_f64());
            last = out.state.u;
        }
        Ok((median(times), last))
    };
    let (direct, ud) = timed(SolveMethod::Direct)?;
    let (fft, uf) = timed(SolveMethod::Cg)?;
    let diff = ud.iter().zip(&uf).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((direct, fft, diff))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<Vec<BenchRow>> {
    let d = BenchPreset::default();
    let sizes = args.sizes.clone().unwrap_or(d.sizes);
    let alphas = args.alphas.clone().unwrap_or(d.alphas);
    let taus = args.taus.clone().unwrap_or(d.taus);
    let h = args.h.unwrap_or(d.h);
    let t_final = args.t_final.unwrap_or(d.t_final);
    let reps = args.reps.unwrap_or(d.reps);
    let solve = SolveConfig {
        cg_rel_tol: args.cg_rel_tol.unwrap_or(d.cg_rel_tol),
        precond: args.precond.unwrap_or(SolveConfig::default().precond),
        ..SolveConfig::default()
    };
    solve.validate()?;
    if sizes.is_empty() || alphas.is_empty() || taus.is_empty() {
        return Err(Error::InvalidConfig("sizes, alphas and taus must be nonempty".into()));
    }
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    let mut cases = Vec::new();
    for &alpha in &alphas {
        for &m in &sizes {
            let half = 0.5 * m as f64 * h;
            let grid = GridSpec::new(-half, half, m)?;
            for &tau in &taus {
                let mut cfg = SchemeConfig::with_tau(grid, FractionalOrder::new(alpha)?, t_final, tau)?;
                cfg.solve = solve;
                cases.push((alpha, cfg));
            }
        }
    }
    std::fs::create_dir_all(&args.out)?;
    let mut rows = Vec::with_capacity(cases.len());
    for (alpha, cfg) in cases {
        let (direct, fft, diff) = bench_case(&d.problem, &cfg, reps)?;
        let row = BenchRow {
            alpha,
            m: cfg.grid.subintervals(),
            h: cfg.grid.h(),
            tau: cfg.tau(),
            steps: cfg.steps,
            direct_seconds: direct,
            fft_seconds: fft,
            max_abs_diff: diff,
        };
        if row.m >= 400 && fft > direct {
            log::warn!(
                "FFT-CG slower than dense direct at M = {}, tau = {} ({fft:.3}s vs {direct:.3}s)",
                row.m,
                row.tau
            );
        }
        rows.push(row);
    }
    output::write_bench(&args.out.join("bench.csv"), &rows)?;
    Ok(rows)
}

/// Exit code for an error: 1 for invalid input, 2 for numerical failure.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        2
    } else {
        1
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(args) => {
            let s = cmd_run(args)?;
            println!(
                "wrote {} snapshots to {}; max relative energy error {:.3e}",
                s.snapshots.len(),
                s.config.out_dir.display(),
                s.max_relative_energy_error
            );
        }
        Command::Convergence(args) => {
            let reports = cmd_convergence(args)?;
            println!(
                "{:>6} {:>10} {:>10} {:>12} {:>8}",
                "alpha", "h", "tau", "error", "order"
            );
            for (alpha, r) in &reports {
                for row in &r.rows {
                    let order = row.order.map(|o| format!("{o:.4}")).unwrap_or_else(|| "-".into());
                    println!(
                        "{alpha:>6} {:>10.5} {:>10.5} {:>12.4e} {order:>8}",
                        row.h, row.tau, row.error
                    );
                }
            }
        }
        Command::Energy(args) => {
            for (alpha, re) in cmd_energy(args)? {
                println!("alpha = {alpha}: max relative energy error {re:.3e}");
            }
        }
        Command::Bench(args) => {
            for r in cmd_bench(args)? {
                println!(
                    "alpha = {} M = {} tau = {}: direct {:.4}s, fft-cg {:.4}s, max |dU| {:.2e}",
                    r.alpha, r.m, r.tau, r.direct_seconds, r.fft_seconds, r.max_abs_diff
                );
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("fracsg").chain(args.iter().copied())).unwrap()
    }

    fn run_args(cli: Cli) -> RunArgs {
        match cli.command {
            Command::Run(a) => a,
            _ => panic!("expected run"),
        }
    }

    #[test]
    fn resolves_flags() {
        let a = run_args(parse(&[
            "run",
            "--example",
            "5.1",
            "--alpha",
            "2",
            "--omega",
            "1.1",
            "--domain",
            "-20",
            "20",
            "--h",
            "0.2",
            "--tau",
            "0.02",
            "--T",
            "1",
        ]));
        let c = RunConfig::resolve(&a).unwrap();
        assert_eq!(c.problem, Problem::Breather { omega: 1.1 });
        assert_eq!(c.scheme.grid.subintervals(), 200);
        assert_eq!(c.scheme.steps, 50);
        assert_eq!(c.snapshot_stride, 1);
    }

    #[test]
    fn rejects_invalid_values() {
        let a = run_args(parse(&["run", "--T", "0"]));
        let e = RunConfig::resolve(&a).unwrap_err();
        assert_eq!(exit_code(&e), 1);
        let a = run_args(parse(&["run", "--alpha", "2.5"]));
        let e = RunConfig::resolve(&a).unwrap_err();
        assert!(e.to_string().contains("1 < alpha <= 2"));
        let a = run_args(parse(&["run", "--tau", "0.03"]));
        assert!(RunConfig::resolve(&a).is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(
            &p,
            "example = \"5.2\"\nalpha = 1.5\nh = 0.5\ntau = 0.1\nT = 2.0\na = -10.0\nb = 10.0\n",
        )
        .unwrap();
        let a = run_args(parse(&["run", "--config", p.to_str().unwrap(), "--alpha", "1.8"]));
        let c = RunConfig::resolve(&a).unwrap();
        assert_eq!(c.problem, Problem::SechPulse);
        assert_eq!(c.scheme.alpha.value(), 1.8);
        assert_eq!(c.scheme.grid.subintervals(), 40);
        assert_eq!(c.scheme.steps, 20);

        std::fs::write(&p, "alpah = 1.5\n").unwrap();
        let a = run_args(parse(&["run", "--config", p.to_str().unwrap()]));
        assert!(RunConfig::resolve(&a).is_err());
    }

    #[test]
    fn preset_fills_defaults() {
        let a = run_args(parse(&["run", "--preset", "fig4", "--T", "1"]));
        let c = RunConfig::resolve(&a).unwrap();
        assert_eq!(c.problem, Problem::SechPulse);
        assert_eq!(c.scheme.grid.subintervals(), 1600);
        assert_eq!(c.scheme.steps, 20);
        assert_eq!(c.preset.as_deref(), Some("pulse-energy"));
    }

    #[test]
    fn convergence_specs_from_preset() {
        let cli = parse(&["convergence", "--preset", "table1", "--alpha", "1.5,2"]);
        let Command::Convergence(a) = cli.command else { panic!() };
        let specs = ladder_specs(&a).unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].levels, 4);
        assert_eq!(specs[1].problem, Problem::Breather { omega: 1.1 });
    }

    #[test]
    fn empty_bench_sizes_rejected() {
        let args = BenchArgs {
            sizes: Some(vec![]),
            alphas: None,
            taus: None,
            h: None,
            t_final: None,
            reps: None,
            cg_rel_tol: None,
            precond: None,
            out: PathBuf::from("."),
        };
        assert!(matches!(cmd_bench(&args), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
