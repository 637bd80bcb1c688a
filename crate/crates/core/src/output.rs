//! CSV and JSON artifacts. Reals are written in scientific notation with 16
//! significant digits so files diff cleanly across runs and languages.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostics::{EnergySeries, ErrorReport};
use crate::error::{Error, Result};
use crate::operator::GridSpec;
use crate::scheme::{IeqState, Observer, StepReport};

pub fn fmt_real(x: f64) -> String {
    format!("{x:.15e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// `x,U,V,W` on interior nodes.
pub fn write_snapshot(path: &Path, grid: &GridSpec, state: &IeqState) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "x,U,V,W")?;
    for j in 0..state.len() {
        writeln!(
            f,
            "{},{},{},{}",
            fmt_real(grid.node(j + 1)),
            fmt_real(state.u[j]),
            fmt_real(state.v[j]),
            fmt_real(state.w[j])
        )?;
    }
    f.flush()?;
    Ok(())
}

/// `n,t,E,RE`.
pub fn write_energy(path: &Path, series: &EnergySeries) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "n,t,E,RE")?;
    for e in series.entries() {
        writeln!(
            f,
            "{},{},{},{}",
            e.n,
            fmt_real(e.t),
            fmt_real(e.energy),
            fmt_real(e.rel_err)
        )?;
    }
    f.flush()?;
    Ok(())
}

/// `alpha,h,tau,error,order`; the order cell is empty on each ladder's first row.
pub fn write_convergence(path: &Path, reports: &[(f64, ErrorReport)]) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "alpha,h,tau,error,order")?;
    for (alpha, report) in reports {
        for row in &report.rows {
            let order = row.order.map(fmt_real).unwrap_or_default();
            writeln!(
                f,
                "{},{},{},{},{}",
                fmt_real(*alpha),
                fmt_real(row.h),
                fmt_real(row.tau),
                fmt_real(row.error),
                order
            )?;
        }
    }
    f.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub alpha: f64,
    pub m: usize,
    pub h: f64,
    pub tau: f64,
    pub steps: usize,
    pub direct_seconds: f64,
    pub fft_seconds: f64,
    pub max_abs_diff: f64,
}

pub fn write_bench(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "alpha,M,h,tau,steps,direct_seconds,fft_seconds,max_abs_diff")?;
    for r in rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{}",
            fmt_real(r.alpha),
            r.m,
            fmt_real(r.h),
            fmt_real(r.tau),
            r.steps,
            fmt_real(r.direct_seconds),
            fmt_real(r.fft_seconds),
            fmt_real(r.max_abs_diff)
        )?;
    }
    f.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| Error::Serialize(e.to_string()))?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

/// Writes `solution_<n>.csv` every `stride` levels and at the last level.
pub struct SnapshotWriter {
    dir: PathBuf,
    grid: GridSpec,
    stride: usize,
    last: usize,
    pub written: Vec<usize>,
}

impl SnapshotWriter {
    pub fn new(dir: impl Into<PathBuf>, grid: GridSpec, stride: usize, last: usize) -> Self {
        Self {
            dir: dir.into(),
            grid,
            stride: stride.max(1),
            last,
            written: Vec::new(),
        }
    }
}

impl Observer for SnapshotWriter {
    fn observe(&mut self, state: &IeqState, _: &StepReport) -> Result<()> {
        if state.n % self.stride == 0 || state.n == self.last {
            let path = self.dir.join(format!("solution_{}.csv", state.n));
            write_snapshot(&path, &self.grid, state)?;
            self.written.push(state.n);
        }
        Ok(())
    }
}
