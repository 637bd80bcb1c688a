//! C ABI over `fracsg`.
//!
//! Every function returns an [`FsgStatus`]; on failure a message is stored per
//! thread and can be read with [`fsg_last_error`]. Objects are opaque handles
//! created by `*_new` and released with the matching `*_free`. Arrays are
//! passed as pointer plus length and are never retained.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fracsg::{
    discrete_energy, exact_breather, Error, FracOperator, FractionalOrder, GridSpec, PrecondKind, Problem,
    SchemeConfig, Simulation, SolveConfig, SolveMethod, SymbolKernel,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    Numerical = 4,
    Panic = 5,
}

pub const FSG_METHOD_CG: u32 = 0;
pub const FSG_METHOD_DIRECT: u32 = 1;
pub const FSG_PRECOND_NONE: u32 = 0;
pub const FSG_PRECOND_CIRCULANT: u32 = 1;
pub const FSG_PROBLEM_BREATHER: u32 = 0;
pub const FSG_PROBLEM_SECH_PULSE: u32 = 1;

/// Flat scheme configuration. Fill with [`fsg_scheme_config_default`] and
/// override fields as needed. `cg_max_iter = 0` means ten times the number of
/// unknowns.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FsgSchemeConfig {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub subintervals: usize,
    pub t_final: f64,
    pub steps: usize,
    pub method: u32,
    pub precond: u32,
    pub cg_rel_tol: f64,
    pub cg_max_iter: usize,
    pub startup_tol: f64,
    pub startup_max_iter: usize,
}

/// Discrete fractional Laplacian on a uniform grid.
pub struct FsgOperator {
    inner: FracOperator,
}

/// Time-stepping state for one run.
pub struct FsgSimulation {
    inner: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn status_of(e: &Error) -> FsgStatus {
    match e {
        Error::LengthMismatch { .. } => FsgStatus::LengthMismatch,
        e if e.is_numerical() => FsgStatus::Numerical,
        _ => FsgStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FsgStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FsgStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            FsgStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            FsgStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

fn check_len(expected: usize, got: usize) -> Result<(), Failure> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got }.into())
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fsg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn fsg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Writes `c_0 .. c_{len-1}` of the fractional centered-difference kernel.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fsg_kernel_coefficients(alpha: f64, out: *mut f64, len: usize) -> FsgStatus {
    guard(|| {
        let dst = slice_mut(out, len, "out")?;
        let k = SymbolKernel::generate(FractionalOrder::new(alpha)?, len)?;
        dst.copy_from_slice(k.coeffs());
        Ok(())
    })
}

/// Breather solution of the classical equation at `(x, t)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fsg_exact_breather(x: f64, t: f64, omega: f64, out: *mut f64) -> FsgStatus {
    guard(|| {
        let dst = self::out(out, "out")?;
        *dst = exact_breather(x, t, omega)?;
        Ok(())
    })
}

/// Creates the operator for `alpha` on `(a, b)` split into `subintervals` cells.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to free with
/// [`fsg_operator_free`].
#[no_mangle]
pub unsafe extern "C" fn fsg_operator_new(
    alpha: f64,
    a: f64,
    b: f64,
    subintervals: usize,
    out: *mut *mut FsgOperator,
) -> FsgStatus {
    guard(|| {
        let dst = self::out(out, "out")?;
        let inner = FracOperator::new(FractionalOrder::new(alpha)?, GridSpec::new(a, b, subintervals)?)?;
        *dst = Box::into_raw(Box::new(FsgOperator { inner }));
        Ok(())
    })
}

/// # Safety
/// `op` must be NULL or a handle from [`fsg_operator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fsg_operator_free(op: *mut FsgOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Number of interior unknowns.
///
/// # Safety
/// `op` and `len` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fsg_operator_len(op: *const FsgOperator, len: *mut usize) -> FsgStatus {
    guard(|| {
        let op = op.as_ref().ok_or(Failure::Null("op"))?;
        *self::out(len, "len")? = op.inner.len();
        Ok(())
    })
}

/// Circulant embedding length used by the FFT path.
///
/// # Safety
/// `op` and `len` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fsg_operator_embedding_len(op: *const FsgOperator, len: *mut usize) -> FsgStatus {
    guard(|| {
        let op = op.as_ref().ok_or(Failure::Null("op"))?;
        *self::out(len, "len")? = op.inner.embedding_len();
        Ok(())
    })
}

/// `out = h^{-alpha} C u`, through the FFT path when `use_fft` is nonzero and
/// the dense O(n²) path otherwise.
///
/// # Safety
/// `u` and `out` must each point to `len` doubles; they may not overlap.
#[no_mangle]
pub unsafe extern "C" fn fsg_operator_apply(
    op: *const FsgOperator,
    u: *const f64,
    out: *mut f64,
    len: usize,
    use_fft: i32,
) -> FsgStatus {
    guard(|| {
        let op = &op.as_ref().ok_or(Failure::Null("op"))?.inner;
        check_len(op.len(), len)?;
        let u = slice(u, len, "u")?;
        let dst = slice_mut(out, len, "out")?;
        let r = if use_fft != 0 {
            op.apply_fft(u)?
        } else {
            op.apply_dense(u)?
        };
        dst.copy_from_slice(&r);
        Ok(())
    })
}

/// `h^{1-alpha} uᵀ C u`.
///
/// # Safety
/// `u` must point to `len` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsg_operator_seminorm_sq(
    op: *const FsgOperator,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> FsgStatus {
    guard(|| {
        let op = &op.as_ref().ok_or(Failure::Null("op"))?.inner;
        check_len(op.len(), len)?;
        *self::out(out, "out")? = op.energy_seminorm_sq(slice(u, len, "u")?)?;
        Ok(())
    })
}

/// Defaults: alpha 2 on (-20, 20) with 200 cells, T = 1 in 50 steps, CG with
/// relative tolerance 1e-12.
///
/// # Safety
/// `cfg` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fsg_scheme_config_default(cfg: *mut FsgSchemeConfig) -> FsgStatus {
    guard(|| {
        let solve = SolveConfig::default();
        *self::out(cfg, "cfg")? = FsgSchemeConfig {
            alpha: 2.0,
            a: -20.0,
            b: 20.0,
            subintervals: 200,
            t_final: 1.0,
            steps: 50,
            method: FSG_METHOD_CG,
            precond: FSG_PRECOND_NONE,
            cg_rel_tol: solve.cg_rel_tol,
            cg_max_iter: 0,
            startup_tol: 1e-14,
            startup_max_iter: 200,
        };
        Ok(())
    })
}

fn scheme_config(c: &FsgSchemeConfig) -> Result<SchemeConfig, Failure> {
    let grid = GridSpec::new(c.a, c.b, c.subintervals)?;
    let mut cfg = SchemeConfig::new(grid, FractionalOrder::new(c.alpha)?, c.t_final, c.steps)?;
    let method = match c.method {
        FSG_METHOD_CG => SolveMethod::Cg,
        FSG_METHOD_DIRECT => SolveMethod::Direct,
        m => return Err(Error::InvalidConfig(format!("unknown solve method {m}")).into()),
    };
    let precond = match c.precond {
        FSG_PRECOND_NONE => PrecondKind::None,
        FSG_PRECOND_CIRCULANT => PrecondKind::Circulant,
        p => return Err(Error::InvalidConfig(format!("unknown preconditioner {p}")).into()),
    };
    cfg.solve = SolveConfig {
        method,
        precond,
        cg_rel_tol: c.cg_rel_tol,
        cg_max_iter: (c.cg_max_iter > 0).then_some(c.cg_max_iter),
    };
    cfg.startup_tol = c.startup_tol;
    cfg.startup_max_iter = c.startup_max_iter;
    cfg.validate()?;
    Ok(cfg)
}

/// Starts a run of `problem` (`FSG_PROBLEM_*`); `omega` is used by the breather.
///
/// # Safety
/// `cfg` and `out` must be valid pointers; on success `*out` must later be
/// released with [`fsg_simulation_free`].
#[no_mangle]
pub unsafe extern "C" fn fsg_simulation_new(
    cfg: *const FsgSchemeConfig,
    problem: u32,
    omega: f64,
    out: *mut *mut FsgSimulation,
) -> FsgStatus {
    guard(|| {
        let cfg = scheme_config(cfg.as_ref().ok_or(Failure::Null("cfg"))?)?;
        let dst = self::out(out, "out")?;
        let problem = match problem {
            FSG_PROBLEM_BREATHER => Problem::breather(omega)?,
            FSG_PROBLEM_SECH_PULSE => Problem::SechPulse,
            p => return Err(Error::InvalidConfig(format!("unknown problem {p}")).into()),
        };
        let inner = Simulation::new(&problem, cfg)?;
        *dst = Box::into_raw(Box::new(FsgSimulation { inner }));
        Ok(())
    })
}

/// # Safety
/// `sim` must be NULL or a handle from [`fsg_simulation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fsg_simulation_free(sim: *mut FsgSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances by at most `count` steps, stopping at the final time. Writes the
/// number of steps taken to `taken` when it is not NULL.
///
/// # Safety
/// `sim` must be a valid handle; `taken` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn fsg_simulation_step(sim: *mut FsgSimulation, count: usize, taken: *mut usize) -> FsgStatus {
    guard(|| {
        let sim = &mut sim.as_mut().ok_or(Failure::Null("sim"))?.inner;
        let mut k = 0;
        let result = (|| {
            while k < count && !sim.is_finished() {
                sim.step()?;
                k += 1;
            }
            Ok::<(), Error>(())
        })();
        if let Some(t) = taken.as_mut() {
            *t = k;
        }
        result.map_err(Failure::from)
    })
}

/// Current level index, time and whether the final time has been reached.
///
/// # Safety
/// `sim` must be a valid handle; each output pointer may be NULL.
#[no_mangle]
pub unsafe extern "C" fn fsg_simulation_status(
    sim: *const FsgSimulation,
    level: *mut usize,
    time: *mut f64,
    finished: *mut i32,
) -> FsgStatus {
    guard(|| {
        let sim = &sim.as_ref().ok_or(Failure::Null("sim"))?.inner;
        if let Some(l) = level.as_mut() {
            *l = sim.state().n;
        }
        if let Some(t) = time.as_mut() {
            *t = sim.state().t;
        }
        if let Some(f) = finished.as_mut() {
            *f = i32::from(sim.is_finished());
        }
        Ok(())
    })
}

/// Copies the current `U`, `V`, `W` (any of them may be NULL to skip).
///
/// # Safety
/// `sim` must be a valid handle; non-NULL arrays must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fsg_simulation_state(
    sim: *const FsgSimulation,
    u: *mut f64,
    v: *mut f64,
    w: *mut f64,
    len: usize,
) -> FsgStatus {
    guard(|| {
        let state = sim.as_ref().ok_or(Failure::Null("sim"))?.inner.state();
        check_len(state.len(), len)?;
        for (p, src) in [(u, &state.u), (v, &state.v), (w, &state.w)] {
            if !p.is_null() {
                std::slice::from_raw_parts_mut(p, len).copy_from_slice(src);
            }
        }
        Ok(())
    })
}

/// Discrete energy of the current level.
///
/// # Safety
/// `sim` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fsg_simulation_energy(sim: *const FsgSimulation, out: *mut f64) -> FsgStatus {
    guard(|| {
        let sim = &sim.as_ref().ok_or(Failure::Null("sim"))?.inner;
        *self::out(out, "out")? = discrete_energy(sim.state(), sim.operator())?;
        Ok(())
    })
}
