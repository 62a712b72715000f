//! C ABI for the `lwweno` solver.
//!
//! Simulations are opaque heap handles created by [`lw_simulation_new`] and
//! released with [`lw_simulation_free`]. Every fallible call returns an
//! [`LwStatus`]; the message of the most recent failure on the calling
//! thread is available from [`lw_last_error`]. Panics never cross the
//! boundary, they are reported as [`LwStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use lwweno::grid::Field;
use lwweno::output::{schlieren, write_dump, SCHLIEREN_KAPPA};
use lwweno::problems::{Problem, ProblemId};
use lwweno::solver::{Integrator, Scheme, SchemeConfig, Simulation};
use lwweno::SolverError;

/// Result codes. `Config` and `Positivity` carry the CLI's exit codes 1 and
/// 2. A failed step or run leaves the handle at its state before the call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwStatus {
    Ok = 0,
    Config = 1,
    Positivity = 2,
    NullArgument = 3,
    InvalidState = 4,
    UnsupportedOrder = 5,
    Io = 6,
    Internal = 7,
}

/// Opaque simulation handle.
pub struct LwSimulation {
    problem: Problem,
    scheme: SchemeConfig,
    field: Field,
    steps: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &SolverError) -> LwStatus {
    match e {
        SolverError::InvalidState(_) => LwStatus::InvalidState,
        SolverError::Positivity(_) => LwStatus::Positivity,
        SolverError::Config(_) => LwStatus::Config,
        SolverError::UnsupportedOrder(_) => LwStatus::UnsupportedOrder,
        SolverError::Io(_) => LwStatus::Io,
    }
}

/// Runs `f`, converting errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), (LwStatus, String)>) -> LwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LwStatus::Internal
        }
    }
}

fn solver(e: SolverError) -> (LwStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (LwStatus, String) {
    (LwStatus::NullArgument, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (LwStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (LwStatus::Config, format!("{what} is not valid UTF-8")))
}

impl LwSimulation {
    fn advance(
        &mut self,
        f: impl FnOnce(&mut Simulation<'_, dyn lwweno::equations::ConservationLaw>) -> lwweno::Result<()>,
    ) -> lwweno::Result<()> {
        let mut sim =
            Simulation::new(self.field.clone(), self.problem.eq.as_ref(), self.problem.bc.clone(), &self.scheme)?;
        sim.steps = self.steps;
        let r = f(&mut sim);
        if r.is_ok() {
            self.field = sim.field;
            self.steps = sim.steps;
        }
        r
    }
}

/// Creates a simulation of `problem` (`advection`, `burgers`, `euler1d`,
/// `euler2d-smooth`, `dmr`) with `scheme` (`rk3`, `lw`, `lwa`, `lwf`,
/// `lwaf`). `ny == 0` selects the problem's default aspect. On success
/// `*out` owns a new handle.
///
/// # Safety
/// `problem` and `scheme` must be NUL-terminated strings; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lw_simulation_new(
    problem: *const c_char,
    scheme: *const c_char,
    space_order: u32,
    time_order: u32,
    nx: u32,
    ny: u32,
    cfl: f64,
    out: *mut *mut LwSimulation,
) -> LwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let id: ProblemId = str_arg(problem, "problem")?.parse().map_err(solver)?;
        let scheme: Scheme = str_arg(scheme, "scheme")?.parse().map_err(solver)?;
        let cfg = SchemeConfig::new(scheme, space_order as usize, time_order as usize, cfl);
        let prob = Problem::new(id).map_err(solver)?;
        let integrator = Integrator::new(&cfg).map_err(solver)?;
        let ny = (ny != 0).then_some(ny as usize);
        let grid = prob.grid(nx as usize, ny, integrator.ghost_width()).map_err(solver)?;
        let field = prob.initial_field(grid).map_err(solver)?;
        let mut handle = LwSimulation { problem: prob, scheme: cfg, field, steps: 0 };
        // validates the configuration and fills ghosts once
        handle.advance(|_| Ok(())).map_err(solver)?;
        *out = Box::into_raw(Box::new(handle));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sim` must come from [`lw_simulation_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lw_simulation_free(sim: *mut LwSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Takes one CFL step, clipped so the time does not pass `t_max`. The step
/// size is written to `delta` when it is non-null.
///
/// # Safety
/// `sim` must be a live handle; `delta` null or valid.
#[no_mangle]
pub unsafe extern "C" fn lw_simulation_step(sim: *mut LwSimulation, t_max: f64, delta: *mut f64) -> LwStatus {
    guard(|| {
        let s = sim.as_mut().ok_or_else(|| null("sim"))?;
        let mut taken = 0.0;
        s.advance(|sim| {
            taken = sim.step(t_max)?.delta;
            Ok(())
        })
        .map_err(solver)?;
        if !delta.is_null() {
            *delta = taken;
        }
        Ok(())
    })
}

/// Marches to `t_end`.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lw_simulation_run_until(sim: *mut LwSimulation, t_end: f64) -> LwStatus {
    guard(|| {
        let s = sim.as_mut().ok_or_else(|| null("sim"))?;
        s.advance(|sim| sim.run_until(t_end, |_, _| Ok(()))).map_err(solver)
    })
}

/// Current simulation time (NaN for a null handle).
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lw_simulation_time(sim: *const LwSimulation) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.field.time)
}

/// Number of steps taken so far (0 for a null handle).
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lw_simulation_steps(sim: *const LwSimulation) -> u64 {
    sim.as_ref().map_or(0, |s| s.steps as u64)
}

/// Interior node counts and number of conserved components.
///
/// # Safety
/// `sim` must be a live handle; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lw_simulation_shape(
    sim: *const LwSimulation,
    nx: *mut usize,
    ny: *mut usize,
    ncomp: *mut usize,
) -> LwStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        if nx.is_null() || ny.is_null() || ncomp.is_null() {
            return Err(null("shape output"));
        }
        let g = s.field.grid();
        (*nx, *ny, *ncomp) = (g.n(0), g.n(1), s.field.ncomp());
        Ok(())
    })
}

/// Copies interior component `c` (row-major, x fastest) into `buf`, which
/// must hold exactly `nx * ny` values.
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn lw_simulation_component(
    sim: *const LwSimulation,
    c: usize,
    buf: *mut f64,
    len: usize,
) -> LwStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if c >= s.field.ncomp() {
            return Err((LwStatus::Config, format!("component {c} out of range")));
        }
        let values = s.field.interior_component(c);
        if values.len() != len {
            return Err((LwStatus::Config, format!("buffer holds {len} values, need {}", values.len())));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, len);
        Ok(())
    })
}

/// Writes the current state in the CLI's dump format into `dir` (created if
/// missing), adding a schlieren image for 2D gas dynamics.
///
/// # Safety
/// `sim` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lw_simulation_dump(sim: *const LwSimulation, dir: *const c_char) -> LwStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        let dir = Path::new(str_arg(dir, "dir")?);
        let f = &s.field;
        let result = if f.grid().dim() == 2 && f.ncomp() == 4 {
            let img = schlieren(f, SCHLIEREN_KAPPA);
            write_dump(dir, f, &[("schlieren", &img)])
        } else {
            write_dump(dir, f, &[])
        };
        result.map(|_| ()).map_err(solver)
    })
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
