//! C interface to the `revival` library.
//!
//! Objects are handed out as opaque pointers and released with the matching
//! `*_free` function. Every call returns a [`RevivalStatus`]; on failure the
//! message is available from [`revival_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_rational::Rational64;
use revival::config::JobConfig;
use revival::eigensolve::{discretize, lowest_eigenvalues, verify_design, Stencil};
use revival::evolve::autocorrelation;
use revival::pipeline::Job;
use revival::potential::SampledPotential;
use revival::spectra::{self, Origin, RationalLevelSet};
use revival::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RevivalStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Pole = 4,
    IntegratorTolerance = 5,
    LevelNotBelowGround = 6,
    DegenerateLevel = 7,
    NonConvergence = 8,
    Singular = 9,
    Incommensurate = 10,
    GridMismatch = 11,
    Io = 12,
    BufferTooSmall = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RevivalStencil {
    ThreePoint = 0,
    FivePoint = 1,
}

impl From<RevivalStencil> for Stencil {
    fn from(s: RevivalStencil) -> Self {
        match s {
            RevivalStencil::ThreePoint => Stencil::ThreePoint,
            RevivalStencil::FivePoint => Stencil::FivePoint,
        }
    }
}

/// `E_n = a·N_n + b` with `a`, `b` as reduced fractions.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RevivalParams {
    pub a_num: i64,
    pub a_den: i64,
    pub b_num: i64,
    pub b_den: i64,
    pub t_rev: f64,
}

/// Exact level set.
pub struct RevivalLevels(RationalLevelSet);

/// Sampled potential on a uniform grid.
pub struct RevivalPotential(SampledPotential);

/// A fully resolved job description.
pub struct RevivalJob(Job);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> RevivalStatus {
    match e {
        Error::InvalidArgument(_) => RevivalStatus::InvalidArgument,
        Error::PoleDetected { .. } => RevivalStatus::Pole,
        Error::ToleranceFailure { .. } => RevivalStatus::IntegratorTolerance,
        Error::LevelNotBelowGround { .. } => RevivalStatus::LevelNotBelowGround,
        Error::DegenerateLevel(_) => RevivalStatus::DegenerateLevel,
        Error::DesignStep { source, .. } => status_of(source),
        Error::GridMismatch => RevivalStatus::GridMismatch,
        Error::NonConvergence { .. } => RevivalStatus::NonConvergence,
        Error::Singular(_) => RevivalStatus::Singular,
        Error::Incommensurate(..) => RevivalStatus::Incommensurate,
        Error::Parse(_) => RevivalStatus::Parse,
        Error::Io(_) => RevivalStatus::Io,
    }
}

enum Fail {
    Status(RevivalStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(RevivalStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RevivalStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RevivalStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_last_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            let status = status_of(&e);
            set_last_error(e.to_string());
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            RevivalStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(RevivalStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

fn stencil_of(raw: i32) -> Result<RevivalStencil, Fail> {
    match raw {
        0 => Ok(RevivalStencil::ThreePoint),
        1 => Ok(RevivalStencil::FivePoint),
        other => Err(Fail::Status(RevivalStatus::InvalidArgument, format!("unknown stencil {other}"))),
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn revival_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn revival_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

// ---- level sets ----

fn emit_levels(set: revival::Result<RationalLevelSet>, out: *mut *mut RevivalLevels) -> Result<(), Fail> {
    let out = unsafe { out_ptr(out, "out") }?;
    *out = boxed(RevivalLevels(set?));
    Ok(())
}

/// Levels `num[i]/den[i]`; they must be strictly increasing.
///
/// # Safety
/// `num` and `den` point to `len` values; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_levels_new(
    num: *const i64,
    den: *const i64,
    len: usize,
    out: *mut *mut RevivalLevels,
) -> RevivalStatus {
    guard(|| {
        let num = slice(num, len, "num")?;
        let den = slice(den, len, "den")?;
        let mut levels = Vec::with_capacity(len);
        for (&p, &q) in num.iter().zip(den) {
            if q == 0 {
                return Err(Fail::Status(RevivalStatus::InvalidArgument, "zero denominator".into()));
            }
            levels.push(Rational64::new(p, q));
        }
        emit_levels(RationalLevelSet::new(levels, Origin::Custom), out)
    })
}

/// The lowest `count` levels `n + 1/2` of the harmonic oscillator.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_levels_harmonic(count: usize, out: *mut *mut RevivalLevels) -> RevivalStatus {
    guard(|| emit_levels(spectra::harmonic_levels(count), out))
}

/// `n_added` levels spaced by 2 below the ground, then `harmonic_count`
/// oscillator levels.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_levels_biperiodic(
    n_added: usize,
    harmonic_count: usize,
    out: *mut *mut RevivalLevels,
) -> RevivalStatus {
    guard(|| emit_levels(spectra::biperiodic_levels(n_added, harmonic_count), out))
}

/// The first `count` primes.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_levels_primes(count: usize, out: *mut *mut RevivalLevels) -> RevivalStatus {
    guard(|| emit_levels(spectra::prime_levels(count).map(|(set, _)| set), out))
}

/// `count` distinct Fibonacci numbers starting at 1.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_levels_fibonacci(count: usize, out: *mut *mut RevivalLevels) -> RevivalStatus {
    guard(|| emit_levels(spectra::fibonacci_levels(count), out))
}

/// # Safety
/// `levels` is a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn revival_levels_len(levels: *const RevivalLevels) -> usize {
    levels.as_ref().map_or(0, |l| l.0.len())
}

/// Level `index` as a reduced fraction.
///
/// # Safety
/// `levels` is a live handle; `num` and `den` are writable.
#[no_mangle]
pub unsafe extern "C" fn revival_levels_get(
    levels: *const RevivalLevels,
    index: usize,
    num: *mut i64,
    den: *mut i64,
) -> RevivalStatus {
    guard(|| {
        let set = &as_ref(levels, "levels")?.0;
        let level = set.levels().get(index).ok_or_else(|| {
            Fail::Status(RevivalStatus::InvalidArgument, format!("index {index} out of range 0..{}", set.len()))
        })?;
        *out_ptr(num, "num")? = *level.numer();
        *out_ptr(den, "den")? = *level.denom();
        Ok(())
    })
}

/// Revival spacing, offset and period of a level set.
///
/// # Safety
/// `levels` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_levels_params(
    levels: *const RevivalLevels,
    out: *mut RevivalParams,
) -> RevivalStatus {
    guard(|| {
        let p = spectra::revival_params(&as_ref(levels, "levels")?.0);
        *out_ptr(out, "out")? = RevivalParams {
            a_num: *p.a.numer(),
            a_den: *p.a.denom(),
            b_num: *p.b.numer(),
            b_den: *p.b.denom(),
            t_rev: p.t_rev(),
        };
        Ok(())
    })
}

/// # Safety
/// `levels` came from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn revival_levels_free(levels: *mut RevivalLevels) {
    if !levels.is_null() {
        drop(Box::from_raw(levels));
    }
}

// ---- jobs ----

/// Parses a TOML job description and fills in every default.
///
/// # Safety
/// `toml` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_job_from_toml(toml: *const c_char, out: *mut *mut RevivalJob) -> RevivalStatus {
    guard(|| {
        let cfg = JobConfig::parse(c_str(toml, "toml")?)?;
        let job = Job::from_config(&cfg)?;
        *out_ptr(out, "out")? = boxed(RevivalJob(job));
        Ok(())
    })
}

/// Copy of the job's target level set.
///
/// # Safety
/// `job` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_job_levels(job: *const RevivalJob, out: *mut *mut RevivalLevels) -> RevivalStatus {
    guard(|| {
        let job = &as_ref(job, "job")?.0;
        *out_ptr(out, "out")? = boxed(RevivalLevels(job.target.clone()));
        Ok(())
    })
}

/// Builds the designed potential.
///
/// # Safety
/// `job` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_job_design(job: *const RevivalJob, out: *mut *mut RevivalPotential) -> RevivalStatus {
    guard(|| {
        let v = as_ref(job, "job")?.0.design()?;
        *out_ptr(out, "out")? = boxed(RevivalPotential(v));
        Ok(())
    })
}

/// Autocorrelation `A(t)` of the job's packet in `potential` at `n` times.
/// `residual` (optional) receives the norm of the discarded continuum part.
///
/// # Safety
/// `times`, `re` and `im` hold `n` values; handles are live.
#[no_mangle]
pub unsafe extern "C" fn revival_job_autocorrelation(
    job: *const RevivalJob,
    potential: *const RevivalPotential,
    times: *const f64,
    n: usize,
    re: *mut f64,
    im: *mut f64,
    residual: *mut f64,
) -> RevivalStatus {
    guard(|| {
        let job = &as_ref(job, "job")?.0;
        let v = &as_ref(potential, "potential")?.0;
        let times = slice(times, n, "times")?;
        let re = slice_mut(re, n, "re")?;
        let im = slice_mut(im, n, "im")?;
        let evo = job.evolve(v)?;
        for ((a, r), i) in autocorrelation(&evo.decomposition, times).into_iter().zip(re).zip(im) {
            *r = a.re;
            *i = a.im;
        }
        if let Some(out) = residual.as_mut() {
            *out = evo.discarded_residual;
        }
        Ok(())
    })
}

/// # Safety
/// `job` came from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn revival_job_free(job: *mut RevivalJob) {
    if !job.is_null() {
        drop(Box::from_raw(job));
    }
}

// ---- potentials ----

/// Reads an `x,V` CSV written by the design step.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_potential_read_csv(
    path: *const c_char,
    out: *mut *mut RevivalPotential,
) -> RevivalStatus {
    guard(|| {
        let v = SampledPotential::read(std::path::Path::new(c_str(path, "path")?))?;
        *out_ptr(out, "out")? = boxed(RevivalPotential(v));
        Ok(())
    })
}

/// # Safety
/// `potential` is a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn revival_potential_len(potential: *const RevivalPotential) -> usize {
    potential.as_ref().map_or(0, |v| v.0.grid().len())
}

/// Copies grid points and values; both buffers must hold `len` entries, and
/// `len` must equal the number of grid points.
///
/// # Safety
/// `x` and `v` are writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn revival_potential_samples(
    potential: *const RevivalPotential,
    x: *mut f64,
    v: *mut f64,
    len: usize,
) -> RevivalStatus {
    guard(|| {
        let pot = &as_ref(potential, "potential")?.0;
        let n = pot.grid().len();
        if len != n {
            return Err(Fail::Status(
                RevivalStatus::BufferTooSmall,
                format!("buffers hold {len} values, grid has {n}"),
            ));
        }
        let x = slice_mut(x, len, "x")?;
        let v = slice_mut(v, len, "v")?;
        for (k, (xo, vo)) in x.iter_mut().zip(v.iter_mut()).enumerate() {
            *xo = pot.grid().x(k);
            *vo = pot.values()[k];
        }
        Ok(())
    })
}

/// Evaluates the potential anywhere inside the grid.
///
/// # Safety
/// `potential` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn revival_potential_eval(
    potential: *const RevivalPotential,
    x: f64,
    out: *mut f64,
) -> RevivalStatus {
    guard(|| {
        *out_ptr(out, "out")? = as_ref(potential, "potential")?.0.eval(x);
        Ok(())
    })
}

/// The `k` lowest eigenvalues with Dirichlet ends. `stencil` is a
/// `RevivalStencil` value.
///
/// # Safety
/// `out` is writable for `k` values.
#[no_mangle]
pub unsafe extern "C" fn revival_potential_eigenvalues(
    potential: *const RevivalPotential,
    stencil: i32,
    k: usize,
    out: *mut f64,
) -> RevivalStatus {
    guard(|| {
        let v = &as_ref(potential, "potential")?.0;
        let h = discretize(v, stencil_of(stencil)?.into());
        let values = lowest_eigenvalues(&h, k)?;
        slice_mut(out, k, "out")?.copy_from_slice(&values);
        Ok(())
    })
}

/// Compares the computed spectrum with `levels`. `max_error` and `passed`
/// are written even when the tolerance is missed; the status is then still
/// `Ok`.
///
/// # Safety
/// Handles are live; `max_error` and `passed` are writable.
#[no_mangle]
pub unsafe extern "C" fn revival_potential_verify(
    potential: *const RevivalPotential,
    levels: *const RevivalLevels,
    tolerance: f64,
    stencil: i32,
    max_error: *mut f64,
    passed: *mut bool,
) -> RevivalStatus {
    guard(|| {
        let v = &as_ref(potential, "potential")?.0;
        let set = &as_ref(levels, "levels")?.0;
        let report = verify_design(v, set, tolerance, stencil_of(stencil)?.into())?;
        *out_ptr(max_error, "max_error")? = report.max_error;
        *out_ptr(passed, "passed")? = report.passed;
        Ok(())
    })
}

/// # Safety
/// `potential` came from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn revival_potential_free(potential: *mut RevivalPotential) {
    if !potential.is_null() {
        drop(Box::from_raw(potential));
    }
}
