//! C ABI over `piobs`.
//!
//! Systems and observers are opaque heap handles created by `*_new` /
//! `piobs_design` and released with the matching `*_free`. Matrices cross
//! the boundary as row-major `double` arrays. Every function returns a
//! [`PiobsStatus`]; on failure a description is available from
//! [`piobs_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use piobs::analysis::{is_detectable, is_observable};
use piobs::design::DEFAULT_PHI_SCALE;
use piobs::linalg::spectral_radius;
use piobs::sim::step_observer;
use piobs::{
    design_pi_observer, ComplexScalar, DesignConfig, Error, PiObserver, RealMatrix, SystemRealization, Tolerances,
};

/// Result code of every call. Values match the command-line exit codes
/// where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiobsStatus {
    Ok = 0,
    /// The pair is not detectable; see [`piobs_last_witness`].
    Infeasible = 2,
    /// Bad dimensions, non-finite data or an invalid option.
    InvalidInput = 3,
    /// A numerical step failed.
    Numerical = 4,
    NullPointer = 5,
    /// The output buffer is shorter than required.
    BufferTooSmall = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

/// Opaque plant `(A, B, C)`.
pub struct PiobsSystem(SystemRealization);

/// Opaque designed observer.
pub struct PiobsObserver(PiObserver);

/// Design options. Obtain defaults from [`piobs_design_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PiobsDesignOptions {
    /// Required stability margin of the augmented matrix, in `[0, 1)`.
    pub margin: f64,
    pub seed: u64,
    /// `Φ = phi_scalar·I_p`.
    pub phi_scalar: f64,
    /// Number of target poles; 0 selects the default targets.
    pub pole_count: usize,
    /// Real and imaginary parts, `pole_count` entries each.
    pub poles_re: *const f64,
    pub poles_im: *const f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
    static LAST_WITNESS: RefCell<Vec<ComplexScalar>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(e: &Error) -> PiobsStatus {
    set_error(e.to_string());
    match e.exit_code() {
        2 => PiobsStatus::Infeasible,
        3 => PiobsStatus::InvalidInput,
        _ => PiobsStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> PiobsStatus) -> PiobsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == PiobsStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => {
            set_error("internal panic");
            PiobsStatus::Internal
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return PiobsStatus::NullPointer;
        })+
    };
}

/// # Safety
/// `data` must point to `rows·cols` readable doubles (or be null when that
/// product is 0).
unsafe fn read_matrix(data: *const f64, rows: usize, cols: usize) -> RealMatrix {
    if rows * cols == 0 {
        return RealMatrix::zeros(rows, cols);
    }
    let slice = std::slice::from_raw_parts(data, rows * cols);
    RealMatrix::from_row_slice(rows, cols, slice).expect("length matches shape")
}

/// # Safety
/// `out` must point to `len` writable doubles.
unsafe fn write_slice(src: &[f64], out: *mut f64, len: usize) -> PiobsStatus {
    if len < src.len() {
        set_error(format!("buffer holds {len} values, {} required", src.len()));
        return PiobsStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    PiobsStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn piobs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a
/// successful call. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn piobs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Copies the witness eigenvalues of the last infeasible design on this
/// thread. `*count` receives the number available; at most `capacity`
/// are written.
///
/// # Safety
/// `re` and `im` must hold `capacity` doubles; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn piobs_last_witness(re: *mut f64, im: *mut f64, capacity: usize, count: *mut usize) -> PiobsStatus {
    non_null!(count);
    let witness = LAST_WITNESS.with(|w| w.borrow().clone());
    *count = witness.len();
    if capacity > 0 {
        non_null!(re, im);
    }
    for (i, z) in witness.iter().take(capacity).enumerate() {
        *re.add(i) = z.re;
        *im.add(i) = z.im;
    }
    PiobsStatus::Ok
}

/// Builds a plant from row-major `A` (`n×n`), `B` (`n×m`) and `C` (`p×n`).
/// `C` must have full row rank.
///
/// # Safety
/// The arrays must hold the stated number of doubles; `out` must be
/// writable. The handle is released with [`piobs_system_free`].
#[no_mangle]
pub unsafe extern "C" fn piobs_system_new(
    n: usize,
    m: usize,
    p: usize,
    a: *const f64,
    b: *const f64,
    c: *const f64,
    out: *mut *mut PiobsSystem,
) -> PiobsStatus {
    non_null!(out);
    *out = ptr::null_mut();
    if n * n > 0 {
        non_null!(a);
    }
    if n * m > 0 {
        non_null!(b);
    }
    if p * n > 0 {
        non_null!(c);
    }
    guard(|| {
        let built = SystemRealization::new(
            read_matrix(a, n, n),
            read_matrix(b, n, m),
            read_matrix(c, p, n),
            Tolerances::default().rank,
        );
        match built {
            Ok(sys) => {
                *out = Box::into_raw(Box::new(PiobsSystem(sys)));
                PiobsStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `system` must come from [`piobs_system_new`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn piobs_system_free(system: *mut PiobsSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// # Safety
/// `system` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn piobs_system_dims(
    system: *const PiobsSystem,
    n: *mut usize,
    m: *mut usize,
    p: *mut usize,
) -> PiobsStatus {
    non_null!(system, n, m, p);
    let sys = &(*system).0;
    *n = sys.n();
    *m = sys.m();
    *p = sys.p();
    PiobsStatus::Ok
}

/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn piobs_is_detectable(system: *const PiobsSystem, out: *mut bool) -> PiobsStatus {
    non_null!(system, out);
    guard(|| {
        let sys = &(*system).0;
        match is_detectable(sys.a(), sys.c(), &Tolerances::default()) {
            Ok(v) => {
                *out = v.detectable;
                LAST_WITNESS.with(|w| *w.borrow_mut() = v.witness);
                PiobsStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn piobs_is_observable(system: *const PiobsSystem, out: *mut bool) -> PiobsStatus {
    non_null!(system, out);
    guard(|| {
        let sys = &(*system).0;
        match is_observable(sys.a(), sys.c(), &Tolerances::default()) {
            Ok(v) => {
                *out = v.observable;
                PiobsStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Defaults: margin `1e-6`, seed `0x5EED`, `Φ = 0.5·I`, default targets.
#[no_mangle]
pub extern "C" fn piobs_design_options_default() -> PiobsDesignOptions {
    let cfg = DesignConfig::default();
    PiobsDesignOptions {
        margin: cfg.margin,
        seed: cfg.seed,
        phi_scalar: DEFAULT_PHI_SCALE,
        pole_count: 0,
        poles_re: ptr::null(),
        poles_im: ptr::null(),
    }
}

/// Designs a proportional-integral observer. `options` may be null for the
/// defaults. On [`PiobsStatus::Infeasible`] the offending eigenvalues are
/// available from [`piobs_last_witness`].
///
/// # Safety
/// `system` must be a live handle, `options` null or valid (with its pole
/// arrays holding `pole_count` doubles), `out` writable. The handle is
/// released with [`piobs_observer_free`].
#[no_mangle]
pub unsafe extern "C" fn piobs_design(
    system: *const PiobsSystem,
    options: *const PiobsDesignOptions,
    out: *mut *mut PiobsObserver,
) -> PiobsStatus {
    non_null!(system, out);
    *out = ptr::null_mut();
    let opts = if options.is_null() { piobs_design_options_default() } else { *options };
    if opts.pole_count > 0 {
        let (poles_re, poles_im) = (opts.poles_re, opts.poles_im);
        non_null!(poles_re, poles_im);
    }
    guard(|| {
        let sys = &(*system).0;
        let mut cfg = DesignConfig {
            margin: opts.margin,
            seed: opts.seed,
            phi: Some(RealMatrix::scalar(sys.p(), opts.phi_scalar)),
            ..DesignConfig::default()
        };
        if opts.pole_count > 0 {
            let re = std::slice::from_raw_parts(opts.poles_re, opts.pole_count);
            let im = std::slice::from_raw_parts(opts.poles_im, opts.pole_count);
            cfg.target_poles = Some(re.iter().zip(im).map(|(&r, &i)| ComplexScalar::new(r, i)).collect());
        }
        LAST_WITNESS.with(|w| w.borrow_mut().clear());
        match design_pi_observer(sys, &cfg) {
            Ok(obs) => {
                *out = Box::into_raw(Box::new(PiobsObserver(obs)));
                PiobsStatus::Ok
            }
            Err(e) => {
                if let Error::Infeasible { witness } = &e {
                    LAST_WITNESS.with(|w| *w.borrow_mut() = witness.clone());
                }
                fail(&e)
            }
        }
    })
}

/// # Safety
/// `observer` must come from [`piobs_design`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn piobs_observer_free(observer: *mut PiobsObserver) {
    if !observer.is_null() {
        drop(Box::from_raw(observer));
    }
}

/// Copies the proportional gain `L` (`n×p`, row-major) into `out`.
///
/// # Safety
/// `observer` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn piobs_observer_gain_l(observer: *const PiobsObserver, out: *mut f64, len: usize) -> PiobsStatus {
    non_null!(observer, out);
    write_slice((*observer).0.l.as_slice(), out, len)
}

/// Copies the integral gain `F` (`n×p`, row-major) into `out`.
///
/// # Safety
/// As [`piobs_observer_gain_l`].
#[no_mangle]
pub unsafe extern "C" fn piobs_observer_gain_f(observer: *const PiobsObserver, out: *mut f64, len: usize) -> PiobsStatus {
    non_null!(observer, out);
    write_slice((*observer).0.f.as_slice(), out, len)
}

/// Copies the stabilizing injection `K` (`n×p`, row-major) into `out`.
///
/// # Safety
/// As [`piobs_observer_gain_l`].
#[no_mangle]
pub unsafe extern "C" fn piobs_observer_gain_k(observer: *const PiobsObserver, out: *mut f64, len: usize) -> PiobsStatus {
    non_null!(observer, out);
    write_slice((*observer).0.k.as_slice(), out, len)
}

/// Spectral radius of the augmented error matrix `[[A − LC, F], [−C, I]]`.
///
/// # Safety
/// `observer` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn piobs_observer_spectral_radius(observer: *const PiobsObserver, out: *mut f64) -> PiobsStatus {
    non_null!(observer, out);
    guard(|| {
        let radius = (*observer).0.augmented().and_then(|aug| spectral_radius(aug.matrix()));
        match radius {
            Ok(r) => {
                *out = r;
                PiobsStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// One observer update: `x̂⁺ = A·x̂ + L·(y − C·x̂) + B·u + F·v`,
/// `v⁺ = v + y − C·x̂`. Lengths are `n` for `xhat`, `p` for `v` and `y`,
/// `m` for `u`; the outputs may alias the inputs.
///
/// # Safety
/// Every array must hold its stated length; `u` may be null when `m = 0`.
#[no_mangle]
pub unsafe extern "C" fn piobs_observer_step(
    observer: *const PiobsObserver,
    xhat: *const f64,
    v: *const f64,
    y: *const f64,
    u: *const f64,
    xhat_next: *mut f64,
    v_next: *mut f64,
) -> PiobsStatus {
    non_null!(observer, xhat, v, y, xhat_next, v_next);
    let obs = &(*observer).0;
    let (n, m, p) = (obs.n(), obs.system.m(), obs.p());
    if m > 0 {
        non_null!(u);
    }
    guard(|| {
        let xhat = std::slice::from_raw_parts(xhat, n).to_vec();
        let v = std::slice::from_raw_parts(v, p).to_vec();
        let y = std::slice::from_raw_parts(y, p).to_vec();
        let u = if m == 0 { Vec::new() } else { std::slice::from_raw_parts(u, m).to_vec() };
        match step_observer(&obs.system, obs, &xhat, &v, &y, &u) {
            Ok((x1, v1)) => {
                ptr::copy_nonoverlapping(x1.as_ptr(), xhat_next, n);
                ptr::copy_nonoverlapping(v1.as_ptr(), v_next, p);
                PiobsStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
