//! C ABI over `fbmre`.
//!
//! Every fallible call returns an `FBMRE_*` status code and writes results
//! through out-pointers. On failure the message is available from
//! [`fbmre_last_error_message`] on the same thread. Handles are opaque and
//! must be released with their `_free` function; passing null to `_free` is
//! a no-op. Panics are caught at the boundary and reported as
//! `FBMRE_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use fbmre::fit::{fit_exponent, FitPoint};
use fbmre::paths::{build_circulant_plan, sample_path, CirculantPlan, GridSpec};
use fbmre::persistence::{estimate_persistence_curve, estimate_small_barrier_curve, GridRule, McConfig};
use fbmre::rng::{stream, Domain};
use fbmre::{Error, HurstLaw, McEstimate};

pub const FBMRE_OK: c_int = 0;
pub const FBMRE_INVALID_ARGUMENT: c_int = 1;
pub const FBMRE_DOMAIN: c_int = 2;
pub const FBMRE_NUMERICAL: c_int = 3;
pub const FBMRE_SIZE_EXCEEDED: c_int = 4;
pub const FBMRE_NULL_POINTER: c_int = 5;
pub const FBMRE_PANIC: c_int = 6;

/// `grid_kind` value selecting a fixed number of points per unit time.
pub const FBMRE_GRID_FIXED: c_int = 0;
/// `grid_kind` value selecting `m(H) = clamp(ceil(H^{-1/2})^2, m_min, m_max)`.
pub const FBMRE_GRID_RULE: c_int = 1;

/// Opaque circulant-embedding plan for one `(H, n)`.
pub struct FbmrePlan {
    plan: Arc<CirculantPlan>,
}

/// Opaque Hurst-exponent distribution.
pub struct FbmreLaw {
    law: HurstLaw,
}

/// Monte-Carlo settings; obtain defaults from [`fbmre_mc_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FbmreMcConfig {
    pub n_paths: u64,
    pub seed: u64,
    pub grid_kind: c_int,
    /// Points per unit time for `FBMRE_GRID_FIXED`.
    pub m_fixed: u32,
    pub m_min: u32,
    pub m_max: u32,
    pub barrier: f64,
    pub ci_level: f64,
    /// Worker threads; 0 uses all cores.
    pub workers: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FbmreEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n_paths: u64,
    /// Number of surviving paths.
    pub n_hits: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FbmreFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> c_int {
    match e {
        Error::Domain(_) => FBMRE_DOMAIN,
        Error::SizeExceeded { .. } => FBMRE_SIZE_EXCEEDED,
        Error::InvalidConfig(_) | Error::PreconditionViolated(_) | Error::DegenerateDesign(_) | Error::Json(_) => {
            FBMRE_INVALID_ARGUMENT
        }
        _ => FBMRE_NUMERICAL,
    }
}

struct Fail(c_int, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FBMRE_NULL_POINTER, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(FBMRE_INVALID_ARGUMENT, msg.into())
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FBMRE_OK,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            FBMRE_PANIC
        }
    }
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn out_ref<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    ptr.as_mut().ok_or_else(|| null(what))
}

fn to_estimate(e: &McEstimate) -> FbmreEstimate {
    FbmreEstimate {
        p_hat: e.p_hat,
        std_err: e.std_err,
        ci_lo: e.ci_lo,
        ci_hi: e.ci_hi,
        n_paths: e.n_paths,
        n_hits: e.n_hits.unwrap_or(0),
    }
}

fn to_config(c: &FbmreMcConfig) -> Result<McConfig, Fail> {
    let grid_rule = match c.grid_kind {
        FBMRE_GRID_FIXED => GridRule::Fixed { m: c.m_fixed },
        FBMRE_GRID_RULE => GridRule::InverseSqrt {
            m_min: c.m_min,
            m_max: c.m_max,
        },
        k => return Err(invalid(format!("unknown grid_kind {k}"))),
    };
    let cfg = McConfig {
        n_paths: c.n_paths,
        seed: c.seed,
        grid_rule,
        barrier: c.barrier,
        ci_level: c.ci_level,
        workers: c.workers as usize,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fbmre_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn fbmre_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Fills `out` with the library defaults (1e5 paths, seed 0, grid rule
/// `[1, 4096]`, barrier 1, 95% intervals, all cores).
///
/// # Safety
/// `out` must be null or point to writable memory for one config.
#[no_mangle]
pub unsafe extern "C" fn fbmre_mc_config_default(out: *mut FbmreMcConfig) -> c_int {
    guard(|| {
        let out = out_ref(out, "out")?;
        let d = McConfig::new(100_000, 0);
        let (m_min, m_max) = match d.grid_rule {
            GridRule::InverseSqrt { m_min, m_max } => (m_min, m_max),
            GridRule::Fixed { m } => (m, m),
        };
        *out = FbmreMcConfig {
            n_paths: d.n_paths,
            seed: d.seed,
            grid_kind: FBMRE_GRID_RULE,
            m_fixed: 64,
            m_min,
            m_max,
            barrier: d.barrier,
            ci_level: d.ci_level,
            workers: 0,
        };
        Ok(())
    })
}

fn new_law(law: HurstLaw, out: *mut *mut FbmreLaw) -> Result<(), Fail> {
    let out = unsafe { out_ref(out, "out")? };
    law.validate()?;
    *out = Box::into_raw(Box::new(FbmreLaw { law }));
    Ok(())
}

/// Point mass at `h`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn fbmre_law_point(h: f64, out: *mut *mut FbmreLaw) -> c_int {
    guard(|| new_law(HurstLaw::point(h), out))
}

/// Uniform law on `[a, b]`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn fbmre_law_uniform(a: f64, b: f64, out: *mut *mut FbmreLaw) -> c_int {
    guard(|| new_law(HurstLaw::uniform(a, b), out))
}

/// `a + (b − a)·Beta(alpha, beta)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn fbmre_law_scaled_beta(
    alpha: f64,
    beta: f64,
    a: f64,
    b: f64,
    out: *mut *mut FbmreLaw,
) -> c_int {
    guard(|| new_law(HurstLaw::ScaledBeta { alpha, beta, a, b }, out))
}

/// Discrete law with atoms `hs[i]` of mass `ps[i]`.
///
/// # Safety
/// `hs` and `ps` must point to `n` readable doubles; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fbmre_law_discrete(
    hs: *const f64,
    ps: *const f64,
    n: usize,
    out: *mut *mut FbmreLaw,
) -> c_int {
    guard(|| {
        let hs = slice(hs, n, "hs")?;
        let ps = slice(ps, n, "ps")?;
        new_law(
            HurstLaw::Discrete {
                atoms: hs.iter().copied().zip(ps.iter().copied()).collect(),
            },
            out,
        )
    })
}

/// Law from its JSON form, e.g. `{"type":"uniform","a":0.4,"b":0.8}`.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fbmre_law_from_json(json: *const c_char, out: *mut *mut FbmreLaw) -> c_int {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| invalid(format!("json is not UTF-8: {e}")))?;
        let law: HurstLaw = serde_json::from_str(text).map_err(Error::from)?;
        new_law(law, out)
    })
}

/// # Safety
/// `law` must be null or a handle from an `fbmre_law_*` constructor that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn fbmre_law_free(law: *mut FbmreLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

/// Essential supremum `H0` of the law.
///
/// # Safety
/// `law` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fbmre_law_ess_sup(law: *const FbmreLaw, out: *mut f64) -> c_int {
    guard(|| {
        let law = law.as_ref().ok_or_else(|| null("law"))?;
        *out_ref(out, "out")? = law.law.ess_sup().h0;
        Ok(())
    })
}

/// Builds the circulant plan for `n` fGn increments at Hurst `h`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn fbmre_plan_new(h: f64, n: usize, out: *mut *mut FbmrePlan) -> c_int {
    guard(|| {
        let out = out_ref(out, "out")?;
        let plan = build_circulant_plan(h, n)?;
        *out = Box::into_raw(Box::new(FbmrePlan { plan: Arc::new(plan) }));
        Ok(())
    })
}

/// # Safety
/// `plan` must be null or a live handle from [`fbmre_plan_new`].
#[no_mangle]
pub unsafe extern "C" fn fbmre_plan_free(plan: *mut FbmrePlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Length of the circulant ring (number of eigenvalues).
///
/// # Safety
/// `plan` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fbmre_plan_len(plan: *const FbmrePlan, out: *mut usize) -> c_int {
    guard(|| {
        let plan = plan.as_ref().ok_or_else(|| null("plan"))?;
        *out_ref(out, "out")? = plan.plan.embedding_len();
        Ok(())
    })
}

/// Copies the circulant eigenvalues into `buf`, which must hold at least
/// [`fbmre_plan_len`] values.
///
/// # Safety
/// `plan` must be a live handle and `buf` writable for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn fbmre_plan_eigenvalues(plan: *const FbmrePlan, buf: *mut f64, cap: usize) -> c_int {
    guard(|| {
        let plan = plan.as_ref().ok_or_else(|| null("plan"))?;
        let ev = plan.plan.eigenvalues();
        if cap < ev.len() {
            return Err(Fail(
                FBMRE_SIZE_EXCEEDED,
                format!("buffer holds {cap} values, need {}", ev.len()),
            ));
        }
        slice_mut(buf, ev.len(), "buf")?.copy_from_slice(ev);
        Ok(())
    })
}

/// Samples path `index` of stream `seed` at Hurst `h` on the times `k/m`,
/// `k = 0..=ceil(horizon·m)`, writing the values (starting with `B_0 = 0`)
/// into `buf` and their count into `out_len`. A short buffer fails with
/// `FBMRE_SIZE_EXCEEDED` after setting `out_len` to the required length.
///
/// # Safety
/// `buf` must be writable for `cap` doubles; `out_len` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fbmre_sample_path(
    h: f64,
    horizon: f64,
    m: u32,
    seed: u64,
    index: u64,
    buf: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> c_int {
    guard(|| {
        let out_len = out_ref(out_len, "out_len")?;
        let grid = GridSpec::new(horizon, m)?;
        let need = grid.n_points() + 1;
        *out_len = need;
        if cap < need {
            return Err(Fail(
                FBMRE_SIZE_EXCEEDED,
                format!("buffer holds {cap} values, need {need}"),
            ));
        }
        let path = sample_path(h, &grid, &mut stream(seed, Domain::Paths, index))?;
        slice_mut(buf, need, "buf")?.copy_from_slice(&path.values);
        Ok(())
    })
}

unsafe fn curve(
    law: *const FbmreLaw,
    xs: *const f64,
    n: usize,
    cfg: *const FbmreMcConfig,
    out: *mut FbmreEstimate,
    f: fn(&HurstLaw, &[f64], &McConfig) -> fbmre::Result<Vec<McEstimate>>,
) -> Result<(), Fail> {
    let law = law.as_ref().ok_or_else(|| null("law"))?;
    let cfg = to_config(cfg.as_ref().ok_or_else(|| null("cfg"))?)?;
    let xs = slice(xs, n, "xs")?;
    let out = slice_mut(out, n, "out")?;
    for (o, e) in out.iter_mut().zip(f(&law.law, xs, &cfg)?) {
        *o = to_estimate(&e);
    }
    Ok(())
}

/// `P(max_{[0,T]} B^H ≤ barrier)` for each of the `n` horizons, with `H`
/// drawn from `law` per path.
///
/// # Safety
/// `horizons` readable and `out` writable for `n` elements; `law` and `cfg`
/// live.
#[no_mangle]
pub unsafe extern "C" fn fbmre_estimate_persistence(
    law: *const FbmreLaw,
    horizons: *const f64,
    n: usize,
    cfg: *const FbmreMcConfig,
    out: *mut FbmreEstimate,
) -> c_int {
    guard(|| curve(law, horizons, n, cfg, out, estimate_persistence_curve))
}

/// `P(max_{[0,1]} B^H ≤ ε)` for each of the `n` epsilons. The config
/// barrier is ignored.
///
/// # Safety
/// As for [`fbmre_estimate_persistence`].
#[no_mangle]
pub unsafe extern "C" fn fbmre_estimate_small_barrier(
    law: *const FbmreLaw,
    epsilons: *const f64,
    n: usize,
    cfg: *const FbmreMcConfig,
    out: *mut FbmreEstimate,
) -> c_int {
    guard(|| curve(law, epsilons, n, cfg, out, estimate_small_barrier_curve))
}

/// Weighted fit of `ln p` on `ln x`.
///
/// # Safety
/// `xs`, `ps` and `ses` readable for `n` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fbmre_fit_exponent(
    xs: *const f64,
    ps: *const f64,
    ses: *const f64,
    n: usize,
    out: *mut FbmreFit,
) -> c_int {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (xs, ps, ses) = (slice(xs, n, "xs")?, slice(ps, n, "ps")?, slice(ses, n, "ses")?);
        let pts: Vec<FitPoint> = (0..n)
            .map(|i| FitPoint {
                x: xs[i],
                p_hat: ps[i],
                std_err: ses[i],
            })
            .collect();
        let f = fit_exponent(&pts)?;
        *out = FbmreFit {
            slope: f.slope,
            slope_se: f.slope_se,
            intercept: f.intercept,
            r_squared: f.r_squared,
            n_points: f.n_points as u64,
        };
        Ok(())
    })
}
