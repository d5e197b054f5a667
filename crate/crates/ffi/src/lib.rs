//! C ABI over `besov_dunkl`.
//!
//! Objects cross the boundary as opaque handles created by `bd_*_new`-style
//! calls and released with the matching `bd_*_free`. Every fallible call
//! returns a [`BdStatus`]; the message of the last failure on the calling
//! thread is available through [`bd_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use besov_dunkl::besov::{equivalence_report, BesovParams, Ceilings, Lattices};
use besov_dunkl::catalog::lookup;
use besov_dunkl::translation::{convolve, translate_angular, AngularRule};
use besov_dunkl::{
    dunkl_kernel, forward_transform, inverse_transform, lp_norm, AlphaParameter, Error, Parity, QuadGrid,
    SampledFunction, Spectrum,
};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BdStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Range = 3,
    GridMismatch = 4,
    Parse = 5,
    Usage = 6,
    Io = 7,
    BufferTooSmall = 8,
    InvalidUtf8 = 9,
    Panic = 10,
}

/// Quadrature grid handle.
pub struct BdGrid(Arc<QuadGrid>);

/// Sampled function handle.
pub struct BdFunction(SampledFunction);

/// Dunkl transform handle.
pub struct BdSpectrum(Spectrum);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BdSeminorms {
    pub bd: f64,
    pub kd: f64,
    pub ed: f64,
    pub lp_norm: f64,
    /// Nonzero when the input is constant.
    pub degenerate: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> BdStatus {
    match e {
        Error::Domain(_) => BdStatus::Domain,
        Error::Range { .. } => BdStatus::Range,
        Error::GridMismatch(_) => BdStatus::GridMismatch,
        Error::Parse(_) => BdStatus::Parse,
        Error::Usage(_) => BdStatus::Usage,
        Error::Io(_) => BdStatus::Io,
    }
}

struct Fail(BdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BdStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> BdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            BdStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside besov-dunkl".into());
            BdStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_complex(values: &[Complex64], re: *mut f64, im: *mut f64, len: usize) -> Result<(), Fail> {
    if len < values.len() {
        return Err(Fail(BdStatus::BufferTooSmall, format!("need {} entries, buffer has {len}", values.len())));
    }
    if re.is_null() {
        return Err(null("re buffer"));
    }
    for (i, v) in values.iter().enumerate() {
        *re.add(i) = v.re;
        if !im.is_null() {
            *im.add(i) = v.im;
        }
    }
    Ok(())
}

fn rule(f: &SampledFunction, theta_nodes: usize) -> Result<Arc<AngularRule>, Fail> {
    Ok(Arc::new(AngularRule::new(*f.alpha(), theta_nodes)?))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn bd_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// `E_alpha(-i x y)`.
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bd_dunkl_kernel(alpha: f64, x: f64, y: f64, re: *mut f64, im: *mut f64) -> BdStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let e = dunkl_kernel(&AlphaParameter::new(alpha)?, x, y);
        *re = e.re;
        *im = e.im;
        Ok(())
    })
}

/// Composite Gauss-Legendre grid on `[-radius, radius]` with `n` nodes.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bd_grid_new(alpha: f64, radius: f64, n: usize, out: *mut *mut BdGrid) -> BdStatus {
    guard(|| put(out, BdGrid(QuadGrid::shared(AlphaParameter::new(alpha)?, radius, n)?)))
}

/// # Safety
/// `grid` must be null or a handle from [`bd_grid_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bd_grid_free(grid: *mut BdGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bd_grid_len(grid: *const BdGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// # Safety
/// `grid` must be a live handle and `nodes` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn bd_grid_nodes(grid: *const BdGrid, nodes: *mut f64, len: usize) -> BdStatus {
    guard(|| {
        let g = get(grid, "grid")?;
        let v: Vec<Complex64> = g.0.nodes().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        write_complex(&v, nodes, ptr::null_mut(), len)
    })
}

/// Real samples at the grid nodes; parity is detected from the values.
///
/// # Safety
/// `grid` must be a live handle, `values` valid for `len` reads and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bd_function_from_values(
    grid: *const BdGrid,
    values: *const f64,
    len: usize,
    out: *mut *mut BdFunction,
) -> BdStatus {
    guard(|| {
        let g = get(grid, "grid")?;
        let v = slice(values, len, "values")?;
        let f = SampledFunction::from_values(g.0.clone(), v.iter().map(|&x| Complex64::new(x, 0.0)).collect())?;
        let parity = f.detect_parity();
        put(out, BdFunction(f.assume_parity(parity)))
    })
}

/// Catalog function by name, sampled on `grid`.
///
/// # Safety
/// `grid` must be a live handle, `name` a NUL-terminated string and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bd_function_from_catalog(
    grid: *const BdGrid,
    name: *const c_char,
    out: *mut *mut BdFunction,
) -> BdStatus {
    guard(|| {
        let g = get(grid, "grid")?;
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|e| Fail(BdStatus::InvalidUtf8, e.to_string()))?;
        put(out, BdFunction(lookup(name)?.sample(&g.0)?))
    })
}

/// # Safety
/// `f` must be null or a live function handle.
#[no_mangle]
pub unsafe extern "C" fn bd_function_free(f: *mut BdFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bd_function_len(f: *const BdFunction) -> usize {
    f.as_ref().map_or(0, |f| f.0.values().len())
}

/// Copies the samples; `im` may be null.
///
/// # Safety
/// `f` must be a live handle; `re` (and `im` when non-null) valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn bd_function_values(f: *const BdFunction, re: *mut f64, im: *mut f64, len: usize) -> BdStatus {
    guard(|| write_complex(get(f, "function")?.0.values(), re, im, len))
}

/// `||f||_{p,alpha}`.
///
/// # Safety
/// `f` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bd_lp_norm(f: *const BdFunction, p: f64, out: *mut f64) -> BdStatus {
    guard(|| {
        let v = lp_norm(&get(f, "function")?.0, p)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = v;
        Ok(())
    })
}

/// Dunkl transform on the frequency grid `freq` (the space grid when null).
///
/// # Safety
/// `f` must be a live handle, `freq` null or live, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bd_transform(f: *const BdFunction, freq: *const BdGrid, out: *mut *mut BdSpectrum) -> BdStatus {
    guard(|| {
        let f = &get(f, "function")?.0;
        let grid = match freq.as_ref() {
            Some(g) => g.0.clone(),
            None => f.grid().clone(),
        };
        put(out, BdSpectrum(forward_transform(f, &grid)?))
    })
}

/// Inverse transform sampled on `space`.
///
/// # Safety
/// `s` and `space` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bd_inverse_transform(
    s: *const BdSpectrum,
    space: *const BdGrid,
    out: *mut *mut BdFunction,
) -> BdStatus {
    guard(|| put(out, BdFunction(inverse_transform(&get(s, "spectrum")?.0, &get(space, "grid")?.0)?)))
}

/// # Safety
/// `s` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn bd_spectrum_free(s: *mut BdSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Copies the spectrum values; `im` may be null.
///
/// # Safety
/// `s` must be a live handle; `re` (and `im` when non-null) valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn bd_spectrum_values(s: *const BdSpectrum, re: *mut f64, im: *mut f64, len: usize) -> BdStatus {
    guard(|| write_complex(get(s, "spectrum")?.0.values(), re, im, len))
}

/// `tau_x f` by the angular formula with `theta_nodes` nodes.
///
/// # Safety
/// `f` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bd_translate(
    f: *const BdFunction,
    x: f64,
    theta_nodes: usize,
    out: *mut *mut BdFunction,
) -> BdStatus {
    guard(|| {
        let f = &get(f, "function")?.0;
        put(out, BdFunction(translate_angular(f, x, &rule(f, theta_nodes)?)?))
    })
}

/// `f *_alpha g`.
///
/// # Safety
/// `f`, `g` must be live handles on the same grid and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bd_convolve(
    f: *const BdFunction,
    g: *const BdFunction,
    theta_nodes: usize,
    out: *mut *mut BdFunction,
) -> BdStatus {
    guard(|| {
        let f = &get(f, "function")?.0;
        let g = &get(g, "function")?.0;
        put(out, BdFunction(convolve(f, g, &rule(f, theta_nodes)?)?))
    })
}

/// The three Besov-Dunkl seminorms on the default lattices; `q` may be
/// `INFINITY`.
///
/// # Safety
/// `f` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bd_seminorms(f: *const BdFunction, p: f64, q: f64, beta: f64, out: *mut BdSeminorms) -> BdStatus {
    guard(|| {
        let f = &get(f, "function")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let params = BesovParams::new(p, q, beta, f.alpha().alpha())?;
        let r = equivalence_report(f, &params, &Lattices::default(), &Ceilings::default())?;
        *out = BdSeminorms {
            bd: r.seminorms.bd,
            kd: r.seminorms.kd,
            ed: r.seminorms.ed,
            lp_norm: r.seminorms.lp_norm,
            degenerate: r.flags.degenerate as i32,
        };
        Ok(())
    })
}

/// Parity of a function: 0 even, 1 odd, 2 neither.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bd_function_parity(f: *const BdFunction) -> i32 {
    match f.as_ref().map(|f| f.0.parity()) {
        Some(Parity::Even) => 0,
        Some(Parity::Odd) => 1,
        _ => 2,
    }
}
