//! C ABI for `hyperrank`.
//!
//! Objects are opaque handles created by `*_new`/`*_sample`/`*_parse`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`HrStatus`] and writes results through out-pointers; the
//! message of the last failure on the calling thread is available from
//! [`hr_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hyperrank::hypergraph::{peel_two_core, rank_via_core};
use hyperrank::sampler::{sample_m_subset, SeedSpec};
use hyperrank::{theory, ColumnSet, Error, Hypergraph, RankEngine};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    TooLarge = 3,
    Parse = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("no interior nul"));
}

fn fail(status: HrStatus, msg: impl Into<String>) -> HrStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> HrStatus {
    let status = match e {
        Error::TooLarge { .. } | Error::Exhausted(_) => HrStatus::TooLarge,
        Error::Parse { .. } => HrStatus::Parse,
        Error::InvalidColumn(_)
        | Error::DimensionMismatch { .. }
        | Error::DuplicateEdge(_)
        | Error::Precondition(_) => HrStatus::InvalidArgument,
        _ => HrStatus::Internal,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into `HrStatus::Internal`.
fn guard(f: impl FnOnce() -> HrStatus) -> HrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(HrStatus::Internal, msg)
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(HrStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn hr_status_string(status: HrStatus) -> *const c_char {
    let s: &'static CStr = match status {
        HrStatus::Ok => c"ok",
        HrStatus::NullPointer => c"null pointer",
        HrStatus::InvalidArgument => c"invalid argument",
        HrStatus::TooLarge => c"too large",
        HrStatus::Parse => c"parse error",
        HrStatus::BufferTooSmall => c"buffer too small",
        HrStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Incremental GF(2) rank of columns offered one at a time.
pub struct HrRankEngine(RankEngine);

/// A k-uniform hypergraph with distinct edges.
pub struct HrHypergraph(Hypergraph);

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hr_rank_engine_new(n: usize, out: *mut *mut HrRankEngine) -> HrStatus {
    non_null!(out);
    guard(|| {
        if n > u32::MAX as usize {
            return fail(HrStatus::TooLarge, format!("n={n} does not fit in 32 bits"));
        }
        *out = Box::into_raw(Box::new(HrRankEngine(RankEngine::new(n))));
        HrStatus::Ok
    })
}

/// # Safety
/// `engine` must come from [`hr_rank_engine_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hr_rank_engine_free(engine: *mut HrRankEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Offers the column with ones at `indices[0..k]` (strictly increasing).
/// `*independent` is set to whether the rank grew.
///
/// # Safety
/// `engine` must be live, `indices` must point to `k` readable values and
/// `independent` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_rank_engine_offer(
    engine: *mut HrRankEngine,
    indices: *const u32,
    k: usize,
    independent: *mut bool,
) -> HrStatus {
    non_null!(engine, independent);
    if k > 0 && indices.is_null() {
        return fail(HrStatus::NullPointer, "indices is null");
    }
    guard(|| {
        let engine = &mut (*engine).0;
        let idx = if k == 0 { &[][..] } else { std::slice::from_raw_parts(indices, k) };
        match ColumnSet::new(engine.n(), idx) {
            Ok(col) => {
                *independent = engine.offer(&col);
                HrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `engine` must be live.
#[no_mangle]
pub unsafe extern "C" fn hr_rank_engine_rank(engine: *const HrRankEngine) -> usize {
    if engine.is_null() {
        return 0;
    }
    (*engine).0.rank()
}

/// Samples `m` distinct uniform `k`-subsets of `0..n` from stream
/// `(seed, stream)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hr_hypergraph_sample(
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
    stream: u64,
    out: *mut *mut HrHypergraph,
) -> HrStatus {
    non_null!(out);
    guard(|| match sample_m_subset(n, k, m, SeedSpec::new(seed, stream)) {
        Ok(h) => {
            *out = Box::into_raw(Box::new(HrHypergraph(h)));
            HrStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Parses the text matrix format.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hr_hypergraph_parse(
    text: *const c_char,
    out: *mut *mut HrHypergraph,
) -> HrStatus {
    non_null!(text, out);
    guard(|| {
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return fail(HrStatus::Parse, "text is not valid UTF-8");
        };
        match Hypergraph::from_text(s) {
            Ok(h) => {
                *out = Box::into_raw(Box::new(HrHypergraph(h)));
                HrStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `h` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hr_hypergraph_free(h: *mut HrHypergraph) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Dimensions `(n, k, m)`.
///
/// # Safety
/// `h` must be live; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_hypergraph_shape(
    h: *const HrHypergraph,
    n: *mut usize,
    k: *mut usize,
    m: *mut usize,
) -> HrStatus {
    non_null!(h, n, k, m);
    let h = &(*h).0;
    *n = h.n();
    *k = h.k();
    *m = h.m();
    HrStatus::Ok
}

/// Copies edge `i` into `buf`, which must hold at least `k` values.
///
/// # Safety
/// `h` must be live and `buf` must point to `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn hr_hypergraph_edge(
    h: *const HrHypergraph,
    i: usize,
    buf: *mut u32,
    cap: usize,
) -> HrStatus {
    non_null!(h, buf);
    let h = &(*h).0;
    let Some(e) = h.edges().get(i) else {
        return fail(
            HrStatus::InvalidArgument,
            format!("edge {i} out of range (m={})", h.m()),
        );
    };
    if cap < e.k() {
        return fail(HrStatus::BufferTooSmall, format!("need {} slots, got {cap}", e.k()));
    }
    ptr::copy_nonoverlapping(e.indices().as_ptr(), buf, e.k());
    HrStatus::Ok
}

/// GF(2) rank of the incidence matrix.
///
/// # Safety
/// `h` must be live and `rank` valid.
#[no_mangle]
pub unsafe extern "C" fn hr_hypergraph_rank(h: *const HrHypergraph, rank: *mut usize) -> HrStatus {
    non_null!(h, rank);
    guard(|| {
        *rank = rank_via_core(&(*h).0).rank;
        HrStatus::Ok
    })
}

/// Peels to the 2-core: number of peeled edges and size of the core.
///
/// # Safety
/// `h` must be live; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_hypergraph_peel(
    h: *const HrHypergraph,
    m1: *mut usize,
    core_vertices: *mut usize,
    core_edges: *mut usize,
) -> HrStatus {
    non_null!(h, m1, core_vertices, core_edges);
    guard(|| {
        let p = peel_two_core(&(*h).0);
        *m1 = p.m1;
        *core_vertices = p.core_vertices.len();
        *core_edges = p.core_edges.len();
        HrStatus::Ok
    })
}

/// Serializes to the text matrix format; free with [`hr_string_free`].
///
/// # Safety
/// `h` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hr_hypergraph_to_text(
    h: *const HrHypergraph,
    out: *mut *mut c_char,
) -> HrStatus {
    non_null!(h, out);
    guard(|| {
        let s = CString::new((*h).0.to_text()).expect("ascii text");
        *out = s.into_raw();
        HrStatus::Ok
    })
}

fn check_k(k: usize, min: usize) -> Result<(), HrStatus> {
    if k < min {
        return Err(fail(
            HrStatus::InvalidArgument,
            format!("k must be at least {min}, got {k}"),
        ));
    }
    Ok(())
}

/// Largest root in (0, 1] of `x = (1 - e^{-cx})^{k-1}`, 0 if none.
///
/// # Safety
/// `x` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_largest_fixed_point(k: usize, c: f64, tol: f64, x: *mut f64) -> HrStatus {
    non_null!(x);
    if let Err(s) = check_k(k, 2) {
        return s;
    }
    if !(c >= 0.0 && c.is_finite() && tol > 0.0) {
        return fail(HrStatus::InvalidArgument, "need finite c >= 0 and tol > 0");
    }
    guard(|| {
        *x = theory::largest_fixed_point(k, c, tol);
        HrStatus::Ok
    })
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_hat_c(k: usize, tol: f64, out: *mut f64) -> HrStatus {
    non_null!(out);
    guard(|| match theory::hat_c(k, tol) {
        Ok(v) => {
            *out = v;
            HrStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_c_star(k: usize, out: *mut f64) -> HrStatus {
    non_null!(out);
    if let Err(s) = check_k(k, 2) {
        return s;
    }
    guard(|| {
        *out = theory::c_star(k, theory::DEFAULT_THRESHOLD_TOL);
        HrStatus::Ok
    })
}

/// Predicted 2-core vertex and edge fractions.
///
/// # Safety
/// The out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_core_fractions(
    k: usize,
    c: f64,
    core_v: *mut f64,
    core_e: *mut f64,
) -> HrStatus {
    non_null!(core_v, core_e);
    if let Err(s) = check_k(k, 2) {
        return s;
    }
    if !(c >= 0.0 && c.is_finite()) {
        return fail(HrStatus::InvalidArgument, "need finite c >= 0");
    }
    guard(|| {
        let (v, e) = theory::core_fractions(k, c, theory::DEFAULT_FIXED_POINT_TOL);
        *core_v = v;
        *core_e = e;
        HrStatus::Ok
    })
}

/// Predicted rank/n at density `c`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_rank_fraction(k: usize, c: f64, out: *mut f64) -> HrStatus {
    non_null!(out);
    if let Err(s) = check_k(k, 2) {
        return s;
    }
    if !(c >= 0.0 && c.is_finite()) {
        return fail(HrStatus::InvalidArgument, "need finite c >= 0");
    }
    guard(|| {
        *out = theory::rank_fraction(k, c, theory::DEFAULT_FIXED_POINT_TOL);
        HrStatus::Ok
    })
}

/// Minimum-weight-basis limit and its error bound.
///
/// # Safety
/// The out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hr_mwb_limit(
    k: usize,
    quad_tol: f64,
    value: *mut f64,
    quad_error: *mut f64,
) -> HrStatus {
    non_null!(value, quad_error);
    if let Err(s) = check_k(k, 2) {
        return s;
    }
    if !(quad_tol > 0.0) {
        return fail(HrStatus::InvalidArgument, "quad_tol must be positive");
    }
    guard(|| {
        let l = theory::mwb_limit(k, quad_tol);
        *value = l.value;
        *quad_error = l.quad_error;
        HrStatus::Ok
    })
}

/// `exp(-exp(-c))`.
#[no_mangle]
pub extern "C" fn hr_full_rank_probability(c: f64) -> f64 {
    theory::full_rank_probability(c)
}
