//! C ABI for `wsplab`.
//!
//! Graphons and graphs cross the boundary as opaque handles owned by the
//! caller and released with the matching `*_free` function. Every entry point
//! returns a [`WsplabStatus`]; on failure a message describing the error is
//! available from [`wsplab_last_error_message`] on the same thread. Panics
//! never unwind into C: they are caught and reported as
//! `WSPLAB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use wsplab::bounds::{self, BoundIngredients, BoundKind};
use wsplab::filters::apply_graph_filter;
use wsplab::homdensity::{hom_density_graph, Motif};
use wsplab::sampling::{sample, SampleMode, SampleSpec};
use wsplab::spectral::graph_spectrum;
use wsplab::{Error, FilterCoeffs, Graph, GraphSignal, Graphon, Scale};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsplabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Utf8 = 3,
    Io = 4,
    Numerical = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// How edges are drawn when sampling.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsplabSampleMode {
    Template = 0,
    Weighted = 1,
    Stochastic = 2,
}

impl From<WsplabSampleMode> for SampleMode {
    fn from(m: WsplabSampleMode) -> Self {
        match m {
            WsplabSampleMode::Template => SampleMode::Template,
            WsplabSampleMode::Weighted => SampleMode::Weighted,
            WsplabSampleMode::Stochastic => SampleMode::Stochastic,
        }
    }
}

/// Opaque graphon handle.
pub struct WsplabGraphon(Graphon);

/// Opaque graph handle.
pub struct WsplabGraph(Graph);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(WsplabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io(_) | Error::Csv(_) => WsplabStatus::Io,
            Error::Eigen(_) | Error::Diverged { .. } | Error::SizeExplosion { .. } => {
                WsplabStatus::Numerical
            }
            _ => WsplabStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: WsplabStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, records any error and converts panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WsplabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            WsplabStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            WsplabStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(WsplabStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(WsplabStatus::Utf8, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(WsplabStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(WsplabStatus::NullPointer, format!("{name} is null")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(WsplabStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn scale(normalized: bool) -> Scale {
    if normalized {
        Scale::Normalized
    } else {
        Scale::Raw
    }
}

/// Message for the last failed call on this thread, or NULL after a
/// successful call. The pointer stays valid until the next call on the same
/// thread.
#[no_mangle]
pub extern "C" fn wsplab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wsplab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Looks up a builtin graphon such as `"sbm2"` or `"constant:0.4"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wsplab_graphon_builtin(
    name: *const c_char,
    out: *mut *mut WsplabGraphon,
) -> WsplabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let w = Graphon::builtin(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(WsplabGraphon(w)));
        Ok(())
    })
}

/// Parses a graphon from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wsplab_graphon_from_json(
    json: *const c_char,
    out: *mut *mut WsplabGraphon,
) -> WsplabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let w: Graphon = serde_json::from_str(str_arg(json, "json")?)
            .map_err(|e| fail(WsplabStatus::InvalidArgument, e.to_string()))?;
        w.validate()?;
        *out = Box::into_raw(Box::new(WsplabGraphon(w)));
        Ok(())
    })
}

/// Releases a graphon. NULL is ignored.
///
/// # Safety
/// `w` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn wsplab_graphon_free(w: *mut WsplabGraphon) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Samples an `n`-node graph. The same `(seed, trial)` always gives the same
/// graph.
///
/// # Safety
/// `w` must be a live graphon handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wsplab_graph_sample(
    w: *const WsplabGraphon,
    n: usize,
    mode: WsplabSampleMode,
    seed: u64,
    trial: u64,
    self_loops: bool,
    out: *mut *mut WsplabGraph,
) -> WsplabStatus {
    guard(|| {
        let w = ref_arg(w, "graphon")?;
        let out = out_arg(out, "out")?;
        let spec = SampleSpec {
            n,
            mode: mode.into(),
            seed,
            trial,
            self_loops,
        };
        *out = Box::into_raw(Box::new(WsplabGraph(sample(&w.0, &spec)?)));
        Ok(())
    })
}

/// Reads an edge-list CSV, with labels from the sibling `.labels.txt` file
/// when present.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wsplab_graph_load_csv(
    path: *const c_char,
    out: *mut *mut WsplabGraph,
) -> WsplabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = Graph::load_csv(Path::new(str_arg(path, "path")?), None)?;
        *out = Box::into_raw(Box::new(WsplabGraph(g)));
        Ok(())
    })
}

/// Writes the graph as an edge-list CSV plus a `.labels.txt` file.
///
/// # Safety
/// `g` must be a live graph handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wsplab_graph_save_csv(
    g: *const WsplabGraph,
    path: *const c_char,
) -> WsplabStatus {
    guard(|| {
        let g = ref_arg(g, "graph")?;
        g.0.save_csv(Path::new(str_arg(path, "path")?))?;
        Ok(())
    })
}

/// Releases a graph. NULL is ignored.
///
/// # Safety
/// `g` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn wsplab_graph_free(g: *mut WsplabGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of nodes.
///
/// # Safety
/// `g` must be a live graph handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wsplab_graph_size(g: *const WsplabGraph, out: *mut usize) -> WsplabStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(g, "graph")?.0.n();
        Ok(())
    })
}

/// Copies the `n * n` shift operator into `out` in row-major order.
///
/// # Safety
/// `g` must be a live graph handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn wsplab_graph_matrix(
    g: *const WsplabGraph,
    out: *mut f64,
    len: usize,
) -> WsplabStatus {
    guard(|| {
        let g = &ref_arg(g, "graph")?.0;
        let n = g.n();
        if len < n * n {
            return Err(fail(
                WsplabStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", n * n),
            ));
        }
        let out = std::slice::from_raw_parts_mut(out_arg(out, "out")?, n * n);
        let s = g.gso();
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = s.get(i, j);
            }
        }
        Ok(())
    })
}

/// Eigenvalues of `S` (or `S/n` when `normalized`), nonzero ones first by
/// decreasing magnitude. `out` must hold at least `n` doubles.
///
/// # Safety
/// `g` must be a live graph handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn wsplab_graph_spectrum(
    g: *const WsplabGraph,
    normalized: bool,
    out: *mut f64,
    len: usize,
) -> WsplabStatus {
    guard(|| {
        let g = &ref_arg(g, "graph")?.0;
        if len < g.n() {
            return Err(fail(
                WsplabStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", g.n()),
            ));
        }
        let values = graph_spectrum(g, scale(normalized))?.values();
        let out = std::slice::from_raw_parts_mut(out_arg(out, "out")?, values.len());
        out.copy_from_slice(&values);
        Ok(())
    })
}

/// Applies `y = sum_k taps[k] S^k x` (with `S/n` when `normalized`). `x` and
/// `y` hold `n` doubles each and may not overlap.
///
/// # Safety
/// `g` must be a live graph handle, `taps` must hold `ntaps` doubles, and `x`
/// and `y` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn wsplab_filter_apply(
    g: *const WsplabGraph,
    taps: *const f64,
    ntaps: usize,
    normalized: bool,
    x: *const f64,
    y: *mut f64,
    n: usize,
) -> WsplabStatus {
    guard(|| {
        let g = &ref_arg(g, "graph")?.0;
        let h = FilterCoeffs::new(slice_arg(taps, ntaps, "taps")?.to_vec())?;
        let x = slice_arg(x, n, "x")?.to_vec();
        let out = apply_graph_filter(&h, g, &GraphSignal::new(x), scale(normalized))?;
        let y = std::slice::from_raw_parts_mut(out_arg(y, "y")?, n);
        y.copy_from_slice(out.values());
        Ok(())
    })
}

/// Homomorphism density of a named motif (`node`, `edge`, `path2`,
/// `triangle`) in the graph.
///
/// # Safety
/// `g` must be a live graph handle, `motif` a NUL-terminated string and `out`
/// a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wsplab_hom_density(
    g: *const WsplabGraph,
    motif: *const c_char,
    out: *mut f64,
) -> WsplabStatus {
    guard(|| {
        let g = &ref_arg(g, "graph")?.0;
        let f = Motif::builtin(str_arg(motif, "motif")?)?;
        *out_arg(out, "out")? = hom_density_graph(&f, g)?;
        Ok(())
    })
}

/// Evaluates a transferability bound. `kind` is a bound name such as
/// `"prop1"` or `"thm2"`; `ingredients` is the JSON object accepted by the
/// `bounds` command. `confidence` may be NULL.
///
/// # Safety
/// `kind` and `ingredients` must be NUL-terminated strings and `value` a
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wsplab_bound_evaluate(
    kind: *const c_char,
    ingredients: *const c_char,
    value: *mut f64,
    confidence: *mut f64,
) -> WsplabStatus {
    guard(|| {
        let kind: BoundKind = str_arg(kind, "kind")?.parse()?;
        let ing: BoundIngredients = serde_json::from_str(str_arg(ingredients, "ingredients")?)
            .map_err(|e| fail(WsplabStatus::InvalidArgument, e.to_string()))?;
        let value = out_arg(value, "value")?;
        let report = bounds::evaluate(kind, &ing)?;
        *value = report.value;
        if let Some(c) = confidence.as_mut() {
            *c = report.confidence;
        }
        Ok(())
    })
}
