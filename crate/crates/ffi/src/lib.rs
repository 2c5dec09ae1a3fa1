//! C ABI over `panelnet`.
//!
//! Graphs are opaque [`PnGraph`] handles created with [`pn_graph_new`] or
//! [`pn_graph_read_net`] and released with [`pn_graph_free`]. Every fallible
//! function returns a [`PnStatus`]; on failure the message is available from
//! [`pn_last_error_message`] on the same thread. Output arrays are supplied
//! by the caller together with their length.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use panelnet::io_pajek::{read_net, write_net, PajekNetwork};
use panelnet::islands::{line_islands, IslandParams};
use panelnet::metrics::{
    average_degree, betweenness, connected_components, density, eigenvector_centrality,
    BetweennessOptions, DensityConvention, EigenOptions, PathMode,
};
use panelnet::stats::{holm_adjust, ks_two_sample_raw, KsPValue};
use panelnet::{Error, NodeAttrs, WeightedGraph};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Parse = 4,
    DirectedUnsupported = 5,
    Undefined = 6,
    NoConvergence = 7,
    Io = 8,
    BufferSize = 9,
    Panic = 10,
}

/// Opaque undirected weighted graph.
pub struct PnGraph {
    inner: WeightedGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> PnStatus {
    match e {
        Error::Panel { source, .. } => status_of(source),
        Error::SelfLoop(_)
        | Error::UnknownNode(_)
        | Error::DuplicateNode(_)
        | Error::InvalidWeight(_)
        | Error::InvalidArgument(_) => PnStatus::InvalidArgument,
        Error::Validation(_) => PnStatus::Validation,
        Error::Parse { .. } | Error::Json(_) => PnStatus::Parse,
        Error::DirectedUnsupported { .. } => PnStatus::DirectedUnsupported,
        Error::Undefined(_) => PnStatus::Undefined,
        Error::NoConvergence { .. } => PnStatus::NoConvergence,
        Error::Io { .. } => PnStatus::Io,
    }
}

fn fail(status: PnStatus, msg: impl Into<String>) -> PnStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, recording errors and turning panics into [`PnStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), PnStatus>) -> PnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PnStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(PnStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, PnStatus>;
}

impl<T> OrStatus<T> for panelnet::Result<T> {
    fn or_status(self) -> Result<T, PnStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn graph_ref<'a>(g: *const PnGraph) -> Result<&'a WeightedGraph, PnStatus> {
    // SAFETY: caller passes null or a live handle from this library.
    unsafe { g.as_ref() }
        .map(|g| &g.inner)
        .ok_or_else(|| fail(PnStatus::NullPointer, "null graph handle"))
}

unsafe fn graph_mut<'a>(g: *mut PnGraph) -> Result<&'a mut WeightedGraph, PnStatus> {
    // SAFETY: as above, and the handle is not aliased during the call.
    unsafe { g.as_mut() }
        .map(|g| &mut g.inner)
        .ok_or_else(|| fail(PnStatus::NullPointer, "null graph handle"))
}

unsafe fn string<'a>(s: *const c_char, what: &str) -> Result<&'a str, PnStatus> {
    if s.is_null() {
        return Err(fail(PnStatus::NullPointer, format!("null {what}")));
    }
    // SAFETY: non-null and NUL-terminated per the API contract.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| fail(PnStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn out_slice<'a, T>(ptr: *mut T, len: usize, need: usize) -> Result<&'a mut [T], PnStatus> {
    if ptr.is_null() {
        return Err(fail(PnStatus::NullPointer, "null output buffer"));
    }
    if len < need {
        return Err(fail(
            PnStatus::BufferSize,
            format!("output buffer holds {len} values, {need} needed"),
        ));
    }
    // SAFETY: ptr is valid for `len` writes per the API contract.
    Ok(unsafe { slice::from_raw_parts_mut(ptr, need) })
}

unsafe fn in_slice<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], PnStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(fail(PnStatus::NullPointer, "null input array"));
    }
    // SAFETY: ptr is valid for `len` reads per the API contract.
    Ok(unsafe { slice::from_raw_parts(ptr, len) })
}

unsafe fn write_out<T>(ptr: *mut T, value: T) -> Result<(), PnStatus> {
    if ptr.is_null() {
        return Err(fail(PnStatus::NullPointer, "null output pointer"));
    }
    // SAFETY: non-null, caller-provided storage for one `T`.
    unsafe { ptr.write(value) };
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pn_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: buf holds at least `len` bytes.
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

#[no_mangle]
pub extern "C" fn pn_graph_new() -> *mut PnGraph {
    Box::into_raw(Box::new(PnGraph {
        inner: WeightedGraph::new(),
    }))
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pn_graph_free(g: *mut PnGraph) {
    if !g.is_null() {
        // SAFETY: handle was created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Adds a node; its index is written to `out_index` when non-null.
///
/// # Safety
/// `g` must be a live handle; `id` and `label` NUL-terminated strings
/// (`label` may be null).
#[no_mangle]
pub unsafe extern "C" fn pn_graph_add_node(
    g: *mut PnGraph,
    id: *const c_char,
    label: *const c_char,
    is_panelist: bool,
    out_index: *mut usize,
) -> PnStatus {
    guard(|| {
        let g = unsafe { graph_mut(g) }?;
        let id = unsafe { string(id, "node id") }?;
        let label = if label.is_null() {
            id
        } else {
            unsafe { string(label, "label") }?
        };
        let attrs = if is_panelist {
            NodeAttrs::panelist(None)
        } else {
            NodeAttrs::default()
        };
        let i = g.add_node(id, label, attrs).or_status()?;
        if !out_index.is_null() {
            unsafe { write_out(out_index, i) }?;
        }
        Ok(())
    })
}

/// Adds `weight` to the edge between two existing nodes.
///
/// # Safety
/// `g` must be a live handle; `u` and `v` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn pn_graph_add_edge(
    g: *mut PnGraph,
    u: *const c_char,
    v: *const c_char,
    weight: f64,
) -> PnStatus {
    guard(|| {
        let g = unsafe { graph_mut(g) }?;
        let u = unsafe { string(u, "node id") }?;
        let v = unsafe { string(v, "node id") }?;
        g.add_edge(u, v, weight).or_status()
    })
}

/// Number of nodes, 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pn_graph_node_count(g: *const PnGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.node_count())
}

/// Number of edges, 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pn_graph_edge_count(g: *const PnGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.edge_count())
}

/// Reads a Pajek `.net` file. Two-mode files are flattened, left vertices
/// first.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn pn_graph_read_net(
    path: *const c_char,
    out: *mut *mut PnGraph,
) -> PnStatus {
    guard(|| {
        let path = unsafe { string(path, "path") }?;
        let inner = match read_net(Path::new(path)).or_status()? {
            PajekNetwork::OneMode(g) => g,
            PajekNetwork::TwoMode(b) => b.to_weighted_graph(),
        };
        unsafe { write_out(out, Box::into_raw(Box::new(PnGraph { inner }))) }
    })
}

/// # Safety
/// `g` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pn_graph_write_net(g: *const PnGraph, path: *const c_char) -> PnStatus {
    guard(|| {
        let g = unsafe { graph_ref(g) }?;
        let path = unsafe { string(path, "path") }?;
        write_net(g, Path::new(path)).or_status()
    })
}

/// Component id (`1..=k`) per node into `out`, `k` into `out_count`.
///
/// # Safety
/// `g` must be a live handle, `out` valid for `len` values and `out_count`
/// for one.
#[no_mangle]
pub unsafe extern "C" fn pn_components(
    g: *const PnGraph,
    out: *mut u32,
    len: usize,
    out_count: *mut usize,
) -> PnStatus {
    guard(|| {
        let g = unsafe { graph_ref(g) }?;
        let buf = unsafe { out_slice(out, len, g.node_count()) }?;
        let c = connected_components(g);
        buf.copy_from_slice(&c.partition.assignment);
        unsafe { write_out(out_count, c.count()) }
    })
}

/// Betweenness centrality per node. With `weighted`, edge weights are path
/// lengths; otherwise paths count hops.
///
/// # Safety
/// `g` must be a live handle and `out` valid for `len` values.
#[no_mangle]
pub unsafe extern "C" fn pn_betweenness(
    g: *const PnGraph,
    normalized: bool,
    weighted: bool,
    out: *mut f64,
    len: usize,
) -> PnStatus {
    guard(|| {
        let g = unsafe { graph_ref(g) }?;
        let buf = unsafe { out_slice(out, len, g.node_count()) }?;
        let opts = BetweennessOptions {
            normalized,
            paths: if weighted {
                PathMode::Weighted
            } else {
                PathMode::Hops
            },
        };
        buf.copy_from_slice(&betweenness(g, opts));
        Ok(())
    })
}

/// Eigenvector centrality per node (unit norm) and the eigenvalue.
///
/// # Safety
/// `g` must be a live handle, `out` valid for `len` values and
/// `out_eigenvalue` null or valid for one.
#[no_mangle]
pub unsafe extern "C" fn pn_eigenvector(
    g: *const PnGraph,
    out: *mut f64,
    len: usize,
    out_eigenvalue: *mut f64,
) -> PnStatus {
    guard(|| {
        let g = unsafe { graph_ref(g) }?;
        let buf = unsafe { out_slice(out, len, g.node_count()) }?;
        let res = eigenvector_centrality(g, &EigenOptions::default()).or_status()?;
        buf.copy_from_slice(&res.scores);
        if !out_eigenvalue.is_null() {
            unsafe { write_out(out_eigenvalue, res.eigenvalue) }?;
        }
        Ok(())
    })
}

/// Line islands with sizes in `[min_size, max_size]`: island id per node
/// (0 off-island) and the island count.
///
/// # Safety
/// `g` must be a live handle, `out` valid for `len` values and `out_count`
/// for one.
#[no_mangle]
pub unsafe extern "C" fn pn_line_islands(
    g: *const PnGraph,
    min_size: usize,
    max_size: usize,
    out: *mut u32,
    len: usize,
    out_count: *mut usize,
) -> PnStatus {
    guard(|| {
        let g = unsafe { graph_ref(g) }?;
        let params = IslandParams::new(min_size, max_size).or_status()?;
        let buf = unsafe { out_slice(out, len, g.node_count()) }?;
        let res = line_islands(g, params).or_status()?;
        buf.copy_from_slice(&res.partition.assignment);
        unsafe { write_out(out_count, res.islands.len()) }
    })
}

/// Density, `2m/n²` or with `simple` `2m/(n(n−1))`.
///
/// # Safety
/// `g` must be a live handle and `out` valid for one value.
#[no_mangle]
pub unsafe extern "C" fn pn_density(g: *const PnGraph, simple: bool, out: *mut f64) -> PnStatus {
    guard(|| {
        let g = unsafe { graph_ref(g) }?;
        let conv = if simple {
            DensityConvention::Simple
        } else {
            DensityConvention::LoopsAllowed
        };
        let d = density(g, conv).or_status()?;
        unsafe { write_out(out, d) }
    })
}

/// # Safety
/// `g` must be a live handle and `out` valid for one value.
#[no_mangle]
pub unsafe extern "C" fn pn_average_degree(g: *const PnGraph, out: *mut f64) -> PnStatus {
    guard(|| {
        let g = unsafe { graph_ref(g) }?;
        let d = average_degree(g).or_status()?;
        unsafe { write_out(out, d) }
    })
}

/// Two-sample Kolmogorov-Smirnov test with asymptotic p-value (Stephens'
/// correction when `stephens`).
///
/// # Safety
/// `a` and `b` must be valid for `na` and `nb` values; `out_d` and `out_p`
/// for one value each.
#[no_mangle]
pub unsafe extern "C" fn pn_ks_two_sample(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    stephens: bool,
    out_d: *mut f64,
    out_p: *mut f64,
) -> PnStatus {
    guard(|| {
        let a = unsafe { in_slice(a, na) }?;
        let b = unsafe { in_slice(b, nb) }?;
        let method = if stephens {
            KsPValue::Stephens
        } else {
            KsPValue::Asymptotic
        };
        let r = ks_two_sample_raw(a, b, method).or_status()?;
        unsafe { write_out(out_d, r.d_statistic) }?;
        unsafe { write_out(out_p, r.p_raw) }
    })
}

/// Holm step-down adjustment of `n` p-values into `out`.
///
/// # Safety
/// `p` and `out` must be valid for `n` values.
#[no_mangle]
pub unsafe extern "C" fn pn_holm_adjust(p: *const f64, n: usize, out: *mut f64) -> PnStatus {
    guard(|| {
        let p = unsafe { in_slice(p, n) }?;
        let adj = holm_adjust(p).or_status()?;
        if n > 0 {
            let buf = unsafe { out_slice(out, n, n) }?;
            buf.copy_from_slice(&adj);
        }
        Ok(())
    })
}
