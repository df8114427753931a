//! C ABI over `gammacd`.
//!
//! Graphs and heat operators are opaque handles created by `*_new`,
//! `*_generate` or `*_load` and released by the matching `*_free`. Every
//! fallible call returns a [`GcdStatus`]; on failure a message for the
//! calling thread is available from [`gcd_last_error`]. Array arguments are
//! caller-owned with an explicit length that must equal the vertex count.
//! The dimension `n` is passed as a double with `INFINITY` meaning `n = ∞`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gammacd::curvature::{self, Dimension};
use gammacd::graph::{self, Family, WeightMode, WeightedGraph};
use gammacd::{gamma, HeatOperator};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGraph = 3,
    Numerical = 4,
    Panic = 5,
}

/// Measure selection. For `gcd_graph_load`, `GCD_MODE_CUSTOM` keeps the
/// measure stored in a JSON file.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcdMode {
    Normalized = 0,
    Physical = 1,
    Custom = 2,
}

impl From<GcdMode> for WeightMode {
    fn from(mode: GcdMode) -> Self {
        match mode {
            GcdMode::Normalized => WeightMode::Normalized,
            GcdMode::Physical => WeightMode::Physical,
            GcdMode::Custom => WeightMode::Custom,
        }
    }
}

/// Opaque weighted graph.
pub struct GcdGraph(WeightedGraph);

/// Opaque heat semigroup of a graph.
pub struct GcdHeat(HeatOperator);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(GcdStatus, String);

impl Failure {
    fn null(name: &str) -> Self {
        Failure(GcdStatus::NullPointer, format!("`{name}` is null"))
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure(GcdStatus::InvalidArgument, message.into())
    }
}

impl From<graph::GraphError> for Failure {
    fn from(e: graph::GraphError) -> Self {
        Failure(GcdStatus::InvalidGraph, e.to_string())
    }
}

impl From<curvature::CurvatureError> for Failure {
    fn from(e: curvature::CurvatureError) -> Self {
        Failure(GcdStatus::Numerical, e.to_string())
    }
}

impl From<gammacd::semigroup::SemigroupError> for Failure {
    fn from(e: gammacd::semigroup::SemigroupError) -> Self {
        let status = match e {
            gammacd::semigroup::SemigroupError::NegativeTime(_) => GcdStatus::InvalidArgument,
            _ => GcdStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GcdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GcdStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GcdStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(name))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::null(name))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::invalid(format!("`{name}` is not UTF-8")))
}

unsafe fn input<'a>(p: *const f64, len: usize, n: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len != n {
        return Err(Failure::invalid(format!("`{name}` has length {len}, expected {n}")));
    }
    if p.is_null() {
        return Err(Failure::null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, n: usize, name: &str) -> Result<&'a mut [f64], Failure> {
    if len != n {
        return Err(Failure::invalid(format!("`{name}` has length {len}, expected {n}")));
    }
    if p.is_null() {
        return Err(Failure::null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn vertex(g: &WeightedGraph, x: usize) -> Result<usize, Failure> {
    if x < g.num_vertices() {
        Ok(x)
    } else {
        Err(Failure::invalid(format!("vertex {x} does not exist")))
    }
}

fn dimension(n: f64) -> Result<Dimension, Failure> {
    Dimension::finite(n).map_err(|e| Failure::invalid(e.to_string()))
}

/// Message of the last failed call on this thread, or NULL after a
/// successful one. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gcd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a graph from a generator spec such as `"torus:2:16"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcd_graph_generate(spec: *const c_char, mode: GcdMode, out: *mut *mut GcdGraph) -> GcdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let family: Family = c_str(spec, "spec")?.parse()?;
        let g = graph::generate(family, mode.into())?;
        *out = Box::into_raw(Box::new(GcdGraph(g)));
        Ok(())
    })
}

/// Loads a JSON or TSV graph file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcd_graph_load(path: *const c_char, mode: GcdMode, out: *mut *mut GcdGraph) -> GcdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let path = c_str(path, "path")?;
        let override_mode = match mode {
            GcdMode::Custom => None,
            m => Some(m.into()),
        };
        let g = graph::load(path, override_mode)?;
        *out = Box::into_raw(Box::new(GcdGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `graph` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcd_graph_free(graph: *mut GcdGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcd_graph_num_vertices(graph: *const GcdGraph, out: *mut usize) -> GcdStatus {
    guard(|| {
        *out_ref(out, "out")? = borrow(graph, "graph")?.0.num_vertices();
        Ok(())
    })
}

/// `Deg(x) = (1/m(x)) Σ μ_xy`.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcd_graph_weighted_degree(graph: *const GcdGraph, x: usize, out: *mut f64) -> GcdStatus {
    guard(|| {
        let g = &borrow(graph, "graph")?.0;
        *out_ref(out, "out")? = g.weighted_degree(vertex(g, x)?);
        Ok(())
    })
}

/// `out = Δf`.
///
/// # Safety
/// `f` and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcd_laplacian(graph: *const GcdGraph, f: *const f64, len: usize, out: *mut f64) -> GcdStatus {
    guard(|| {
        let g = &borrow(graph, "graph")?.0;
        let n = g.num_vertices();
        let f = input(f, len, n, "f")?;
        output(out, len, n, "out")?.copy_from_slice(&gamma::laplacian(g, f));
        Ok(())
    })
}

/// `out = Γ(f, h)`.
///
/// # Safety
/// `f`, `h` and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcd_gamma(
    graph: *const GcdGraph,
    f: *const f64,
    h: *const f64,
    len: usize,
    out: *mut f64,
) -> GcdStatus {
    guard(|| {
        let g = &borrow(graph, "graph")?.0;
        let n = g.num_vertices();
        let f = input(f, len, n, "f")?;
        let h = input(h, len, n, "h")?;
        output(out, len, n, "out")?.copy_from_slice(&gamma::gamma(g, f, h));
        Ok(())
    })
}

/// `out = Γ₂(f)`.
///
/// # Safety
/// `f` and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcd_gamma2(graph: *const GcdGraph, f: *const f64, len: usize, out: *mut f64) -> GcdStatus {
    guard(|| {
        let g = &borrow(graph, "graph")?.0;
        let n = g.num_vertices();
        let f = input(f, len, n, "f")?;
        output(out, len, n, "out")?.copy_from_slice(&gamma::gamma2(g, f));
        Ok(())
    })
}

/// Maximal `K` with `CD(K, n)` at `x`. `witness` may be NULL; otherwise it
/// receives `witness_len` (= vertex count) values of a minimizer.
///
/// # Safety
/// `graph` must be a live handle, `k_max` valid, `witness` NULL or
/// pointing to `witness_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcd_curvature_at(
    graph: *const GcdGraph,
    x: usize,
    n: f64,
    k_max: *mut f64,
    witness: *mut f64,
    witness_len: usize,
) -> GcdStatus {
    guard(|| {
        let g = &borrow(graph, "graph")?.0;
        let k_max = out_ref(k_max, "k_max")?;
        let result = curvature::curvature_at(g, vertex(g, x)?, dimension(n)?)?;
        if !witness.is_null() {
            output(witness, witness_len, g.num_vertices(), "witness")?.copy_from_slice(&result.witness);
        }
        *k_max = result.k_max;
        Ok(())
    })
}

/// Checks `CD(K, n)` at `x` with eigenvalue tolerance `tol`.
///
/// # Safety
/// `graph` must be a live handle, `holds` and `min_eig` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gcd_cd_check(
    graph: *const GcdGraph,
    x: usize,
    k: f64,
    n: f64,
    tol: f64,
    holds: *mut bool,
    min_eig: *mut f64,
) -> GcdStatus {
    guard(|| {
        let g = &borrow(graph, "graph")?.0;
        let holds = out_ref(holds, "holds")?;
        let min_eig = out_ref(min_eig, "min_eig")?;
        if !k.is_finite() {
            return Err(Failure::invalid("K must be finite"));
        }
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Failure::invalid("tol must be finite and non-negative"));
        }
        let check = curvature::cd_check(g, vertex(g, x)?, k, dimension(n)?, tol);
        if check.min_eig.is_nan() {
            return Err(Failure(GcdStatus::Numerical, "eigensolver failed".into()));
        }
        *holds = check.holds;
        *min_eig = check.min_eig;
        Ok(())
    })
}

/// Diagonalizes the heat semigroup of `graph`. The result does not borrow
/// the graph.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcd_heat_new(graph: *const GcdGraph, out: *mut *mut GcdHeat) -> GcdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let heat = HeatOperator::new(&borrow(graph, "graph")?.0)?;
        *out = Box::into_raw(Box::new(GcdHeat(heat)));
        Ok(())
    })
}

/// `out = P_t f`.
///
/// # Safety
/// `heat` must be a live handle; `f` and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcd_heat_apply(
    heat: *const GcdHeat,
    t: f64,
    f: *const f64,
    len: usize,
    out: *mut f64,
) -> GcdStatus {
    guard(|| {
        let heat = &borrow(heat, "heat")?.0;
        let n = heat.num_vertices();
        let f = input(f, len, n, "f")?;
        let out = output(out, len, n, "out")?;
        out.copy_from_slice(&heat.apply(t, f)?);
        Ok(())
    })
}

/// # Safety
/// `heat` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcd_heat_free(heat: *mut GcdHeat) {
    if !heat.is_null() {
        drop(Box::from_raw(heat));
    }
}
