//! C interface to `sha-core`.
//!
//! Objects cross the boundary as opaque handles (`ShaGraph`,
//! `ShaHamiltonian`) created by `sha_*` constructors and released with the
//! matching `*_free`. Every fallible call returns a [`ShaStatus`]; on failure
//! `sha_last_error` describes the error for the calling thread. Strings
//! returned through out-parameters are owned by the caller and released
//! with `sha_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sha_core::ansatz::ArchitectureId;
use sha_core::bench::metrics::most_likely_accuracy;
use sha_core::optimize::Shots;
use sha_core::problems::{
    count_proper_colorings, generate_connected, generate_graph, is_connected, parse_fixture, write_fixture,
    GraphInstance,
};
use sha_core::strategies::{
    run_strategy, LlParams, PartitionStrategy, Problem, StrategyKind, StrategySpec, TrainingConfig,
};
use sha_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ResourceLimit = 3,
    Parse = 4,
    Io = 5,
    Utf8 = 6,
    BufferSize = 7,
    Panic = 8,
}

/// Values for `ShaTrainOptions::strategy`.
#[repr(u32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShaStrategy {
    Svqe = 0,
    Sha = 1,
    Ll = 2,
    Lvqe = 3,
    Qaoa = 4,
    ShaLl = 5,
    ShaLvqe = 6,
}

/// Values for `ShaTrainOptions::partition`.
#[repr(u32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShaPartition {
    Random = 0,
    Chronological = 1,
    Nodewise = 2,
}

/// Training request. `architecture` is the catalog number (1, 3, 8, 12, 13,
/// 16, 18); `shots = 0` trains on exact expectations.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ShaTrainOptions {
    pub strategy: u32,
    pub partition: u32,
    pub n_partitions: u32,
    pub architecture: u32,
    pub n_layers: u32,
    pub shots: u32,
    pub max_iters: u32,
    pub qaoa_p: u32,
    pub trailing_fraction: f64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ShaTrainResult {
    pub final_accuracy: f64,
    pub most_likely_accuracy: f64,
    pub best_value: f64,
    pub total_iterations: u64,
    pub n_stages: u32,
    pub n_params: u32,
}

/// Opaque graph handle.
pub struct ShaGraph {
    graph: GraphInstance,
}

/// Opaque coloring-Hamiltonian handle.
pub struct ShaHamiltonian {
    problem: Problem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ShaStatus {
    match e {
        Error::ResourceLimit { .. } | Error::EnumerationCap { .. } => ShaStatus::ResourceLimit,
        Error::Parse { .. } | Error::Config(_) => ShaStatus::Parse,
        Error::Io { .. } => ShaStatus::Io,
        _ => ShaStatus::InvalidArgument,
    }
}

struct Fail(ShaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ShaStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ShaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ShaStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ShaStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    // SAFETY: caller guarantees `p` is null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(ShaStatus::Utf8, "string contains NUL".into()))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next `sha_*` call on this thread.
#[no_mangle]
pub extern "C" fn sha_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Erdős–Rényi graph with `n` nodes and `k` colors; with `connected`, seeds
/// `seed, seed+1, …` are tried until the sample is connected.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sha_graph_generate(
    n: u32,
    p: f64,
    seed: u64,
    k: u32,
    connected: bool,
    out: *mut *mut ShaGraph,
) -> ShaStatus {
    guard(|| {
        let graph = if connected {
            generate_connected(n as usize, p, seed, k as usize, 1, 10_000)?
        } else {
            generate_graph(n as usize, p, seed, k as usize)?
        };
        let h = Box::into_raw(Box::new(ShaGraph { graph }));
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, h, "out") }.inspect_err(|_| {
            // SAFETY: `h` was just created and never shared.
            drop(unsafe { Box::from_raw(h) });
        })
    })
}

/// Parses the fixture text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sha_graph_from_fixture_text(text: *const c_char, out: *mut *mut ShaGraph) -> ShaStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        // SAFETY: non-null NUL-terminated string per the contract.
        let s = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|e| Fail(ShaStatus::Utf8, e.to_string()))?;
        let graph = parse_fixture(s)?;
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: checked non-null.
        unsafe { out.write(Box::into_raw(Box::new(ShaGraph { graph }))) };
        Ok(())
    })
}

/// Serialises a graph to the fixture format (with its solution count).
///
/// # Safety
/// `graph` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sha_graph_to_fixture_text(graph: *const ShaGraph, out: *mut *mut c_char) -> ShaStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let g = unsafe { deref(graph, "graph") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = into_c_string(write_fixture(&g.graph)?)?;
        // SAFETY: checked non-null.
        unsafe { out.write(s) };
        Ok(())
    })
}

/// # Safety
/// `graph` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sha_graph_is_connected(graph: *const ShaGraph, out: *mut bool) -> ShaStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let g = unsafe { deref(graph, "graph") }?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, is_connected(&g.graph), "out") }
    })
}

/// Exhaustive count of proper colorings.
///
/// # Safety
/// `graph` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sha_graph_count_proper_colorings(graph: *const ShaGraph, out: *mut u64) -> ShaStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let g = unsafe { deref(graph, "graph") }?;
        let c = count_proper_colorings(&g.graph)?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, c, "out") }
    })
}

/// # Safety
/// `graph` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sha_graph_free(graph: *mut ShaGraph) {
    if !graph.is_null() {
        // SAFETY: handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// Coloring Hamiltonian of a graph, one block of terms per edge.
///
/// # Safety
/// `graph` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sha_hamiltonian_from_graph(graph: *const ShaGraph, out: *mut *mut ShaHamiltonian) -> ShaStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let g = unsafe { deref(graph, "graph") }?;
        let problem = Problem::from_graph("ffi", g.graph.clone())?;
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: checked non-null.
        unsafe { out.write(Box::into_raw(Box::new(ShaHamiltonian { problem }))) };
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sha_hamiltonian_num_terms(h: *const ShaHamiltonian, out: *mut usize) -> ShaStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let h = unsafe { deref(h, "hamiltonian") }?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, h.problem.terms.len(), "out") }
    })
}

/// # Safety
/// `h` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sha_hamiltonian_num_qubits(h: *const ShaHamiltonian, out: *mut usize) -> ShaStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let h = unsafe { deref(h, "hamiltonian") }?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, h.problem.n_qubits(), "out") }
    })
}

/// One term per line, e.g. `4.0 Z0 Z2`.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sha_hamiltonian_to_text(h: *const ShaHamiltonian, out: *mut *mut c_char) -> ShaStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let h = unsafe { deref(h, "hamiltonian") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = into_c_string(h.problem.terms.to_text())?;
        // SAFETY: checked non-null.
        unsafe { out.write(s) };
        Ok(())
    })
}

/// Writes the `2^n` diagonal entries into `buf`; `len` must equal `2^n`.
///
/// # Safety
/// `h` must be a live handle; `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn sha_hamiltonian_diagonal(h: *const ShaHamiltonian, buf: *mut f64, len: usize) -> ShaStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let h = unsafe { deref(h, "hamiltonian") }?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let diag = h.problem.terms.diagonal()?;
        if diag.len() != len {
            return Err(Fail(
                ShaStatus::BufferSize,
                format!("buffer holds {len} entries, need {}", diag.len()),
            ));
        }
        // SAFETY: `buf` is valid for `len` writes and does not alias `diag`.
        unsafe { ptr::copy_nonoverlapping(diag.as_ptr(), buf, len) };
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sha_hamiltonian_free(h: *mut ShaHamiltonian) {
    if !h.is_null() {
        // SAFETY: handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// SVQE on A3 with three layers, 200 shots, 4000 evaluations, seed 0.
#[no_mangle]
pub extern "C" fn sha_train_options_default() -> ShaTrainOptions {
    ShaTrainOptions {
        strategy: ShaStrategy::Svqe as u32,
        partition: ShaPartition::Nodewise as u32,
        n_partitions: 1,
        architecture: 3,
        n_layers: 3,
        shots: 200,
        max_iters: 4000,
        qaoa_p: 3,
        trailing_fraction: 0.02,
        seed: 0,
    }
}

fn spec_from(o: &ShaTrainOptions) -> Result<(StrategySpec, ArchitectureId), Fail> {
    let bad = |m: String| Fail(ShaStatus::InvalidArgument, m);
    let kind = match o.strategy {
        0 => StrategyKind::Svqe,
        1 => StrategyKind::Sha,
        2 => StrategyKind::Ll,
        3 => StrategyKind::Lvqe,
        4 => StrategyKind::Qaoa,
        5 => StrategyKind::ShaLl,
        6 => StrategyKind::ShaLvqe,
        s => return Err(bad(format!("unknown strategy {s}"))),
    };
    let partition = match o.partition {
        0 => PartitionStrategy::Random,
        1 => PartitionStrategy::Chronological,
        2 => PartitionStrategy::Nodewise,
        p => return Err(bad(format!("unknown partition {p}"))),
    };
    let arch: ArchitectureId = o.architecture.to_string().parse()?;
    let spec = StrategySpec {
        kind,
        partition_strategy: kind.uses_partition().then_some(partition),
        n_partitions: kind.uses_partition().then_some(o.n_partitions as usize),
        per_stage_max_iters: Vec::new(),
        ll_params: kind.uses_ll_params().then(LlParams::default),
        qaoa_p: (kind == StrategyKind::Qaoa).then_some(o.qaoa_p as usize),
    };
    spec.validate()?;
    Ok((spec, arch))
}

/// Trains one run on the graph's coloring Hamiltonian.
///
/// # Safety
/// `graph` must be a live handle, `options` readable, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sha_train(
    graph: *const ShaGraph,
    options: *const ShaTrainOptions,
    out: *mut ShaTrainResult,
) -> ShaStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let g = unsafe { deref(graph, "graph") }?;
        // SAFETY: forwarded caller contract.
        let o = unsafe { deref(options, "options") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (spec, arch) = spec_from(o)?;
        let problem = Problem::from_graph("ffi", g.graph.clone())?;
        let cfg = TrainingConfig {
            shots: if o.shots == 0 {
                Shots::Exact
            } else {
                Shots::Count(o.shots as usize)
            },
            max_iters: o.max_iters as usize,
            seed: o.seed,
            ..Default::default()
        };
        let record = run_strategy(&spec, &problem, arch, o.n_layers as usize, &cfg)?;
        let flags: Vec<bool> = record.metric_trace.iter().map(|m| m.most_likely_correct).collect();
        let result = ShaTrainResult {
            final_accuracy: record.final_accuracy.unwrap_or(f64::NAN),
            most_likely_accuracy: most_likely_accuracy(&flags, o.trailing_fraction)?,
            best_value: record.stages.last().map_or(f64::NAN, |s| s.result.best_value),
            total_iterations: record.total_iterations as u64,
            n_stages: record.stages.len() as u32,
            n_params: record.final_params.len() as u32,
        };
        // SAFETY: checked non-null.
        unsafe { out.write(result) };
        Ok(())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sha_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: came from CString::into_raw and is freed once.
        drop(unsafe { CString::from_raw(s) });
    }
}
