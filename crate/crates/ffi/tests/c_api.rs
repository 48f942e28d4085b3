use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use sha_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sha_last_error()) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { sha_string_free(p) };
    s
}

#[test]
fn graph_round_trip_and_counting() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sha_graph_generate(4, 0.6, 1000, 4, true, &mut g) }, ShaStatus::Ok);
    let mut connected = false;
    assert_eq!(unsafe { sha_graph_is_connected(g, &mut connected) }, ShaStatus::Ok);
    assert!(connected);
    let mut count = 0u64;
    assert_eq!(unsafe { sha_graph_count_proper_colorings(g, &mut count) }, ShaStatus::Ok);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { sha_graph_to_fixture_text(g, &mut text) }, ShaStatus::Ok);
    let text = take_string(text);
    assert!(text.contains(&format!("solutions={count} ")));

    let c = CString::new(text.clone()).unwrap();
    let mut g2 = ptr::null_mut();
    assert_eq!(unsafe { sha_graph_from_fixture_text(c.as_ptr(), &mut g2) }, ShaStatus::Ok);
    let mut text2 = ptr::null_mut();
    assert_eq!(unsafe { sha_graph_to_fixture_text(g2, &mut text2) }, ShaStatus::Ok);
    assert_eq!(take_string(text2), text);
    unsafe {
        sha_graph_free(g);
        sha_graph_free(g2);
    }
}

#[test]
fn hamiltonian_diagonal_counts_conflicts() {
    let fixture = CString::new("nodes=2 colors=4 p=1.0 seed=0\nedge 0 1\nsolutions=12 ratio=0.75\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sha_graph_from_fixture_text(fixture.as_ptr(), &mut g) }, ShaStatus::Ok);
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { sha_hamiltonian_from_graph(g, &mut h) }, ShaStatus::Ok);
    let (mut terms, mut qubits) = (0usize, 0usize);
    assert_eq!(unsafe { sha_hamiltonian_num_terms(h, &mut terms) }, ShaStatus::Ok);
    assert_eq!(unsafe { sha_hamiltonian_num_qubits(h, &mut qubits) }, ShaStatus::Ok);
    assert_eq!((terms, qubits), (4, 4));
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { sha_hamiltonian_to_text(h, &mut text) }, ShaStatus::Ok);
    assert_eq!(take_string(text), "4.0 I\n4.0 Z0 Z1 Z2 Z3\n4.0 Z0 Z2\n4.0 Z1 Z3\n");

    let mut diag = vec![0.0; 16];
    assert_eq!(unsafe { sha_hamiltonian_diagonal(h, diag.as_mut_ptr(), 16) }, ShaStatus::Ok);
    for (b, d) in diag.iter().enumerate() {
        let same = (b & 0b11) == (b >> 2);
        assert_eq!(*d, if same { 16.0 } else { 0.0 }, "basis {b}");
    }
    let mut small = vec![0.0; 8];
    assert_eq!(unsafe { sha_hamiltonian_diagonal(h, small.as_mut_ptr(), 8) }, ShaStatus::BufferSize);
    assert!(last_error().contains("16"));
    unsafe {
        sha_hamiltonian_free(h);
        sha_graph_free(g);
    }
}

#[test]
fn errors_are_reported() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sha_graph_generate(4, 0.5, 0, 3, false, &mut g) }, ShaStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { sha_graph_generate(4, 0.5, 0, 4, false, ptr::null_mut()) }, ShaStatus::NullPointer);
    let mut connected = false;
    assert_eq!(unsafe { sha_graph_is_connected(ptr::null(), &mut connected) }, ShaStatus::NullPointer);
    let bad = CString::new("nodes=two\n").unwrap();
    assert_eq!(unsafe { sha_graph_from_fixture_text(bad.as_ptr(), &mut g) }, ShaStatus::Parse);
    assert_eq!(unsafe { sha_graph_from_fixture_text(ptr::null(), &mut g) }, ShaStatus::NullPointer);

    let big = CString::new("nodes=14 colors=4 p=0.0 seed=0\nsolutions=0 ratio=0\n").unwrap();
    let mut gb = ptr::null_mut();
    if unsafe { sha_graph_from_fixture_text(big.as_ptr(), &mut gb) } == ShaStatus::Ok {
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { sha_hamiltonian_from_graph(gb, &mut h) }, ShaStatus::ResourceLimit);
        assert!(h.is_null());
        unsafe { sha_graph_free(gb) };
    }

    unsafe {
        sha_graph_free(ptr::null_mut());
        sha_hamiltonian_free(ptr::null_mut());
        sha_string_free(ptr::null_mut());
    }
    // success clears the message
    assert_eq!(unsafe { sha_graph_generate(3, 0.5, 0, 2, false, &mut g) }, ShaStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { sha_graph_free(g) };
}

#[test]
fn train_through_the_c_interface() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sha_graph_generate(3, 0.9, 5, 2, true, &mut g) }, ShaStatus::Ok);
    let mut opts = sha_train_options_default();
    opts.strategy = ShaStrategy::Sha as u32;
    opts.partition = ShaPartition::Nodewise as u32;
    opts.n_partitions = 2;
    opts.architecture = 1;
    opts.n_layers = 2;
    opts.max_iters = 200;
    opts.seed = 3;
    let mut a = ShaTrainResult::default();
    let mut b = ShaTrainResult::default();
    assert_eq!(unsafe { sha_train(g, &opts, &mut a) }, ShaStatus::Ok);
    assert_eq!(unsafe { sha_train(g, &opts, &mut b) }, ShaStatus::Ok);
    assert_eq!(a.n_stages, 2);
    assert_eq!(a.n_params, 2 * 2 * 3);
    assert!((0.0..=1.0).contains(&a.final_accuracy));
    assert_eq!(a.final_accuracy.to_bits(), b.final_accuracy.to_bits());
    assert_eq!(a.total_iterations, b.total_iterations);

    opts.strategy = 42;
    assert_eq!(unsafe { sha_train(g, &opts, &mut a) }, ShaStatus::InvalidArgument);
    opts.strategy = ShaStrategy::Svqe as u32;
    opts.architecture = 7;
    assert_eq!(unsafe { sha_train(g, &opts, &mut a) }, ShaStatus::InvalidArgument);
    unsafe { sha_graph_free(g) };
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/sha_ffi.h")).unwrap();
    for sym in [
        "sha_last_error",
        "sha_graph_generate",
        "sha_graph_from_fixture_text",
        "sha_graph_to_fixture_text",
        "sha_graph_is_connected",
        "sha_graph_count_proper_colorings",
        "sha_graph_free",
        "sha_hamiltonian_from_graph",
        "sha_hamiltonian_num_terms",
        "sha_hamiltonian_num_qubits",
        "sha_hamiltonian_to_text",
        "sha_hamiltonian_diagonal",
        "sha_hamiltonian_free",
        "sha_train_options_default",
        "sha_train",
        "sha_string_free",
        "typedef struct ShaGraph ShaGraph",
        "SHA_STATUS_OK = 0",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "sha_ffi.h"

int main(void) {
    ShaGraph *g = NULL;
    if (sha_graph_generate(4, 0.6, 1000, 4, true, &g) != SHA_STATUS_OK) return 1;
    uint64_t count = 0;
    if (sha_graph_count_proper_colorings(g, &count) != SHA_STATUS_OK) return 2;
    ShaHamiltonian *h = NULL;
    if (sha_hamiltonian_from_graph(g, &h) != SHA_STATUS_OK) return 3;
    size_t n = 0;
    sha_hamiltonian_num_qubits(h, &n);
    double diag[256];
    if (sha_hamiltonian_diagonal(h, diag, 256) != SHA_STATUS_OK) return 4;
    uint64_t zeros = 0;
    for (int i = 0; i < 256; i++) if (diag[i] == 0.0) zeros++;
    if (sha_graph_generate(4, 0.6, 0, 4, false, NULL) != SHA_STATUS_NULL_POINTER) return 5;
    printf("%llu %llu %zu\n", (unsigned long long)count, (unsigned long long)zeros, n);
    sha_hamiltonian_free(h);
    sha_graph_free(g);
    return 0;
}
"#;

/// Directory holding the static library built alongside this test.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = artifact_dir().join("libsha_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let exe = dir.path().join("main");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<&str> = text.split_whitespace().collect();
    // zero-energy basis states are exactly the proper colorings
    assert_eq!(fields[0], fields[1]);
    assert_eq!(fields[2], "8");
}
