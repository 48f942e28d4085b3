/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef SHA_FFI_H
#define SHA_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum ShaStatus {
  SHA_STATUS_OK = 0,
  SHA_STATUS_NULL_POINTER = 1,
  SHA_STATUS_INVALID_ARGUMENT = 2,
  SHA_STATUS_RESOURCE_LIMIT = 3,
  SHA_STATUS_PARSE = 4,
  SHA_STATUS_IO = 5,
  SHA_STATUS_UTF8 = 6,
  SHA_STATUS_BUFFER_SIZE = 7,
  SHA_STATUS_PANIC = 8,
} ShaStatus;

// Values for `ShaTrainOptions::strategy`.
enum ShaStrategy
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : uint32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  SHA_STRATEGY_SVQE = 0,
  SHA_STRATEGY_SHA = 1,
  SHA_STRATEGY_LL = 2,
  SHA_STRATEGY_LVQE = 3,
  SHA_STRATEGY_QAOA = 4,
  SHA_STRATEGY_SHA_LL = 5,
  SHA_STRATEGY_SHA_LVQE = 6,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum ShaStrategy ShaStrategy;
#else
typedef uint32_t ShaStrategy;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Values for `ShaTrainOptions::partition`.
enum ShaPartition
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : uint32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  SHA_PARTITION_RANDOM = 0,
  SHA_PARTITION_CHRONOLOGICAL = 1,
  SHA_PARTITION_NODEWISE = 2,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum ShaPartition ShaPartition;
#else
typedef uint32_t ShaPartition;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Opaque graph handle.
typedef struct ShaGraph ShaGraph;

// Opaque coloring-Hamiltonian handle.
typedef struct ShaHamiltonian ShaHamiltonian;

// Training request. `architecture` is the catalog number (1, 3, 8, 12, 13,
// 16, 18); `shots = 0` trains on exact expectations.
typedef struct ShaTrainOptions {
  uint32_t strategy;
  uint32_t partition;
  uint32_t n_partitions;
  uint32_t architecture;
  uint32_t n_layers;
  uint32_t shots;
  uint32_t max_iters;
  uint32_t qaoa_p;
  double trailing_fraction;
  uint64_t seed;
} ShaTrainOptions;

typedef struct ShaTrainResult {
  double final_accuracy;
  double most_likely_accuracy;
  double best_value;
  uint64_t total_iterations;
  uint32_t n_stages;
  uint32_t n_params;
} ShaTrainResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next `sha_*` call on this thread.
const char *sha_last_error(void);

// Erdős–Rényi graph with `n` nodes and `k` colors; with `connected`, seeds
// `seed, seed+1, …` are tried until the sample is connected.
//
// # Safety
// `out` must be valid for writes.
enum ShaStatus sha_graph_generate(uint32_t n,
                                  double p,
                                  uint64_t seed,
                                  uint32_t k,
                                  bool connected,
                                  struct ShaGraph **out);

// Parses the fixture text format.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be valid for writes.
enum ShaStatus sha_graph_from_fixture_text(const char *text, struct ShaGraph **out);

// Serialises a graph to the fixture format (with its solution count).
//
// # Safety
// `graph` must be a live handle; `out` must be valid for writes.
enum ShaStatus sha_graph_to_fixture_text(const struct ShaGraph *graph, char **out);

// # Safety
// `graph` must be a live handle; `out` must be valid for writes.
enum ShaStatus sha_graph_is_connected(const struct ShaGraph *graph, bool *out);

// Exhaustive count of proper colorings.
//
// # Safety
// `graph` must be a live handle; `out` must be valid for writes.
enum ShaStatus sha_graph_count_proper_colorings(const struct ShaGraph *graph, uint64_t *out);

// # Safety
// `graph` must be null or a handle not yet freed.
void sha_graph_free(struct ShaGraph *graph);

// Coloring Hamiltonian of a graph, one block of terms per edge.
//
// # Safety
// `graph` must be a live handle; `out` must be valid for writes.
enum ShaStatus sha_hamiltonian_from_graph(const struct ShaGraph *graph,
                                          struct ShaHamiltonian **out);

// # Safety
// `h` must be a live handle; `out` must be valid for writes.
enum ShaStatus sha_hamiltonian_num_terms(const struct ShaHamiltonian *h, size_t *out);

// # Safety
// `h` must be a live handle; `out` must be valid for writes.
enum ShaStatus sha_hamiltonian_num_qubits(const struct ShaHamiltonian *h, size_t *out);

// One term per line, e.g. `4.0 Z0 Z2`.
//
// # Safety
// `h` must be a live handle; `out` must be valid for writes.
enum ShaStatus sha_hamiltonian_to_text(const struct ShaHamiltonian *h, char **out);

// Writes the `2^n` diagonal entries into `buf`; `len` must equal `2^n`.
//
// # Safety
// `h` must be a live handle; `buf` must be valid for `len` writes.
enum ShaStatus sha_hamiltonian_diagonal(const struct ShaHamiltonian *h, double *buf, size_t len);

// # Safety
// `h` must be null or a handle not yet freed.
void sha_hamiltonian_free(struct ShaHamiltonian *h);

// SVQE on A3 with three layers, 200 shots, 4000 evaluations, seed 0.
struct ShaTrainOptions sha_train_options_default(void);

// Trains one run on the graph's coloring Hamiltonian.
//
// # Safety
// `graph` must be a live handle, `options` readable, `out` valid for writes.
enum ShaStatus sha_train(const struct ShaGraph *graph,
                         const struct ShaTrainOptions *options,
                         struct ShaTrainResult *out);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void sha_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHA_FFI_H */
