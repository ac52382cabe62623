/* SPDX-License-Identifier: Apache-2.0 */

#ifndef TANGLE_SIM_H
#define TANGLE_SIM_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Parent slots in [`TsRecord`]; equals the ledger's arity bound.
#define TS_MAX_PARENTS 8

// Result codes. The first four match the command-line exit statuses.
typedef enum TsStatus {
  TS_STATUS_OK = 0,
  TS_STATUS_CONFIG_INVALID = 1,
  TS_STATUS_IO_FAILURE = 2,
  TS_STATUS_ORACLE_MISMATCH = 3,
  TS_STATUS_NULL_POINTER = 4,
  TS_STATUS_INVALID_ARGUMENT = 5,
  TS_STATUS_OUT_OF_RANGE = 6,
  TS_STATUS_UNKNOWN_PARENT = 7,
  TS_STATUS_PARENT_ARITY = 8,
  TS_STATUS_TIME_REGRESSION = 9,
  TS_STATUS_UNKNOWN_TRANSACTION = 10,
  TS_STATUS_WORKLOAD_MISMATCH = 11,
  TS_STATUS_PANIC = 12,
} TsStatus;

typedef enum TsStrategy {
  TS_STRATEGY_UNIFORM = 0,
  TS_STRATEGY_PTSA = 1,
} TsStrategy;

typedef enum TsClass {
  TS_CLASS_PRIORITY = 0,
  TS_CLASS_COMMON = 1,
} TsClass;

// Opaque simulation configuration.
typedef struct TsConfig TsConfig;

// Opaque ledger for driving the DAG directly.
typedef struct TsTangle TsTangle;

// Opaque completed simulation trace.
typedef struct TsTrace TsTrace;

// One transaction lifecycle record. `parents[..parent_count]` is valid.
typedef struct TsRecord {
  uint64_t id;
  enum TsClass class_;
  double issued_at;
  bool confirmed;
  // Meaningful only when `confirmed`.
  double confirmed_at;
  uint32_t parent_count;
  uint64_t parents[TS_MAX_PARENTS];
} TsRecord;

// Latency fields are meaningful only when `confirmed > 0`.
typedef struct TsClassStats {
  uint64_t issued;
  uint64_t confirmed;
  double mean_latency;
  double median_latency;
  double p95_latency;
  double unconfirmed_fraction;
} TsClassStats;

typedef struct TsComparison {
  bool has_latency_reduction;
  double latency_reduction;
  double starvation_delta;
  bool ptsa_wins;
} TsComparison;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *ts_last_error_message(void);

// The reference configuration. Free with [`ts_config_free`].
struct TsConfig *ts_config_default(void);

// Parses and validates TOML configuration text.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum TsStatus ts_config_from_toml(const char *text, struct TsConfig **out);

// Loads and validates a TOML configuration file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum TsStatus ts_config_load(const char *path, struct TsConfig **out);

// # Safety
// `config` must be a live handle from this library.
enum TsStatus ts_config_set_seed(struct TsConfig *config, uint64_t seed);

// # Safety
// `config` must be a live handle from this library.
enum TsStatus ts_config_set_strategy(struct TsConfig *config, enum TsStrategy strategy);

// # Safety
// `config` must be NULL or a handle from this library not yet freed.
void ts_config_free(struct TsConfig *config);

// Runs one simulation with the configured strategy.
//
// # Safety
// `config` must be a live handle and `out` a valid pointer.
enum TsStatus ts_simulate(const struct TsConfig *config, struct TsTrace **out);

// Runs the configured workload under the uniform baseline and under ptsa.
//
// # Safety
// `config` must be a live handle; `uniform` and `ptsa` valid pointers.
enum TsStatus ts_paired_runs(const struct TsConfig *config,
                             struct TsTrace **uniform,
                             struct TsTrace **ptsa);

// Number of records (genesis excluded). Zero for NULL.
//
// # Safety
// `trace` must be NULL or a live handle.
size_t ts_trace_len(const struct TsTrace *trace);

// # Safety
// `trace` must be a live handle and `out` a valid pointer.
enum TsStatus ts_trace_record(const struct TsTrace *trace, size_t index, struct TsRecord *out);

// # Safety
// `trace` must be a live handle and `out` a valid pointer.
enum TsStatus ts_trace_class_stats(const struct TsTrace *trace,
                                   enum TsClass class_,
                                   struct TsClassStats *out);

// # Safety
// Both traces must be live handles and `out` a valid pointer.
enum TsStatus ts_compare(const struct TsTrace *uniform,
                         const struct TsTrace *ptsa,
                         struct TsComparison *out);

// Writes the trace CSV to `path`.
//
// # Safety
// `trace` must be a live handle and `path` a NUL-terminated string.
enum TsStatus ts_trace_export_csv(const struct TsTrace *trace, const char *path);

// Writes the run summary JSON to `path`.
//
// # Safety
// `trace` must be a live handle and `path` a NUL-terminated string.
enum TsStatus ts_trace_export_summary_json(const struct TsTrace *trace, const char *path);

// Writes the comparison report JSON for a pair of traces to `path`.
//
// # Safety
// Both traces must be live handles and `path` a NUL-terminated string.
enum TsStatus ts_compare_export_json(const struct TsTrace *uniform,
                                     const struct TsTrace *ptsa,
                                     const char *path);

// # Safety
// `trace` must be NULL or a handle from this library not yet freed.
void ts_trace_free(struct TsTrace *trace);

// A ledger holding only genesis (id 0). Free with [`ts_tangle_free`].
struct TsTangle *ts_tangle_new(void);

// Appends a transaction approving `parents[..count]`.
//
// # Safety
// `tangle` must be a live handle, `parents` must point to `count` ids, and
// `out_id` must be a valid pointer.
enum TsStatus ts_tangle_add(struct TsTangle *tangle,
                            const uint64_t *parents,
                            size_t count,
                            double issued_at,
                            bool priority_flag,
                            uint64_t *out_id);

// # Safety
// `tangle` must be a live handle and `out` a valid pointer.
enum TsStatus ts_tangle_cumulative_weight(const struct TsTangle *tangle,
                                          uint64_t id,
                                          uint64_t *out);

// Confirms every transaction whose weight reached `theta`; writes how many
// became confirmed.
//
// # Safety
// `tangle` must be a live handle and `newly_confirmed` a valid pointer.
enum TsStatus ts_tangle_sweep(struct TsTangle *tangle,
                              uint64_t theta,
                              double now,
                              size_t *newly_confirmed);

// # Safety
// `tangle` must be a live handle and `out` a valid pointer.
enum TsStatus ts_tangle_is_confirmed(const struct TsTangle *tangle, uint64_t id, bool *out);

// Copies up to `capacity` tip ids in ascending order into `buffer` and
// writes the total tip count to `total`.
//
// # Safety
// `tangle` must be a live handle, `buffer` must have room for `capacity`
// ids (or be NULL with `capacity == 0`), and `total` a valid pointer.
enum TsStatus ts_tangle_tips(const struct TsTangle *tangle,
                             uint64_t *buffer,
                             size_t capacity,
                             size_t *total);

// # Safety
// `tangle` must be NULL or a handle from this library not yet freed.
void ts_tangle_free(struct TsTangle *tangle);

// Runs the brute-force weight check over `trials` random DAGs of at most
// `max_size` transactions plus the selection branch table.
enum TsStatus ts_self_check(uint64_t seed, size_t trials, size_t max_size);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TANGLE_SIM_H */
