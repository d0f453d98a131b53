#ifndef CONDENT_H
#define CONDENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result code of every fallible call.
 */
typedef enum CondentStatus {
  CONDENT_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  CONDENT_STATUS_NULL_POINTER = 1,
  /*
   Weights, labels or parameters were rejected.
   */
  CONDENT_STATUS_INVALID_ARGUMENT = 2,
  /*
   A partition or event does not fit the space it was used with.
   */
  CONDENT_STATUS_SIZE_MISMATCH = 3,
  /*
   A size or count is outside the supported range.
   */
  CONDENT_STATUS_OUT_OF_RANGE = 4,
  /*
   A numeric failure, such as a violated absolute-continuity condition.
   */
  CONDENT_STATUS_NUMERIC = 5,
  /*
   The library panicked; this is a bug.
   */
  CONDENT_STATUS_INTERNAL = 6,
} CondentStatus;

/*
 Opaque partition of `{0, .., n-1}`.
 */
typedef struct CondentPartition CondentPartition;

/*
 Opaque finite probability space.
 */
typedef struct CondentSpace CondentSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer is
 valid until the next call into the library from this thread.
 */
const char *condent_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *condent_version(void);

/*
 Builds a space from `len` weights summing to one.

 # Safety
 `weights` must point to `len` readable doubles; `out` must be writable.
 */
enum CondentStatus condent_space_new(const double *weights, size_t len, struct CondentSpace **out);

/*
 Uniform space on `len` outcomes.

 # Safety
 `out` must be writable.
 */
enum CondentStatus condent_space_uniform(size_t len, struct CondentSpace **out);

/*
 Number of outcomes, or 0 for a null handle.

 # Safety
 `space` must be null or a live handle.
 */
size_t condent_space_len(const struct CondentSpace *space);

/*
 Releases a space; null is ignored.

 # Safety
 `space` must be null or a handle not yet freed.
 */
void condent_space_free(struct CondentSpace *space);

/*
 Partition grouping outcomes with equal labels.

 # Safety
 `labels` must point to `len` readable values; `out` must be writable.
 */
enum CondentStatus condent_partition_from_labels(const size_t *labels,
                                                 size_t len,
                                                 struct CondentPartition **out);

/*
 Partition into singletons.

 # Safety
 `out` must be writable.
 */
enum CondentStatus condent_partition_points(size_t len, struct CondentPartition **out);

/*
 Partition with a single block.

 # Safety
 `out` must be writable.
 */
enum CondentStatus condent_partition_trivial(size_t len, struct CondentPartition **out);

/*
 Number of outcomes covered, or 0 for a null handle.

 # Safety
 `p` must be null or a live handle.
 */
size_t condent_partition_size(const struct CondentPartition *p);

/*
 Number of blocks, or 0 for a null handle.

 # Safety
 `p` must be null or a live handle.
 */
size_t condent_partition_num_blocks(const struct CondentPartition *p);

/*
 Writes the canonical block index of each outcome into `labels`, which
 must hold exactly `condent_partition_size(p)` entries.

 # Safety
 `p` must be a live handle; `labels` must point to `len` writable values.
 */
enum CondentStatus condent_partition_labels(const struct CondentPartition *p,
                                            size_t *labels,
                                            size_t len);

/*
 Releases a partition; null is ignored.

 # Safety
 `p` must be null or a handle not yet freed.
 */
void condent_partition_free(struct CondentPartition *p);

/*
 Common refinement of `xi` and `eta`.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CondentStatus condent_join(const struct CondentPartition *xi,
                                const struct CondentPartition *eta,
                                struct CondentPartition **out);

/*
 Finest common coarsening of `xi` and `eta`.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CondentStatus condent_meet(const struct CondentPartition *xi,
                                const struct CondentPartition *eta,
                                struct CondentPartition **out);

/*
 Whether `xi <= eta` up to null outcomes of `space`.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CondentStatus condent_refines(const struct CondentSpace *space,
                                   const struct CondentPartition *xi,
                                   const struct CondentPartition *eta,
                                   bool *out);

/*
 `H(xi | eta)` in nats.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CondentStatus condent_cond_entropy(const struct CondentSpace *space,
                                        const struct CondentPartition *xi,
                                        const struct CondentPartition *eta,
                                        double *out);

/*
 Supremum of `H(xi | eta)` over partitions with atoms from `a`, in nats.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CondentStatus condent_max_cond_entropy(const struct CondentSpace *space,
                                            const struct CondentPartition *a,
                                            const struct CondentPartition *eta,
                                            double *out);

/*
 Bell number `B_n` for `1 <= n <= 20`.

 # Safety
 `out` must be writable.
 */
enum CondentStatus condent_bell(size_t n, uint64_t *out);

/*
 Error `P(A △ B)` of the best approximation of the event with the given
 `count` members by a union of `a_n`-blocks.

 # Safety
 Handles must be live; `members` must point to `count` readable values;
 `out` must be writable.
 */
enum CondentStatus condent_best_approximation_error(const struct CondentSpace *space,
                                                    const size_t *members,
                                                    size_t count,
                                                    const struct CondentPartition *a_n,
                                                    double *out);

/*
 Largest best-approximation error over all unions of `a`-blocks.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum CondentStatus condent_worst_case_error(const struct CondentSpace *space,
                                            const struct CondentPartition *a,
                                            const struct CondentPartition *a_n,
                                            double *out);

/*
 `ln L_n^theta` of a 0/1 path under the Bernoulli model with true
 parameter `theta0`. A zero factor gives negative infinity.

 # Safety
 `path` must point to `len` readable values; `out` must be writable.
 */
enum CondentStatus condent_bernoulli_log_lr(double theta0,
                                            double theta,
                                            const size_t *path,
                                            size_t len,
                                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONDENT_H */
