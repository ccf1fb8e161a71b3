#ifndef QORDER_H
#define QORDER_H

#include <stdint.h>

#define QORDER_OK 0

#define QORDER_ERR_NULL_POINTER 1

#define QORDER_ERR_INVALID_UTF8 2

#define QORDER_ERR_INVALID_ARGUMENT 3

#define QORDER_ERR_PARSE 4

#define QORDER_ERR_MODEL 5

#define QORDER_ERR_NUMERIC 6

#define QORDER_ERR_REFUSED 7

#define QORDER_ERR_IO 8

#define QORDER_ERR_INCONSISTENT 9

#define QORDER_ERR_PANIC 99

#define QORDER_METHOD_THEOREM 0

#define QORDER_METHOD_THEOREM_ONLY 1

#define QORDER_METHOD_ORACLE 2

#define QORDER_METHOD_BOTH 3

#define QORDER_ORDER_CONVEX 0

#define QORDER_ORDER_STAR 1

#define QORDER_ORDER_QMIT 2

#define QORDER_ORDER_DMRL 3

#define QORDER_ORDER_PS 4

#define QORDER_ORDER_NBUE 5

#define QORDER_STATUS_HOLDS 0

#define QORDER_STATUS_HOLDS_REVERSED 1

#define QORDER_STATUS_BOTH_DIRECTIONS_FAIL 2

#define QORDER_STATUS_EQUIVALENT 3

#define QORDER_STATUS_INCONCLUSIVE 4

// Opaque handle to a quantile model.
typedef struct QorderModel QorderModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a success.
// The pointer stays valid until the next library call on the same thread.
const char *qorder_last_error(void);

// Parses a model spec such as `tukey:4,1,2.5` or `exp1`.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` a valid pointer.
int32_t qorder_model_from_spec(const char *spec, struct QorderModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `m` must come from `qorder_model_from_spec` and not be used afterwards.
void qorder_model_free(struct QorderModel *m);

// # Safety
// `m` must be a live model and `out` a valid pointer.
int32_t qorder_model_quantile(const struct QorderModel *m, double p, double *out);

// # Safety
// `m` must be a live model and `out` a valid pointer.
int32_t qorder_model_quantile_density(const struct QorderModel *m, double p, double *out);

// # Safety
// `m` must be a live model and `out` a valid pointer.
int32_t qorder_model_mean(const struct QorderModel *m, double *out);

// Verdict for a single order. `grid = 0` selects the default size.
//
// # Safety
// `x` and `y` must be live models and `status` a valid pointer.
int32_t qorder_compare_order(const struct QorderModel *x,
                             const struct QorderModel *y,
                             int32_t order,
                             int32_t method,
                             uint32_t grid,
                             int32_t *status);

// Full comparison report as JSON. Free the string with `qorder_string_free`.
//
// # Safety
// `x` and `y` must be live models and `json` a valid pointer.
int32_t qorder_compare_json(const struct QorderModel *x,
                            const struct QorderModel *y,
                            int32_t method,
                            uint32_t grid,
                            char **json);

// Aging report of `x` against the unit exponential, as JSON.
//
// # Safety
// `x` must be a live model and `json` a valid pointer.
int32_t qorder_aging_json(const struct QorderModel *x, uint32_t grid, char **json);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void qorder_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QORDER_H */
