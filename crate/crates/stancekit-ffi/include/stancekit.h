#ifndef STANCEKIT_H
#define STANCEKIT_H

/* Generated by cbindgen from the stancekit-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by the fallible C entry points.
typedef enum SktStatus {
  // The call succeeded.
  SKT_STATUS_OK = 0,
  // A required pointer argument was null.
  SKT_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  SKT_STATUS_INVALID_UTF8 = 2,
  // An output buffer was too small; see `skt_last_error`.
  SKT_STATUS_BUFFER_TOO_SMALL = 3,
  // The operation failed; see `skt_last_error`.
  SKT_STATUS_FAILURE = 4,
} SktStatus;

// A loaded stance classifier: configuration, lexicons, and a trained model
// for one topic. Create with `skt_classifier_new`, release with
// `skt_classifier_free`.
typedef struct SktClassifier SktClassifier;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the underlying library as a static NUL-terminated string.
const char *skt_version(void);

// Message for the calling thread's most recent failure, or an empty string
// if the last call on this thread succeeded. The pointer stays valid until
// the next call into this library from the same thread; never free it.
const char *skt_last_error(void);

// Load a classifier for `topic` from a run configuration and a trained model
// file. Returns null on failure; `skt_last_error` explains why.
//
// # Safety
// All three arguments must be NUL-terminated strings or null.
struct SktClassifier *skt_classifier_new(const char *config_path,
                                         const char *topic,
                                         const char *model_path);

// Predict the stance of one text. Returns a static label string (`"FAVOR"`,
// `"AGAINST"`, or `"NONE"`), or null on failure.
//
// # Safety
// `classifier` must come from `skt_classifier_new` and not have been freed;
// `text` must be a NUL-terminated string or null.
const char *skt_classifier_predict(const struct SktClassifier *classifier, const char *text);

// Write the model's log-joint score for each of FAVOR, AGAINST, and NONE
// (in that order) into `out_scores`. Classes absent from the trained model
// receive negative infinity. `out_len` must be at least 3.
//
// # Safety
// `classifier` must come from `skt_classifier_new` and not have been freed;
// `text` must be a NUL-terminated string or null; `out_scores` must point to
// at least `out_len` writable doubles.
enum SktStatus skt_classifier_scores(const struct SktClassifier *classifier,
                                     const char *text,
                                     double *out_scores,
                                     size_t out_len);

// Release a classifier created by `skt_classifier_new`. Passing null is a
// no-op.
//
// # Safety
// `classifier` must be null or a pointer returned by `skt_classifier_new`
// that has not already been freed.
void skt_classifier_free(struct SktClassifier *classifier);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STANCEKIT_H */
