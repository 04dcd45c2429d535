#ifndef GRAYFUZZ_H
#define GRAYFUZZ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define GF_METHOD_COUNT 15

/**
 * Threshold methods, numbered as accepted by the `method` parameters.
 */
typedef enum GfMethod {
  GF_METHOD_DEFAULT = 0,
  GF_METHOD_HUANG = 1,
  GF_METHOD_ISO_DATA = 2,
  GF_METHOD_LI = 3,
  GF_METHOD_MAX_ENTROPY = 4,
  GF_METHOD_MEAN = 5,
  GF_METHOD_MIN_ERROR = 6,
  GF_METHOD_MINIMUM = 7,
  GF_METHOD_MOMENTS = 8,
  GF_METHOD_OTSU = 9,
  GF_METHOD_PERCENTILE = 10,
  GF_METHOD_RENYI_ENTROPY = 11,
  GF_METHOD_SHANBHAG = 12,
  GF_METHOD_TRIANGLE = 13,
  GF_METHOD_YEN = 14,
} GfMethod;

/**
 * Result code of every fallible call.
 */
typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_NULL_POINTER = 1,
  GF_STATUS_INVALID_ARGUMENT = 2,
  GF_STATUS_IMAGE = 3,
  /**
   * The requested method found no threshold.
   */
  GF_STATUS_THRESHOLD = 4,
  GF_STATUS_PIPELINE = 5,
  GF_STATUS_PANIC = 6,
} GfStatus;

/**
 * Result of `gf_extract`.
 */
typedef struct GfExtraction GfExtraction;

/**
 * 8-bit grayscale image.
 */
typedef struct GfImage GfImage;

/**
 * Bytes allocated by the library; release with `gf_buffer_free`.
 */
typedef struct GfBuffer {
  uint8_t *data;
  size_t len;
} GfBuffer;

typedef struct GfThresholdEntry {
  uint32_t method;
  /**
   * Meaningful only when `converged` is nonzero.
   */
  uint8_t level;
  uint8_t converged;
} GfThresholdEntry;

/**
 * PSNR and SNR are +infinity for identical images.
 */
typedef struct GfMetrics {
  double mae;
  double mse;
  double snr_db;
  double psnr_db;
} GfMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *gf_last_error_message(void);

/**
 * Static name of a method, or null for an unknown index.
 */
const char *gf_method_name(uint32_t method);

/**
 * Copies `len == width * height` row-major pixels into a new image.
 */
enum GfStatus gf_image_new(uint32_t width,
                           uint32_t height,
                           const uint8_t *pixels,
                           size_t len,
                           struct GfImage **out);

/**
 * Parses binary PGM bytes.
 */
enum GfStatus gf_image_from_pgm(const uint8_t *bytes, size_t len, struct GfImage **out);

/**
 * Serializes as binary PGM.
 */
enum GfStatus gf_image_to_pgm(const struct GfImage *image, struct GfBuffer *out);

/**
 * Width in pixels; 0 for a null handle.
 */
uint32_t gf_image_width(const struct GfImage *image);

/**
 * Height in pixels; 0 for a null handle.
 */
uint32_t gf_image_height(const struct GfImage *image);

/**
 * Copies the pixels into `dst`, which must hold `width * height` bytes.
 */
enum GfStatus gf_image_copy_pixels(const struct GfImage *image, uint8_t *dst, size_t len);

void gf_image_free(struct GfImage *image);

void gf_buffer_free(struct GfBuffer buffer);

/**
 * Seeded additive Gaussian noise; `sigma` must be finite and non-negative.
 */
enum GfStatus gf_add_gaussian_noise(const struct GfImage *image,
                                    double sigma,
                                    uint64_t seed,
                                    struct GfImage **out);

/**
 * Threshold level of one method on the image histogram.
 */
enum GfStatus gf_compute_threshold(const struct GfImage *image, uint32_t method, uint8_t *level);

/**
 * Fills `entries` with all fifteen methods in `GfMethod` order.
 * `capacity` must be at least `GF_METHOD_COUNT`.
 */
enum GfStatus gf_threshold_report(const struct GfImage *image,
                                  struct GfThresholdEntry *entries,
                                  size_t capacity);

/**
 * Runs the extraction pipeline. `config_json` is a JSON pipeline
 * configuration, or null for the defaults.
 */
enum GfStatus gf_extract(const struct GfImage *image,
                         const char *config_json,
                         struct GfExtraction **out);

/**
 * New image holding the extracted result.
 */
enum GfStatus gf_extraction_image(const struct GfExtraction *extraction, struct GfImage **out);

/**
 * Pixels that took the fallback level; 0 for a null handle.
 */
size_t gf_extraction_no_rule_pixels(const struct GfExtraction *extraction);

/**
 * 1 when the input had a single intensity and was returned unchanged.
 */
uint8_t gf_extraction_is_degenerate(const struct GfExtraction *extraction);

/**
 * Learned rule base as JSON text (not NUL-terminated); `null` for
 * degenerate input.
 */
enum GfStatus gf_extraction_rulebase_json(const struct GfExtraction *extraction,
                                          struct GfBuffer *out);

void gf_extraction_free(struct GfExtraction *extraction);

/**
 * Quality of `test` against `reference`; dimensions must match.
 */
enum GfStatus gf_compare(const struct GfImage *test,
                         const struct GfImage *reference,
                         struct GfMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAYFUZZ_H */
