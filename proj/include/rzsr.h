/* rzsr: reference-based zero-shot super-resolution toolkit.
 *
 * C API over the C++ core: opaque handles, integer status codes, and a
 * thread-local last-error message. All functions returning rzsr_status
 * return RZSR_OK (0) on success.
 */
#ifndef RZSR_H
#define RZSR_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rzsr_status {
  RZSR_OK = 0,
  RZSR_ERROR_INVALID_ARGUMENT = 1,
  RZSR_ERROR_IO = 2,
  RZSR_ERROR_FORMAT = 3,
  RZSR_ERROR_SHAPE = 4,
  RZSR_ERROR_BOUNDS = 5,
  RZSR_ERROR_CONFIG = 6,
  RZSR_ERROR_RUNTIME = 7
} rzsr_status;

typedef struct rzsr_image_t rzsr_image_t;
typedef struct rzsr_config_t rzsr_config_t;

const char* rzsr_version(void);
const char* rzsr_status_name(rzsr_status status);
/* Message from the most recent failing call on this thread. */
const char* rzsr_last_error(void);

/* ---- images (planar doubles in [0,1], 1 or 3 channels) ---- */

rzsr_status rzsr_image_create(int width, int height, int channels,
                              rzsr_image_t** out);
rzsr_status rzsr_image_from_pixels(int width, int height, int channels,
                                   const double* data, rzsr_image_t** out);
void rzsr_image_free(rzsr_image_t* img);

int rzsr_image_width(const rzsr_image_t* img);
int rzsr_image_height(const rzsr_image_t* img);
int rzsr_image_channels(const rzsr_image_t* img);
/* Copies width*height*channels doubles into `out`. */
rzsr_status rzsr_image_read_pixels(const rzsr_image_t* img, double* out,
                                   size_t capacity);

rzsr_status rzsr_image_load_png(const char* path, rzsr_image_t** out);
rzsr_status rzsr_image_save_png(const rzsr_image_t* img, const char* path);

/* MATLAB-compatible bicubic resize (antialiased when shrinking). */
rzsr_status rzsr_image_resize_bicubic(const rzsr_image_t* img, double scale,
                                      rzsr_image_t** out);

/* Y-channel metrics after shaving `shave` border pixels. Identical inputs
 * report PSNR = +infinity. */
rzsr_status rzsr_psnr_y(const rzsr_image_t* a, const rzsr_image_t* b,
                        int shave, double* out_db);
rzsr_status rzsr_ssim_y(const rzsr_image_t* a, const rzsr_image_t* b,
                        int shave, double* out_score);

/* ---- configuration ---- */

rzsr_status rzsr_config_create(rzsr_config_t** out);
void rzsr_config_free(rzsr_config_t* cfg);
rzsr_status rzsr_config_set(rzsr_config_t* cfg, const char* key,
                            const char* value);
rzsr_status rzsr_config_get(const rzsr_config_t* cfg, const char* key,
                            char* buffer, size_t capacity);
/* key = value lines; '#' starts a comment. */
rzsr_status rzsr_config_load_file(rzsr_config_t* cfg, const char* path);

/* ---- commands (mirror the CLI subcommands) ---- */

rzsr_status rzsr_run_sr(const rzsr_config_t* cfg);
rzsr_status rzsr_run_degrade(const rzsr_config_t* cfg);
rzsr_status rzsr_run_eval(const rzsr_config_t* cfg);
rzsr_status rzsr_run_build_db(const rzsr_config_t* cfg);
rzsr_status rzsr_run_ablate(const rzsr_config_t* cfg);
rzsr_status rzsr_run_kernel_gen(const rzsr_config_t* cfg);

#ifdef __cplusplus
}
#endif

#endif /* RZSR_H */
