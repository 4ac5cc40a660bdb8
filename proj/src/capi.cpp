#include "rzsr.h"

#include <cstring>
#include <string>

#include "rzsr/config.hpp"
#include "rzsr/io.hpp"
#include "rzsr/metrics.hpp"
#include "rzsr/pipeline.hpp"
#include "rzsr/resample.hpp"

struct rzsr_image_t {
  rzsr::Image img;
};

struct rzsr_config_t {
  rzsr::SRConfig cfg;
};

namespace {

thread_local std::string g_last_error;

rzsr_status map_code(rzsr::ErrorCode c) {
  using rzsr::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return RZSR_ERROR_INVALID_ARGUMENT;
    case ErrorCode::Io: return RZSR_ERROR_IO;
    case ErrorCode::Format: return RZSR_ERROR_FORMAT;
    case ErrorCode::Shape: return RZSR_ERROR_SHAPE;
    case ErrorCode::Bounds: return RZSR_ERROR_BOUNDS;
    case ErrorCode::Config: return RZSR_ERROR_CONFIG;
    case ErrorCode::Runtime: return RZSR_ERROR_RUNTIME;
  }
  return RZSR_ERROR_RUNTIME;
}

template <typename F>
rzsr_status guarded(F&& fn) {
  try {
    fn();
    return RZSR_OK;
  } catch (const rzsr::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RZSR_ERROR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return RZSR_ERROR_RUNTIME;
  }
}

}  // namespace

extern "C" {

const char* rzsr_version(void) { return "1.0.0"; }

const char* rzsr_status_name(rzsr_status status) {
  switch (status) {
    case RZSR_OK: return "ok";
    case RZSR_ERROR_INVALID_ARGUMENT: return "invalid-argument";
    case RZSR_ERROR_IO: return "io";
    case RZSR_ERROR_FORMAT: return "format";
    case RZSR_ERROR_SHAPE: return "shape";
    case RZSR_ERROR_BOUNDS: return "bounds";
    case RZSR_ERROR_CONFIG: return "config";
    case RZSR_ERROR_RUNTIME: return "runtime";
  }
  return "unknown";
}

const char* rzsr_last_error(void) { return g_last_error.c_str(); }

rzsr_status rzsr_image_create(int width, int height, int channels,
                              rzsr_image_t** out) {
  if (!out) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { *out = new rzsr_image_t{rzsr::Image(width, height, channels)}; });
}

rzsr_status rzsr_image_from_pixels(int width, int height, int channels,
                                   const double* data, rzsr_image_t** out) {
  if (!out || !data) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    rzsr::Image img(width, height, channels);
    std::memcpy(img.data.data(), data, img.data.size() * sizeof(double));
    *out = new rzsr_image_t{std::move(img)};
  });
}

void rzsr_image_free(rzsr_image_t* img) { delete img; }

int rzsr_image_width(const rzsr_image_t* img) { return img ? img->img.width : 0; }
int rzsr_image_height(const rzsr_image_t* img) { return img ? img->img.height : 0; }
int rzsr_image_channels(const rzsr_image_t* img) {
  return img ? img->img.channels : 0;
}

rzsr_status rzsr_image_read_pixels(const rzsr_image_t* img, double* out,
                                   size_t capacity) {
  if (!img || !out) return RZSR_ERROR_INVALID_ARGUMENT;
  if (capacity < img->img.data.size()) {
    g_last_error = "buffer too small";
    return RZSR_ERROR_INVALID_ARGUMENT;
  }
  std::memcpy(out, img->img.data.data(), img->img.data.size() * sizeof(double));
  return RZSR_OK;
}

rzsr_status rzsr_image_load_png(const char* path, rzsr_image_t** out) {
  if (!path || !out) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { *out = new rzsr_image_t{rzsr::load_png(path)}; });
}

rzsr_status rzsr_image_save_png(const rzsr_image_t* img, const char* path) {
  if (!img || !path) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { rzsr::save_png(img->img, path); });
}

rzsr_status rzsr_image_resize_bicubic(const rzsr_image_t* img, double scale,
                                      rzsr_image_t** out) {
  if (!img || !out) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded(
      [&] { *out = new rzsr_image_t{rzsr::resize_bicubic(img->img, scale)}; });
}

rzsr_status rzsr_psnr_y(const rzsr_image_t* a, const rzsr_image_t* b, int shave,
                        double* out_db) {
  if (!a || !b || !out_db) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { *out_db = rzsr::psnr_y(a->img, b->img, shave); });
}

rzsr_status rzsr_ssim_y(const rzsr_image_t* a, const rzsr_image_t* b, int shave,
                        double* out_score) {
  if (!a || !b || !out_score) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { *out_score = rzsr::ssim_y(a->img, b->img, shave); });
}

rzsr_status rzsr_config_create(rzsr_config_t** out) {
  if (!out) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { *out = new rzsr_config_t{}; });
}

void rzsr_config_free(rzsr_config_t* cfg) { delete cfg; }

rzsr_status rzsr_config_set(rzsr_config_t* cfg, const char* key,
                            const char* value) {
  if (!cfg || !key || !value) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { cfg->cfg.set(key, value); });
}

rzsr_status rzsr_config_get(const rzsr_config_t* cfg, const char* key,
                            char* buffer, size_t capacity) {
  if (!cfg || !key || !buffer) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    std::string v = cfg->cfg.get(key);
    if (v.size() + 1 > capacity)
      throw rzsr::Error(rzsr::ErrorCode::InvalidArgument, "buffer too small");
    std::memcpy(buffer, v.c_str(), v.size() + 1);
  });
}

rzsr_status rzsr_config_load_file(rzsr_config_t* cfg, const char* path) {
  if (!cfg || !path) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { cfg->cfg.load_file(path); });
}

rzsr_status rzsr_run_sr(const rzsr_config_t* cfg) {
  if (!cfg) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { rzsr::run_sr(cfg->cfg); });
}

rzsr_status rzsr_run_degrade(const rzsr_config_t* cfg) {
  if (!cfg) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { rzsr::run_degrade(cfg->cfg); });
}

rzsr_status rzsr_run_eval(const rzsr_config_t* cfg) {
  if (!cfg) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { rzsr::run_eval(cfg->cfg); });
}

rzsr_status rzsr_run_build_db(const rzsr_config_t* cfg) {
  if (!cfg) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { rzsr::run_build_db(cfg->cfg); });
}

rzsr_status rzsr_run_ablate(const rzsr_config_t* cfg) {
  if (!cfg) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { rzsr::run_ablate(cfg->cfg); });
}

rzsr_status rzsr_run_kernel_gen(const rzsr_config_t* cfg) {
  if (!cfg) return RZSR_ERROR_INVALID_ARGUMENT;
  return guarded([&] { rzsr::run_kernel_gen(cfg->cfg); });
}

}  // extern "C"
