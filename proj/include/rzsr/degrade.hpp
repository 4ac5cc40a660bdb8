#pragma once

#include <string>

#include "rzsr/blur.hpp"
#include "rzsr/image.hpp"
#include "rzsr/rng.hpp"

namespace rzsr {

enum class DegradeMode { Bicubic, RandomKernel, FileKernel };
const char* degrade_mode_name(DegradeMode m);
DegradeMode parse_degrade_mode(const std::string& s);

struct DegradationSpec {
  DegradeMode mode = DegradeMode::Bicubic;
  int factor = 2;
  RandomKernelParams kernel_params;
  double noise_sigma = 0.0;  // optional additive Gaussian noise after blurring
  std::string kernel_path;   // FileKernel mode
};

struct DegradeResult {
  Image lr;
  BlurKernel kernel;  // the kernel actually applied (kernel modes only)
  bool has_kernel = false;
};

/// Bicubic mode is literally resize_bicubic(img, 1/factor); kernel modes
/// blur with the (random or loaded) kernel and subsample. `rng` drives the
/// kernel draw and the optional noise.
DegradeResult degrade(const Image& img, const DegradationSpec& spec, Rng& rng);

}  // namespace rzsr
