#include "rzsr/degrade.hpp"

#include "rzsr/resample.hpp"

namespace rzsr {

const char* degrade_mode_name(DegradeMode m) {
  switch (m) {
    case DegradeMode::Bicubic: return "bicubic";
    case DegradeMode::RandomKernel: return "random-kernel";
    case DegradeMode::FileKernel: return "file-kernel";
  }
  return "?";
}

DegradeMode parse_degrade_mode(const std::string& s) {
  if (s == "bicubic") return DegradeMode::Bicubic;
  if (s == "random-kernel") return DegradeMode::RandomKernel;
  if (s == "file-kernel") return DegradeMode::FileKernel;
  throw Error(ErrorCode::Config, "unknown degradation mode: " + s);
}

DegradeResult degrade(const Image& img, const DegradationSpec& spec, Rng& rng) {
  if (spec.factor < 2)
    throw Error(ErrorCode::InvalidArgument, "degradation factor must be >= 2");
  DegradeResult res;
  switch (spec.mode) {
    case DegradeMode::Bicubic:
      res.lr = resize_bicubic(img, 1.0 / spec.factor);
      break;
    case DegradeMode::RandomKernel:
      res.kernel = make_random_kernel(rng, spec.kernel_params);
      res.has_kernel = true;
      res.lr = downsample_with_kernel(img, res.kernel, spec.factor);
      break;
    case DegradeMode::FileKernel:
      res.kernel = load_kernel_file(spec.kernel_path);
      res.has_kernel = true;
      res.lr = downsample_with_kernel(img, res.kernel, spec.factor);
      break;
  }
  if (spec.noise_sigma > 0.0)
    for (auto& v : res.lr.data) v += spec.noise_sigma * rng.normal();
  return res;
}

}  // namespace rzsr
