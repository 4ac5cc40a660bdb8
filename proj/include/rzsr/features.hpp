#pragma once

#include <string>
#include <vector>

#include "rzsr/image.hpp"

namespace rzsr {

/// Dense per-position feature grid at a fixed spatial stride relative to the
/// source image. Patch descriptors are pooled from this map by window
/// indexing; they are never recomputed per patch.
struct FeatureMap {
  int width = 0;    // grid columns
  int height = 0;   // grid rows
  int channels = 0;
  int stride = 1;   // image pixels per grid cell

  std::vector<double> data;  // channel-major, row-major

  double at(int c, int gy, int gx) const {
    return data[(size_t(c) * height + gy) * width + gx];
  }
  double& at(int c, int gy, int gx) {
    return data[(size_t(c) * height + gy) * width + gx];
  }
};

enum class DescriptorBackend { Pixel, GradientPyramid, ExternalFile };
const char* descriptor_backend_name(DescriptorBackend b);
DescriptorBackend parse_descriptor_backend(const std::string& s);

struct FeatureOptions {
  DescriptorBackend backend = DescriptorBackend::GradientPyramid;
  std::string external_path;  // FMAP file for the ExternalFile backend
};

/// Mean-pooled, L2-normalized feature window. Constant (zero-energy)
/// windows carry a zero flag and compare maximally distant to everything.
struct Descriptor {
  std::vector<float> v;
  bool zero = false;
};

FeatureMap extract_image_features(const Image& img, const FeatureOptions& opt);

/// FMAP file: ASCII header line "FMAP width height channels stride", then
/// float32 samples channel-major, row-major. Grid dims must cover the image.
FeatureMap load_feature_map(const std::string& path, const Image& img);
void save_feature_map(const FeatureMap& fm, const std::string& path);

/// Pools the image-coordinate window [cx-side/2, cx+side/2) x [cy-...].
Descriptor patch_descriptor(const FeatureMap& fm, int cx, int cy, int side);

/// 1 - cosine(a, b) in [0,2]; zero-flagged descriptors are maximally far.
double descriptor_distance(const Descriptor& a, const Descriptor& b);

}  // namespace rzsr
