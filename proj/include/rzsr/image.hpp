#pragma once

#include <cstdint>
#include <vector>

#include "rzsr/common.hpp"

namespace rzsr {

/// Planar floating-point raster, 1 or 3 channels, nominal range [0,1].
/// Intermediate results may leave the range; clamping happens at export.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;  // channel-major, then row-major

  Image() = default;
  Image(int w, int h, int c, double fill = 0.0);

  bool empty() const { return width == 0 || height == 0; }
  size_t plane_size() const { return size_t(width) * height; }

  double& at(int c, int y, int x) {
    return data[size_t(c) * plane_size() + size_t(y) * width + x];
  }
  double at(int c, int y, int x) const {
    return data[size_t(c) * plane_size() + size_t(y) * width + x];
  }

  /// Sample with symmetric (reflect-including-edge) boundary handling.
  double at_mirror(int c, int y, int x) const;
};

enum class ScaleTag : uint8_t { Full = 0, Half = 1, Quarter = 2 };
const char* scale_tag_name(ScaleTag t);

/// Square window of a source image. `center` is the top-left pixel of the
/// lower-right quadrant: the window is [cx-side/2, cx+side/2) in each axis,
/// so even centers with even sides stay integral across the x -> 2x mapping.
struct Patch {
  ScaleTag scale_tag = ScaleTag::Full;
  int cx = 0;
  int cy = 0;
  int side = 0;
  Image pixels;
};

bool patch_fits(const Image& img, int cx, int cy, int side);

/// Copies the window; throws Bounds if it does not fit (callers pre-filter).
Patch extract_patch(const Image& img, int cx, int cy, int side,
                    ScaleTag tag = ScaleTag::Full);

/// Dihedral-4 group transforms, ids 0..7: bit 2 = horizontal flip first,
/// bits 0..1 = number of 90-degree CCW rotations applied after.
Image dihedral_transform(const Image& img, int id);
int dihedral_inverse(int id);

Image clamp01(const Image& img);

/// Mirror an index into [0, n): -1 -> 0, n -> n-1 (MATLAB 'symmetric').
int mirror_index(int i, int n);

}  // namespace rzsr
