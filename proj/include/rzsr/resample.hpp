#pragma once

#include "rzsr/image.hpp"

namespace rzsr {

/// Weights of one resampled output sample: taps into the source axis.
/// Indices are already mirrored into range; weights sum to 1.
struct ResampleTaps {
  std::vector<int> indices;
  std::vector<double> weights;
};

/// Cubic convolution kernel, a = -0.5 (Keys / MATLAB 'bicubic').
double cubic_kernel(double x);

/// Tap set for output sample `out` on an axis of length `in_len` resized by
/// `scale`. When scale < 1 the kernel is widened by 1/scale (antialiasing).
ResampleTaps bicubic_taps(int out, int in_len, double scale);

/// Separable bicubic resize with symmetric boundary handling; output
/// dimensions are round(input * scale). Throws InvalidArgument when a
/// rounded output dimension would be zero.
Image resize_bicubic(const Image& img, double scale);

/// Same kernel but explicit output dimensions (used by back-projection to
/// return to an exact source size).
Image resize_bicubic_to(const Image& img, int out_w, int out_h);

/// Bilinear resize to explicit dimensions; used for aligning depth maps,
/// where overshoot would create spurious depth orderings.
Image resize_bilinear_to(const Image& img, int out_w, int out_h);

}  // namespace rzsr
