#pragma once

#include <cstdint>

#include "rzsr/image.hpp"
#include "rzsr/rng.hpp"

namespace rzsr {

/// Odd-sided convolution kernel normalized to sum 1.
struct BlurKernel {
  int side = 0;
  std::vector<double> weights;  // row-major

  double at(int y, int x) const { return weights[size_t(y) * side + x]; }
};

/// Anisotropic Gaussian: covariance eigenvalues lambda1^2 / lambda2^2
/// rotated by theta, sampled on a size x size grid and normalized.
BlurKernel gaussian_kernel(double lambda1, double lambda2, double theta,
                           int size = 11);

struct RandomKernelParams {
  double lambda_min = 0.6;
  double lambda_max = 5.0;
  int size = 11;
};

/// Draws lambda1, lambda2 uniform in [lambda_min, lambda_max] and theta
/// uniform in [0, pi) from `rng`.
BlurKernel make_random_kernel(Rng& rng, const RandomKernelParams& p = {});

/// Full 2-D convolution with symmetric boundary, then subsampling every
/// `factor` pixels starting at offset floor(factor/2).
Image downsample_with_kernel(const Image& img, const BlurKernel& k, int factor);

BlurKernel load_kernel_file(const std::string& path);
void save_kernel_file(const BlurKernel& k, const std::string& path);

}  // namespace rzsr
