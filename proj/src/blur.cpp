#include "rzsr/blur.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rzsr {

BlurKernel gaussian_kernel(double lambda1, double lambda2, double theta,
                           int size) {
  if (size < 1 || size % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "kernel size must be odd");
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw Error(ErrorCode::InvalidArgument, "kernel eigenvalues must be positive");
  // inverse covariance of R diag(l1^2, l2^2) R^T
  double c = std::cos(theta), s = std::sin(theta);
  double i1 = 1.0 / (lambda1 * lambda1), i2 = 1.0 / (lambda2 * lambda2);
  double a = c * c * i1 + s * s * i2;
  double b = s * c * (i1 - i2);
  double d = s * s * i1 + c * c * i2;

  BlurKernel k;
  k.side = size;
  k.weights.resize(size_t(size) * size);
  int h = size / 2;
  double sum = 0.0;
  for (int y = -h; y <= h; ++y)
    for (int x = -h; x <= h; ++x) {
      double q = a * x * x + 2.0 * b * x * y + d * y * y;
      double w = std::exp(-0.5 * q);
      k.weights[size_t(y + h) * size + (x + h)] = w;
      sum += w;
    }
  for (auto& w : k.weights) w /= sum;
  return k;
}

BlurKernel make_random_kernel(Rng& rng, const RandomKernelParams& p) {
  double l1 = rng.uniform(p.lambda_min, p.lambda_max);
  double l2 = rng.uniform(p.lambda_min, p.lambda_max);
  double theta = rng.uniform(0.0, 3.14159265358979323846);
  return gaussian_kernel(l1, l2, theta, p.size);
}

Image downsample_with_kernel(const Image& img, const BlurKernel& k,
                             int factor) {
  if (factor < 2)
    throw Error(ErrorCode::InvalidArgument, "downsample factor must be >= 2");
  if (k.side > img.width || k.side > img.height)
    throw Error(ErrorCode::InvalidArgument,
                "degenerate input: kernel larger than image");
  int off = factor / 2;
  int ow = (img.width - off + factor - 1) / factor;
  int oh = (img.height - off + factor - 1) / factor;
  Image out(ow, oh, img.channels);
  int h = k.side / 2;
  for (int c = 0; c < img.channels; ++c)
    for (int oy = 0; oy < oh; ++oy) {
      int sy = off + oy * factor;
      for (int ox = 0; ox < ow; ++ox) {
        int sx = off + ox * factor;
        double acc = 0.0;
        for (int ky = -h; ky <= h; ++ky)
          for (int kx = -h; kx <= h; ++kx)
            acc += k.at(ky + h, kx + h) * img.at_mirror(c, sy + ky, sx + kx);
        out.at(c, oy, ox) = acc;
      }
    }
  return out;
}

BlurKernel load_kernel_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot open kernel file: " + path);
  int side = 0;
  f >> side;
  if (!f || side < 1 || side % 2 == 0)
    throw Error(ErrorCode::Format, "kernel file must start with an odd side: " + path);
  BlurKernel k;
  k.side = side;
  k.weights.resize(size_t(side) * side);
  double sum = 0.0;
  for (auto& w : k.weights) {
    f >> w;
    if (!f) throw Error(ErrorCode::Format, "kernel file truncated: " + path);
    sum += w;
  }
  if (!(sum > 0.0))
    throw Error(ErrorCode::Format, "kernel weights must sum to a positive value");
  for (auto& w : k.weights) w /= sum;
  return k;
}

void save_kernel_file(const BlurKernel& k, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot write kernel file: " + path);
  f << k.side << "\n";
  f.precision(17);
  for (int y = 0; y < k.side; ++y) {
    for (int x = 0; x < k.side; ++x) f << (x ? " " : "") << k.at(y, x);
    f << "\n";
  }
}

}  // namespace rzsr
