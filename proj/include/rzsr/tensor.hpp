#pragma once

#include <vector>

#include "rzsr/common.hpp"
#include "rzsr/image.hpp"

namespace rzsr {

/// Dense (channels, height, width) buffer, row-major per channel.
struct Tensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int c, int h, int w, double fill = 0.0)
      : channels(c), height(h), width(w),
        data(size_t(c) * h * w, fill) {}

  size_t plane() const { return size_t(height) * width; }
  size_t size() const { return data.size(); }

  double& at(int c, int y, int x) {
    return data[(size_t(c) * height + y) * width + x];
  }
  double at(int c, int y, int x) const {
    return data[(size_t(c) * height + y) * width + x];
  }

  bool same_shape(const Tensor& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

Tensor image_to_tensor(const Image& img);
Image tensor_to_image(const Tensor& t);

// C[M][N] += A[M][K] * B[K][N]
void gemm_nn(double* C, const double* A, const double* B, int M, int K, int N);
// C[M][N] += A^T * B with A stored [K][M]
void gemm_tn(double* C, const double* A, const double* B, int M, int K, int N);
// C[M][N] += A * B^T with B stored [N][K]
void gemm_nt(double* C, const double* A, const double* B, int M, int K, int N);

}  // namespace rzsr
