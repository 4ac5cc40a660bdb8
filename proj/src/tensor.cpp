#include "rzsr/tensor.hpp"

#include <algorithm>
#include <thread>

namespace rzsr {

namespace {

// Splits the M rows of an output across two threads when the job is big
// enough to amortize the spawn. Writes are row-disjoint, so the result is
// identical to the serial loop no matter how the threads are scheduled.
template <typename Fn>
void split_rows(int M, double flops, const Fn& fn) {
  if (M < 2 || flops < 5e7 || std::thread::hardware_concurrency() < 2) {
    fn(0, M);
    return;
  }
  int mid = M / 2;
  std::thread half([&] { fn(0, mid); });
  fn(mid, M);
  half.join();
}

}  // namespace

Tensor image_to_tensor(const Image& img) {
  Tensor t(img.channels, img.height, img.width);
  t.data = img.data;
  return t;
}

Image tensor_to_image(const Tensor& t) {
  if (t.channels != 1 && t.channels != 3)
    throw Error(ErrorCode::Shape, "tensor with " + std::to_string(t.channels) +
                                      " channels is not an image");
  Image img(t.width, t.height, t.channels);
  img.data = t.data;
  return img;
}

// Blocked over N and K so the panel of B stays cache-resident across the
// whole M loop; k runs in ascending order per output, so results match the
// naive triple loop bit for bit.
namespace {
constexpr int kNB = 1024;
constexpr int kKB = 256;
}  // namespace

void gemm_nn(double* C, const double* A, const double* B, int M, int K, int N) {
  split_rows(M, 2.0 * M * K * N, [&](int m0, int m1) {
  for (int n0 = 0; n0 < N; n0 += kNB) {
    int nb = std::min(kNB, N - n0);
    for (int k0 = 0; k0 < K; k0 += kKB) {
      int kb = std::min(kKB, K - k0);
      for (int m = m0; m < m1; ++m) {
        double* c = C + size_t(m) * N + n0;
        const double* a = A + size_t(m) * K;
        for (int k = k0; k < k0 + kb; ++k) {
          double av = a[k];
          const double* b = B + size_t(k) * N + n0;
          for (int n = 0; n < nb; ++n) c[n] += av * b[n];
        }
      }
    }
  }
  });
}

void gemm_tn(double* C, const double* A, const double* B, int M, int K, int N) {
  split_rows(M, 2.0 * M * K * N, [&](int m0, int m1) {
  for (int n0 = 0; n0 < N; n0 += kNB) {
    int nb = std::min(kNB, N - n0);
    for (int k0 = 0; k0 < K; k0 += kKB) {
      int kb = std::min(kKB, K - k0);
      for (int m = m0; m < m1; ++m) {
        double* c = C + size_t(m) * N + n0;
        for (int k = k0; k < k0 + kb; ++k) {
          double av = A[size_t(k) * M + m];
          const double* b = B + size_t(k) * N + n0;
          for (int n = 0; n < nb; ++n) c[n] += av * b[n];
        }
      }
    }
  }
  });
}

void gemm_nt(double* C, const double* A, const double* B, int M, int K, int N) {
  // four dot products share one pass over the A row
  split_rows(M, 2.0 * M * K * N, [&](int m0, int m1) {
  for (int m = m0; m < m1; ++m) {
    const double* a = A + size_t(m) * K;
    double* c = C + size_t(m) * N;
    int n = 0;
    for (; n + 4 <= N; n += 4) {
      const double* b0 = B + size_t(n) * K;
      const double* b1 = b0 + K;
      const double* b2 = b1 + K;
      const double* b3 = b2 + K;
      double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
      for (int k = 0; k < K; ++k) {
        double av = a[k];
        a0 += av * b0[k];
        a1 += av * b1[k];
        a2 += av * b2[k];
        a3 += av * b3[k];
      }
      c[n] += a0;
      c[n + 1] += a1;
      c[n + 2] += a2;
      c[n + 3] += a3;
    }
    for (; n < N; ++n) {
      const double* b = B + size_t(n) * K;
      double acc = 0.0;
      for (int k = 0; k < K; ++k) acc += a[k] * b[k];
      c[n] += acc;
    }
  }
  });
}

}  // namespace rzsr
