#include "rzsr/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "rzsr/color.hpp"

namespace rzsr {

namespace {

Image shaved_y(const Image& img, int shave) {
  Image y = luminance(img);
  if (shave == 0) return y;
  int w = y.width - 2 * shave, h = y.height - 2 * shave;
  if (w < 1 || h < 1)
    throw Error(ErrorCode::InvalidArgument,
                "degenerate input: nothing left after border shave");
  Image out(w, h, 1);
  for (int yy = 0; yy < h; ++yy)
    for (int xx = 0; xx < w; ++xx)
      out.at(0, yy, xx) = y.at(0, yy + shave, xx + shave);
  return out;
}

void check_dims(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw Error(ErrorCode::Shape, "metric inputs must have equal dimensions");
}

}  // namespace

double psnr_y(const Image& a, const Image& b, int shave) {
  check_dims(a, b);
  if (shave < 0) throw Error(ErrorCode::InvalidArgument, "negative shave");
  Image ya = shaved_y(a, shave), yb = shaved_y(b, shave);
  double mse = 0.0;
  for (size_t i = 0; i < ya.data.size(); ++i) {
    double d = ya.data[i] - yb.data[i];
    mse += d * d;
  }
  mse /= double(ya.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim_y(const Image& a, const Image& b, int shave) {
  check_dims(a, b);
  if (shave < 0) throw Error(ErrorCode::InvalidArgument, "negative shave");
  Image ya = shaved_y(a, shave), yb = shaved_y(b, shave);

  constexpr int W = 11;
  constexpr double sigma = 1.5;
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  if (ya.width < W || ya.height < W)
    throw Error(ErrorCode::InvalidArgument,
                "degenerate input: image smaller than the SSIM window");

  double win[W][W];
  double wsum = 0.0;
  for (int y = 0; y < W; ++y)
    for (int x = 0; x < W; ++x) {
      double dy = y - W / 2, dx = x - W / 2;
      win[y][x] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      wsum += win[y][x];
    }
  for (auto& row : win)
    for (auto& v : row) v /= wsum;

  double total = 0.0;
  long count = 0;
  for (int y0 = 0; y0 + W <= ya.height; ++y0)
    for (int x0 = 0; x0 + W <= ya.width; ++x0) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int y = 0; y < W; ++y)
        for (int x = 0; x < W; ++x) {
          double va = ya.at(0, y0 + y, x0 + x);
          double vb = yb.at(0, y0 + y, x0 + x);
          double w = win[y][x];
          ma += w * va;
          mb += w * vb;
          saa += w * va * va;
          sbb += w * vb * vb;
          sab += w * va * vb;
        }
      double var_a = saa - ma * ma;
      double var_b = sbb - mb * mb;
      double cov = sab - ma * mb;
      double s = ((2 * ma * mb + c1) * (2 * cov + c2)) /
                 ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
      total += s;
      ++count;
    }
  return total / double(count);
}

}  // namespace rzsr
