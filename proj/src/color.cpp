#include "rzsr/color.hpp"

#include <array>

namespace rzsr {

namespace {

// BT.601 forward matrix, 255-scale offsets handled separately.
constexpr double kFwd[3][3] = {
    {65.481, 128.553, 24.966},
    {-37.797, -74.203, 112.0},
    {112.0, -93.786, -18.214},
};
constexpr double kOffset[3] = {16.0, 128.0, 128.0};

std::array<std::array<double, 3>, 3> invert_fwd() {
  const auto& m = kFwd;
  double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  std::array<std::array<double, 3>, 3> inv;
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

}  // namespace

Image rgb_to_ycbcr(const Image& img) {
  if (img.channels != 3)
    throw Error(ErrorCode::Shape, "rgb_to_ycbcr requires a 3-channel image");
  Image out(img.width, img.height, 3);
  size_t n = img.plane_size();
  for (size_t i = 0; i < n; ++i) {
    double rgb[3] = {img.data[i], img.data[i + n], img.data[i + 2 * n]};
    for (int c = 0; c < 3; ++c) {
      double v = kOffset[c];
      for (int j = 0; j < 3; ++j) v += kFwd[c][j] * rgb[j];
      out.data[i + c * n] = v / 255.0;
    }
  }
  return out;
}

Image ycbcr_to_rgb(const Image& img) {
  if (img.channels != 3)
    throw Error(ErrorCode::Shape, "ycbcr_to_rgb requires a 3-channel image");
  static const auto inv = invert_fwd();
  Image out(img.width, img.height, 3);
  size_t n = img.plane_size();
  for (size_t i = 0; i < n; ++i) {
    double ycc[3];
    for (int c = 0; c < 3; ++c) ycc[c] = img.data[i + c * n] * 255.0 - kOffset[c];
    for (int c = 0; c < 3; ++c) {
      double v = 0.0;
      for (int j = 0; j < 3; ++j) v += inv[c][j] * ycc[j];
      out.data[i + c * n] = v;
    }
  }
  return out;
}

Image luminance(const Image& img) {
  if (img.channels == 1) return img;
  Image ycc = rgb_to_ycbcr(img);
  Image out(img.width, img.height, 1);
  std::copy(ycc.data.begin(), ycc.data.begin() + ycc.plane_size(),
            out.data.begin());
  return out;
}

}  // namespace rzsr
