#include "rzsr/resample.hpp"

#include <cmath>
#include <string>

namespace rzsr {

double cubic_kernel(double x) {
  x = std::fabs(x);
  if (x <= 1.0) return 1.5 * x * x * x - 2.5 * x * x + 1.0;
  if (x <= 2.0) return -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0;
  return 0.0;
}

ResampleTaps bicubic_taps(int out, int in_len, double scale) {
  double support = 4.0;
  double k = 1.0;
  if (scale < 1.0) {  // widen the kernel when shrinking
    support = 4.0 / scale;
    k = scale;
  }
  int ntaps = int(std::ceil(support)) + 2;
  double center = (out + 0.5) / scale - 0.5;
  int left = int(std::floor(center - support / 2));

  ResampleTaps taps;
  taps.indices.resize(ntaps);
  taps.weights.resize(ntaps);
  double sum = 0.0;
  for (int i = 0; i < ntaps; ++i) {
    int idx = left + i;
    double w = k * cubic_kernel(k * (center - idx));
    taps.indices[i] = mirror_index(idx, in_len);
    taps.weights[i] = w;
    sum += w;
  }
  for (auto& w : taps.weights) w /= sum;
  return taps;
}

namespace {

// Resize one axis (x) of all channels; y axis handled by transposing roles.
Image resize_axis_x(const Image& img, int out_w, double scale) {
  Image out(out_w, img.height, img.channels);
  for (int ox = 0; ox < out_w; ++ox) {
    ResampleTaps taps = bicubic_taps(ox, img.width, scale);
    for (int c = 0; c < img.channels; ++c)
      for (int y = 0; y < img.height; ++y) {
        double acc = 0.0;
        for (size_t t = 0; t < taps.indices.size(); ++t)
          acc += taps.weights[t] * img.at(c, y, taps.indices[t]);
        out.at(c, y, ox) = acc;
      }
  }
  return out;
}

Image resize_axis_y(const Image& img, int out_h, double scale) {
  Image out(img.width, out_h, img.channels);
  for (int oy = 0; oy < out_h; ++oy) {
    ResampleTaps taps = bicubic_taps(oy, img.height, scale);
    for (int c = 0; c < img.channels; ++c)
      for (int x = 0; x < img.width; ++x) {
        double acc = 0.0;
        for (size_t t = 0; t < taps.indices.size(); ++t)
          acc += taps.weights[t] * img.at(c, taps.indices[t], x);
        out.at(c, oy, x) = acc;
      }
  }
  return out;
}

}  // namespace

Image resize_bicubic_to(const Image& img, int out_w, int out_h) {
  if (img.empty())
    throw Error(ErrorCode::InvalidArgument, "resize of empty image");
  if (out_w < 1 || out_h < 1)
    throw Error(ErrorCode::InvalidArgument,
                "invalid scale: output would be " + std::to_string(out_w) +
                    "x" + std::to_string(out_h));
  if (out_w == img.width && out_h == img.height) return img;
  double sx = double(out_w) / img.width;
  double sy = double(out_h) / img.height;
  Image rows = resize_axis_x(img, out_w, sx);
  return resize_axis_y(rows, out_h, sy);
}

Image resize_bicubic(const Image& img, double scale) {
  if (!(scale > 0.0))
    throw Error(ErrorCode::InvalidArgument, "scale must be positive");
  int out_w = int(std::lround(img.width * scale));
  int out_h = int(std::lround(img.height * scale));
  return resize_bicubic_to(img, out_w, out_h);
}

Image resize_bilinear_to(const Image& img, int out_w, int out_h) {
  if (img.empty())
    throw Error(ErrorCode::InvalidArgument, "resize of empty image");
  if (out_w < 1 || out_h < 1)
    throw Error(ErrorCode::InvalidArgument, "bilinear target must be >= 1");
  Image out(out_w, out_h, img.channels);
  double sx = double(out_w) / img.width;
  double sy = double(out_h) / img.height;
  for (int oy = 0; oy < out_h; ++oy) {
    double cy = (oy + 0.5) / sy - 0.5;
    int y0 = int(std::floor(cy));
    double fy = cy - y0;
    for (int ox = 0; ox < out_w; ++ox) {
      double cx = (ox + 0.5) / sx - 0.5;
      int x0 = int(std::floor(cx));
      double fx = cx - x0;
      for (int c = 0; c < img.channels; ++c) {
        double v00 = img.at_mirror(c, y0, x0);
        double v01 = img.at_mirror(c, y0, x0 + 1);
        double v10 = img.at_mirror(c, y0 + 1, x0);
        double v11 = img.at_mirror(c, y0 + 1, x0 + 1);
        out.at(c, oy, ox) = (1 - fy) * ((1 - fx) * v00 + fx * v01) +
                            fy * ((1 - fx) * v10 + fx * v11);
      }
    }
  }
  return out;
}

}  // namespace rzsr
