// Independent reference implementations used only by tests. These are
// written from the definitions (dense loops, no tap/im2col machinery) so
// they exercise the production code paths from a different direction.
#pragma once

#include <cmath>
#include <vector>

#include "rzsr/image.hpp"
#include "rzsr/tensor.hpp"

namespace oracle {

inline double cubic(double x) {
  x = std::fabs(x);
  if (x <= 1.0) return (1.5 * x - 2.5) * x * x + 1.0;
  if (x < 2.0) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
  return 0.0;
}

inline int mirror(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -1 - i;
    else i = 2 * n - 1 - i;
  }
  return i;
}

// Dense separable resize: full weight row per output sample, summed over
// every input sample (after mirroring, weights collapse onto the range).
inline std::vector<double> resize_axis_weights(int out, int in_len,
                                               double scale) {
  std::vector<double> row(in_len, 0.0);
  double support = scale < 1.0 ? 4.0 / scale : 4.0;
  double k = scale < 1.0 ? scale : 1.0;
  double center = (out + 0.5) / scale - 0.5;
  int left = int(std::floor(center - support / 2));
  int taps = int(std::ceil(support)) + 2;
  double sum = 0.0;
  std::vector<std::pair<int, double>> raw;
  for (int t = 0; t < taps; ++t) {
    int idx = left + t;
    double w = k * cubic(k * (center - idx));
    raw.emplace_back(mirror(idx, in_len), w);
    sum += w;
  }
  for (auto& [idx, w] : raw) row[idx] += w / sum;
  return row;
}

inline rzsr::Image resize_bicubic_dense(const rzsr::Image& img, double scale) {
  int ow = int(std::lround(img.width * scale));
  int oh = int(std::lround(img.height * scale));
  // x axis
  rzsr::Image mid(ow, img.height, img.channels);
  for (int ox = 0; ox < ow; ++ox) {
    auto wrow = resize_axis_weights(ox, img.width, scale);
    for (int c = 0; c < img.channels; ++c)
      for (int y = 0; y < img.height; ++y) {
        double acc = 0.0;
        for (int x = 0; x < img.width; ++x) acc += wrow[x] * img.at(c, y, x);
        mid.at(c, y, ox) = acc;
      }
  }
  rzsr::Image out(ow, oh, img.channels);
  for (int oy = 0; oy < oh; ++oy) {
    auto wrow = resize_axis_weights(oy, img.height, scale);
    for (int c = 0; c < img.channels; ++c)
      for (int x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (int y = 0; y < img.height; ++y) acc += wrow[y] * mid.at(c, y, x);
        out.at(c, oy, x) = acc;
      }
  }
  return out;
}

// blur + subsample, straight from the definition
inline rzsr::Image blur_subsample_dense(const rzsr::Image& img,
                                        const std::vector<double>& kernel,
                                        int kside, int factor) {
  int off = factor / 2;
  int ow = (img.width - off + factor - 1) / factor;
  int oh = (img.height - off + factor - 1) / factor;
  rzsr::Image out(ow, oh, img.channels);
  int h = kside / 2;
  for (int c = 0; c < img.channels; ++c)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        double acc = 0.0;
        for (int ky = -h; ky <= h; ++ky)
          for (int kx = -h; kx <= h; ++kx) {
            int sy = mirror(off + oy * factor + ky, img.height);
            int sx = mirror(off + ox * factor + kx, img.width);
            acc += kernel[size_t(ky + h) * kside + (kx + h)] * img.at(c, sy, sx);
          }
        out.at(c, oy, ox) = acc;
      }
  return out;
}

// direct 3x3 convolution with symmetric padding, stride, optional relu
inline rzsr::Tensor conv3x3_dense(const rzsr::Tensor& x,
                                  const std::vector<double>& w,
                                  const std::vector<double>& b, int in_ch,
                                  int out_ch, int stride, bool relu) {
  int oh = (x.height + stride - 1) / stride;
  int ow = (x.width + stride - 1) / stride;
  rzsr::Tensor y(out_ch, oh, ow);
  for (int o = 0; o < out_ch; ++o)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        double acc = b[o];
        for (int ci = 0; ci < in_ch; ++ci)
          for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx) {
              int iy = mirror(stride * oy + ky - 1, x.height);
              int ix = mirror(stride * ox + kx - 1, x.width);
              acc += w[((size_t(o) * in_ch + ci) * 3 + ky) * 3 + kx] *
                     x.at(ci, iy, ix);
            }
        y.at(o, oy, ox) = relu && acc < 0.0 ? 0.0 : acc;
      }
  return y;
}

// transposed conv from the scatter definition: out(2i+k-1) += x(i) w(k)
inline rzsr::Tensor tconv4x4_dense(const rzsr::Tensor& x,
                                   const std::vector<double>& w,
                                   const std::vector<double>& b, int in_ch,
                                   int out_ch) {
  int oh = 2 * x.height, ow = 2 * x.width;
  rzsr::Tensor y(out_ch, oh, ow);
  for (int o = 0; o < out_ch; ++o)
    for (int yy = 0; yy < oh; ++yy)
      for (int xx = 0; xx < ow; ++xx) y.at(o, yy, xx) = b[o];
  for (int ci = 0; ci < in_ch; ++ci)
    for (int iy = 0; iy < x.height; ++iy)
      for (int ix = 0; ix < x.width; ++ix)
        for (int o = 0; o < out_ch; ++o)
          for (int ky = 0; ky < 4; ++ky)
            for (int kx = 0; kx < 4; ++kx) {
              int ty = 2 * iy + ky - 1, tx = 2 * ix + kx - 1;
              if (ty < 0 || ty >= oh || tx < 0 || tx >= ow) continue;
              y.at(o, ty, tx) +=
                  x.at(ci, iy, ix) *
                  w[((size_t(o) * in_ch + ci) * 4 + ky) * 4 + kx];
            }
  return y;
}

// embedded-Gaussian attention, double loop over positions
inline rzsr::Tensor nonlocal_dense(
    const rzsr::Tensor& fs, const rzsr::Tensor& fc,
    const std::vector<double>& wt, const std::vector<double>& bt,
    const std::vector<double>& wp, const std::vector<double>& bp,
    const std::vector<double>& wg, const std::vector<double>& bg,
    const std::vector<double>& wh, const std::vector<double>& bh, int ch,
    int embed) {
  int ps = fs.height * fs.width, pc = fc.height * fc.width;
  rzsr::Tensor out = fs;
  for (int x = 0; x < ps; ++x) {
    std::vector<double> tx(embed, 0.0);
    for (int e = 0; e < embed; ++e) {
      double acc = bt[e];
      for (int c = 0; c < ch; ++c)
        acc += wt[size_t(e) * ch + c] * fs.data[size_t(c) * ps + x];
      tx[e] = acc;
    }
    std::vector<double> num(embed, 0.0);
    double den = 0.0;
    for (int y = 0; y < pc; ++y) {
      double logit = 0.0;
      std::vector<double> gy(embed, 0.0);
      for (int e = 0; e < embed; ++e) {
        double pe = bp[e], ge = bg[e];
        for (int c = 0; c < ch; ++c) {
          pe += wp[size_t(e) * ch + c] * fc.data[size_t(c) * pc + y];
          ge += wg[size_t(e) * ch + c] * fc.data[size_t(c) * pc + y];
        }
        logit += tx[e] * pe;
        gy[e] = ge;
      }
      double w = std::exp(logit);
      den += w;
      for (int e = 0; e < embed; ++e) num[e] += w * gy[e];
    }
    for (int c = 0; c < ch; ++c) {
      double acc = bh[c];
      for (int e = 0; e < embed; ++e)
        acc += wh[size_t(c) * embed + e] * num[e] / den;
      out.data[size_t(c) * ps + x] += acc;
    }
  }
  return out;
}

}  // namespace oracle
