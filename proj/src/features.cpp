#include "rzsr/features.hpp"

#include <cmath>
#include <fstream>

#include "rzsr/color.hpp"

namespace rzsr {

const char* descriptor_backend_name(DescriptorBackend b) {
  switch (b) {
    case DescriptorBackend::Pixel: return "pixel";
    case DescriptorBackend::GradientPyramid: return "gradient-pyramid";
    case DescriptorBackend::ExternalFile: return "external-file";
  }
  return "?";
}

DescriptorBackend parse_descriptor_backend(const std::string& s) {
  if (s == "pixel") return DescriptorBackend::Pixel;
  if (s == "gradient-pyramid") return DescriptorBackend::GradientPyramid;
  if (s == "external-file") return DescriptorBackend::ExternalFile;
  throw Error(ErrorCode::Config, "unknown descriptor backend: " + s);
}

namespace {

// 2x2 box decimation; coarse levels of the gradient pyramid.
Image box_half(const Image& img) {
  int ow = std::max(1, img.width / 2), oh = std::max(1, img.height / 2);
  Image out(ow, oh, 1);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      int x1 = std::min(2 * x + 1, img.width - 1);
      int y1 = std::min(2 * y + 1, img.height - 1);
      out.at(0, y, x) = 0.25 * (img.at(0, 2 * y, 2 * x) + img.at(0, 2 * y, x1) +
                                img.at(0, y1, 2 * x) + img.at(0, y1, x1));
    }
  return out;
}

// {lum - level mean, |dx|, |dy|} with forward differences; last row/column
// of each gradient is zero. Centering makes constant regions map to exact
// zero vectors, which is what flags their descriptors as featureless.
void write_level(FeatureMap& fm, int base_channel, const Image& lum, int step) {
  double mean = 0.0;
  for (double v : lum.data) mean += v;
  mean /= double(lum.data.size());
  for (int gy = 0; gy < fm.height; ++gy)
    for (int gx = 0; gx < fm.width; ++gx) {
      int ly = std::min(gy / step, lum.height - 1);
      int lx = std::min(gx / step, lum.width - 1);
      double v = lum.at(0, ly, lx);
      double dx = lx + 1 < lum.width ? lum.at(0, ly, lx + 1) - v : 0.0;
      double dy = ly + 1 < lum.height ? lum.at(0, ly + 1, lx) - v : 0.0;
      fm.at(base_channel + 0, gy, gx) = v - mean;
      fm.at(base_channel + 1, gy, gx) = std::fabs(dx);
      fm.at(base_channel + 2, gy, gx) = std::fabs(dy);
    }
}

FeatureMap gradient_pyramid(const Image& img) {
  FeatureMap fm;
  fm.width = img.width;
  fm.height = img.height;
  fm.channels = 9;
  fm.stride = 1;
  fm.data.assign(size_t(fm.width) * fm.height * 9, 0.0);
  Image lum = luminance(img);
  write_level(fm, 0, lum, 1);
  Image half = box_half(lum);
  write_level(fm, 3, half, 2);
  write_level(fm, 6, box_half(half), 4);
  return fm;
}

}  // namespace

FeatureMap extract_image_features(const Image& img, const FeatureOptions& opt) {
  if (img.empty())
    throw Error(ErrorCode::InvalidArgument, "feature extraction on empty image");
  switch (opt.backend) {
    case DescriptorBackend::Pixel: {
      FeatureMap fm;
      fm.width = img.width;
      fm.height = img.height;
      fm.channels = img.channels;
      fm.stride = 1;
      fm.data = img.data;
      return fm;
    }
    case DescriptorBackend::GradientPyramid:
      return gradient_pyramid(img);
    case DescriptorBackend::ExternalFile:
      return load_feature_map(opt.external_path, img);
  }
  throw Error(ErrorCode::Config, "bad descriptor backend");
}

FeatureMap load_feature_map(const std::string& path, const Image& img) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "feature-load error, cannot open: " + path);
  std::string magic;
  FeatureMap fm;
  f >> magic >> fm.width >> fm.height >> fm.channels >> fm.stride;
  if (magic != "FMAP" || fm.width < 1 || fm.height < 1 || fm.channels < 1 ||
      fm.stride < 1)
    throw Error(ErrorCode::Format, "feature-load error, bad FMAP header: " + path);
  // grid must cover the image's stride lattice exactly
  int want_w = (img.width - 1) / fm.stride + 1;
  int want_h = (img.height - 1) / fm.stride + 1;
  if (fm.width != want_w || fm.height != want_h)
    throw Error(ErrorCode::Shape,
                "feature-load error, FMAP grid does not match image: " + path);
  f.get();
  size_t n = size_t(fm.width) * fm.height * fm.channels;
  std::vector<float> raw(n);
  f.read(reinterpret_cast<char*>(raw.data()), std::streamsize(n * sizeof(float)));
  if (!f) throw Error(ErrorCode::Format, "feature-load error, truncated FMAP: " + path);
  fm.data.assign(raw.begin(), raw.end());
  return fm;
}

void save_feature_map(const FeatureMap& fm, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write FMAP: " + path);
  f << "FMAP " << fm.width << " " << fm.height << " " << fm.channels << " "
    << fm.stride << "\n";
  std::vector<float> raw(fm.data.begin(), fm.data.end());
  f.write(reinterpret_cast<const char*>(raw.data()),
          std::streamsize(raw.size() * sizeof(float)));
}

Descriptor patch_descriptor(const FeatureMap& fm, int cx, int cy, int side) {
  int x0 = cx - side / 2, x1 = x0 + side;
  int y0 = cy - side / 2, y1 = y0 + side;
  auto grid0 = [&](int v) { return (v + fm.stride - 1) / fm.stride; };
  int gx0 = grid0(x0), gx1 = grid0(x1);
  int gy0 = grid0(y0), gy1 = grid0(y1);
  if (x0 < 0 || y0 < 0 || gx1 > fm.width || gy1 > fm.height || gx0 >= gx1 ||
      gy0 >= gy1)
    throw Error(ErrorCode::Bounds, "descriptor window out of feature-map bounds");

  std::vector<double> mean(fm.channels, 0.0);
  double count = double(gx1 - gx0) * (gy1 - gy0);
  for (int c = 0; c < fm.channels; ++c) {
    double acc = 0.0;
    for (int gy = gy0; gy < gy1; ++gy)
      for (int gx = gx0; gx < gx1; ++gx) acc += fm.at(c, gy, gx);
    mean[c] = acc / count;
  }
  double norm2 = 0.0;
  for (double m : mean) norm2 += m * m;
  Descriptor d;
  d.v.resize(fm.channels);
  if (norm2 < 1e-24) {
    d.zero = true;
    std::fill(d.v.begin(), d.v.end(), 0.0f);
    return d;
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (int c = 0; c < fm.channels; ++c) d.v[c] = float(mean[c] * inv);
  return d;
}

double descriptor_distance(const Descriptor& a, const Descriptor& b) {
  if (a.v.size() != b.v.size())
    throw Error(ErrorCode::Config, "descriptor length mismatch");
  if (a.zero || b.zero) return 2.0;
  double dot = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) dot += double(a.v[i]) * double(b.v[i]);
  double dist = 1.0 - dot;
  if (dist < 0.0) dist = 0.0;
  if (dist > 2.0) dist = 2.0;
  return dist;
}

}  // namespace rzsr
