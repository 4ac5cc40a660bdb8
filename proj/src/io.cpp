#include "rzsr/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace rzsr {

Image load_png(const std::string& path) {
  png_image pimg;
  std::memset(&pimg, 0, sizeof(pimg));
  pimg.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&pimg, path.c_str()))
    throw Error(ErrorCode::Io, "cannot read PNG: " + path + " (" + pimg.message + ")");
  bool gray = (pimg.format & PNG_FORMAT_FLAG_COLOR) == 0;
  pimg.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  int channels = gray ? 1 : 3;
  std::vector<uint8_t> buf(size_t(PNG_IMAGE_SIZE(pimg)));
  if (!png_image_finish_read(&pimg, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&pimg);
    throw Error(ErrorCode::Format, "malformed PNG: " + path);
  }
  Image img(int(pimg.width), int(pimg.height), channels);
  size_t n = img.plane_size();
  for (size_t i = 0; i < n; ++i)
    for (int c = 0; c < channels; ++c)
      img.data[c * n + i] = buf[i * channels + c] / 255.0;
  return img;
}

void save_png(const Image& img, const std::string& path) {
  if (img.empty()) throw Error(ErrorCode::InvalidArgument, "empty image");
  png_image pimg;
  std::memset(&pimg, 0, sizeof(pimg));
  pimg.version = PNG_IMAGE_VERSION;
  pimg.width = png_uint_32(img.width);
  pimg.height = png_uint_32(img.height);
  pimg.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  size_t n = img.plane_size();
  std::vector<uint8_t> buf(n * img.channels);
  for (size_t i = 0; i < n; ++i)
    for (int c = 0; c < img.channels; ++c) {
      double v = std::clamp(img.data[c * n + i], 0.0, 1.0);
      buf[i * img.channels + c] = uint8_t(std::lround(v * 255.0));
    }
  if (!png_image_write_to_file(&pimg, path.c_str(), 0, buf.data(), 0, nullptr))
    throw Error(ErrorCode::Io, "cannot write PNG: " + path + " (" + pimg.message + ")");
}

namespace {

Image normalize_depth(Image d) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : d.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi > lo)
    for (auto& v : d.data) v = (v - lo) / (hi - lo);
  else
    for (auto& v : d.data) v = 0.0;
  return d;
}

Image load_pgm(std::ifstream& f, const std::string& path) {
  auto next_token = [&]() -> std::string {
    std::string t;
    while (f >> t) {
      if (t[0] == '#') {
        std::string rest;
        std::getline(f, rest);
        continue;
      }
      return t;
    }
    throw Error(ErrorCode::Format, "truncated PGM header: " + path);
  };
  int w = std::stoi(next_token());
  int h = std::stoi(next_token());
  int maxval = std::stoi(next_token());
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
    throw Error(ErrorCode::Format, "bad PGM header: " + path);
  f.get();  // single whitespace before raster
  Image img(w, h, 1);
  if (maxval > 255) {
    std::vector<uint8_t> row(size_t(w) * 2, 0);
    for (int y = 0; y < h; ++y) {
      f.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size()));
      if (!f) throw Error(ErrorCode::Format, "truncated PGM raster: " + path);
      for (int x = 0; x < w; ++x)
        img.at(0, y, x) = (row[2 * x] << 8 | row[2 * x + 1]) / double(maxval);
    }
  } else {
    std::vector<uint8_t> row(size_t(w), 0);
    for (int y = 0; y < h; ++y) {
      f.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size()));
      if (!f) throw Error(ErrorCode::Format, "truncated PGM raster: " + path);
      for (int x = 0; x < w; ++x) img.at(0, y, x) = row[x] / double(maxval);
    }
  }
  return img;
}

Image load_dpt(std::ifstream& f, const std::string& path) {
  std::string magic;
  int w = 0, h = 0;
  f >> magic >> w >> h;
  if (magic != "DPT" || w < 1 || h < 1)
    throw Error(ErrorCode::Format, "bad DPT header: " + path);
  f.get();
  Image img(w, h, 1);
  std::vector<float> row(size_t(w), 0.0f);
  for (int y = 0; y < h; ++y) {
    f.read(reinterpret_cast<char*>(row.data()),
           std::streamsize(row.size() * sizeof(float)));
    if (!f) throw Error(ErrorCode::Format, "truncated DPT raster: " + path);
    for (int x = 0; x < w; ++x) img.at(0, y, x) = row[x];
  }
  return img;
}

}  // namespace

Image load_depth(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open depth file: " + path);
  std::string magic(2, '\0');
  f.read(magic.data(), 2);
  f.seekg(0);
  if (magic == "P5") {
    std::string p5;
    f >> p5;
    return normalize_depth(load_pgm(f, path));
  }
  if (magic == "DP") return normalize_depth(load_dpt(f, path));
  throw Error(ErrorCode::Format, "depth file is neither P5 PGM nor DPT: " + path);
}

void save_depth_dpt(const Image& depth, const std::string& path) {
  if (depth.channels != 1)
    throw Error(ErrorCode::InvalidArgument, "depth must be single-channel");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write depth file: " + path);
  f << "DPT " << depth.width << " " << depth.height << "\n";
  std::vector<float> row(size_t(depth.width));
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) row[x] = float(depth.at(0, y, x));
    f.write(reinterpret_cast<const char*>(row.data()),
            std::streamsize(row.size() * sizeof(float)));
  }
}

uint64_t file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot hash missing file: " + path);
  uint64_t hash = 1469598103934665603ull;
  char buf[4096];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      hash ^= uint8_t(buf[i]);
      hash *= 1099511628211ull;
    }
    if (!f) break;
  }
  return hash;
}

bool file_exists(const std::string& path) {
  std::ifstream f(path);
  return bool(f);
}

}  // namespace rzsr
