#include "rzsr/patchdb.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "rzsr/kmedoids.hpp"

namespace rzsr {

DepthSegmentation segment_by_depth(
    const Image& depth, const std::vector<std::pair<int, int>>& centers,
    int bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "depth bins must be >= 1");
  if (depth.channels != 1)
    throw Error(ErrorCode::Shape, "depth map must be single-channel");
  DepthSegmentation seg;
  seg.bins.resize(centers.size(), 0);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (auto [cx, cy] : centers) {
    double d = depth.at(0, cy, cx);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (centers.empty()) lo = hi = 0.0;
  seg.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i)
    seg.edges[i] = float(lo + (hi - lo) * i / bins);
  if (!(hi > lo)) {  // constant depth: single usable bin
    for (auto& b : seg.bins) b = 0;
    return seg;
  }
  for (size_t i = 0; i < centers.size(); ++i) {
    double d = depth.at(0, centers[i].second, centers[i].first);
    int b = int((d - lo) / (hi - lo) * bins);
    seg.bins[i] = std::clamp(b, 0, bins - 1);  // topmost edge inclusive
  }
  return seg;
}

std::vector<std::pair<int, int>> candidate_centers(const Image& img,
                                                   int patch_side, int stride) {
  std::vector<std::pair<int, int>> centers;
  if (patch_side % 2 != 0 || patch_side <= 0)
    throw Error(ErrorCode::InvalidArgument, "patch side must be even");
  if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
  int h = patch_side / 2;
  int x0 = h % 2 == 0 ? h : h + 1;  // first even coordinate with fit
  int y0 = x0;
  for (int cy = y0; cy + patch_side - h <= img.height; cy += stride)
    for (int cx = x0; cx + patch_side - h <= img.width; cx += stride)
      centers.emplace_back(cx, cy);
  return centers;
}

PatchDatabase build_database(const Image& img, const Image& depth,
                             const FeatureMap& fm,
                             const DatabaseBuildConfig& cfg, ScaleTag tag) {
  if (depth.width != img.width || depth.height != img.height)
    throw Error(ErrorCode::Shape, "depth map not aligned to image");
  if (cfg.db_stride % 2 != 0)
    throw Error(ErrorCode::Config, "db_stride must be even to keep centers even");
  PatchDatabase db;
  db.scale_tag = tag;
  db.patch_side = cfg.patch_side;
  db.depth_bins = cfg.depth_bins;

  auto centers = candidate_centers(img, cfg.patch_side, cfg.db_stride);
  if (centers.empty()) {
    db.depth_bin_edges.assign(size_t(cfg.depth_bins) + 1, 0.0f);
    return db;  // image smaller than the patch: valid, forces fallback
  }

  DepthSegmentation seg = segment_by_depth(depth, centers, cfg.depth_bins);
  db.depth_bin_edges = seg.edges;

  std::vector<Descriptor> descriptors(centers.size());
  for (size_t i = 0; i < centers.size(); ++i)
    descriptors[i] =
        patch_descriptor(fm, centers[i].first, centers[i].second, cfg.patch_side);

  for (int bin = 0; bin < cfg.depth_bins; ++bin) {
    std::vector<size_t> member;  // indices into centers, ascending
    for (size_t i = 0; i < centers.size(); ++i)
      if (seg.bins[i] == bin) member.push_back(i);
    if (member.empty()) continue;
    size_t k = (member.size() + cfg.k_divisor - 1) / cfg.k_divisor;
    auto dist = [&](size_t a, size_t b) {
      return descriptor_distance(descriptors[member[a]], descriptors[member[b]]);
    };
    std::vector<size_t> medoids = cluster_kmedoids(member.size(), dist, k);
    for (size_t m : medoids) {
      size_t i = member[m];
      PatchEntry e;
      e.cx = centers[i].first;
      e.cy = centers[i].second;
      e.depth = float(depth.at(0, e.cy, e.cx));
      e.bin_index = bin;
      e.descriptor = descriptors[i];
      db.entries.push_back(std::move(e));
    }
  }
  std::sort(db.entries.begin(), db.entries.end(),
            [](const PatchEntry& a, const PatchEntry& b) {
              return std::tie(a.bin_index, a.cy, a.cx) <
                     std::tie(b.bin_index, b.cy, b.cx);
            });
  return db;
}

PatchDatabase derive_scaled_database(const PatchDatabase& db,
                                     const Image& img_coarse,
                                     const FeatureMap& fm_coarse, int* dropped) {
  PatchDatabase out;
  out.scale_tag = ScaleTag::Quarter;
  out.patch_side = db.patch_side;
  out.depth_bins = db.depth_bins;
  out.depth_bin_edges = db.depth_bin_edges;
  int skipped = 0;
  for (const PatchEntry& e : db.entries) {
    if (e.cx % 2 != 0 || e.cy % 2 != 0)
      throw Error(ErrorCode::Config, "database centers must be even");
    int cx = e.cx / 2, cy = e.cy / 2;
    if (!patch_fits(img_coarse, cx, cy, db.patch_side)) {
      ++skipped;
      continue;
    }
    PatchEntry d;
    d.cx = cx;
    d.cy = cy;
    d.depth = e.depth;
    d.bin_index = e.bin_index;
    d.descriptor = patch_descriptor(fm_coarse, cx, cy, db.patch_side);
    out.entries.push_back(std::move(d));
  }
  if (dropped) *dropped = skipped;
  return out;
}

namespace {

bool cousin_fits(int cx, int cy, const std::optional<CousinFit>& fit) {
  if (!fit) return true;
  int side = fit->hr_side;
  int h = side / 2;
  int x = 2 * cx, y = 2 * cy;
  return x - h >= 0 && y - h >= 0 && x + side - h <= fit->hr_width &&
         y + side - h <= fit->hr_height;
}

}  // namespace

RetrievalResult retrieve_cousin(const Descriptor& query, double query_depth,
                                const PatchDatabase& db, double threshold,
                                const std::optional<CousinFit>& fit) {
  RetrievalResult r;
  r.min_distance = std::numeric_limits<double>::infinity();
  for (const PatchEntry& e : db.entries) {
    if (!(double(e.depth) < query_depth)) continue;  // strictly nearer only
    if (!cousin_fits(e.cx, e.cy, fit)) continue;
    double d = descriptor_distance(query, e.descriptor);
    if (d < r.min_distance) {
      r.min_distance = d;
      r.cousin_cx = e.cx;
      r.cousin_cy = e.cy;
    }
  }
  r.used_fallback = !std::isfinite(r.min_distance) || r.min_distance > threshold;
  if (r.used_fallback && !std::isfinite(r.min_distance)) {
    r.cousin_cx = -1;
    r.cousin_cy = -1;
  }
  return r;
}

RetrievalResult retrieve_exhaustive(const Descriptor& query, double query_depth,
                                    const Image& img_coarse,
                                    const Image& depth_coarse,
                                    const FeatureMap& fm_coarse, int patch_side,
                                    bool use_depth, double threshold,
                                    const std::optional<CousinFit>& fit) {
  RetrievalResult r;
  r.min_distance = std::numeric_limits<double>::infinity();
  for (auto [cx, cy] : candidate_centers(img_coarse, patch_side, 2)) {
    if (use_depth && !(depth_coarse.at(0, cy, cx) < query_depth)) continue;
    if (!cousin_fits(cx, cy, fit)) continue;
    Descriptor d = patch_descriptor(fm_coarse, cx, cy, patch_side);
    double dist = descriptor_distance(query, d);
    if (dist < r.min_distance) {
      r.min_distance = dist;
      r.cousin_cx = cx;
      r.cousin_cy = cy;
    }
  }
  r.used_fallback = !std::isfinite(r.min_distance) || r.min_distance > threshold;
  if (r.used_fallback && !std::isfinite(r.min_distance)) {
    r.cousin_cx = -1;
    r.cousin_cy = -1;
  }
  return r;
}

namespace {

template <typename T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!f) throw Error(ErrorCode::Format, "truncated database file");
  return v;
}

}  // namespace

void save_database(const PatchDatabase& db, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write database: " + path);
  f.write("RZDB", 4);
  put<uint16_t>(f, 1);  // version
  put<uint8_t>(f, uint8_t(db.scale_tag));
  put<uint16_t>(f, uint16_t(db.patch_side));
  put<uint16_t>(f, uint16_t(db.depth_bins));
  for (float e : db.depth_bin_edges) put<float>(f, e);
  uint32_t dlen =
      db.entries.empty() ? 0 : uint32_t(db.entries[0].descriptor.v.size());
  put<uint32_t>(f, dlen);
  put<uint32_t>(f, uint32_t(db.entries.size()));
  for (const PatchEntry& e : db.entries) {
    put<int32_t>(f, e.cx);
    put<int32_t>(f, e.cy);
    put<float>(f, e.depth);
    put<int32_t>(f, e.bin_index);
    put<uint8_t>(f, e.descriptor.zero ? 1 : 0);
    for (float v : e.descriptor.v) put<float>(f, v);
  }
}

PatchDatabase load_database(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open database: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "RZDB", 4) != 0)
    throw Error(ErrorCode::Format, "not a RZDB file: " + path);
  uint16_t version = get<uint16_t>(f);
  if (version != 1)
    throw Error(ErrorCode::Format, "unsupported RZDB version");
  PatchDatabase db;
  db.scale_tag = ScaleTag(get<uint8_t>(f));
  db.patch_side = get<uint16_t>(f);
  db.depth_bins = get<uint16_t>(f);
  db.depth_bin_edges.resize(size_t(db.depth_bins) + 1);
  for (auto& e : db.depth_bin_edges) e = get<float>(f);
  uint32_t dlen = get<uint32_t>(f);
  uint32_t count = get<uint32_t>(f);
  db.entries.resize(count);
  for (auto& e : db.entries) {
    e.cx = get<int32_t>(f);
    e.cy = get<int32_t>(f);
    e.depth = get<float>(f);
    e.bin_index = get<int32_t>(f);
    e.descriptor.zero = get<uint8_t>(f) != 0;
    e.descriptor.v.resize(dlen);
    for (auto& v : e.descriptor.v) v = get<float>(f);
  }
  return db;
}

}  // namespace rzsr
