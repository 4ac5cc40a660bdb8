#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rzsr/features.hpp"
#include "rzsr/image.hpp"

namespace rzsr {

struct PatchEntry {
  int cx = 0;  // even, in the database's source-scale coordinates
  int cy = 0;
  float depth = 0.0f;  // normalized, at the patch center
  int bin_index = 0;
  Descriptor descriptor;
};

/// Internal reference patch database for one image scale: depth-binned
/// k-medoids representatives with their centers, depths, and descriptors.
struct PatchDatabase {
  ScaleTag scale_tag = ScaleTag::Half;
  int patch_side = 0;
  int depth_bins = 0;                  // D
  std::vector<float> depth_bin_edges;  // D+1 values
  std::vector<PatchEntry> entries;     // sorted by (bin_index, cy, cx)
};

struct DepthSegmentation {
  std::vector<int> bins;            // per center
  std::vector<float> edges;         // D+1, uniform over the observed range
};

/// Uniform depth binning by center-pixel depth; topmost edge inclusive.
/// A constant depth map puts every center in bin 0.
DepthSegmentation segment_by_depth(const Image& depth,
                                   const std::vector<std::pair<int, int>>& centers,
                                   int bins);

struct DatabaseBuildConfig {
  int patch_side = 48;   // even
  int db_stride = 2;     // even-coordinate lattice stride
  int depth_bins = 5;    // D
  int k_divisor = 100;   // k_i = ceil(N_i / k_divisor)
};

/// Candidate centers: even-coordinate lattice at db_stride with full patch
/// fit. Smaller-than-patch images give an empty database (all queries fall
/// back).
std::vector<std::pair<int, int>> candidate_centers(const Image& img,
                                                   int patch_side,
                                                   int stride);

PatchDatabase build_database(const Image& img, const Image& depth,
                             const FeatureMap& fm,
                             const DatabaseBuildConfig& cfg,
                             ScaleTag tag = ScaleTag::Half);

/// Theta-down-4 from Theta-down-2: halve centers, recompute descriptors from
/// the coarser image's feature map, copy depths. Entries whose halved patch
/// leaves the coarse image are dropped; `dropped` (when given) counts them.
PatchDatabase derive_scaled_database(const PatchDatabase& db,
                                     const Image& img_coarse,
                                     const FeatureMap& fm_coarse,
                                     int* dropped = nullptr);

struct RetrievalResult {
  int cousin_cx = -1;  // database/source coordinates; -1,-1 on fallback
  int cousin_cy = -1;
  double min_distance = 0.0;  // +inf when no candidate was eligible
  bool used_fallback = true;
};

/// Optional candidate filter: the HR cousin patch at (2*cx, 2*cy) with side
/// 2*patch_side must fit inside an image of these dimensions.
struct CousinFit {
  int hr_width = 0;
  int hr_height = 0;
  int hr_side = 0;
};

/// Depth-constrained nearest entry (strictly nearer than the query) under
/// descriptor distance; falls back when nothing is eligible or the best
/// distance exceeds T.
RetrievalResult retrieve_cousin(const Descriptor& query, double query_depth,
                                const PatchDatabase& db, double threshold,
                                const std::optional<CousinFit>& fit = {});

/// Scans the full even-coordinate lattice of the coarse image instead of the
/// database; the depth constraint applies only when use_depth is set.
RetrievalResult retrieve_exhaustive(const Descriptor& query, double query_depth,
                                    const Image& img_coarse,
                                    const Image& depth_coarse,
                                    const FeatureMap& fm_coarse, int patch_side,
                                    bool use_depth, double threshold,
                                    const std::optional<CousinFit>& fit = {});

/// Binary "RZDB" container; layout documented in the README.
void save_database(const PatchDatabase& db, const std::string& path);
PatchDatabase load_database(const std::string& path);

}  // namespace rzsr
