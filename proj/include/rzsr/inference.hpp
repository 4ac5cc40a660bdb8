#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rzsr/blur.hpp"
#include "rzsr/trainer.hpp"

namespace rzsr {

/// Sliding-window tiling of the input: stride-s lattice of tile centers,
/// clamped so edge tiles sit flush with the borders (full coverage).
struct TilePlan {
  int patch_side = 0;
  int stride = 0;
  std::vector<std::pair<int, int>> centers;
};

TilePlan plan_tiles(int width, int height, int patch_side, int stride);

/// Per-tile SR model: takes the upsampled son (and cousin unless running
/// reference-free) at output size and returns the SR tile. Tests substitute
/// stubs here.
using TileModel = std::function<Tensor(const Tensor& son_up, const Tensor* cousin)>;

struct SrOptions {
  int patch_side = 48;
  int tile_stride = 4;
  double threshold = 0.9;
  RetrievalMode retrieval = RetrievalMode::Database;
  bool with_reference = true;
  FeatureOptions features;          // descriptors for the query image
  const PatchDatabase* db2 = nullptr;      // Theta-down-2, reused from training
  const Image* img_coarse = nullptr;       // I down 2 (exhaustive modes)
  const Image* depth_coarse = nullptr;
  const FeatureMap* fm_coarse = nullptr;
};

struct TileAuditRow {
  int tile_cx = 0, tile_cy = 0;
  int cousin_cx = -1, cousin_cy = -1;
  double distance = 0.0;
  bool used_fallback = true;
  double query_depth = 0.0;
  double entry_depth = 0.0;
};

/// Patch-wise SR of the whole image: per-tile cousin retrieval with the
/// depth constraint and threshold fallback, tile inference, uniform overlap
/// averaging, clamp to [0,1]. Output is exactly (2W, 2H). Images smaller
/// than the patch get mirrored padding and a cropped result.
Image sr_image(const Image& img, const Image& depth, const TileModel& model,
               const SrOptions& opt, std::vector<TileAuditRow>* audit = nullptr);

/// Iterative back-projection: sr += upscale(lr - downscale(sr)); downscale
/// is bicubic 0.5x, or the kernel model when a kernel file drove the
/// degradation. Stops early if the residual norm grows twice in a row.
Image back_project(const Image& sr, const Image& lr, const BlurKernel* kernel,
                   int factor, int iters);

/// Averages the inverse-transformed SR results over the 8 dihedral
/// transforms of the input; `run` maps (image, depth) to an SR image.
Image geometric_ensemble(
    const Image& img, const Image& depth,
    const std::function<Image(const Image&, const Image&)>& run, bool enabled);

void write_audit_csv(const std::vector<TileAuditRow>& rows,
                     const std::string& path);

}  // namespace rzsr
