#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rzsr/degrade.hpp"
#include "rzsr/features.hpp"
#include "rzsr/network.hpp"
#include "rzsr/trainer.hpp"

namespace rzsr {

/// Every pipeline knob plus the per-command paths. Defaults reproduce the
/// published settings (D=5, T=0.9, M=48, s=4, lr=0.001); the config is
/// echoed verbatim into every output manifest.
struct SRConfig {
  // core pipeline
  int scale = 2;
  int depth_bins = 5;      // D
  double threshold = 0.9;  // T
  int patch_side = 48;     // M (even, divisible by 4)
  int tile_stride = 4;     // s
  int k_divisor = 100;     // k_i = ceil(N_i / k_divisor)
  int db_stride = 2;
  NetMode mode = NetMode::Full;
  RetrievalMode retrieval = RetrievalMode::Database;
  DescriptorBackend descriptor = DescriptorBackend::GradientPyramid;
  int channels = 128;
  bool ensemble = false;
  int bp_iters = 8;
  uint64_t seed = 0;
  bool audit = false;

  // training
  int max_iters = 3000;
  double lr = 1e-3;
  double min_lr = 1e-6;
  int check_every = 50;
  bool augment = true;

  // degradation / eval
  std::string degrade_mode = "bicubic";
  int factor = 2;
  double noise_sigma = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0, theta = -1.0;  // kernel-gen overrides

  // paths
  std::string image;      // input image (sr, build-db) or input dir (degrade, ablate)
  std::string depth;      // depth map file
  std::string kernel;     // blur kernel file
  std::string features;   // external FMAP file
  std::string reference;  // ground-truth image/dir (eval)
  std::string test;       // test image/dir (eval)
  std::string out;        // output file or directory

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static const std::vector<std::string>& keys();

  /// key=value lines, '#' comments; unknown keys are errors.
  void load_file(const std::string& path);
  std::string to_json() const;
};

}  // namespace rzsr
