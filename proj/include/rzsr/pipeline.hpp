#pragma once

#include <string>

#include "rzsr/config.hpp"

namespace rzsr {

struct SrRunStats {
  std::string out_png;
  int train_attempts = 0;
  int train_fallbacks = 0;
  int infer_attempts = 0;
  int infer_fallbacks = 0;
  int train_iterations = 0;
  double first_loss = 0.0;
  double last_loss = 0.0;
};

/// Full pipeline: build databases, mine triplets, test-time training,
/// sliding-window inference, back-projection, artifact writing. Scale
/// factors above 2 cascade the x2 stage and finish with an exact resize.
SrRunStats run_sr(const SRConfig& cfg);

void run_degrade(const SRConfig& cfg);

struct EvalSummary {
  int count = 0;
  int infinite_psnr = 0;
  double mean_psnr = 0.0;  // over finite entries
  double mean_ssim = 0.0;
};
EvalSummary run_eval(const SRConfig& cfg);

void run_build_db(const SRConfig& cfg);

void run_ablate(const SRConfig& cfg);

void run_kernel_gen(const SRConfig& cfg);

}  // namespace rzsr
