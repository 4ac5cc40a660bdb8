#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rzsr/network.hpp"
#include "rzsr/patchdb.hpp"
#include "rzsr/resample.hpp"

namespace rzsr {

enum class RetrievalMode { Database, Exhaustive, ExhaustiveNoDepth, None };
const char* retrieval_mode_name(RetrievalMode m);
RetrievalMode parse_retrieval_mode(const std::string& s);

/// One training sample: LR son (side M, from the twice-downsampled image),
/// its HR father (side 2M at doubled coordinates), and the retrieved HR
/// cousin (side 2M) or its bicubic fallback. `son_up` is the crop of the
/// globally upsampled son image that feeds the network's residual path.
struct Triplet {
  int son_cx = 0, son_cy = 0;  // in I-down-2 coordinates
  Image son;
  Image father;
  Image cousin;   // empty when mined without the reference branch
  Image son_up;
  bool used_fallback = false;
  double distance = 0.0;
  int cousin_cx = -1, cousin_cy = -1;  // in I-down-4 coordinates
};

struct TrainConfig {
  int patch_side = 48;  // M, even
  int scale = 2;
  int max_iters = 3000;
  double lr = 1e-3;
  double lr_drop = 10.0;
  double min_lr = 1e-6;
  bool augment = true;
  int check_every = 50;
  uint64_t seed = 0;
};

struct TrainingSetInputs {
  const Image* img = nullptr;     // I
  const Image* img2 = nullptr;    // I down 2
  const Image* img4 = nullptr;    // I down 4
  const Image* depth2 = nullptr;  // depth aligned to img2
  const Image* depth4 = nullptr;  // depth aligned to img4
  const FeatureMap* fm2 = nullptr;
  const FeatureMap* fm4 = nullptr;
  const PatchDatabase* db2 = nullptr;
  const PatchDatabase* db4 = nullptr;
};

struct TrainingSetStats {
  int retrieval_attempts = 0;
  int fallbacks = 0;
};

/// Mines triplets: sons are the Theta-down-2 entries (topped up from the
/// candidate lattice when the database yields fewer than 32), cousins come
/// from Theta-down-4 under the depth constraint and threshold. When
/// `with_reference` is false no retrieval happens and cousins stay empty.
std::vector<Triplet> build_training_set(const TrainingSetInputs& in,
                                        RetrievalMode mode, double threshold,
                                        const TrainConfig& cfg,
                                        bool with_reference,
                                        TrainingSetStats* stats = nullptr);

/// Applies one dihedral-4 transform consistently to all patches of the
/// triplet so cross-scale correspondence is preserved.
Triplet augment_triplet(const Triplet& t, int id);

struct LossTraceRow {
  int iteration = 0;
  double loss = 0.0;
  double lr = 0.0;
  int triplet_id = 0;
  bool used_fallback = false;
};

struct TrainResult {
  std::vector<LossTraceRow> trace;
  int iterations = 0;
  double final_lr = 0.0;
  int lr_drops = 0;
};

/// Test-time training loop: uniform triplet sampling with a fixed seed,
/// L2 loss against the HR father, Adam updates, and a plateau-based
/// learning-rate decay (least-squares slope over the last 10 checkpoints
/// against its standard error; drop by 10x, stop below min_lr).
TrainResult train(RzsrNetwork& net, const std::vector<Triplet>& triplets,
                  const TrainConfig& cfg);

void write_loss_trace_csv(const std::vector<LossTraceRow>& rows,
                          const std::string& path);

}  // namespace rzsr
