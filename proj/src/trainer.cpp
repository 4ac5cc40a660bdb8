#include "rzsr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "rzsr/rng.hpp"

namespace rzsr {

const char* retrieval_mode_name(RetrievalMode m) {
  switch (m) {
    case RetrievalMode::Database: return "database";
    case RetrievalMode::Exhaustive: return "exhaustive";
    case RetrievalMode::ExhaustiveNoDepth: return "exhaustive-no-depth";
    case RetrievalMode::None: return "none";
  }
  return "?";
}

RetrievalMode parse_retrieval_mode(const std::string& s) {
  if (s == "database") return RetrievalMode::Database;
  if (s == "exhaustive") return RetrievalMode::Exhaustive;
  if (s == "exhaustive-no-depth") return RetrievalMode::ExhaustiveNoDepth;
  if (s == "none") return RetrievalMode::None;
  throw Error(ErrorCode::Config, "unknown retrieval mode: " + s);
}

std::vector<Triplet> build_training_set(const TrainingSetInputs& in,
                                        RetrievalMode mode, double threshold,
                                        const TrainConfig& cfg,
                                        bool with_reference,
                                        TrainingSetStats* stats) {
  const int M = cfg.patch_side;
  const Image& img = *in.img;
  const Image& img2 = *in.img2;
  Image up2 = resize_bicubic(img2, 2.0);

  auto father_fits = [&](int cx, int cy) {
    return patch_fits(img, 2 * cx, 2 * cy, 2 * M) &&
           patch_fits(up2, 2 * cx, 2 * cy, 2 * M);
  };

  // sons: database entries first, then lattice top-up for tiny images
  struct Son {
    int cx, cy;
    Descriptor desc;
    double depth;
  };
  std::vector<Son> sons;
  std::set<std::pair<int, int>> seen;
  for (const PatchEntry& e : in.db2->entries) {
    if (!father_fits(e.cx, e.cy)) continue;
    sons.push_back({e.cx, e.cy, e.descriptor, double(e.depth)});
    seen.insert({e.cx, e.cy});
  }
  if (sons.size() < 32) {
    for (auto [cx, cy] : candidate_centers(img2, M, 2)) {
      if (sons.size() >= 32) break;
      if (seen.count({cx, cy}) || !father_fits(cx, cy)) continue;
      sons.push_back({cx, cy, patch_descriptor(*in.fm2, cx, cy, M),
                      in.depth2->at(0, cy, cx)});
    }
  }
  if (sons.empty())
    throw Error(ErrorCode::Runtime,
                "image too small to mine any HR father; use a smaller patch side");

  CousinFit fit{img2.width, img2.height, 2 * M};
  std::vector<Triplet> out;
  out.reserve(sons.size());
  for (const Son& son : sons) {
    Triplet t;
    t.son_cx = son.cx;
    t.son_cy = son.cy;
    t.son = extract_patch(img2, son.cx, son.cy, M).pixels;
    t.father = extract_patch(img, 2 * son.cx, 2 * son.cy, 2 * M).pixels;
    t.son_up = extract_patch(up2, 2 * son.cx, 2 * son.cy, 2 * M).pixels;

    if (!with_reference) {
      out.push_back(std::move(t));
      continue;
    }

    RetrievalResult r;
    switch (mode) {
      case RetrievalMode::Database:
        r = retrieve_cousin(son.desc, son.depth, *in.db4, threshold, fit);
        break;
      case RetrievalMode::Exhaustive:
        r = retrieve_exhaustive(son.desc, son.depth, *in.img4, *in.depth4,
                                *in.fm4, M, true, threshold, fit);
        break;
      case RetrievalMode::ExhaustiveNoDepth:
        r = retrieve_exhaustive(son.desc, son.depth, *in.img4, *in.depth4,
                                *in.fm4, M, false, threshold, fit);
        break;
      case RetrievalMode::None:
        r.used_fallback = true;
        r.min_distance = std::numeric_limits<double>::infinity();
        break;
    }
    if (stats) {
      ++stats->retrieval_attempts;
      if (r.used_fallback) ++stats->fallbacks;
    }
    t.used_fallback = r.used_fallback;
    t.distance = r.min_distance;
    if (r.used_fallback) {
      t.cousin = resize_bicubic(t.son, 2.0);
    } else {
      t.cousin_cx = r.cousin_cx;
      t.cousin_cy = r.cousin_cy;
      t.cousin =
          extract_patch(img2, 2 * r.cousin_cx, 2 * r.cousin_cy, 2 * M).pixels;
    }
    out.push_back(std::move(t));
  }
  return out;
}

Triplet augment_triplet(const Triplet& t, int id) {
  if (id < 0 || id > 7)
    throw Error(ErrorCode::InvalidArgument, "augment id must be in [0,8)");
  if (id == 0) return t;
  Triplet a = t;
  a.son = dihedral_transform(t.son, id);
  a.father = dihedral_transform(t.father, id);
  a.son_up = dihedral_transform(t.son_up, id);
  if (!t.cousin.empty()) a.cousin = dihedral_transform(t.cousin, id);
  return a;
}

namespace {

// plateau test: least-squares slope over the checkpoint means vs the
// standard error of that slope
bool plateaued(const std::vector<double>& means) {
  const int n = 10;
  if (means.size() < size_t(n)) return false;
  const double* y = means.data() + means.size() - n;
  double xbar = (n - 1) / 2.0;
  double ybar = 0.0;
  for (int i = 0; i < n; ++i) ybar += y[i];
  ybar /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (i - xbar) * (i - xbar);
    sxy += (i - xbar) * (y[i] - ybar);
  }
  double slope = sxy / sxx;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    double fit = ybar + slope * (i - xbar);
    ss_res += (y[i] - fit) * (y[i] - fit);
  }
  double se = std::sqrt(ss_res / (n - 2) / sxx);
  return std::fabs(slope) < se;
}

}  // namespace

TrainResult train(RzsrNetwork& net, const std::vector<Triplet>& triplets,
                  const TrainConfig& cfg) {
  if (triplets.empty())
    throw Error(ErrorCode::InvalidArgument, "training needs at least one triplet");
  bool with_reference = net.mode() != NetMode::ReferenceFree;

  auto params = net.params();
  AdamState adam;
  adam.init(params);
  Rng rng(cfg.seed ^ 0x74726e5full);  // decoupled from the init stream

  TrainResult res;
  res.trace.reserve(cfg.max_iters);
  double lr = cfg.lr;
  std::vector<double> checkpoint_means;
  double window_sum = 0.0;
  int window_n = 0;

  RzsrNetwork::Cache cache;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    int idx = int(rng.uniform_int(triplets.size()));
    int aug = cfg.augment ? int(rng.uniform_int(8)) : 0;
    Triplet t = aug ? augment_triplet(triplets[idx], aug) : triplets[idx];

    Tensor son_up = image_to_tensor(t.son_up);
    Tensor target = image_to_tensor(t.father);
    Tensor out;
    if (with_reference) {
      Tensor cousin = image_to_tensor(t.cousin);
      out = net.forward(son_up, &cousin, &cache);
    } else {
      out = net.forward(son_up, nullptr, &cache);
    }

    double n_el = double(out.size());
    double loss = 0.0;
    Tensor dout(out.channels, out.height, out.width);
    for (size_t i = 0; i < out.data.size(); ++i) {
      double diff = out.data[i] - target.data[i];
      loss += diff * diff;
      dout.data[i] = 2.0 * diff / n_el;
    }
    loss /= n_el;
    if (!std::isfinite(loss))
      throw Error(ErrorCode::Runtime,
                  "non-finite loss at iteration " + std::to_string(iter) +
                      " (lr " + std::to_string(lr) + ", triplet " +
                      std::to_string(idx) + ")");

    net.zero_grad();
    net.backward(dout, cache);
    adam.update(params, lr);

    res.trace.push_back({iter, loss, lr, idx, triplets[idx].used_fallback});
    res.iterations = iter;
    window_sum += loss;
    ++window_n;

    if (iter % cfg.check_every == 0) {
      checkpoint_means.push_back(window_sum / window_n);
      window_sum = 0.0;
      window_n = 0;
      if (plateaued(checkpoint_means)) {
        lr /= cfg.lr_drop;
        ++res.lr_drops;
        checkpoint_means.clear();
        if (lr < cfg.min_lr) break;
      }
    }
  }
  res.final_lr = lr;
  return res;
}

void write_loss_trace_csv(const std::vector<LossTraceRow>& rows,
                          const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot write loss trace: " + path);
  f << "iteration,loss,lr,triplet_id,used_fallback\n";
  f.precision(12);
  for (const auto& r : rows)
    f << r.iteration << "," << r.loss << "," << r.lr << "," << r.triplet_id
      << "," << (r.used_fallback ? 1 : 0) << "\n";
}

}  // namespace rzsr
