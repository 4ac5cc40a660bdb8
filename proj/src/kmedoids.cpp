#include "rzsr/kmedoids.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace rzsr {

namespace {

constexpr size_t kMatrixLimit = 1024;  // cache all pairs up to this size
constexpr size_t kSwapLimit = 256;     // single-swap refinement bound
constexpr size_t kSwap2Limit = 24;     // pair-swap refinement bound

struct DistTable {
  size_t n;
  const std::function<double(size_t, size_t)>* fn;
  std::vector<double> matrix;  // empty when n exceeds the cache limit

  double operator()(size_t i, size_t j) const {
    return matrix.empty() ? (*fn)(i, j) : matrix[i * n + j];
  }
};

double total_cost(const DistTable& dist, const std::vector<size_t>& meds) {
  double sum = 0.0;
  for (size_t i = 0; i < dist.n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t m : meds) best = std::min(best, dist(i, m));
    sum += best;
  }
  return sum;
}

// assign / recompute alternation until stable
void alternate(const DistTable& dist, std::vector<size_t>& medoids) {
  size_t n = dist.n, k = medoids.size();
  std::vector<size_t> assign(n, 0);
  for (int round = 0; round < 50; ++round) {
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      size_t best_c = 0;
      for (size_t c = 0; c < k; ++c) {
        double d = dist(i, medoids[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      if (assign[i] != best_c) {
        assign[i] = best_c;
        changed = true;
      }
    }
    for (size_t c = 0; c < k; ++c) {
      std::vector<size_t> members;
      for (size_t i = 0; i < n; ++i)
        if (assign[i] == c) members.push_back(i);
      if (members.empty()) continue;
      double best = std::numeric_limits<double>::infinity();
      size_t best_m = medoids[c];
      for (size_t m : members) {
        double s = 0.0;
        for (size_t i : members) s += dist(m, i);
        if (s < best) {
          best = s;
          best_m = m;
        }
      }
      if (best_m != medoids[c]) {
        medoids[c] = best_m;
        changed = true;
      }
    }
    if (!changed) break;
  }
}

// best-improvement single-medoid swaps against the global cost; the plain
// alternation stalls in shallow local optima on small bins
void swap_refine(const DistTable& dist, std::vector<size_t>& medoids) {
  size_t n = dist.n, k = medoids.size();
  if (n > kSwapLimit) return;
  std::vector<char> is_medoid(n, 0);
  std::vector<double> d1(n), d2(n);
  std::vector<size_t> near1(n);
  for (int round = 0; round < 50; ++round) {
    std::fill(is_medoid.begin(), is_medoid.end(), 0);
    for (size_t m : medoids) is_medoid[m] = 1;
    // nearest and second-nearest medoid distances per point
    for (size_t i = 0; i < n; ++i) {
      d1[i] = d2[i] = std::numeric_limits<double>::infinity();
      for (size_t c = 0; c < k; ++c) {
        double d = dist(i, medoids[c]);
        if (d < d1[i]) {
          d2[i] = d1[i];
          d1[i] = d;
          near1[i] = c;
        } else if (d < d2[i]) {
          d2[i] = d;
        }
      }
    }
    double cur = 0.0;
    for (size_t i = 0; i < n; ++i) cur += d1[i];

    double best_cost = cur;
    size_t best_slot = 0, best_point = 0;
    bool found = false;
    for (size_t c = 0; c < k; ++c)
      for (size_t p = 0; p < n; ++p) {
        if (is_medoid[p]) continue;
        double cost = 0.0;
        for (size_t i = 0; i < n; ++i) {
          double keep = near1[i] == c ? d2[i] : d1[i];
          cost += std::min(keep, dist(i, p));
        }
        if (cost < best_cost) {
          best_cost = cost;
          best_slot = c;
          best_point = p;
          found = true;
        }
      }
    if (!found) break;
    medoids[best_slot] = best_point;
  }
}

// coordinated two-medoid moves catch what single swaps cannot; quartic, so
// only run on tiny bins
bool swap2_refine(const DistTable& dist, std::vector<size_t>& medoids) {
  size_t n = dist.n, k = medoids.size();
  if (n > kSwap2Limit || k < 2) return false;
  double cur = total_cost(dist, medoids);
  bool improved_any = false;
  for (int round = 0; round < 20; ++round) {
    double best_cost = cur;
    size_t bs1 = 0, bs2 = 0, bp1 = 0, bp2 = 0;
    bool found = false;
    for (size_t c1 = 0; c1 < k; ++c1)
      for (size_t c2 = c1 + 1; c2 < k; ++c2) {
        std::vector<size_t> trial = medoids;
        for (size_t p1 = 0; p1 < n; ++p1) {
          if (std::find(medoids.begin(), medoids.end(), p1) != medoids.end())
            continue;
          for (size_t p2 = p1 + 1; p2 < n; ++p2) {
            if (std::find(medoids.begin(), medoids.end(), p2) !=
                medoids.end())
              continue;
            trial[c1] = p1;
            trial[c2] = p2;
            double cost = total_cost(dist, trial);
            if (cost < best_cost) {
              best_cost = cost;
              bs1 = c1;
              bs2 = c2;
              bp1 = p1;
              bp2 = p2;
              found = true;
            }
          }
        }
      }
    if (!found) break;
    medoids[bs1] = bp1;
    medoids[bs2] = bp2;
    cur = best_cost;
    improved_any = true;
  }
  return improved_any;
}

}  // namespace

std::vector<size_t> cluster_kmedoids(
    size_t n, const std::function<double(size_t, size_t)>& dist_fn, size_t k) {
  if (n == 0 || k == 0) return {};
  if (k >= n) {
    std::vector<size_t> all(n);
    std::iota(all.begin(), all.end(), size_t(0));
    return all;
  }

  DistTable dist{n, &dist_fn, {}};
  if (n <= kMatrixLimit) dist.matrix.assign(n * n, 0.0);

  std::vector<double> total(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double d = dist_fn(i, j);
      if (!dist.matrix.empty()) {
        dist.matrix[i * n + j] = d;
        dist.matrix[j * n + i] = d;
      }
      total[i] += d;
      total[j] += d;
    }

  // start 1: the k points of smallest total distance to all others
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return total[a] < total[b]; });
  std::vector<size_t> greedy(order.begin(), order.begin() + k);
  std::sort(greedy.begin(), greedy.end());

  // start 2: farthest-point spread from the same center, which escapes the
  // clumped-init failure mode
  std::vector<size_t> spread = {order[0]};
  while (spread.size() < k) {
    double best = -1.0;
    size_t best_p = 0;
    for (size_t p = 0; p < n; ++p) {
      if (std::find(spread.begin(), spread.end(), p) != spread.end()) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (size_t m : spread) nearest = std::min(nearest, dist(p, m));
      if (nearest > best) {
        best = nearest;
        best_p = p;
      }
    }
    spread.push_back(best_p);
  }
  std::sort(spread.begin(), spread.end());

  alternate(dist, greedy);
  swap_refine(dist, greedy);
  while (swap2_refine(dist, greedy)) swap_refine(dist, greedy);
  alternate(dist, spread);
  swap_refine(dist, spread);
  while (swap2_refine(dist, spread)) swap_refine(dist, spread);

  std::vector<size_t>& winner =
      total_cost(dist, spread) < total_cost(dist, greedy) ? spread : greedy;
  std::sort(winner.begin(), winner.end());
  return winner;
}

}  // namespace rzsr
