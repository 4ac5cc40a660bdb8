#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rzsr {

/// Deterministic alternating k-medoids over an arbitrary pairwise distance.
/// Initialization: the k points with the smallest total distance to all
/// others. Alternation: assign each point to its nearest medoid, then move
/// each medoid to the member minimizing its cluster's distance sum. Stops
/// when assignments are stable or after 50 rounds. All ties break toward
/// the lowest index. Returns sorted medoid indices; k >= n returns all.
std::vector<size_t> cluster_kmedoids(
    size_t n, const std::function<double(size_t, size_t)>& dist, size_t k);

}  // namespace rzsr
