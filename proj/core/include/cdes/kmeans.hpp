#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cdes/types.hpp"

namespace cdes {

struct ClusterAssignment {
  std::vector<std::size_t> assignment;  // cluster index per input vector
  std::vector<Vector> centroids;
  // Labels attached by a cluster labeller; clusters may stay unlabelled.
  std::map<std::size_t, std::string> labels;

  // Sum of squared distances to the assigned centroid, recorded after every
  // assignment step.
  std::vector<double> inertia_history;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t requested_k = 0;
  bool k_clamped = false;

  std::size_t k() const noexcept { return centroids.size(); }
  double inertia() const { return inertia_history.empty() ? 0.0 : inertia_history.back(); }
};

// Lloyd's algorithm with k-means++ seeding under the Euclidean metric.
// k larger than the number of vectors is clamped (and flagged). Empty
// clusters are re-seeded with the point farthest from its centroid.
// Assignment ties go to the lower cluster index. Deterministic in `seed`.
ClusterAssignment kmeans(std::span<const Vector> vectors, std::size_t k, std::uint64_t seed,
                         std::size_t max_iter = 100);

}  // namespace cdes
