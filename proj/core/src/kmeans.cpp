#include "cdes/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "cdes/error.hpp"
#include "cdes/random.hpp"

namespace cdes {

namespace {

using Point = std::vector<double>;

double sq_dist(const Vector& x, const Point& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - c[i];
    s += d * d;
  }
  return s;
}

Point to_point(const Vector& v) { return Point(v.begin(), v.end()); }

std::vector<Point> seed_plus_plus(std::span<const Vector> x, std::size_t k, Rng& rng) {
  const std::size_t n = x.size();
  std::vector<Point> centers;
  centers.reserve(k);
  std::vector<bool> chosen(n, false);
  std::size_t first = rng.below(n);
  centers.push_back(to_point(x[first]));
  chosen[first] = true;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(x[i], centers.back());

  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += d2[i];
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && r < acc) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        // rounding left r at the very top of the range
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // every point coincides with a centre; take any unused point
      std::vector<std::size_t> unused;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) unused.push_back(i);
      }
      pick = unused[rng.below(unused.size())];
    }
    chosen[pick] = true;
    centers.push_back(to_point(x[pick]));
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(x[i], centers.back()));
  }
  return centers;
}

// Returns inertia; ties go to the lowest index.
double assign(std::span<const Vector> x, const std::vector<Point>& centers,
              std::vector<std::size_t>& out) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = sq_dist(x[i], centers[c]);
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    out[i] = arg;
    inertia += best;
  }
  return inertia;
}

// Recomputes member means; returns the indices of empty clusters.
std::vector<std::size_t> update(std::span<const Vector> x, const std::vector<std::size_t>& a,
                                std::vector<Point>& centers) {
  const std::size_t dim = centers.front().size();
  std::vector<Point> sums(centers.size(), Point(dim, 0.0));
  std::vector<std::size_t> counts(centers.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto& s = sums[a[i]];
    for (std::size_t d = 0; d < dim; ++d) s[d] += x[i][d];
    ++counts[a[i]];
  }
  std::vector<std::size_t> empty;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (counts[c] == 0) {
      empty.push_back(c);
      continue;
    }
    for (std::size_t d = 0; d < dim; ++d) {
      centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
  }
  return empty;
}

}  // namespace

ClusterAssignment kmeans(std::span<const Vector> vectors, std::size_t k, std::uint64_t seed,
                         std::size_t max_iter) {
  if (k == 0) throw ValidationError("kmeans needs k >= 1");
  if (vectors.empty()) throw ValidationError("kmeans needs at least one vector");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) {
      throw DimensionError("kmeans input mixes vector lengths " + std::to_string(dim) +
                           " and " + std::to_string(v.size()));
    }
  }

  ClusterAssignment out;
  out.requested_k = k;
  if (k > vectors.size()) {
    k = vectors.size();
    out.k_clamped = true;
  }

  Rng rng(seed);
  std::vector<Point> centers = seed_plus_plus(vectors, k, rng);
  std::vector<std::size_t> current(vectors.size(), 0);
  std::vector<std::size_t> previous;

  for (std::size_t iter = 0; iter < std::max<std::size_t>(max_iter, 1); ++iter) {
    out.inertia_history.push_back(assign(vectors, centers, current));
    ++out.iterations;
    if (current == previous) {
      out.converged = true;
      break;
    }
    previous = current;
    const auto empty = update(vectors, current, centers);
    if (!empty.empty()) {
      std::vector<double> dist(vectors.size());
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        dist[i] = sq_dist(vectors[i], centers[current[i]]);
      }
      for (std::size_t c : empty) {
        const auto far = static_cast<std::size_t>(
            std::max_element(dist.begin(), dist.end()) - dist.begin());
        centers[c] = to_point(vectors[far]);
        dist[far] = -1.0;
      }
    }
  }

  // centroids reported as the member means of the final assignment
  update(vectors, current, centers);
  out.assignment = std::move(current);
  out.centroids.reserve(k);
  for (const auto& c : centers) out.centroids.emplace_back(c.begin(), c.end());
  return out;
}

}  // namespace cdes
