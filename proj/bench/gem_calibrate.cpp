// Measures the layout quantities whose thresholds are frozen in the tests:
// star leaf separation, two-node distance and the gravity radius constant.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "testscope/layout/gem.hpp"

using namespace testscope;

namespace {

double min_leaf_angle(std::uint64_t seed) {
  std::vector<LayoutEdge> edges;
  for (std::size_t i = 1; i <= 8; ++i) edges.push_back({0, i, 1.0});
  auto p = default_params(9);
  p.seed = seed;
  auto r = layout(9, edges, p);
  std::vector<double> angles;
  for (std::size_t i = 1; i <= 8; ++i) {
    angles.push_back(std::atan2(r.positions[i].y - r.positions[0].y, r.positions[i].x - r.positions[0].x));
  }
  std::sort(angles.begin(), angles.end());
  double best = 2 * std::numbers::pi - (angles.back() - angles.front());
  for (std::size_t i = 1; i < angles.size(); ++i) best = std::min(best, angles[i] - angles[i - 1]);
  return best * 180.0 / std::numbers::pi;
}

double two_node_ratio(std::uint64_t seed) {
  auto p = default_params(2);
  p.seed = seed;
  auto r = layout(2, {{0, 1, 1.0}}, p);
  return std::hypot(r.positions[0].x - r.positions[1].x, r.positions[0].y - r.positions[1].y) / p.desiredEdgeLength;
}

// Largest distance from the barycenter over sqrt(n) * L for a random graph.
double radius_ratio(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<LayoutEdge> edges;
  for (std::size_t v = 1; v < n; ++v) edges.push_back({static_cast<std::size_t>(rng() % v), v, 1.0});
  for (std::size_t k = 0; k < n / 4; ++k) edges.push_back({rng() % n, rng() % n, 1.0});
  auto p = default_params(n);
  p.seed = seed;
  auto r = layout(n, edges, p);
  double worst = 0;
  for (const auto& q : r.positions) worst = std::max(worst, std::hypot(q.x, q.y));
  return worst / (std::sqrt(static_cast<double>(n)) * p.desiredEdgeLength);
}

}  // namespace

int main() {
  double minAngle = 360;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    double a = min_leaf_angle(seed);
    std::printf("star seed %2llu: min leaf separation %.2f deg\n", static_cast<unsigned long long>(seed), a);
    minAngle = std::min(minAngle, a);
  }
  double lo = 1e9, hi = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    double d = two_node_ratio(seed);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  double c = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (std::size_t n : {1u, 2u, 5u, 20u, 60u, 150u}) c = std::max(c, radius_ratio(seed, n));
  }
  std::printf("star minimum over seeds: %.2f deg\n", minAngle);
  std::printf("two-node distance / L: [%.4f, %.4f]\n", lo, hi);
  std::printf("gravity radius constant c (max observed): %.4f\n", c);
}
