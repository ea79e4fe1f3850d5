#pragma once

#include <cstdint>
#include <vector>

#include "testscope/layout/gem.hpp"

namespace testscope::testkit {

// Frozen from bench/gem_calibrate: largest observed radius ratio 2.03.
inline constexpr double kGravityRadiusConstant = 2.5;
// Frozen from bench/gem_calibrate: observed minimum 43.95 deg over 10 seeds.
inline constexpr double kStarMinAngleDeg = 25.0;
inline constexpr double kTwoNodeTolerance = 0.20;

struct RandomGraph {
  std::size_t nodes = 0;
  std::vector<LayoutEdge> edges;
};

/// Connected-ish random graph: a random spanning tree plus n/4 extra edges,
/// with duplicates and self loops left in.
RandomGraph random_graph(std::uint64_t seed, std::size_t maxNodes);

/// Smallest angle between consecutive leaves of the 8-leaf star, in degrees.
double star_min_angle(std::uint64_t seed);

}  // namespace testscope::testkit
