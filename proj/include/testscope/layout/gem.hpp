#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "testscope/views/graph_document.hpp"

namespace testscope {

struct LayoutParams {
  double desiredEdgeLength = 128.0;
  double gravityConstant = 1.0 / 16.0;
  double initialTemperature = 0.0;
  double minTemperature = 0.0;
  double maxTemperature = 0.0;
  std::size_t maxRounds = 0;
  double oscillationSensitivity = 0.3;
  double rotationSensitivity = 0.01;
  std::uint64_t seed = 0x7e57'5c0eULL;
  // Throw on a non-finite coordinate during the iteration (test builds).
  bool checkFinite = false;
};

/// Throws ConfigError when the invariants do not hold.
void validate(const LayoutParams& params);

/// Rounds budget 100 + 2n; temperatures as fractions of the edge length.
LayoutParams default_params(std::size_t nodeCount);

struct LayoutEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 1.0;
};

struct LayoutResult {
  std::vector<Point> positions;
  std::size_t rounds = 0;
  bool converged = false;
};

/// GEM force-directed layout. Deterministic for a fixed input order and seed.
/// With `initial` given, the result keeps the initial barycenter; otherwise
/// the barycenter is the origin.
LayoutResult layout(std::size_t nodeCount, const std::vector<LayoutEdge>& edges,
                    const LayoutParams& params,
                    const std::vector<Point>* initial = nullptr);

/// Id-based convenience form. Throws Error on an unknown endpoint.
struct NamedLayout {
  std::vector<std::pair<std::string, Point>> positions;
  std::size_t rounds = 0;
  bool converged = false;
};
NamedLayout layout(const std::vector<std::string>& nodes,
                   const std::vector<std::tuple<std::string, std::string, double>>& edges,
                   const LayoutParams& params);

/// Per-run overrides applied on top of default_params(nodeCount).
struct LayoutOptions {
  std::optional<double> desiredEdgeLength;
  std::optional<double> gravityConstant;
  std::optional<double> initialTemperature;
  std::optional<double> minTemperature;
  std::optional<double> maxTemperature;
  std::optional<std::size_t> maxRounds;
  std::optional<double> oscillationSensitivity;
  std::optional<double> rotationSensitivity;
  std::uint64_t seed = LayoutParams{}.seed;
  // System-wide view: containment edges drive the layout; coverage edges add
  // a weak pull so tested and testing packages sit close.
  bool coverageAttraction = true;
  double coverageAttractionWeight = 0.1;
};

LayoutParams params_for(std::size_t nodeCount, const LayoutOptions& options);

/// Lays out one document and stores positions in its nodes.
LayoutResult layout_document(GraphDocument& doc, const LayoutOptions& options);

/// Batch kernels over independent documents. The parallel version runs one
/// document per OpenMP task; both produce identical positions.
void layout_documents(std::vector<GraphDocument>& docs, const LayoutOptions& options);
void layout_documents_serial(std::vector<GraphDocument>& docs, const LayoutOptions& options);

}  // namespace testscope
