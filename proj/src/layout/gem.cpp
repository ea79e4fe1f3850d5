#include "testscope/layout/gem.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "testscope/core/errors.hpp"

namespace testscope {

namespace {

constexpr double kOscillationAngle = std::numbers::pi / 2.0;  // alpha_o
constexpr double kRotationAngle = std::numbers::pi / 3.0;     // alpha_r
constexpr std::size_t kBaseRounds = 100;
constexpr std::size_t kRoundsPerNode = 2;
// Initial positions given by the caller are snapped to this grid after
// centering so shifted inputs run bit-identical iterations.
constexpr double kSnap = 1.0 / 65536.0;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // [0, 1) from the top 53 bits; independent of the standard library's
  // distribution implementations.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

struct NodeState {
  double x = 0.0;
  double y = 0.0;
  double px = 0.0;  // previous impulse
  double py = 0.0;
  double temperature = 0.0;
  double skew = 0.0;
  double mass = 1.0;  // 1 + deg/2
};

}  // namespace

void validate(const LayoutParams& p) {
  auto bad = [](const std::string& what) { throw ConfigError("layout: " + what); };
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(p.desiredEdgeLength) || p.desiredEdgeLength <= 0) bad("desiredEdgeLength must be > 0");
  if (!finite(p.gravityConstant) || p.gravityConstant < 0) bad("gravityConstant must be >= 0");
  if (!finite(p.minTemperature) || p.minTemperature <= 0) bad("minTemperature must be > 0");
  if (!finite(p.initialTemperature) || p.initialTemperature <= p.minTemperature) {
    bad("initialTemperature must exceed minTemperature");
  }
  if (!finite(p.maxTemperature) || p.maxTemperature < p.initialTemperature) {
    bad("maxTemperature must be >= initialTemperature");
  }
  if (p.maxRounds == 0) bad("maxRounds must be positive");
  if (!(p.oscillationSensitivity >= 0 && p.oscillationSensitivity <= 1)) {
    bad("oscillationSensitivity must lie in [0,1]");
  }
  if (!(p.rotationSensitivity >= 0 && p.rotationSensitivity <= 1)) {
    bad("rotationSensitivity must lie in [0,1]");
  }
}

LayoutParams default_params(std::size_t nodeCount) {
  LayoutParams p;
  const double L = p.desiredEdgeLength;
  p.initialTemperature = 0.3 * L;
  p.minTemperature = 0.02 * L;
  p.maxTemperature = L;
  p.maxRounds = kBaseRounds + kRoundsPerNode * nodeCount;
  return p;
}

LayoutResult layout(std::size_t n, const std::vector<LayoutEdge>& edges, const LayoutParams& params,
                    const std::vector<Point>* initial) {
  validate(params);
  LayoutResult result;
  if (initial && initial->size() != n) throw Error("layout: initial positions size mismatch");
  for (const auto& e : edges) {
    if (e.from >= n || e.to >= n) throw Error("layout: edge endpoint out of range");
    if (!std::isfinite(e.weight) || e.weight < 0) throw Error("layout: invalid edge weight");
  }

  double cx0 = 0.0;
  double cy0 = 0.0;
  if (initial && n > 0) {
    for (const auto& p : *initial) {
      cx0 += p.x;
      cy0 += p.y;
    }
    cx0 /= static_cast<double>(n);
    cy0 /= static_cast<double>(n);
  }
  if (n == 0) {
    result.converged = true;
    return result;
  }
  if (n == 1) {
    result.positions.push_back(Point{cx0, cy0});
    result.rounds = 1;
    result.converged = true;
    return result;
  }

  const double L = params.desiredEdgeLength;
  const double L2 = L * L;
  Rng rng(params.seed);
  std::vector<NodeState> nodes(n);

  // Adjacency with summed weights; self loops carry no force.
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  {
    std::map<std::pair<std::size_t, std::size_t>, double> merged;
    for (const auto& e : edges) {
      if (e.from == e.to || e.weight == 0) continue;
      auto key = std::minmax(e.from, e.to);
      merged[{key.first, key.second}] += e.weight;
    }
    for (const auto& [key, w] : merged) {
      adj[key.first].push_back({key.second, w});
      adj[key.second].push_back({key.first, w});
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    double deg = 0;
    for (const auto& [u, w] : adj[v]) deg += w;
    nodes[v].mass = 1.0 + deg / 2.0;
    nodes[v].temperature = params.initialTemperature;
  }

  if (initial) {
    for (std::size_t v = 0; v < n; ++v) {
      nodes[v].x = std::round(((*initial)[v].x - cx0) / kSnap) * kSnap;
      nodes[v].y = std::round(((*initial)[v].y - cy0) / kSnap) * kSnap;
    }
  } else {
    const double radius = std::sqrt(static_cast<double>(n)) * L;
    for (auto& s : nodes) {
      double r = radius * std::sqrt(rng.uniform());
      double a = 2.0 * std::numbers::pi * rng.uniform();
      s.x = r * std::cos(a);
      s.y = r * std::sin(a);
    }
  }

  double sumX = 0.0;
  double sumY = 0.0;
  for (const auto& s : nodes) {
    sumX += s.x;
    sumY += s.y;
  }

  const double sinRotation = std::sin(std::numbers::pi / 2.0 + kRotationAngle / 2.0);
  const double cosOscillation = std::cos(kOscillationAngle / 2.0);
  const double disturbance = L / 64.0;
  std::vector<std::size_t> order(n);

  for (std::size_t round = 0; round < params.maxRounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

    for (std::size_t v : order) {
      NodeState& s = nodes[v];
      const double bx = sumX / static_cast<double>(n);
      const double by = sumY / static_cast<double>(n);
      double ix = (bx - s.x) * params.gravityConstant * s.mass;
      double iy = (by - s.y) * params.gravityConstant * s.mass;
      ix += (rng.uniform() * 2.0 - 1.0) * disturbance;
      iy += (rng.uniform() * 2.0 - 1.0) * disturbance;

      for (std::size_t u = 0; u < n; ++u) {
        if (u == v) continue;
        double dx = s.x - nodes[u].x;
        double dy = s.y - nodes[u].y;
        double d2 = dx * dx + dy * dy;
        if (d2 > 0) {
          ix += dx * L2 / d2;
          iy += dy * L2 / d2;
        } else {
          double a = 2.0 * std::numbers::pi * rng.uniform();
          ix += std::cos(a) * L;
          iy += std::sin(a) * L;
        }
      }
      for (const auto& [u, w] : adj[v]) {
        double dx = s.x - nodes[u].x;
        double dy = s.y - nodes[u].y;
        double d2 = dx * dx + dy * dy;
        double f = d2 / (L2 * s.mass) * w;
        ix -= dx * f;
        iy -= dy * f;
      }

      double norm = std::hypot(ix, iy);
      if (norm <= 0 || !std::isfinite(norm)) continue;
      ix = ix * s.temperature / norm;
      iy = iy * s.temperature / norm;
      s.x += ix;
      s.y += iy;
      sumX += ix;
      sumY += iy;

      double prev = std::hypot(s.px, s.py);
      if (prev > 0) {
        double len = std::hypot(ix, iy);
        double cosB = (ix * s.px + iy * s.py) / (len * prev);
        double sinB = (ix * s.py - iy * s.px) / (len * prev);
        if (std::abs(sinB) >= sinRotation) {
          s.skew += params.rotationSensitivity * (sinB > 0 ? 1.0 : -1.0);
          s.skew = std::clamp(s.skew, -1.0, 1.0);
        }
        if (std::abs(cosB) >= cosOscillation) {
          s.temperature *= 1.0 + params.oscillationSensitivity * cosB;
        }
        s.temperature *= 1.0 - std::abs(s.skew);
        s.temperature = std::min(s.temperature, params.maxTemperature);
      }
      s.px = ix;
      s.py = iy;

      if (params.checkFinite && !(std::isfinite(s.x) && std::isfinite(s.y))) {
        throw Error("layout: non-finite coordinate in round " + std::to_string(round));
      }
    }
    result.rounds = round + 1;

    double mean = 0.0;
    for (const auto& s : nodes) mean += s.temperature;
    mean /= static_cast<double>(n);
    if (mean < params.minTemperature) {
      result.converged = true;
      break;
    }
  }

  const double bx = sumX / static_cast<double>(n);
  const double by = sumY / static_cast<double>(n);
  result.positions.reserve(n);
  for (const auto& s : nodes) result.positions.push_back(Point{s.x - bx + cx0, s.y - by + cy0});
  return result;
}

NamedLayout layout(const std::vector<std::string>& nodes,
                   const std::vector<std::tuple<std::string, std::string, double>>& edges,
                   const LayoutParams& params) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!index.emplace(nodes[i], i).second) throw Error("layout: duplicate node id " + nodes[i]);
  }
  std::vector<LayoutEdge> le;
  for (const auto& [a, b, w] : edges) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) throw Error("layout: unknown edge endpoint");
    le.push_back(LayoutEdge{ia->second, ib->second, w});
  }
  LayoutResult r = layout(nodes.size(), le, params);
  NamedLayout out;
  out.rounds = r.rounds;
  out.converged = r.converged;
  for (std::size_t i = 0; i < nodes.size(); ++i) out.positions.emplace_back(nodes[i], r.positions[i]);
  return out;
}

LayoutParams params_for(std::size_t nodeCount, const LayoutOptions& o) {
  LayoutParams p = default_params(nodeCount);
  if (o.desiredEdgeLength) {
    // Temperatures follow the edge length unless set explicitly.
    double k = *o.desiredEdgeLength / p.desiredEdgeLength;
    p.desiredEdgeLength = *o.desiredEdgeLength;
    p.initialTemperature *= k;
    p.minTemperature *= k;
    p.maxTemperature *= k;
  }
  if (o.gravityConstant) p.gravityConstant = *o.gravityConstant;
  if (o.initialTemperature) p.initialTemperature = *o.initialTemperature;
  if (o.minTemperature) p.minTemperature = *o.minTemperature;
  if (o.maxTemperature) p.maxTemperature = *o.maxTemperature;
  if (o.maxRounds) p.maxRounds = *o.maxRounds;
  if (o.oscillationSensitivity) p.oscillationSensitivity = *o.oscillationSensitivity;
  if (o.rotationSensitivity) p.rotationSensitivity = *o.rotationSensitivity;
  p.seed = o.seed;
  return p;
}

LayoutResult layout_document(GraphDocument& doc, const LayoutOptions& options) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) index[doc.nodes[i].id] = i;
  std::vector<LayoutEdge> edges;
  for (const auto& e : doc.edges) {
    double w = 1.0;
    if (doc.viewKind == ViewKind::SystemWide && e.kind != EdgeKind::Containment) {
      if (e.kind != EdgeKind::Coverage || !options.coverageAttraction) continue;
      w = options.coverageAttractionWeight;
    }
    edges.push_back(LayoutEdge{index.at(e.from), index.at(e.to), w});
  }
  LayoutResult r = layout(doc.nodes.size(), edges, params_for(doc.nodes.size(), options));
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) doc.nodes[i].position = r.positions[i];
  return r;
}

void layout_documents_serial(std::vector<GraphDocument>& docs, const LayoutOptions& options) {
  for (auto& d : docs) layout_document(d, options);
}

void layout_documents(std::vector<GraphDocument>& docs, const LayoutOptions& options) {
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
  // Exceptions must not escape an OpenMP region; collect the first one.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      layout_document(docs[static_cast<std::size_t>(i)], options);
    } catch (...) {
#pragma omp critical(testscope_layout_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace testscope
