#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "testscope/app/config.hpp"
#include "testscope/indicators/indicators.hpp"
#include "testscope/testmodel/test_model.hpp"
#include "testscope/views/graph_document.hpp"

namespace testscope {

inline constexpr std::string_view kBundleFormat = "testscope-bundle/1";
std::string_view tool_version();

struct BundleMeta {
  std::string name;
  std::vector<std::string> roots;
  // Newest modification time among the inputs, ISO 8601 UTC. Derived from
  // the inputs so repeated runs serialize identically.
  std::string sourcesModified;
};

struct Analysis {
  std::shared_ptr<const TestModel> model;
  IndicatorReport report;
};

/// classify, coverage, dependencies and indicators over frozen facts.
Analysis analyze(FrozenFactModel facts, const RunConfig& config);

struct Summary {
  std::size_t testCases = 0;
  std::size_t testCommands = 0;
  std::size_t coveredClasses = 0;
  std::size_t uncoveredClasses = 0;
  std::map<std::string, std::size_t> findings;  // per kind, every kind listed
};

Summary summarize(const Analysis& analysis);
nlohmann::json summary_to_json(const Summary& s);
std::string render_summary(const Summary& s);

/// Full bundle: meta, config, embedded facts, test model, laid-out views
/// (system-wide, units with coverage, all test cases) and the report.
nlohmann::json make_bundle(const Analysis& analysis, const RunConfig& config, const BundleMeta& meta);

/// Newest mtime of the given files or directory trees as ISO 8601 UTC.
std::string newest_modification(const std::vector<std::string>& paths);

enum class ViewRequest { SystemWide, Unit, TestCase };
ViewRequest parse_view_request(std::string_view text);  // system-wide | unit | testcase

/// A loaded bundle. Views missing from the bundle are computed on demand from
/// the embedded facts and config; results are identical to precomputed ones.
class Bundle {
 public:
  /// Throws SchemaViolation.
  static std::shared_ptr<Bundle> from_json(nlohmann::json document);
  static std::shared_ptr<Bundle> load(const std::string& path);

  const nlohmann::json& document() const noexcept { return doc_; }
  nlohmann::json meta() const;
  const nlohmann::json& report() const { return doc_.at("indicatorReport"); }

  /// Throws UnknownFocus (unknown name, or wrong kind of class for the view)
  /// and UnknownPackage for filters.
  nlohmann::json view(ViewRequest kind, const std::optional<std::string>& focus = {},
                      const std::optional<std::vector<std::string>>& packageFilter = {}) const;
  GraphDocument view_document(ViewRequest kind, const std::optional<std::string>& focus = {},
                              const std::optional<std::vector<std::string>>& packageFilter = {}) const;

  /// Text report rebuilt from the embedded findings.
  std::string report_text() const;
  bool has_threats() const;

 private:
  explicit Bundle(nlohmann::json doc) : doc_(std::move(doc)) {}
  const Analysis& analysis() const;

  nlohmann::json doc_;
  mutable std::once_flag once_;
  mutable std::unique_ptr<Analysis> analysis_;
  mutable std::once_flag factsOnce_;
  mutable FrozenFactModel facts_;
};

/// JSON rendering of a view with stable formatting; CLI and API both use it.
std::string view_body(const nlohmann::json& view);

}  // namespace testscope
