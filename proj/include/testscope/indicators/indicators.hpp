#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "testscope/testmodel/test_model.hpp"

namespace testscope {

// Evidence keys per kind:
//   TestsInSamePackage      testCases, productionClasses
//   TestsInSeparatePackage  testCases, coveredClasses        subjects: production pkg, test pkg
//   UntestedComponent       classes, generated (0/1), generatedClasses
//   HighlyCoveredClass      testCases
//   MultiTestCaseCoverage   testCases
//   PartialCoverage         coveredMethods, methods, fraction
//   IsolatedUnit            classes, testCases
//   IndirectTestPattern     outsideExpected=1, share        subjects: test case, dominant class
//                           funnel=1, testCases             subjects: class
//   TestHelper              dependents, invokers, commandUsers
//   WellDesignedTestCase    fixtureAttributes, commands, maxProdMethods, share
//   LackOfExplicitFixture   commands, instantiatingCommands
//   LargeFixture            fixtureClasses, fixtureAttributes, meanFixtureUse, commands
//   ComplexTestScenario     prodMethods, prodClasses        subjects: command, test case
//   IntegrationTestStyle    classes, topShare
enum class FindingKind {
  TestsInSamePackage,
  TestsInSeparatePackage,
  UntestedComponent,
  HighlyCoveredClass,
  IsolatedUnit,
  IndirectTestPattern,
  TestHelper,
  MultiTestCaseCoverage,
  PartialCoverage,
  WellDesignedTestCase,
  LackOfExplicitFixture,
  LargeFixture,
  ComplexTestScenario,
  IntegrationTestStyle,
};

inline constexpr std::size_t kFindingKindCount = 14;

enum class Severity { Info, Opportunity, Threat };

std::string_view to_string(FindingKind kind);
std::string_view to_string(Severity severity);
std::optional<FindingKind> parse_finding_kind(std::string_view text);
std::optional<Severity> parse_severity(std::string_view text);

/// Fixed mapping; UntestedComponent drops to Info when its package is
/// generated code.
Severity severity_of(FindingKind kind, bool generated = false);

struct Finding {
  FindingKind kind = FindingKind::TestsInSamePackage;
  std::vector<EntityId> subjects;
  std::map<std::string, double> evidence;
  Severity severity = Severity::Info;
};

struct Thresholds {
  std::size_t highlyCoveredMinTestCases = 5;
  std::size_t helperMinDependents = 3;
  std::size_t complexScenarioMinProdMethods = 10;
  std::size_t largeFixtureMinClasses = 4;
  double partialFixtureUseMax = 0.5;
  double partialCoverageMax = 0.33;
  double dominanceMin = 0.5;
};

/// Throws ConfigError.
void validate(const Thresholds& th);
/// Sets one threshold by name from its textual value. Throws ConfigError.
void set_threshold(Thresholds& th, std::string_view key, std::string_view value);
std::vector<std::string> threshold_names();

enum class LocationConvention { None, Consistent, Mixed };
std::string_view to_string(LocationConvention c);

struct LocationVerdict {
  LocationConvention convention = LocationConvention::None;
  // For a consistent verdict: "samePackage" or "separatePackage".
  std::string style;
};

LocationVerdict location_verdict(const TestModel& tm);

std::vector<Finding> detect_location(const TestModel& tm);
std::vector<Finding> detect_coverage(const TestModel& tm, const Thresholds& th);
std::vector<Finding> detect_design(const TestModel& tm, const Thresholds& th);

struct IndicatorReport {
  std::vector<Finding> findings;
  LocationVerdict location;
  Thresholds thresholds;

  std::size_t count(FindingKind kind) const;
  std::size_t count(Severity severity) const;
};

/// All detectors, sorted by (severity Threat first, kind, subject names).
IndicatorReport report(const TestModel& tm, const Thresholds& th = {});

nlohmann::json report_to_json(const IndicatorReport& r, const FactModel& facts);
/// Inverse of report_to_json against the same facts. Throws SchemaViolation.
IndicatorReport report_from_json(const nlohmann::json& j, const FactModel& facts);

/// One section per kind, grouped by severity.
std::string render_text(const IndicatorReport& r, const FactModel& facts);

}  // namespace testscope
