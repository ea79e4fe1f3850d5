#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "testscope/core/fact_model.hpp"
#include "testscope/extract/extractor.hpp"

namespace testscope {

enum class TestRole {
  TestCaseClass,
  TestCommand,
  TestSetup,
  TestTearDown,
  FixtureAttribute,
  TestHelperClass,
  TestUtilityMethod,
  Production,
};

std::string_view to_string(TestRole role);

struct ClassifyConfig {
  // Matched by full qualified name, or by simple name against unresolved
  // inheritance targets written without a package.
  std::vector<std::string> frameworkClasses{"junit.framework.TestCase"};
  std::string testClassPattern = "^Test.*|.*(Test|Tests|TestCase)$";
  std::string testCommandPattern = "^test.*";
  std::vector<std::string> setupNames{"setUp"};
  std::vector<std::string> tearDownNames{"tearDown"};
  JUnitStyle junitStyle = JUnitStyle::Both;
  double dominanceThreshold = 0.5;
  bool setupCoverage = true;
  bool countConstructorCalls = true;
};

/// Method level: from a TestCommand or TestSetup to a production method.
struct CoverageEdge {
  EntityId fromTest;
  EntityId toProd;
  std::size_t viaInvocations = 0;
  bool fromSetup = false;

  friend bool operator==(const CoverageEdge&, const CoverageEdge&) = default;
};

/// Class level: test case T covers production class C.
struct ClassCoverageEdge {
  EntityId testCase;
  EntityId prodClass;
  std::size_t viaInvocations = 0;
  std::size_t commands = 0;        // distinct commands of T reaching C
  std::size_t setupInvocations = 0;

  bool setup_only() const noexcept { return commands == 0; }
  friend bool operator==(const ClassCoverageEdge&, const ClassCoverageEdge&) = default;
};

struct DependencyEdge {
  EntityId fromTest;
  EntityId toTest;
  friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
};

struct RankedClass {
  EntityId cls;
  std::size_t commands = 0;
  std::size_t invocations = 0;
  double share = 0.0;  // commands / commands of the test case
};

struct UnitRanking {
  std::vector<RankedClass> ranked;
  bool dominant = false;
  std::optional<EntityId> dominant_unit() const {
    if (!dominant || ranked.empty()) return std::nullopt;
    return ranked.front().cls;
  }
};

class TestModel {
 public:
  TestModel(FrozenFactModel base, ClassifyConfig config);

  const FactModel& facts() const noexcept { return *base_; }
  const FrozenFactModel& base() const noexcept { return base_; }
  const ClassifyConfig& config() const noexcept { return config_; }

  TestRole role(EntityId id) const { return roles_.at(id.index()); }
  /// Classes: any test signal fired and not generated. Members follow their
  /// class. Packages: non-empty and every direct class test-side.
  bool is_test_side(EntityId id) const { return testSide_.at(id.index()); }
  bool is_framework_derived(EntityId cls) const { return frameworkDerived_.at(cls.index()); }

  const std::vector<EntityId>& test_cases() const noexcept { return testCases_; }
  std::vector<EntityId> members(EntityId cls, TestRole role) const;
  std::vector<EntityId> production_classes() const;

  const std::vector<CoverageEdge>& method_coverage() const noexcept { return methodCoverage_; }
  const std::vector<ClassCoverageEdge>& class_coverage() const noexcept { return classCoverage_; }
  const std::vector<DependencyEdge>& dependencies() const noexcept { return dependencies_; }

  std::vector<ClassCoverageEdge> coverage_of_test_case(EntityId testCase) const;
  std::vector<ClassCoverageEdge> coverage_of_class(EntityId prodClass) const;
  /// Distinct test cases whose commands (not setup alone) cover the class.
  std::vector<EntityId> covering_test_cases(EntityId prodClass) const;

  // Pipeline stages; classify runs in the constructor.
  void set_coverage(std::vector<CoverageEdge> methodLevel);
  void set_dependencies(std::vector<DependencyEdge> deps) { dependencies_ = std::move(deps); }

 private:
  void classify();

  FrozenFactModel base_;
  ClassifyConfig config_;
  std::vector<TestRole> roles_;
  std::vector<char> testSide_;
  std::vector<char> frameworkDerived_;
  std::vector<EntityId> testCases_;
  std::vector<CoverageEdge> methodCoverage_;
  std::vector<ClassCoverageEdge> classCoverage_;
  std::vector<DependencyEdge> dependencies_;
};

/// Classification by type, inheritance, ownership and naming heuristics.
TestModel classify(FrozenFactModel model, const ClassifyConfig& config = {});

/// Method-level coverage kernels, sorted by (fromTest, toProd). The parallel
/// version spreads test methods over OpenMP threads.
std::vector<CoverageEdge> coverage_edges(const TestModel& tm);
std::vector<CoverageEdge> coverage_edges_serial(const TestModel& tm);

void compute_coverage(TestModel& tm);
void compute_test_dependencies(TestModel& tm);

/// classify + compute_coverage + compute_test_dependencies.
TestModel build_test_model(FrozenFactModel model, const ClassifyConfig& config = {});

/// Throws NotATestCase.
UnitRanking unit_under_test_of(const TestModel& tm, EntityId testCase);

nlohmann::json test_model_to_json(const TestModel& tm);

}  // namespace testscope
