#pragma once

#include <optional>
#include <string>
#include <vector>

#include "testscope/testmodel/test_model.hpp"
#include "testscope/views/graph_document.hpp"

namespace testscope {

inline constexpr std::string_view kFixtureNode = "#Fixture";
inline constexpr std::string_view kCommandsNode = "#TestCommands";

/// Packages and classes with containment, class-level coverage and test
/// dependency edges. With a filter, only the named packages plus nodes linked
/// to them by coverage or dependency edges remain. Throws UnknownPackage.
GraphDocument build_system_wide(const TestModel& tm,
                                const std::optional<std::vector<std::string>>& packageFilter = {});

/// A production class, its accessible methods and the test commands covering
/// them. Throws NotAProductionClass.
GraphDocument build_unit_view(const TestModel& tm, EntityId unitClass);

/// A test case with its Fixture and Test Commands meta nodes and the
/// production classes and methods it exercises. Throws NotATestCase.
GraphDocument build_test_case_view(const TestModel& tm, EntityId testCase);

/// True for synthesized anonymous and local class names.
bool is_synthetic_class(const Entity& e);

}  // namespace testscope
