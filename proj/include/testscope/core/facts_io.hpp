#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "testscope/core/fact_model.hpp"

namespace testscope {

inline constexpr std::string_view kFactsFormat = "testscope-facts";
inline constexpr int kFactsVersion = 1;

/// Deterministic JSON form: entities sorted by qualified name, relations by
/// (kind, from, to). Ids are file-local ordinals. Containment is carried by
/// each entity's `parent` field rather than by relation entries.
nlohmann::json facts_to_json(const FactModel& model);
std::string export_facts(const FactModel& model);

/// Validates and loads a facts document. Relations pointing at undeclared
/// entities are kept unresolved. Throws SchemaViolation or DanglingContainment.
FactModel import_facts(const nlohmann::json& document);
FactModel import_facts_text(std::string_view text);

FactModel read_facts_file(const std::string& path);
void write_facts_file(const FactModel& model, const std::string& path);

}  // namespace testscope
