#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "testscope/extract/extractor.hpp"
#include "testscope/indicators/indicators.hpp"
#include "testscope/layout/gem.hpp"
#include "testscope/testmodel/test_model.hpp"

namespace testscope {

inline constexpr std::string_view kConfigEnv = "TESTSCOPE_CONFIG";

/// Merged settings: defaults, then the config file, then command-line flags.
struct RunConfig {
  ExtractionConfig extract;
  ClassifyConfig classify;
  LayoutOptions layout;
  Thresholds thresholds;
};

/// Sectioned key=value file ([extract], [classify], [layout], [indicators]).
/// Keys follow the field names; list values are comma separated, except
/// generatorHeaders which uses ';' because the patterns may hold commas.
/// Throws ConfigError on unreadable files, unknown keys or bad values.
void load_config_file(RunConfig& config, const std::string& path);

/// `section.key=value` override with the same key names as the file.
void apply_setting(RunConfig& config, std::string_view section, std::string_view key,
                   std::string_view value);
void apply_assignment(RunConfig& config, std::string_view dotted);

/// Everything checkable before a pipeline stage runs. Throws ConfigError.
void validate(const RunConfig& config);

/// Settings that affect analysis results, for embedding in bundles.
nlohmann::json run_config_to_json(const RunConfig& config);
/// Inverse of run_config_to_json. Throws ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace testscope
