#include "testscope/app/config.hpp"

#include <regex>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "testscope/core/errors.hpp"

namespace testscope {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view section, std::string_view key, std::string_view value,
                            std::string_view expected) {
  throw ConfigError(std::string(section) + "." + std::string(key) + ": expected " + std::string(expected) +
                    ", got '" + std::string(value) + "'");
}

bool to_bool(std::string_view section, std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(section, key, v, "a boolean");
}

double to_double(std::string_view section, std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    double d = std::stod(std::string(v), &used);
    if (used == v.size()) return d;
  } catch (const std::logic_error&) {
  }
  bad_value(section, key, v, "a number");
}

std::uint64_t to_u64(std::string_view section, std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] != '-') {
      auto n = std::stoull(std::string(v), &used, 0);
      if (used == v.size()) return n;
    }
  } catch (const std::logic_error&) {
  }
  bad_value(section, key, v, "a non-negative integer");
}

void extract_setting(ExtractionConfig& e, ClassifyConfig& c, std::string_view key, std::string_view v) {
  constexpr std::string_view s = "extract";
  if (key == "roots") {
    e.roots.clear();
    for (auto& r : split(v, ',')) e.roots.emplace_back(r);
  } else if (key == "include") {
    e.includeGlobs = split(v, ',');
  } else if (key == "exclude") {
    e.excludeGlobs = split(v, ',');
  } else if (key == "encoding") {
    e.sourceEncoding = trim(v);
  } else if (key == "followSymlinks") {
    e.followSymlinks = to_bool(s, key, v);
  } else if (key == "generatorHeaders") {
    e.generatorHeaderPatterns = split(v, ';');
  } else if (key == "testSegments") {
    e.testSegments = split(v, ',');
  } else if (key == "junitStyle") {
    c.junitStyle = parse_junit_style(trim(v));
  } else {
    throw ConfigError("unknown key extract." + std::string(key));
  }
}

void classify_setting(ClassifyConfig& c, std::string_view key, std::string_view v) {
  constexpr std::string_view s = "classify";
  if (key == "frameworkClasses") {
    c.frameworkClasses = split(v, ',');
  } else if (key == "testClassPattern") {
    c.testClassPattern = trim(v);
  } else if (key == "testCommandPattern") {
    c.testCommandPattern = trim(v);
  } else if (key == "setupNames") {
    c.setupNames = split(v, ',');
  } else if (key == "tearDownNames") {
    c.tearDownNames = split(v, ',');
  } else if (key == "junitStyle") {
    c.junitStyle = parse_junit_style(trim(v));
  } else if (key == "dominanceThreshold") {
    c.dominanceThreshold = to_double(s, key, v);
  } else if (key == "setupCoverage") {
    c.setupCoverage = to_bool(s, key, v);
  } else if (key == "countConstructorCalls") {
    c.countConstructorCalls = to_bool(s, key, v);
  } else {
    throw ConfigError("unknown key classify." + std::string(key));
  }
}

void layout_setting(LayoutOptions& o, std::string_view key, std::string_view v) {
  constexpr std::string_view s = "layout";
  if (key == "desiredEdgeLength") {
    o.desiredEdgeLength = to_double(s, key, v);
  } else if (key == "gravityConstant") {
    o.gravityConstant = to_double(s, key, v);
  } else if (key == "initialTemperature") {
    o.initialTemperature = to_double(s, key, v);
  } else if (key == "minTemperature") {
    o.minTemperature = to_double(s, key, v);
  } else if (key == "maxTemperature") {
    o.maxTemperature = to_double(s, key, v);
  } else if (key == "maxRounds") {
    o.maxRounds = static_cast<std::size_t>(to_u64(s, key, v));
  } else if (key == "oscillationSensitivity") {
    o.oscillationSensitivity = to_double(s, key, v);
  } else if (key == "rotationSensitivity") {
    o.rotationSensitivity = to_double(s, key, v);
  } else if (key == "seed") {
    o.seed = to_u64(s, key, v);
  } else if (key == "coverageAttraction") {
    o.coverageAttraction = to_bool(s, key, v);
  } else if (key == "coverageAttractionWeight") {
    o.coverageAttractionWeight = to_double(s, key, v);
  } else {
    throw ConfigError("unknown key layout." + std::string(key));
  }
}

}  // namespace

void apply_setting(RunConfig& config, std::string_view section, std::string_view key, std::string_view value) {
  std::string v = trim(value);
  if (section == "extract") {
    extract_setting(config.extract, config.classify, key, v);
  } else if (section == "classify") {
    classify_setting(config.classify, key, v);
  } else if (section == "layout") {
    layout_setting(config.layout, key, v);
  } else if (section == "indicators") {
    set_threshold(config.thresholds, key, v);
  } else {
    throw ConfigError("unknown config section [" + std::string(section) + "]");
  }
}

void apply_assignment(RunConfig& config, std::string_view dotted) {
  auto eq = dotted.find('=');
  auto dot = dotted.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ConfigError("expected section.key=value, got '" + std::string(dotted) + "'");
  }
  apply_setting(config, trim(dotted.substr(0, dot)), trim(dotted.substr(dot + 1, eq - dot - 1)),
                dotted.substr(eq + 1));
}

void load_config_file(RunConfig& config, const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw ConfigError("config file " + path + ": key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : entries) apply_setting(config, section, key, value.data());
  }
}

void validate(const RunConfig& config) {
  auto regex = [](const std::string& pattern, const char* what) {
    try {
      std::regex re(pattern);
    } catch (const std::regex_error& e) {
      throw ConfigError(std::string(what) + ": invalid pattern '" + pattern + "': " + e.what());
    }
  };
  regex(config.classify.testClassPattern, "classify.testClassPattern");
  regex(config.classify.testCommandPattern, "classify.testCommandPattern");
  for (const auto& p : config.extract.generatorHeaderPatterns) regex(p, "extract.generatorHeaders");
  if (config.extract.includeGlobs.empty()) throw ConfigError("extract.include must not be empty");
  double d = config.classify.dominanceThreshold;
  if (!(d > 0.0 && d <= 1.0)) throw ConfigError("classify.dominanceThreshold must lie in (0,1]");
  if (!(config.layout.coverageAttractionWeight >= 0.0)) {
    throw ConfigError("layout.coverageAttractionWeight must be >= 0");
  }
  // Node count does not affect the checked invariants.
  validate(params_for(2, config.layout));
  validate(config.thresholds);
}

nlohmann::json run_config_to_json(const RunConfig& config) {
  using nlohmann::json;
  const ClassifyConfig& c = config.classify;
  const LayoutOptions& l = config.layout;
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  const Thresholds& t = config.thresholds;
  return json{
      {"classify",
       {{"frameworkClasses", c.frameworkClasses},
        {"testClassPattern", c.testClassPattern},
        {"testCommandPattern", c.testCommandPattern},
        {"setupNames", c.setupNames},
        {"tearDownNames", c.tearDownNames},
        {"junitStyle", to_string(c.junitStyle)},
        {"dominanceThreshold", c.dominanceThreshold},
        {"setupCoverage", c.setupCoverage},
        {"countConstructorCalls", c.countConstructorCalls}}},
      {"layout",
       {{"desiredEdgeLength", opt(l.desiredEdgeLength)},
        {"gravityConstant", opt(l.gravityConstant)},
        {"initialTemperature", opt(l.initialTemperature)},
        {"minTemperature", opt(l.minTemperature)},
        {"maxTemperature", opt(l.maxTemperature)},
        {"maxRounds", opt(l.maxRounds)},
        {"oscillationSensitivity", opt(l.oscillationSensitivity)},
        {"rotationSensitivity", opt(l.rotationSensitivity)},
        {"seed", l.seed},
        {"coverageAttraction", l.coverageAttraction},
        {"coverageAttractionWeight", l.coverageAttractionWeight}}},
      {"indicators",
       {{"highlyCoveredMinTestCases", t.highlyCoveredMinTestCases},
        {"helperMinDependents", t.helperMinDependents},
        {"complexScenarioMinProdMethods", t.complexScenarioMinProdMethods},
        {"largeFixtureMinClasses", t.largeFixtureMinClasses},
        {"partialFixtureUseMax", t.partialFixtureUseMax},
        {"partialCoverageMax", t.partialCoverageMax},
        {"dominanceMin", t.dominanceMin}}}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig config;
  try {
    for (const auto& [section, entries] : j.items()) {
      for (const auto& [key, value] : entries.items()) {
        if (value.is_null()) continue;
        std::string text;
        if (value.is_string()) {
          text = value.get<std::string>();
        } else if (value.is_array()) {
          for (const auto& item : value) text += (text.empty() ? "" : ",") + item.get<std::string>();
        } else {
          text = value.dump();
        }
        apply_setting(config, section, key, text);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("embedded config: ") + e.what());
  }
  return config;
}

}  // namespace testscope
