#include "testscope/app/pipeline.hpp"

#include <sys/stat.h>

#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "testscope/core/errors.hpp"
#include "testscope/core/facts_io.hpp"
#include "testscope/layout/gem.hpp"
#include "testscope/views/views.hpp"

#ifndef TESTSCOPE_VERSION
#define TESTSCOPE_VERSION "0.0.0"
#endif

namespace testscope {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view tool_version() { return TESTSCOPE_VERSION; }

Analysis analyze(FrozenFactModel facts, const RunConfig& config) {
  validate(config);
  auto tm = std::make_shared<const TestModel>(build_test_model(std::move(facts), config.classify));
  Analysis a;
  a.report = report(*tm, config.thresholds);
  a.model = std::move(tm);
  return a;
}

Summary summarize(const Analysis& analysis) {
  const TestModel& tm = *analysis.model;
  Summary s;
  s.testCases = tm.test_cases().size();
  for (auto tc : tm.test_cases()) s.testCommands += tm.members(tc, TestRole::TestCommand).size();
  std::set<EntityId> covered;
  for (const auto& c : tm.class_coverage()) covered.insert(c.prodClass);
  for (auto cls : tm.production_classes()) {
    if (is_synthetic_class(tm.facts().entity(cls))) continue;
    (covered.count(cls) ? s.coveredClasses : s.uncoveredClasses) += 1;
  }
  for (std::size_t k = 0; k < kFindingKindCount; ++k) {
    auto kind = static_cast<FindingKind>(k);
    s.findings[std::string(to_string(kind))] = analysis.report.count(kind);
  }
  return s;
}

json summary_to_json(const Summary& s) {
  return json{{"testCases", s.testCases},
              {"testCommands", s.testCommands},
              {"coveredClasses", s.coveredClasses},
              {"uncoveredClasses", s.uncoveredClasses},
              {"findings", s.findings}};
}

std::string render_summary(const Summary& s) {
  std::ostringstream out;
  out << fmt::format("{:<28}{:>8}\n", "test cases", s.testCases)
      << fmt::format("{:<28}{:>8}\n", "test commands", s.testCommands)
      << fmt::format("{:<28}{:>8}\n", "covered classes", s.coveredClasses)
      << fmt::format("{:<28}{:>8}\n", "uncovered classes", s.uncoveredClasses) << "findings\n";
  for (const auto& [kind, n] : s.findings) out << fmt::format("  {:<26}{:>8}\n", kind, n);
  return out.str();
}

json make_bundle(const Analysis& analysis, const RunConfig& config, const BundleMeta& meta) {
  const TestModel& tm = *analysis.model;
  const FactModel& m = tm.facts();

  std::vector<GraphDocument> docs;
  docs.push_back(build_system_wide(tm));
  std::set<EntityId> units;
  for (const auto& c : tm.class_coverage()) {
    if (!is_synthetic_class(m.entity(c.prodClass))) units.insert(c.prodClass);
  }
  for (auto u : units) docs.push_back(build_unit_view(tm, u));
  for (auto tc : tm.test_cases()) docs.push_back(build_test_case_view(tm, tc));
  layout_documents(docs, config.layout);

  json unitViews = json::object();
  json testCaseViews = json::object();
  for (std::size_t i = 1; i < docs.size(); ++i) {
    auto& target = docs[i].viewKind == ViewKind::UnitUnderTest ? unitViews : testCaseViews;
    target[docs[i].focusName] = document_to_json(docs[i]);
  }

  return json{{"formatVersion", kBundleFormat},
              {"meta",
               {{"name", meta.name},
                {"roots", meta.roots},
                {"timestamps", {{"sourcesModified", meta.sourcesModified}}},
                {"toolVersion", tool_version()}}},
              {"config", run_config_to_json(config)},
              {"facts", facts_to_json(m)},
              {"testModel", test_model_to_json(tm)},
              {"summary", summary_to_json(summarize(analysis))},
              {"views",
               {{"systemWide", document_to_json(docs.front())},
                {"units", unitViews},
                {"testCases", testCaseViews}}},
              {"indicatorReport", report_to_json(analysis.report, m)}};
}

std::string newest_modification(const std::vector<std::string>& paths) {
  std::time_t newest = 0;
  auto visit = [&](const fs::path& p) {
    struct stat st {};
    if (::stat(p.c_str(), &st) == 0 && fs::is_regular_file(p)) newest = std::max(newest, st.st_mtime);
  };
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      for (auto it = fs::recursive_directory_iterator(p, fs::directory_options::skip_permission_denied, ec);
           it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        visit(it->path());
      }
    } else {
      visit(p);
    }
  }
  std::tm utc{};
  gmtime_r(&newest, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

ViewRequest parse_view_request(std::string_view text) {
  if (text == "system-wide") return ViewRequest::SystemWide;
  if (text == "unit") return ViewRequest::Unit;
  if (text == "testcase") return ViewRequest::TestCase;
  throw ConfigError("unknown view kind '" + std::string(text) + "' (system-wide, unit, testcase)");
}

std::shared_ptr<Bundle> Bundle::from_json(json document) {
  if (!document.is_object()) throw SchemaViolation("", "bundle must be an object");
  auto version = document.find("formatVersion");
  if (version == document.end() || !version->is_string()) {
    throw SchemaViolation("/formatVersion", "missing");
  }
  if (*version != kBundleFormat) {
    throw SchemaViolation("/formatVersion", "unsupported version " + version->get<std::string>());
  }
  for (const char* key : {"meta", "config", "facts", "testModel", "summary", "views", "indicatorReport"}) {
    if (!document.contains(key)) throw SchemaViolation(std::string("/") + key, "missing");
  }
  const json& views = document["views"];
  for (const char* key : {"systemWide", "units", "testCases"}) {
    if (!views.contains(key)) throw SchemaViolation(std::string("/views/") + key, "missing");
  }
  return std::shared_ptr<Bundle>(new Bundle(std::move(document)));
}

std::shared_ptr<Bundle> Bundle::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read bundle " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw SchemaViolation("", "bundle " + path + " is not valid JSON");
  return from_json(std::move(doc));
}

json Bundle::meta() const {
  json out = doc_.at("meta");
  out["formatVersion"] = doc_.at("formatVersion");
  out["summary"] = doc_.at("summary");
  return out;
}

const Analysis& Bundle::analysis() const {
  std::call_once(once_, [&] {
    RunConfig config = run_config_from_json(doc_.at("config"));
    analysis_ = std::make_unique<Analysis>(analyze(freeze(import_facts(doc_.at("facts"))), config));
  });
  return *analysis_;
}

GraphDocument Bundle::view_document(ViewRequest kind, const std::optional<std::string>& focus,
                                    const std::optional<std::vector<std::string>>& packageFilter) const {
  const json& views = doc_.at("views");
  auto computed = [&](GraphDocument doc) {
    layout_document(doc, run_config_from_json(doc_.at("config")).layout);
    return doc;
  };
  switch (kind) {
    case ViewRequest::SystemWide:
      if (!packageFilter) return document_from_json(views.at("systemWide"));
      return computed(build_system_wide(*analysis().model, packageFilter));
    case ViewRequest::Unit: {
      if (!focus) throw UnknownFocus("unit view needs a focus class");
      if (auto it = views.at("units").find(*focus); it != views.at("units").end()) {
        return document_from_json(*it);
      }
      const TestModel& tm = *analysis().model;
      auto cls = tm.facts().resolve(*focus, EntityKind::Class);
      if (!cls) throw UnknownFocus("no class named " + *focus);
      try {
        return computed(build_unit_view(tm, *cls));
      } catch (const NotAProductionClass& e) {
        throw UnknownFocus(std::string("not a production class: ") + *focus);
      }
    }
    case ViewRequest::TestCase:
      break;
  }
  if (!focus) throw UnknownFocus("test case view needs a focus class");
  if (auto it = views.at("testCases").find(*focus); it != views.at("testCases").end()) {
    return document_from_json(*it);
  }
  throw UnknownFocus("no test case named " + *focus);
}

json Bundle::view(ViewRequest kind, const std::optional<std::string>& focus,
                  const std::optional<std::vector<std::string>>& packageFilter) const {
  const json& views = doc_.at("views");
  if (kind == ViewRequest::SystemWide && !packageFilter) return views.at("systemWide");
  if (focus) {
    const char* key = kind == ViewRequest::Unit ? "units" : "testCases";
    if (kind != ViewRequest::SystemWide) {
      if (auto it = views.at(key).find(*focus); it != views.at(key).end()) return *it;
    }
  }
  return document_to_json(view_document(kind, focus, packageFilter));
}

std::string Bundle::report_text() const {
  std::call_once(factsOnce_, [&] { facts_ = freeze(import_facts(doc_.at("facts"))); });
  return render_text(report_from_json(report(), *facts_), *facts_);
}

bool Bundle::has_threats() const {
  for (const auto& f : report().at("findings")) {
    if (f.at("severity") == "Threat") return true;
  }
  return false;
}

std::string view_body(const json& view) { return view.dump(2) + "\n"; }

}  // namespace testscope
