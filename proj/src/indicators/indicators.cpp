#include "testscope/indicators/indicators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "testscope/core/errors.hpp"
#include "testscope/views/views.hpp"

namespace testscope {

namespace {

constexpr std::string_view kKindNames[] = {
    "TestsInSamePackage",    "TestsInSeparatePackage", "UntestedComponent",
    "HighlyCoveredClass",    "IsolatedUnit",           "IndirectTestPattern",
    "TestHelper",            "MultiTestCaseCoverage",  "PartialCoverage",
    "WellDesignedTestCase",  "LackOfExplicitFixture",  "LargeFixture",
    "ComplexTestScenario",   "IntegrationTestStyle",
};
static_assert(std::size(kKindNames) == kFindingKindCount);

constexpr std::string_view kSeverityNames[] = {"Info", "Opportunity", "Threat"};

// Report order puts threats first.
int severity_rank(Severity s) { return 2 - static_cast<int>(s); }

Finding make(FindingKind kind, std::vector<EntityId> subjects, std::map<std::string, double> evidence,
             bool generated = false) {
  return Finding{kind, std::move(subjects), std::move(evidence), severity_of(kind, generated)};
}

double as_num(std::size_t n) { return static_cast<double>(n); }

// Shared lookups over one frozen test model.
class Context {
 public:
  Context(const TestModel& tm, double dominanceMin) : tm_(tm), m_(tm.facts()) {
    for (const auto& e : m_.entities()) {
      if (e.kind != EntityKind::Class) continue;
      auto pkg = m_.enclosing(e.id, EntityKind::Package);
      if (!pkg) continue;
      if (tm.role(e.id) == TestRole::TestCaseClass) {
        testCasesIn_[*pkg].push_back(e.id);
      } else if (is_unit_class(e)) {
        unitsIn_[*pkg].push_back(e.id);
      }
    }
    for (auto tc : tm.test_cases()) {
      UnitRanking r = unit_under_test_of(tm, tc);
      r.dominant = !r.ranked.empty() && r.ranked.front().commands > 0 &&
                   r.ranked.front().share >= dominanceMin;
      rankings_.emplace(tc, std::move(r));
    }
  }

  const FactModel& facts() const { return m_; }
  const TestModel& tm() const { return tm_; }

  // Production classes a tester would aim at: no interfaces, no synthesized
  // anonymous or local classes.
  bool is_unit_class(const Entity& e) const {
    return e.kind == EntityKind::Class && !tm_.is_test_side(e.id) && !e.has(EntityFlag::Interface) &&
           !is_synthetic_class(e);
  }

  std::optional<EntityId> package_of(EntityId id) const { return m_.enclosing(id, EntityKind::Package); }

  const std::vector<EntityId>& test_cases_in(EntityId pkg) const { return lookup(testCasesIn_, pkg); }
  const std::vector<EntityId>& units_in(EntityId pkg) const { return lookup(unitsIn_, pkg); }
  const std::map<EntityId, std::vector<EntityId>>& units_by_package() const { return unitsIn_; }

  const UnitRanking& ranking(EntityId tc) const { return rankings_.at(tc); }

  // Packages where tests for units of `pkg` are expected: the package itself
  // and its test-side subpackages.
  bool co_located(EntityId testCase, EntityId pkg) const {
    auto tp = package_of(testCase);
    if (!tp) return false;
    if (*tp == pkg) return true;
    return tm_.is_test_side(*tp) && m_.entity(*tp).parent == pkg;
  }

  std::set<EntityId> expected_packages(EntityId testCase) const {
    std::set<EntityId> out;
    auto tp = package_of(testCase);
    if (!tp) return out;
    out.insert(*tp);
    if (tm_.is_test_side(*tp) && m_.entity(*tp).parent) out.insert(*m_.entity(*tp).parent);
    return out;
  }

 private:
  static const std::vector<EntityId>& lookup(const std::map<EntityId, std::vector<EntityId>>& m, EntityId k) {
    static const std::vector<EntityId> empty;
    auto it = m.find(k);
    return it == m.end() ? empty : it->second;
  }

  const TestModel& tm_;
  const FactModel& m_;
  std::map<EntityId, std::vector<EntityId>> testCasesIn_;
  std::map<EntityId, std::vector<EntityId>> unitsIn_;
  std::map<EntityId, UnitRanking> rankings_;
};

// Production methods reached by each command, from the method-level edges.
std::map<EntityId, std::set<EntityId>> command_targets(const TestModel& tm) {
  std::map<EntityId, std::set<EntityId>> out;
  for (const auto& e : tm.method_coverage()) {
    if (!e.fromSetup && tm.role(e.fromTest) == TestRole::TestCommand) out[e.fromTest].insert(e.toProd);
  }
  return out;
}

// Resolved constructor call to a production class, or an unresolved `new T`
// whose type names exactly one production class.
bool instantiates_unit(const Context& ctx, EntityId method) {
  const FactModel& m = ctx.facts();
  for (std::size_t idx : m.edges(method, RelationKind::Invocation, Direction::Out)) {
    const Relation& r = m.relation(idx);
    if (r.to) {
      const Entity& callee = m.entity(*r.to);
      if (callee.has(EntityFlag::Constructor) && callee.parent && !ctx.tm().is_test_side(*callee.parent)) {
        return true;
      }
      continue;
    }
    if (r.target.rfind("new ", 0) != 0) continue;
    std::string type = r.target.substr(4, r.target.rfind('/') - 4);
    if (auto cls = m.resolve(type, EntityKind::Class)) {
      if (!ctx.tm().is_test_side(*cls)) return true;
      continue;
    }
    std::string simple = type.substr(type.rfind('.') == std::string::npos ? 0 : type.rfind('.') + 1);
    std::size_t hits = 0;
    bool production = false;
    for (const auto& e : m.entities()) {
      if (e.kind == EntityKind::Class && e.simpleName == simple) {
        ++hits;
        production = !ctx.tm().is_test_side(e.id);
      }
    }
    if (hits == 1 && production) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(FindingKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::string_view to_string(Severity severity) {
  return kSeverityNames[static_cast<std::size_t>(severity)];
}

std::optional<FindingKind> parse_finding_kind(std::string_view text) {
  for (std::size_t i = 0; i < kFindingKindCount; ++i) {
    if (kKindNames[i] == text) return static_cast<FindingKind>(i);
  }
  return std::nullopt;
}

std::optional<Severity> parse_severity(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kSeverityNames); ++i) {
    if (kSeverityNames[i] == text) return static_cast<Severity>(i);
  }
  return std::nullopt;
}

Severity severity_of(FindingKind kind, bool generated) {
  switch (kind) {
    case FindingKind::WellDesignedTestCase:
    case FindingKind::IsolatedUnit:
    case FindingKind::TestHelper:
      return Severity::Opportunity;
    case FindingKind::LackOfExplicitFixture:
    case FindingKind::LargeFixture:
    case FindingKind::ComplexTestScenario:
      return Severity::Threat;
    case FindingKind::UntestedComponent:
      return generated ? Severity::Info : Severity::Threat;
    default:
      return Severity::Info;
  }
}

void validate(const Thresholds& th) {
  auto bad = [](const std::string& what) { throw ConfigError("indicators: " + what); };
  if (th.highlyCoveredMinTestCases == 0) bad("highlyCoveredMinTestCases must be positive");
  if (th.helperMinDependents == 0) bad("helperMinDependents must be positive");
  if (th.complexScenarioMinProdMethods == 0) bad("complexScenarioMinProdMethods must be positive");
  if (th.largeFixtureMinClasses == 0) bad("largeFixtureMinClasses must be positive");
  auto ratio = [&](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) bad(std::string(name) + " must lie in (0,1]");
  };
  ratio(th.partialFixtureUseMax, "partialFixtureUseMax");
  ratio(th.partialCoverageMax, "partialCoverageMax");
  ratio(th.dominanceMin, "dominanceMin");
}

std::vector<std::string> threshold_names() {
  return {"highlyCoveredMinTestCases", "helperMinDependents", "complexScenarioMinProdMethods",
          "largeFixtureMinClasses",    "partialFixtureUseMax", "partialCoverageMax",
          "dominanceMin"};
}

void set_threshold(Thresholds& th, std::string_view key, std::string_view value) {
  auto count = [&](std::size_t& out) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size()) {
      throw ConfigError("threshold " + std::string(key) + ": expected a count, got '" + std::string(value) + "'");
    }
    out = v;
  };
  auto ratio = [&](double& out) {
    try {
      std::size_t used = 0;
      double v = std::stod(std::string(value), &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
      out = v;
    } catch (const std::logic_error&) {
      throw ConfigError("threshold " + std::string(key) + ": expected a number, got '" + std::string(value) + "'");
    }
  };
  if (key == "highlyCoveredMinTestCases") {
    count(th.highlyCoveredMinTestCases);
  } else if (key == "helperMinDependents") {
    count(th.helperMinDependents);
  } else if (key == "complexScenarioMinProdMethods") {
    count(th.complexScenarioMinProdMethods);
  } else if (key == "largeFixtureMinClasses") {
    count(th.largeFixtureMinClasses);
  } else if (key == "partialFixtureUseMax") {
    ratio(th.partialFixtureUseMax);
  } else if (key == "partialCoverageMax") {
    ratio(th.partialCoverageMax);
  } else if (key == "dominanceMin") {
    ratio(th.dominanceMin);
  } else {
    throw ConfigError("unknown threshold '" + std::string(key) + "'");
  }
}

std::string_view to_string(LocationConvention c) {
  switch (c) {
    case LocationConvention::None:
      return "none";
    case LocationConvention::Consistent:
      return "consistent";
    case LocationConvention::Mixed:
      break;
  }
  return "mixed";
}

LocationVerdict location_verdict(const TestModel& tm) {
  bool same = false;
  bool separate = false;
  for (auto tc : tm.test_cases()) {
    auto pkg = tm.facts().enclosing(tc, EntityKind::Package);
    if (!pkg) continue;
    (tm.is_test_side(*pkg) ? separate : same) = true;
  }
  LocationVerdict v;
  if (same && separate) {
    v.convention = LocationConvention::Mixed;
  } else if (same || separate) {
    v.convention = LocationConvention::Consistent;
    v.style = same ? "samePackage" : "separatePackage";
  }
  return v;
}

std::vector<Finding> detect_location(const TestModel& tm) {
  Context ctx(tm, tm.config().dominanceThreshold);
  const FactModel& m = tm.facts();
  std::vector<Finding> out;
  for (const auto& e : m.entities()) {
    if (e.kind != EntityKind::Package) continue;
    const auto& tcs = ctx.test_cases_in(e.id);
    const auto& units = ctx.units_in(e.id);
    if (!tcs.empty() && !units.empty()) {
      out.push_back(make(FindingKind::TestsInSamePackage, {e.id},
                         {{"testCases", as_num(tcs.size())}, {"productionClasses", as_num(units.size())}}));
    }
  }
  // (production package, test package) -> covering test cases, covered classes
  std::map<std::pair<EntityId, EntityId>, std::pair<std::set<EntityId>, std::set<EntityId>>> pairs;
  for (const auto& c : tm.class_coverage()) {
    if (c.commands == 0) continue;
    auto tp = ctx.package_of(c.testCase);
    auto pp = ctx.package_of(c.prodClass);
    if (!tp || !pp || *tp == *pp || !tm.is_test_side(*tp)) continue;
    if (!ctx.test_cases_in(*pp).empty()) continue;
    auto& acc = pairs[{*pp, *tp}];
    acc.first.insert(c.testCase);
    acc.second.insert(c.prodClass);
  }
  for (const auto& [key, acc] : pairs) {
    out.push_back(make(FindingKind::TestsInSeparatePackage, {key.first, key.second},
                       {{"testCases", as_num(acc.first.size())}, {"coveredClasses", as_num(acc.second.size())}}));
  }
  return out;
}

std::vector<Finding> detect_coverage(const TestModel& tm, const Thresholds& th) {
  validate(th);
  Context ctx(tm, th.dominanceMin);
  const FactModel& m = tm.facts();
  std::vector<Finding> out;

  std::set<EntityId> coveredPackages;
  for (const auto& c : tm.class_coverage()) {
    if (auto p = ctx.package_of(c.prodClass)) coveredPackages.insert(*p);
  }
  for (const auto& [pkg, units] : ctx.units_by_package()) {
    if (coveredPackages.count(pkg) || !ctx.test_cases_in(pkg).empty()) continue;
    std::size_t generated = 0;
    for (auto c : units) generated += m.entity(c).has(EntityFlag::Generated) ? 1 : 0;
    bool allGenerated = generated == units.size();
    out.push_back(make(FindingKind::UntestedComponent, {pkg},
                       {{"classes", as_num(units.size())},
                        {"generated", allGenerated ? 1.0 : 0.0},
                        {"generatedClasses", as_num(generated)}},
                       allGenerated));
  }

  std::map<EntityId, std::set<EntityId>> coveredMethods;
  for (const auto& e : tm.method_coverage()) coveredMethods[*m.entity(e.toProd).parent].insert(e.toProd);

  for (const auto& e : m.entities()) {
    if (!ctx.is_unit_class(e)) continue;
    std::size_t testCases = tm.covering_test_cases(e.id).size();
    if (testCases == 0) continue;
    if (testCases >= th.highlyCoveredMinTestCases) {
      out.push_back(make(FindingKind::HighlyCoveredClass, {e.id}, {{"testCases", as_num(testCases)}}));
    }
    if (testCases >= 2) {
      out.push_back(make(FindingKind::MultiTestCaseCoverage, {e.id}, {{"testCases", as_num(testCases)}}));
    }
    std::size_t methods = 0;
    for (auto child : m.children(e.id)) methods += m.entity(child).kind == EntityKind::Method ? 1 : 0;
    std::size_t covered = coveredMethods[e.id].size();
    if (methods == 0) continue;
    double fraction = static_cast<double>(covered) / static_cast<double>(methods);
    if (fraction <= th.partialCoverageMax) {
      out.push_back(make(FindingKind::PartialCoverage, {e.id},
                         {{"coveredMethods", as_num(covered)}, {"methods", as_num(methods)}, {"fraction", fraction}}));
    }
  }
  return out;
}

std::vector<Finding> detect_design(const TestModel& tm, const Thresholds& th) {
  validate(th);
  Context ctx(tm, th.dominanceMin);
  const FactModel& m = tm.facts();
  std::vector<Finding> out;

  // TestHelper: fan-in through test dependencies or invocations.
  {
    std::map<EntityId, std::set<EntityId>> dependents;
    for (const auto& d : tm.dependencies()) {
      if (tm.role(d.fromTest) == TestRole::TestCaseClass) dependents[d.toTest].insert(d.fromTest);
    }
    std::map<EntityId, std::set<EntityId>> invokers;
    std::map<EntityId, std::set<EntityId>> commandUsers;
    for (std::size_t idx : m.relations_of(RelationKind::Invocation)) {
      const Relation& r = m.relation(idx);
      if (!r.to) continue;
      auto callerClass = m.entity(r.from).parent;
      auto calleeClass = m.entity(*r.to).parent;
      if (!callerClass || !calleeClass || *callerClass == *calleeClass) continue;
      if (!tm.is_test_side(*calleeClass) || !tm.is_test_side(r.from)) continue;
      if (tm.role(r.from) == TestRole::TestCommand) commandUsers[*calleeClass].insert(r.from);
      if (tm.role(*callerClass) == TestRole::TestCaseClass) invokers[*calleeClass].insert(*callerClass);
    }
    std::set<EntityId> candidates;
    for (const auto& [k, v] : dependents) candidates.insert(k);
    for (const auto& [k, v] : invokers) candidates.insert(k);
    for (auto h : candidates) {
      std::size_t deps = dependents[h].size();
      std::size_t inv = invokers[h].size();
      if (std::max(deps, inv) < th.helperMinDependents) continue;
      out.push_back(make(FindingKind::TestHelper, {h},
                         {{"dependents", as_num(deps)},
                          {"invokers", as_num(inv)},
                          {"commandUsers", as_num(commandUsers[h].size())}}));
    }
  }

  // IsolatedUnit: every unit of the package is the dominant unit of a
  // co-located test case and no other test case reaches the package.
  {
    std::map<EntityId, std::set<EntityId>> reaching;  // package -> test cases
    for (const auto& c : tm.class_coverage()) {
      if (c.commands == 0) continue;
      if (auto p = ctx.package_of(c.prodClass)) reaching[*p].insert(c.testCase);
    }
    for (const auto& [pkg, units] : ctx.units_by_package()) {
      auto it = reaching.find(pkg);
      if (it == reaching.end()) continue;
      bool isolated = std::all_of(it->second.begin(), it->second.end(),
                                  [&](EntityId tc) { return ctx.co_located(tc, pkg); });
      if (!isolated) continue;
      std::set<EntityId> dominated;
      for (auto tc : it->second) {
        if (auto d = ctx.ranking(tc).dominant_unit()) dominated.insert(*d);
      }
      bool all = std::all_of(units.begin(), units.end(), [&](EntityId c) { return dominated.count(c) > 0; });
      if (!all) continue;
      out.push_back(make(FindingKind::IsolatedUnit, {pkg},
                         {{"classes", as_num(units.size())}, {"testCases", as_num(it->second.size())}}));
    }
  }

  // IndirectTestPattern, variant (i): dominant unit outside the expected
  // location; variant (ii): test cases from elsewhere funnel into one class.
  for (auto tc : tm.test_cases()) {
    const UnitRanking& r = ctx.ranking(tc);
    auto d = r.dominant_unit();
    if (!d) continue;
    auto pkg = ctx.package_of(*d);
    if (!pkg || ctx.expected_packages(tc).count(*pkg)) continue;
    out.push_back(make(FindingKind::IndirectTestPattern, {tc, *d},
                       {{"outsideExpected", 1.0}, {"share", r.ranked.front().share}}));
  }
  for (const auto& e : m.entities()) {
    if (!ctx.is_unit_class(e)) continue;
    auto pkg = ctx.package_of(e.id);
    if (!pkg) continue;
    std::size_t remote = 0;
    for (auto tc : tm.covering_test_cases(e.id)) remote += ctx.co_located(tc, *pkg) ? 0 : 1;
    if (remote >= 2) {
      out.push_back(make(FindingKind::IndirectTestPattern, {e.id}, {{"funnel", 1.0}, {"testCases", as_num(remote)}}));
    }
  }

  // Per test case design shape.
  auto targets = command_targets(tm);
  for (auto tc : tm.test_cases()) {
    auto commands = tm.members(tc, TestRole::TestCommand);
    auto fixture = tm.members(tc, TestRole::FixtureAttribute);
    const UnitRanking& r = ctx.ranking(tc);

    std::size_t maxOut = 0;
    for (auto c : commands) {
      const auto& t = targets[c];
      maxOut = std::max(maxOut, t.size());
      if (t.size() >= th.complexScenarioMinProdMethods) {
        std::set<EntityId> classes;
        for (auto meth : t) classes.insert(*m.entity(meth).parent);
        out.push_back(make(FindingKind::ComplexTestScenario, {c, tc},
                           {{"prodMethods", as_num(t.size())}, {"prodClasses", as_num(classes.size())}}));
      }
    }

    if (!fixture.empty() && r.dominant && !commands.empty() && maxOut < th.complexScenarioMinProdMethods) {
      out.push_back(make(FindingKind::WellDesignedTestCase, {tc},
                         {{"fixtureAttributes", as_num(fixture.size())},
                          {"commands", as_num(commands.size())},
                          {"maxProdMethods", as_num(maxOut)},
                          {"share", r.ranked.front().share}}));
    }

    if (fixture.empty() && commands.size() >= 2) {
      std::size_t instantiating = 0;
      for (auto c : commands) instantiating += instantiates_unit(ctx, c) ? 1 : 0;
      if (instantiating >= 2) {
        out.push_back(make(FindingKind::LackOfExplicitFixture, {tc},
                           {{"commands", as_num(commands.size())}, {"instantiatingCommands", as_num(instantiating)}}));
      }
    }

    // Fixture attributes holding production objects.
    std::vector<EntityId> prodFixture;
    std::set<EntityId> fixtureClasses;
    for (auto a : fixture) {
      auto cls = m.resolve(m.entity(a).declaredType, EntityKind::Class);
      if (!cls || tm.is_test_side(*cls)) continue;
      prodFixture.push_back(a);
      fixtureClasses.insert(*cls);
    }
    if (fixtureClasses.size() >= th.largeFixtureMinClasses && !commands.empty()) {
      double sum = 0.0;
      for (auto c : commands) {
        auto accessed = m.neighbors(c, RelationKind::AttributeAccess, Direction::Out);
        std::size_t used = 0;
        for (auto a : prodFixture) used += std::count(accessed.begin(), accessed.end(), a) > 0 ? 1 : 0;
        sum += static_cast<double>(used) / static_cast<double>(prodFixture.size());
      }
      double mean = sum / static_cast<double>(commands.size());
      if (mean <= th.partialFixtureUseMax) {
        out.push_back(make(FindingKind::LargeFixture, {tc},
                           {{"fixtureClasses", as_num(fixtureClasses.size())},
                            {"fixtureAttributes", as_num(prodFixture.size())},
                            {"meanFixtureUse", mean},
                            {"commands", as_num(commands.size())}}));
      }
    }

    std::size_t coveredClasses = 0;
    for (const auto& rc : r.ranked) coveredClasses += rc.commands > 0 ? 1 : 0;
    if (coveredClasses >= 3 && !r.dominant) {
      out.push_back(make(FindingKind::IntegrationTestStyle, {tc},
                         {{"classes", as_num(coveredClasses)}, {"topShare", r.ranked.front().share}}));
    }
  }
  return out;
}

std::size_t IndicatorReport::count(FindingKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [&](const Finding& f) { return f.kind == kind; }));
}

std::size_t IndicatorReport::count(Severity severity) const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [&](const Finding& f) { return f.severity == severity; }));
}

IndicatorReport report(const TestModel& tm, const Thresholds& th) {
  validate(th);
  IndicatorReport r;
  r.thresholds = th;
  r.location = location_verdict(tm);
  r.findings = detect_location(tm);
  auto cov = detect_coverage(tm, th);
  auto des = detect_design(tm, th);
  r.findings.insert(r.findings.end(), cov.begin(), cov.end());
  r.findings.insert(r.findings.end(), des.begin(), des.end());
  const FactModel& m = tm.facts();
  auto names = [&](const Finding& f) {
    std::vector<std::string_view> out;
    for (auto s : f.subjects) out.push_back(m.entity(s).qualifiedName);
    return out;
  };
  std::stable_sort(r.findings.begin(), r.findings.end(), [&](const Finding& a, const Finding& b) {
    if (a.severity != b.severity) return severity_rank(a.severity) < severity_rank(b.severity);
    if (a.kind != b.kind) return a.kind < b.kind;
    return names(a) < names(b);
  });
  return r;
}

nlohmann::json report_to_json(const IndicatorReport& r, const FactModel& facts) {
  using nlohmann::json;
  json findings = json::array();
  for (const auto& f : r.findings) {
    json subjects = json::array();
    for (auto s : f.subjects) subjects.push_back(facts.entity(s).qualifiedName);
    json evidence = json::object();
    for (const auto& [k, v] : f.evidence) evidence[k] = v;
    findings.push_back({{"kind", to_string(f.kind)},
                        {"severity", to_string(f.severity)},
                        {"subjects", subjects},
                        {"evidence", evidence}});
  }
  const Thresholds& th = r.thresholds;
  json thresholds{{"highlyCoveredMinTestCases", th.highlyCoveredMinTestCases},
                  {"helperMinDependents", th.helperMinDependents},
                  {"complexScenarioMinProdMethods", th.complexScenarioMinProdMethods},
                  {"largeFixtureMinClasses", th.largeFixtureMinClasses},
                  {"partialFixtureUseMax", th.partialFixtureUseMax},
                  {"partialCoverageMax", th.partialCoverageMax},
                  {"dominanceMin", th.dominanceMin}};
  return json{{"location", {{"convention", to_string(r.location.convention)}, {"style", r.location.style}}},
              {"thresholds", thresholds},
              {"findings", findings}};
}

IndicatorReport report_from_json(const nlohmann::json& j, const FactModel& facts) {
  IndicatorReport r;
  try {
    const auto& loc = j.at("location");
    std::string conv = loc.at("convention").get<std::string>();
    if (conv == "consistent") {
      r.location.convention = LocationConvention::Consistent;
    } else if (conv == "mixed") {
      r.location.convention = LocationConvention::Mixed;
    } else if (conv != "none") {
      throw SchemaViolation("/location/convention", "unknown value " + conv);
    }
    r.location.style = loc.at("style").get<std::string>();
    for (const auto& [k, v] : j.at("thresholds").items()) {
      set_threshold(r.thresholds, k, v.is_number_integer() ? std::to_string(v.get<std::size_t>()) : v.dump());
    }
    std::size_t i = 0;
    for (const auto& f : j.at("findings")) {
      std::string at = "/findings/" + std::to_string(i++);
      Finding out;
      auto kind = parse_finding_kind(f.at("kind").get<std::string>());
      auto sev = parse_severity(f.at("severity").get<std::string>());
      if (!kind) throw SchemaViolation(at + "/kind", "unknown finding kind");
      if (!sev) throw SchemaViolation(at + "/severity", "unknown severity");
      out.kind = *kind;
      out.severity = *sev;
      for (const auto& s : f.at("subjects")) {
        auto name = s.get<std::string>();
        std::optional<EntityId> id;
        for (auto k : {EntityKind::Class, EntityKind::Package, EntityKind::Method, EntityKind::Attribute}) {
          if ((id = facts.resolve(name, k))) break;
        }
        if (!id) throw SchemaViolation(at + "/subjects", "unknown entity " + name);
        out.subjects.push_back(*id);
      }
      if (out.subjects.empty()) throw SchemaViolation(at + "/subjects", "empty");
      for (const auto& [k, v] : f.at("evidence").items()) out.evidence[k] = v.get<double>();
      r.findings.push_back(std::move(out));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolation("/indicatorReport", e.what());
  } catch (const ConfigError& e) {
    throw SchemaViolation("/indicatorReport/thresholds", e.what());
  }
  return r;
}

std::string render_text(const IndicatorReport& r, const FactModel& facts) {
  std::ostringstream out;
  out << "Test location convention: " << to_string(r.location.convention);
  if (!r.location.style.empty()) out << " (" << r.location.style << ")";
  out << "\n";
  if (r.findings.empty()) {
    out << "No findings.\n";
    return out.str();
  }
  for (Severity sev : {Severity::Threat, Severity::Opportunity, Severity::Info}) {
    if (r.count(sev) == 0) continue;
    out << "\n== " << to_string(sev) << " (" << r.count(sev) << ") ==\n";
    for (std::size_t k = 0; k < kFindingKindCount; ++k) {
      auto kind = static_cast<FindingKind>(k);
      bool header = false;
      for (const auto& f : r.findings) {
        if (f.kind != kind || f.severity != sev) continue;
        if (!header) {
          std::size_t n = std::count_if(r.findings.begin(), r.findings.end(),
                                        [&](const Finding& g) { return g.kind == kind && g.severity == sev; });
          out << "\n" << to_string(kind) << " (" << n << ")\n";
          header = true;
        }
        out << "  ";
        for (std::size_t i = 0; i < f.subjects.size(); ++i) {
          out << (i ? ", " : "") << facts.entity(f.subjects[i]).qualifiedName;
        }
        for (const auto& [key, v] : f.evidence) out << "  " << key << "=" << fmt::format("{:.4g}", v);
        out << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace testscope
