#include "testscope/views/views.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace testscope {

bool is_synthetic_class(const Entity& e) {
  return e.kind == EntityKind::Class && e.simpleName.find('/') != std::string::npos;
}

namespace {

class DocBuilder {
 public:
  DocBuilder(const TestModel& tm, ViewKind kind) : tm_(tm) { doc_.viewKind = kind; }

  GraphDocument& doc() { return doc_; }
  bool has(const std::string& id) const { return index_.count(id) != 0; }

  ViewNode& entity_node(EntityId id, NodeShape shape) {
    const Entity& e = tm_.facts().entity(id);
    auto it = index_.find(e.qualifiedName);
    if (it != index_.end()) return doc_.nodes[it->second];
    ViewNode n;
    n.id = e.qualifiedName;
    n.label = e.simpleName;
    n.shape = shape;
    n.fill = tm_.is_test_side(id) ? NodeFill::TestBlack : NodeFill::ProductionWhite;
    n.entity = id;
    n.entityKind = std::string(to_string(e.kind));
    if (e.kind != EntityKind::Package) n.role = std::string(to_string(tm_.role(id)));
    return add(std::move(n));
  }

  ViewNode& meta_node(std::string_view id, std::string label) {
    auto it = index_.find(std::string(id));
    if (it != index_.end()) return doc_.nodes[it->second];
    ViewNode n;
    n.id = std::string(id);
    n.label = std::move(label);
    n.shape = NodeShape::MetaBox;
    n.fill = NodeFill::MetaNeutral;
    n.entityKind = "Meta";
    return add(std::move(n));
  }

  void edge(const std::string& from, const std::string& to, EdgeKind kind, std::size_t weight = 1,
            bool setup = false) {
    auto key = std::make_tuple(kind, from, to, setup);
    auto it = edgeIndex_.find(key);
    if (it != edgeIndex_.end()) {
      // Containment is structural; only coverage and dependency bundle.
      if (kind != EdgeKind::Containment) doc_.edges[it->second].weight += weight;
      return;
    }
    edgeIndex_[key] = doc_.edges.size();
    doc_.edges.push_back(ViewEdge{from, to, kind, std::max<std::size_t>(weight, 1), setup});
  }

  GraphDocument finish() {
    std::sort(doc_.nodes.begin(), doc_.nodes.end(),
              [](const ViewNode& a, const ViewNode& b) { return a.id < b.id; });
    std::sort(doc_.edges.begin(), doc_.edges.end(), [](const ViewEdge& a, const ViewEdge& b) {
      return std::tie(a.kind, a.from, a.to, a.setup) < std::tie(b.kind, b.from, b.to, b.setup);
    });
    return std::move(doc_);
  }

 private:
  ViewNode& add(ViewNode n) {
    index_[n.id] = doc_.nodes.size();
    doc_.nodes.push_back(std::move(n));
    return doc_.nodes.back();
  }

  const TestModel& tm_;
  GraphDocument doc_;
  std::map<std::string, std::size_t> index_;
  std::map<std::tuple<EdgeKind, std::string, std::string, bool>, std::size_t> edgeIndex_;
};

// Nearest enclosing class that is drawn in the system-wide view.
std::optional<EntityId> visible_class(const FactModel& m, EntityId cls) {
  std::optional<EntityId> c = cls;
  while (c && (m.entity(*c).kind != EntityKind::Class || is_synthetic_class(m.entity(*c)))) {
    c = m.entity(*c).parent;
  }
  return c;
}

}  // namespace

GraphDocument build_system_wide(const TestModel& tm,
                                const std::optional<std::vector<std::string>>& packageFilter) {
  const FactModel& m = tm.facts();
  std::set<EntityId> allowed;
  if (packageFilter) {
    for (const auto& name : *packageFilter) {
      auto id = m.resolve(name, EntityKind::Package);
      if (!id) throw UnknownPackage("unknown package " + name);
      allowed.insert(*id);
    }
  }
  auto in_filter = [&](EntityId id) {
    if (!packageFilter) return true;
    auto pkg = m.enclosing(id, EntityKind::Package);
    return pkg && allowed.count(*pkg) != 0;
  };

  DocBuilder b(tm, ViewKind::SystemWide);
  std::set<EntityId> kept;
  for (const auto& e : m.entities()) {
    if (e.kind == EntityKind::Package && in_filter(e.id)) {
      b.entity_node(e.id, NodeShape::Square);
      kept.insert(e.id);
    } else if (e.kind == EntityKind::Class && !is_synthetic_class(e) && in_filter(e.id)) {
      b.entity_node(e.id, NodeShape::Circle);
      kept.insert(e.id);
    }
  }

  struct Link {
    EntityId from, to;
    EdgeKind kind;
    std::size_t weight;
    bool setup;
  };
  std::vector<Link> links;
  for (const auto& c : tm.class_coverage()) {
    auto from = visible_class(m, c.testCase);
    auto to = visible_class(m, c.prodClass);
    if (from && to && *from != *to) {
      links.push_back({*from, *to, EdgeKind::Coverage, c.viaInvocations, c.setup_only()});
    }
  }
  for (const auto& d : tm.dependencies()) {
    auto from = visible_class(m, d.fromTest);
    auto to = visible_class(m, d.toTest);
    if (from && to) links.push_back({*from, *to, EdgeKind::Dependency, 1, false});
  }
  if (packageFilter) {
    std::set<EntityId> linked;
    for (const auto& l : links) {
      if (kept.count(l.from) && !kept.count(l.to)) linked.insert(l.to);
      if (kept.count(l.to) && !kept.count(l.from)) linked.insert(l.from);
    }
    for (auto id : linked) {
      b.entity_node(id, NodeShape::Circle);
      kept.insert(id);
    }
  }
  for (const auto& e : m.entities()) {
    if (!kept.count(e.id) || !e.parent || !kept.count(*e.parent)) continue;
    b.edge(m.entity(*e.parent).qualifiedName, e.qualifiedName, EdgeKind::Containment);
  }
  for (const auto& l : links) {
    if (!kept.count(l.from) || !kept.count(l.to)) continue;
    b.edge(m.entity(l.from).qualifiedName, m.entity(l.to).qualifiedName, l.kind, l.weight, l.setup);
  }
  GraphDocument doc = b.finish();
  if (packageFilter) {
    std::string names;
    for (const auto& p : *packageFilter) names += (names.empty() ? "" : ",") + p;
    doc.meta["filter"] = "packages=" + names;
  } else {
    doc.meta["filter"] = "class level";
  }
  return doc;
}

GraphDocument build_unit_view(const TestModel& tm, EntityId unitClass) {
  const FactModel& m = tm.facts();
  if (!m.contains(unitClass) || m.entity(unitClass).kind != EntityKind::Class ||
      tm.is_test_side(unitClass)) {
    throw NotAProductionClass(m.contains(unitClass) ? m.entity(unitClass).qualifiedName
                                                    : "#" + std::to_string(unitClass.value()));
  }
  const Entity& unit = m.entity(unitClass);
  DocBuilder b(tm, ViewKind::UnitUnderTest);
  b.doc().focus = unitClass;
  b.doc().focusName = unit.qualifiedName;
  b.entity_node(unitClass, NodeShape::Square);

  std::set<EntityId> covered;
  for (const auto& c : tm.method_coverage()) {
    if (m.entity(c.toProd).parent == unitClass) covered.insert(c.toProd);
  }
  std::set<EntityId> shown;
  for (auto child : m.children(unitClass)) {
    const Entity& e = m.entity(child);
    if (e.kind != EntityKind::Method) continue;
    if (e.has(EntityFlag::Private) && !covered.count(child)) continue;
    b.entity_node(child, NodeShape::Circle);
    b.edge(unit.qualifiedName, e.qualifiedName, EdgeKind::Containment);
    shown.insert(child);
  }
  for (const auto& c : tm.method_coverage()) {
    if (!shown.count(c.toProd)) continue;
    const Entity& cmd = m.entity(c.fromTest);
    EntityId tc = *cmd.parent;
    b.entity_node(tc, NodeShape::Square);
    b.entity_node(c.fromTest, NodeShape::Circle);
    b.edge(m.entity(tc).qualifiedName, cmd.qualifiedName, EdgeKind::Containment);
    b.edge(cmd.qualifiedName, m.entity(c.toProd).qualifiedName, EdgeKind::Coverage,
           c.viaInvocations, c.fromSetup);
  }
  GraphDocument doc = b.finish();
  doc.meta["filter"] = "accessible methods";
  return doc;
}

GraphDocument build_test_case_view(const TestModel& tm, EntityId testCase) {
  const FactModel& m = tm.facts();
  if (!m.contains(testCase) || tm.role(testCase) != TestRole::TestCaseClass) {
    throw NotATestCase(m.contains(testCase) ? m.entity(testCase).qualifiedName
                                            : "#" + std::to_string(testCase.value()));
  }
  const Entity& tc = m.entity(testCase);
  DocBuilder b(tm, ViewKind::TestCase);
  b.doc().focus = testCase;
  b.doc().focusName = tc.qualifiedName;
  b.entity_node(testCase, NodeShape::Square);
  b.meta_node(kFixtureNode, "Fixture");
  b.meta_node(kCommandsNode, "Test Commands");
  b.edge(tc.qualifiedName, std::string(kFixtureNode), EdgeKind::Containment);
  b.edge(tc.qualifiedName, std::string(kCommandsNode), EdgeKind::Containment);

  std::set<EntityId> own;
  std::set<std::string> ownNames;
  for (auto cmd : tm.members(testCase, TestRole::TestCommand)) {
    b.entity_node(cmd, NodeShape::Circle);
    b.edge(std::string(kCommandsNode), m.entity(cmd).qualifiedName, EdgeKind::Containment);
    own.insert(cmd);
    ownNames.insert(m.entity(cmd).simpleName);
  }
  for (auto role : {TestRole::TestSetup, TestRole::TestTearDown}) {
    for (auto id : tm.members(testCase, role)) {
      b.entity_node(id, NodeShape::Circle);
      b.edge(tc.qualifiedName, m.entity(id).qualifiedName, EdgeKind::Containment);
      if (role == TestRole::TestSetup) own.insert(id);
    }
  }

  // Superclass test cases along the dependency chain; their commands are
  // inherited unless overridden.
  std::vector<EntityId> frontier{testCase};
  std::set<EntityId> visited{testCase};
  while (!frontier.empty()) {
    EntityId cur = frontier.back();
    frontier.pop_back();
    for (const auto& d : tm.dependencies()) {
      if (d.fromTest != cur) continue;
      b.entity_node(d.toTest, NodeShape::Square);
      b.edge(m.entity(cur).qualifiedName, m.entity(d.toTest).qualifiedName, EdgeKind::Dependency);
      if (!visited.insert(d.toTest).second) continue;
      frontier.push_back(d.toTest);
      for (auto cmd : tm.members(d.toTest, TestRole::TestCommand)) {
        if (!ownNames.insert(m.entity(cmd).simpleName).second) continue;
        b.entity_node(cmd, NodeShape::Circle).inherited = true;
        b.edge(std::string(kCommandsNode), m.entity(cmd).qualifiedName, EdgeKind::Containment);
      }
    }
  }

  for (auto attr : tm.members(testCase, TestRole::FixtureAttribute)) {
    const auto& type = m.entity(attr).declaredType;
    auto cls = type.empty() ? std::nullopt : m.resolve(type, EntityKind::Class);
    if (!cls) continue;
    b.entity_node(*cls, NodeShape::Square);
    b.edge(std::string(kFixtureNode), m.entity(*cls).qualifiedName, EdgeKind::Containment);
  }

  for (const auto& c : tm.method_coverage()) {
    if (!own.count(c.fromTest)) continue;
    const Entity& target = m.entity(c.toProd);
    EntityId cls = *target.parent;
    b.entity_node(cls, NodeShape::Square);
    const std::string& from = m.entity(c.fromTest).qualifiedName;
    if (c.fromSetup) {
      b.edge(from, m.entity(cls).qualifiedName, EdgeKind::Coverage, c.viaInvocations, true);
      continue;
    }
    b.entity_node(c.toProd, NodeShape::Circle);
    b.edge(m.entity(cls).qualifiedName, target.qualifiedName, EdgeKind::Containment);
    b.edge(from, target.qualifiedName, EdgeKind::Coverage, c.viaInvocations, false);
  }
  GraphDocument doc = b.finish();
  doc.meta["filter"] = "test case";
  return doc;
}

}  // namespace testscope
