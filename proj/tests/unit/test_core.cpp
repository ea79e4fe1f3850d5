#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fact_signature.hpp"
#include "random_model.hpp"
#include "testscope/core/facts_io.hpp"

using namespace testscope;
using testkit::entity_map;
using testkit::relation_multiset;

namespace {

FactModel small_fixture() {
  FactModel m;
  auto org = m.add_entity(EntityKind::Package, "org");
  auto apache = m.add_entity(EntityKind::Package, "apache", org);
  auto tools = m.add_entity(EntityKind::Package, "tools", apache);
  auto a = m.add_entity(EntityKind::Class, "A", tools);
  auto b = m.add_entity(EntityKind::Class, "B", apache);
  m.add_entity(EntityKind::Method, "run/0", a);
  m.add_entity(EntityKind::Method, "stop/0", a);
  m.add_entity(EntityKind::Method, "B/0", b, std::nullopt, EntityFlag::Constructor);
  m.add_entity(EntityKind::Method, "get/1", b);
  m.add_entity(EntityKind::Method, "set/2", b);
  return m;
}

}  // namespace

TEST(FactModel, QualifiedNamesFollowContainment) {
  FactModel m;
  auto org = m.add_entity(EntityKind::Package, "org");
  auto apache = m.add_entity(EntityKind::Package, "apache", org);
  EXPECT_EQ(m.entity(apache).qualifiedName, "org.apache");
  EXPECT_EQ(m.resolve("org.apache"), apache);
  EXPECT_FALSE(m.resolve("missing.Name"));
}

TEST(FactModel, RejectsMethodUnderPackage) {
  FactModel m;
  auto p = m.add_entity(EntityKind::Package, "p");
  EXPECT_THROW(m.add_entity(EntityKind::Method, "testFoo/0", p), InvalidParentKind);
  EXPECT_THROW(m.add_entity(EntityKind::Attribute, "x", std::nullopt), InvalidParentKind);
  EXPECT_THROW(m.add_entity(EntityKind::Package, "q", m.add_entity(EntityKind::Class, "C", p)), InvalidParentKind);
}

TEST(FactModel, DuplicateQualifiedNameSameKind) {
  FactModel m;
  auto p = m.add_entity(EntityKind::Package, "p");
  auto c = m.add_entity(EntityKind::Class, "C", p);
  EXPECT_THROW(m.add_entity(EntityKind::Class, "C", p), DuplicateQualifiedName);
  // A field and a nested class may share a name.
  m.add_entity(EntityKind::Class, "Inner", c);
  EXPECT_NO_THROW(m.add_entity(EntityKind::Attribute, "Inner", c));
}

TEST(FactModel, HandCountedFixture) {
  FactModel m = small_fixture();
  EXPECT_EQ(m.entity_count(), 10u);
  EXPECT_EQ(m.relation_count(RelationKind::Containment), 9u);
  EXPECT_TRUE(m.audit().empty());
}

TEST(FactModel, NeighborsInInsertionOrder) {
  FactModel m;
  auto p = m.add_entity(EntityKind::Package, "p");
  auto c = m.add_entity(EntityKind::Class, "C", p);
  auto a = m.add_entity(EntityKind::Method, "a/0", c);
  auto b = m.add_entity(EntityKind::Method, "b/0", c);
  auto cc = m.add_entity(EntityKind::Method, "c/0", c);
  auto lonely = m.add_entity(EntityKind::Class, "Lonely", p);
  m.add_relation({RelationKind::Invocation, a, b, "p.C.b/0", std::nullopt});
  m.add_relation({RelationKind::Invocation, a, cc, "p.C.c/0", std::nullopt});
  m.add_relation({RelationKind::Invocation, a, b, "p.C.b/0", std::nullopt});
  EXPECT_EQ(m.neighbors(a, RelationKind::Invocation, Direction::Out), (std::vector<EntityId>{b, cc}));
  EXPECT_EQ(m.edges(a, RelationKind::Invocation, Direction::Out).size(), 3u);
  EXPECT_TRUE(m.neighbors(lonely, RelationKind::Invocation, Direction::In).empty());
  EXPECT_THROW(m.neighbors(EntityId(999), RelationKind::Invocation, Direction::In), UnknownEntity);
}

TEST(FactModel, RelationEndpointKindsChecked) {
  FactModel m;
  auto p = m.add_entity(EntityKind::Package, "p");
  auto c = m.add_entity(EntityKind::Class, "C", p);
  auto f = m.add_entity(EntityKind::Method, "f/0", c);
  auto x = m.add_entity(EntityKind::Attribute, "x", c);
  EXPECT_THROW(m.add_relation({RelationKind::Invocation, f, x, "", std::nullopt}), Error);
  EXPECT_THROW(m.add_relation({RelationKind::Inheritance, f, c, "", std::nullopt}), Error);
  EXPECT_NO_THROW(m.add_relation({RelationKind::AttributeAccess, f, x, "p.C.x", std::nullopt}));
}

TEST(FactModel, UnresolvedRelationCanBeResolvedOnce) {
  FactModel m;
  auto p = m.add_entity(EntityKind::Package, "p");
  auto c = m.add_entity(EntityKind::Class, "C", p);
  auto f = m.add_entity(EntityKind::Method, "f/0", c);
  auto g = m.add_entity(EntityKind::Method, "g/0", c);
  auto idx = m.add_relation({RelationKind::Invocation, f, std::nullopt, "g/0", std::nullopt});
  EXPECT_TRUE(m.neighbors(f, RelationKind::Invocation, Direction::Out).empty());
  m.resolve_relation(idx, g);
  m.resolve_relation(idx, g);
  EXPECT_EQ(m.neighbors(f, RelationKind::Invocation, Direction::Out), std::vector<EntityId>{g});
  EXPECT_EQ(m.neighbors(g, RelationKind::Invocation, Direction::In), std::vector<EntityId>{f});
}

TEST(FactModel, FrozenRejectsWrites) {
  auto frozen = freeze(small_fixture());
  EXPECT_TRUE(frozen->frozen());
  FactModel copy = *frozen;
  EXPECT_THROW(copy.add_entity(EntityKind::Package, "z"), FrozenModel);
}

TEST(FactModel, ResolveAgreesWithShadowMap) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    FactModel m = testkit::random_model(seed);
    std::map<std::string, std::set<EntityId>> shadow;
    for (const auto& e : m.entities()) shadow[e.qualifiedName].insert(e.id);
    std::mt19937_64 rng(seed);
    std::vector<std::string> names;
    for (const auto& [n, ids] : shadow) names.push_back(n);
    for (int i = 0; i < 1000; ++i) {
      std::string name = names[rng() % names.size()];
      if (rng() % 3 == 0) name += "x" + std::to_string(rng() % 7);
      auto got = m.resolve(name);
      auto it = shadow.find(name);
      if (it == shadow.end()) {
        EXPECT_FALSE(got) << name;
      } else {
        ASSERT_TRUE(got) << name;
        EXPECT_TRUE(it->second.count(*got)) << name;
      }
    }
  }
}

TEST(FactModel, RandomModelsAreConsistent) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    FactModel m = testkit::random_model(seed);
    EXPECT_LE(m.entity_count(), 200u);
    EXPECT_TRUE(m.audit().empty()) << "seed " << seed << ": " << m.audit().front();
    for (const auto& e : m.entities()) {
      EXPECT_LE(m.neighbors(e.id, RelationKind::Containment, Direction::In).size(), 1u);
      // Parent walk terminates within the model depth.
      std::size_t steps = 0;
      for (auto cur = e.parent; cur; cur = m.entity(*cur).parent) ASSERT_LE(++steps, m.entity_count());
      EXPECT_EQ(steps, m.depth(e.id));
    }
    // Index coherence: every outgoing edge appears as incoming at its target.
    for (std::size_t k = 0; k < kRelationKindCount; ++k) {
      auto kind = static_cast<RelationKind>(k);
      std::multiset<std::pair<std::uint32_t, std::uint32_t>> out, in;
      for (const auto& e : m.entities()) {
        for (auto r : m.edges(e.id, kind, Direction::Out)) {
          if (m.relation(r).to) out.insert({e.id.value(), m.relation(r).to->value()});
        }
        for (auto r : m.edges(e.id, kind, Direction::In)) in.insert({m.relation(r).from.value(), e.id.value()});
      }
      EXPECT_EQ(out, in);
    }
  }
}

TEST(FactsIO, EmptyModelExport) {
  auto j = facts_to_json(FactModel{});
  EXPECT_EQ(j.at("format"), "testscope-facts");
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_TRUE(j.at("entities").empty());
  EXPECT_TRUE(j.at("relations").empty());
}

TEST(FactsIO, ExportIsByteIdentical) {
  FactModel m = testkit::random_model(42);
  EXPECT_EQ(export_facts(m), export_facts(m));
  EXPECT_EQ(export_facts(m), export_facts(import_facts_text(export_facts(m))));
}

TEST(FactsIO, RoundTripRandomModels) {
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    FactModel m = testkit::random_model(seed);
    FactModel back = import_facts_text(export_facts(m));
    ASSERT_EQ(entity_map(m), entity_map(back)) << "seed " << seed;
    ASSERT_EQ(relation_multiset(m), relation_multiset(back)) << "seed " << seed;
  }
}

TEST(FactsIO, UndeclaredTargetStaysUnresolved) {
  const char* doc = R"({"format":"testscope-facts","version":1,
    "entities":[{"id":0,"kind":"Package","simpleName":"p","qualifiedName":"p","parent":null},
                {"id":1,"kind":"Class","simpleName":"C","qualifiedName":"p.C","parent":0},
                {"id":2,"kind":"Method","simpleName":"f/0","qualifiedName":"p.C.f/0","parent":1}],
    "relations":[{"kind":"Invocation","from":2,"to":77,"resolved":true,"target":"q.D.g/0"}]})";
  FactModel m = import_facts_text(doc);
  ASSERT_EQ(m.relation_count(RelationKind::Invocation), 1u);
  const auto& r = m.relation(m.relations_of(RelationKind::Invocation).front());
  EXPECT_FALSE(r.resolved());
  EXPECT_EQ(r.target, "q.D.g/0");
}

TEST(FactsIO, SampleFileCounts) {
  FactModel m = read_facts_file(TESTSCOPE_FIXTURES "/sample.facts.json");
  std::map<EntityKind, int> counts;
  for (const auto& e : m.entities()) ++counts[e.kind];
  EXPECT_EQ(counts[EntityKind::Class], 3);
  EXPECT_EQ(counts[EntityKind::Method], 7);
}

TEST(FactsIO, SchemaViolationsCarryPaths) {
  auto path_of = [](const char* text) {
    try {
      import_facts_text(text);
    } catch (const SchemaViolation& e) {
      return e.path();
    }
    return std::string("no error");
  };
  EXPECT_EQ(path_of(R"({"format":"other","version":1,"entities":[],"relations":[]})"), "/format");
  EXPECT_EQ(path_of(R"({"format":"testscope-facts","version":1,"entities":[{"id":0,"kind":"Blob","simpleName":"x","qualifiedName":"x","parent":null}],"relations":[]})"),
            "/entities/0/kind");
  EXPECT_EQ(path_of(R"({"format":"testscope-facts","version":1,"entities":[],"relations":[{"kind":"Invocation","from":3,"to":null,"resolved":false}]})"),
            "/relations/0/from");
  EXPECT_THROW(import_facts_text("{not json"), SchemaViolation);
}

TEST(FactsIO, DanglingParent) {
  const char* doc = R"({"format":"testscope-facts","version":1,
    "entities":[{"id":1,"kind":"Class","simpleName":"C","qualifiedName":"p.C","parent":9}],"relations":[]})";
  EXPECT_THROW(import_facts_text(doc), DanglingContainment);
}
