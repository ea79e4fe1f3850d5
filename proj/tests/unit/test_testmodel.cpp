#include <chrono>
#include <set>

#include <gtest/gtest.h>

#include "coverage_oracle.hpp"
#include "java_fixture.hpp"
#include "manifest.hpp"
#include "random_model.hpp"
#include "testscope/testmodel/test_model.hpp"

using namespace testscope;
using testkit::id_of;
using testkit::java_model;

namespace {

const char* kTestCaseImport = "import junit.framework.TestCase;\n";

std::string scanner_source(int methods) {
  std::string s = "package ant;\npublic class DirectoryScanner {\n";
  s += "  public void scan() {}\n";
  for (int i = 1; i < methods; ++i) s += "  public int get" + std::to_string(i) + "() { return 0; }\n";
  return s + "}\n";
}

}  // namespace

TEST(Classify, UntarTestByNaming) {
  auto m = java_model({{"ant/taskdefs/UntarTest.java",
                        std::string("package ant.taskdefs;\n") + kTestCaseImport +
                            "public class UntarTest extends TestCase {\n  public void testRealTest() {}\n}\n"},
                       {"ant/taskdefs/Untar.java", "package ant.taskdefs;\npublic class Untar { void execute() {} }\n"}});
  TestModel tm = classify(m);
  EXPECT_EQ(tm.role(id_of(*m, "ant.taskdefs.UntarTest", EntityKind::Class)), TestRole::TestCaseClass);
  EXPECT_EQ(tm.role(id_of(*m, "ant.taskdefs.UntarTest.testRealTest/0", EntityKind::Method)), TestRole::TestCommand);
  EXPECT_EQ(tm.role(id_of(*m, "ant.taskdefs.Untar", EntityKind::Class)), TestRole::Production);
  EXPECT_FALSE(tm.is_test_side(id_of(*m, "ant.taskdefs.Untar", EntityKind::Class)));
}

TEST(Classify, MembersOfTestCase) {
  auto m = java_model({{"p/FooTest.java", std::string("package p;\n") + kTestCaseImport +
                                              "public class FooTest extends TestCase {\n"
                                              "  private Foo foo;\n"
                                              "  protected void setUp() { foo = new Foo(); }\n"
                                              "  protected void tearDown() {}\n"
                                              "  public void testA() {}\n"
                                              "  private void check() {}\n}\n"},
                       {"p/Foo.java", "package p;\npublic class Foo {}\n"}});
  TestModel tm = classify(m);
  auto role = [&](const char* qn, EntityKind k) { return tm.role(id_of(*m, qn, k)); };
  EXPECT_EQ(role("p.FooTest.foo", EntityKind::Attribute), TestRole::FixtureAttribute);
  EXPECT_EQ(role("p.FooTest.setUp/0", EntityKind::Method), TestRole::TestSetup);
  EXPECT_EQ(role("p.FooTest.tearDown/0", EntityKind::Method), TestRole::TestTearDown);
  EXPECT_EQ(role("p.FooTest.testA/0", EntityKind::Method), TestRole::TestCommand);
  EXPECT_EQ(role("p.FooTest.check/0", EntityKind::Method), TestRole::TestUtilityMethod);
  // Packages holding both sides are not test-side.
  EXPECT_FALSE(tm.is_test_side(id_of(*m, "p", EntityKind::Package)));
}

TEST(Classify, JUnit4AnnotationsFollowStyle) {
  std::map<std::string, std::string> files{
      {"p/Checks.java", "package p;\nimport org.junit.*;\npublic class Checks {\n"
                        "  @Before public void prepare() {}\n  @Test public void addition() {}\n}\n"}};
  auto m = java_model(files);
  ClassifyConfig both;
  EXPECT_EQ(classify(m, both).role(id_of(*m, "p.Checks", EntityKind::Class)), TestRole::TestCaseClass);
  EXPECT_EQ(classify(m, both).role(id_of(*m, "p.Checks.addition/0", EntityKind::Method)), TestRole::TestCommand);
  EXPECT_EQ(classify(m, both).role(id_of(*m, "p.Checks.prepare/0", EntityKind::Method)), TestRole::TestSetup);
  ClassifyConfig v3;
  v3.junitStyle = JUnitStyle::V3;
  EXPECT_NE(classify(m, v3).role(id_of(*m, "p.Checks", EntityKind::Class)), TestRole::TestCaseClass);
}

TEST(Classify, AbstractBaseAndHelper) {
  std::map<std::string, std::string> files{
      {"ant/BuildFileTest.java", std::string("package ant;\n") + kTestCaseImport +
                                     "public abstract class BuildFileTest extends TestCase {\n"
                                     "  protected void executeTarget(String t) {}\n}\n"},
      {"test/ant/TestUtil.java", "package ant;\npublic class TestUtil { public static void load() {} }\n"},
      {"ant/Project.java", "package ant;\npublic class Project {}\n"}};
  for (int i = 0; i < 3; ++i) {
    std::string n = "T" + std::to_string(i) + "Test";
    files["ant/" + n + ".java"] = "package ant;\npublic class " + n +
                                  " extends BuildFileTest {\n  public void testRun() { executeTarget(\"x\"); TestUtil.load(); }\n}\n";
  }
  auto m = java_model(files);
  TestModel tm = build_test_model(m);
  EXPECT_EQ(tm.role(id_of(*m, "ant.BuildFileTest", EntityKind::Class)), TestRole::TestCaseClass);
  EXPECT_EQ(tm.role(id_of(*m, "ant.TestUtil", EntityKind::Class)), TestRole::TestHelperClass);
  EXPECT_EQ(tm.role(id_of(*m, "ant.Project", EntityKind::Class)), TestRole::Production);
  // Three local subclasses yield three dependency edges to the base.
  auto base = id_of(*m, "ant.BuildFileTest", EntityKind::Class);
  std::size_t toBase = 0;
  for (const auto& d : tm.dependencies()) toBase += d.toTest == base;
  EXPECT_EQ(toBase, 3u);
  EXPECT_EQ(tm.dependencies().size(), 3u);
}

TEST(Classify, EveryEntityHasOneRole) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto m = freeze(testkit::random_model(seed));
    TestModel tm = build_test_model(m);
    for (const auto& e : m->entities()) {
      TestRole r = tm.role(e.id);
      if (e.kind == EntityKind::Package) continue;
      if (r == TestRole::TestCommand || r == TestRole::TestSetup || r == TestRole::TestTearDown ||
          r == TestRole::TestUtilityMethod) {
        EXPECT_EQ(e.kind, EntityKind::Method);
      }
      if (r == TestRole::FixtureAttribute) EXPECT_EQ(e.kind, EntityKind::Attribute);
      if (r == TestRole::TestCaseClass || r == TestRole::TestHelperClass) EXPECT_EQ(e.kind, EntityKind::Class);
    }
  }
}

TEST(Coverage, DirectoryScannerShape) {
  auto m = java_model({{"ant/DirectoryScanner.java", scanner_source(3)},
                       {"ant/DirectoryScannerTest.java",
                        std::string("package ant;\n") + kTestCaseImport +
                            "public class DirectoryScannerTest extends TestCase {\n"
                            "  public void testScan() { DirectoryScanner ds = new DirectoryScanner(); ds.scan(); ds.scan(); }\n}\n"}});
  TestModel tm = build_test_model(m);
  auto cmd = id_of(*m, "ant.DirectoryScannerTest.testScan/0", EntityKind::Method);
  auto scan = id_of(*m, "ant.DirectoryScanner.scan/0", EntityKind::Method);
  bool found = false;
  for (const auto& e : tm.method_coverage()) {
    if (e.fromTest == cmd && e.toProd == scan) {
      found = true;
      EXPECT_EQ(e.viaInvocations, 2u);
    }
  }
  EXPECT_TRUE(found);
  ASSERT_EQ(tm.class_coverage().size(), 1u);
  EXPECT_EQ(tm.class_coverage()[0].testCase, id_of(*m, "ant.DirectoryScannerTest", EntityKind::Class));
  EXPECT_EQ(tm.class_coverage()[0].prodClass, id_of(*m, "ant.DirectoryScanner", EntityKind::Class));
}

TEST(Coverage, ProductionOnlyCallsDoNotCover) {
  auto m = java_model({{"p/A.java", "package p;\npublic class A { void f() { new B().g(); } }\n"},
                       {"p/B.java", "package p;\npublic class B { void g() {} }\n"}});
  TestModel tm = build_test_model(m);
  EXPECT_TRUE(tm.method_coverage().empty());
  EXPECT_TRUE(tm.class_coverage().empty());
}

TEST(Coverage, EightOfTwentyTwo) {
  std::string test = std::string("package ant;\n") + kTestCaseImport +
                     "public class DirectoryScannerTest extends TestCase {\n  private DirectoryScanner ds;\n";
  for (int i = 1; i <= 8; ++i) test += "  public void testGet" + std::to_string(i) + "() { ds.get" + std::to_string(i) + "(); }\n";
  test += "}\n";
  auto m = java_model({{"ant/DirectoryScanner.java", scanner_source(22)}, {"ant/DirectoryScannerTest.java", test}});
  TestModel tm = build_test_model(m);
  auto cls = id_of(*m, "ant.DirectoryScanner", EntityKind::Class);
  EXPECT_EQ(tm.covering_test_cases(cls).size(), 1u);
  std::set<EntityId> covered;
  for (const auto& e : tm.method_coverage()) covered.insert(e.toProd);
  std::size_t methods = 0;
  for (auto c : m->children(cls)) methods += m->entity(c).kind == EntityKind::Method;
  EXPECT_EQ(covered.size(), 8u);
  EXPECT_EQ(methods, 22u);
}

TEST(Coverage, SetupEdgesAreTagged) {
  auto m = java_model({{"p/Foo.java", "package p;\npublic class Foo { public Foo() {} public void go() {} }\n"},
                       {"p/FooTest.java", std::string("package p;\n") + kTestCaseImport +
                                              "public class FooTest extends TestCase {\n  Foo foo;\n"
                                              "  protected void setUp() { foo = new Foo(); }\n"
                                              "  public void testGo() { foo.go(); }\n}\n"}});
  TestModel tm = build_test_model(m);
  ASSERT_EQ(tm.class_coverage().size(), 1u);
  const auto& e = tm.class_coverage()[0];
  EXPECT_EQ(e.commands, 1u);
  EXPECT_EQ(e.setupInvocations, 1u);
  EXPECT_EQ(e.viaInvocations, 2u);

  ClassifyConfig noSetup;
  noSetup.setupCoverage = false;
  TestModel tm2 = build_test_model(m, noSetup);
  for (const auto& me : tm2.method_coverage()) EXPECT_FALSE(me.fromSetup);
  EXPECT_EQ(tm2.class_coverage()[0].setupInvocations, 0u);

  ClassifyConfig noCtor;
  noCtor.countConstructorCalls = false;
  TestModel tm3 = build_test_model(m, noCtor);
  for (const auto& me : tm3.method_coverage()) {
    EXPECT_FALSE(m->entity(me.toProd).has(EntityFlag::Constructor));
  }
}

TEST(Coverage, FrameworkBaseIsNotADependency) {
  auto m = java_model({{"p/ATest.java", std::string("package p;\n") + kTestCaseImport +
                                            "public class ATest extends TestCase { public void testX() {} }\n"}});
  EXPECT_TRUE(build_test_model(m).dependencies().empty());
}

TEST(Coverage, MatchesOracleOnRandomModels) {
  auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto m = freeze(testkit::random_model(seed));
    for (bool setup : {true, false}) {
      ClassifyConfig config;
      config.setupCoverage = setup;
      config.countConstructorCalls = seed % 2 == 0;
      TestModel tm = build_test_model(m, config);
      ASSERT_EQ(testkit::library_method_coverage(tm), testkit::oracle_method_coverage(tm)) << "seed " << seed;
      ASSERT_EQ(testkit::library_class_coverage(tm), testkit::oracle_class_coverage(tm)) << "seed " << seed;
    }
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 20.0);
}

TEST(Coverage, ParallelKernelMatchesSerial) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto m = freeze(testkit::random_model(seed, 400));
    TestModel tm = classify(m);
    EXPECT_EQ(coverage_edges(tm), coverage_edges_serial(tm));
  }
}

TEST(Coverage, SidesAreRespected) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto m = freeze(testkit::random_model(seed));
    TestModel tm = build_test_model(m);
    for (const auto& e : tm.method_coverage()) {
      EXPECT_TRUE(tm.is_test_side(e.fromTest));
      EXPECT_FALSE(tm.is_test_side(e.toProd));
      EXPECT_GE(e.viaInvocations, 1u);
    }
    for (const auto& d : tm.dependencies()) {
      EXPECT_TRUE(tm.is_test_side(d.fromTest));
      EXPECT_TRUE(tm.is_test_side(d.toTest));
    }
  }
}

TEST(Coverage, AddingACallNeverRemovesEdges) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    FactModel base = testkit::random_model(seed);
    auto frozen = freeze(base);
    TestModel before = build_test_model(frozen);
    // Add one call from some command to some production method.
    std::optional<EntityId> cmd, prod;
    for (const auto& e : frozen->entities()) {
      if (e.kind != EntityKind::Method) continue;
      if (!cmd && before.role(e.id) == TestRole::TestCommand) cmd = e.id;
      if (!prod && !before.is_test_side(e.id)) prod = e.id;
    }
    if (!cmd || !prod) continue;
    base.add_relation({RelationKind::Invocation, *cmd, *prod, "", std::nullopt});
    TestModel after = build_test_model(freeze(std::move(base)));
    auto a = testkit::library_class_coverage(after);
    for (const auto& e : testkit::library_class_coverage(before)) {
      bool kept = std::any_of(a.begin(), a.end(), [&](const auto& x) { return x.testCase == e.testCase && x.cls == e.cls; });
      EXPECT_TRUE(kept) << e.testCase << " -> " << e.cls;
    }
    auto am = testkit::library_method_coverage(after);
    for (const auto& e : testkit::library_method_coverage(before)) {
      bool kept = std::any_of(am.begin(), am.end(), [&](const auto& x) { return x.from == e.from && x.to == e.to; });
      EXPECT_TRUE(kept);
    }
  }
}

TEST(UnitUnderTest, DominantClassFirst) {
  std::string test = std::string("package app.test;\nimport app.*;\n") + kTestCaseImport +
                     "public class CTest extends TestCase {\n";
  for (int i = 0; i < 9; ++i) {
    test += "  public void testC" + std::to_string(i) + "() { new C().run(); ";
    if (i < 2) test += "new P().help(); new F().help(); ";
    test += "}\n";
  }
  test += "}\n";
  auto m = java_model({{"app/C.java", "package app;\npublic class C { public void run() {} }\n"},
                       {"app/P.java", "package app;\npublic class P { public void help() {} }\n"},
                       {"app/F.java", "package app;\npublic class F { public void help() {} }\n"},
                       {"app/test/CTest.java", test}});
  TestModel tm = build_test_model(m);
  auto ranking = unit_under_test_of(tm, id_of(*m, "app.test.CTest", EntityKind::Class));
  ASSERT_EQ(ranking.ranked.size(), 3u);
  EXPECT_EQ(m->entity(ranking.ranked[0].cls).qualifiedName, "app.C");
  EXPECT_EQ(ranking.ranked[0].commands, 9u);
  // P and F tie on commands and invocations; the name breaks the tie.
  EXPECT_EQ(m->entity(ranking.ranked[1].cls).qualifiedName, "app.F");
  EXPECT_TRUE(ranking.dominant);
  EXPECT_EQ(ranking.dominant_unit(), id_of(*m, "app.C", EntityKind::Class));
}

TEST(UnitUnderTest, IntegrationStyleHasNoDominance) {
  std::string test = std::string("package app.test;\nimport app.*;\n") + kTestCaseImport +
                     "public class FlowTest extends TestCase {\n"
                     "  public void testParse() { new Parser().parse(); }\n"
                     "  public void testFilter() { new Filter().apply(); }\n"
                     "  public void testBuild() { new Builder().build(); }\n}\n";
  auto m = java_model({{"app/Parser.java", "package app;\npublic class Parser { public void parse() {} }\n"},
                       {"app/Filter.java", "package app;\npublic class Filter { public void apply() {} }\n"},
                       {"app/Builder.java", "package app;\npublic class Builder { public void build() {} }\n"},
                       {"app/test/FlowTest.java", test}});
  TestModel tm = build_test_model(m);
  auto ranking = unit_under_test_of(tm, id_of(*m, "app.test.FlowTest", EntityKind::Class));
  EXPECT_EQ(ranking.ranked.size(), 3u);
  EXPECT_FALSE(ranking.dominant);
  EXPECT_FALSE(ranking.dominant_unit());
}

TEST(UnitUnderTest, RejectsNonTestCase) {
  auto m = java_model({{"p/A.java", "package p;\npublic class A {}\n"}});
  TestModel tm = build_test_model(m);
  EXPECT_THROW(unit_under_test_of(tm, id_of(*m, "p.A", EntityKind::Class)), NotATestCase);
}

TEST(TestModelJson, MiniShape) {
  auto manifest = testkit::load_json(TESTSCOPE_FIXTURES "/mini/manifest.json");
  ExtractionConfig c;
  c.roots = {TESTSCOPE_FIXTURES "/mini"};
  auto m = freeze(extract_tree(c).model);
  TestModel tm = build_test_model(m);
  auto j = test_model_to_json(tm);
  for (const auto& [qn, role] : manifest["roles"].items()) {
    bool seen = false;
    for (const auto& r : j["roles"]) {
      if (r["entity"] == qn && r["kind"] != "Package") {
        EXPECT_EQ(r["role"], role) << qn;
        seen = true;
      }
    }
    EXPECT_TRUE(seen) << qn;
  }
  std::set<std::tuple<std::string, std::string, std::size_t>> want, got;
  for (const auto& e : manifest["methodCoverage"]) want.insert({e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<std::size_t>()});
  for (const auto& e : j["methodCoverage"]) got.insert({e["from"].get<std::string>(), e["to"].get<std::string>(), e["viaInvocations"].get<std::size_t>()});
  EXPECT_EQ(got, want);
  ASSERT_EQ(j["classCoverage"].size(), 1u);
  const auto& cc = manifest["classCoverage"][0];
  EXPECT_EQ(j["classCoverage"][0]["testCase"], cc[0]);
  EXPECT_EQ(j["classCoverage"][0]["class"], cc[1]);
  EXPECT_EQ(j["classCoverage"][0]["viaInvocations"], cc[2]);
  EXPECT_EQ(j["classCoverage"][0]["commands"], cc[3]);
}
