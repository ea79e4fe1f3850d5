#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "manifest.hpp"
#include "subprocess.hpp"
#include "testscope/core/facts_io.hpp"
#include "testscope/extract/extractor.hpp"

using namespace testscope;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

ExtractionResult extract_dir(const fs::path& root) {
  ExtractionConfig c;
  c.roots = {root};
  return extract_tree(c);
}

std::set<std::pair<std::string, std::string>> resolved_pairs(const FactModel& m, RelationKind kind) {
  std::set<std::pair<std::string, std::string>> out;
  for (auto i : m.relations_of(kind)) {
    const auto& r = m.relation(i);
    if (r.to) out.insert({m.entity(r.from).qualifiedName, m.entity(*r.to).qualifiedName});
  }
  return out;
}

std::optional<std::string> callee_of(const FactModel& m, const std::string& caller) {
  auto id = m.resolve(caller, EntityKind::Method);
  if (!id) return std::nullopt;
  auto n = m.neighbors(*id, RelationKind::Invocation, Direction::Out);
  if (n.size() != 1) return std::nullopt;
  return m.entity(n.front()).qualifiedName;
}

}  // namespace

TEST(Extract, EmptyDirectory) {
  testkit::TempDir dir;
  auto r = extract_dir(dir.path());
  EXPECT_EQ(r.model.entity_count(), 0u);
  EXPECT_EQ(r.diagnostics.filesScanned, 0u);
}

TEST(Extract, MissingRoot) {
  EXPECT_THROW(extract_dir("/nonexistent/testscope/root"), NoRootFound);
}

TEST(Extract, MiniMatchesManifest) {
  auto manifest = testkit::load_json(TESTSCOPE_FIXTURES "/mini/manifest.json");
  auto r = extract_dir(TESTSCOPE_FIXTURES "/mini");
  const FactModel& m = r.model;
  EXPECT_EQ(r.diagnostics.filesScanned, manifest["files"].get<std::size_t>());
  EXPECT_EQ(r.diagnostics.filesParsed, manifest["files"].get<std::size_t>());
  EXPECT_EQ(r.diagnostics.callSites, manifest["callSites"].get<std::size_t>());
  EXPECT_EQ(r.diagnostics.unresolvedInvocationCount, 0u);

  std::map<std::string, std::set<std::string>> byKind;
  for (const auto& e : m.entities()) {
    byKind[std::string(to_string(e.kind))].insert(e.qualifiedName);
    if (e.has(EntityFlag::Interface)) byKind["Interface"].insert(e.qualifiedName);
  }
  for (auto kind : {"Package", "Class", "Interface", "Method", "Attribute"}) {
    auto expected = manifest["entities"][kind].get<std::set<std::string>>();
    EXPECT_EQ(byKind[kind], expected) << kind;
  }
  EXPECT_EQ(m.entity_count(), 17u);

  auto pairs = [](const nlohmann::json& j) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& p : j) out.insert({p[0].get<std::string>(), p[1].get<std::string>()});
    return out;
  };
  // Closed corpus: resolution recall and precision are both 1.
  EXPECT_EQ(resolved_pairs(m, RelationKind::Invocation), pairs(manifest["invocations"]));
  EXPECT_EQ(m.relation_count(RelationKind::Invocation), manifest["callSites"].get<std::size_t>());
  EXPECT_EQ(resolved_pairs(m, RelationKind::Inheritance), pairs(manifest["inheritance"]));
  EXPECT_EQ(resolved_pairs(m, RelationKind::AttributeAccess), pairs(manifest["attributeAccesses"]));
  std::set<std::string> unresolved;
  for (auto i : m.relations_of(RelationKind::Inheritance)) {
    if (!m.relation(i).to) unresolved.insert(m.relation(i).target);
  }
  EXPECT_EQ(unresolved, manifest["unresolvedInheritance"].get<std::set<std::string>>());
  EXPECT_TRUE(m.audit().empty());
}

TEST(Extract, SyntaxErrorIsADiagnostic) {
  testkit::TempDir dir;
  write(fs::path(dir.path()) / "p/Good.java", "package p;\npublic class Good { void f() {} }\n");
  write(fs::path(dir.path()) / "p/Bad.java", "package p;\npublic class Bad { void f( { }\n");
  auto r = extract_dir(dir.path());
  EXPECT_EQ(r.diagnostics.filesScanned, 2u);
  EXPECT_EQ(r.diagnostics.parseFailures, 1u);
  EXPECT_EQ(r.diagnostics.filesParsed + r.diagnostics.parseFailures, r.diagnostics.filesScanned);
  ASSERT_EQ(r.diagnostics.perFileErrors.size(), 1u);
  EXPECT_NE(r.diagnostics.perFileErrors[0].file.find("Bad.java"), std::string::npos);
  EXPECT_TRUE(r.model.resolve("p.Good", EntityKind::Class));
  EXPECT_FALSE(r.model.resolve("p.Bad", EntityKind::Class));
}

TEST(Extract, ResolutionChain) {
  testkit::TempDir dir;
  fs::path root = dir.path();
  write(root / "util/FileUtils.java",
        "package util;\npublic class FileUtils {\n"
        "  public static FileUtils getFileUtils() { return new FileUtils(); }\n"
        "  public FileUtils self() { return this; }\n"
        "  public void touch() {}\n}\n");
  write(root / "app/C.java",
        "package app;\nimport util.FileUtils;\npublic class C {\n"
        "  private FileUtils fu;\n"
        "  void helper() {}\n"
        "  void self() { this.helper(); }\n"
        "  void bare() { helper(); }\n"
        "  void field() { fu.getFileUtils(); }\n"
        "  void statik() { FileUtils.getFileUtils(); }\n"
        "  void local() { FileUtils x = null; x.touch(); }\n"
        "  void param(FileUtils p) { p.touch(); }\n"
        "  void chain() { fu.self().touch(); }\n"
        "  void unknown(Object o) { o.mystery(); }\n}\n");
  auto r = extract_dir(root);
  const FactModel& m = r.model;
  EXPECT_EQ(callee_of(m, "app.C.self/0"), "app.C.helper/0");
  EXPECT_EQ(callee_of(m, "app.C.bare/0"), "app.C.helper/0");
  EXPECT_EQ(callee_of(m, "app.C.field/0"), "util.FileUtils.getFileUtils/0");
  EXPECT_EQ(callee_of(m, "app.C.statik/0"), "util.FileUtils.getFileUtils/0");
  EXPECT_EQ(callee_of(m, "app.C.local/0"), "util.FileUtils.touch/0");
  EXPECT_EQ(callee_of(m, "app.C.param/1"), "util.FileUtils.touch/0");
  auto chain = m.neighbors(*m.resolve("app.C.chain/0", EntityKind::Method), RelationKind::Invocation,
                           Direction::Out);
  ASSERT_EQ(chain.size(), 2u);
  EXPECT_EQ(m.entity(chain[0]).qualifiedName, "util.FileUtils.self/0");
  EXPECT_EQ(m.entity(chain[1]).qualifiedName, "util.FileUtils.touch/0");
  auto unknown = *m.resolve("app.C.unknown/1", EntityKind::Method);
  EXPECT_TRUE(m.neighbors(unknown, RelationKind::Invocation, Direction::Out).empty());
  EXPECT_EQ(m.edges(unknown, RelationKind::Invocation, Direction::Out).size(), 1u);
  EXPECT_GE(r.diagnostics.unresolvedInvocationCount, 1u);
}

TEST(Extract, GeneratedHeaderAndAnnotations) {
  testkit::TempDir dir;
  write(fs::path(dir.path()) / "gen/Lexer.java", "// @generated by a tool\npackage gen;\npublic class Lexer {}\n");
  write(fs::path(dir.path()) / "gen/Hand.java", "package gen;\n// @generated but not a header\npublic class Hand {}\n");
  write(fs::path(dir.path()) / "t/FooTest.java",
        "package t;\nimport org.junit.Test;\npublic class FooTest {\n  @Test public void checks() {}\n"
        "  @org.junit.Before public void prepare() {}\n}\n");
  auto r = extract_dir(dir.path());
  const FactModel& m = r.model;
  EXPECT_TRUE(m.entity(*m.resolve("gen.Lexer", EntityKind::Class)).has(EntityFlag::Generated));
  EXPECT_FALSE(m.entity(*m.resolve("gen.Hand", EntityKind::Class)).has(EntityFlag::Generated));
  const auto& checks = m.entity(*m.resolve("t.FooTest.checks/0", EntityKind::Method));
  EXPECT_EQ(checks.annotations, std::vector<std::string>{"Test"});
  const auto& prepare = m.entity(*m.resolve("t.FooTest.prepare/0", EntityKind::Method));
  EXPECT_EQ(prepare.annotations, std::vector<std::string>{"Before"});
}

TEST(Extract, AnonymousClassesGetScopedNames) {
  testkit::TempDir dir;
  write(fs::path(dir.path()) / "p/A.java",
        "package p;\npublic class A {\n  void run() {\n    Runnable r = new Runnable() { public void run() {} };\n"
        "    Runnable s = new Runnable() { public void run() {} };\n  }\n}\n");
  auto r = extract_dir(dir.path());
  EXPECT_TRUE(r.model.resolve("p.A.run/0$anon1", EntityKind::Class));
  EXPECT_TRUE(r.model.resolve("p.A.run/0$anon2", EntityKind::Class));
  EXPECT_TRUE(r.model.resolve("p.A.run/0$anon1.run/0", EntityKind::Method));
}

TEST(Extract, Deterministic) {
  auto a = extract_dir(TESTSCOPE_FIXTURES "/indicators");
  auto b = extract_dir(TESTSCOPE_FIXTURES "/indicators");
  EXPECT_EQ(export_facts(a.model), export_facts(b.model));
}

TEST(Extract, ParallelParseMatchesSerial) {
  std::vector<SourceFile> files;
  for (const auto& e : fs::recursive_directory_iterator(TESTSCOPE_FIXTURES "/indicators")) {
    if (e.path().extension() == ".java") files.push_back({e.path().string(), testkit::read_file(e.path()), false});
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  ASSERT_GT(files.size(), 20u);
  ExtractionConfig config;
  auto par = link_files(parse_sources(files), files, config);
  auto ser = link_files(parse_sources_serial(files), files, config);
  EXPECT_EQ(export_facts(par.model), export_facts(ser.model));
  EXPECT_EQ(par.diagnostics.callSites, ser.diagnostics.callSites);
}

TEST(Extract, SourceRootKinds) {
  testkit::TempDir dir;
  fs::path root = dir.path();
  write(root / "src/main/java/p/A.java", "package p; class A {}\n");
  write(root / "src/test/java/p/ATest.java", "package p; class ATest {}\n");
  write(root / "mixed/p/B.java", "package p; class B {}\n");
  write(root / "mixed/p/BTest.java", "package p; class BTest {}\n");
  EXPECT_EQ(classify_source_root(root / "src/test/java"), SourceRootKind::TestRoot);
  EXPECT_EQ(classify_source_root(root / "src/main/java"), SourceRootKind::ProductionRoot);
  EXPECT_EQ(classify_source_root(root / "mixed"), SourceRootKind::Mixed);
}

TEST(Extract, TestPathHint) {
  testkit::TempDir dir;
  write(fs::path(dir.path()) / "test/p/Helper.java", "package p; class Helper {}\n");
  write(fs::path(dir.path()) / "main/q/Thing.java", "package q; class Thing {}\n");
  auto r = extract_dir(dir.path());
  EXPECT_TRUE(r.model.entity(*r.model.resolve("p.Helper", EntityKind::Class)).has(EntityFlag::TestPath));
  EXPECT_FALSE(r.model.entity(*r.model.resolve("q.Thing", EntityKind::Class)).has(EntityFlag::TestPath));
}

TEST(Extract, InvalidEncodingIsConfigError) {
  ExtractionConfig c;
  c.roots = {TESTSCOPE_FIXTURES "/mini"};
  c.sourceEncoding = "EBCDIC";
  EXPECT_THROW(extract_tree(c), ConfigError);
}

TEST(Extract, Latin1Sources) {
  testkit::TempDir dir;
  write(fs::path(dir.path()) / "p/A.java", "package p;\n// caf\xe9\npublic class A { void f() {} }\n");
  ExtractionConfig c;
  c.roots = {dir.path()};
  c.sourceEncoding = "ISO-8859-1";
  auto r = extract_tree(c);
  EXPECT_EQ(r.diagnostics.parseFailures, 0u);
  EXPECT_TRUE(r.model.resolve("p.A.f/0", EntityKind::Method));
}
